#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psusp/annulus.hpp"
#include "psusp/cantor.hpp"
#include "psusp/chains.hpp"
#include "psusp/config.hpp"
#include "psusp/error.hpp"
#include "psusp/hak.hpp"
#include "psusp/horseshoe.hpp"
#include "psusp/suspension.hpp"

namespace py = pybind11;
using namespace psusp;

namespace {

suspension::SuspensionSystem system_from(const std::string& map, const cantor::CantorSystem& h, int window) {
    return suspension::SuspensionSystem(annulus::LiftedAnnulusMap::parse(map), h, window);
}

}  // namespace

PYBIND11_MODULE(_psusp, m) {
    m.doc() = "Pseudo-suspension construction and verification toolkit";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    // Cantor systems
    py::class_<cantor::CantorSystem>(m, "CantorSystem")
        .def_static("full_shift", &cantor::CantorSystem::full_shift, py::arg("k"))
        .def_static("sft", &cantor::CantorSystem::sft, py::arg("adjacency"))
        .def_static("substitution", &cantor::CantorSystem::substitution, py::arg("rules"))
        .def_static("odometer", &cantor::CantorSystem::odometer, py::arg("bases"), py::arg("depth") = 0)
        .def_property_readonly("label", &cantor::CantorSystem::label)
        .def_property_readonly("alphabet_size", &cantor::CantorSystem::alphabet_size)
        .def("__repr__", [](const cantor::CantorSystem& s) { return "<CantorSystem " + s.label() + ">"; });

    m.def("entropy_exact", [](const cantor::CantorSystem& s) {
        const auto e = cantor::entropy_exact(s);
        return py::make_tuple(e.value, e.reducible);
    }, py::arg("system"), "Exact entropy and the reducibility flag.");

    // Annulus maps
    py::class_<annulus::LiftedAnnulusMap>(m, "AnnulusMap")
        .def_static("parse", &annulus::LiftedAnnulusMap::parse, py::arg("pipeline"))
        .def_static("rotation", &annulus::LiftedAnnulusMap::rotation, py::arg("beta"))
        .def_static("identity", &annulus::LiftedAnnulusMap::identity)
        .def("apply", [](const annulus::LiftedAnnulusMap& f, double t, double r) {
            const auto p = f.apply(annulus::StripPoint{t, r});
            return py::make_tuple(p.t, p.r);
        }, py::arg("t"), py::arg("r"))
        .def("inverse", &annulus::LiftedAnnulusMap::inverse)
        .def("then", &annulus::LiftedAnnulusMap::then, py::arg("next"));

    m.def("rotation_estimate", &annulus::rotation_estimate, py::arg("map"), py::arg("t"), py::arg("r"), py::arg("n"));
    m.def("rigidity_scan", [](const annulus::LiftedAnnulusMap& f, int grid, long horizon, double eps) {
        std::vector<std::pair<long, double>> out;
        for (const auto& row : annulus::rigidity_scan(f, grid, horizon, eps)) out.emplace_back(row.n, row.sup);
        return out;
    }, py::arg("map"), py::arg("grid"), py::arg("horizon"), py::arg("eps"));
    m.def("rotation_family", [](const std::vector<int>& bits, double eps) {
        const auto f = annulus::rotation_family(bits, eps);
        return py::make_tuple(f.alpha, f.schedule);
    }, py::arg("bits"), py::arg("eps"));

    // Suspension
    m.def("entropy_bracket", [](const std::string& map, const cantor::CantorSystem& h, double eps, int n, long budget,
                                std::uint64_t seed, int window) {
        const auto b = suspension::entropy_bracket(system_from(map, h, window), eps, n, budget, seed);
        return py::make_tuple(b.lower, b.upper);
    }, py::arg("map"), py::arg("system"), py::arg("eps"), py::arg("n"), py::arg("budget"), py::arg("seed"),
       py::arg("window") = cantor::default_radius);
    m.def("winding_rate", [](const std::string& map, const cantor::CantorSystem& h, double t, double r, long n,
                             std::uint64_t seed) {
        auto sys = system_from(map, h, cantor::default_radius);
        const int id = sys.register_seed(cantor::random_point(h, seed));
        return suspension::winding_rate(sys, sys.seed_point(id, t, r), n);
    }, py::arg("map"), py::arg("system"), py::arg("t"), py::arg("r"), py::arg("n"), py::arg("seed"));

    // HAK verification from an INI file
    m.def("hak_verify", [](const std::string& path) {
        const auto cfg = config::Config::load(path);
        const auto rep = hak::hak_verify(config::build_stages(cfg), config::build_hak_options(cfg));
        py::list rows;
        for (const auto& c : rep.checks)
            rows.append(py::dict(py::arg("condition") = c.condition, py::arg("stage") = c.stage, py::arg("pass") = c.pass,
                                 py::arg("measured") = c.measured, py::arg("threshold") = c.threshold));
        return rows;
    }, py::arg("path"));

    // Chains and horseshoes
    m.def("kfold", [](int k) { return chains::kfold(k).values; }, py::arg("k"));
    m.def("pattern_violation", &chains::pattern_violation, py::arg("values"));
    m.def("render_chains", [](int links, int kfold_k, int levels) {
        std::vector<chains::ChainCover> out;
        if (levels > 0) out.push_back(chains::essential_chain(links));
        for (int l = 1; l < levels; ++l) out.push_back(chains::refine_chain(out.back(), chains::kfold(kfold_k)));
        return chains::render_chains(out);
    }, py::arg("links") = 7, py::arg("kfold") = 3, py::arg("levels") = 1);
    m.def("horseshoe", [](const std::string& knots, int k, int depth, const std::string& chain) {
        const auto g = horseshoe::PLMap::parse(knots);
        const auto c = chain.empty() ? horseshoe::uniform_chain(7) : horseshoe::parse_chain(chain);
        const auto cert = horseshoe::horseshoe_extract(g, c, k, depth);
        return py::dict(py::arg("certified") = cert.certified, py::arg("m") = cert.m, py::arg("bound") = cert.bound,
                        py::arg("nonempty") = cert.nonempty,
                        py::arg("first_empty") = cert.first_empty ? py::cast(*cert.first_empty) : py::none());
    }, py::arg("knots"), py::arg("k"), py::arg("depth"), py::arg("chain") = "");
}
