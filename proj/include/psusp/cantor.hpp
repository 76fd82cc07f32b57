#pragma once

/// Symbolic models of Cantor-set homeomorphisms.
///
/// A point is a bi-infinite symbol sequence. It is stored as a shared,
/// immutable source (an explicit core word plus eventually periodic tails on
/// both sides) and an offset, so shifting is exact and cheap. The window
/// (indices -W..W around the offset) is materialized for metric work.
///
/// Odometer points keep their mixed-radix digits at window indices 0..N-1
/// (least significant digit at index 0) and are acted on by carry addition.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace psusp::cantor {

using Symbol = int;
using Word = std::vector<Symbol>;

inline constexpr int default_radius = 32;

/// Square 0/1 matrix on symbols 0..k-1.
class Adjacency {
public:
    Adjacency() = default;
    explicit Adjacency(std::vector<std::vector<int>> rows);

    int size() const noexcept { return k_; }
    bool allowed(Symbol a, Symbol b) const { return cells_[static_cast<std::size_t>(a * k_ + b)] != 0; }
    bool irreducible() const;
    std::vector<std::vector<int>> rows() const;

private:
    int k_ = 0;
    std::vector<std::uint8_t> cells_;
};

/// Continuation rule outside the explicit core of a sequence.
struct PeriodicTails {
    Word left;   // read outward (leftward) from the core
    Word right;  // read outward (rightward) from the core
};
struct GraphPathTails {
    std::shared_ptr<const Adjacency> adjacency;
    std::uint64_t seed = 0;
};
struct DigitStream {
    std::vector<int> bases;
};
using Extension = std::variant<PeriodicTails, GraphPathTails, DigitStream>;

class SymbolSequence {
public:
    /// `core[0]` sits at index `core_start`; everything else follows `ext`.
    SymbolSequence(Word core, long core_start, Extension ext, int alphabet_size,
                   int radius = default_radius);

    int alphabet_size() const noexcept;
    int radius() const noexcept { return radius_; }
    long offset() const noexcept { return offset_; }

    /// Window symbol, i in [-W, W].
    Symbol operator[](int i) const { return window_[static_cast<std::size_t>(i + radius_)]; }
    std::span<const Symbol> window() const noexcept { return window_; }

    /// Symbol at an arbitrary index (relative to the current offset).
    Symbol symbol(long i) const;

    const Extension& extension() const noexcept;

    /// The same underlying sequence read `n` places further right.
    SymbolSequence shifted(long n) const;
    SymbolSequence with_radius(int radius) const;

    /// Equality of windows on indices -radius..radius.
    bool agrees_with(const SymbolSequence& other, int radius) const;

private:
    struct Source;
    SymbolSequence(std::shared_ptr<const Source> source, long offset, int radius);
    void fill_window();

    std::shared_ptr<const Source> source_;
    long offset_ = 0;
    int radius_ = default_radius;
    Word window_;
};

struct FullShift {
    int k = 2;
};
struct Sft {
    std::shared_ptr<const Adjacency> adjacency;
};
struct Substitution {
    std::vector<Word> rules;  // rules[a] is the image of symbol a
};
struct Odometer {
    std::vector<int> bases;  // cycled when depth exceeds bases.size()
    int depth = 0;
};
using SystemKind = std::variant<FullShift, Sft, Substitution, Odometer>;

class CantorSystem {
public:
    static CantorSystem full_shift(int k);
    static CantorSystem sft(std::vector<std::vector<int>> adjacency);
    static CantorSystem substitution(std::vector<Word> rules);
    static CantorSystem odometer(std::vector<int> bases, int depth = 0);

    const SystemKind& kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    int alphabet_size() const noexcept { return alphabet_; }
    bool is_odometer() const noexcept { return std::holds_alternative<Odometer>(kind_); }

    /// Odometer only: per-digit bases out to the configured depth.
    std::vector<int> digit_bases() const;
    /// Odometer only: product of the digit bases (the period of every orbit).
    long odometer_period() const;

    /// A long legal word of the substitution language (fixed prefix).
    const Word& substitution_word() const;

private:
    CantorSystem(SystemKind kind, std::string label, int alphabet);

    SystemKind kind_;
    std::string label_;
    int alphabet_ = 2;
    std::shared_ptr<const Word> language_word_;
};

/// Check a point against a system (alphabet, adjacency, digit ranges).
void validate(const SymbolSequence& c, const CantorSystem& sys);

/// h(c).
SymbolSequence shift_forward(const SymbolSequence& c, const CantorSystem& sys);
/// h^{-1}(c).
SymbolSequence shift_backward(const SymbolSequence& c, const CantorSystem& sys);
/// h^n(c) for any integer n.
SymbolSequence iterate(const SymbolSequence& c, const CantorSystem& sys, long n);

/// 2^-m with m the smallest |i| <= radius where the windows differ; 0 if none.
double cantor_metric(const SymbolSequence& c1, const SymbolSequence& c2, int radius);

/// Smallest m such that 2^-m <= eps: points agreeing on |i| < m are within eps.
int agreement_depth(double eps);

struct ExactEntropy {
    double value = 0.0;
    bool reducible = false;  // SFT whose graph is not strongly connected
};
ExactEntropy entropy_exact(const CantorSystem& sys);

/// Spectral radius of a 0/1 matrix by power iteration on A + I.
double spectral_radius(const Adjacency& a);

/// Default point built from an explicit core, with the system's natural tails.
SymbolSequence point_from_core(const CantorSystem& sys, Word core, long core_start,
                               int radius = default_radius);
/// The periodic point ...www.www... with w[0] at index 0.
SymbolSequence periodic_point(const Word& period, int alphabet_size, int radius = default_radius);
/// Odometer point from its digits (least significant first).
SymbolSequence odometer_point(const CantorSystem& sys, const std::vector<int>& digits,
                              int radius = default_radius);
std::vector<int> odometer_digits(const SymbolSequence& c, const CantorSystem& sys);

SymbolSequence random_point(const CantorSystem& sys, std::uint64_t seed,
                            int radius = default_radius);

/// Word length -> maximal return gap. Unseen words map to nullopt.
using RecurrenceProfile = std::map<Word, std::optional<long>>;
RecurrenceProfile recurrence_profile(const CantorSystem& sys, const SymbolSequence& c, int length,
                                     long horizon);

/// Smallest n in 1..horizon with [u] meeting h^{-n}[v], if any.
std::optional<long> mixing_witness_symbolic(const CantorSystem& sys, const Word& u, const Word& v,
                                            long horizon);

/// Whether `w` occurs in the language of the system (odometer: digit ranges).
bool in_language(const CantorSystem& sys, const Word& w);

}  // namespace psusp::cantor
