import math
from pathlib import Path

import pytest

import psusp

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def test_kfold_three():
    assert psusp.kfold(3) == [1, 2, 3, 4, 5, 4, 3, 4, 5, 6, 7]
    with pytest.raises(psusp.Error, match="domain"):
        psusp.kfold(4)


def test_pattern_violation():
    assert psusp.pattern_violation([1, 2, 3]) is None
    assert psusp.pattern_violation([1, 3]) == 1


def test_entropy_exact():
    value, reducible = psusp.entropy_exact(psusp.CantorSystem.sft([[1, 1], [1, 0]]))
    assert value == pytest.approx(math.log((1 + 5 ** 0.5) / 2), abs=1e-9)
    assert not reducible
    assert psusp.entropy_exact(psusp.CantorSystem.odometer([2, 3]))[0] == 0.0


def test_rotation_estimate_is_exact_for_rigid_rotation():
    rows = psusp.rotation_estimate(psusp.AnnulusMap.rotation(0.3), 0.5, 0.0, 50)
    assert len(rows) == 50
    assert all(abs(est - 0.3) < 1e-12 for _, est in rows)


def test_map_apply_and_rigidity():
    f = psusp.AnnulusMap.parse("rotation:0.25")
    assert f.apply(0.5, 0.1) == pytest.approx((0.5, 0.35))
    assert [n for n, _ in psusp.rigidity_scan(f, 8, 12, 1e-9)] == [4, 8, 12]


def test_entropy_bracket_orders():
    lower, upper = psusp.entropy_bracket("rotation:0.5", psusp.CantorSystem.full_shift(2), 1 / 16, 6, 2000, 1)
    assert 0.0 < lower <= upper


def test_hak_toy_passes():
    rows = psusp.hak_verify(str(FIXTURES / "hak_toy.ini"))
    assert rows and all(r["pass"] for r in rows)


def test_horseshoe_branch_map():
    knots = "0,0; 1153/2625,0; 1252/2625,1; 421/875,1; 454/875,0; 1373/2625,0; 1472/2625,1; 1,1"
    cert = psusp.horseshoe(knots, 3, 3)
    assert cert["certified"]
    assert cert["nonempty"] == [3, 9, 27, 81]
    assert cert["bound"] == pytest.approx(math.log(3))


def test_render_counts_links():
    svg = psusp.render_chains(7, 3, 2)
    assert svg.startswith("<svg")
    assert svg.count("<polygon") == 18
