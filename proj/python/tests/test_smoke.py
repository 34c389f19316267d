import os
import subprocess
from fractions import Fraction

import pytest

import cardfn


def test_count_geometric_half():
    s = cardfn.Series.geometric(1, Fraction(1, 2))
    assert str(cardfn.count(s, Fraction(1, 4)).cardinality) == "2"
    assert str(cardfn.count(s, Fraction(1, 3)).cardinality) == "1"


def test_count_accepts_strings_and_ints():
    s = cardfn.Series.preset("EX_2_6")
    r = cardfn.count(s, "1/2")
    assert r.cardinality == cardfn.Cardinality.continuum()
    assert r.cardinality.kind == "continuum"
    assert str(cardfn.count(s, 0).cardinality) == "1"
    assert r.witnesses


def test_interleaved_values():
    s = cardfn.Series.preset("INTERLEAVED_GEO(1/5)")
    assert cardfn.count(s, Fraction(1, 4)).cardinality == cardfn.Cardinality.omega()
    assert cardfn.count(s, Fraction(1, 96)).cardinality == cardfn.Cardinality.continuum()
    assert cardfn.count(s, Fraction(7, 24)).cardinality == cardfn.Cardinality.fin(2)


def test_series_values():
    s = cardfn.Series.geometric(1, Fraction(1, 3))
    assert s.term(1) == Fraction(1, 3)
    assert s.remainder(0) == Fraction(1, 2)
    assert s.total() == Fraction(1, 2)
    blocks = cardfn.Series.preset("BLOCKS_2_5")
    lo, hi = blocks.total()
    assert lo < hi


def test_spec_round_trip():
    s = cardfn.Series.preset("GN_CANTORVAL")
    assert cardfn.Series.parse(s.render()) == s


def test_scan_and_topology():
    gn = cardfn.Series.preset("GN_CANTORVAL")
    report = cardfn.range_scan(gn, 8)
    assert [str(c) for c in report["cardinality_set"]] == ["1", "2"]
    assert not report["budget_limited"]
    assert cardfn.classify(gn)["kind"] == "CantorvalCandidate"
    p = cardfn.convergence_profile(cardfn.Series.geometric(1, Fraction(3, 10)))
    assert (p["A"], p["B"]) == ("no", "yes")
    c = cardfn.classify(cardfn.Series.preset("INTERLEAVED_GEO(1/3)"))
    assert c["kind"] == "IntervalUnion" and c["components"] == 1
    assert cardfn.cover(cardfn.Series.preset("EX_3_5"), 3) == [(0, 1)]
    assert cardfn.gaps(gn, 4)["gaps"]


def test_constructions():
    base = cardfn.unique_base()
    spec = cardfn.add_m_totals(base, 3)
    scan = cardfn.range_scan(spec, len(spec.prefix) + 6)
    assert [str(c) for c in scan["cardinality_set"]] == ["1", "3", "4", "6"]
    doubled, interior = cardfn.double_terms(cardfn.Series.preset("EX_3_5"))
    assert interior
    counts, rng = cardfn.finite_range([4, 4, 2, 2, 2])
    assert rng == {1, 3, 5, 7}
    assert sum(counts.values()) == 32
    assert cardfn.search_finite_ranges({1, 4}, 3, 6) == []
    assert "EX_4_19" in cardfn.preset_names()


def test_omega_witness():
    s = cardfn.Series.geometric(1, Fraction(3, 5))
    t = cardfn.omega_witness(s)
    assert isinstance(t, Fraction)
    assert cardfn.count(s, t).cardinality.is_infinite


def test_errors_carry_kind():
    with pytest.raises(cardfn.CardfnError) as e:
        cardfn.count(cardfn.Series.preset("EX_2_6"), 9)
    assert e.value.kind == "target out of range"
    with pytest.raises(cardfn.CardfnError) as e:
        cardfn.Series.preset("NO_SUCH")
    assert e.value.kind == "unknown preset"
    with pytest.raises(ValueError):
        cardfn.Series.geometric(1, Fraction(3, 2))
    with pytest.raises(TypeError):
        cardfn.count(cardfn.Series.preset("EX_2_6"), 0.5)


def test_budget_lower_bound():
    s = cardfn.Series.parse('tail.kind = blocks\nbase = 2\nsizes = "8n"\n')
    t = sum(Fraction(4 * n, 2 ** (n * n)) for n in range(1, 21))
    r = cardfn.count(s, t, budget=10)
    assert r.budget_exceeded
    assert not r.cardinality.is_exact


@pytest.mark.skipif("CARDFN_CLI" not in os.environ, reason="cli path not provided")
def test_cli_agrees():
    out = subprocess.run(
        [os.environ["CARDFN_CLI"], "count", "--preset", "EX_2_6", "--target", "1"],
        capture_output=True, text=True, check=True,
    ).stdout
    assert out.splitlines()[0] == "1\tcontinuum"
