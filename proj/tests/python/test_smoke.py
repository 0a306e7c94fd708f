import json
import math
from fractions import Fraction

import pytest

import nilspec


def test_examples_and_steps():
    assert nilspec.examples() == ["I", "II", "III", "IV", "V"]
    assert all(nilspec.step(e) == 3 for e in nilspec.examples())
    assert nilspec.labels("I") == ["X1", "X2", "Y1", "Y2", "Z1", "Z2", "W"]


def test_bch_is_exact_and_associative():
    n = len(nilspec.labels("II"))
    x = [Fraction(1, 2), 1, 0, Fraction(-1, 3), 2][:n]
    y = [0, Fraction(3, 4), 1, 1, 0][:n]
    z = [1, -1, Fraction(1, 5), 0, 1][:n]
    left = nilspec.bch_product("II", nilspec.bch_product("II", x, y), z)
    right = nilspec.bch_product("II", x, nilspec.bch_product("II", y, z))
    assert left == right
    assert all(isinstance(c, Fraction) for c in left)
    with pytest.raises(ValueError):
        nilspec.bch_product("II", [1, 2], y)


def test_conjugacy_witness():
    n = len(nilspec.labels("IV"))
    x = [0] * n
    x[0] = 1
    a = [0] * n
    a[1] = Fraction(1, 2)
    # exp(a) exp(x) exp(-a) = exp(a) exp(x) exp(a)^-1
    y = nilspec.bch_product("IV", nilspec.bch_product("IV", a, x), [-c for c in a])
    w = nilspec.is_conjugate_in_G("IV", x, y)
    assert w is not None
    back = nilspec.bch_product("IV", nilspec.bch_product("IV", w, x), [-c for c in w])
    assert back == y


def test_example_iv_multiplicity():
    lam = "sqrt(4*pi*(7-pi))"
    a = nilspec.multiplicity("IV", lam, 1)
    b = nilspec.multiplicity("IV", lam, 2)
    assert (a["m_prime"], b["m_prime"]) == (28, 14)
    assert a["completeness"] == "complete_for_structured_cases"
    assert math.isclose(a["lambda_float"], math.sqrt(4 * math.pi * (7 - math.pi)))


def test_heisenberg_lengths():
    got = sorted(v for _, v in nilspec.heisenberg_central_lengths("7"))
    assert got == pytest.approx([math.sqrt(4 * math.pi * (7 - math.pi)), 7.0])


def test_compare_verdicts():
    assert nilspec.compare("II")["same_length_spectrum"] == "yes"
    rep = nilspec.compare("I")
    assert rep["same_length_spectrum"] == "no"
    assert rep["lengths_agree"]
    assert rep["differing"] is not None


def test_geodesic_certificate():
    word = [0] * 7
    word[3] = 1
    cert = nilspec.translated_geodesic("III", word, 1, 1.0)
    assert cert is not None
    assert cert["lambda"] == pytest.approx(1.0, abs=1e-6)
    assert cert["residual_translation"] < 1e-6
    assert cert["residual_horizontality"] < 1e-6


def test_marking_and_cli():
    assert nilspec.marking_passed("V")
    code, out, err = nilspec.run(["validate", "--example", "II", "--format", "json"])
    assert code == 0, err
    assert json.loads(out)["ok"]
    code, _, _ = nilspec.run(["spectrum", "--example", "nope"])
    assert code == 2
