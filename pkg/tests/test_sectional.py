from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstrand.algebra import AlgebraElement, AlgebraError, build_algebra, g2_cartan
from gstrand.sectional import apply_sectional, check_intertwining, make_sectional, sectional_so3

CASES = [
    ("so3", "compact", (2,), (3,)),
    ("sl2r", "normal", (Fraction(1, 2),), (3,)),
    ("so4", "compact", (1, 2), (3, -1)),
    ("g2r", "normal", g2_cartan(1, 3), g2_cartan(2, 5)),
]


@pytest.mark.parametrize("tag,form,a,c", CASES)
def test_intertwining_on_random_elements(tag, form, a, c):
    tbl = build_algebra(tag)
    spec = make_sectional(tbl, form, a, c)
    x = np.random.default_rng(0).normal(size=(50, tbl.dim))
    assert check_intertwining(spec, tbl, x) <= 1e-13


@pytest.mark.parametrize("tag,form,a,c", CASES)
def test_kills_cartan_and_is_diagonal_on_root_spaces(tag, form, a, c):
    tbl = build_algebra(tag)
    spec = make_sectional(tbl, form, a, c)
    for i in tbl.cartan_indices:
        assert spec.diag[i] == 0
    for ratio, (p, q) in zip(spec.ratios, tbl.root_spaces):
        assert spec.diag[p] == spec.diag[q] == float(ratio)


def test_exact_ratios_for_rational_inputs():
    tbl = build_algebra("g2r")
    spec = make_sectional(tbl, "normal", g2_cartan(1, 3), g2_cartan(2, 5))
    assert all(isinstance(r, Fraction) for r in spec.ratios)
    # <alpha, a> / <alpha, c> with roots evaluated on (a11, a22)
    a, c = g2_cartan(1, 3), g2_cartan(2, 5)
    for root, ratio in zip(tbl.roots, spec.ratios):
        num = root[0] * a[0] + root[1] * a[1]
        den = root[0] * c[0] + root[1] * c[1]
        assert ratio == Fraction(num) / Fraction(den)


def test_so3_closed_form_matches_general_operator():
    tbl = build_algebra("so3")
    a, c = 1.7, -0.4
    # phi_{a,c} = ad_a^{-1} ad_c has ratio c/a
    spec = make_sectional(tbl, "compact", (c,), (a,))
    x = np.random.default_rng(1).normal(size=(20, 3))
    assert np.allclose(spec.apply_array(x), sectional_so3(a, c, (0, 0, 1), x), atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3),
       st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3))
def test_so3_closed_form_projects_off_axis(axis, zeta):
    out = sectional_so3(2.0, 0.5, axis, zeta)
    A = np.asarray(axis) / np.linalg.norm(axis)
    assert abs(out @ A) <= 1e-12 * (1 + np.linalg.norm(zeta))
    # idempotent up to the scalar: applying twice scales by (c/a)^2
    assert np.allclose(sectional_so3(2.0, 0.5, axis, out), 0.25 * out, atol=1e-12 * (1 + np.linalg.norm(zeta)))


def test_non_regular_c_names_the_root():
    tbl = build_algebra("g2r")
    with pytest.raises(AlgebraError, match=r"not regular.*\('1', '-1'\)"):
        make_sectional(tbl, "normal", (1, 2), (1, 1))  # root (1, -1) vanishes on c
    with pytest.raises(AlgebraError, match="not regular"):
        make_sectional(build_algebra("so3"), "compact", (1,), (0,))
    with pytest.raises(AlgebraError, match="not regular"):
        make_sectional(tbl, "normal", (1.0, 2.0), (1.0, 1.0 + 1e-14))
    # the threshold is relative to |c|, so a small but regular c is accepted
    spec = make_sectional(build_algebra("so3"), "compact", (1.0,), (1e-15,))
    assert spec.ratios[0] == pytest.approx(1e15)


def test_rejections():
    with pytest.raises(AlgebraError, match="no root data"):
        make_sectional(build_algebra("se3"), "compact", (), ())
    with pytest.raises(AlgebraError, match="real form"):
        make_sectional(build_algebra("so3"), "normal", (1,), (1,))
    with pytest.raises(AlgebraError, match="rank"):
        make_sectional(build_algebra("so4"), "compact", (1,), (1,))
    with pytest.raises(ValueError):
        sectional_so3(0.0, 1.0, (0, 0, 1), [1, 0, 0])
    spec = make_sectional(build_algebra("so3"), "compact", (1,), (2,))
    with pytest.raises(AlgebraError):
        apply_sectional(spec, AlgebraElement("sl2r", [1, 0, 0]))


def test_apply_sectional_on_element():
    spec = make_sectional(build_algebra("sl2r"), "normal", (3,), (2,))
    out = apply_sectional(spec, AlgebraElement("sl2r", [5.0, 1.0, -2.0]))
    assert np.array_equal(out.coeffs, [0.0, 1.5, -3.0])
