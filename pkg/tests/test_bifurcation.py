import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from doublehopf.bifurcation import (
    HOPF_LABELS,
    admissible_gamma2_interval,
    droplet_at_sigma,
    droplet_sample,
    droplet_section,
    equilibria_on_circle,
    fit_pinch_exponent,
    fold_hopf_points,
    h23_frequency,
    hopf_curves,
    interior_sigma,
    on_curve_check,
    refine_droplet,
    tangency_curvature,
    tangency_vector,
)
from doublehopf.equilibria import basis_jacobian
from doublehopf.errors import ConfigError, DomainError
from doublehopf.model import PolyMap, ReducedCoefficients, ScaledParameters, example_coefficients

A_GEN = np.array([[0.3, -0.2], [0.1, 0.4]])
Q_GEN = np.array([[1.0, 0.5], [-0.3, 1.2]])


def _curve(coeffs, label):
    return next(c for c in hopf_curves(coeffs) if c.label == label)


def test_five_labelled_curves(paper):
    curves = hopf_curves(paper)
    assert tuple(c.label for c in curves) == HOPF_LABELS
    assert len(curves) == 5


def test_interior_slopes(paper):
    assert _curve(paper, "H_a_1to2").slope() == pytest.approx(-2, abs=1e-12)
    assert _curve(paper, "H_b_1to2").slope() == pytest.approx(-1 / 3, abs=1e-12)
    assert _curve(paper, "H_2to3").slope() == pytest.approx(-3 / 4, abs=1e-12)


def test_axes_lines(paper):
    a = _curve(paper, "H_a_0to1")
    assert a.normal == (1.0, 0.0) and a.activity == "line"
    assert not np.isfinite(a.slope())
    b = _curve(paper, "H_b_0to1")
    assert b.normal == (0.0, 1.0) and b.slope() == 0


def test_active_half_lines(paper):
    expected = {
        "H_a_1to2": (-1 / np.sqrt(5), 2 / np.sqrt(5)),
        "H_b_1to2": (-3 / np.sqrt(10), 1 / np.sqrt(10)),
        "H_2to3": (-0.8, 0.6),
    }
    for label, d in expected.items():
        c = _curve(paper, label)
        assert c.activity == "half"
        np.testing.assert_allclose(c.direction, d, atol=1e-15)
        assert c.is_active(np.array(d)) and not c.is_active(-np.array(d))


@pytest.mark.parametrize("t", np.linspace(0.05, 3, 7))
def test_h23_trace_zero(paper, t):
    c = _curve(paper, "H_2to3")
    g = t * np.array(c.direction)
    chk = on_curve_check(c, g, paper)
    assert abs(chk["trace"]) < 1e-12 and chk["det"] > 0


def test_h23_frequency_example(paper):
    assert h23_frequency((-1, 0.75), paper) == pytest.approx(np.sqrt(0.3125), rel=1e-15)
    np.testing.assert_allclose(interior_sigma((-1, 0.75), paper), (0.5, 0.25), atol=1e-15)
    assert h23_frequency((0, 0), paper) == 0


@given(st.floats(0.01, 10))
def test_h23_frequency_homogeneous(paper, t):
    d = np.array(_curve(paper, "H_2to3").direction)
    assert h23_frequency(t * d, paper) == pytest.approx(t * h23_frequency(d, paper), rel=1e-12)


@given(st.floats(0.01, 10))
def test_h23_frequency_is_jacobian_eigenvalue(paper, t):
    g = t * np.array(_curve(paper, "H_2to3").direction)
    J = basis_jacobian(interior_sigma(g, paper), ScaledParameters(*g), paper)
    ev = np.linalg.eigvals(J)
    assert np.max(np.abs(ev.imag)) == pytest.approx(h23_frequency(g, paper), rel=1e-10)


@pytest.mark.parametrize("label", ["H_a_1to2", "H_b_1to2"])
def test_transcritical_lines_have_zero_eigenvalue(paper, label):
    c = _curve(paper, label)
    chk = on_curve_check(c, 1.3 * np.array(c.direction), paper)
    assert chk["min_abs_real"] < 1e-12


def test_inactive_curve_when_no_admissible_half():
    # P = I: the interior Jacobian diag(sigma) has trace sigma1 + sigma2 > 0
    with pytest.warns(UserWarning):
        c = example_coefficients(P=((1.0, 0.0), (0.0, 1.0)))
    assert _curve(c, "H_2to3").activity == "none"


def test_tangency_vector_conventions():
    c = example_coefficients()
    np.testing.assert_allclose(tangency_vector(c), (2, -1))
    assert np.hypot(*tangency_vector(c)) == pytest.approx(np.sqrt(5))
    g = example_coefficients(A=A_GEN, Q=Q_GEN)
    vs = {conv: tangency_vector(g, conv) for conv in ("derived", "phi", "text")}
    assert not np.allclose(vs["derived"], vs["text"])
    for conv in ("derived", "phi", "text"):
        np.testing.assert_allclose(tangency_vector(c, conv), (2, -1))
    with pytest.raises(ConfigError):
        tangency_vector(c, "nope")


def test_tangency_zero_when_b_matches():
    # B = Q P^-1 A makes the derived normal vanish
    c0 = example_coefficients(A=A_GEN)
    c = example_coefficients(A=A_GEN, B=c0.Q @ c0.p_inverse() @ A_GEN)
    np.testing.assert_allclose(tangency_vector(c), 0, atol=1e-15)


def test_droplet_worked_example(paper):
    d = droplet_sample((-1, 1), paper, 0.1)
    assert d.xi_center == pytest.approx(-1.4, abs=1e-15)
    assert d.half_width == pytest.approx(0.1 * np.sqrt(5) * np.sqrt(0.256), rel=1e-14)
    assert d.half_width == pytest.approx(0.113137, abs=1e-6)
    np.testing.assert_allclose(d.sigma_bar, (0.8, 0.2), atol=1e-15)
    lo, hi = d.xi_bounds
    assert hi - lo == pytest.approx(2 * d.half_width)


def test_droplet_pinches_on_boundary(paper):
    assert droplet_at_sigma((0.0, 0.7), paper, 0.1).half_width == 0
    assert droplet_at_sigma((0.7, 0.0), paper, 0.1).half_width == 0


def test_droplet_inadmissible(paper):
    with pytest.raises(DomainError):
        droplet_sample((1, 1), paper, 0.1)


@pytest.mark.parametrize("ell", [(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)])
@given(eps=st.floats(1e-3, 0.4), s1=st.floats(0.01, 2), s2=st.floats(0.01, 2))
def test_droplet_epsilon_doubling(ell, eps, s1, s2):
    c = example_coefficients(ell=ell)
    a = droplet_at_sigma((s1, s2), c, eps).half_width
    b = droplet_at_sigma((s1, s2), c, 2 * eps).half_width
    assert b == pytest.approx(2 ** (sum(ell) - 2) * a, rel=1e-12)


def test_xi_center_with_qtilde():
    base = example_coefficients()
    q = PolyMap.from_terms([{"powers": [1, 0], "value": [0.5, -0.25]}])
    c = ReducedCoefficients(base.P, base.Q, base.A, base.B, base.ell, qtilde=q)
    d = droplet_at_sigma((0.8, 0.2), c, 0.1)
    # -<(2,-1), sigma + eps^2 (0.4, -0.2)>
    assert d.xi_center == pytest.approx(-(1.4 + 0.01 * 1.0), rel=1e-14)


def test_circle_examples():
    assert len(equilibria_on_circle(1, (2, -1), 2)) == 2
    pts = equilibria_on_circle(1, (2, -1), np.sqrt(5))
    assert len(pts) == 1
    np.testing.assert_allclose(pts[0], (-2 / np.sqrt(5), 1 / np.sqrt(5)), atol=1e-15)
    assert equilibria_on_circle(1, (2, -1), 3) == []
    assert tangency_curvature(1, (2, -1), np.sqrt(5)) == pytest.approx(np.sqrt(5))


@given(st.floats(0.1, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-5, 5))
def test_circle_points_satisfy_both_equations(R, m1, m2, zeta):
    assume(np.hypot(m1, m2) > 0.05)
    for p in equilibria_on_circle(R, (m1, m2), zeta):
        assert np.hypot(*p) == pytest.approx(R, rel=1e-9)
        assert m1 * p[0] + m2 * p[1] + zeta == pytest.approx(0, abs=1e-9 * (1 + abs(zeta)))


def test_circle_errors():
    with pytest.raises(DomainError):
        equilibria_on_circle(1, (0, 0), 1)
    with pytest.raises(DomainError):
        tangency_curvature(1, (2, -1), 0.5)


def test_admissible_interval(paper):
    lo, hi = admissible_gamma2_interval(-1.0, paper)
    # interior admissible between H^b (gamma2 = 1/3) and H^a (gamma2 = 2)
    assert (lo, hi) == pytest.approx((1 / 3, 2), abs=1e-14)
    assert admissible_gamma2_interval(1.0, paper) is None


def test_vertical_section(paper):
    res = droplet_section("gamma1", -1.0, paper, 0.1, n=201)
    assert len(res.samples) == 201
    assert res.boundary.shape == (2 * 201 + 1, 2)
    np.testing.assert_array_equal(res.boundary[0], res.boundary[-1])
    widths = [d.half_width for d in res.samples]
    assert widths[0] == pytest.approx(0, abs=1e-12) and widths[-1] == pytest.approx(0, abs=1e-12)
    assert max(widths) > 0.1


def test_vertical_section_zero_epsilon_is_segment(paper):
    res = droplet_section("gamma1", -1.0, paper, 0.0, n=51)
    assert max(d.half_width for d in res.samples) == 0


def test_vertical_section_empty(paper):
    res = droplet_section("gamma1", 1.0, paper, 0.1, n=51)
    assert res.samples == [] and res.boundary.shape == (0, 2)


def test_horizontal_section(paper):
    res = droplet_section("xi", -0.75, paper, 0.1, n=41)
    assert len(res.upper) > 10 and len(res.lower) > 10
    for d in res.upper:
        assert d.xi_center + d.half_width == pytest.approx(-0.75, abs=1e-12)
    for d in res.lower:
        assert d.xi_center - d.half_width == pytest.approx(-0.75, abs=1e-12)


def test_section_errors(paper):
    with pytest.raises(ConfigError):
        droplet_section("gamma2", 0.0, paper, 0.1)
    with pytest.raises(ConfigError):
        droplet_section("gamma1", -1.0, paper, 0.1, n=1)


@pytest.mark.parametrize("ell", [(1, 2), (1, 3), (1, 4), (2, 3)])
def test_pinch_exponents(ell):
    res = droplet_section("gamma1", -1.0, example_coefficients(ell=ell), 0.1, n=2001)
    assert fit_pinch_exponent(res.samples, 0) == pytest.approx(ell[1] / 2, rel=0.02)
    assert fit_pinch_exponent(res.samples, 1) == pytest.approx(ell[0] / 2, rel=0.02)


def test_pinch_exponent_wide_window_example(paper):
    """sigma1 end of the 1:2 droplet over [1e-4, 1e-2]."""
    res = droplet_section("gamma1", -1.0, paper, 0.1, n=2001)
    assert fit_pinch_exponent(res.samples, 0, window=(1e-4, 1e-2)) == pytest.approx(1.0, rel=0.02)


def test_pinch_exponent_needs_samples(paper):
    res = droplet_section("gamma1", -1.0, paper, 0.1, n=5)
    with pytest.raises(DomainError):
        fit_pinch_exponent(res.samples, 0)


def test_fold_hopf_xi_section(paper):
    pts = fold_hopf_points(paper, 0.1, "xi", -0.75)
    assert len(pts) == 2
    for p in pts:
        assert p.gamma[1] == pytest.approx(-0.75 * p.gamma[0], abs=1e-14)
        assert p.gamma[0] < 0
        assert abs(p.residual) < 1e-10
    np.testing.assert_allclose(pts[0].gamma, (-0.908693, 0.681520), atol=1e-6)
    np.testing.assert_allclose(pts[1].gamma, (-1.125936, 0.844452), atol=1e-6)


def test_fold_hopf_gamma1_section(paper):
    pts = fold_hopf_points(paper, 0.1, "gamma1", -1.0)
    assert len(pts) == 2
    assert pts[0].gamma == pts[1].gamma == (-1.0, 0.75)
    assert pts[1].xi - pts[0].xi == pytest.approx(2 * pts[0].sample.half_width)
    assert fold_hopf_points(paper, 0.1, "gamma1", 1.0) == []


def test_fold_hopf_points_merge_as_epsilon_shrinks(paper):
    gaps = []
    for eps in (0.2, 0.1, 0.05, 0.025):
        a, b = fold_hopf_points(paper, eps, "xi", -0.75)
        gaps.append(np.hypot(a.gamma[0] - b.gamma[0], a.gamma[1] - b.gamma[1]))
    assert all(x > y for x, y in zip(gaps, gaps[1:]))


def test_fold_hopf_off_line(paper):
    # xi of the wrong sign: the droplet centre -<l_perp, sigma> is never positive on H_2to3
    assert fold_hopf_points(paper, 0.1, "xi", 0.75) == []


def test_refine_matches_closed_form_without_a(paper):
    r = refine_droplet((-1, 1), paper, 0.1)
    d = droplet_sample((-1, 1), paper, 0.1)
    assert r.xi_center == pytest.approx(d.xi_center, abs=1e-12)
    assert r.half_width == pytest.approx(d.half_width, rel=1e-10)


def test_refine_selects_derived_convention():
    c = example_coefficients(A=A_GEN, Q=Q_GEN)
    ratios = {}
    for eps in (0.02, 0.01):
        r = refine_droplet((-1, 1), c, eps)
        for conv in ("derived", "phi", "text"):
            ratios[conv, eps] = r.half_width / droplet_sample((-1, 1), c, eps, conv).half_width
    # the derived width is exact up to O(eps^2); the others converge to the wrong value
    err = {k: abs(v - 1) for k, v in ratios.items()}
    assert err["derived", 0.01] < 1e-5
    assert err["derived", 0.01] < 0.3 * err["derived", 0.02]
    assert err["phi", 0.01] > 0.01 and err["text", 0.01] > 0.01
    assert err["phi", 0.01] == pytest.approx(err["phi", 0.02], rel=1e-3)
