import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from doublehopf.errors import ConfigError, SingularCoefficientsError
from doublehopf.invariants import make_resonance
from doublehopf.model import (
    PolyMap,
    ReducedState,
    ScaledParameters,
    UnfoldingParameters,
    basis_field,
    coefficients_from_dict,
    coefficients_to_dict,
    example_coefficients,
    fibre_radius,
    fibre_rates,
    load_coefficients,
    omega_matrix,
    reduced_field,
    scale_parameters,
    state_residual,
    tau_from_state,
    unscale_parameters,
)

small = st.floats(-0.1, 0.1, allow_nan=False)


def test_scale_parameters_example():
    ell = make_resonance(1, 2)
    p = scale_parameters(UnfoldingParameters(0.02, -0.02, 0.01, 0.005), 0.1, ell)
    assert p.gamma1 == pytest.approx(2) and p.gamma2 == pytest.approx(-2)
    assert p.xi == pytest.approx(1.5)


def test_scale_zero_unfolding():
    p = scale_parameters(UnfoldingParameters(0, 0, 0, 0), 0.3, make_resonance(2, 3))
    assert (p.gamma1, p.gamma2, p.xi) == (0, 0, 0)


def test_scale_requires_positive_epsilon():
    with pytest.raises(ZeroDivisionError):
        scale_parameters(UnfoldingParameters(0, 0, 0, 0), 0.0, make_resonance(1, 2))


@given(small, small, small, small, st.sampled_from([0.5, 0.25, 0.125, 0.1, 0.01]))
def test_scale_round_trip(b1, b2, d1, d2, eps):
    u = UnfoldingParameters(b1, b2, d1, d2)
    v = unscale_parameters(scale_parameters(u, eps, make_resonance(1, 3)))
    np.testing.assert_allclose([v.beta1, v.beta2, v.delta1, v.delta2], [b1, b2, d1, d2], rtol=1e-14, atol=1e-300)


def test_scale_round_trip_exact_for_dyadic_epsilon():
    u = UnfoldingParameters(0.02, -0.03, 0.01, 0.005)
    assert unscale_parameters(scale_parameters(u, 0.5, make_resonance(1, 2))) == u


def test_unscale_needs_eta():
    with pytest.raises(ConfigError):
        unscale_parameters(ScaledParameters(1, 1, 0, 0.1))


def test_negative_epsilon_rejected():
    with pytest.raises(ConfigError):
        ScaledParameters(0, 0, 0, -0.1)


def _sorted_eigs(M):
    ev = np.linalg.eigvals(M)
    return sorted(ev, key=lambda z: (round(z.real, 12), z.imag))


def test_omega_matrix_examples():
    M = omega_matrix(UnfoldingParameters(0, 0, 0, 0))
    np.testing.assert_allclose(_sorted_eigs(M), [-2j, -1j, 1j, 2j], atol=1e-14)
    M = omega_matrix(UnfoldingParameters(0.1, -0.2, 0, 0))
    np.testing.assert_allclose(_sorted_eigs(M), [-0.2 - 2j, -0.2 + 2j, 0.1 - 1j, 0.1 + 1j], atol=1e-14)


@given(small, small, small, small)
def test_omega_trace(b1, b2, d1, d2):
    assert np.trace(omega_matrix(UnfoldingParameters(b1, b2, d1, d2))) == pytest.approx(2 * (b1 + b2), abs=1e-15)


def test_basis_field_examples(paper):
    assert basis_field((0, 0), ScaledParameters(1, 1), paper).tolist() == [0, 0]
    np.testing.assert_allclose(basis_field((1, 1), ScaledParameters(1, 1), paper), (9, -2), rtol=1e-15)
    np.testing.assert_allclose(basis_field((0.8, 0.2), ScaledParameters(-1, 1), paper), (0, 0), atol=1e-15)


def test_reduced_field_full_equilibrium(paper):
    s = ReducedState.on_variety(0.8, 0.2, 0.7, paper.ell)
    ds, dpsi = reduced_field(s, ScaledParameters(-1, 1, -1.4, 0.0), paper)
    np.testing.assert_allclose(ds, 0, atol=1e-15)
    np.testing.assert_allclose(dpsi, 0, atol=1e-15)
    sr, w = fibre_rates(s, ScaledParameters(-1, 1, -1.4, 0.0), paper)
    assert abs(sr) < 1e-15 and abs(w) < 1e-15


@given(st.floats(0, 2), st.floats(0, 2), st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_epsilon_zero_reduces_to_basis(s1, s2, th, g1, g2, xi):
    c = example_coefficients(A=np.array([[0.3, -0.1], [0.2, 0.4]]))
    st_ = ReducedState.on_variety(s1, s2, th, c.ell)
    p = ScaledParameters(g1, g2, xi, 0.0)
    ds, dpsi = reduced_field(st_, p, c)
    np.testing.assert_allclose(ds, basis_field((s1, s2), p, c), rtol=1e-13, atol=1e-13)
    v = p.gamma + c.P @ st_.sigma
    s = c.ell.star @ v
    w = xi + c.ell.perp @ (c.Q @ st_.sigma)
    np.testing.assert_allclose(dpsi, [s * st_.psi1 - w * st_.psi2, w * st_.psi1 + s * st_.psi2], rtol=1e-12, atol=1e-12)


@given(st.floats(0.01, 2), st.floats(0.01, 2), st.floats(-3, 3), st.floats(0, 0.3))
def test_field_is_tangent_to_variety(s1, s2, th, eps):
    """d/dt of the syzygy vanishes on the variety."""
    c = example_coefficients(ell=(2, 3), A=np.array([[0.3, -0.1], [0.2, 0.4]]), Q=np.array([[1, 0.5], [0, 1.0]]))
    y = ReducedState.on_variety(s1, s2, th, c.ell)
    ds, dpsi = reduced_field(y, ScaledParameters(-0.5, 0.3, 0.7, eps), c)
    l1, l2 = c.ell.ell1, c.ell.ell2
    grad = np.array(
        [l2 * s1 ** (l2 - 1) * s2**l1, l1 * s1**l2 * s2 ** (l1 - 1), -2 * c.ell.g_ell * y.psi1, -2 * c.ell.g_ell * y.psi2]
    )
    rate = grad @ np.concatenate([ds, dpsi])
    assert abs(rate) <= 1e-10 * (1 + np.abs(grad).max() * np.abs(np.concatenate([ds, dpsi])).max())


def test_on_variety_and_residual():
    ell = make_resonance(1, 2)
    s = ReducedState.on_variety(1.0, 1.0, 0.0, ell)
    assert s.psi1 == pytest.approx(np.sqrt(2)) and s.psi2 == 0
    assert abs(state_residual(s, ell)) < 1e-15
    assert fibre_radius(0.0, 3.0, ell) == 0.0
    arr = s.as_array()
    assert ReducedState.from_array(arr) == s


def test_tau_from_state_undoes_blowup():
    ell = make_resonance(1, 3)
    s = ReducedState(0.5, 2.0, 1.0, -1.0)
    np.testing.assert_allclose(tau_from_state(s, 0.1, ell), [0.005, 0.02, 1e-4, -1e-4], rtol=1e-12)


def test_polymap():
    pm = PolyMap.from_terms([{"powers": [1, 0], "value": [1.0, 2.0]}, {"powers": [1, 1], "value": [0.5, 0.0]}])
    np.testing.assert_allclose(pm(2.0, 3.0), [2 + 3, 4])
    assert pm.vanishes_at_origin()
    assert not PolyMap.from_terms([{"powers": [0, 0], "value": [1.0, 0.0]}]).vanishes_at_origin()
    assert PolyMap.from_terms(pm.to_terms()).to_terms() == pm.to_terms()


def test_example_coefficients_defaults(paper, paper_p):
    np.testing.assert_array_equal(paper.P, paper_p)
    np.testing.assert_array_equal(paper.Q, np.eye(2))
    np.testing.assert_array_equal(paper.A, np.zeros((2, 2)))
    np.testing.assert_array_equal(paper.B, np.eye(2))
    assert paper.det_p() == pytest.approx(2.5)
    np.testing.assert_allclose(paper.p_inverse(), np.array([[-1, -3], [1, 0.5]]) / 2.5, rtol=1e-15)


def test_singular_p():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        c = example_coefficients(P=((1, 2), (2, 4)))
    with pytest.raises(SingularCoefficientsError):
        c.p_inverse()
    with pytest.raises(ZeroDivisionError):
        c.p_inverse()


def test_genericity_warning():
    with pytest.warns(UserWarning):
        example_coefficients(P=((-0.5, 3), (-1, -1)))


def test_json_round_trip(tmp_path, paper):
    doc = coefficients_to_dict(paper)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    back = load_coefficients(path)
    assert coefficients_to_dict(back) == doc


@pytest.mark.parametrize(
    "doc",
    [
        {"P": [[1, 0], [0, 1]]},
        {"ell": [1, 2], "P": [[1, 0]]},
        {"ell": [1, 2], "P": [[1, 0], [0, "x"]]},
        {"ell": [1, 1], "P": [[1, 0], [0, 1]]},
        {"ell": [1, 2], "P": [[1, 0], [0, 1]], "ptilde": [{"powers": [0, 0], "value": [1, 0]}]},
        {"ell": [1, 2], "P": [[1, 0], [0, 1]], "driving": {"omega": [1], "a0": [1, 2]}},
    ],
)
def test_bad_documents(doc):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ConfigError):
            coefficients_from_dict(doc)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_coefficients(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_coefficients(bad)
