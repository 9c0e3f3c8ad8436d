import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonfourier.modal import (
    InvalidKindError,
    RepeatedRootError,
    SpectralProblem,
    characteristic_poly,
    classify_mode,
    cubic_discriminant,
    laplacian_eigenvalues,
    mgt_discriminant,
    modal_solution,
    mode_report,
    mode_reports,
    routh_hurwitz,
    routh_hurwitz_cubic,
    routh_hurwitz_quadratic,
)
from nonfourier.models import (
    MCV,
    GN2,
    GN3,
    Burgers,
    Fourier,
    Jeffreys,
    Quintanilla,
)
from nonfourier.tensors import InvalidInputError, Poly, RootSet, solve_poly


def test_dirichlet_spectrum_on_pi_interval():
    p = SpectralProblem(bc="dirichlet", L=np.pi, n_max=3)
    np.testing.assert_allclose(laplacian_eigenvalues(p), [1.0, 4.0, 9.0])


def test_neumann_spectrum_starts_at_zero():
    p = SpectralProblem(bc="neumann", L=np.pi, n_max=3)
    np.testing.assert_allclose(laplacian_eigenvalues(p), [0.0, 1.0, 4.0])


def test_spectral_problem_validation():
    with pytest.raises(InvalidInputError):
        SpectralProblem(bc="periodic", L=1.0, n_max=3)
    with pytest.raises(InvalidInputError):
        SpectralProblem(bc="dirichlet", L=-1.0, n_max=3)


def test_characteristic_polynomials():
    assert characteristic_poly(Fourier(kappa=2.0), 3.0).coeffs == (1.0, 6.0)
    assert characteristic_poly(MCV(tau=2.0, kappa=3.0), 1.0).coeffs == (2.0, 1.0, 3.0)
    assert characteristic_poly(
        Jeffreys(tau=2.0, xi=3.0, kappa=1.0), 1.0
    ).coeffs == (2.0, 3.0, 3.0)
    assert characteristic_poly(GN3(xi=2.0, kappa=3.0), 1.0).coeffs == (1.0, 3.0, 2.0)
    assert characteristic_poly(
        Quintanilla(tau=1.0, xi=1.0, kappa=2.0), 1.0
    ).coeffs == (1.0, 1.0, 2.0, 1.0)
    assert characteristic_poly(
        Burgers(lambda_b=1.0, tau=2.0, mu=7.0, nu=3.0), 1.0
    ).coeffs == (1.0, 2.0, 7.0, 7.0)


def test_characteristic_poly_rejects_unknown_and_negative():
    with pytest.raises(InvalidKindError):
        characteristic_poly(GN2(K=1.0), 1.0)
    with pytest.raises(InvalidInputError):
        characteristic_poly(Fourier(kappa=1.0), -1.0)


def test_routh_hurwitz_examples():
    assert routh_hurwitz_quadratic(1.0, 2.0, 3.0)
    assert not routh_hurwitz_quadratic(1.0, -2.0, 3.0)
    assert routh_hurwitz_quadratic(-1.0, -2.0, -3.0)
    assert routh_hurwitz_cubic(1.0, 2.0, 3.0, 4.0)  # 2*3 > 4*1
    assert not routh_hurwitz_cubic(1.0, 1.0, 1.0, 2.0)  # bridge fails
    assert not routh_hurwitz_cubic(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        routh_hurwitz_quadratic(0.0, 1.0, 1.0)


def test_routh_hurwitz_degree_one():
    assert routh_hurwitz(Poly((1.0, 2.0)))
    assert not routh_hurwitz(Poly((1.0, -2.0)))


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_routh_hurwitz_agrees_with_roots(seed, degree):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-2.0, 2.0, degree + 1)
    if abs(coeffs[0]) < 1e-3:
        coeffs[0] = 1.0
    p = Poly(tuple(coeffs))
    roots = solve_poly(p).roots
    max_re = max(w.real for w in roots)
    if abs(max_re) < 1e-6:
        return  # too close to the imaginary axis to call either way
    assert routh_hurwitz(p) == (max_re < 0)


def test_cubic_discriminant_sign_examples():
    # (w+1)(w+2)(w+3): three distinct real roots, positive discriminant
    assert cubic_discriminant(1.0, 6.0, 11.0, 6.0) > 0
    # w^3 + w + 1: one real root, negative discriminant
    assert cubic_discriminant(1.0, 0.0, 1.0, 1.0) < 0
    # (w+1)^2 (w+2): repeated root, zero discriminant
    assert cubic_discriminant(1.0, 4.0, 5.0, 2.0) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cubic_discriminant_equals_root_product(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-2.0, 2.0, 4)
    if abs(a[0]) < 1e-2:
        a[0] = 1.0
    w = np.roots(a)
    prod = a[0] ** 4 * np.prod(
        [(w[i] - w[j]) ** 2 for i in range(3) for j in range(i + 1, 3)]
    )
    disc = cubic_discriminant(*a)
    assert disc == pytest.approx(float(np.real(prod)), rel=1e-6, abs=1e-9)


def test_mgt_discriminant_matches_standard_form():
    for tau, kappa, xi, lt in [(1.0, 1.0, 1.0, 1.0), (0.5, 2.0, 0.7, 3.0), (2.0, 0.3, 1.5, 9.0)]:
        std = cubic_discriminant(tau, 1.0, lt * kappa, lt * xi)
        assert mgt_discriminant(tau, kappa, xi, lt) == pytest.approx(std, rel=1e-12)


def test_mgt_unit_parameters_always_oscillate():
    """tau = kappa = xi = 1 gives a negative discriminant (one real root plus
    a conjugate pair) at every positive eigenvalue."""
    for lt in np.geomspace(1e-3, 1e3, 50):
        assert mgt_discriminant(1.0, 1.0, 1.0, lt) < 0
    assert mgt_discriminant(1.0, 1.0, 1.0, 1.0) == pytest.approx(-16.0)


def test_classify_mode_examples():
    mk = lambda rs: RootSet(tuple(rs))
    assert classify_mode(mk([-1.0 + 0j, -2.0 + 0j])) == "decaying"
    assert classify_mode(mk([-1.0 + 2j, -1.0 - 2j])) == "oscillatory_decaying"
    assert classify_mode(mk([2j, -2j])) == "neutral_oscillation"
    assert classify_mode(mk([1.0 + 0j, -1.0 + 0j])) == "unstable"
    assert classify_mode(mk([0j, -1.0 + 0j])) == "mixed"


def test_modal_solution_pure_decay():
    T = modal_solution(RootSet((-1.0 + 0j,)), [2.0])
    t = np.linspace(0.0, 3.0, 7)
    np.testing.assert_allclose(T(t), 2.0 * np.exp(-t), rtol=1e-12)


def test_modal_solution_cosine():
    # w = +-i with T(0) = 1, T'(0) = 0 gives cos t
    T = modal_solution(RootSet((1j, -1j)), [1.0, 0.0])
    t = np.linspace(0.0, 6.0, 13)
    np.testing.assert_allclose(T(t), np.cos(t), atol=1e-12)


def test_modal_solution_rejects_repeated_roots():
    with pytest.raises(RepeatedRootError):
        modal_solution(RootSet((-1.0 + 0j, -1.0 + 1e-12j)), [1.0, 0.0])
    with pytest.raises(InvalidInputError):
        modal_solution(RootSet((-1.0 + 0j, -2.0 + 0j)), [1.0])


def test_mode_report_mgt_first_mode():
    r = mode_report(Quintanilla(tau=1.0, xi=1.0, kappa=2.0), 1, 1.0, 1.0)
    assert r.poly.coeffs == (1.0, 1.0, 2.0, 1.0)
    assert r.rh_pass
    assert r.classification == "oscillatory_decaying"
    assert r.discriminant == pytest.approx(-23.0)
    reals = r.roots.real_roots(1e-9)
    assert len(reals) == 1 and reals[0] == pytest.approx(-0.56984, abs=1e-4)


def test_mode_reports_cover_whole_spectrum():
    p = SpectralProblem(bc="dirichlet", L=np.pi, n_max=5, rho_c=2.0)
    reports = mode_reports(p, MCV(tau=1.0, kappa=1.0))
    assert [r.n for r in reports] == [1, 2, 3, 4, 5]
    assert reports[2].Lambda_tilde == pytest.approx(9.0 / 2.0)
    assert all(r.rh_pass for r in reports)


def test_rh_dichotomy_for_mgt_family():
    """kappa > tau*xi stabilizes every mode; kappa < tau*xi destabilizes all
    of them (the bridge inequality is eigenvalue-independent here)."""
    stable = Quintanilla(tau=1.0, xi=1.0, kappa=2.0)
    unstable = Quintanilla(tau=1.0, xi=1.0, kappa=0.5)
    p = SpectralProblem(bc="dirichlet", L=np.pi, n_max=20)
    assert all(r.rh_pass for r in mode_reports(p, stable))
    assert not any(r.rh_pass for r in mode_reports(p, unstable))


def test_full_burgers_admissibility_implies_modal_stability():
    """Parameters passing the joint thermodynamic and dynamic check give
    Routh-Hurwitz stability at every eigenvalue."""
    from nonfourier.consistency import check_burgers_full

    rng = np.random.default_rng(0)
    p = SpectralProblem(bc="dirichlet", L=np.pi, n_max=30)
    found = 0
    while found < 20:
        lam, tau, mu, nu = rng.uniform(0.05, 3.0, 4)
        if not check_burgers_full(lam, tau, mu, nu).passed:
            continue
        found += 1
        m = Burgers(lambda_b=lam, tau=tau, mu=mu, nu=nu)
        assert all(r.rh_pass for r in mode_reports(p, m))
