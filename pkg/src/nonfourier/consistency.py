"""Mechanized thermodynamic-consistency checks.

Each checker returns a ConsistencyVerdict carrying the smallest slack among
its inequalities, a tag for which parameter regime applied, and, for
sign-type failures of the quadratic-form checks, a witness amplitude vector
along which the entropy production goes negative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .energetics import SingularParameterError, burgers_sigma_matrix
from .models import Burgers, CoefficientFn, GKLinear, GKNonlinear
from .tensors import (
    DEFAULT_TOL,
    InvalidInputError,
    SymTensor3,
    coerce_tensor,
    is_nonsingular,
    is_pd,
    is_psd,
    psd_margin,
)

# dead-band for the exact-zero hypotheses (tau*nu = 0, mu = 0)
ZERO_BAND = 1e-12


@dataclass(frozen=True)
class ConsistencyVerdict:
    passed: bool
    margin: float
    case_tag: str = ""
    failed_condition: str = ""
    # "sign": a state with sigma < 0 exists; "structural": a formula
    # precondition is broken; "dynamic": stability, not entropy, fails
    failure_mode: str = ""
    marginal: bool = False
    witness: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.passed and self.margin < 0 and not self.marginal:
            raise InvalidInputError("pass verdict requires nonnegative margin")
        if not self.passed and not self.failed_condition:
            raise InvalidInputError("fail verdict requires a failed condition")


@dataclass(frozen=True)
class QuadFormMatrix:
    """Symmetric coefficient matrix over the amplitude blocks (q, qdot, grad).

    x' A x equals rho*theta*sigma for per-direction amplitudes x; PSD of A is
    equivalent to nonnegative entropy production on all states.
    """

    A: SymTensor3
    provenance: dict = field(default_factory=dict)

    def matrix(self) -> np.ndarray:
        return self.A.as_matrix()

    def is_psd(self, tol: float = DEFAULT_TOL) -> bool:
        return is_psd(self.A, tol)

    def margin(self) -> float:
        return psd_margin(self.A)


def _witness(a: np.ndarray) -> Optional[np.ndarray]:
    vals, vecs = np.linalg.eigh(a)
    if vals[0] < 0:
        return vecs[:, 0]
    return None


# --- proportionality and tensor-class checks ---------------------------------

def check_jeffreys(xi, kappa, tol: float = DEFAULT_TOL) -> ConsistencyVerdict:
    """Pass iff xi is positive definite and kappa = beta*xi for some beta >= 0.

    beta is the least-squares projection tr(kappa xi)/tr(xi xi); the
    proportionality test uses the projection residual, which is robust to
    zero entries.
    """
    xi = coerce_tensor(xi)
    kappa = coerce_tensor(kappa)
    if not is_pd(xi, tol):
        return ConsistencyVerdict(
            False, psd_margin(xi), failed_condition="xi not positive definite",
            failure_mode="sign",
        )
    xm, km = xi.as_matrix(), kappa.as_matrix()
    beta = float(np.sum(km * xm) / np.sum(xm * xm))
    resid = float(np.linalg.norm(km - beta * xm))
    scale = max(1.0, kappa.norm())
    if resid > tol * scale:
        return ConsistencyVerdict(
            False, -resid, failed_condition="kappa not proportional to xi",
            failure_mode="sign",
        )
    if beta < -tol:
        return ConsistencyVerdict(
            False, beta, failed_condition="proportionality factor negative",
            failure_mode="sign",
        )
    return ConsistencyVerdict(True, max(beta, 0.0), case_tag=f"beta={beta:.6g}")


def check_gn3(xi, kappa, tol: float = DEFAULT_TOL) -> ConsistencyVerdict:
    """Pass iff xi is symmetric nonsingular (any signature) and kappa PD."""
    xi = coerce_tensor(xi)
    kappa = coerce_tensor(kappa)
    if not is_nonsingular(xi, tol):
        return ConsistencyVerdict(
            False, -abs(xi.det()) - 1.0, failed_condition="xi singular",
            failure_mode="structural",
        )
    m = psd_margin(kappa)
    if not is_pd(kappa, tol):
        return ConsistencyVerdict(
            False, m, failed_condition="kappa not positive definite",
            failure_mode="sign",
        )
    return ConsistencyVerdict(True, m)


def check_quintanilla(tau: float, xi, kappa, tol: float = DEFAULT_TOL) -> ConsistencyVerdict:
    """Pass iff xi is nonsingular and kappa - tau*xi is positive semidefinite
    (strictly, in the nondegenerate reading used here: positive definite up
    to tol). Margin is the smallest eigenvalue of kappa - tau*xi."""
    if tau == 0:
        raise SingularParameterError("tau = 0: use the GN III checker")
    xi = coerce_tensor(xi)
    kappa = coerce_tensor(kappa)
    if not is_nonsingular(xi, tol):
        return ConsistencyVerdict(
            False, -1.0, failed_condition="xi singular", failure_mode="structural",
        )
    gap = kappa - tau * xi
    m = psd_margin(gap)
    if not is_psd(gap, tol):
        try:
            a = quintanilla_A_matrix(
                tau, _iso_or_none(xi), _iso_or_none(kappa), 1.0
            ).matrix() if _iso_or_none(xi) is not None and _iso_or_none(kappa) is not None else None
        except SingularParameterError:
            a = None
        w = _witness(a) if a is not None else None
        return ConsistencyVerdict(
            False, m, failed_condition="kappa - tau*xi not positive semidefinite",
            failure_mode="sign", witness=w,
        )
    return ConsistencyVerdict(True, m)


def _iso_or_none(t: SymTensor3) -> Optional[float]:
    m = t.as_matrix()
    if np.allclose(m, m[0, 0] * np.eye(3)):
        return float(m[0, 0])
    return None


# --- Burgers regimes ---------------------------------------------------------

def check_burgers(
    lambda_b: float, tau: float, mu: float, nu: float, tol: float = DEFAULT_TOL
) -> ConsistencyVerdict:
    """Thermodynamic admissibility of the two-relaxation-time law.

    One of three regimes must hold:
      i)   tau*nu = 0, mu > 0 and lambda_b < 0;
      ii)  tau*nu != 0, mu = 0 and nu > 0;
      iii) tau*nu != 0, mu > 0 and nu*tau**2 >= lambda_b*mu.
    Exact-zero hypotheses use a relative dead-band; inputs sitting inside the
    band without satisfying any regime come back tagged marginal.
    """
    if lambda_b == 0:
        raise SingularParameterError("lambda_b = 0: use the Jeffreys checker")
    scale = max(1.0, abs(tau), abs(nu), abs(mu), abs(lambda_b))
    band = ZERO_BAND * scale
    tn = tau * nu
    tn_zero = abs(tn) <= band * scale
    mu_zero = abs(mu) <= band
    near_band = (0 < abs(tn) <= 2 * band * scale) or (0 < abs(mu) <= 2 * band)

    if tn_zero:
        margin = min(mu, -lambda_b)
        if mu > tol * scale and lambda_b < -tol * scale:
            return ConsistencyVerdict(True, margin, case_tag="i", marginal=near_band)
        return ConsistencyVerdict(
            False, margin, case_tag="i",
            failed_condition="regime i needs mu > 0 and lambda_b < 0",
            failure_mode="sign", marginal=near_band,
        )
    if mu_zero:
        if nu > tol * scale:
            return ConsistencyVerdict(True, nu, case_tag="ii", marginal=near_band)
        return ConsistencyVerdict(
            False, nu, case_tag="ii", failed_condition="regime ii needs nu > 0",
            failure_mode="sign", marginal=near_band,
        )
    slack = nu * tau**2 - lambda_b * mu
    margin = min(mu, slack)
    if mu > tol * scale and slack >= -tol * scale**3:
        return ConsistencyVerdict(True, margin, case_tag="iii", marginal=near_band)
    w = None
    try:
        w = _witness(burgers_sigma_matrix(Burgers(lambda_b, tau, mu, nu), 1.0, "iii"))
    except SingularParameterError:
        pass
    return ConsistencyVerdict(
        False, margin, case_tag="iii",
        failed_condition="regime iii needs mu > 0 and nu*tau^2 >= lambda_b*mu",
        failure_mode="sign", marginal=near_band, witness=w,
    )


def check_burgers_full(
    lambda_b: float, tau: float, mu: float, nu: float, tol: float = DEFAULT_TOL
) -> ConsistencyVerdict:
    """Joint thermodynamic and dynamic admissibility: mu >= 0, nu > 0,
    lambda_b > 0, tau > 0 and nu*tau**2 >= lambda_b*mu. Margin is the
    smallest slack among the five inequalities."""
    slacks = {
        "mu >= 0": mu,
        "nu > 0": nu,
        "lambda_b > 0": lambda_b,
        "tau > 0": tau,
        "nu*tau^2 >= lambda_b*mu": nu * tau**2 - lambda_b * mu,
    }
    worst = min(slacks, key=slacks.get)
    margin = slacks[worst]
    scale = max(1.0, abs(tau), abs(nu), abs(mu), abs(lambda_b))
    if margin >= -tol * scale**3 and nu > 0 and lambda_b > 0 and tau > 0 and mu >= -tol * scale:
        return ConsistencyVerdict(True, max(margin, 0.0) if margin < 0 else margin)
    mode = "sign" if (mu < 0 or nu <= 0 or nu * tau**2 < lambda_b * mu) else "dynamic"
    return ConsistencyVerdict(
        False, margin, failed_condition=worst, failure_mode=mode,
    )


# --- weakly nonlocal model ---------------------------------------------------

def _default_theta_grid(theta_min: float = 1.0, theta_max: float = 10.0) -> np.ndarray:
    return np.geomspace(theta_min, theta_max, 32)


def check_gk(
    ell: float,
    varkappa: Callable[[float], float],
    kappa: Callable[[float], float],
    lambda2: Callable[[float], float],
    theta_samples: Optional[Sequence[float]] = None,
    tol: float = DEFAULT_TOL,
) -> ConsistencyVerdict:
    """The nonlocal coefficients must be functionally coupled:
    kappa(theta) * ell**2 * theta**2 == lambda2(theta), with varkappa > 0.

    The identity is sampled on a theta grid (default 32 log-spaced points)
    because the condition is functional, not algebraic.
    """
    thetas = np.asarray(
        theta_samples if theta_samples is not None else _default_theta_grid(), dtype=float
    )
    vk = np.array([varkappa(t) for t in thetas])
    if np.any(vk <= 0):
        return ConsistencyVerdict(
            False, float(vk.min()), failed_condition="varkappa not positive",
            failure_mode="sign",
        )
    kv = np.array([kappa(t) for t in thetas])
    lv = np.array([lambda2(t) for t in thetas])
    defect = np.abs(kv * ell**2 * thetas**2 - lv)
    scale = max(1.0, float(np.abs(lv).max()), float(np.abs(kv).max()))
    worst = float(defect.max())
    if worst > tol * scale:
        return ConsistencyVerdict(
            False, -worst, failed_condition="kappa, lambda2 not functionally coupled",
            failure_mode="structural",
        )
    return ConsistencyVerdict(True, float(vk.min()))


def check_gk_params(m: GKLinear, theta_samples: Optional[Sequence[float]] = None) -> ConsistencyVerdict:
    """Convenience wrapper: derived coefficients pass by construction
    whenever varkappa stays positive on the sample grid."""
    return check_gk(m.ell, m.varkappa, m.kappa, m.lambda2, theta_samples)


def check_gk_nonlinear(
    ell: float,
    varkappa: Callable[[float], float],
    kappa: Callable[[float], float],
    lambda2: Callable[[float], float],
    mu: Callable[[float], float],
    nu: Callable[[float], float],
    delta: float,
    theta_samples: Optional[Sequence[float]] = None,
    tol: float = DEFAULT_TOL,
) -> ConsistencyVerdict:
    """Linear coupling plus mu = 2*nu and mu = 2*delta*varkappa; the sign of
    delta is unconstrained."""
    base = check_gk(ell, varkappa, kappa, lambda2, theta_samples, tol)
    if not base.passed:
        return base
    thetas = np.asarray(
        theta_samples if theta_samples is not None else _default_theta_grid(), dtype=float
    )
    mv = np.array([mu(t) for t in thetas])
    nv = np.array([nu(t) for t in thetas])
    vk = np.array([varkappa(t) for t in thetas])
    scale = max(1.0, float(np.abs(mv).max()), float(np.abs(vk).max()))
    if float(np.abs(mv - 2.0 * nv).max()) > tol * scale:
        return ConsistencyVerdict(
            False, -float(np.abs(mv - 2.0 * nv).max()),
            failed_condition="mu != 2*nu", failure_mode="structural",
        )
    if float(np.abs(mv - 2.0 * delta * vk).max()) > tol * scale:
        return ConsistencyVerdict(
            False, -float(np.abs(mv - 2.0 * delta * vk).max()),
            failed_condition="mu != 2*delta*varkappa", failure_mode="structural",
        )
    return ConsistencyVerdict(True, base.margin)


# --- quadratic-form matrices -------------------------------------------------

def quintanilla_A_matrix(tau: float, xi: float, kappa: float, theta: float) -> QuadFormMatrix:
    """Coefficient matrix of rho*theta*sigma over (q, qdot, grad) amplitudes
    for the isotropic second-flux-rate model: a rank-one form in
    tau*qdot + kappa*grad scaled by 1/(theta*(kappa - tau*xi))."""
    if theta <= 0:
        raise InvalidInputError("theta must be positive")
    den = kappa - tau * xi
    if den == 0:
        raise SingularParameterError("kappa = tau*xi")
    c = 1.0 / (theta * den)
    a = SymTensor3(0.0, tau**2 * c, kappa**2 * c, yz=tau * kappa * c)
    return QuadFormMatrix(
        a,
        provenance={
            "A22": "tau^2/(theta*(kappa - tau*xi))",
            "A33": "kappa^2/(theta*(kappa - tau*xi))",
            "A23": "tau*kappa/(theta*(kappa - tau*xi))",
        },
    )


def burgers_A_matrix(
    lambda_b: float, tau: float, mu: float, nu: float, theta: float, case: str = "iii"
) -> QuadFormMatrix:
    """Coefficient matrix of rho*theta*sigma for the two-relaxation-time
    model, built from the case's quadratic free-energy coefficients."""
    if theta <= 0:
        raise InvalidInputError("theta must be positive")
    b = burgers_sigma_matrix(Burgers(lambda_b, tau, mu, nu), theta, case)
    return QuadFormMatrix(
        SymTensor3.from_matrix(b),
        provenance={"all": f"regime {case} free-energy coefficients"},
    )
