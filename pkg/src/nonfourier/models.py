"""Parameter sets and constitutive rate laws for the heat-conduction models.

Every rate law is stored solved for its highest time derivative; degenerate
parameter values (tau = 0 in a law dividing by tau) are reached through
``reduce_limit`` instead of division by zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .tensors import InvalidInputError, SymTensor3, coerce_tensor, is_nonsingular

TensorLike = Union[float, SymTensor3]


class ContractError(ValueError):
    """A required state field is missing for the requested operation."""


class DegenerateModelError(ValueError):
    """The rate law divides by a vanishing parameter; use reduce_limit."""


class InvalidLimitError(ValueError):
    """The requested reduction is not defined for this model kind."""


# --- temperature-dependent coefficient functions -----------------------------

@dataclass(frozen=True)
class CoefficientFn:
    """Named scalar function of temperature: c * theta**p."""

    c: float
    p: float = 0.0

    def __call__(self, theta: float) -> float:
        return self.c * theta**self.p

    @classmethod
    def constant(cls, c: float) -> "CoefficientFn":
        return cls(c, 0.0)

    @classmethod
    def power(cls, c: float, p: float) -> "CoefficientFn":
        return cls(c, p)


# --- parameter sets ----------------------------------------------------------

@dataclass(frozen=True)
class Fourier:
    kappa: SymTensor3

    def __init__(self, kappa: TensorLike):
        object.__setattr__(self, "kappa", coerce_tensor(kappa))


@dataclass(frozen=True)
class GN2:
    """Rate law q_dot = -K grad(theta); no entropy production."""

    K: SymTensor3

    def __init__(self, K):
        object.__setattr__(self, "K", coerce_tensor(K))


@dataclass(frozen=True)
class MCV:
    tau: float
    kappa: SymTensor3

    def __init__(self, tau: float, kappa: TensorLike):
        object.__setattr__(self, "tau", float(tau))
        object.__setattr__(self, "kappa", coerce_tensor(kappa))


@dataclass(frozen=True)
class Jeffreys:
    tau: float
    xi: SymTensor3
    kappa: SymTensor3

    def __init__(self, tau: float, xi: TensorLike, kappa: TensorLike):
        object.__setattr__(self, "tau", float(tau))
        object.__setattr__(self, "xi", coerce_tensor(xi))
        object.__setattr__(self, "kappa", coerce_tensor(kappa))


@dataclass(frozen=True)
class GN3:
    xi: SymTensor3
    kappa: SymTensor3

    def __init__(self, xi: TensorLike, kappa: TensorLike):
        object.__setattr__(self, "xi", coerce_tensor(xi))
        object.__setattr__(self, "kappa", coerce_tensor(kappa))


@dataclass(frozen=True)
class Quintanilla:
    tau: float
    xi: SymTensor3
    kappa: SymTensor3

    def __init__(self, tau: float, xi: TensorLike, kappa: TensorLike):
        object.__setattr__(self, "tau", float(tau))
        object.__setattr__(self, "xi", coerce_tensor(xi))
        object.__setattr__(self, "kappa", coerce_tensor(kappa))


@dataclass(frozen=True)
class Burgers:
    """Isotropic two-relaxation-time conductor; lambda_b carries units s^2."""

    lambda_b: float
    tau: float
    mu: float
    nu: float


@dataclass(frozen=True)
class GKLinear:
    """Weakly nonlocal conductor; kappa and lambda2 are derived, never stored.

    kappa(theta) = varkappa(theta) / theta**2 and
    lambda2(theta) = ell**2 * varkappa(theta), which builds in the functional
    coupling of the temperature-dependent coefficients.
    """

    tau: float
    ell: float
    varkappa: CoefficientFn

    def kappa(self, theta: float) -> float:
        return self.varkappa(theta) / theta**2

    def lambda2(self, theta: float) -> float:
        return self.ell**2 * self.varkappa(theta)


@dataclass(frozen=True)
class GKNonlinear(GKLinear):
    delta: float = 0.0

    def mu(self, theta: float) -> float:
        return 2.0 * self.delta * self.varkappa(theta)

    def nu(self, theta: float) -> float:
        return self.delta * self.varkappa(theta)


ModelParams = Union[Fourier, GN2, MCV, Jeffreys, GN3, Quintanilla, Burgers, GKLinear, GKNonlinear]


@dataclass(frozen=True)
class MaterialConstants:
    rho: float
    cv: float

    def __post_init__(self):
        if self.rho <= 0 or self.cv <= 0:
            raise InvalidInputError("density and specific heat must be positive")

    @property
    def rho_cv(self) -> float:
        return self.rho * self.cv


def _vec(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise InvalidInputError(f"expected 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class ThermalState:
    """Pointwise state feeding energetics and rate laws.

    q, gradients and rates are 3-vectors; grad_q is the 3x3 array with
    (grad_q)[i, j] = d q_j / d x_i. nonlocal_q holds the combination
    lap(q) + 2 grad(div q) needed by the nonlocal laws.
    """

    theta: float
    q: np.ndarray = field(default_factory=lambda: np.zeros(3))
    grad_theta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    qdot: Optional[np.ndarray] = None
    grad_q: Optional[np.ndarray] = None
    grad_theta_dot: Optional[np.ndarray] = None
    qddot: Optional[np.ndarray] = None
    nonlocal_q: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (self.theta > 0 and np.isfinite(self.theta)):
            raise InvalidInputError("absolute temperature must be positive and finite")
        object.__setattr__(self, "q", _vec(self.q))
        object.__setattr__(self, "grad_theta", _vec(self.grad_theta))
        for name in ("qdot", "grad_theta_dot", "qddot", "nonlocal_q"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _vec(v))
        if self.grad_q is not None:
            g = np.asarray(self.grad_q, dtype=float)
            if g.shape != (3, 3):
                raise InvalidInputError("grad_q must be 3x3")
            object.__setattr__(self, "grad_q", g)

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ContractError(f"state field {name!r} required by this model")


# --- rate laws ---------------------------------------------------------------

def flux_rate(m: ModelParams, s: ThermalState) -> np.ndarray:
    """Highest time derivative of q solved explicitly from the rate law.

    Fourier returns q itself, first-order laws return q_dot, the
    second-order laws return q_ddot given (q, q_dot, grad_theta,
    grad_theta_dot).
    """
    if isinstance(m, Fourier):
        return -m.kappa.apply(s.grad_theta)
    if isinstance(m, GN2):
        return -m.K.apply(s.grad_theta)
    if isinstance(m, MCV):
        if m.tau == 0:
            raise DegenerateModelError("tau = 0: reduce to the Fourier model")
        return -(m.kappa.apply(s.grad_theta) + s.q) / m.tau
    if isinstance(m, Jeffreys):
        if m.tau == 0:
            raise DegenerateModelError("tau = 0: reduce to the Fourier model")
        s.require("grad_theta_dot")
        return -(
            s.q + m.xi.apply(s.grad_theta) + m.tau * m.kappa.apply(s.grad_theta_dot)
        ) / m.tau
    if isinstance(m, GN3):
        s.require("grad_theta_dot")
        return -(m.xi.apply(s.grad_theta) + m.kappa.apply(s.grad_theta_dot))
    if isinstance(m, Quintanilla):
        if m.tau == 0:
            raise DegenerateModelError("tau = 0: reduce to the GN III model")
        s.require("qdot", "grad_theta_dot")
        return -(
            s.qdot + m.xi.apply(s.grad_theta) + m.kappa.apply(s.grad_theta_dot)
        ) / m.tau
    if isinstance(m, Burgers):
        if m.lambda_b == 0:
            raise DegenerateModelError("lambda_b = 0: reduce to the Jeffreys model")
        s.require("qdot", "grad_theta_dot")
        return -(
            s.q
            + m.tau * s.qdot
            + m.mu * s.grad_theta
            + m.tau * m.nu * s.grad_theta_dot
        ) / m.lambda_b
    if isinstance(m, GKNonlinear):
        if m.tau == 0:
            raise DegenerateModelError("tau = 0: algebraic nonlocal law, no rate")
        s.require("grad_q", "nonlocal_q")
        th = s.theta
        nl = (
            m.lambda2(th) * s.nonlocal_q
            + m.mu(th) * (s.grad_q @ s.q)
            + m.nu(th) * np.trace(s.grad_q) * s.q
        )
        return (-s.q - m.kappa(th) * s.grad_theta + nl) / m.tau
    if isinstance(m, GKLinear):
        if m.tau == 0:
            raise DegenerateModelError("tau = 0: algebraic nonlocal law, no rate")
        s.require("nonlocal_q")
        th = s.theta
        return (
            -s.q - m.kappa(th) * s.grad_theta + m.lambda2(th) * s.nonlocal_q
        ) / m.tau
    raise InvalidInputError(f"unknown model kind {type(m).__name__}")


def gn2_rate(K: TensorLike, grad_theta) -> np.ndarray:
    return -coerce_tensor(K).apply(grad_theta)


def gn2_consistent(K, symmetric: bool = True, constant: bool = True) -> bool:
    """The law q_dot = -K grad(theta) is dissipation-free only for constant,
    symmetric, nonsingular K."""
    if not symmetric or not constant:
        return False
    try:
        t = coerce_tensor(K)
    except InvalidInputError:
        return False
    return is_nonsingular(t)


# --- limit reductions --------------------------------------------------------

def _iso_scalar(t: SymTensor3) -> float:
    m = t.as_matrix()
    if not np.allclose(m, m[0, 0] * np.eye(3)):
        raise InvalidLimitError("limit reduction defined for isotropic tensors only")
    return float(m[0, 0])


def reduce_limit(m: ModelParams, target: str, theta_ref: float = 1.0) -> ModelParams:
    """Degenerate-parameter reduction to a simpler model kind.

    Supported: Burgers -> jeffreys (lambda_b -> 0), Jeffreys -> mcv
    (kappa -> 0), MCV -> fourier (tau -> 0), Quintanilla -> gn3
    (tau -> 0), GK -> mcv (ell -> 0, coefficients frozen at theta_ref).
    """
    target = target.lower()
    if isinstance(m, Burgers) and target == "jeffreys":
        return Jeffreys(tau=m.tau, xi=m.mu, kappa=m.nu)
    if isinstance(m, Jeffreys) and target == "mcv":
        return MCV(tau=m.tau, kappa=m.xi)
    if isinstance(m, MCV) and target == "fourier":
        return Fourier(kappa=m.kappa)
    if isinstance(m, Quintanilla) and target == "gn3":
        return GN3(xi=m.xi, kappa=m.kappa)
    if isinstance(m, GKLinear) and target == "mcv":
        return MCV(tau=m.tau, kappa=m.kappa(theta_ref))
    raise InvalidLimitError(f"no {target!r} limit for {type(m).__name__}")


def burgers_from_mixture(tau1: float, tau2: float, k1: float, k2: float) -> Burgers:
    """Combine two relaxing conductors into one second-order law."""
    if tau1 <= 0 or tau2 <= 0:
        raise InvalidInputError("both relaxation times must be positive")
    tau = tau1 + tau2
    return Burgers(
        lambda_b=tau1 * tau2,
        tau=tau,
        mu=k1 + k2,
        nu=(tau1 * k2 + tau2 * k1) / tau,
    )
