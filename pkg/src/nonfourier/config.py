"""Flat key=value configuration files with dotted sections.

Example::

    # two-relaxation-time conductor
    model.kind = burgers
    model.lambda_b = 1.0
    model.tau = 2.0
    model.mu = 1.0
    model.nu = 1.0
    grid.L = 3.14159
    grid.N = 100
    time.dt = 1e-3
    time.t_end = 1.0

Tensor-valued keys accept a plain scalar (isotropic), ``diag:a,b,c`` or
``full:xx,yy,zz,yz,xz,xy``. Temperature-dependent coefficients are written
``constant:c`` or ``power:c,p`` (meaning c * theta**p).
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from .modal import SpectralProblem
from .models import (
    MCV,
    GN2,
    GN3,
    Burgers,
    CoefficientFn,
    Fourier,
    GKLinear,
    GKNonlinear,
    Jeffreys,
    MaterialConstants,
    ModelParams,
    Quintanilla,
)
from .pde1d import GKSimConfig, Grid1D, SimConfig
from .tensors import SymTensor3


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key."""


def parse_config(path: Union[str, Path]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _get(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> str:
    if key in cfg:
        return cfg[key]
    if default is not None:
        return default
    raise ConfigError(f"missing required key {key!r}")


def _float(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> float:
    raw = _get(cfg, key, default)
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"key {key!r}: not a number: {raw!r}") from e


def _int(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> int:
    raw = _get(cfg, key, default)
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"key {key!r}: not an integer: {raw!r}") from e


def parse_tensor(raw: str, key: str = "") -> SymTensor3:
    raw = raw.strip()
    try:
        if raw.startswith("diag:"):
            a, b, c = (float(v) for v in raw[5:].split(","))
            return SymTensor3.diag(a, b, c)
        if raw.startswith("full:"):
            comps = [float(v) for v in raw[5:].split(",")]
            if len(comps) != 6:
                raise ValueError("need 6 components xx,yy,zz,yz,xz,xy")
            return SymTensor3(*comps)
        return SymTensor3.isotropic(float(raw))
    except ValueError as e:
        raise ConfigError(f"key {key!r}: bad tensor value {raw!r} ({e})") from e


def parse_coefficient(raw: str, key: str = "") -> CoefficientFn:
    raw = raw.strip()
    try:
        if raw.startswith("constant:"):
            return CoefficientFn.constant(float(raw[9:]))
        if raw.startswith("power:"):
            c, p = (float(v) for v in raw[6:].split(","))
            return CoefficientFn.power(c, p)
        return CoefficientFn.constant(float(raw))
    except ValueError as e:
        raise ConfigError(f"key {key!r}: bad coefficient {raw!r} ({e})") from e


def _tensor(cfg: Dict[str, str], key: str, default: Optional[str] = None) -> SymTensor3:
    return parse_tensor(_get(cfg, key, default), key)


MODEL_KINDS = (
    "fourier",
    "gn2",
    "mcv",
    "jeffreys",
    "gn3",
    "quintanilla",
    "burgers",
    "gk",
    "gk_nonlinear",
)


def build_model(cfg: Dict[str, str]) -> ModelParams:
    kind = _get(cfg, "model.kind").lower()
    if kind == "fourier":
        return Fourier(kappa=_tensor(cfg, "model.kappa"))
    if kind == "gn2":
        return GN2(K=_tensor(cfg, "model.K"))
    if kind == "mcv":
        return MCV(tau=_float(cfg, "model.tau"), kappa=_tensor(cfg, "model.kappa"))
    if kind == "jeffreys":
        return Jeffreys(
            tau=_float(cfg, "model.tau"),
            xi=_tensor(cfg, "model.xi"),
            kappa=_tensor(cfg, "model.kappa"),
        )
    if kind == "gn3":
        return GN3(xi=_tensor(cfg, "model.xi"), kappa=_tensor(cfg, "model.kappa"))
    if kind == "quintanilla":
        return Quintanilla(
            tau=_float(cfg, "model.tau"),
            xi=_tensor(cfg, "model.xi"),
            kappa=_tensor(cfg, "model.kappa"),
        )
    if kind == "burgers":
        return Burgers(
            lambda_b=_float(cfg, "model.lambda_b"),
            tau=_float(cfg, "model.tau"),
            mu=_float(cfg, "model.mu"),
            nu=_float(cfg, "model.nu"),
        )
    if kind == "gk":
        return GKLinear(
            tau=_float(cfg, "model.tau"),
            ell=_float(cfg, "model.ell"),
            varkappa=parse_coefficient(_get(cfg, "model.varkappa"), "model.varkappa"),
        )
    if kind == "gk_nonlinear":
        return GKNonlinear(
            tau=_float(cfg, "model.tau"),
            ell=_float(cfg, "model.ell"),
            varkappa=parse_coefficient(_get(cfg, "model.varkappa"), "model.varkappa"),
            delta=_float(cfg, "model.delta", "0.0"),
        )
    raise ConfigError(f"key 'model.kind': unknown kind {kind!r} (one of {MODEL_KINDS})")


def build_material(cfg: Dict[str, str]) -> MaterialConstants:
    return MaterialConstants(
        rho=_float(cfg, "material.rho", "1.0"), cv=_float(cfg, "material.cv", "1.0")
    )


def build_grid(cfg: Dict[str, str]) -> Grid1D:
    return Grid1D(L=_float(cfg, "grid.L"), N=_int(cfg, "grid.N"))


def build_spectral(cfg: Dict[str, str]) -> SpectralProblem:
    material = build_material(cfg)
    return SpectralProblem(
        bc=_get(cfg, "spectral.bc", "dirichlet").lower(),
        L=_float(cfg, "spectral.L", str(np.pi)),
        n_max=_int(cfg, "spectral.n_max", "10"),
        rho_c=material.rho_cv,
    )


def _initial_field(cfg: Dict[str, str], grid: Grid1D):
    kind = _get(cfg, "ic.kind", "zero").lower()
    if kind == "zero":
        return None
    if kind == "constant":
        return _float(cfg, "ic.amplitude", "0.0")
    if kind == "sine":
        mode = _int(cfg, "ic.mode", "1")
        amp = _float(cfg, "ic.amplitude", "1.0")
        return lambda x: amp * np.sin(mode * np.pi * x / grid.L)
    if kind == "cosine":
        mode = _int(cfg, "ic.mode", "1")
        amp = _float(cfg, "ic.amplitude", "1.0")
        return lambda x: amp * np.cos(mode * np.pi * x / grid.L)
    raise ConfigError(f"key 'ic.kind': unknown initial condition {kind!r}")


def build_sim_config(cfg: Dict[str, str]) -> SimConfig:
    grid = build_grid(cfg)
    return SimConfig(
        model=build_model(cfg),
        material=build_material(cfg),
        grid=grid,
        dt=_float(cfg, "time.dt"),
        t_end=_float(cfg, "time.t_end"),
        bc_kind=_get(cfg, "bc.kind", "dirichlet").lower(),
        bc_value=_float(cfg, "bc.value", "0.0"),
        theta0=_initial_field(cfg, grid),
        theta_ref=_float(cfg, "sim.theta_ref", "300.0"),
        snapshot_every=(
            _int(cfg, "time.snapshot_every") if "time.snapshot_every" in cfg else None
        ),
    )


def build_gk_sim_config(cfg: Dict[str, str]) -> GKSimConfig:
    model = build_model(cfg)
    if not isinstance(model, GKLinear):
        raise ConfigError("key 'model.kind': coupled solver needs a gk model")
    grid = build_grid(cfg)
    theta_ref = _float(cfg, "sim.theta_ref", "1.0")
    material = build_material(cfg)
    imposed = (
        _float(cfg, "gk.imposed_gradient") if "gk.imposed_gradient" in cfg else None
    )
    return GKSimConfig(
        tau=model.tau,
        kappa=model.kappa(theta_ref),
        lambda2=model.lambda2(theta_ref),
        grid=grid,
        dt=_float(cfg, "time.dt"),
        t_end=_float(cfg, "time.t_end"),
        rho_c=material.rho_cv,
        theta_ref=theta_ref,
        imposed_gradient=imposed,
        bc_theta=_float(cfg, "bc.value", "0.0"),
        theta0=_initial_field(cfg, grid),
    )
