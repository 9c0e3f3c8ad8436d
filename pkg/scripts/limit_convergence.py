#!/usr/bin/env python3
"""Measure how fast the singular limits collapse onto their reduced models:
two-relaxation-time -> Jeffreys as lambda_b -> 0 and relaxing flux ->
Fourier as tau -> 0, in the sup norm over a full trajectory.

Usage:
    python3 scripts/limit_convergence.py
"""
import numpy as np

from nonfourier.models import MCV, Burgers, Fourier, Jeffreys, MaterialConstants
from nonfourier.pde1d import Grid1D, SimConfig, simulate

MAT = MaterialConstants(rho=1.0, cv=1.0)
GRID = Grid1D(L=np.pi, N=100)


def trajectory(model) -> np.ndarray:
    cfg = SimConfig(
        model=model,
        material=MAT,
        grid=GRID,
        dt=1e-4,
        t_end=1.0,
        theta0=lambda x: np.sin(x),
        snapshot_every=10,
    )
    return np.array(simulate(cfg).thetas)


def main() -> None:
    jeffreys = trajectory(Jeffreys(tau=1.0, xi=1.0, kappa=0.5))
    fourier = trajectory(Fourier(kappa=1.0))

    print("two-relaxation-time -> Jeffreys (lambda_b -> 0)")
    print(f"{'lambda_b':>10} {'sup_gap':>12}")
    for eps in (1e-1, 1e-2, 1e-3):
        gap = np.abs(
            trajectory(Burgers(lambda_b=eps, tau=1.0, mu=1.0, nu=0.5)) - jeffreys
        ).max()
        print(f"{eps:10.0e} {gap:12.3e}")

    print("\nrelaxing flux -> Fourier (tau -> 0)")
    print(f"{'tau':>10} {'sup_gap':>12}")
    for eps in (1e-1, 1e-2, 1e-3):
        gap = np.abs(trajectory(MCV(tau=eps, kappa=1.0)) - fourier).max()
        print(f"{eps:10.0e} {gap:12.3e}")


if __name__ == "__main__":
    main()
