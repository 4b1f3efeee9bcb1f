"""Manufactured exact solutions of the first-order wave system.

Each solution carries evaluable v(x, t) and sigma(x, t) plus generators
for matching initial/boundary data, so any boundary split (Dirichlet,
Neumann, Robin or mixed) can be driven consistently.
"""

from dataclasses import dataclass

import numpy as np

from .assembly import ProblemData


@dataclass(frozen=True)
class ExactSolution:
    name: str
    v: object
    sigma: object
    c: float
    degree: object = None  # polynomial degree, or None if not polynomial


def traveling_sine(k=2.0, c=1.0):
    """Rightward wave from the potential U = sin(k(x - ct)):
    v = -ck cos(k(x - ct)), sigma = -k cos(k(x - ct))."""
    def v(x, t):
        return -c * k * np.cos(k * (np.asarray(x) - c * np.asarray(t)))

    def sigma(x, t):
        return -k * np.cos(k * (np.asarray(x) - c * np.asarray(t)))

    return ExactSolution(f"traveling_sine(k={k})", v, sigma, float(c))


def poly_wave(m, d=1, c=1.0, x0=0.0, t0=0.0, scale=1.0):
    """Degree-m polynomial wave (c s^m, d s^m), s = (d(x-x0) - c(t-t0))/scale."""
    if d not in (+1, -1):
        raise ValueError(f"direction must be +-1, got {d}")

    def phase(x, t):
        return (d * (np.asarray(x) - x0) - c * (np.asarray(t) - t0)) / scale

    def v(x, t):
        return c * phase(x, t) ** m

    def sigma(x, t):
        return float(d) * phase(x, t) ** m

    return ExactSolution(f"poly_wave(m={m},d={d:+d})", v, sigma, float(c), degree=m)


def standing(k=np.pi, c=1.0):
    """Separated solution from U = cos(kx) cos(kct); sigma vanishes at
    x = 0 and x = pi/k, so it drives homogeneous Neumann walls there."""
    def v(x, t):
        return -k * c * np.cos(k * np.asarray(x)) * np.sin(k * c * np.asarray(t))

    def sigma(x, t):
        return k * np.sin(k * np.asarray(x)) * np.cos(k * c * np.asarray(t))

    return ExactSolution(f"standing(k={k})", v, sigma, float(c))


def combine(a, b, ca=1.0, cb=1.0):
    """Linear combination of two solutions with the same wave speed."""
    if abs(a.c - b.c) > 1e-14 * max(a.c, b.c):
        raise ValueError("can only combine solutions with equal wave speed")

    def v(x, t):
        return ca * a.v(x, t) + cb * b.v(x, t)

    def sigma(x, t):
        return ca * a.sigma(x, t) + cb * b.sigma(x, t)

    degree = None
    if a.degree is not None and b.degree is not None:
        degree = max(a.degree, b.degree)
    return ExactSolution(f"{ca}*{a.name}+{cb}*{b.name}", v, sigma, a.c, degree)


def make_data(exact, a, b, theta=1.0):
    """ProblemData manufactured from an exact solution on Omega = (a, b).

    g_N and g_R involve the outward normal, which on the 1D boundary is
    -1 at a and +1 at b (decided by proximity)."""
    def outward(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x - a) < np.abs(x - b), -1.0, 1.0)

    def v0(x):
        return exact.v(x, np.zeros_like(np.asarray(x, dtype=float)))

    def sigma0(x):
        return exact.sigma(x, np.zeros_like(np.asarray(x, dtype=float)))

    def g_D(x, t):
        return exact.v(x, t)

    def g_N(x, t):
        return exact.sigma(x, t) * outward(x)

    def g_R(x, t):
        return (theta / exact.c) * exact.v(x, t) - exact.sigma(x, t) * outward(x)

    return ProblemData(v0=v0, sigma0=sigma0, g_D=g_D, g_N=g_N, g_R=g_R)


def named(name, **kw):
    """Look up a shipped solution by name ('traveling_sine', 'poly_wave',
    'standing')."""
    registry = {
        "traveling_sine": traveling_sine,
        "poly_wave": poly_wave,
        "standing": standing,
    }
    if name not in registry:
        raise KeyError(f"unknown exact solution {name!r}; "
                       f"choices: {sorted(registry)}")
    return registry[name](**kw)
