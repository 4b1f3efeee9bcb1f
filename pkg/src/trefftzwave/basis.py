"""Local polynomial-wave bases for the first-order wave system.

Every basis field is a pair (w, tau) built from powers of the scaled
characteristic variable

    s_d = (d (x - x_K) - c (t - t_K)) / h_K,     d in {+1, -1},

namely (w, tau) = (c s_d^k, d s_d^k).  Such pairs satisfy

    dw/dx + dtau/dt = 0,      dtau/dx + c^-2 dw/dt = 0

identically, so all volume terms of the DG form vanish.  The element
anchor (centroid) and the scale h_K keep the monomials conditioned.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .quadrature import element_rule


def basis_dim(n: int, p: int) -> int:
    """Dimension of the degree-p polynomial-wave space in n space dims.

    Equals binom(p+n, n) (2p+n+2)/(p+1) - 1; for n = 1 this is 2p + 2.
    """
    if n < 1 or p < 0:
        raise ValueError(f"need n >= 1 and p >= 0, got n={n}, p={p}")
    val = Fraction(comb(p + n, n) * (2 * p + n + 2), p + 1) - 1
    if val.denominator != 1:
        raise ArithmeticError(f"dimension formula not integral for n={n}, p={p}")
    return int(val)


def full_poly_dim(n: int, p: int) -> int:
    """Dimension of the full vector-valued polynomial space of degree p."""
    if n < 1 or p < 0:
        raise ValueError(f"need n >= 1 and p >= 0, got n={n}, p={p}")
    return comb(p + n, n) * (p + n + 1)


@dataclass(frozen=True)
class PolyWave:
    """One polynomial-wave field (c s_d^k, d s_d^k) on an element."""

    direction: int  # +1 or -1
    degree: int
    x0: float
    t0: float
    scale: float
    c: float

    def phase(self, x, t):
        return (self.direction * (np.asarray(x) - self.x0)
                - self.c * (np.asarray(t) - self.t0)) / self.scale

    def values(self, x, t):
        """(w, tau) at the given points."""
        s = self.phase(x, t) ** self.degree
        return self.c * s, self.direction * s


@dataclass(frozen=True)
class TrefftzBasis:
    element_id: int
    degree: int
    c: float
    waves: tuple

    def __len__(self):
        return len(self.waves)


def build_basis(element, p: int) -> TrefftzBasis:
    """The 2p+2 polynomial waves of degree <= p anchored at the element."""
    if p < 0:
        raise ValueError(f"degree must be nonnegative, got {p}")
    cx, ct = element.centroid
    waves = tuple(
        PolyWave(d, k, float(cx), float(ct), float(element.h), float(element.c))
        for d in (+1, -1)
        for k in range(p + 1)
    )
    return TrefftzBasis(element.id, p, float(element.c), waves)


def eval_basis(basis, points):
    """Evaluate all fields at points (m, 2); returns W, Tau of shape (m, n_loc)."""
    pts = np.asarray(points, dtype=float)
    x, t = pts[:, 0], pts[:, 1]
    W = np.empty((len(pts), len(basis.waves)))
    Tau = np.empty_like(W)
    for j, wave in enumerate(basis.waves):
        W[:, j], Tau[:, j] = wave.values(x, t)
    return W, Tau


def trefftz_residual(w_fn, tau_fn, element, n_samples=64, step=None, seed=0):
    """Max finite-difference residual of the two wave equations.

    Samples random interior points (star-shaped w.r.t. the centroid) and
    returns max |d_x w + d_t tau| + |d_x tau + c^-2 d_t w| with central
    differences; exact Trefftz fields land at the ~1e-8 difference floor.
    """
    rng = np.random.default_rng(seed)
    verts = np.asarray(element.verts, dtype=float)
    centroid = np.asarray(element.centroid, dtype=float)
    lam = rng.dirichlet(np.ones(len(verts)), size=n_samples)
    pts = centroid + 0.8 * (lam @ verts - centroid)
    h = step if step is not None else 1e-6 * element.h
    x, t = pts[:, 0], pts[:, 1]

    def dx(f):
        return (f(x + h, t) - f(x - h, t)) / (2 * h)

    def dt(f):
        return (f(x, t + h) - f(x, t - h)) / (2 * h)

    r1 = np.abs(dx(w_fn) + dt(tau_fn))
    r2 = np.abs(dx(tau_fn) + dt(w_fn) / element.c**2)
    return float(np.max(r1 + r2))


def gram_matrix(element, basis, degree=None):
    """L2 Gram matrix of the basis over the element, with its condition
    number and numerical rank."""
    if degree is None:
        degree = 2 * basis.degree + 2
    rule = element_rule(element, degree)
    W, Tau = eval_basis(basis, rule.nodes)
    G = np.einsum("q,qi,qj->ij", rule.weights, W, W)
    G += np.einsum("q,qi,qj->ij", rule.weights, Tau, Tau)
    cond = float(np.linalg.cond(G))
    rank = int(np.linalg.matrix_rank(G))
    return G, cond, rank
