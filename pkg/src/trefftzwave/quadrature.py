"""Gauss quadrature on face segments and star-shaped space-time polygons.

Face rules are the workhorse: the Trefftz property removes all volume
terms from the variational form, so element (volume) rules are needed
only for L2 error reporting.
"""

import numpy as np
from dataclasses import dataclass

from .errors import DegenerateFace, NotStarShaped, UnsupportedOrder

MAX_POINTS = 64


@dataclass(frozen=True)
class QuadRule:
    """Nodes, positive weights and the polynomial degree integrated exactly.

    ``nodes`` has shape (m,) for the reference rule on [-1, 1] and
    (m, 2) for rules mapped onto segments or polygons in the (x, t) plane.
    """

    nodes: np.ndarray
    weights: np.ndarray
    degree: int


_gauss_cache: dict[int, QuadRule] = {}


def _legendre(m, x):
    """Evaluate P_m and P_m' at x (|x| < 1) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, m + 1):
        p, p_prev = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k, p
    dp = m * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def gauss_legendre(m: int) -> QuadRule:
    """Gauss-Legendre rule with m nodes on [-1, 1], exact to degree 2m-1.

    Nodes are computed by Newton iteration on P_m from Chebyshev initial
    guesses (tolerance 1e-15, no tables); rules are cached.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= MAX_POINTS:
        raise UnsupportedOrder(f"need 1 <= m <= {MAX_POINTS}, got {m}")
    m = int(m)
    if m in _gauss_cache:
        return _gauss_cache[m]
    if m == 1:
        x = np.array([0.0])
        w = np.array([2.0])
    else:
        k = np.arange(1, m + 1)
        x = np.cos(np.pi * (4 * k - 1) / (4 * m + 2))
        for _ in range(100):
            p, dp = _legendre(m, x)
            dx = p / dp
            x -= dx
            if np.max(np.abs(dx)) < 1e-15:
                break
        x = np.sort(x)
        x = 0.5 * (x - x[::-1])  # enforce symmetry exactly
        _, dp = _legendre(m, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
        w = 0.5 * (w + w[::-1])
    x.flags.writeable = False
    w.flags.writeable = False
    rule = QuadRule(x, w, 2 * m - 1)
    _gauss_cache[m] = rule
    return rule


def face_rule(face, degree: int) -> QuadRule:
    """Gauss rule mapped onto a face segment, exact for traces of ``degree``.

    Weights are scaled by the half-length of the segment, so they sum to
    the face measure.
    """
    p0 = np.asarray(face.p0, dtype=float)
    p1 = np.asarray(face.p1, dtype=float)
    length = float(np.hypot(*(p1 - p0)))
    if length <= 0.0:
        raise DegenerateFace(f"face of zero length at {p0}")
    m = max(1, degree // 2 + 1)
    base = gauss_legendre(m)
    mid = 0.5 * (p0 + p1)
    half = 0.5 * (p1 - p0)
    nodes = mid[None, :] + base.nodes[:, None] * half[None, :]
    weights = base.weights * (length / 2.0)
    return QuadRule(nodes, weights, base.degree)


def element_rule(element, degree: int) -> QuadRule:
    """Volume rule over a star-shaped polygon via fan triangulation.

    Each fan triangle (centroid, v_i, v_{i+1}) carries a collapsed
    tensor-product Gauss rule; the total weight equals the polygon area.
    """
    verts = np.asarray(element.verts, dtype=float)
    centroid = np.asarray(element.centroid, dtype=float)
    k = len(verts)
    # one extra order absorbs the collapsed-coordinate Jacobian factor
    m = max(1, min(MAX_POINTS, (degree + 3) // 2))
    base = gauss_legendre(m)
    a = 0.5 * (base.nodes + 1.0)
    wa = 0.5 * base.weights
    aa, bb = np.meshgrid(a, a, indexing="ij")
    ww = np.outer(wa, wa)
    xi = (aa * (1.0 - bb)).ravel()
    eta = (aa * bb).ravel()
    jac = aa.ravel()
    wts = (ww.ravel()) * jac

    nodes = []
    weights = []
    scale = float(np.max(np.abs(verts - centroid))) ** 2 + 1e-300
    for i in range(k):
        p1 = verts[i] - centroid
        p2 = verts[(i + 1) % k] - centroid
        twice_area = p1[0] * p2[1] - p1[1] * p2[0]
        if twice_area <= 1e-13 * scale:
            raise NotStarShaped(
                f"element {getattr(element, 'id', '?')}: fan triangle {i} "
                f"has nonpositive area {0.5 * twice_area}"
            )
        pts = centroid[None, :] + np.outer(xi, p1) + np.outer(eta, p2)
        nodes.append(pts)
        weights.append(wts * twice_area)
    return QuadRule(np.concatenate(nodes), np.concatenate(weights), degree)
