"""Face-by-face assembly of the upwind Trefftz-DG bilinear form and load.

All coupling lives on the mesh skeleton.  Per face kind the bilinear
integrand is (n = 1, traces w/tau of the test field, v/sigma trial):

  space-like   c^-2 v^- [w]_t + sigma^- [tau]_t + v^- [tau]_N + sigma^- [w]_N
  final        c^-2 v w + sigma tau
  time-like    {v}[tau]_N + {sigma}[w]_N + alpha [v]_N [w]_N + beta [sigma]_N [tau]_N
  Dirichlet    (sigma n) w + alpha v w
  Neumann      v (tau n) + beta (sigma n)(tau n)
  Robin        (1-d)(theta/c) v w + (1-d) v (tau n) + d (sigma n) w
               + (d c/theta)(sigma n)(tau n)

Initial faces carry only load: c^-2 v0 w + sigma0 tau.  The minus trace
on a space-like face is the one from the past element, so information
crosses it upwind.  Face quadrature is exact for the polynomial traces
(p + 2 Gauss points); the Trefftz property removes every volume term.
"""

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sparse

from .basis import build_basis, eval_basis
from .errors import MissingParam, UnclassifiedFace, WrongFaceKind
from .mesh import FaceKind
from .quadrature import face_rule


def _zero_x(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _zero_xt(x, t):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class FluxParams:
    """Face-wise flux/penalty coefficients.

    Each entry is a constant or a callable(face) -> float; ``None`` marks
    the parameter as absent, which raises MissingParam on faces that need
    it.  Admissibility: alpha, beta, theta > 0 and 0 < delta < 1.
    """

    alpha: object = 0.5
    beta: object = 0.5
    delta: object = 0.5
    theta: object = 1.0

    _RANGES = {
        "alpha": lambda v: v > 0,
        "beta": lambda v: v > 0,
        "delta": lambda v: 0 < v < 1,
        "theta": lambda v: v > 0,
    }

    def value(self, name, face):
        raw = getattr(self, name)
        if raw is None:
            raise MissingParam(f"{name} is absent but needed on face {face.id} "
                               f"({face.kind.value})")
        v = float(raw(face)) if callable(raw) else float(raw)
        if not self._RANGES[name](v):
            raise MissingParam(f"{name}={v} inadmissible on face {face.id}")
        return v


@dataclass(frozen=True)
class ProblemData:
    """Initial and boundary data of the wave IBVP, as evaluable functions.

    ``v0``/``sigma0`` take x; the boundary data take (x, t).  The Robin
    datum is g_R = (theta/c) v - sigma . n_Omega on the lateral boundary.
    """

    v0: object = _zero_x
    sigma0: object = _zero_x
    g_D: object = _zero_xt
    g_N: object = _zero_xt
    g_R: object = _zero_xt


@dataclass
class FaceBlocks:
    """Dense couplings of one face, keyed by (test element, trial element)."""

    face_id: int
    blocks: dict


def _quad(face, bases, npts):
    degs = [bases[e].degree for e in (face.elem_minus, face.elem_plus)
            if e is not None]
    m = npts if npts is not None else max(degs) + 2
    return face_rule(face, 2 * m - 1)


def face_bilinear_blocks(face, trial_bases, test_bases, params, npts=None):
    """Exact face integrals of the bilinear form (see module docstring).

    ``trial_bases``/``test_bases`` map element ids to their local bases.
    Space-like faces couple the past trial trace against both test sides;
    initial faces contribute nothing here (pure load).
    """
    if not isinstance(face.kind, FaceKind):
        raise UnclassifiedFace(f"face {face.id} has no valid classification")
    if face.kind is FaceKind.INITIAL:
        return FaceBlocks(face.id, {})
    rule = _quad(face, trial_bases, npts)
    pts, wts = rule.nodes, rule.weights

    def E(lhs, rhs, w=wts):
        return np.einsum("q,qi,qj->ij", w, lhs, rhs)

    if face.kind is FaceKind.SPACELIKE:
        em, ep = face.elem_minus, face.elem_plus
        nx, nt = face.normal
        c = trial_bases[em].c
        trialW, trialT = eval_basis(trial_bases[em], pts)
        blocks = {}
        for eid, sign in ((em, 1.0), (ep, -1.0)):
            testW, testT = eval_basis(test_bases[eid], pts)
            B = (nt / c**2) * E(testW, trialW) + nt * E(testT, trialT)
            B += nx * E(testT, trialW) + nx * E(testW, trialT)
            blocks[(eid, em)] = sign * B
        return FaceBlocks(face.id, blocks)

    if face.kind is FaceKind.FINAL:
        e = face.elem_minus
        c = trial_bases[e].c
        trialW, trialT = eval_basis(trial_bases[e], pts)
        testW, testT = eval_basis(test_bases[e], pts)
        B = E(testW, trialW) / c**2 + E(testT, trialT)
        return FaceBlocks(face.id, {(e, e): B})

    if face.kind is FaceKind.TIMELIKE:
        alpha = params.value("alpha", face)
        beta = params.value("beta", face)
        nx = face.normal[0]
        sides = []
        for eid, sgn in ((face.elem_minus, nx), (face.elem_plus, -nx)):
            Wtr, Ttr = eval_basis(trial_bases[eid], pts)
            Wte, Tte = eval_basis(test_bases[eid], pts)
            sides.append((eid, sgn, Wtr, Ttr, Wte, Tte))
        blocks = {}
        for es, ns, _, _, Ws, Ts in sides:
            for er, nr, Wr, Tr, _, _ in sides:
                B = 0.5 * ns * E(Ts, Wr)          # {v}[tau]_N
                B += 0.5 * ns * E(Ws, Tr)         # {sigma}[w]_N
                B += alpha * ns * nr * E(Ws, Wr)  # alpha [v]_N [w]_N
                B += beta * ns * nr * E(Ts, Tr)   # beta [sigma]_N [tau]_N
                blocks[(es, er)] = B
        return FaceBlocks(face.id, blocks)

    e = face.elem_minus
    n = face.normal[0]
    c = trial_bases[e].c
    trialW, trialT = eval_basis(trial_bases[e], pts)
    testW, testT = eval_basis(test_bases[e], pts)
    if face.kind is FaceKind.DIRICHLET:
        alpha = params.value("alpha", face)
        B = n * E(testW, trialT) + alpha * E(testW, trialW)
    elif face.kind is FaceKind.NEUMANN:
        beta = params.value("beta", face)
        B = n * E(testT, trialW) + beta * E(testT, trialT)
    elif face.kind is FaceKind.ROBIN:
        delta = params.value("delta", face)
        theta = params.value("theta", face)
        B = (1 - delta) * (theta / c) * E(testW, trialW)
        B += (1 - delta) * n * E(testT, trialW)
        B += delta * n * E(testW, trialT)
        B += (delta * c / theta) * E(testT, trialT)
    else:  # pragma: no cover - all kinds handled above
        raise UnclassifiedFace(f"face {face.id} kind {face.kind}")
    return FaceBlocks(face.id, {(e, e): B})


def face_rhs(face, test_basis, data, params, npts=None):
    """Load contributions of a data-carrying face for one test element."""
    if face.kind not in (FaceKind.INITIAL, FaceKind.DIRICHLET,
                         FaceKind.NEUMANN, FaceKind.ROBIN):
        raise WrongFaceKind(f"face {face.id} ({face.kind.value}) carries no data")
    m = npts if npts is not None else test_basis.degree + 2
    rule = face_rule(face, 2 * m - 1)
    pts, wts = rule.nodes, rule.weights
    x, t = pts[:, 0], pts[:, 1]
    W, Tau = eval_basis(test_basis, pts)
    c = test_basis.c
    if face.kind is FaceKind.INITIAL:
        v0 = np.broadcast_to(np.asarray(data.v0(x), dtype=float), x.shape)
        s0 = np.broadcast_to(np.asarray(data.sigma0(x), dtype=float), x.shape)
        return W.T @ (wts * v0 / c**2) + Tau.T @ (wts * s0)
    n = face.normal[0]
    if face.kind is FaceKind.DIRICHLET:
        g = np.broadcast_to(np.asarray(data.g_D(x, t), dtype=float), x.shape)
        alpha = params.value("alpha", face)
        return W.T @ (wts * g * alpha) - Tau.T @ (wts * g * n)
    if face.kind is FaceKind.NEUMANN:
        g = np.broadcast_to(np.asarray(data.g_N(x, t), dtype=float), x.shape)
        beta = params.value("beta", face)
        return Tau.T @ (wts * g * beta * n) - W.T @ (wts * g)
    g = np.broadcast_to(np.asarray(data.g_R(x, t), dtype=float), x.shape)
    delta = params.value("delta", face)
    theta = params.value("theta", face)
    return W.T @ (wts * g * (1 - delta)) - Tau.T @ (wts * g * (delta * c / theta) * n)


@dataclass
class LinearSystem:
    """Block-sparse Galerkin system: one (2p+2)-block per element pair."""

    matrix: sparse.csr_matrix
    rhs: np.ndarray
    offsets: np.ndarray
    mesh: object
    p: int
    bases: list

    @property
    def n_dofs(self):
        return self.rhs.shape[0]

    def dump(self, prefix):
        """Matrix-market text dump of the operator and the load."""
        scipy.io.mmwrite(f"{prefix}_matrix", self.matrix)
        scipy.io.mmwrite(f"{prefix}_rhs", self.rhs[:, None])


def assemble_global(mesh, p, params=None, data=None, npts=None, load_npts=None):
    """Assemble the full bilinear form and load over the mesh skeleton.

    Faces are processed in face-id order and blocks accumulated in sorted
    key order, so the result is bitwise reproducible for any input face
    permutation.  System dimension is (2p+2) * #elements.
    """
    params = params if params is not None else FluxParams()
    data = data if data is not None else ProblemData()
    bases = [build_basis(e, p) for e in mesh.elements]
    nloc = 2 * p + 2
    n = mesh.n_elements
    offsets = np.arange(n + 1) * nloc
    rhs = np.zeros(n * nloc)
    acc = {}
    for f in sorted(mesh.faces, key=lambda f: f.id):
        fb = face_bilinear_blocks(f, bases, bases, params, npts=npts)
        for key in sorted(fb.blocks):
            if key in acc:
                acc[key] = acc[key] + fb.blocks[key]
            else:
                acc[key] = fb.blocks[key]
        if f.kind in (FaceKind.INITIAL, FaceKind.DIRICHLET,
                      FaceKind.NEUMANN, FaceKind.ROBIN):
            e = f.elem_minus
            rhs[offsets[e]:offsets[e + 1]] += face_rhs(
                f, bases[e], data, params, npts=load_npts
            )
    rows, cols, vals = [], [], []
    for (te, tr) in sorted(acc):
        B = acc[(te, tr)]
        r, c = np.meshgrid(
            np.arange(offsets[te], offsets[te + 1]),
            np.arange(offsets[tr], offsets[tr + 1]),
            indexing="ij",
        )
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(B.ravel())
    if rows:
        matrix = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n * nloc, n * nloc),
        ).tocsr()
    else:  # pragma: no cover - every mesh has faces
        matrix = sparse.csr_matrix((n * nloc, n * nloc))
    return LinearSystem(matrix, rhs, offsets, mesh, p, bases)


@dataclass(frozen=True)
class FluxDecomposition:
    """Remark-style splitting M = M+ + M- of the boundary flux matrix."""

    m: np.ndarray
    m_plus: np.ndarray
    m_minus: np.ndarray
    additive_error: float
    kernel_match: bool
    plus_psd: bool
    minus_nsd: bool


def _null_space(M, tol=1e-12):
    _, s, vt = np.linalg.svd(M)
    return vt[s <= tol * max(s[0], 1.0)].T


def flux_matrix_decomposition(normal, c, alpha=None, beta=None, eig_tol=1e-12):
    """Build M = [[n_t/c^2, n_x], [n_x, n_t]] on an element boundary and
    its upwind/centred splitting.

    Space-like outward normals take (M, 0) for n_t > 0 and (0, M) for
    n_t < 0; time-like ones take the alpha/beta penalised pair, which is
    (psd, nsd) exactly when alpha * beta >= 1/4.
    """
    normal = np.asarray(normal, dtype=float)
    nx, nt = normal
    if abs(np.hypot(nx, nt) - 1.0) > 1e-12:
        raise ValueError(f"normal must be unit, got {normal}")
    M = np.array([[nt / c**2, nx], [nx, nt]])
    if abs(nt) <= 1e-12:
        if alpha is None or beta is None:
            raise MissingParam("time-like flux decomposition needs alpha and beta")
        Mp = np.array([[alpha, 0.5 * nx], [0.5 * nx, beta * nx * nx]])
        Mm = np.array([[-alpha, 0.5 * nx], [0.5 * nx, -beta * nx * nx]])
    elif nt > 0:
        Mp, Mm = M.copy(), np.zeros((2, 2))
    else:
        Mp, Mm = np.zeros((2, 2)), M.copy()
    additive = float(np.max(np.abs(Mp + Mm - M)))
    n_m = _null_space(M)
    n_d = _null_space(Mp - Mm)
    kernel_match = n_m.shape[1] == n_d.shape[1] and (
        n_m.shape[1] == 0
        or (np.max(np.abs((Mp - Mm) @ n_m)) < 1e-10
            and np.max(np.abs(M @ n_d)) < 1e-10)
    )
    plus_psd = bool(np.min(np.linalg.eigvalsh(0.5 * (Mp + Mp.T))) >= -eig_tol)
    minus_nsd = bool(np.max(np.linalg.eigvalsh(0.5 * (Mm + Mm.T))) <= eig_tol)
    return FluxDecomposition(M, Mp, Mm, additive, kernel_match, plus_psd, minus_nsd)
