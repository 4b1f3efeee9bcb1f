"""Global direct solve and the semi-explicit causal element sweep.

On meshes without interior time-like faces the global system is block
triangular in any causal element order, so the solution can be computed
one small local system at a time; both routes produce the same discrete
solution and the package treats their agreement as a correctness check.
"""

import csv
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla
from scipy.sparse.linalg import MatrixRankWarning

from .assembly import (FluxParams, ProblemData, face_bilinear_blocks,
                       face_rhs)
from .basis import build_basis, eval_basis
from .errors import (MeshMismatch, SingularLocalSystem, SingularSystem)
from .mesh import FaceKind, causal_order
from .quadrature import element_rule, face_rule


@dataclass
class DiscreteSolution:
    """Per-element coefficient vectors in the local Trefftz bases."""

    mesh: object
    p: int
    coeffs: np.ndarray  # (n_elements, 2p+2)
    bases: list
    meta: dict = field(default_factory=dict)

    def element_values(self, eid, points):
        """(v, sigma) from element eid's basis at points (m, 2)."""
        W, Tau = eval_basis(self.bases[eid], points)
        u = self.coeffs[eid]
        return W @ u, Tau @ u

    def values(self, x, t):
        """(v, sigma) at a single point, located in the mesh."""
        eid = self.mesh.locate(x, t)
        v, s = self.element_values(eid, np.array([[x, t]]))
        return float(v[0]), float(s[0])

    def flat(self):
        return self.coeffs.ravel()


def interpolate(mesh, p, exact):
    """Element-wise L2 projection of an exact field onto the local bases.

    For fields that lie in the local space (polynomial waves of degree
    <= p) this reproduces them to roundoff, which makes it the oracle for
    the zero-best-approximation solves.
    """
    bases = [build_basis(e, p) for e in mesh.elements]
    coeffs = np.empty((mesh.n_elements, 2 * p + 2))
    for e in mesh.elements:
        rule = element_rule(e, 2 * p + 2)
        W, Tau = eval_basis(bases[e.id], rule.nodes)
        sq = np.sqrt(rule.weights)
        A = np.vstack([sq[:, None] * W, sq[:, None] * Tau])
        x, t = rule.nodes[:, 0], rule.nodes[:, 1]
        rhs = np.concatenate([sq * exact.v(x, t), sq * exact.sigma(x, t)])
        coeffs[e.id], *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return DiscreteSolution(mesh, p, coeffs, bases, {"source": "interpolate"})


def solve_global(system):
    """Direct sparse factorization of the assembled system.

    Raises SingularSystem when the factorization fails or the relative
    residual exceeds 1e-10 (inadmissible parameters or a mesh bug).
    """
    A = system.matrix.tocsc()
    b = system.rhs
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            u = spla.spsolve(A, b)
        except (MatrixRankWarning, RuntimeError) as exc:
            raise SingularSystem(f"global factorization failed: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise SingularSystem("global solve produced non-finite entries")
    bnorm = float(np.linalg.norm(b))
    resid = float(np.linalg.norm(A @ u - b))
    rel = resid / bnorm if bnorm > 0 else resid
    if rel > 1e-10:
        raise SingularSystem(f"relative residual {rel:.3e} exceeds 1e-10")
    nloc = 2 * system.p + 2
    coeffs = u.reshape(system.mesh.n_elements, nloc)
    return DiscreteSolution(system.mesh, system.p, coeffs, system.bases,
                            {"residual": rel, "route": "global"})


def solve_causal(mesh, p, params=None, data=None, threads=1, npts=None,
                 load_npts=None):
    """Semi-explicit sweep: one local (2p+2) x (2p+2) solve per element.

    Elements are visited in causal order; inflow space-like faces move
    known past traces to the local load, outflow and final faces build
    the local matrix.  Elements within the same causal layer are
    independent and may be solved concurrently (``threads`` > 1); the
    result is schedule-independent.
    """
    params = params if params is not None else FluxParams()
    data = data if data is not None else ProblemData()
    order, layers = causal_order(mesh)
    bases = [build_basis(e, p) for e in mesh.elements]
    nloc = 2 * p + 2
    n = mesh.n_elements
    local_A = [np.zeros((nloc, nloc)) for _ in range(n)]
    local_b = [np.zeros(nloc) for _ in range(n)]
    inflow = [[] for _ in range(n)]  # (past element, coupling block)
    for f in sorted(mesh.faces, key=lambda f: f.id):
        fb = face_bilinear_blocks(f, bases, bases, params, npts=npts)
        for (te, tr), B in sorted(fb.blocks.items()):
            if te == tr:
                local_A[te] += B
            else:
                inflow[te].append((tr, B))
        if f.kind in (FaceKind.INITIAL, FaceKind.DIRICHLET,
                      FaceKind.NEUMANN, FaceKind.ROBIN):
            e = f.elem_minus
            local_b[e] += face_rhs(f, bases[e], data, params, npts=load_npts)

    coeffs = np.zeros((n, nloc))
    max_cond = 0.0

    def solve_one(e):
        rhs = local_b[e].copy()
        for past, B in inflow[e]:
            rhs -= B @ coeffs[past]
        A = local_A[e]
        cond = float(np.linalg.cond(A))
        try:
            u = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularLocalSystem(f"element {e}: {exc}") from exc
        if not np.all(np.isfinite(u)):
            raise SingularLocalSystem(f"element {e}: non-finite local solution")
        coeffs[e] = u
        return cond

    n_layers = int(np.max(layers)) + 1 if n else 0
    by_layer = [[] for _ in range(n_layers)]
    for e in order:
        by_layer[layers[e]].append(e)
    for layer in by_layer:
        if threads > 1 and len(layer) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                conds = list(pool.map(solve_one, sorted(layer)))
        else:
            conds = [solve_one(e) for e in sorted(layer)]
        max_cond = max(max_cond, *conds)
    if max_cond > 1e12:
        warnings.warn(f"local systems poorly conditioned (max cond {max_cond:.2e}); "
                      "consider lowering p", RuntimeWarning, stacklevel=2)
    return DiscreteSolution(mesh, p, coeffs, bases,
                            {"route": "causal", "max_local_cond": max_cond,
                             "layers": n_layers})


@dataclass(frozen=True)
class EquivalenceReport:
    coeff_diff: float  # max over elements of ||coeff_a - coeff_b||_2
    trace_diff: float  # max sampled difference of (v, sigma) on faces


def solution_equivalence(a, b, npts=4):
    """Coefficient and (basis-independent) trace distance of two solutions."""
    if a.p != b.p or a.mesh.n_elements != b.mesh.n_elements or \
            a.mesh.vertices.shape != b.mesh.vertices.shape or \
            not np.allclose(a.mesh.vertices, b.mesh.vertices):
        raise MeshMismatch("solutions live on different meshes or degrees")
    coeff = float(np.max(np.linalg.norm(a.coeffs - b.coeffs, axis=1)))
    trace = 0.0
    for f in a.mesh.faces:
        pts = face_rule(f, 2 * npts - 1).nodes
        for side in (f.elem_minus, f.elem_plus):
            if side is None:
                continue
            va, sa = a.element_values(side, pts)
            vb, sb = b.element_values(side, pts)
            trace = max(trace, float(np.max(np.abs(va - vb) + np.abs(sa - sb))))
    return EquivalenceReport(coeff, trace)


def export_solution(solution, csv_path, coeffs_path=None, grid=(50, 50)):
    """Sample (x, t, v, sigma) on a grid to CSV; optionally dump the raw
    per-element coefficient vectors."""
    mesh = solution.mesh
    nx, nt = grid
    xs = np.linspace(mesh.a, mesh.b, nx)
    ts = np.linspace(0.0, mesh.T, nt)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "t", "v", "sigma"])
        for t in ts:
            for x in xs:
                v, s = solution.values(x, t)
                writer.writerow([repr(float(x)), repr(float(t)), repr(v), repr(s)])
    if coeffs_path is not None:
        with open(coeffs_path, "w") as fh:
            fh.write(f"# degree p = {solution.p}, {mesh.n_elements} elements\n")
            for eid, row in enumerate(solution.coeffs):
                fh.write(f"{eid} " + " ".join(repr(float(c)) for c in row) + "\n")
