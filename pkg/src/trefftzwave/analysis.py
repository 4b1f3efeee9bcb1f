"""Mesh-dependent norms, interface energies, stability constants and
convergence studies.

The DG and DG+ (semi)norms are flux-weighted trace norms on the mesh
skeleton; the bilinear form is coercive in the DG norm with unit constant
and continuous with the constant returned by :func:`continuity_constant`.
Norm evaluation uses the same face quadrature as the assembly so that
coercivity checks are exact up to roundoff.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .assembly import FluxParams
from .errors import AssumptionViolated, MissingTrace, NotSpaceLike
from .mesh import FaceKind, count_interface_layers, interface_layers
from .quadrature import element_rule, face_rule
from .solutions import make_data


class ExactField:
    """Adapter giving an exact solution the element-trace interface."""

    def __init__(self, exact):
        self.exact = exact
        self.p = None

    def element_values(self, eid, points):
        x, t = points[:, 0], points[:, 1]
        shape = x.shape
        v = np.broadcast_to(np.asarray(self.exact.v(x, t), dtype=float), shape)
        s = np.broadcast_to(np.asarray(self.exact.sigma(x, t), dtype=float), shape)
        return v, s


class DiffField:
    """Trace field of (exact - discrete); its jumps are the discrete jumps."""

    def __init__(self, exact, solution):
        self.exact = ExactField(exact)
        self.solution = solution
        self.p = solution.p

    def element_values(self, eid, points):
        ve, se = self.exact.element_values(eid, points)
        vh, sh = self.solution.element_values(eid, points)
        return ve - vh, se - sh


@dataclass
class NormReport:
    """DG / DG+ norms with the per-summand breakdown (squared terms)."""

    dg: float
    dg_plus: float
    terms: dict

    def to_dict(self):
        return {"dg": self.dg, "dg_plus": self.dg_plus, "terms": dict(self.terms)}


def _npts_for(field, npts):
    if npts is not None:
        return npts
    return field.p + 2 if getattr(field, "p", None) is not None else 12


def _side_values(field, face, side, pts):
    if side is None:
        raise MissingTrace(f"face {face.id} has no element on the requested side")
    return field.element_values(side, pts)


def _norm_terms(field, mesh, params, gamma_weights=True, npts=None):
    m = _npts_for(field, npts)
    terms = {k: 0.0 for k in (
        "space_jump_w", "space_jump_tau", "endcap_w", "endcap_tau",
        "time_jump_w", "time_jump_tau", "dirichlet_w", "neumann_tau",
        "robin_w", "robin_tau",
        "space_past_w", "space_past_tau", "time_mean_w", "time_mean_tau",
        "dirichlet_tau", "neumann_w",
    )}
    for f in mesh.faces:
        rule = face_rule(f, 2 * m - 1)
        pts, wts = rule.nodes, rule.weights
        if f.kind is FaceKind.SPACELIKE:
            wm, tm = _side_values(field, f, f.elem_minus, pts)
            wp, tp = _side_values(field, f, f.elem_plus, pts)
            c = mesh.elements[f.elem_minus].c
            nt = f.normal[1]
            g = f.gamma if gamma_weights else 0.0
            dw, dtau = wm - wp, tm - tp
            terms["space_jump_w"] += 0.5 * (1 - g) * nt / c**2 * float(wts @ dw**2)
            terms["space_jump_tau"] += 0.5 * (1 - g) * nt * float(wts @ dtau**2)
            terms["space_past_w"] += nt / (1 - g) / c**2 * float(wts @ wm**2)
            terms["space_past_tau"] += nt / (1 - g) * float(wts @ tm**2)
        elif f.kind in (FaceKind.INITIAL, FaceKind.FINAL):
            w, tau = _side_values(field, f, f.elem_minus, pts)
            c = mesh.elements[f.elem_minus].c
            terms["endcap_w"] += 0.5 / c**2 * float(wts @ w**2)
            terms["endcap_tau"] += 0.5 * float(wts @ tau**2)
        elif f.kind is FaceKind.TIMELIKE:
            w1, t1 = _side_values(field, f, f.elem_minus, pts)
            w2, t2 = _side_values(field, f, f.elem_plus, pts)
            alpha = params.value("alpha", f)
            beta = params.value("beta", f)
            terms["time_jump_w"] += alpha * float(wts @ (w1 - w2) ** 2)
            terms["time_jump_tau"] += beta * float(wts @ (t1 - t2) ** 2)
            terms["time_mean_w"] += float(wts @ (0.5 * (w1 + w2)) ** 2) / beta
            terms["time_mean_tau"] += float(wts @ (0.5 * (t1 + t2)) ** 2) / alpha
        elif f.kind is FaceKind.DIRICHLET:
            w, tau = _side_values(field, f, f.elem_minus, pts)
            alpha = params.value("alpha", f)
            terms["dirichlet_w"] += alpha * float(wts @ w**2)
            terms["dirichlet_tau"] += float(wts @ tau**2) / alpha
        elif f.kind is FaceKind.NEUMANN:
            w, tau = _side_values(field, f, f.elem_minus, pts)
            beta = params.value("beta", f)
            terms["neumann_tau"] += beta * float(wts @ tau**2)
            terms["neumann_w"] += float(wts @ w**2) / beta
        elif f.kind is FaceKind.ROBIN:
            w, tau = _side_values(field, f, f.elem_minus, pts)
            delta = params.value("delta", f)
            theta = params.value("theta", f)
            c = mesh.elements[f.elem_minus].c
            terms["robin_w"] += (1 - delta) * theta / c * float(wts @ w**2)
            terms["robin_tau"] += delta * c / theta * float(wts @ tau**2)
    return terms


_DG_KEYS = ("space_jump_w", "space_jump_tau", "endcap_w", "endcap_tau",
            "time_jump_w", "time_jump_tau", "dirichlet_w", "neumann_tau",
            "robin_w", "robin_tau")


def dg_norm(field, mesh, params=None, gamma_weights=True, npts=None):
    """DG seminorm of a two-sided trace field, with term breakdown."""
    params = params if params is not None else FluxParams()
    terms = _norm_terms(field, mesh, params, gamma_weights, npts)
    dg2 = sum(terms[k] for k in _DG_KEYS)
    plus2 = dg2 + sum(terms[k] for k in terms if k not in _DG_KEYS)
    return NormReport(float(np.sqrt(dg2)), float(np.sqrt(plus2)), terms)


def dg_plus_norm(field, mesh, params=None, gamma_weights=True, npts=None):
    """DG+ norm: the DG norm plus past-trace, mean and dual boundary terms."""
    return dg_norm(field, mesh, params, gamma_weights, npts)


def energy(field, faces, mesh, side="past"):
    """Signed energy integral over a chain of space-like faces:
    E = int_Sigma (w tau n_x + (w^2/c^2 + tau^2) n_t / 2) dS."""
    total = 0.0
    for f in faces:
        if f.kind not in (FaceKind.SPACELIKE, FaceKind.INITIAL, FaceKind.FINAL):
            raise NotSpaceLike(f"face {f.id} ({f.kind.value}) is not space-like")
        eid = f.elem_minus if side == "past" or f.elem_plus is None else f.elem_plus
        m = _npts_for(field, None)
        rule = face_rule(f, 2 * m - 1)
        w, tau = field.element_values(eid, rule.nodes)
        c = mesh.elements[eid].c
        nx, nt = f.normal
        total += float(rule.weights @ (w * tau * nx
                                       + 0.5 * (w**2 / c**2 + tau**2) * nt))
    return total


def energy_bounds(field, faces, mesh, side="past"):
    """(lower, upper) bounds of the energy with the (1 -+ gamma) weights."""
    lo = hi = 0.0
    for f in faces:
        if f.kind not in (FaceKind.SPACELIKE, FaceKind.INITIAL, FaceKind.FINAL):
            raise NotSpaceLike(f"face {f.id} ({f.kind.value}) is not space-like")
        eid = f.elem_minus if side == "past" or f.elem_plus is None else f.elem_plus
        m = _npts_for(field, None)
        rule = face_rule(f, 2 * m - 1)
        w, tau = field.element_values(eid, rule.nodes)
        c = mesh.elements[eid].c
        nt = f.normal[1]
        quad = float(rule.weights @ (0.5 * (w**2 / c**2 + tau**2) * nt))
        lo += (1 - f.gamma) * quad
        hi += (1 + f.gamma) * quad
    return lo, hi


def energy_of_data(mesh, data, npts=24):
    """E(0; v0, sigma0) computed from the problem data on the initial faces."""
    total = 0.0
    for f in mesh.faces_of(FaceKind.INITIAL):
        rule = face_rule(f, 2 * npts - 1)
        x = rule.nodes[:, 0]
        shape = x.shape
        v0 = np.broadcast_to(np.asarray(data.v0(x), dtype=float), shape)
        s0 = np.broadcast_to(np.asarray(data.sigma0(x), dtype=float), shape)
        c = mesh.elements[f.elem_minus].c
        total += float(rule.weights @ (0.5 * (v0**2 / c**2 + s0**2)))
    return total


@dataclass
class EnergyReport:
    e_initial: float
    e_final: float
    interior: list = field(default_factory=list)  # (mean time, energy)
    dissipative: bool = True

    def to_dict(self):
        return {"e_initial": self.e_initial, "e_final": self.e_final,
                "interior": [list(pair) for pair in self.interior],
                "dissipative": self.dissipative}


def interior_interfaces(mesh):
    """Chains of interior space-like faces that span the full spatial
    domain (full-width fronts), sorted by mean time."""
    tol = 1e-10 * (mesh.b - mesh.a)
    chains = []
    for layer in interface_layers(mesh):
        faces = [mesh.faces[fid] for fid in layer]
        spans = sorted((min(f.p0[0], f.p1[0]), max(f.p0[0], f.p1[0]))
                       for f in faces)
        covered = abs(spans[0][0] - mesh.a) <= tol
        reach = spans[0][1]
        for lo, hi in spans[1:]:
            if lo > reach + tol:
                covered = False
                break
            reach = max(reach, hi)
        if covered and abs(reach - mesh.b) <= tol:
            tmean = float(np.mean([f.midpoint[1] for f in faces]))
            chains.append((tmean, faces))
    chains.sort(key=lambda pair: pair[0])
    return chains


def dissipation_report(solution, data, include_interior=True):
    """Energies at t=0 (from data), t=T (discrete trace) and on interior
    full-width interfaces (past-side traces); flags E(T) <= E(0)."""
    mesh = solution.mesh
    e0 = energy_of_data(mesh, data)
    eT = energy(solution, mesh.faces_of(FaceKind.FINAL), mesh)
    interior = []
    if include_interior:
        for tmean, faces in interior_interfaces(mesh):
            interior.append((tmean, energy(solution, faces, mesh, side="past")))
    dissipative = eT <= e0 * (1 + 1e-12) + 1e-300
    return EnergyReport(e0, eT, interior, bool(dissipative))


def l2q_error(solution, exact, degree=None):
    """Space-time error norm (||c^-1 (v - v_h)||^2 + ||sigma - sigma_h||^2)^(1/2)."""
    mesh = solution.mesh
    if degree is None:
        degree = 2 * solution.p + 8
    total = 0.0
    for e in mesh.elements:
        rule = element_rule(e, degree)
        x, t = rule.nodes[:, 0], rule.nodes[:, 1]
        vh, sh = solution.element_values(e.id, rule.nodes)
        dv = np.asarray(exact.v(x, t), dtype=float) - vh
        ds = np.asarray(exact.sigma(x, t), dtype=float) - sh
        total += float(rule.weights @ (dv**2 / e.c**2 + ds**2))
    return float(np.sqrt(total))


def l2q_norm(exact, mesh, degree=12):
    """Space-time norm of an exact field, for relative error reporting."""
    total = 0.0
    for e in mesh.elements:
        rule = element_rule(e, degree)
        x, t = rule.nodes[:, 0], rule.nodes[:, 1]
        v = np.broadcast_to(np.asarray(exact.v(x, t), dtype=float), x.shape)
        s = np.broadcast_to(np.asarray(exact.sigma(x, t), dtype=float), x.shape)
        total += float(rule.weights @ (v**2 / e.c**2 + s**2))
    return float(np.sqrt(total))


def continuity_constant(params, mesh):
    """C_c of the continuity estimate: 2 without Robin faces, otherwise
    2 max(||(1-d)/d||^1/2, ||d/(1-d)||^1/2) over the Robin faces."""
    robin = mesh.faces_of(FaceKind.ROBIN)
    if not robin:
        return 2.0
    hi = 0.0
    for f in robin:
        d = params.value("delta", f)
        hi = max(hi, (1 - d) / d, d / (1 - d))
    return 2.0 * float(np.sqrt(hi))


def stability_constant(mesh, params):
    """(N, C_stab) of the duality stability estimate.

    Requires the Robin-only boundary and a mesh without interior
    time-like faces; N counts the nested space-like interfaces (including
    the final one at t=T) and

        C_stab^2 = 2 T (N max 4(1+gamma^2)/(1-gamma)^2 + max 1/(delta(1-delta))).

    The gamma factor is floored at its gamma=0 value 4 because the final
    interface t=T always participates.
    """
    if mesh.faces_of(FaceKind.DIRICHLET, FaceKind.NEUMANN):
        raise AssumptionViolated("stability constant needs a Robin-only boundary")
    if mesh.faces_of(FaceKind.TIMELIKE):
        raise AssumptionViolated("stability constant forbids time-like faces")
    n_layers = count_interface_layers(mesh)
    c_gamma = 4.0
    for f in mesh.faces_of(FaceKind.SPACELIKE):
        g = f.gamma
        c_gamma = max(c_gamma, 4 * (1 + g**2) / (1 - g) ** 2)
    c_delta = 0.0
    for f in mesh.faces_of(FaceKind.ROBIN):
        d = params.value("delta", f)
        c_delta = max(c_delta, 1.0 / (d * (1 - d)))
    c2 = 2.0 * mesh.T * (n_layers * c_gamma + c_delta)
    return n_layers, float(np.sqrt(c2))


def theorem_stability_rhs(mesh, data, params, npts=32):
    """Right-hand side of the a priori bound on |||u_hp|||_DG for
    g_D = g_N = 0:  (2||c^-1 v0||^2 + 2||sigma0||^2 + ||(c/theta)^1/2 g_R||^2)^1/2."""
    total = 0.0
    for f in mesh.faces_of(FaceKind.INITIAL):
        rule = face_rule(f, 2 * npts - 1)
        x = rule.nodes[:, 0]
        v0 = np.broadcast_to(np.asarray(data.v0(x), dtype=float), x.shape)
        s0 = np.broadcast_to(np.asarray(data.sigma0(x), dtype=float), x.shape)
        c = mesh.elements[f.elem_minus].c
        total += 2.0 * float(rule.weights @ (v0**2 / c**2 + s0**2))
    for f in mesh.faces_of(FaceKind.ROBIN):
        rule = face_rule(f, 2 * npts - 1)
        x, t = rule.nodes[:, 0], rule.nodes[:, 1]
        g = np.broadcast_to(np.asarray(data.g_R(x, t), dtype=float), x.shape)
        c = mesh.elements[f.elem_minus].c
        theta = params.value("theta", f)
        total += (c / theta) * float(rule.weights @ g**2)
    return float(np.sqrt(total))


@dataclass
class ConvRow:
    h: float
    dofs: int
    l2q_error: float
    dg_error: float
    order_l2: object = None  # None on the first row or at the error floor
    order_dg: object = None


@dataclass
class ConvergenceTable:
    rows: list

    FLOOR = 1e-11

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["h", "dofs", "l2q_error", "dg_error",
                             "order_l2", "order_dg"])
            for r in self.rows:
                writer.writerow([repr(r.h), r.dofs, repr(r.l2q_error),
                                 repr(r.dg_error),
                                 "" if r.order_l2 is None else repr(r.order_l2),
                                 "" if r.order_dg is None else repr(r.order_dg)])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump([r.__dict__ for r in self.rows], fh, indent=1, sort_keys=True)
            fh.write("\n")


def _order(prev, cur, floor):
    if prev is None or prev < floor or cur < floor:
        return None
    return float(np.log2(prev / cur))


def convergence_study(exact, mesh_factory, p, levels, params=None, theta=1.0,
                      solver="global"):
    """Solve on a refinement family and tabulate errors and observed orders.

    ``mesh_factory(level)`` builds the level-th mesh; data is manufactured
    from the exact solution.  Orders are log2 ratios of consecutive
    errors and withheld once errors sit at the roundoff floor.
    """
    from .solver import solve_causal, solve_global  # avoid import cycle
    from .assembly import assemble_global

    params = params if params is not None else FluxParams()
    rows = []
    prev_l2 = prev_dg = None
    for lvl in range(levels):
        mesh = mesh_factory(lvl)
        data = make_data(exact, mesh.a, mesh.b, theta=theta)
        if solver == "causal":
            sol = solve_causal(mesh, p, params, data)
        else:
            sol = solve_global(assemble_global(mesh, p, params, data))
        l2 = l2q_error(sol, exact)
        dg = dg_norm(DiffField(exact, sol), mesh, params).dg
        h = max(e.h for e in mesh.elements)
        rows.append(ConvRow(h, mesh.n_elements * (2 * p + 2), l2, dg,
                            _order(prev_l2, l2, ConvergenceTable.FLOOR),
                            _order(prev_dg, dg, ConvergenceTable.FLOOR)))
        prev_l2, prev_dg = l2, dg
    return ConvergenceTable(rows)
