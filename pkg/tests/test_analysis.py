import numpy as np
import pytest

from trefftzwave import analysis
from trefftzwave.analysis import (DiffField, ExactField, continuity_constant,
                                  convergence_study, dg_norm, dg_plus_norm,
                                  dissipation_report, energy, energy_bounds,
                                  l2q_error, l2q_norm, stability_constant,
                                  theorem_stability_rhs)
from trefftzwave.assembly import FluxParams, ProblemData, assemble_global
from trefftzwave.basis import build_basis
from trefftzwave.errors import AssumptionViolated, NotSpaceLike
from trefftzwave.mesh import FaceKind, build_slab_mesh, build_tent_mesh
from trefftzwave.solutions import (combine, make_data, poly_wave, standing,
                                   traveling_sine)
from trefftzwave.solver import DiscreteSolution, interpolate, solve_causal, \
    solve_global

PARAMS = FluxParams()


def random_field(mesh, p, rng):
    bases = [build_basis(e, p) for e in mesh.elements]
    return DiscreteSolution(mesh, p, rng.standard_normal((mesh.n_elements,
                                                          2 * p + 2)), bases)


def piecewise_constant_w(mesh, values):
    """p=0 field with w = values[e], tau = 0 (c = 1 elements)."""
    bases = [build_basis(e, 0) for e in mesh.elements]
    coeffs = np.array([[0.5 * v, 0.5 * v] for v in values])
    return DiscreteSolution(mesh, 0, coeffs, bases)


# ------------------------------------------------------------------ norms

def test_unit_jump_on_flat_face_hand_value():
    # single flat space-like face, w jumps by 1, c=1, gamma=0, n_t=1:
    # space term = 0.5 * measure
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 0.5, 1.0], bc=("D", "D"))
    fld = piecewise_constant_w(mesh, [1.0, 0.0])
    rep = dg_norm(fld, mesh, PARAMS)
    assert abs(rep.terms["space_jump_w"] - 0.5) <= 1e-14
    assert rep.terms["space_jump_tau"] == 0.0


def test_smooth_exact_field_has_no_jump_terms():
    mesh = build_slab_mesh(np.linspace(0, 1, 4), np.linspace(0, 1, 4),
                           bc=("R", "R"))
    rep = dg_norm(ExactField(traveling_sine(k=2.0)), mesh, PARAMS)
    assert rep.terms["space_jump_w"] <= 1e-24
    assert rep.terms["space_jump_tau"] <= 1e-24
    assert rep.terms["time_jump_w"] <= 1e-24
    assert rep.terms["time_jump_tau"] <= 1e-24


def test_zero_field_norm_zero_and_plus_dominates():
    mesh = build_tent_mesh(np.linspace(0, 1, 4), zeta=0.5, T=0.5)
    zero = piecewise_constant_w(mesh, np.zeros(mesh.n_elements))
    rep = dg_norm(zero, mesh, PARAMS)
    assert rep.dg == 0.0 and rep.dg_plus == 0.0
    rng = np.random.default_rng(5)
    for p in (0, 2):
        fld = random_field(mesh, p, rng)
        rep = dg_plus_norm(fld, mesh, PARAMS)
        assert rep.dg_plus >= rep.dg
        assert all(v >= 0.0 for v in rep.terms.values())


def test_coercivity_sampled():
    rng = np.random.default_rng(11)
    mesh = build_tent_mesh(np.linspace(0, 1, 5), zeta=0.5, T=0.7)
    A = assemble_global(mesh, 2, PARAMS).matrix
    for _ in range(25):
        u = random_field(mesh, 2, rng)
        quad = float(u.flat() @ (A @ u.flat()))
        assert quad >= (1 - 1e-8) * dg_norm(u, mesh, PARAMS).dg ** 2


def test_continuity_sampled():
    rng = np.random.default_rng(12)
    mesh = build_slab_mesh(np.linspace(0, 1, 4), np.linspace(0, 1, 3),
                           bc=("D", "N"))
    A = assemble_global(mesh, 1, PARAMS).matrix
    cc = continuity_constant(PARAMS, mesh)
    assert cc == 2.0  # no Robin faces
    for _ in range(25):
        u, w = random_field(mesh, 1, rng), random_field(mesh, 1, rng)
        lhs = abs(float(u.flat() @ (A @ w.flat())))
        rhs = dg_plus_norm(u, mesh, PARAMS).dg_plus * dg_norm(w, mesh, PARAMS).dg
        assert lhs <= cc * rhs * (1 + 1e-12)


def test_coercivity_with_piecewise_wave_speed():
    # c jumps across the time-like faces; unit coercivity must survive
    rng = np.random.default_rng(14)
    mesh = build_slab_mesh(np.linspace(0, 1, 4), np.linspace(0, 1, 4),
                           speeds=[1.0, 2.0, 0.5], bc=("R", "D"))
    for p in (0, 2):
        A = assemble_global(mesh, p, PARAMS).matrix
        for _ in range(15):
            u = random_field(mesh, p, rng)
            quad = float(u.flat() @ (A @ u.flat()))
            assert quad >= (1 - 1e-8) * dg_norm(u, mesh, PARAMS).dg ** 2


def test_gamma_weight_toggle():
    # dropping the (1-gamma) factors changes values on sloped meshes and
    # nothing at all on flat ones; unit coercivity is guaranteed for the
    # weighted norm, and for the dropped norm only up to (1 - gamma_max)
    rng = np.random.default_rng(13)
    tent = build_tent_mesh(np.linspace(0, 1, 5), zeta=0.5, T=0.7)
    slab = build_slab_mesh(np.linspace(0, 1, 3), np.linspace(0, 1, 3))
    u = random_field(tent, 1, rng)
    wt = dg_norm(u, tent, PARAMS, gamma_weights=True)
    dr = dg_norm(u, tent, PARAMS, gamma_weights=False)
    assert dr.dg > wt.dg  # (1-gamma) < 1 on sloped faces
    v = random_field(slab, 1, rng)
    assert dg_norm(v, slab, PARAMS, gamma_weights=False).dg == \
        dg_norm(v, slab, PARAMS, gamma_weights=True).dg
    A = assemble_global(tent, 1, PARAMS).matrix
    gmax = max(f.gamma for f in tent.faces_of(FaceKind.SPACELIKE))
    for _ in range(10):
        u = random_field(tent, 1, rng)
        quad = float(u.flat() @ (A @ u.flat()))
        assert quad >= (1 - 1e-8) * dg_norm(u, tent, PARAMS).dg ** 2
        assert quad >= (1 - gmax) * (1 - 1e-8) * \
            dg_norm(u, tent, PARAMS, gamma_weights=False).dg ** 2


# ----------------------------------------------------------------- energy

def test_energy_of_traveling_wave_is_pi():
    # v = sigma = -cos(x - t) on (0, 2pi): E = int cos^2 = pi on any flat cut
    mesh = build_slab_mesh(np.linspace(0, 2 * np.pi, 5), np.linspace(0, 1, 3),
                           bc=("R", "R"))
    fld = ExactField(traveling_sine(k=1.0))
    for faces in (mesh.faces_of(FaceKind.INITIAL), mesh.faces_of(FaceKind.FINAL)):
        assert abs(energy(fld, faces, mesh) - np.pi) <= 1e-10
    for _, chain in analysis.interior_interfaces(mesh):
        assert abs(energy(fld, chain, mesh) - np.pi) <= 1e-10


def test_energy_zero_field():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0])
    zero = piecewise_constant_w(mesh, [0.0])
    assert energy(zero, mesh.faces_of(FaceKind.INITIAL), mesh) == 0.0


def test_energy_bounds_on_sloped_interface():
    mesh = build_tent_mesh(np.linspace(0, 1, 5), zeta=0.6, T=0.8)
    rng = np.random.default_rng(21)
    fld = random_field(mesh, 2, rng)
    chains = analysis.interior_interfaces(mesh)
    assert chains, "tent mesh should expose at least one full-width interface"
    for _, faces in chains:
        lo, hi = energy_bounds(fld, faces, mesh)
        e = energy(fld, faces, mesh)
        assert lo - 1e-12 <= e <= hi + 1e-12


def test_energy_rejects_timelike_interface():
    mesh = build_slab_mesh([0.0, 0.5, 1.0], [0.0, 1.0])
    fld = piecewise_constant_w(mesh, [0.0, 0.0])
    with pytest.raises(NotSpaceLike):
        energy(fld, mesh.faces_of(FaceKind.TIMELIKE), mesh)


def test_dissipation_homogeneous_data():
    mesh = build_slab_mesh(np.linspace(0, 1, 5), np.linspace(0, 1, 5),
                           bc=("R", "R"))
    data = ProblemData(v0=lambda x: np.sin(2 * np.pi * np.asarray(x)))
    sol = solve_global(assemble_global(mesh, 2, PARAMS, data))
    rep = dissipation_report(sol, data)
    assert rep.dissipative
    assert rep.e_final <= rep.e_initial * (1 + 1e-12)
    energies = [rep.e_initial] + [e for _, e in rep.interior] + [rep.e_final]
    for a, b in zip(energies, energies[1:]):
        assert b <= a * (1 + 1e-12) + 1e-14


def test_dissipation_zero_data_zero_energy():
    mesh = build_slab_mesh(np.linspace(0, 1, 3), np.linspace(0, 1, 3),
                           bc=("R", "R"))
    sol = solve_global(assemble_global(mesh, 1, PARAMS, ProblemData()))
    rep = dissipation_report(sol, ProblemData())
    assert rep.e_initial == 0.0
    assert abs(rep.e_final) <= 1e-28


def test_energy_conserved_without_robin_faces():
    # homogeneous Neumann walls (standing wave): exact energy is constant
    mesh = build_slab_mesh(np.linspace(0, 1, 5), np.linspace(0, 1, 4),
                           bc=("N", "N"))
    exact = standing(k=np.pi)
    fld = ExactField(exact)
    e0 = energy(fld, mesh.faces_of(FaceKind.INITIAL), mesh)
    eT = energy(fld, mesh.faces_of(FaceKind.FINAL), mesh)
    assert abs(eT - e0) <= 1e-12 * abs(e0)
    for _, chain in analysis.interior_interfaces(mesh):
        assert abs(energy(fld, chain, mesh) - e0) <= 1e-12 * abs(e0)


def test_energy_identity_with_robin_flux():
    # E(S2) - E(S1) + int_Gamma v sigma n dS = 0 for the exact solution
    mesh = build_slab_mesh(np.linspace(0, 1, 4), np.linspace(0, 1, 5),
                           bc=("R", "R"))
    exact = traveling_sine(k=2.0)
    fld = ExactField(exact)
    from trefftzwave.quadrature import face_rule

    levels = [(0.0, energy(fld, mesh.faces_of(FaceKind.INITIAL), mesh))]
    for tmean, chain in analysis.interior_interfaces(mesh):
        levels.append((tmean, energy(fld, chain, mesh)))
    levels.append((mesh.T, energy(fld, mesh.faces_of(FaceKind.FINAL), mesh)))
    scale = max(abs(e) for _, e in levels)
    for (t1, e1), (t2, e2) in zip(levels, levels[1:]):
        flux = 0.0
        for f in mesh.faces_of(FaceKind.ROBIN):
            if t1 - 1e-12 <= f.midpoint[1] <= t2 + 1e-12:
                rule = face_rule(f, 21)
                x, t = rule.nodes[:, 0], rule.nodes[:, 1]
                flux += float(rule.weights @ (exact.v(x, t) * exact.sigma(x, t)
                                              * f.normal[0]))
        assert abs(e2 - e1 + flux) <= 1e-10 * scale


# ------------------------------------------------------------------ errors

def test_l2q_error_zero_for_represented_solution():
    mesh = build_slab_mesh(np.linspace(0, 1, 3), np.linspace(0, 1, 3))
    exact = combine(poly_wave(2, +1), poly_wave(1, -1), 1.0, -0.3)
    u = interpolate(mesh, 2, exact)
    assert l2q_error(u, exact) <= 1e-9


def test_l2q_error_of_zero_solution_is_field_norm():
    # ||(c^-1 v, sigma)||_L2(Q)^2 = 2 int int cos^2(x-t) = 2 pi T for k=1
    mesh = build_slab_mesh(np.linspace(0, 2 * np.pi, 5), np.linspace(0, 1, 3))
    exact = traveling_sine(k=1.0)
    zero = piecewise_constant_w(mesh, np.zeros(mesh.n_elements))
    want = np.sqrt(2 * np.pi)
    assert abs(l2q_error(zero, exact, degree=24) - want) <= 1e-10 * want
    assert abs(l2q_norm(exact, mesh, degree=24) - want) <= 1e-10 * want


# --------------------------------------------------------------- constants

def test_continuity_constant_values():
    mesh_r = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("R", "R"))
    assert continuity_constant(FluxParams(), mesh_r) == 2.0
    assert continuity_constant(FluxParams(delta=0.8), mesh_r) == 4.0
    mesh_dn = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("D", "N"))
    assert continuity_constant(FluxParams(delta=0.8), mesh_dn) == 2.0


def test_stability_constant_on_causal_slabs():
    # gamma = 0, delta = 1/2, T = 1: C^2 = 2(4N + 4)
    for nt in (2, 4, 8):
        mesh = build_slab_mesh([0.0, 1.0], np.linspace(0, 1, nt + 1),
                               bc=("R", "R"))
        n, c_stab = stability_constant(mesh, PARAMS)
        assert n == nt
        assert abs(c_stab - np.sqrt(2 * (4 * nt + 4))) <= 1e-12


def test_stability_constant_single_element():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("R", "R"))
    n, c_stab = stability_constant(mesh, PARAMS)
    assert n == 1
    assert abs(c_stab - np.sqrt(16.0)) <= 1e-12


def test_stability_constant_assumptions():
    with pytest.raises(AssumptionViolated):
        stability_constant(build_slab_mesh([0.0, 1.0], [0.0, 1.0],
                                           bc=("D", "R")), PARAMS)
    with pytest.raises(AssumptionViolated):
        stability_constant(build_slab_mesh([0.0, 0.5, 1.0], [0.0, 1.0],
                                           bc=("R", "R")), PARAMS)


def test_theorem_stability_bound_holds():
    mesh = build_slab_mesh(np.linspace(0, 1, 5), np.linspace(0, 1, 5),
                           bc=("R", "R"))
    exact = traveling_sine(k=2.0)
    data = make_data(exact, 0.0, 1.0)
    sol = solve_global(assemble_global(mesh, 2, PARAMS, data))
    lhs = dg_norm(sol, mesh, PARAMS).dg
    assert lhs <= theorem_stability_rhs(mesh, data, PARAMS) * (1 + 1e-10)


def test_l2_error_bounded_by_stability_times_dg():
    mesh = build_slab_mesh([0.0, 1.0], np.linspace(0, 1, 5), bc=("R", "R"))
    exact = traveling_sine(k=2.0)
    data = make_data(exact, 0.0, 1.0)
    sol = solve_causal(mesh, 2, PARAMS, data)
    _, c_stab = stability_constant(mesh, PARAMS)
    err_l2 = l2q_error(sol, exact)
    err_dg = dg_norm(DiffField(exact, sol), mesh, PARAMS).dg
    assert err_l2 <= c_stab * err_dg * (1 + 1e-9)


# -------------------------------------------------------------- convergence

def test_convergence_study_smoke():
    exact = traveling_sine(k=2.0)

    def factory(lvl):
        n = 4 * 2**lvl
        return build_slab_mesh(np.linspace(0, 1, n + 1),
                               np.linspace(0, 1, n + 1), bc=("D", "D"))

    table = convergence_study(exact, factory, p=1, levels=3, params=PARAMS)
    errs = [r.l2q_error for r in table.rows]
    assert errs[0] > errs[1] > errs[2]
    assert table.rows[-1].order_l2 >= 1.0
    assert table.rows[0].order_l2 is None


def test_convergence_table_withholds_orders_at_floor(tmp_path):
    exact = poly_wave(1, +1)

    def factory(lvl):
        n = 2 * 2**lvl
        return build_slab_mesh(np.linspace(0, 1, n + 1),
                               np.linspace(0, 1, n + 1), bc=("D", "D"))

    table = convergence_study(exact, factory, p=1, levels=2, params=PARAMS)
    assert all(r.l2q_error <= 1e-11 for r in table.rows)
    assert table.rows[1].order_l2 is None  # at the roundoff floor
    path = tmp_path / "conv.csv"
    table.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "h,dofs,l2q_error,dg_error,order_l2,order_dg"
