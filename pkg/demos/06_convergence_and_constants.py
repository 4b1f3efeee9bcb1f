"""Convergence rates and the analysis constants C_c, N, C_stab.

Halving h on slab meshes shows the L2(Q) error dropping at order p+1;
the continuity constant C_c and the duality stability constant C_stab
are evaluated on causal Robin-only meshes, where the empirical bound
L2 error <= C_stab * DG error can be checked directly.
"""

import os

import numpy as np

from trefftzwave import (DiffField, FluxParams, build_slab_mesh,
                         continuity_constant, convergence_study, dg_norm,
                         l2q_error, make_data, solve_causal,
                         stability_constant, traveling_sine)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

exact = traveling_sine(k=2.0)
params = FluxParams()

for p in (1, 2):
    def factory(lvl):
        n = 4 * 2**lvl
        return build_slab_mesh(np.linspace(0, 1, n + 1),
                               np.linspace(0, 1, n + 1), bc=("D", "N"))

    table = convergence_study(exact, factory, p=p, levels=4, params=params)
    table.to_csv(os.path.join(OUT, f"convergence_p{p}.csv"))
    print(f"p = {p}:  (expected L2 order ~ {p + 1})")
    print(f"  {'h':>10} {'dofs':>7} {'L2(Q) error':>13} {'order':>6}")
    for r in table.rows:
        o = "-" if r.order_l2 is None else f"{r.order_l2:.2f}"
        print(f"  {r.h:10.4g} {r.dofs:7d} {r.l2q_error:13.4e} {o:>6}")

print("\nanalysis constants on causal Robin-only slab columns (T = 1):")
print(f"{'N_t':>4} {'N':>3} {'C_stab':>8} {'L2 err':>10} {'DG err':>10} "
      f"{'L2 <= C*DG':>11}")
for nt in (2, 4, 8, 16):
    mesh = build_slab_mesh([0.0, 1.0], np.linspace(0, 1, nt + 1), bc=("R", "R"))
    n_layers, c_stab = stability_constant(mesh, params)
    data = make_data(exact, mesh.a, mesh.b)
    sol = solve_causal(mesh, 2, params, data)
    l2 = l2q_error(sol, exact)
    dg = dg_norm(DiffField(exact, sol), mesh, params).dg
    print(f"{nt:4d} {n_layers:3d} {c_stab:8.3f} {l2:10.3e} {dg:10.3e} "
          f"{str(l2 <= c_stab * dg):>11}")

mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("R", "R"))
print(f"\nC_c with delta = 1/2 (minimal): "
      f"{continuity_constant(params, mesh)}")
print(f"C_c with delta = 0.8:          "
      f"{continuity_constant(FluxParams(delta=0.8), mesh)}")
