"""Solve a traveling sine wave and inspect the discrete solution.

Manufactures data from the exact solution v = -ck cos(k(x - ct)),
solves on a slab mesh with mixed Dirichlet/Neumann walls, reports the
space-time errors and the flux-weighted trace norms, and renders the
discrete v(x, t) next to the exact one.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trefftzwave import (DiffField, FluxParams, assemble_global, build_slab_mesh,
                         dg_norm, export_solution, l2q_error, l2q_norm,
                         make_data, solve_global, traveling_sine)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

exact = traveling_sine(k=2.0 * np.pi)
mesh = build_slab_mesh(np.linspace(0, 1, 17), np.linspace(0, 1, 17),
                       bc=("D", "N"))
params = FluxParams()
data = make_data(exact, mesh.a, mesh.b)

p = 2
solution = solve_global(assemble_global(mesh, p, params, data))
print(f"solved: {mesh.n_elements} elements, p = {p}, "
      f"{solution.coeffs.size} dofs, residual {solution.meta['residual']:.1e}")

err = l2q_error(solution, exact)
print(f"L2(Q) error  = {err:.3e}  (relative {err / l2q_norm(exact, mesh):.3e})")
print(f"DG error     = {dg_norm(DiffField(exact, solution), mesh, params).dg:.3e}")

export_solution(solution, os.path.join(OUT, "traveling_wave.csv"),
                os.path.join(OUT, "traveling_wave_coeffs.txt"), grid=(80, 80))

xs = np.linspace(mesh.a, mesh.b, 120)
ts = np.linspace(0, mesh.T, 120)
V = np.empty((len(ts), len(xs)))
for i, t in enumerate(ts):
    for j, x in enumerate(xs):
        V[i, j] = solution.values(x, t)[0]
XX, TT = np.meshgrid(xs, ts)
fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
im0 = axes[0].pcolormesh(XX, TT, V, shading="auto", cmap="RdBu_r")
axes[0].set_title("discrete v(x, t)")
im1 = axes[1].pcolormesh(XX, TT, exact.v(XX, TT), shading="auto", cmap="RdBu_r")
axes[1].set_title("exact v(x, t)")
for ax in axes:
    ax.set_xlabel("x")
axes[0].set_ylabel("t")
fig.colorbar(im1, ax=axes, shrink=0.85)
fig.savefig(os.path.join(OUT, "traveling_wave.png"), dpi=130)
print(f"wrote {OUT}/traveling_wave.csv, traveling_wave_coeffs.txt, "
      "traveling_wave.png")
