"""Interface energies: exact conservation against discrete dissipation.

The energy E(Sigma) = int (w tau n_x + (w^2/c^2 + tau^2) n_t / 2) on a
space-like interface is conserved by the exact solution when no energy
leaves through the boundary, while the discrete solution dissipates a
little energy at every jump.  The script tracks E across the flat
interfaces of a slab mesh for a homogeneous-Neumann standing wave and
for a Robin-absorbed pulse.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from trefftzwave import (ExactField, FaceKind, FluxParams, ProblemData,
                         assemble_global, build_slab_mesh, dissipation_report,
                         energy, make_data, solve_global, standing)
from trefftzwave.analysis import interior_interfaces

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)
params = FluxParams()

# --- standing wave between homogeneous Neumann walls: energy is conserved
exact = standing(k=np.pi)
mesh = build_slab_mesh(np.linspace(0, 1, 9), np.linspace(0, 1, 13),
                       bc=("N", "N"))
fld = ExactField(exact)
e0 = energy(fld, mesh.faces_of(FaceKind.INITIAL), mesh)
drift = max(abs(energy(fld, chain, mesh) - e0)
            for _, chain in interior_interfaces(mesh))
print(f"standing wave, Neumann walls: E(0) = {e0:.8f}, "
      f"max |E(t) - E(0)| over interfaces = {drift:.2e}  (conserved)")

data = make_data(exact, mesh.a, mesh.b)
sol = solve_global(assemble_global(mesh, 2, params, data))
rep = dissipation_report(sol, data)
print(f"discrete solve (p=2): E(0) = {rep.e_initial:.8f}, "
      f"E(T) = {rep.e_final:.8f}  (jump dissipation only)")

# --- Gaussian pulse against absorbing Robin walls: energy drains away
pulse = ProblemData(v0=lambda x: np.exp(-80 * (np.asarray(x) - 0.5) ** 2))
mesh_r = build_slab_mesh(np.linspace(0, 1, 17), np.linspace(0, 2, 33),
                         bc=("R", "R"))
sol_r = solve_global(assemble_global(mesh_r, 2, params, pulse))
rep_r = dissipation_report(sol_r, pulse)
print(f"\nGaussian pulse, Robin walls: E(0) = {rep_r.e_initial:.6f}, "
      f"E(T) = {rep_r.e_final:.6f}, dissipative = {rep_r.dissipative}")

times = [0.0] + [t for t, _ in rep_r.interior] + [mesh_r.T]
energies = [rep_r.e_initial] + [e for _, e in rep_r.interior] + [rep_r.e_final]
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(times, energies, "o-", lw=1.5)
ax.set_xlabel("t")
ax.set_ylabel("E(t)")
ax.set_title("discrete energy of a pulse leaving through Robin walls")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "energy_decay.png"), dpi=130)
print(f"wrote {OUT}/energy_decay.png")
