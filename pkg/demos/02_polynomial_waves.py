"""Polynomial-wave bases: Trefftz fields and their tiny dimension.

Every basis field (w, tau) = (c s^k, d s^k) with s = (d(x-x_K) - c(t-t_K))/h_K
solves the first-order wave system exactly, so the discrete space needs
only 2p+2 fields per element instead of the (p+1)(p+2) of the full
vector-valued polynomial space.  The script verifies the Trefftz property
by finite differences and tabulates the dimension savings.
"""

import numpy as np

from trefftzwave import (basis_dim, build_basis, build_slab_mesh,
                         full_poly_dim, gauss_legendre, gram_matrix,
                         trefftz_residual)

mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0], speeds=2.0)
element = mesh.elements[0]

print("dimension of the local spaces (n = 1):")
print(f"{'p':>3} {'trefftz':>8} {'full':>6} {'ratio':>7}")
for p in (0, 1, 2, 3, 5, 8, 12, 20):
    d_t, d_f = basis_dim(1, p), full_poly_dim(1, p)
    print(f"{p:3d} {d_t:8d} {d_f:6d} {d_t / d_f:7.3f}")

print("\nTrefftz residual of each basis field (finite differences, p = 3):")
basis = build_basis(element, 3)
for wave in basis.waves:
    res = trefftz_residual(lambda x, t: wave.values(x, t)[0],
                           lambda x, t: wave.values(x, t)[1], element)
    print(f"  d = {wave.direction:+d}, k = {wave.degree}: residual {res:.2e}")

probe = trefftz_residual(lambda x, t: np.asarray(x) ** 2,
                         lambda x, t: np.zeros_like(np.asarray(x)), element)
print(f"non-Trefftz probe (x^2, 0): residual {probe:.2e}  <- correctly nonzero")

_, cond, rank = gram_matrix(element, basis)
print(f"\nGram matrix over the element: rank {rank} (= {len(basis)} fields), "
      f"condition {cond:.2e}")

rule = gauss_legendre(6)
print(f"\n6-point Gauss rule integrates x^10 over [-1,1]: "
      f"{rule.weights @ rule.nodes**10:.15f} (exact 2/11 = {2/11:.15f})")
