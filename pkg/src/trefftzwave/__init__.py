"""Space-time Trefftz discontinuous Galerkin solver for the first-order
acoustic wave equation in one space dimension.

The discrete fields are piecewise polynomial waves that solve the wave
system exactly inside each element, so all coupling lives on the mesh
skeleton: upwind fluxes on space-like faces, penalised centred fluxes on
time-like ones.  On tent-pitched meshes (no time-like faces) the solve
degenerates to a causal element-by-element sweep.
"""

from .analysis import (ConvergenceTable, DiffField, EnergyReport, ExactField,
                       NormReport, continuity_constant, convergence_study,
                       dg_norm, dg_plus_norm, dissipation_report, energy,
                       energy_bounds, l2q_error, l2q_norm, stability_constant,
                       theorem_stability_rhs)
from .assembly import (FaceBlocks, FluxParams, LinearSystem, ProblemData,
                       assemble_global, face_bilinear_blocks, face_rhs,
                       flux_matrix_decomposition)
from .basis import (PolyWave, TrefftzBasis, basis_dim, build_basis, eval_basis,
                    full_poly_dim, gram_matrix, trefftz_residual)
from .mesh import (BoundarySegment, Element, Face, FaceKind, Mesh,
                   build_slab_mesh, build_tent_mesh, causal_order,
                   classify_face, count_interface_layers, interface_layers,
                   longest_face_chain, mesh_from_polygons, validate_mesh)
from .quadrature import QuadRule, element_rule, face_rule, gauss_legendre
from .solutions import (ExactSolution, combine, make_data, named, poly_wave,
                        standing, traveling_sine)
from .solver import (DiscreteSolution, EquivalenceReport, export_solution,
                     interpolate, solution_equivalence, solve_causal,
                     solve_global)

__version__ = "0.1.0"
