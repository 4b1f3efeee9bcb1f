import numpy as np
import pytest

from trefftzwave.errors import (DegenerateFace, HasTimeLikeFaces,
                                InvalidPartition, NonTerminating,
                                UnclassifiableFace)
from trefftzwave.mesh import (FaceKind, Mesh, build_slab_mesh, build_tent_mesh,
                              causal_order, classify_face,
                              count_interface_layers, interface_layers,
                              longest_face_chain, mesh_from_polygons,
                              validate_mesh)


def count_kinds(mesh):
    out = {}
    for f in mesh.faces:
        out[f.kind] = out.get(f.kind, 0) + 1
    return out


# ---------------------------------------------------------------- classify

def test_flat_face_is_spacelike_gamma_zero():
    kind, normal, gamma = classify_face([0.0, 0.5], [1.0, 0.5], 1.0)
    assert kind is FaceKind.SPACELIKE
    assert np.allclose(normal, [0.0, 1.0])
    assert gamma == 0.0


def test_vertical_face_is_timelike():
    kind, normal, gamma = classify_face([0.3, 0.0], [0.3, 1.0], 1.0)
    assert kind is FaceKind.TIMELIKE
    assert normal[1] == 0.0


def test_half_slope_face_gamma():
    # dt/dx = 1/2 and c = 1: normal ~ (-1/2, 1), gamma = c|n_x|/n_t = 1/2
    kind, normal, gamma = classify_face([0.0, 0.0], [2.0, 1.0], 1.0)
    assert kind is FaceKind.SPACELIKE
    assert abs(gamma - 0.5) <= 1e-15


def test_characteristic_face_unclassifiable():
    with pytest.raises(UnclassifiableFace):
        classify_face([0.0, 0.0], [1.0, 1.0], 1.0)
    with pytest.raises(UnclassifiableFace):
        classify_face([0.0, 0.0], [0.5, 1.0], 1.0)  # super-characteristic


def test_degenerate_face():
    with pytest.raises(DegenerateFace):
        classify_face([0.2, 0.2], [0.2, 0.2], 1.0)


def test_classification_uses_larger_speed():
    # slope 1/2 is space-like for c=1 but characteristic for c=2
    with pytest.raises(UnclassifiableFace):
        classify_face([0.0, 0.0], [2.0, 1.0], (1.0, 2.0))


def test_classify_invariant_under_swap_and_translation():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p0 = rng.uniform(-1, 1, 2)
        d = rng.uniform(0.2, 1.0)
        slope = rng.uniform(-2.5, 2.5)
        p1 = p0 + np.array([d, d * slope]) if abs(slope) < 0.95 else \
            p0 + np.array([d * slope / 2.5, d])
        c = rng.uniform(0.5, 1.0)
        try:
            ref = classify_face(p0, p1, c)
        except UnclassifiableFace:
            continue
        swapped = classify_face(p1, p0, c)
        shift = rng.uniform(-3, 3, 2)
        moved = classify_face(p0 + shift, p1 + shift, c)
        for other in (swapped, moved):
            assert other[0] is ref[0]
            assert np.allclose(other[1], ref[1], atol=1e-12)
            assert abs(other[2] - ref[2]) <= 1e-12


# ---------------------------------------------------------------- slab

def test_slab_4x4_counts():
    mesh = build_slab_mesh(np.linspace(0, 1, 5), np.linspace(0, 1, 5))
    kinds = count_kinds(mesh)
    assert mesh.n_elements == 16
    assert kinds[FaceKind.SPACELIKE] == 12
    assert kinds[FaceKind.TIMELIKE] == 12


def test_slab_1x1_counts():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("D", "R"))
    kinds = count_kinds(mesh)
    assert mesh.n_elements == 1
    assert FaceKind.SPACELIKE not in kinds and FaceKind.TIMELIKE not in kinds
    assert kinds[FaceKind.INITIAL] == 1 and kinds[FaceKind.FINAL] == 1
    assert kinds[FaceKind.DIRICHLET] == 1 and kinds[FaceKind.ROBIN] == 1


def test_slab_two_speed_columns():
    mesh = build_slab_mesh([0.0, 0.5, 1.0], [0.0, 0.5, 1.0], speeds=[1.0, 2.0])
    shared = [f for f in mesh.faces if f.kind is FaceKind.TIMELIKE]
    assert len(shared) == 2
    for f in shared:
        cs = sorted((mesh.elements[f.elem_minus].c, mesh.elements[f.elem_plus].c))
        assert cs == [1.0, 2.0]
    assert validate_mesh(mesh).ok


def test_slab_boundary_segments_split_in_time():
    mesh = build_slab_mesh(
        np.linspace(0, 1, 3), np.linspace(0, 1, 5),
        bc={"left": [(0.0, 0.5, "D"), (0.5, 1.0, "R")], "right": "N"},
    )
    left = sorted((f.midpoint[1], f.kind) for f in mesh.faces
                  if f.kind in (FaceKind.DIRICHLET, FaceKind.ROBIN))
    assert [k for _, k in left] == [FaceKind.DIRICHLET, FaceKind.DIRICHLET,
                                    FaceKind.ROBIN, FaceKind.ROBIN]
    assert len(mesh.faces_of(FaceKind.NEUMANN)) == 4


def test_slab_invalid_partition():
    with pytest.raises(InvalidPartition):
        build_slab_mesh([0.0, 0.5, 0.5, 1.0], [0.0, 1.0])
    with pytest.raises(InvalidPartition):
        build_slab_mesh([0.0, 1.0], [0.5, 1.0])  # must start at t=0
    with pytest.raises(InvalidPartition):
        build_slab_mesh([0.0, 1.0], [0.0, 1.0], speeds=[-1.0])
    with pytest.raises(InvalidPartition):
        build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("D", "X"))


def test_lateral_normals_point_outward():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0], bc=("D", "D"))
    for f in mesh.faces_of(FaceKind.DIRICHLET):
        sign = -1.0 if abs(f.midpoint[0]) < 0.5 else 1.0
        assert f.normal[0] == sign and f.normal[1] == 0.0


# ---------------------------------------------------------------- tent

def test_tent_all_faces_spacelike_with_slope_bound():
    zeta = 0.5
    mesh = build_tent_mesh(np.linspace(0, 1, 3), c=1.0, zeta=zeta, T=2.0)
    assert len(mesh.faces_of(FaceKind.TIMELIKE)) == 0
    for f in mesh.faces_of(FaceKind.SPACELIKE):
        assert f.gamma <= zeta + 1e-12
    assert validate_mesh(mesh).ok


def test_tent_covers_domain_and_reaches_final_time():
    mesh = build_tent_mesh(np.linspace(0, 2, 6), c=2.0, zeta=0.7, T=0.9)
    assert validate_mesh(mesh).ok
    total = sum(e.area for e in mesh.elements)
    assert abs(total - 2.0 * 0.9) <= 1e-12
    final_len = sum(f.length for f in mesh.faces_of(FaceKind.FINAL))
    assert abs(final_len - 2.0) <= 1e-12


def test_tent_single_cell_postconditions():
    # with a single spatial cell the advancing front alternates between the
    # two boundary nodes; the postconditions still pin the mesh down
    zeta = 0.5
    mesh = build_tent_mesh([0.0, 1.0], c=1.0, zeta=zeta, T=1.0)
    assert len(mesh.faces_of(FaceKind.TIMELIKE)) == 0
    assert all(f.gamma <= zeta + 1e-12 for f in mesh.faces_of(FaceKind.SPACELIKE))
    assert validate_mesh(mesh).ok


def test_tent_rejects_bad_parameters():
    with pytest.raises(InvalidPartition):
        build_tent_mesh([0.0, 1.0], zeta=1.2)
    with pytest.raises(InvalidPartition):
        build_tent_mesh([0.0, 0.0, 1.0], zeta=0.5)


def test_tent_iteration_guard():
    # a huge number of required pitches trips the cap before looping forever
    with pytest.raises(NonTerminating):
        build_tent_mesh([0.0, 1e-9, 1.0], c=1.0, zeta=0.5, T=1e9)


# ---------------------------------------------------------------- ordering

def test_causal_order_column_of_slabs():
    mesh = build_slab_mesh([0.0, 1.0], np.linspace(0, 1, 6))
    order, layers = causal_order(mesh)
    assert order == [0, 1, 2, 3, 4]
    assert layers.tolist() == [0, 1, 2, 3, 4]


def test_causal_order_respects_every_spacelike_face():
    mesh = build_tent_mesh(np.linspace(0, 1, 6), zeta=0.6, T=1.0)
    order, layers = causal_order(mesh)
    pos = {e: i for i, e in enumerate(order)}
    for f in mesh.faces_of(FaceKind.SPACELIKE):
        assert pos[f.elem_minus] < pos[f.elem_plus]
        assert layers[f.elem_minus] < layers[f.elem_plus]


def test_causal_order_rejects_timelike():
    mesh = build_slab_mesh([0.0, 0.5, 1.0], [0.0, 1.0])
    with pytest.raises(HasTimeLikeFaces):
        causal_order(mesh)


# ------------------------------------------------------ interface layers

def brute_longest_chain(mesh):
    """Independent oracle: longest strictly-stacked chain by recursion."""
    faces = mesh.faces_of(FaceKind.SPACELIKE)

    def t_at(f, x):
        (x0, t0), (x1, t1) = f.p0, f.p1
        return 0.5 * (t0 + t1) if abs(x1 - x0) < 1e-13 else \
            t0 + (t1 - t0) * (x - x0) / (x1 - x0)

    def above(f, g):
        lo = max(min(f.p0[0], f.p1[0]), min(g.p0[0], g.p1[0]))
        hi = min(max(f.p0[0], f.p1[0]), max(g.p0[0], g.p1[0]))
        if hi - lo <= 1e-12:
            return False
        xm = 0.5 * (lo + hi)
        return t_at(g, xm) > t_at(f, xm)

    def chain(f):
        return 1 + max((chain(g) for g in faces if above(f, g)), default=0)

    return max((chain(f) for f in faces), default=0)


@pytest.mark.parametrize("nt", [1, 2, 4, 7])
def test_layer_count_on_slabs(nt):
    mesh = build_slab_mesh([0.0, 0.4, 1.0], np.linspace(0, 1, nt + 1))
    assert count_interface_layers(mesh) == nt
    assert longest_face_chain(mesh) == nt - 1


def test_layer_count_single_element():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 1.0])
    assert count_interface_layers(mesh) == 1


def test_layer_count_tent_vs_bruteforce():
    mesh = build_tent_mesh(np.linspace(0, 1, 5), zeta=0.5, T=0.8)
    oracle = brute_longest_chain(mesh)
    assert longest_face_chain(mesh) == oracle
    assert count_interface_layers(mesh) == oracle + 1
    layers = interface_layers(mesh)
    assert sum(len(l) for l in layers) == len(mesh.faces_of(FaceKind.SPACELIKE))


# ---------------------------------------------------------------- validate

def test_validate_clean_meshes():
    assert validate_mesh(build_slab_mesh(np.linspace(0, 1, 4),
                                         np.linspace(0, 1, 3))).ok
    assert validate_mesh(build_tent_mesh(np.linspace(0, 1, 4))).ok


def test_validate_reports_corrupted_normal():
    mesh = build_slab_mesh([0.0, 1.0], [0.0, 0.5, 1.0])
    f = mesh.faces_of(FaceKind.SPACELIKE)[0]
    f.normal = np.array([0.0, 1.1])
    report = validate_mesh(mesh)
    assert not report.ok
    assert any("not unit" in v for v in report.violations)


def test_validate_reports_clockwise_element():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    mesh = mesh_from_polygons(0.0, 1.0, 1.0, verts, [(0, 3, 2, 1)], [1.0],
                              build_slab_mesh([0, 1.0], [0, 1.0]).boundary)
    report = validate_mesh(mesh)
    assert any("counterclockwise" in v for v in report.violations)


def test_validate_reports_gamma_drift():
    mesh = build_tent_mesh(np.linspace(0, 1, 3), zeta=0.5, T=0.5)
    f = mesh.faces_of(FaceKind.SPACELIKE)[-1]
    f.gamma += 1e-3
    assert any("gamma" in v for v in validate_mesh(mesh).violations)


# ---------------------------------------------------------------- file I/O

def test_mesh_roundtrip_slab(tmp_path):
    mesh = build_slab_mesh(np.linspace(0, 1, 4), np.linspace(0, 1, 3),
                           speeds=[1.0, 2.0, 1.5],
                           bc={"left": "D", "right": [(0.0, 0.4, "N"),
                                                      (0.4, 1.0, "R")]})
    path = tmp_path / "mesh.json"
    mesh.save(path)
    back = Mesh.load(path)
    assert back.n_elements == mesh.n_elements
    assert np.allclose(back.vertices, mesh.vertices)
    assert count_kinds(back) == count_kinds(mesh)
    assert [e.c for e in back.elements] == [e.c for e in mesh.elements]
    assert validate_mesh(back).ok


def test_mesh_roundtrip_tent(tmp_path):
    mesh = build_tent_mesh(np.linspace(0, 1, 4), zeta=0.6, T=0.7)
    path = tmp_path / "tent.json"
    mesh.save(path)
    back = Mesh.load(path)
    assert count_kinds(back) == count_kinds(mesh)
    ga = sorted(f.gamma for f in mesh.faces_of(FaceKind.SPACELIKE))
    gb = sorted(f.gamma for f in back.faces_of(FaceKind.SPACELIKE))
    assert np.allclose(ga, gb, atol=1e-14)


def test_mesh_rejects_unknown_version(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "spacetime-mesh", "version": 99}')
    with pytest.raises(InvalidPartition):
        Mesh.load(path)


def test_locate():
    mesh = build_slab_mesh(np.linspace(0, 1, 3), np.linspace(0, 1, 3))
    assert mesh.locate(0.1, 0.1) == 0
    assert mesh.locate(0.9, 0.9) == 3
    with pytest.raises(ValueError):
        mesh.locate(2.0, 0.5)
