import numpy as np
import pytest
from hypothesis import given, strategies as st

from stagmuscl.grid import GridError, build_cartesian, dual_faces_of, opposite_face, scatter_add


def test_counts_1d():
    g = build_cartesian(1, 5)
    assert (g.n_cells, g.n_faces, g.n_dual) == (5, 6, 5)
    np.testing.assert_allclose(g.cell_volume, 0.2)
    np.testing.assert_allclose(g.face_centers[:, 0], np.linspace(0, 1, 6))


def test_counts_2d():
    g = build_cartesian(2, (3, 4), extent=(3.0, 2.0))
    assert g.n_cells == 12
    assert g.n_faces == 4 * 4 + 3 * 5
    assert g.n_dual == 4 * 12
    assert g.h == (1.0, 0.5)
    np.testing.assert_allclose(g.cell_volume, 0.5)


@pytest.mark.parametrize("dim,counts", [(1, (7,)), (2, (3, 5)), (2, (1, 1))])
def test_measures_partition_domain(dim, counts):
    g = build_cartesian(dim, counts, extent=(2.0,) * dim)
    assert g.cell_volume.sum() == pytest.approx(g.domain_measure)
    # the diamonds of all faces tile the domain once
    assert g.dual_volume.sum() == pytest.approx(g.domain_measure)
    np.testing.assert_allclose(g.half_diamond, g.cell_volume / (2 * dim))


def test_face_areas_and_axes():
    g = build_cartesian(2, (2, 3), extent=(1.0, 3.0))
    vertical = g.face_axis == 0
    np.testing.assert_allclose(g.face_area[vertical], 1.0)
    np.testing.assert_allclose(g.face_area[~vertical], 0.5)
    assert g.vface_index.shape == (3, 3)
    assert g.hface_index.shape == (2, 4)


def test_boundary_faces_and_sides():
    g = build_cartesian(2, (3, 2), boundary_tags={"x-": "dirichlet", "x+": "neumann_outflow",
                                                  "y-": "slip_wall", "y+": "symmetry"})
    assert g.boundary_faces.size == 2 * 2 + 2 * 3
    assert g.face_tag(g.side_faces("x+")[0]) == "neumann_outflow"
    assert g.face_tag(g.interior_faces[0]) is None
    np.testing.assert_allclose(g.face_centers[g.side_faces("y-"), 1], 0.0)


def test_interior_diamond_is_two_half_diamonds():
    g = build_cartesian(2, (4, 4))
    inner = g.interior_faces
    np.testing.assert_allclose(g.dual_volume[inner], 2 * g.half_diamond[0])
    np.testing.assert_allclose(g.dual_volume[g.boundary_faces], g.half_diamond[0])


def test_dual_faces_per_face():
    g = build_cartesian(2, (3, 3))
    # an interior face bounds four dual faces, a boundary face two
    assert dual_faces_of(g, g.interior_faces[0]).size == 4
    assert dual_faces_of(g, g.boundary_faces[0]).size == 2
    g1 = build_cartesian(1, 4)
    assert dual_faces_of(g1, 2).size == 2
    assert dual_faces_of(g1, 0).size == 1


def test_opposite_face_1d():
    g = build_cartesian(1, 4)
    # dual face of cell 2 pairs faces 2 and 3
    np.testing.assert_array_equal(g.dual_pair[2], [2, 3])
    assert opposite_face(g, 2, 2) == 1
    assert opposite_face(g, 2, 3) == 4
    assert opposite_face(g, 0, 0) is None
    with pytest.raises(GridError):
        opposite_face(g, 2, 0)


def test_opposite_face_2d_continues_straight():
    g = build_cartesian(2, (3, 3))
    for e in range(g.n_dual):
        for side in (0, 1):
            opp = g.dual_opposite[e, side]
            up = g.dual_pair[e, side]
            down = g.dual_pair[e, 1 - side]
            if opp < 0:
                assert g.face_side[up] >= 0
                continue
            # the opposite face is parallel to the downwind one, one cell away
            assert g.face_axis[opp] == g.face_axis[down]
            shift = g.face_centers[up] - g.face_centers[opp]
            np.testing.assert_allclose(g.face_centers[down] - g.face_centers[up], shift)


def test_arrays_are_read_only():
    g = build_cartesian(2, (2, 2))
    with pytest.raises(ValueError):
        g.cell_volume[0] = 2.0


@pytest.mark.parametrize(
    "args",
    [
        dict(dim=3, cell_counts=(2, 2, 2)),
        dict(dim=2, cell_counts=(2,)),
        dict(dim=1, cell_counts=0),
        dict(dim=1, cell_counts=3, extent=-1.0),
        dict(dim=1, cell_counts=3, boundary_tags="periodic"),
        dict(dim=1, cell_counts=3, boundary_tags={"x-": "dirichlet"}),
        dict(dim=1, cell_counts=3, boundary_tags={"x-": "dirichlet", "x+": "dirichlet", "y-": "dirichlet"}),
    ],
)
def test_invalid_grids(args):
    with pytest.raises(GridError):
        build_cartesian(**args)


@given(st.integers(1, 30), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_scatter_add_matches_add_at(n, width, seed):
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=3 * n)
    vals = rng.normal(size=(3 * n, width))
    a = np.zeros((n, width))
    b = np.zeros((n, width))
    scatter_add(a, idx, vals)
    np.add.at(b, idx, vals)
    np.testing.assert_allclose(a, b, atol=1e-12)
    c = np.zeros(n)
    scatter_add(c, idx, vals[:, 0])
    np.testing.assert_allclose(c, b[:, 0], atol=1e-12)
