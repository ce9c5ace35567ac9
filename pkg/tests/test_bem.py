import numpy as np
import pytest

from uvctl import bem
from uvctl.ellipsoid import EllipsoidGeometry, phi_boundary, surface_grid
from uvctl.errors import CompatibilityError, GeometryError

SPHERE = EllipsoidGeometry(1.0, 1.0, 1.0)
GEOM = EllipsoidGeometry(1.2, 1.0, 0.8)
SPHERE_MASS = 2.0 * np.pi / 3.0


def spindle_profile():
    return bem.RevolutionProfile(
        f=lambda x: 0.5 * (1.0 - np.asarray(x) ** 2),
        fprime=lambda x: -np.asarray(x),
        a=-1.0, b=1.0)


def added_mass_axis(mesh, axis):
    op = bem.influence_operator(mesh)
    sol = bem.solve_neumann(mesh, op.node_normals[:, axis])
    return -float(np.dot(op.node_weights * op.node_normals[:, axis], sol.boundary_trace))


def brute_triangle_influence(tri, x, nhat, m, k=90):
    """Midpoint-rule oracle for the exact flat-triangle formulas."""
    pot = 0.0
    grad = np.zeros(3)
    a2 = np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0]))
    for i in range(k):
        for j in range(k - i):
            for up in (True, False):
                if not up and j >= k - i - 1:
                    continue
                bar = (np.array([i + 1 / 3, j + 1 / 3]) if up
                       else np.array([i + 2 / 3, j + 2 / 3])) / k
                y = tri[0] + (tri[1] - tri[0]) * bar[0] + (tri[2] - tri[0]) * bar[1]
                w = a2 / (2 * k * k)
                d = x - y
                r = np.linalg.norm(d)
                pot += w / r
                grad += -w * d / r ** 3
    return pot / (4 * np.pi), np.dot(m, grad) / (4 * np.pi)


class TestMeshes:
    def test_icosphere_counts_and_area(self):
        mesh = bem.mesh_hull(SPHERE, refinement=3)
        assert mesh.n_panels == 1280
        assert mesh.total_area == pytest.approx(4.0 * np.pi, rel=1e-2)

    def test_outward_normals_star_shaped(self):
        for shape in (SPHERE, GEOM, spindle_profile()):
            mesh = bem.mesh_hull(shape, refinement=2)
            assert np.all((mesh.centroids * mesh.normals).sum(axis=1) > 0.0)

    def test_closure_identity(self):
        mesh = bem.mesh_hull(GEOM, refinement=2)
        defect = np.linalg.norm((mesh.areas[:, None] * mesh.normals).sum(axis=0))
        assert defect <= 1e-6 * mesh.total_area

    def test_ellipsoid_area_cross_module(self):
        mesh = bem.mesh_hull(GEOM, refinement=3)
        grid = surface_grid(GEOM, 48, 96)
        assert mesh.total_area == pytest.approx(grid.area, rel=1e-2)

    def test_refinement_doubles_panels(self):
        counts = [bem.mesh_hull(spindle_profile(), refinement=r).n_panels
                  for r in (1, 2, 3)]
        assert counts[1] == pytest.approx(2 * counts[0], rel=0.2)
        assert counts[2] == pytest.approx(2 * counts[1], rel=0.2)

    def test_open_profile_rejected(self):
        with pytest.raises(GeometryError):
            bem.RevolutionProfile(f=lambda x: 1.0 + 0 * np.asarray(x),
                                  fprime=lambda x: 0 * np.asarray(x), a=-1.0, b=1.0)

    def test_revolution_grid_axial_moment(self):
        grid = bem.revolution_grid(spindle_profile(), 48, 32)
        assert np.abs(grid.moments[:, 0]).max() <= 1e-10
        # exact closure from the high-order quadrature
        assert np.linalg.norm(grid.integrate(grid.normals)) <= 1e-8 * grid.area

    def test_sphere_grid_all_moments_vanish(self):
        grid = surface_grid(SPHERE, 16, 32)
        assert np.abs(grid.moments).max() <= 1e-10


class TestExactInfluence:
    def test_against_brute_force(self):
        rng = np.random.default_rng(2)
        tri = rng.standard_normal((3, 3))
        nh = np.cross(tri[1] - tri[0], tri[2] - tri[0])
        nh /= np.linalg.norm(nh)
        for x in (rng.standard_normal(3) * 2.0,
                  tri.mean(axis=0) + 0.05 * nh,
                  tri.mean(axis=0) + np.array([1.5, 0.0, 0.0])):
            m = rng.standard_normal(3)
            m /= np.linalg.norm(m)
            pot, flux = bem._exact_panel_influence(
                tri[None], np.asarray(x)[None], nh[None], m[None])
            pot_ref, flux_ref = brute_triangle_influence(tri, x, nh, m)
            assert pot[0] == pytest.approx(pot_ref, rel=2e-3)
            assert flux[0] == pytest.approx(flux_ref, rel=5e-3, abs=1e-6)


class TestNeumann:
    def test_zero_data_zero_solution(self):
        mesh = bem.mesh_hull(SPHERE, refinement=1)
        sol = bem.solve_neumann(mesh, np.zeros(mesh.n_panels))
        assert np.all(sol.boundary_trace == 0.0)
        assert np.all(sol.surface_gradient == 0.0)

    def test_sphere_trace_dipole(self):
        mesh = bem.mesh_hull(SPHERE, refinement=3)
        op = bem.influence_operator(mesh)
        sol = bem.solve_neumann(mesh, op.node_normals[:, 0])
        expected = -op.nodes[:, 0] / 2.0
        err = np.abs(sol.boundary_trace - expected).max()
        assert err <= 0.02 * np.abs(expected).max()

    def test_sphere_added_mass_convergence(self):
        errs = []
        for r in (2, 3):
            mesh = bem.mesh_hull(SPHERE, refinement=r)
            errs.append(abs(added_mass_axis(mesh, 0) - SPHERE_MASS) / SPHERE_MASS)
        assert errs[-1] <= 0.03
        assert errs[1] <= 0.5 * errs[0]

    def test_ellipsoid_trace_vs_analytic(self):
        mesh = bem.mesh_hull(GEOM, refinement=3)
        op = bem.influence_operator(mesh)
        for i in range(3):
            sol = bem.solve_neumann(mesh, op.node_normals[:, i])
            exact = phi_boundary(GEOM, i, op.nodes)
            num = np.sqrt(np.dot(op.node_weights, (sol.boundary_trace - exact) ** 2))
            den = np.sqrt(np.dot(op.node_weights, exact ** 2))
            assert num / den <= 0.03

    def test_incompatible_data_rejected(self):
        mesh = bem.mesh_hull(SPHERE, refinement=1)
        with pytest.raises(CompatibilityError):
            bem.solve_neumann(mesh, np.ones(mesh.n_panels))

    def test_flux_residual_small(self):
        mesh = bem.mesh_hull(GEOM, refinement=2)
        op = bem.influence_operator(mesh)
        sol = bem.solve_neumann(mesh, op.node_normals[:, 1])
        assert sol.flux_residual() <= 1e-10

    def test_gradient_reconstruction_sphere(self):
        # exact gradient of the dipole trace: tangential part of -y/2 field
        mesh = bem.mesh_hull(SPHERE, refinement=3)
        op = bem.influence_operator(mesh)
        sol = bem.solve_neumann(mesh, op.node_normals[:, 0])
        y = op.nodes
        n = op.node_normals
        exact = -0.5 * (np.eye(3)[0] - y * y[:, [0]]) + n * n[:, [0]]
        err = np.linalg.norm(sol.surface_gradient - exact, axis=1).max()
        assert err <= 0.08

    def test_energy_positive(self):
        mesh = bem.mesh_hull(GEOM, refinement=2)
        op = bem.influence_operator(mesh)
        for i in range(3):
            sol = bem.solve_neumann(mesh, op.node_normals[:, i])
            energy = -float(np.dot(op.node_weights * sol.neumann_data,
                                   sol.boundary_trace))
            assert energy > 0.0


class TestParityAndDeterminism:
    def _mirror_index(self, nodes, p):
        mirrored = nodes.copy()
        mirrored[:, p] *= -1.0
        lookup = {tuple(v): i for i, v in enumerate(nodes)}
        idx = np.array([lookup[tuple(v)] for v in mirrored])
        return idx

    def test_parity_transport(self):
        mesh = bem.mesh_hull(GEOM, refinement=2)
        op = bem.influence_operator(mesh)
        idx = self._mirror_index(op.nodes, 1)
        data = op.node_normals[:, 1]            # odd under the y2 reflection
        sol = bem.solve_neumann(mesh, data)
        asym = np.abs(sol.boundary_trace[idx] + sol.boundary_trace).max()
        assert asym <= 1e-9 * np.abs(sol.boundary_trace).max()

    def test_bitwise_reproducible(self):
        mesh1 = bem.mesh_hull(GEOM, refinement=1)
        mesh2 = bem.mesh_hull(GEOM, refinement=1)
        op1 = bem.InfluenceOperator(mesh1)
        op2 = bem.InfluenceOperator(mesh2)
        assert np.array_equal(op1.flux_matrix, op2.flux_matrix)
        assert np.array_equal(op1.potential_matrix, op2.potential_matrix)


class TestOffFormat:
    def test_round_trip(self, tmp_path):
        mesh = bem.mesh_hull(SPHERE, refinement=1)
        path = tmp_path / "hull.off"
        bem.write_off(mesh, path)
        back = bem.read_off(path)
        assert np.array_equal(back.vertices, mesh.vertices)
        assert np.array_equal(back.triangles, mesh.triangles)
