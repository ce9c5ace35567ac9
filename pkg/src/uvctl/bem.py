"""Exterior Laplace Neumann solver on a panelized hull.

Direct boundary-integral formulation with constant-strength source panels
and collocation at panel nodes.  The exterior potential is represented by
a single layer over the hull,

    psi(x) = int_S sigma(y) / (4 pi |x - y|) dA(y),

whose gradient decays at infinity by construction.  With surface normals n
pointing out of the body (into the fluid), the fluid-side normal derivative
of a single layer jumps by -sigma/2 across the surface, so prescribing flux
data g on the hull yields a second-kind dense system for sigma.

Accuracy hinges on how panel integrals are evaluated:

* for meshes that know their smooth hull (built by ``mesh_hull``), panels
  near the collocation point are integrated exactly over "curved" panels,
  i.e. each flat triangle is split into micro-triangles whose vertices are
  projected back onto the hull, and the analytic flat-triangle influence
  formulas are summed over the micro-triangles.  Collocation nodes sit on
  the true surface with true normals, and the fluid-side jump emerges from
  the signed solid angle of the micro-panels (the node lies outside the
  inscribed micro-polyhedron).
* distant panels use one-point quadrature at the panel node;
* meshes without hull information (e.g. read from OFF files) fall back to
  flat panels, in-plane analytic self-integrals and an explicit -1/2 jump.

Surface gradients of the solution are reconstructed per panel from a
least-squares fit of the trace over vertex-neighborhood panels (tangential
part) plus the prescribed flux (normal part).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .ellipsoid import EllipsoidGeometry, SurfaceGrid
from .errors import CompatibilityError, GeometryError

_FOUR_PI = 4.0 * np.pi
_NEAR_FACTOR = 2.5
_MICRO_SPLIT = 4           # micro-triangles per edge; must not be divisible by 3
_COMPAT_TOL = 1e-8


# ---------------------------------------------------------------------------
# Hull shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RevolutionProfile:
    """Solid of revolution about the y1 axis: radius f(y1) on [a, b].

    ``f`` must be positive between the poles with f(a) = f(b) = 0;
    ``fprime`` supplies exact surface normals.
    """

    f: object
    fprime: object
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise GeometryError("profile interval is empty")
        fa, fb = float(self.f(self.a)), float(self.f(self.b))
        if abs(fa) > 1e-12 or abs(fb) > 1e-12:
            raise GeometryError("profile must close: f(a) = f(b) = 0")
        x = np.linspace(self.a, self.b, 257)[1:-1]
        vals = np.asarray(self.f(x), dtype=float)
        if np.any(vals <= 0.0):
            raise GeometryError("profile must be strictly positive between the poles")


def _hull_project(hull, pts):
    """Map points near the hull onto it; returns (points, outward normals)."""
    pts = np.asarray(pts, dtype=float)
    if isinstance(hull, EllipsoidGeometry):
        level = np.sqrt((pts ** 2 / hull.axes_sq).sum(axis=1))
        on = pts / level[:, None]
        raw = on / hull.axes_sq
        return on, raw / np.linalg.norm(raw, axis=1)[:, None]
    if isinstance(hull, RevolutionProfile):
        x = np.clip(pts[:, 0], hull.a, hull.b)
        rho = np.hypot(pts[:, 1], pts[:, 2])
        r_target = np.asarray(hull.f(x), dtype=float)
        safe_rho = np.where(rho > 0.0, rho, 1.0)
        cos_t = np.where(rho > 0.0, pts[:, 1] / safe_rho, 1.0)
        sin_t = np.where(rho > 0.0, pts[:, 2] / safe_rho, 0.0)
        on = np.stack([x, r_target * cos_t, r_target * sin_t], axis=1)
        dr = np.asarray(hull.fprime(x), dtype=float)
        metric = np.sqrt(1.0 + dr ** 2)
        normals = np.stack([-dr / metric, cos_t / metric, sin_t / metric], axis=1)
        return on, normals
    raise GeometryError(f"unsupported hull shape {type(hull).__name__}")


# ---------------------------------------------------------------------------
# Mesh container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PanelMesh:
    """Closed triangulated hull: flat panels with outward normals.

    ``hull`` optionally records the smooth surface the vertices sample;
    solvers use it for curved-panel quadrature and exact collocation.
    """

    vertices: np.ndarray   # (Nv, 3)
    triangles: np.ndarray  # (Np, 3) vertex indices
    hull: object = None
    centroids: np.ndarray = field(init=False, repr=False, compare=False)
    normals: np.ndarray = field(init=False, repr=False, compare=False)
    areas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = self.vertices[self.triangles]
        centroids = v.mean(axis=1)
        cross = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        two_area = np.linalg.norm(cross, axis=1)
        if np.any(two_area == 0.0):
            raise GeometryError("mesh contains a zero-area panel")
        normals = cross / two_area[:, None]
        areas = 0.5 * two_area
        # winding is consistent by construction; a global flip suffices
        # when the signed volume comes out negative
        volume = float((centroids * normals).sum(axis=1) @ areas) / 3.0
        if volume < 0.0:
            normals = -normals
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "areas", areas)
        self._validate()

    def _validate(self):
        total = float(self.areas.sum())
        closure = np.linalg.norm((self.areas[:, None] * self.normals).sum(axis=0))
        if closure > 1e-6 * total:
            raise GeometryError(f"mesh is not closed (closure defect {closure:.3e})")
        if self.areas.min() < 1e-10 * total / len(self.areas):
            raise GeometryError("mesh contains a degenerate panel")

    @property
    def n_panels(self):
        return len(self.triangles)

    @property
    def total_area(self):
        return float(self.areas.sum())

    @property
    def diameters(self):
        v = self.vertices[self.triangles]
        e = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 1], v[:, 0] - v[:, 2]], axis=1)
        return np.linalg.norm(e, axis=2).max(axis=1)

    def vertex_neighbors(self):
        """For each panel, indices of panels sharing at least one vertex."""
        by_vertex = {}
        for p, tri in enumerate(self.triangles):
            for vi in tri:
                by_vertex.setdefault(int(vi), []).append(p)
        neighbors = []
        for p, tri in enumerate(self.triangles):
            seen = set()
            for vi in tri:
                seen.update(by_vertex[int(vi)])
            seen.discard(p)
            neighbors.append(sorted(seen))
        return neighbors


# ---------------------------------------------------------------------------
# Mesh generation
# ---------------------------------------------------------------------------

def _icosahedron():
    g = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
        [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
        [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    return verts, faces


def _subdivide(verts, faces):
    verts = list(map(tuple, verts))
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            a, b = np.array(verts[i]), np.array(verts[j])
            m = 0.5 * (a + b)
            m /= np.linalg.norm(m)
            cache[key] = len(verts)
            verts.append(tuple(m))
        return cache[key]

    new_faces = []
    for i, j, k in faces:
        ij, jk, ki = midpoint(i, j), midpoint(j, k), midpoint(k, i)
        new_faces += [[i, ij, ki], [j, jk, ij], [k, ki, jk], [ij, jk, ki]]
    return np.array(verts), np.array(new_faces, dtype=int)


def _icosphere(refinement):
    verts, faces = _icosahedron()
    for _ in range(refinement):
        verts, faces = _subdivide(verts, faces)
    return verts, faces


def _revolution_lattice(profile, n_axial, n_azimuth):
    from .ellipsoid import _mirrored_circle_table
    cos_t, sin_t = _mirrored_circle_table(n_azimuth)
    x = np.linspace(profile.a, profile.b, n_axial + 2)
    rings = x[1:-1]
    radii = np.asarray(profile.f(rings), dtype=float)

    verts = [np.array([profile.a, 0.0, 0.0]), np.array([profile.b, 0.0, 0.0])]
    index = np.empty((n_axial, n_azimuth), dtype=int)
    for k in range(n_axial):
        for j in range(n_azimuth):
            index[k, j] = len(verts)
            verts.append(np.array([rings[k], radii[k] * cos_t[j], radii[k] * sin_t[j]]))
    faces = []
    for j in range(n_azimuth):
        jn = (j + 1) % n_azimuth
        faces.append([0, index[0, jn], index[0, j]])
        faces.append([1, index[-1, j], index[-1, jn]])
    for k in range(n_axial - 1):
        for j in range(n_azimuth):
            jn = (j + 1) % n_azimuth
            faces.append([index[k, j], index[k, jn], index[k + 1, j]])
            faces.append([index[k, jn], index[k + 1, jn], index[k + 1, j]])
    return np.array(verts), np.array(faces, dtype=int)


def mesh_hull(shape, refinement: int = 3) -> PanelMesh:
    """Panelize a hull: icosphere mapped radially onto an ellipsoid, or a
    structured axial/azimuthal lattice for a solid of revolution.

    Each refinement level doubles the panel count (the icosphere quadruples
    it every level, matching two lattice levels).
    """
    if refinement < 0:
        raise GeometryError("refinement must be nonnegative")
    if isinstance(shape, EllipsoidGeometry):
        verts, faces = _icosphere(refinement)
        inv = 1.0 / np.sqrt((verts ** 2 / shape.axes_sq).sum(axis=1))
        return PanelMesh(vertices=verts * inv[:, None], triangles=faces, hull=shape)
    if isinstance(shape, RevolutionProfile):
        n_axial = 12 << (refinement // 2)
        n_azimuth = 16 << ((refinement + 1) // 2)
        verts, faces = _revolution_lattice(shape, n_axial, n_azimuth)
        return PanelMesh(vertices=verts, triangles=faces, hull=shape)
    raise GeometryError(f"unsupported hull shape {type(shape).__name__}")


def revolution_grid(profile: RevolutionProfile, n_axial: int = 96,
                    n_azimuth: int = 64) -> SurfaceGrid:
    """Quadrature nodes exactly on a revolution surface, with exact normals.

    Gauss-Legendre stations along the axis, uniform azimuth; the axial
    moment (y x n) . e1 vanishes identically at every node.
    """
    from .ellipsoid import _mirrored_circle_table
    t, wt = np.polynomial.legendre.leggauss(n_axial)
    x = 0.5 * (profile.a + profile.b) + 0.5 * (profile.b - profile.a) * t
    wx = 0.5 * (profile.b - profile.a) * wt
    cos_t, sin_t = _mirrored_circle_table(n_azimuth)
    wphi = 2.0 * np.pi / n_azimuth

    r = np.asarray(profile.f(x), dtype=float)
    dr = np.asarray(profile.fprime(x), dtype=float)
    metric = np.sqrt(1.0 + dr ** 2)

    X = np.repeat(x, n_azimuth)
    R = np.repeat(r, n_azimuth)
    DR = np.repeat(dr, n_azimuth)
    MT = np.repeat(metric, n_azimuth)
    W = np.repeat(wx * r * metric * wphi, n_azimuth)
    C = np.tile(cos_t, n_axial)
    S = np.tile(sin_t, n_axial)

    points = np.stack([X, R * C, R * S], axis=1)
    normals = np.stack([-DR / MT, C / MT, S / MT], axis=1)
    moments = np.cross(points, normals)
    return SurfaceGrid(points=points, normals=normals, moments=moments, weights=W)


# ---------------------------------------------------------------------------
# Exact influence of flat triangles
# ---------------------------------------------------------------------------

def _exact_panel_influence(tri_verts, pts, panel_normals, colloc_normals):
    """Exact potential and flux of unit-strength flat triangles.

    For each row k, integrates the free-space kernel and its gradient over
    triangle ``tri_verts[k]`` as seen from ``pts[k]``:

        pot_k  = [sum_e d_e Q_e + h Omega] / 4 pi
        flux_k = [-sum_e m.(e_hat x n_hat) Q_e + Omega (m.n_hat)] / 4 pi

    with Q_e the edge log kernel, d_e signed in-plane edge distances, h the
    signed height above the panel plane, Omega the signed solid angle
    (van Oosterom-Strackee; negative on the side n_hat points to), and m
    the collocation direction ``colloc_normals[k]``.
    """
    nhat = panel_normals
    h = ((pts - tri_verts[:, 0]) * nhat).sum(axis=1)
    x0 = pts - h[:, None] * nhat

    pot_acc = np.zeros(len(pts))
    grad_acc = np.zeros_like(pts)
    for e in range(3):
        a = tri_verts[:, e]
        b = tri_verts[:, (e + 1) % 3]
        ab = b - a
        L = np.linalg.norm(ab, axis=1)
        ehat = ab / L[:, None]
        ra = np.linalg.norm(pts - a, axis=1)
        rb = np.linalg.norm(pts - b, axis=1)
        den = np.maximum(ra + rb - L, 1e-14 * L)
        Q = np.log((ra + rb + L) / den)
        d = (np.cross(a - x0, b - x0) * nhat).sum(axis=1) / L
        pot_acc += d * Q
        grad_acc -= np.cross(ehat, nhat) * Q[:, None]

    R = tri_verts - pts[:, None, :]
    r = np.linalg.norm(R, axis=2)
    num = (R[:, 0] * np.cross(R[:, 1], R[:, 2])).sum(axis=1)
    den = (r[:, 0] * r[:, 1] * r[:, 2]
           + (R[:, 0] * R[:, 1]).sum(axis=1) * r[:, 2]
           + (R[:, 1] * R[:, 2]).sum(axis=1) * r[:, 0]
           + (R[:, 2] * R[:, 0]).sum(axis=1) * r[:, 1])
    omega = 2.0 * np.arctan2(num, den)
    # coplanar exterior points subtend no solid angle; keep atan2 off the cut
    omega = np.where(np.abs(num) < 1e-300, 0.0, omega)

    pot = (pot_acc + h * omega) / _FOUR_PI
    flux = ((grad_acc * colloc_normals).sum(axis=1)
            + omega * (nhat * colloc_normals).sum(axis=1)) / _FOUR_PI
    return pot, flux


def _self_layer_potential(tri_verts, point, normal):
    """In-plane potential of a unit-strength flat triangle at ``point``."""
    total = 0.0
    for e in range(3):
        a = tri_verts[e]
        b = tri_verts[(e + 1) % 3]
        L = np.linalg.norm(b - a)
        ra = np.linalg.norm(point - a)
        rb = np.linalg.norm(point - b)
        den = ra + rb - L
        if den <= 0.0:
            continue
        d = np.dot(np.cross(a - point, b - point), normal) / L
        total += d * np.log((ra + rb + L) / den)
    return total / _FOUR_PI


def _micro_panels(mesh, k):
    """Split every panel into k^2 micro-triangles projected onto the hull.

    Returns (verts (Np, k^2, 3, 3), normals (Np, k^2, 3), areas (Np, k^2)).
    """
    v = mesh.vertices[mesh.triangles]    # (Np, 3, 3)
    template = []
    for i in range(k):
        for j in range(k - i):
            template.append([(i, j), (i + 1, j), (i, j + 1)])
            if j < k - i - 1:
                template.append([(i + 1, j), (i + 1, j + 1), (i, j + 1)])
    bary = np.array([[(k - a - b, a, b) for a, b in tri] for tri in template],
                    dtype=float) / k                      # (k^2, 3, 3 weights)
    micro = np.einsum('mvb,nbd->nmvd', bary, v)           # (Np, k^2, 3, 3)
    flat_shape = micro.reshape(-1, 3)
    projected, _ = _hull_project(mesh.hull, flat_shape)
    micro = projected.reshape(micro.shape)

    cross = np.cross(micro[:, :, 1] - micro[:, :, 0], micro[:, :, 2] - micro[:, :, 0])
    norms = np.linalg.norm(cross, axis=2)
    normals = cross / norms[:, :, None]
    flip = (normals * mesh.normals[:, None, :]).sum(axis=2) < 0.0
    normals[flip] *= -1.0
    return micro, normals, 0.5 * norms


# ---------------------------------------------------------------------------
# Influence operator
# ---------------------------------------------------------------------------

class InfluenceOperator:
    """Dense single-layer operator for one mesh: potential and flux maps.

    ``nodes``/``node_normals``/``node_weights`` give the quadrature view of
    the hull used for all surface integrals of solved potentials: exact
    surface points, normals and curved areas when the mesh knows its hull,
    flat panel data otherwise.
    """

    def __init__(self, mesh: PanelMesh):
        self.mesh = mesh
        if mesh.hull is not None:
            self.nodes, self.node_normals = _hull_project(mesh.hull, mesh.centroids)
            self._assemble_curved()
        else:
            self.nodes = mesh.centroids
            self.node_normals = mesh.normals
            self.node_weights = mesh.areas.copy()
            self._assemble_flat()
        self._lu = lu_factor(self.flux_matrix)
        self._tangent_fits = self._prepare_gradient_fits()

    # -- assembly ----------------------------------------------------------

    def _far_matrices(self, source_points, source_weights):
        x = self.nodes
        n = self.node_normals
        diff = x[:, None, :] - source_points[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        safe = np.where(dist == 0.0, 1.0, dist)
        pot = source_weights[None, :] / (_FOUR_PI * safe)
        flux = -(diff * n[:, None, :]).sum(axis=2) * source_weights[None, :] \
            / (_FOUR_PI * safe ** 3)
        return pot, flux, dist

    def _near_pairs(self, dist, include_self):
        diam = self.mesh.diameters
        near = dist < _NEAR_FACTOR * np.maximum(diam[:, None], diam[None, :])
        if include_self:
            np.fill_diagonal(near, True)
        else:
            np.fill_diagonal(near, False)
        return np.nonzero(near)

    def _assemble_curved(self):
        mesh = self.mesh
        micro_v, micro_n, micro_a = _micro_panels(mesh, _MICRO_SPLIT)
        self.node_weights = micro_a.sum(axis=1)

        pot, flux, dist = self._far_matrices(self.nodes, self.node_weights)
        src, dst = self._near_pairs(dist, include_self=True)

        n_micro = micro_v.shape[1]
        rows = np.repeat(src, n_micro)
        tri = micro_v[dst].reshape(-1, 3, 3)
        tri_n = micro_n[dst].reshape(-1, 3)
        pot_n = np.zeros(len(rows))
        flux_n = np.zeros(len(rows))
        chunk = 200_000
        for s in range(0, len(rows), chunk):
            sl = slice(s, min(s + chunk, len(rows)))
            pot_n[sl], flux_n[sl] = _exact_panel_influence(
                tri[sl], self.nodes[rows[sl]], tri_n[sl], self.node_normals[rows[sl]])
        pair = np.repeat(np.arange(len(src)), n_micro)
        pot[src, dst] = np.bincount(pair, weights=pot_n, minlength=len(src))
        flux[src, dst] = np.bincount(pair, weights=flux_n, minlength=len(src))

        self.potential_matrix = pot
        self.flux_matrix = flux

    def _assemble_flat(self):
        mesh = self.mesh
        pot, flux, dist = self._far_matrices(mesh.centroids, mesh.areas)
        src, dst = self._near_pairs(dist, include_self=False)
        if len(src):
            tri = mesh.vertices[mesh.triangles[dst]]
            pot[src, dst], flux[src, dst] = _exact_panel_influence(
                tri, self.nodes[src], mesh.normals[dst], self.node_normals[src])
        for i in range(mesh.n_panels):
            pot[i, i] = _self_layer_potential(
                mesh.vertices[mesh.triangles[i]], self.nodes[i], mesh.normals[i])
            flux[i, i] = -0.5   # fluid-side jump of the normal derivative
        self.potential_matrix = pot
        self.flux_matrix = flux

    # -- solves and reconstruction ------------------------------------------

    def _prepare_gradient_fits(self):
        fits = []
        for i, nbrs in enumerate(self.mesh.vertex_neighbors()):
            n = self.node_normals[i]
            t1 = np.cross(n, np.eye(3)[np.argmin(np.abs(n))])
            t1 /= np.linalg.norm(t1)
            t2 = np.cross(n, t1)
            rel = self.nodes[nbrs] - self.nodes[i]
            A = np.stack([rel @ t1, rel @ t2], axis=1)
            fits.append((np.array(nbrs), t1, t2, np.linalg.pinv(A)))
        return fits

    def solve(self, data):
        sigma = lu_solve(self._lu, data)
        trace = self.potential_matrix @ sigma
        return sigma, trace

    def surface_gradient(self, trace, data):
        grads = np.empty((self.mesh.n_panels, 3))
        for i, (nbrs, t1, t2, pinv) in enumerate(self._tangent_fits):
            coef = pinv @ (trace[nbrs] - trace[i])
            grads[i] = coef[0] * t1 + coef[1] * t2 + data[i] * self.node_normals[i]
        return grads


_OPERATOR_CACHE: dict = {}


def influence_operator(mesh: PanelMesh) -> InfluenceOperator:
    entry = _OPERATOR_CACHE.get(id(mesh))
    if entry is None or entry.mesh is not mesh:
        entry = InfluenceOperator(mesh)
        _OPERATOR_CACHE[id(mesh)] = entry
    return entry


# ---------------------------------------------------------------------------
# Neumann solves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeumannSolution:
    """Boundary trace and surface gradient of one exterior potential.

    Values live at the mesh's quadrature nodes; ``neumann_data`` is the
    prescribed derivative along the outward (fluid-side) node normal.
    """

    mesh: PanelMesh
    neumann_data: np.ndarray
    boundary_trace: np.ndarray
    surface_gradient: np.ndarray
    source_density: np.ndarray

    def flux_residual(self):
        op = influence_operator(self.mesh)
        return float(np.max(np.abs(
            op.flux_matrix @ self.source_density - self.neumann_data)))


def solve_neumann(mesh: PanelMesh, data) -> NeumannSolution:
    """Solve the exterior Neumann problem with flux ``data`` prescribed
    along the outward node normal (which points into the fluid)."""
    data = np.asarray(data, dtype=float)
    if data.shape != (mesh.n_panels,):
        raise CompatibilityError("data must be one value per panel")
    op = influence_operator(mesh)
    w = op.node_weights
    total = float(np.dot(w, data))
    scale = float(w.sum()) * max(float(np.max(np.abs(data))), 1e-300)
    if abs(total) > _COMPAT_TOL * scale:
        raise CompatibilityError(
            f"Neumann data has nonzero total flux ({total:.3e} vs scale {scale:.3e})")
    sigma, trace = op.solve(data)
    grads = op.surface_gradient(trace, data)
    return NeumannSolution(mesh=mesh, neumann_data=data, boundary_trace=trace,
                           surface_gradient=grads, source_density=sigma)


def port_potential(mesh: PanelMesh, port) -> NeumannSolution:
    """Exterior potential driven by a control port.

    The port trace prescribes the flow through the hull measured along the
    fluid-side normal (pointing out of the fluid, i.e. into the body), so
    the solve uses the negated trace.  The port must have zero surface mean.
    """
    op = influence_operator(mesh)
    chi = np.asarray(port.trace(op.nodes), dtype=float)
    mean = float(np.dot(op.node_weights, chi))
    norm1 = float(np.dot(op.node_weights, np.abs(chi)))
    if norm1 == 0.0:
        raise CompatibilityError("port trace vanishes on the mesh")
    if abs(mean) > 1e-10 * norm1:
        raise CompatibilityError(f"port has nonzero surface mean ({mean:.3e})")
    return solve_neumann(mesh, -chi)


# ---------------------------------------------------------------------------
# OFF-format export / import
# ---------------------------------------------------------------------------

def write_off(mesh: PanelMesh, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(mesh.vertices)} {len(mesh.triangles)} 0\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def read_off(path) -> PanelMesh:
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[0] != "OFF":
        raise GeometryError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    data = np.array(tokens[4:4 + 3 * nv], dtype=float).reshape(nv, 3)
    rest = tokens[4 + 3 * nv:]
    faces = []
    k = 0
    for _ in range(nf):
        cnt = int(rest[k])
        if cnt != 3:
            raise GeometryError("only triangle faces are supported")
        faces.append([int(rest[k + 1]), int(rest[k + 2]), int(rest[k + 3])])
        k += cnt + 1
    return PanelMesh(vertices=data, triangles=np.array(faces, dtype=int))
