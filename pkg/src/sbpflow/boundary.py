"""Weak boundary treatment via simultaneous approximation terms.

Each edge node is classified by the sign of the normal velocity: outflow,
inflow, or (below a threshold, and on declared walls) wall. Penalties are
built in the rotated trace frame and lifted back with the exact discrete
transposes of the sampling operators, so the energy bookkeeping closes to
round-off:

  wall:    RHS += -P^{-1} b [ sigma1 R1^T (A Phi1) + sigma2 R2^T (B^T Phi1) ]
  in/out:  RHS += -P^{-1} b T^T sigma0 |L|^{1/2} ( |L|^{1/2} W^- - G )

where Phi1 is the rotated state trace, W^- the incoming characteristic group,
and T the map from the state to W^-. R2 samples (p, tau_n, tau_t); its
transpose scatters edge weights back through the derivative transposes, which
is what makes the wall cancellation exact for arbitrary states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import StateField, StressField

EDGES = ("west", "east", "south", "north")

# |u_n| below WALL_SWITCH * u_scale is treated as a wall node; this is also
# the guard that keeps 1/|u_n| factors finite on declared in/out edges.
WALL_SWITCH = 1e-10


@dataclass(frozen=True)
class EdgeGeometry:
    """Outward normal, storage slice, and boundary quadrature of one edge."""

    name: str
    n1: float
    n2: float
    axis: int  # 0: x-normal (west/east), 1: y-normal (south/north)
    side: int  # 0: low-index end, -1: high-index end
    b: np.ndarray  # boundary quadrature weights along the edge, shape (m,)
    s: np.ndarray  # coordinate along the edge


def edge_geometries(ops) -> dict:
    g = ops.grid
    return {
        "west": EdgeGeometry("west", -1.0, 0.0, 0, 0, ops.py, g.y),
        "east": EdgeGeometry("east", 1.0, 0.0, 0, -1, ops.py, g.y),
        "south": EdgeGeometry("south", 0.0, -1.0, 1, 0, ops.px, g.x),
        "north": EdgeGeometry("north", 0.0, 1.0, 1, -1, ops.px, g.x),
    }


def edge_values(f: np.ndarray, geo: EdgeGeometry) -> np.ndarray:
    """View of a field restricted to one edge."""
    if geo.axis == 0:
        return f[geo.side, :]
    return f[:, geo.side]


def add_at_edge(f: np.ndarray, geo: EdgeGeometry, vals: np.ndarray) -> None:
    if geo.axis == 0:
        f[geo.side, :] += vals
    else:
        f[:, geo.side] += vals


def rotate_to_normal(u1, u2, n1, n2):
    """Cartesian pair -> (normal, tangential) components."""
    return n1 * u1 + n2 * u2, -n2 * u1 + n1 * u2


def rotate_from_normal(cn, ct, n1, n2):
    """Transpose of rotate_to_normal."""
    return n1 * cn - n2 * ct, n2 * cn + n1 * ct


def boundary_stress(stress: StressField, geo: EdgeGeometry):
    """Rotated deviatoric traction (tau_n, tau_t) sampled on an edge."""
    t11 = edge_values(stress.t11, geo)
    t12 = edge_values(stress.t12, geo)
    t22 = edge_values(stress.t22, geo)
    tr1 = t11 * geo.n1 + t12 * geo.n2
    tr2 = t12 * geo.n1 + t22 * geo.n2
    return rotate_to_normal(tr1, tr2, geo.n1, geo.n2)


def char_decomposition(phi0, un, ut, taun, taut, p):
    """Characteristic groups W1 (speed 1/u_n) and W2 (speed -1/u_n).

    Requires u_n bounded away from zero; callers mask wall-classified nodes
    before dividing.
    """
    inv0 = 1.0 / phi0
    phin = phi0 * un
    phit = phi0 * ut
    w1 = np.stack([
        phin,
        (phin * phin - (taun - p)) * inv0,
        (phin * phit - taut) * inv0,
    ])
    w2 = np.stack([
        np.zeros_like(phin),
        -(taun - p) * inv0,
        -taut * inv0,
    ])
    lam1 = 1.0 / un
    return w1, w2, lam1, -lam1


def raw_boundary_term(phi0, un, ut, p, taun, taut):
    """Advective + viscous boundary energy density in the rotated frame."""
    phin = phi0 * un
    phit = phi0 * ut
    return un * (phi0 * phi0 + phin * phin + phit * phit) + 2.0 * (
        un * (p - taun) - ut * taut
    )


def diag_boundary_term(phi0, un, ut, p, taun, taut):
    """The same energy density through the characteristic groups."""
    w1, w2, lam1, lam2 = char_decomposition(phi0, un, ut, taun, taut, p)
    return lam1 * np.sum(w1 * w1, axis=0) + lam2 * np.sum(w2 * w2, axis=0)


class BoundaryData:
    """Prescribed characteristic data G(t) on one edge; base class is zero data.

    g_inflow feeds the 3-condition inflow form, g_outflow the 2-condition
    outflow form (component 0 unused there). Rates are consumed by the
    constraint-rate operator so time-dependent data stays consistent.
    """

    def __init__(self, m: int):
        self.m = m

    def _zeros(self):
        return np.zeros((3, self.m))

    def g_inflow(self, t: float) -> np.ndarray:
        return self._zeros()

    def g_outflow(self, t: float) -> np.ndarray:
        return self._zeros()

    def g_inflow_rate(self, t: float) -> np.ndarray:
        return self._zeros()

    def g_outflow_rate(self, t: float) -> np.ndarray:
        return self._zeros()


class TargetData(BoundaryData):
    """Time-constant data built from a target boundary state."""

    def __init__(self, g_in: np.ndarray, g_out: np.ndarray):
        g_in = np.asarray(g_in, dtype=float)
        g_out = np.asarray(g_out, dtype=float)
        if g_in.ndim != 2 or g_in.shape[0] != 3 or g_out.shape != g_in.shape:
            raise ValueError(f"boundary data must be (3, m) arrays, got {g_in.shape} and {g_out.shape}")
        super().__init__(g_in.shape[1])
        self._g_in = g_in
        self._g_out = g_out

    def g_inflow(self, t: float) -> np.ndarray:
        return self._g_in

    def g_outflow(self, t: float) -> np.ndarray:
        return self._g_out


def target_edge_data(geo: EdgeGeometry, fluids, rho, u1, u2, p, grad=None) -> TargetData:
    """Characteristic data matching a target primitive state on an edge.

    grad optionally supplies the analytic velocity gradient (g11, g12, g21,
    g22) along the edge for a nonzero target traction; default is zero.
    """
    m = geo.b.shape[0]
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (m,))
    u1 = np.broadcast_to(np.asarray(u1, dtype=float), (m,))
    u2 = np.broadcast_to(np.asarray(u2, dtype=float), (m,))
    p = np.broadcast_to(np.asarray(p, dtype=float), (m,))
    if np.any(rho <= 0.0):
        raise ValueError("target boundary density must be positive")
    phi0 = np.sqrt(rho)
    un, ut = rotate_to_normal(u1, u2, geo.n1, geo.n2)
    mu = fluids.viscosity(fluids.alpha_of_density(rho))
    if grad is None:
        taun = np.zeros(m)
        taut = np.zeros(m)
    else:
        g11, g12, g21, g22 = (np.broadcast_to(np.asarray(g, dtype=float), (m,)) for g in grad)
        t11 = 2.0 * mu * g11
        t12 = mu * (g12 + g21)
        t22 = 2.0 * mu * g22
        tr1 = t11 * geo.n1 + t12 * geo.n2
        tr2 = t12 * geo.n1 + t22 * geo.n2
        taun, taut = rotate_to_normal(tr1, tr2, geo.n1, geo.n2)
    a = np.abs(un)
    live = a > 0.0
    asafe = np.where(live, a, 1.0)
    w1, w2, _, _ = char_decomposition(phi0, np.where(live, un, 1.0), ut, taun, taut, p)
    sq = np.sqrt(asafe)
    g_in = np.where(live, w1 / sq, 0.0)
    g_out = np.where(live, w2 / sq, 0.0)
    return TargetData(g_in, g_out)


@dataclass(frozen=True)
class EdgeCondition:
    """Declared boundary treatment of one edge."""

    kind: str  # wall | inflow | outflow | auto
    data: BoundaryData | None = None

    def __post_init__(self):
        if self.kind not in ("wall", "inflow", "outflow", "auto"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")


@dataclass
class EdgeSatCache:
    """Per-edge values frozen at assembly, reused by the constraint operator."""

    geo: EdgeGeometry
    wall: np.ndarray  # bool masks over edge nodes
    infl: np.ndarray
    outf: np.ndarray
    io: np.ndarray
    phi0: np.ndarray
    inv0: np.ndarray
    un: np.ndarray
    ut: np.ndarray
    a: np.ndarray  # |u_n| with wall nodes padded to 1 (never used there)
    mu: np.ndarray
    bw: np.ndarray  # b * wall mask
    bio: np.ndarray  # b * in/out mask
    any_wall: bool = False
    any_io: bool = False
    visc: bool = False  # any nonzero viscosity on the edge


@dataclass
class SatResult:
    """Assembled penalty tendencies plus the caches the solver reuses."""

    fields: np.ndarray  # (4, nx, ny); row 3 is the constraint-row penalty
    caches: dict
    data_rate3: np.ndarray  # explicit d/dt of the constraint-row penalty via G(t)
    gg_quadrature: float  # sum_edges sum_nodes b |G_used|^2


def _scatter_rotated(acc, geo, c0, cn, ct):
    """R1^T: rotated edge weights into rows 0..2 at the edge nodes."""
    c1, c2 = rotate_from_normal(cn, ct, geo.n1, geo.n2)
    add_at_edge(acc[0], geo, c0)
    add_at_edge(acc[1], geo, c1)
    add_at_edge(acc[2], geo, c2)


def _scatter_stress_transpose(acc, ops, geo, inv0, mu_e, cn, ct):
    """Exact transpose of the rotated traction sampling.

    (cn, ct) are per-node weights (quadrature and penalty scalings included)
    multiplying (tau_n, tau_t); the result lands in rows 1, 2 distributed
    through the derivative transposes and the frozen 1/phi0 scaling.
    """
    w1 = mu_e * (geo.n1 * cn - geo.n2 * ct)
    w2 = mu_e * (geo.n2 * cn + geo.n1 * ct)
    ax1 = 2.0 * geo.n1 * w1          # d/dx route into u1
    shared = geo.n2 * w1 + geo.n1 * w2  # d/dx into u2 and d/dy into u1
    ay2 = 2.0 * geo.n2 * w2          # d/dy route into u2
    if geo.axis == 0:
        i0 = 0 if geo.side == 0 else ops.grid.nx - 1
        dxrow = ops.opx.d[i0, :]
        acc[1] += inv0 * np.outer(dxrow, ax1)
        acc[2] += inv0 * np.outer(dxrow, shared)
        acc[1][i0, :] += inv0[i0, :] * (shared @ ops.opy.d)
        acc[2][i0, :] += inv0[i0, :] * (ay2 @ ops.opy.d)
    else:
        j0 = 0 if geo.side == 0 else ops.grid.ny - 1
        dyrow = ops.opy.d[j0, :]
        acc[1] += inv0 * np.outer(shared, dyrow)
        acc[2] += inv0 * np.outer(ay2, dyrow)
        acc[1][:, j0] += inv0[:, j0] * (ax1 @ ops.opx.d)
        acc[2][:, j0] += inv0[:, j0] * (shared @ ops.opx.d)


def sample_rotated_trace(state: StateField, stress: StressField, ops, geo: EdgeGeometry, pfield=None):
    """Forward trace sampling (p, tau_n, tau_t) on an edge; test counterpart
    of _scatter_stress_transpose plus the pressure row."""
    p = state.phi3 if pfield is None else pfield
    taun, taut = boundary_stress(stress, geo)
    return edge_values(p, geo).copy(), taun, taut


def classify_edge(un: np.ndarray, kind: str, u_scale: float):
    """Node masks (wall, inflow, outflow) for one edge."""
    thr = WALL_SWITCH * u_scale
    if kind == "wall":
        wall = np.ones(un.shape, dtype=bool)
        infl = np.zeros_like(wall)
        outf = np.zeros_like(wall)
        return wall, infl, outf
    wall = np.abs(un) <= thr
    infl = (un < -thr)
    outf = (un > thr)
    return wall, infl, outf


def assemble_sats(state: StateField, stress: StressField, problem, t: float,
                  pfield: np.ndarray | None = None, edges=EDGES) -> SatResult:
    """Assemble all penalty tendencies at the given state and pressure.

    pfield=None assembles the base at p = 0; the pressure dependence is
    recovered separately by sat_pressure_response (it is linear).
    """
    ops = problem.ops
    nx, ny = state.shape
    acc = np.zeros((4, nx, ny))
    data_rate3 = np.zeros((nx, ny))
    caches = {}
    gg = 0.0

    u1f = stress.u1
    u2f = stress.u2
    u_scale = max(float(np.max(np.abs(u1f))), float(np.max(np.abs(u2f))))
    s0 = problem.sigma0
    s1 = problem.sigma1
    s2 = problem.sigma2

    for name in edges:
        geo = problem.geos[name]
        cond = problem.bcs[name]
        phi0e = edge_values(state.phi0, geo)
        inv0e = 1.0 / phi0e
        u1e = edge_values(u1f, geo)
        u2e = edge_values(u2f, geo)
        un, ut = rotate_to_normal(u1e, u2e, geo.n1, geo.n2)
        taun, taut = boundary_stress(stress, geo)
        pe = np.zeros_like(un) if pfield is None else edge_values(pfield, geo)
        mu_e = edge_values(stress.mu, geo)

        wall, infl, outf = classify_edge(un, cond.kind, u_scale)
        io = infl | outf
        b = geo.b

        # wall penalties
        if np.any(wall):
            bw = b * wall
            phin = phi0e * un
            phit = phi0e * ut
            cw = bw * s1 * un
            _scatter_rotated(acc, geo, cw * phi0e, cw * phin, cw * phit)
            add_at_edge(acc[3], geo, bw * s2 * un)
            _scatter_stress_transpose(acc, ops, geo, stress.inv0, mu_e,
                                      bw * s2 * (-un), bw * s2 * (-ut))
        else:
            bw = np.zeros_like(b)

        # characteristic penalties
        a = np.where(io, np.abs(un), 1.0)
        if np.any(io):
            bio = b * io
            unsafe = np.where(io, un, 1.0)
            w1, w2, _, _ = char_decomposition(phi0e, unsafe, ut, taun, taut, pe)
            data = cond.data if cond.data is not None else BoundaryData(len(un))
            g_in = np.asarray(data.g_inflow(t), dtype=float)
            g_out = np.asarray(data.g_outflow(t), dtype=float)
            if g_in.shape != (3, len(un)) or g_out.shape != (3, len(un)):
                raise ValueError(
                    f"boundary data for edge {name!r} must have shape (3, {len(un)}), "
                    f"got {g_in.shape} and {g_out.shape}"
                )
            sqa = np.sqrt(a)
            v = s0 * (np.where(infl, w1, w2) / a - np.where(infl, g_in, g_out) / sqa)
            v = np.where(io, v, 0.0)
            cin = (b * infl) * unsafe
            _scatter_rotated(acc, geo, cin * v[0], cin * v[1], cin * v[2])
            add_at_edge(acc[3], geo, bio * inv0e * v[1])
            _scatter_stress_transpose(acc, ops, geo, stress.inv0, mu_e,
                                      -bio * inv0e * v[1], -bio * inv0e * v[2])
            rate_in = np.asarray(data.g_inflow_rate(t), dtype=float)
            rate_out = np.asarray(data.g_outflow_rate(t), dtype=float)
            gdot1 = np.where(infl, rate_in[1], rate_out[1])
            add_at_edge(data_rate3, geo, np.where(io, bio * inv0e * s0 * gdot1 / sqa, 0.0)
                        * edge_values(ops.inv_pp, geo))
            gused = np.where(infl, g_in, np.where(outf, g_out, 0.0))
            gg += float(np.sum(b * io * np.sum(gused * gused, axis=0)))
        else:
            bio = np.zeros_like(b)

        caches[name] = EdgeSatCache(
            geo=geo, wall=wall, infl=infl, outf=outf, io=io,
            phi0=phi0e.copy(), inv0=inv0e, un=un, ut=ut, a=a, mu=mu_e.copy(),
            bw=bw, bio=bio,
            any_wall=bool(wall.any()), any_io=bool(io.any()),
            visc=bool(np.any(mu_e != 0.0)),
        )

    fields = -ops.inv_pp[None, :, :] * acc
    return SatResult(fields=fields, caches=caches, data_rate3=data_rate3, gg_quadrature=gg)


def sat_pressure_response(sat: SatResult, problem, inv0_full, p: np.ndarray) -> np.ndarray:
    """Linear response of all penalty rows to the pressure field.

    Only in/out nodes couple to p (through component 2 of W). Returns a
    (4, nx, ny) increment matching assemble_sats' layout.
    """
    ops = problem.ops
    nx, ny = p.shape
    acc = np.zeros((4, nx, ny))
    for cache in sat.caches.values():
        if not cache.any_io:
            continue
        geo = cache.geo
        pe = edge_values(p, geo)
        dv1 = problem.sigma0 * cache.inv0 * pe / cache.a
        dv1 = np.where(cache.io, dv1, 0.0)
        cin = (cache.bio * cache.infl) * cache.un
        _scatter_rotated(acc, geo, np.zeros_like(dv1), cin * dv1, np.zeros_like(dv1))
        add_at_edge(acc[3], geo, cache.bio * cache.inv0 * dv1)
        if cache.visc:
            _scatter_stress_transpose(acc, ops, geo, inv0_full, cache.mu,
                                      -cache.bio * cache.inv0 * dv1,
                                      np.zeros_like(dv1))
    out = -ops.inv_pp[None, :, :] * acc
    return out


def _edge_dtau_n(cache, ops, du1x, du1y, du2x, du2y):
    geo = cache.geo
    d11 = 2.0 * cache.mu * edge_values(du1x, geo)
    d12 = cache.mu * (edge_values(du1y, geo) + edge_values(du2x, geo))
    d22 = 2.0 * cache.mu * edge_values(du2y, geo)
    tr1 = d11 * geo.n1 + d12 * geo.n2
    tr2 = d12 * geo.n1 + d22 * geo.n2
    dtaun, _ = rotate_to_normal(tr1, tr2, geo.n1, geo.n2)
    return dtaun


def sat3_velocity_response(sat: SatResult, problem, du1: np.ndarray, du2: np.ndarray) -> np.ndarray:
    """First variation of the constraint-row penalty under a velocity change.

    Wall rows respond through u_n exactly; in/out rows through phi_n and the
    traction of the variation (coefficients 1/phi0, |u_n|, mu frozen).
    """
    ops = problem.ops
    out = np.zeros(du1.shape)
    need_grad = any(c.any_io and c.visc for c in sat.caches.values())
    if need_grad:
        du1x = ops.dx(du1)
        du1y = ops.dy(du1)
        du2x = ops.dx(du2)
        du2y = ops.dy(du2)
    s0 = problem.sigma0
    s2 = problem.sigma2
    for cache in sat.caches.values():
        geo = cache.geo
        dun, _ = rotate_to_normal(edge_values(du1, geo), edge_values(du2, geo), geo.n1, geo.n2)
        ipp = edge_values(ops.inv_pp, geo)
        vals = np.zeros_like(dun)
        if cache.any_wall:
            vals = vals - ipp * cache.bw * s2 * dun
        if cache.any_io:
            if cache.visc:
                dtaun = _edge_dtau_n(cache, ops, du1x, du1y, du2x, du2y)
            else:
                dtaun = 0.0
            dphin = cache.phi0 * dun
            phin = cache.phi0 * cache.un
            dw2 = np.where(cache.infl, (2.0 * phin * dphin - dtaun) * cache.inv0,
                           -dtaun * cache.inv0)
            dv1 = s0 * dw2 / cache.a
            vals = vals - ipp * cache.bio * cache.inv0 * np.where(cache.io, dv1, 0.0)
        add_at_edge(out, geo, vals)
    return out


def sat3_pressure_response(sat: SatResult, problem, p: np.ndarray) -> np.ndarray:
    """Linear response of the constraint-row penalty to the pressure field."""
    ops = problem.ops
    out = np.zeros(p.shape)
    s0 = problem.sigma0
    for cache in sat.caches.values():
        if not cache.any_io:
            continue
        geo = cache.geo
        pe = edge_values(p, geo)
        ipp = edge_values(ops.inv_pp, geo)
        dv1 = s0 * cache.inv0 * pe / cache.a
        add_at_edge(out, geo, -ipp * cache.bio * cache.inv0 * np.where(cache.io, dv1, 0.0))
    return out


def boundary_energy_quadrature(state: StateField, stress: StressField, pfield: np.ndarray, ops):
    """Per-edge advective and viscous boundary energy quadratures.

    bt_advective_edge = sum b u_n (phi0^2 + phi1^2 + phi2^2)
    bt_viscous_edge   = -2 sum b [ u_n (tau_n - p) + u_t tau_t ]
    """
    geos = edge_geometries(ops)
    out = {}
    inv0 = stress.inv0
    for name, geo in geos.items():
        phi0e = edge_values(state.phi0, geo)
        phi1e = edge_values(state.phi1, geo)
        phi2e = edge_values(state.phi2, geo)
        u1e = edge_values(stress.u1, geo)
        u2e = edge_values(stress.u2, geo)
        un, ut = rotate_to_normal(u1e, u2e, geo.n1, geo.n2)
        taun, taut = boundary_stress(stress, geo)
        pe = edge_values(pfield, geo)
        b = geo.b
        bt_adv = float(np.sum(b * un * (phi0e ** 2 + phi1e ** 2 + phi2e ** 2)))
        bt_visc = -2.0 * float(np.sum(b * (un * (taun - pe) + ut * taut)))
        out[name] = {"bt_advective": bt_adv, "bt_viscous": bt_visc}
    return out
