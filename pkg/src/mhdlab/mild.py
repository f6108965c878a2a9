"""Nonlinear terms, the Duhamel map, whole-trajectory fixed-point iteration,
and an independent integrating-factor time stepper.

The evolved pair is (vorticity, current density); velocity and magnetic field
are recovered by curl inversion at every time node.  The fixed-point sweep
updates the whole trajectory at once: each new iterate is the heat flow of the
initial data minus the time-convolved nonlinear forcing of the previous
iterate.  Nonlinear products are formed in physical space and dealiased by the
2/3 rule before differentiation, so iterates of band-limited data stay exactly
band-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    Grid,
    ScalarField,
    VectorField,
    _curl_hat,
    _fwd,
    _inv,
    _same_grid,
    _tables,
    lp_norm,
)
from .kernels import biot_savart, heat_propagate
from .morrey import BallSampling, WeightedSeminorms, weighted_seminorms


@dataclass(frozen=True)
class TimeMesh:
    """Strictly increasing time nodes starting at 0, with a quadrature order."""

    nodes: tuple[float, ...]
    quad_order: int = 4

    def __post_init__(self) -> None:
        nodes = tuple(float(t) for t in self.nodes)
        if len(nodes) < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if nodes[0] != 0.0:
            raise ValueError("mesh must start at t = 0")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("mesh nodes must be strictly increasing")
        if self.quad_order < 1:
            raise ValueError("quadrature order must be >= 1")
        object.__setattr__(self, "nodes", nodes)

    @property
    def horizon(self) -> float:
        return self.nodes[-1]

    @staticmethod
    def uniform(horizon: float, num_nodes: int, quad_order: int = 4) -> "TimeMesh":
        return TimeMesh(tuple(np.linspace(0.0, horizon, num_nodes)), quad_order)

    @staticmethod
    def graded(horizon: float, num_nodes: int, ratio: float = 1.5, quad_order: int = 4) -> "TimeMesh":
        """Geometrically graded mesh concentrating nodes near t = 0."""
        m = num_nodes - 1
        steps = ratio ** np.arange(m)
        nodes = np.concatenate([[0.0], np.cumsum(steps)])
        return TimeMesh(tuple(nodes * (horizon / nodes[-1])), quad_order)

    def node_index(self, t: float) -> int:
        arr = np.asarray(self.nodes)
        i = int(np.argmin(np.abs(arr - t)))
        if abs(arr[i] - t) > 1e-12 * max(1.0, self.horizon):
            raise ValueError(f"t = {t} is not a mesh node")
        return i


@dataclass(frozen=True)
class MhdTrace:
    """Per-node iterate fields (vorticity, current) with cached (velocity, magnetic)."""

    mesh: TimeMesh
    omega: tuple[VectorField, ...]
    current: tuple[VectorField, ...]
    velocity: tuple[VectorField, ...]
    magnetic: tuple[VectorField, ...]

    def __post_init__(self) -> None:
        m = len(self.mesh.nodes)
        for name in ("omega", "current", "velocity", "magnetic"):
            if len(getattr(self, name)) != m:
                raise ValueError(f"{name} must have one field per mesh node")

    @property
    def grid(self) -> Grid:
        return self.omega[0].grid

    @staticmethod
    def from_vorticity(mesh: TimeMesh, omega, current) -> "MhdTrace":
        """Build a trace from iterate fields, recovering velocity and magnetic caches."""
        u = tuple(biot_savart(w) for w in omega)
        b = tuple(biot_savart(j) for j in current)
        return MhdTrace(mesh, tuple(omega), tuple(current), u, b)

    def validate(self, div_tol: float = 1e-8, cache_tol: float = 1e-10) -> None:
        """Check solenoidality of all fields and coherence of the curl caches."""
        from .fields import curl, divergence, max_norm

        for m, (w, j, u, b) in enumerate(zip(self.omega, self.current, self.velocity, self.magnetic)):
            for name, f in (("omega", w), ("current", j), ("velocity", u), ("magnetic", b)):
                scale = max(max_norm(f), np.finfo(float).tiny)
                if max_norm(divergence(f)) > div_tol * scale:
                    raise ValueError(f"node {m}: {name} is not divergence-free")
            for name, pot, target in (("velocity", u, w), ("magnetic", b, j)):
                scale = max(max_norm(target), np.finfo(float).tiny)
                err = max_norm(VectorField(self.grid, curl(pot).values - target.values))
                if err > cache_tol * scale:
                    raise ValueError(f"node {m}: curl({name}) does not match its source field")


@dataclass(frozen=True)
class SweepRecord:
    """One fixed-point sweep: successive-difference norm and weighted seminorms."""

    index: int
    delta: float
    seminorms: WeightedSeminorms | None


@dataclass(frozen=True)
class IterationReport:
    sweeps: tuple[SweepRecord, ...]
    converged: bool
    tol: float

    @property
    def sweep_count(self) -> int:
        return len(self.sweeps)

    @property
    def deltas(self) -> tuple[float, ...]:
        return tuple(s.delta for s in self.sweeps)


def _dealias_hat(hat: np.ndarray, grid: Grid) -> np.ndarray:
    keep = _tables(grid)["keep"]
    return np.where(keep, hat, 0.0)


def _flux_hat(u: np.ndarray, w: np.ndarray, b: np.ndarray, j: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral divergence of the dealiased antisymmetric transport tensor.

    The tensor is ``T[i, m] = u_i w_m - u_m w_i - b_i j_m + b_m j_i``; only the
    three independent entries are formed, so the antisymmetry (and hence the
    solenoidality of the output) is exact.
    """
    t01 = u[0] * w[1] - u[1] * w[0] - b[0] * j[1] + b[1] * j[0]
    t02 = u[0] * w[2] - u[2] * w[0] - b[0] * j[2] + b[2] * j[0]
    t12 = u[1] * w[2] - u[2] * w[1] - b[1] * j[2] + b[2] * j[1]
    h01, h02, h12 = (_dealias_hat(_fwd(t), grid) for t in (t01, t02, t12))
    kd = _tables(grid)["kd"]
    return 1j * np.stack(
        [
            -kd[1] * h01 - kd[2] * h02,
            kd[0] * h01 - kd[2] * h12,
            kd[0] * h02 + kd[1] * h12,
        ]
    )


def _advective_difference(u: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """(u . grad) b - (b . grad) u in physical space (not yet dealiased)."""
    kd = _tables(grid)["kd"]
    uh = _fwd(u)
    bh = _fwd(b)
    out = np.zeros_like(u)
    for i in range(3):
        du_i = _inv(1j * kd[i] * uh)  # d u_m / d x_i for all m
        db_i = _inv(1j * kd[i] * bh)
        out += u[i] * db_i - b[i] * du_i
    return out


def _source_hat(u: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    adv = _advective_difference(u, b, grid)
    advh = _dealias_hat(_fwd(adv), grid)
    return _curl_hat(advh, _tables(grid)["kd"])


def vorticity_flux(u: VectorField, w: VectorField, b: VectorField, j: VectorField) -> VectorField:
    """Divergence-form nonlinear term of the vorticity equation.

    Component m is ``sum_i d_i (u_i w_m - u_m w_i - b_i j_m + b_m j_i)``;
    products are dealiased before differentiation and the result is
    divergence-free to round-off.
    """
    grid = _same_grid(u, w, b, j)
    return VectorField(grid, _inv(_flux_hat(u.values, w.values, b.values, j.values, grid)))


def current_source(u: VectorField, b: VectorField) -> VectorField:
    """Curl of the dealiased advective difference ``(u.grad)b - (b.grad)u``."""
    grid = _same_grid(u, b)
    return VectorField(grid, _inv(_source_hat(u.values, b.values, grid)))


def stretching_form(u: VectorField, w: VectorField, b: VectorField, j: VectorField) -> VectorField:
    """Gradient-form twin of :func:`vorticity_flux`; equal for solenoidal inputs."""
    grid = _same_grid(u, w, b, j)
    out = _advective_difference(u.values, w.values, grid)
    out -= _advective_difference(b.values, j.values, grid)
    return VectorField(grid, _inv(_dealias_hat(_fwd(out), grid)))


def _gl_rule(order: int):
    return np.polynomial.legendre.leggauss(order)


def _duhamel_hat(forcing_hats, mesh: TimeMesh, m: int, grid: Grid) -> np.ndarray:
    """Assemble ``int_0^{t_m} exp(-(t_m - s)|k|^2) F_hat(s) ds`` in spectral space.

    The forcing is linearly interpolated between nodes; the heat factor is
    evaluated exactly at the Gauss-Legendre abscissae of each subinterval.
    """
    k2 = _tables(grid)["k2"]
    xi, wi = _gl_rule(mesh.quad_order)
    t = mesh.nodes[m]
    acc = np.zeros_like(forcing_hats[0])
    for a in range(m):
        ta, tb = mesh.nodes[a], mesh.nodes[a + 1]
        half = 0.5 * (tb - ta)
        for x, wq in zip(xi, wi):
            s = 0.5 * (ta + tb) + half * x
            frac = (s - ta) / (tb - ta)
            heat = np.exp(-(t - s) * k2)
            acc += (wq * half) * heat * ((1.0 - frac) * forcing_hats[a] + frac * forcing_hats[a + 1])
    return acc


def duhamel_integral(forcings, mesh: TimeMesh, t: float) -> VectorField:
    """Heat-smoothed time integral of a node-sampled forcing, up to mesh node ``t``."""
    m = mesh.node_index(t)
    grid = _same_grid(*forcings)
    hats = [_fwd(f.values) for f in forcings]
    return VectorField(grid, _inv(_duhamel_hat(hats, mesh, m, grid)))


def heat_flow_trace(w0: VectorField, j0: VectorField, mesh: TimeMesh) -> MhdTrace:
    """The zeroth iterate: pure heat flow of the initial pair."""
    omega = tuple(heat_propagate(w0, t) for t in mesh.nodes)
    current = tuple(heat_propagate(j0, t) for t in mesh.nodes)
    return MhdTrace.from_vorticity(mesh, omega, current)


def picard_sweep(trace: MhdTrace, w0: VectorField, j0: VectorField) -> MhdTrace:
    """One whole-trajectory fixed-point update.

    Evaluates the nonlinear terms of the previous iterate at every node, then
    sets ``new(t) = heat_flow(initial, t) - duhamel(forcing, t)`` for both the
    vorticity and the current.  The minus sign matches the evolution system:
    the transport term enters the time derivative with a negative sign.
    """
    grid = trace.grid
    mesh = trace.mesh
    flux_hats = []
    src_hats = []
    for u, w, b, j in zip(trace.velocity, trace.omega, trace.magnetic, trace.current):
        flux_hats.append(_flux_hat(u.values, w.values, b.values, j.values, grid))
        src_hats.append(_source_hat(u.values, b.values, grid))
    new_omega = []
    new_current = []
    for m, t in enumerate(mesh.nodes):
        wt = heat_propagate(w0, t)
        jt = heat_propagate(j0, t)
        if m > 0:
            wt = VectorField(grid, wt.values - _inv(_duhamel_hat(flux_hats, mesh, m, grid)))
            jt = VectorField(grid, jt.values - _inv(_duhamel_hat(src_hats, mesh, m, grid)))
        new_omega.append(wt)
        new_current.append(jt)
    return MhdTrace.from_vorticity(mesh, new_omega, new_current)


def trace_distance(a: MhdTrace, b: MhdTrace) -> float:
    """Max over nodes of the L2 distances of the vorticity and current iterates."""
    best = 0.0
    for wa, wb, ja, jb in zip(a.omega, b.omega, a.current, b.current):
        dw = lp_norm(VectorField(wa.grid, wa.values - wb.values), 2)
        dj = lp_norm(VectorField(ja.grid, ja.values - jb.values), 2)
        best = max(best, dw + dj)
    return best


def run_picard(
    w0: VectorField,
    j0: VectorField,
    mesh: TimeMesh,
    tol: float = 1e-8,
    max_sweeps: int = 50,
    p: float = 1.5,
    q: float = 1.0,
    sampling: BallSampling = BallSampling(),
    report_seminorms: bool = True,
) -> tuple[MhdTrace, IterationReport]:
    """Iterate :func:`picard_sweep` from the heat flow until the trajectory settles.

    Convergence is declared when the successive-difference norm drops to
    ``tol``; running out of sweeps returns the last trace with
    ``converged=False`` (the smallness regime was left, or the horizon is too
    long for a contraction).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    trace = heat_flow_trace(w0, j0, mesh)
    records = []
    converged = False
    for k in range(1, max_sweeps + 1):
        try:
            new = picard_sweep(trace, w0, j0)
        except (ValueError, FloatingPointError):
            # iterates left the representable range: report divergence, keep
            # the last finite trace
            records.append(SweepRecord(index=k, delta=math.inf, seminorms=None))
            break
        delta = trace_distance(new, trace)
        sem = weighted_seminorms(new, p, q, sampling) if report_seminorms else None
        records.append(SweepRecord(index=k, delta=delta, seminorms=sem))
        trace = new
        if delta <= tol:
            converged = True
            break
    return trace, IterationReport(tuple(records), converged, tol)


def mild_residual(trace: MhdTrace, w0: VectorField, j0: VectorField) -> float:
    """How far a trace is from satisfying the integral equation (one extra sweep)."""
    return trace_distance(picard_sweep(trace, w0, j0), trace)


def max_retained_k2(grid: Grid) -> float:
    """Largest ``|k|^2`` surviving the 2/3-rule truncation."""
    t = _tables(grid)
    return float(t["k2d"][t["keep"]].max())


def reference_timestepper(
    w0: VectorField,
    j0: VectorField,
    mesh: TimeMesh,
    dt: float,
    nonlinear: bool = True,
) -> MhdTrace:
    """Integrating-factor Heun integration of the evolution system, node-aligned.

    The linear (heat) part is integrated exactly per mode; the dealiased
    nonlinear terms are advanced with the second-order Heun corrector.  Each
    mesh subinterval is split into uniform substeps no longer than ``dt``, so
    the mesh nodes are hit exactly without interpolation.  ``dt`` must resolve
    the fastest retained mode (``dt * max|k|^2 <= 1``).
    """
    grid = _same_grid(w0, j0)
    if dt <= 0:
        raise ValueError("dt must be positive")
    k2max = max_retained_k2(grid)
    if dt * k2max > 1.0 + 1e-12:
        raise ValueError(
            f"dt = {dt} does not resolve the fastest retained mode (need dt <= {1.0 / k2max:.3e})"
        )
    tab = _tables(grid)
    k2, kd, k2d = tab["k2"], tab["kd"], tab["k2d"]
    inv_k2 = np.zeros_like(k2d)
    np.divide(1.0, k2d, out=inv_k2, where=k2d > 0)

    def nonlin(wh: np.ndarray, jh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if not nonlinear:
            z = np.zeros_like(wh)
            return z, z
        uh = _curl_hat(wh * inv_k2[None], kd)
        bh = _curl_hat(jh * inv_k2[None], kd)
        u, w, b, j = (_inv(h) for h in (uh, wh, bh, jh))
        return -_flux_hat(u, w, b, j, grid), -_source_hat(u, b, grid)

    def l2(wh: np.ndarray, jh: np.ndarray) -> float:
        return float(np.sqrt(np.sum(np.abs(wh) ** 2) + np.sum(np.abs(jh) ** 2)))

    wh = _fwd(w0.values)
    jh = _fwd(j0.values)
    omega = [w0]
    current = [j0]
    for a in range(len(mesh.nodes) - 1):
        ta, tb = mesh.nodes[a], mesh.nodes[a + 1]
        nsub = max(1, math.ceil((tb - ta) / dt - 1e-12))
        h = (tb - ta) / nsub
        decay = np.exp(-h * k2)
        for _ in range(nsub):
            size0 = l2(wh, jh)
            nw0, nj0 = nonlin(wh, jh)
            wh_star = decay * (wh + h * nw0)
            jh_star = decay * (jh + h * nj0)
            nw1, nj1 = nonlin(wh_star, jh_star)
            wh = decay * wh + 0.5 * h * (decay * nw0 + nw1)
            jh = decay * jh + 0.5 * h * (decay * nj0 + nj1)
            if l2(wh, jh) > 10.0 * max(size0, np.finfo(float).tiny):
                raise RuntimeError(
                    f"unstable step at t in [{ta}, {tb}]: norm grew more than 10x in one step"
                )
        omega.append(VectorField(grid, _inv(wh)))
        current.append(VectorField(grid, _inv(jh)))
    return MhdTrace.from_vorticity(mesh, omega, current)


@dataclass(frozen=True)
class WeakStarTable:
    """Pairings g(t) of one iterate component against a test function."""

    times: tuple[float, ...]
    values: tuple[float, ...]
    deviations: tuple[float, ...]  # |g(t) - g(0)|


def weak_star_check(trace: MhdTrace, phi: ScalarField, component: int) -> WeakStarTable:
    """Pair one vorticity component against ``phi`` at every node and track |g(t) - g(0)|."""
    if phi.grid != trace.grid:
        raise ValueError("test function lives on a different grid")
    h3 = trace.grid.spacing**3
    g = [h3 * float(np.sum(w.values[component] * phi.values)) for w in trace.omega]
    g0 = g[0]
    return WeakStarTable(
        times=tuple(trace.mesh.nodes),
        values=tuple(g),
        deviations=tuple(abs(v - g0) for v in g),
    )
