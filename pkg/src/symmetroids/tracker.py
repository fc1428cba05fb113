"""Predictor-corrector homotopy continuation for the node system.

All paths of one homotopy are tracked together as a batch: every path keeps
its own ``tau``, step size and status, and each iteration evaluates the
active paths in a single vectorized call.  Paths run from ``tau = 1`` (start
system) to ``tau = 0`` (target system).
"""
from __future__ import annotations

import dataclasses
import functools
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .classify import Tolerances
from .pencil import Pencil
from .polysys import Chart, PencilSegment, SegmentBundle, evaluate, extended_values, generic_frame

SUCCESS = "success"
DIVERGED = "diverged"
STEP_LIMIT = "step_limit"
SINGULAR = "singular"


@dataclass(frozen=True)
class TrackOptions:
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.25
    corrector_tol: float = 1e-8
    max_newton_iters: int = 3
    max_steps: int = 5000
    divergence_norm: float = 1e8
    gamma: Optional[complex] = None
    predictor: str = "rk4"

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step <= 1:
            raise ValueError("need 0 < min_step <= initial_step <= max_step <= 1")
        if self.corrector_tol <= 0:
            raise ValueError("corrector_tol must be positive")
        if self.gamma is not None and not np.isclose(abs(self.gamma), 1.0):
            raise ValueError("gamma must have modulus 1")


@dataclass
class PathResult:
    endpoint: np.ndarray
    status: str
    steps_taken: int
    final_residual: float
    start_index: int = 0

    @property
    def ok(self):
        return self.status == SUCCESS


def _random_gamma(rng):
    return complex(np.exp(2j * np.pi * rng.random()))


def _solve(A, b):
    """Batched solve that returns NaN rows for singular systems instead of raising."""
    try:
        return np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.full(b.shape, np.nan, dtype=np.result_type(A, b))
        for i in range(len(A)):
            try:
                out[i] = np.linalg.solve(A[i], b[i])
            except np.linalg.LinAlgError:
                pass
        return out


class ParameterHomotopy:
    """Straight segment ``(1 - tau) * target + tau * gamma * start`` in pencil space.

    Both ends are scaled to unit norm first; node sets are invariant under
    scaling a pencil, and multiplying the start by a generic unit complex
    ``gamma`` keeps the segment away from the real discriminant.
    """

    def __init__(self, start_mats, target_mats, chart: Chart, gamma: complex):
        start = np.asarray(start_mats, dtype=complex)
        target = np.asarray(target_mats, dtype=complex)
        self.start = gamma * start / np.linalg.norm(start)
        self.target = target / np.linalg.norm(target)
        self.direction = self.start - self.target
        self.chart = chart
        self._segment = PencilSegment(self.target, self.direction, chart)

    def __call__(self, p, tau, want_tau=True, rows=None):
        return self._segment(p, tau, want_tau)


@dataclass(frozen=True, eq=False)
class StartSystem:
    """``y_j^4 = r_j`` in the three chart coordinates other than ``eliminated``."""

    chart: Chart
    eliminated: int
    free: tuple
    r: np.ndarray

    def residual(self, p):
        return p[..., list(self.free)] ** 4 - self.r


def total_degree_start(chart: Chart, seed=0):
    """Start system and its 64 roots, lifted onto the chart."""
    c = chart.linear
    if not np.any(c):
        raise ValueError("degenerate chart")
    rng = np.random.default_rng([seed, 1])
    elim = int(np.argmax(np.abs(c)))
    free = tuple(k for k in range(4) if k != elim)
    r = np.exp(2j * np.pi * rng.random(3))
    roots = [r[j] ** 0.25 * 1j ** np.arange(4) for j in range(3)]
    grid = np.stack(np.meshgrid(*roots, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = np.zeros((64, 4), dtype=complex)
    pts[:, list(free)] = grid
    pts[:, elim] = -(chart.coeffs[4] + grid @ c[list(free)]) / c[elim]
    return StartSystem(chart, elim, free, r), pts


class TotalDegreeHomotopy:
    def __init__(self, start: StartSystem, target_mats, gamma: complex):
        self.start = start
        self.target = np.asarray(target_mats, dtype=complex)
        self.chart = start.chart
        self.gamma = gamma

    def __call__(self, p, tau, want_tau=True, rows=None):
        F, J, _ = evaluate(self.target, self.chart, p)
        free = list(self.start.free)
        G = self.start.residual(p)
        s = tau[:, None]
        H = F.copy()
        H[:, :3] = (1 - s) * F[:, :3] + s * self.gamma * G
        Hp = J.copy()
        Hp[:, :3, :] *= (1 - s)[..., None]
        rows = np.arange(3)
        Hp[:, rows, free] += s * self.gamma * 4 * p[:, free] ** 3
        Ht = None
        if want_tau:
            Ht = np.zeros_like(H)
            Ht[:, :3] = self.gamma * G - F[:, :3]
        return H, Hp, Ht


def _newton(hfun, p, tau, tol, max_iters, rows):
    """Newton at fixed ``tau``; returns corrected points, convergence flags and iteration counts."""
    p = p.copy()
    conv = np.zeros(len(p), dtype=bool)
    iters = np.zeros(len(p), dtype=int)
    active = np.arange(len(p))
    prev = np.full(len(p), np.inf)
    for _ in range(max_iters):
        H, Hp, _ = hfun(p[active], tau[active], want_tau=False, rows=rows[active])
        dx = _solve(Hp, H)
        p[active] -= dx
        iters[active] += 1
        size = np.linalg.norm(dx, axis=1) / (1 + np.linalg.norm(p[active], axis=1))
        # remaining error estimate from the observed contraction rate
        theta = size / prev[active]
        est = np.where(np.isfinite(prev[active]) & (theta < 0.5), size * theta / (1 - theta), size)
        prev[active] = size
        done = (size < tol) | (est < tol)
        conv[active[done]] = True
        active = active[~done & np.isfinite(size)]
        if len(active) == 0:
            break
    return p, conv, iters


def refine(hfun, p, tau=None, iters=6, rows=None):
    """Polish points at fixed ``tau`` (default 0); returns points and last relative step size."""
    p = np.array(p, dtype=complex)
    tau = np.zeros(len(p)) if tau is None else tau
    rows = np.arange(len(p)) if rows is None else rows
    size = np.full(len(p), np.inf)
    for _ in range(iters):
        H, Hp, _ = hfun(p, tau, want_tau=False, rows=rows)
        dx = _solve(Hp, H)
        ok = np.isfinite(dx).all(axis=1)
        p[ok] -= dx[ok]
        size = np.where(ok, np.linalg.norm(np.where(np.isfinite(dx), dx, 0), axis=1) / (1 + np.linalg.norm(p, axis=1)),
                        np.inf)
        if np.all(size < 1e-15):
            break
    return p, size


def _tangent(hfun, p, tau, rows):
    _, Hp, Ht = hfun(p, tau, rows=rows)
    return _solve(Hp, -Ht)


def _predict(hfun, p, tau, t_new, method, rows):
    dt = (t_new - tau)[:, None]
    k1 = _tangent(hfun, p, tau, rows)
    if method == "euler":
        return p + dt * k1
    half = tau + 0.5 * dt[:, 0]
    k2 = _tangent(hfun, p + 0.5 * dt * k1, half, rows)
    k3 = _tangent(hfun, p + 0.5 * dt * k2, half, rows)
    k4 = _tangent(hfun, p + dt * k3, t_new, rows)
    return p + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6


def track_paths(hfun: Callable, starts, opts: TrackOptions = TrackOptions()) -> List[PathResult]:
    """Track every start point from ``tau = 1`` to ``tau = 0``.

    ``hfun(p, tau, want_tau=True, rows=None)`` returns ``(H, dH/dp, dH/dtau)``
    for a batch of points; ``rows`` holds the path indices of the batch.
    """
    p = np.array(starts, dtype=complex)
    m = len(p)
    tau = np.ones(m)
    h = np.full(m, opts.initial_step)
    steps = np.zeros(m, dtype=int)
    easy = np.zeros(m, dtype=int)
    status = np.array([""] * m, dtype=object)
    active = np.arange(m)
    while len(active):
        hs = np.minimum(h[active], tau[active])
        t_new = tau[active] - hs
        t_new[t_new < 1e-14] = 0.0
        pred = _predict(hfun, p[active], tau[active], t_new, opts.predictor, active)
        bad_pred = ~np.isfinite(pred).all(axis=1)
        pred[bad_pred] = p[active][bad_pred]
        corr, conv, iters = _newton(hfun, pred, t_new, opts.corrector_tol, opts.max_newton_iters, active)
        conv &= ~bad_pred
        acc = active[conv]
        p[acc] = corr[conv]
        tau[acc] = t_new[conv]
        steps[acc] += 1
        easy[acc] = np.where(iters[conv] <= 2, easy[acc] + 1, 0)
        grow = acc[easy[acc] >= 4]
        h[grow] = np.minimum(2 * h[grow], opts.max_step)
        easy[grow] = 0
        rej = active[~conv]
        h[rej] /= 2
        easy[rej] = 0
        status[rej[h[rej] < opts.min_step]] = SINGULAR
        norms = np.linalg.norm(p[acc], axis=1)
        status[acc[norms > opts.divergence_norm]] = DIVERGED
        status[active[(steps[active] >= opts.max_steps) & (status[active] == "")]] = STEP_LIMIT
        status[acc[(tau[acc] == 0) & (status[acc] == "")]] = "done"
        active = active[status[active] == ""]
    done = np.flatnonzero(status == "done")
    final = np.full(m, np.inf)
    if len(done):
        p[done], final[done] = refine(hfun, p[done], rows=done)
        status[done] = np.where(final[done] < opts.corrector_tol, SUCCESS, SINGULAR)
    return [PathResult(p[i].copy(), str(status[i]), int(steps[i]), float(final[i]), i) for i in range(m)]


def track_path(hfun: Callable, start, opts: TrackOptions = TrackOptions()) -> PathResult:
    return track_paths(hfun, np.asarray(start)[None, :], opts)[0]


def _distinct(points, tol=1e-6):
    q = points / np.linalg.norm(points, axis=1)[:, None]
    d = np.linalg.norm(q[:, None, :] - q[None, :, :], axis=-1)
    np.fill_diagonal(d, np.inf)
    return bool(np.all(d > tol))


@functools.lru_cache(maxsize=16)
def _start_pencil_solutions(chart_key: bytes, seed: int, opts: TrackOptions):
    chart = Chart(np.frombuffer(chart_key))
    for attempt in range(8):
        rng = np.random.default_rng([seed, 2, attempt])
        mats = rng.standard_normal((4, 5, 5)) + 1j * rng.standard_normal((4, 5, 5))
        mats = mats + np.swapaxes(mats, 1, 2)
        start, pts = total_degree_start(chart, seed + 7919 * attempt)
        hom = TotalDegreeHomotopy(start, mats, _random_gamma(rng))
        results = track_paths(hom, pts, opts)
        ends = np.array([r.endpoint for r in results])
        if all(r.ok for r in results) and _distinct(ends):
            ends.setflags(write=False)
            mats.setflags(write=False)
            return mats, ends
    raise RuntimeError("could not solve the random complex start pencil")


def start_solutions(chart: Chart, seed=0, opts: TrackOptions = TrackOptions()):
    """The cached random complex pencil and its 64 node-system solutions."""
    return _start_pencil_solutions(chart.coeffs.tobytes(), int(seed), opts)


def solve_from(start_mats, start_points, target: Pencil, chart: Chart, opts: TrackOptions = TrackOptions(),
               seed=0) -> List[PathResult]:
    """Parameter homotopy from a solved pencil to ``target``."""
    rng = np.random.default_rng([seed, 3])
    gamma = opts.gamma if opts.gamma is not None else _random_gamma(rng)
    hom = ParameterHomotopy(start_mats, target.mats, chart, gamma)
    return track_paths(hom, start_points, opts)


def solve_nodes(P: Pencil, chart: Chart, opts: TrackOptions = TrackOptions(), seed=0) -> List[PathResult]:
    """All 64 solutions of the node system of ``P`` (two-stage solve)."""
    star, pts = start_solutions(chart, seed, opts)
    return solve_from(star, pts, P, chart, opts, seed)


def endpoints(results) -> np.ndarray:
    return np.array([r.endpoint for r in results])


def all_ok(results) -> bool:
    return all(r.ok for r in results)


@dataclass(frozen=True, eq=False)
class NodeSolve:
    """A solved node system in a generic frame.

    ``endpoints`` are in frame coordinates ``y`` (the chart lives there);
    ``points`` are the same solutions in pencil coordinates ``p = L y``.
    """

    pencil: Pencil
    framed: Pencil
    frame: np.ndarray
    chart: Chart
    results: tuple

    @property
    def endpoints(self):
        return endpoints(self.results)

    @property
    def points(self):
        return self.endpoints @ self.frame.T.astype(float)

    @property
    def ok(self):
        return all_ok(self.results)

    @property
    def failures(self):
        return sum(not r.ok for r in self.results)


# (frame offset, step refinement) pairs tried in order by :func:`solve`
ATTEMPTS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0))
NODE_D_TOL = Tolerances().d_tol


def _retrack_options(opts: TrackOptions, level: int) -> TrackOptions:
    scale = 0.25 ** level
    return dataclasses.replace(opts, max_step=opts.max_step * scale,
                               initial_step=min(opts.initial_step, opts.max_step * scale))


def _node_count(P: Pencil, points):
    q = points / np.linalg.norm(points, axis=1, keepdims=True)
    d = extended_values(P, q)[0]
    return int(np.sum(np.abs(d) < NODE_D_TOL * np.abs(d).max()))


def solve(P: Pencil, seed=0, opts: TrackOptions = TrackOptions(), chart: Optional[Chart] = None,
          frame=None, attempts=ATTEMPTS) -> NodeSolve:
    """Solve the node system of ``P`` in a generic integer frame (two-stage solve).

    A solve is accepted when every path succeeds, the 64 endpoints are
    distinct and exactly 20 of them have vanishing determinant.  Otherwise the
    homotopy is re-run with a smaller maximal step (against path jumping) or
    in the next frame (a node on the frame's plane makes the system
    singular).  The last attempt is returned if none is accepted.
    """
    chart = Chart.random([seed, 6]) if chart is None else chart
    star, pts = start_solutions(chart, seed, opts)
    out = None
    for k, (shift, level) in enumerate(attempts):
        L = generic_frame(seed + shift) if frame is None else np.asarray(frame)
        framed = P.recombined(L)
        results = solve_from(star, pts, framed, chart, _retrack_options(opts, level), seed + 104729 * k)
        out = NodeSolve(P, framed, L, chart, tuple(results))
        if out.ok and _distinct(out.endpoints) and _node_count(P, out.points) == 20:
            break
    return out


def track_to_many(start_mats, start_points, targets, chart: Chart, opts: TrackOptions = TrackOptions(),
                  seed=0) -> List[List[PathResult]]:
    """Parameter homotopies from one solved pencil to several target pencils, tracked as one batch.

    Returns one list of results per target, in the order of ``start_points``.
    """
    rng = np.random.default_rng([seed, 3])
    gamma = opts.gamma if opts.gamma is not None else _random_gamma(rng)
    start = gamma * np.asarray(start_mats, dtype=complex)
    start = start / np.linalg.norm(start)
    bases = [np.asarray(T, dtype=complex) / np.linalg.norm(T) for T in targets]
    dirs = [start - b for b in bases]
    m = len(start_points)
    groups = np.repeat(np.arange(len(targets)), m)
    starts = np.tile(np.asarray(start_points), (len(targets), 1))
    res = track_paths(SegmentBundle(bases, dirs, chart, groups), starts, opts)
    out = []
    for k in range(len(targets)):
        chunk = res[k * m:(k + 1) * m]
        for i, r in enumerate(chunk):
            r.start_index = i
        out.append(chunk)
    return out
