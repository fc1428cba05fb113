"""Directional hill climbing in pencil space toward a target combinatorial type.

Each of the four directions pushes a pair of nodes of one class together:
two nonreal nodes (eta = 1 or 0) that should become real, or two real nodes
(semidefinite or indefinite) that should leave the real locus.  The objective
is ``(lattice distance to target, secondary)`` minimized lexicographically,
where the secondary value is the smallest imaginary part (``mu``) or the
smallest pairwise distance (``delta``) inside the class being pushed.

Neighbors are Gaussian perturbations of ``A1, A2, A3`` (``A0`` stays fixed).
Their nodes are obtained by continuing the 20 nodes of the current pencil
along a parameter homotopy; all neighbors of one iteration are tracked as a
single batch.  A climb succeeds only when the certified type of the reached
pencil equals the target.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .classify import (CombType, InadmissibleType, NONREAL_ETA0, NONREAL_ETA1, NongenericPencil, REAL_INDEFINITE,
                       REAL_SEMIDEFINITE, Tolerances, admissible_types, classify_endpoints, comb_type, tag_nodes)
from .linalg import upper_of
from .pencil import Pencil
from .polysys import evaluate
from .tracker import TrackOptions, _distinct, solve, track_to_many

INF = float("inf")
_ADMISSIBLE = frozenset(admissible_types(5))


class Direction(Enum):
    UP_DIAGONAL = (2, 2)
    UP = (2, 0)
    DOWN_DIAGONAL = (-2, -2)
    DOWN = (-2, 0)

    @property
    def vector(self):
        return self.value

    @property
    def secondary(self):
        """Name of the quantity pushed toward zero in this direction."""
        return _SECONDARY[self]

    @property
    def diagonal(self):
        return self.value[1] != 0


_SECONDARY = {
    Direction.UP_DIAGONAL: "mu_plus",
    Direction.UP: "mu_minus",
    Direction.DOWN_DIAGONAL: "delta_plus",
    Direction.DOWN: "delta_minus",
}


def lattice_distance(tau, tau2) -> int:
    """Fewest steps ``(+-2, +-2)`` or ``(+-2, 0)`` from ``tau`` to ``tau2``."""
    dr = tau2[0] - tau[0]
    ds = tau2[1] - tau[1]
    if dr % 2 or ds % 2:
        raise ValueError(f"types {tuple(tau)} and {tuple(tau2)} differ by an odd amount")
    return (abs(ds) + abs(dr - ds)) // 2


def bfs_lattice_distance(tau, tau2, bound=64) -> int:
    """Breadth-first search over the four generators and their negatives (test oracle)."""
    start, goal = tuple(tau), tuple(tau2)
    steps = [(2, 2), (2, 0), (-2, -2), (-2, 0)]
    seen = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            return seen[cur]
        if seen[cur] >= bound:
            continue
        for dr, ds in steps:
            nxt = (cur[0] + dr, cur[1] + ds)
            if nxt not in seen:
                seen[nxt] = seen[cur] + 1
                queue.append(nxt)
    raise ValueError("target not reachable within bound")


def choose_direction(current, target) -> Optional[Direction]:
    """An arrow on a shortest lattice path to ``target``; diagonal moves win ties."""
    dist = lattice_distance(current, target)
    if dist == 0:
        return None
    options = [d for d in Direction
               if lattice_distance((current[0] + d.value[0], current[1] + d.value[1]), target) == dist - 1]
    options.sort(key=lambda d: not d.diagonal)
    return options[0]


def mu_values(nodes):
    """``(mu_plus, mu_minus)``: least imaginary-part norm among nonreal nodes with eta = 1 resp. 0."""
    plus = [n.imag_norm for n in nodes if n.tag == NONREAL_ETA1]
    minus = [n.imag_norm for n in nodes if n.tag == NONREAL_ETA0]
    return (min(plus) if plus else INF, min(minus) if minus else INF)


def _min_projective_distance(mats):
    if len(mats) < 2:
        return INF
    X = np.array([m / np.linalg.norm(m) for m in mats])
    best = INF
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            d = min(np.linalg.norm(X[i] - X[j]), np.linalg.norm(X[i] + X[j]))
            best = min(best, float(d))
    return best


def delta_values(nodes):
    """``(delta_plus, delta_minus)``: least distance between two real semidefinite resp. indefinite nodes.

    Node matrices are scaled to unit Frobenius norm and compared up to sign.
    """
    plus = [n.matrix.real for n in nodes if n.tag == REAL_SEMIDEFINITE]
    minus = [n.matrix.real for n in nodes if n.tag == REAL_INDEFINITE]
    return _min_projective_distance(plus), _min_projective_distance(minus)


def secondary_value(nodes, direction: Direction) -> float:
    if direction is None:
        return INF
    if direction.secondary.startswith("mu"):
        mp, mm = mu_values(nodes)
        return mp if direction is Direction.UP_DIAGONAL else mm
    dp, dm = delta_values(nodes)
    return dp if direction is Direction.DOWN_DIAGONAL else dm


def objective(nodes, target, direction: Optional[Direction]):
    """``(lattice distance to target, secondary)``, smaller is better; ``inf`` is worst."""
    t = comb_type(nodes)
    return (lattice_distance(t, target), secondary_value(nodes, direction))


# -- climbing ---------------------------------------------------------------------

@dataclass(frozen=True)
class ClimbOptions:
    neighbors: int = 32
    eps_factor: float = 0.05
    shrink: float = 0.5
    eps_floor: float = 1e-8
    stagnant_levels: int = 6
    max_iterations: int = 200
    max_restarts: int = 10
    cond_limit: float = 1e12
    restart: str = "initial"  # or "random": fresh random pencil with the same A0
    certify: bool = True
    track: TrackOptions = field(default_factory=lambda: TrackOptions(initial_step=0.25))
    tols: Tolerances = field(default_factory=Tolerances)


@dataclass
class ClimbState:
    pencil: Pencil
    type: CombType
    objective: tuple
    nodes: list
    node_points: np.ndarray  # frame coordinates, for continuation


@dataclass
class ClimbResult:
    success: bool
    pencil: Optional[Pencil]
    type: Optional[CombType]
    best_type: Optional[CombType]
    iterations: int
    restarts: int
    certification: object = None
    reason: str = ""
    seed: int = 0


class Transcript:
    """Append-only line-delimited JSON log of a climb."""

    def __init__(self, path=None):
        self.path = path
        self.records = []
        self._fh = open(path, "a") if path else None

    def write(self, **rec):
        for k, v in rec.items():
            if isinstance(v, float) and not np.isfinite(v):
                rec[k] = None
        self.records.append(rec)
        if self._fh:
            self._fh.write(json.dumps(rec, sort_keys=True) + "\n")
            self._fh.flush()

    def close(self):
        if self._fh:
            self._fh.close()


def _perturb(P: Pencil, rng, eps):
    """``A0`` fixed; a Gaussian direction of unit norm in the 45 upper entries of ``A1..A3``, scaled by ``eps``."""
    G = rng.standard_normal((3, 15))
    G *= eps / np.linalg.norm(G)
    N = np.zeros((3, 5, 5))
    iu = np.triu_indices(5)
    N[:, iu[0], iu[1]] = G
    N[:, iu[1], iu[0]] = G
    mats = np.array(P.mats)
    mats[1:] += N
    return Pencil(mats)


class _Context:
    def __init__(self, solve_result, opts: ClimbOptions):
        self.frame = solve_result.frame
        self.Lf = np.asarray(self.frame, dtype=float)
        self.chart = solve_result.chart
        self.opts = opts

    def framed_mats(self, P: Pencil):
        return np.einsum("jk,jab->kab", self.Lf, P.mats)


def _initial_state(P: Pencil, target, seed, opts: ClimbOptions):
    S = solve(P, seed, opts.track)
    nodes, _ = classify_endpoints(P, S.points, opts.tols)
    q = S.points / np.linalg.norm(S.points, axis=1, keepdims=True)
    node_idx = _node_indices(P, q)
    t = comb_type(nodes)
    direction = choose_direction(t, target)
    state = ClimbState(P, t, objective(nodes, target, direction), nodes, S.endpoints[node_idx])
    return state, _Context(S, opts)


def _node_indices(P, q):
    from .polysys import extended_values
    d = np.abs(extended_values(P, q)[0])
    return np.argsort(d)[:20]


def _evaluate_neighbors(state: ClimbState, ctx: _Context, candidates, target, direction, seed):
    """Continue the current nodes to every candidate; returns ``(objective, type, nodes, points)`` or None each."""
    opts = ctx.opts
    targets = [ctx.framed_mats(Q) for Q in candidates]
    runs = track_to_many(ctx.framed_mats(state.pencil), state.node_points, targets, ctx.chart, opts.track, seed)
    out = []
    for Q, T, results in zip(candidates, targets, runs):
        if not all(r.ok for r in results):
            out.append(None)
            continue
        y = np.array([r.endpoint for r in results])
        if not _distinct(y):
            out.append(None)
            continue
        _, J, _ = evaluate(T, ctx.chart, y)
        if np.max(np.linalg.cond(J / np.linalg.norm(J[:, :3], axis=(1, 2))[:, None, None])) > opts.cond_limit:
            out.append(None)
            continue
        nodes = tag_nodes(Q, y @ ctx.Lf.T, opts.tols)
        if max(n.d for n in nodes) > opts.tols.d_tol:
            out.append(None)
            continue
        t = comb_type(nodes)
        if t not in _ADMISSIBLE:  # e.g. a conjugate pair half read as real
            out.append(None)
            continue
        out.append(((lattice_distance(t, target), secondary_value(nodes, direction)), t, nodes, y))
    return out


def _certify(P: Pencil, seed):
    from .certify import certify_pencil
    return certify_pencil(P.rounded(), seed)


def climb(P0: Pencil, target, opts: ClimbOptions = ClimbOptions(), seed=0, transcript=None) -> ClimbResult:
    """Climb from ``P0`` toward the combinatorial type ``target``.

    Raises :class:`InadmissibleType` for targets outside the 65 admissible
    types.  ``transcript`` is a path (appended to) or a :class:`Transcript`.
    On success ``result.pencil`` is the rounded pencil that was certified.
    """
    target = CombType(*target)
    if target not in admissible_types(5):
        raise InadmissibleType(f"target {target} is not an admissible type")
    log = transcript if isinstance(transcript, Transcript) else Transcript(transcript)
    rng = np.random.default_rng([seed, 11])
    try:
        return _climb(P0, target, opts, seed, rng, log)
    finally:
        if not isinstance(transcript, Transcript):
            log.close()


def _climb(P0, target, opts, seed, rng, log):
    state, ctx = _initial_state(P0, target, seed, opts)
    best_type = state.type
    log.write(event="start", seed=seed, type=list(state.type), target=list(target))
    total_iters = 0
    for restart in range(opts.max_restarts):
        if restart:
            P = P0 if opts.restart == "initial" else _random_restart(P0, rng)
            try:
                state, ctx = _initial_state(P, target, seed + restart, opts)
            except (NongenericPencil, Exception) as exc:  # unusable restart pencil
                log.write(event="restart_failed", restart=restart, reason=str(exc))
                continue
            log.write(event="restart", restart=restart, type=list(state.type))
        eps = opts.eps_factor * np.linalg.norm(state.pencil.mats[1:])
        floor = opts.eps_floor * np.linalg.norm(state.pencil.mats[1:])
        stagnant = 0
        for it in range(opts.max_iterations):
            if state.type == target:
                cert = _certify(state.pencil, seed) if opts.certify else None
                ok = cert is None or cert.type == target
                log.write(event="verify", restart=restart, iteration=it, type=list(state.type),
                          certified=None if cert is None else (list(cert.type) if cert.type else None),
                          reason="" if cert is None else cert.reason)
                if ok:
                    return ClimbResult(True, state.pencil.rounded(), target, target, total_iters, restart, cert,
                                       seed=seed)
            direction = choose_direction(state.type, target)
            if direction is None:
                # heuristic type matches but certification disagreed: keep moving at small scale
                direction = Direction.UP_DIAGONAL
            candidates = [_perturb(state.pencil, rng, eps) for _ in range(opts.neighbors)]
            evals = _evaluate_neighbors(state, ctx, candidates, target, direction, seed + total_iters)
            total_iters += 1
            cur_obj = (lattice_distance(state.type, target), secondary_value(state.nodes, direction))
            best = None
            for k, ev in enumerate(evals):
                if ev is None:
                    log.write(event="candidate", restart=restart, iteration=it, epsilon=eps, candidate=k,
                              type=None, phi=None, accepted=False)
                    continue
                if best is None or ev[0] < evals[best][0]:
                    best = k
            accepted = best is not None and evals[best][0] < cur_obj
            for k, ev in enumerate(evals):
                if ev is not None:
                    log.write(event="candidate", restart=restart, iteration=it, epsilon=eps, candidate=k,
                              type=list(ev[1]), phi=[ev[0][0], ev[0][1]], accepted=bool(accepted and k == best))
            if accepted:
                phi, t, nodes, y = evals[best]
                if phi[0] < cur_obj[0]:
                    step = (t[0] - state.type[0], t[1] - state.type[1])
                    assert step in [d.value for d in Direction], f"type jumped by {step}"
                state = ClimbState(candidates[best], t, phi, nodes, y)
                if lattice_distance(t, target) < lattice_distance(best_type, target):
                    best_type = t
                stagnant = 0
            else:
                eps *= opts.shrink
                stagnant += 1
                if stagnant >= opts.stagnant_levels or eps < floor:
                    break
    return ClimbResult(False, None, None, best_type, total_iters, opts.max_restarts,
                       reason="budget exhausted", seed=seed)


def _random_restart(P0: Pencil, rng):
    mats = np.array(P0.mats)
    scale = np.linalg.norm(mats[1:]) / np.sqrt(3 * 15)
    G = rng.standard_normal((3, 5, 5))
    mats[1:] = scale * (G + np.swapaxes(G, 1, 2)) / np.sqrt(2)
    return Pencil(mats)
