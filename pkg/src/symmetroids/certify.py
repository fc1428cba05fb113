"""A posteriori certification of node counts with the Krawczyk operator.

Each of the 64 approximate solutions of the square node system is enclosed in
a complex box on which the Krawczyk image contracts, proving a unique zero in
the box.  The determinant and the 25 principal minors are then enclosed over
the boxes: 44 boxes must exclude ``det = 0``, which forces the remaining 20
boxes to hold the nodes.  Reality comes from a conjugation test and
semidefiniteness from certified signs of the principal minors.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .classify import CombType
from .interval import CInterval, Interval, matmat, matvec
from .linalg import adjugate_from_minors, all_minors, complementary_cofactors, \
    polarized_pair_minors, principal_minors_from
from .pencil import Pencil, format_pencil
from .polysys import Chart, NodeSystem

FORMAT_VERSION = 1
RADIUS_FACTORS = (1.0, 0.1, 0.01, 10.0, 0.001, 1e-4, 1e-5)
BASE_RADIUS = 1e-4
N_SOLUTIONS = 64
N_NODES = 20

POS, NEG, ZERO = "+", "-", "0"


class CertificationFailed(Exception):
    pass


def krawczyk(f_center: CInterval, jac_box: CInterval, center, box: CInterval):
    """Krawczyk image ``y - Y f(y) + (I - Y J(X)) (X - y)`` for a batch of boxes.

    ``f_center`` encloses ``f(y)`` (shape ``(n, m)``), ``jac_box`` encloses the
    Jacobian over ``box`` (shape ``(n, m, m)``).  Returns ``(K, ok)`` where ``ok``
    marks rows with ``K`` strictly inside ``box``: there the box holds exactly
    one zero, and it lies in ``K``.  Rows with a singular midpoint Jacobian are
    never ``ok``.
    """
    center = np.asarray(center, dtype=complex)
    mid = jac_box.mid()
    n, m = center.shape
    Y = np.full((n, m, m), np.nan, dtype=complex)
    for i in range(n):
        try:
            Y[i] = np.linalg.inv(mid[i])
        except np.linalg.LinAlgError:
            pass
    good = np.isfinite(Y).all(axis=(1, 2))
    Y[~good] = 0
    step = matvec(Y, f_center)
    resid = CInterval.point(np.broadcast_to(np.eye(m), (n, m, m))) - matmat(Y, jac_box)
    K = (CInterval.point(center) - step) + matvec(resid, box - center)
    ok = K.inside_interior_of(box).all(axis=-1) & good
    return K, ok


def _intersect(a: CInterval, b: CInterval) -> CInterval:
    return CInterval(a.re.intersect(b.re), a.im.intersect(b.im))


class IntervalNodeSystem:
    """Interval enclosures of the node system for a pencil with exact or float entries."""

    def __init__(self, P: Pencil, chart: Chart):
        self.pencil = P
        self.chart = chart
        self.mats = P.enclosure()
        A = self.mats
        self._pol = polarized_pair_minors(A[1:, None], A[None, :])  # (3, 4, 10, 10)

    def matrix(self, X):
        X = CInterval.coerce(X)
        return (X[..., :, None, None] * self.mats).sum(axis=-3)

    def real_matrix(self, X: Interval):
        return (X[..., :, None, None] * self.mats).sum(axis=-3)

    def residual(self, y):
        """Enclosure of the residual at points ``y`` (complex array ``(n, 4)``)."""
        y = np.asarray(y, dtype=complex)
        minors = all_minors(self.matrix(y), upto=4)
        adj = adjugate_from_minors(minors)
        grad = (adj[..., None, :, :] * self.mats[1:]).sum(axis=(-2, -1))
        chart = (CInterval.point(y) * self.chart.linear).sum(axis=-1) + self.chart.coeffs[4]
        return CInterval.concatenate([grad, chart[..., None]], axis=-1)

    def jacobian(self, X: CInterval):
        minors = all_minors(self.matrix(X), upto=3)
        cof2 = complementary_cofactors(minors)
        J = (cof2[:, None, None] * self._pol).sum(axis=(-2, -1))  # (n, 3, 4)
        n = J.shape[0]
        chart_row = CInterval.point(np.broadcast_to(self.chart.linear, (n, 1, 4)).astype(complex))
        return CInterval.concatenate([J, chart_row], axis=1)

    def det_and_dt(self, X: CInterval):
        """Enclosures of ``D`` and ``dD/dt`` over boxes."""
        minors = all_minors(self.matrix(X))
        adj = adjugate_from_minors(minors)
        dt = (adj * self.mats[0]).sum(axis=(-2, -1))
        return minors[5][..., 0, 0], dt

    def minors(self, X):
        if isinstance(X, Interval):
            M = self.real_matrix(X)
        else:
            M = self.matrix(X)
        return principal_minors_from(all_minors(M, upto=3))


@dataclass
class Certificate:
    box: CInterval
    unique: bool
    real: bool = False
    node: bool = False
    d_interval: Optional[CInterval] = None
    minor_intervals: Optional[object] = None
    sign_pattern: str = ""
    esums: Optional[Interval] = None
    kind: str = ""

    @property
    def semidefinite(self):
        return self.kind == "semidefinite"


@dataclass
class Certification:
    """Outcome of :func:`certified_type`."""

    type: Optional[CombType]
    reason: str = ""
    certificates: List[Certificate] = field(default_factory=list)
    chart: Optional[Chart] = None
    pencil: Optional[Pencil] = None
    frame: Optional[np.ndarray] = None
    attempts: int = 1
    seed: Optional[int] = None

    @property
    def successful(self):
        return self.type is not None


def krawczyk_test(system, approx, radius_scale=BASE_RADIUS, refine_steps=2):
    """Krawczyk-certify approximate zeros of the node system.

    ``system`` is a :class:`NodeSystem` or :class:`IntervalNodeSystem`.
    Boxes start at ``approx +- radius_scale * (1 + |approx|)`` and the
    inflation is retried through :data:`RADIUS_FACTORS`.  After success the box
    is tightened by ``refine_steps`` further contractions.

    Returns ``(boxes, ok)``: a :class:`CInterval` of shape ``(n, 4)`` and a
    boolean array.  Only rows with ``ok`` are certified.
    """
    isys = system if isinstance(system, IntervalNodeSystem) else IntervalNodeSystem(system.pencil, system.chart)
    y = np.array(approx, dtype=complex, ndmin=2)
    n = len(y)
    looks_real = np.abs(y.imag).max(axis=1) < 1e-10 * (1 + np.abs(y).max(axis=1))
    y[looks_real] = y[looks_real].real
    mag = 1 + np.abs(y)
    boxes = CInterval.around(y, radius_scale * mag)
    ok = np.zeros(n, dtype=bool)
    f_center = isys.residual(y)
    for factor in RADIUS_FACTORS:
        todo = np.flatnonzero(~ok)
        if len(todo) == 0:
            break
        X = CInterval.around(y[todo], factor * radius_scale * mag[todo])
        K, good = krawczyk(f_center[todo], isys.jacobian(X), y[todo], X)
        if np.any(good):
            idx = todo[good]
            boxes[idx] = _intersect(K[good], X[good])
            ok[idx] = True
    for _ in range(refine_steps):
        idx = np.flatnonzero(ok)
        if len(idx) == 0:
            break
        X = boxes[idx]
        c = X.mid()
        K, good = krawczyk(isys.residual(c), isys.jacobian(X), c, X)
        # the zero lies in K(X) whenever X is known to hold it, even without strict containment
        boxes[idx] = _intersect(K, X)
    return boxes, ok


def certify_reality(box: CInterval):
    """True iff the conjugate of the (unique-zero) box lies inside the box; False if disjoint.

    Returns ``None`` when neither can be shown.
    """
    conj = box.conj()
    inside = conj.im.lo >= box.im.lo
    inside &= conj.im.hi <= box.im.hi
    inside = inside.all(axis=-1)
    disjoint = ~(conj.im.overlaps(box.im).all(axis=-1))
    result = np.full(inside.shape, None, dtype=object)
    result[inside] = True
    result[disjoint & ~inside] = False
    return result


def sign_pattern(minors: Interval) -> np.ndarray:
    signs = np.full(minors.shape, ZERO, dtype="<U1")
    signs[minors.lo > 0] = POS
    signs[minors.hi < 0] = NEG
    return signs


def symmetric_sums(minors: Interval) -> Interval:
    """Enclosures of ``E1, E2, E3``, the sums of principal minors of each size."""
    return Interval.concatenate([minors[..., 0:5].sum(axis=-1)[..., None],
                                 minors[..., 5:15].sum(axis=-1)[..., None],
                                 minors[..., 15:25].sum(axis=-1)[..., None]], axis=-1)


def classify_signs(esigns) -> str:
    """``semidefinite``, ``indefinite`` or ``ambiguous`` from certified signs of ``E1, E2, E3``.

    At a corank-2 node the minors of size 4 and 5 vanish, so the
    characteristic polynomial is ``l^2 (l^3 - E1 l^2 + E2 l - E3)``.  The
    cubic has three real nonzero roots, all positive iff ``E1, E2, E3 > 0``
    and all negative iff ``E1 < 0 < E2`` and ``E3 < 0`` (Descartes' rule).  Any
    other strict pattern means mixed signs.  A zero-containing enclosure
    leaves the decision open.
    """
    esigns = list(esigns)
    if ZERO in esigns:
        return "ambiguous"
    if esigns == [POS, POS, POS] or esigns == [NEG, POS, NEG]:
        return "semidefinite"
    return "indefinite"


def _pairwise_disjoint(boxes: CInterval) -> bool:
    lo_r, hi_r = boxes.re.lo, boxes.re.hi
    lo_i, hi_i = boxes.im.lo, boxes.im.hi
    ov = np.ones((len(lo_r), len(lo_r)), dtype=bool)
    for k in range(lo_r.shape[1]):
        ov &= (lo_r[:, None, k] <= hi_r[None, :, k]) & (lo_r[None, :, k] <= hi_r[:, None, k])
        ov &= (lo_i[:, None, k] <= hi_i[None, :, k]) & (lo_i[None, :, k] <= hi_i[:, None, k])
    np.fill_diagonal(ov, False)
    return not ov.any()


def certified_type(P: Pencil, endpoints, chart: Chart, results=None) -> Certification:
    """Certified combinatorial type from 64 approximate solutions.

    Follows the pipeline: certify 64 disjoint boxes, discard the 44 whose
    determinant enclosure excludes zero, count real boxes among the remaining
    20, and classify each real node by the signs of its principal minors.
    """
    out = Certification(None, chart=chart, pencil=P)
    if results is not None and not all(r.ok for r in results):
        out.reason = "path failure"
        return out
    y = np.asarray(endpoints, dtype=complex)
    if y.shape != (N_SOLUTIONS, 4):
        out.reason = f"expected {N_SOLUTIONS} endpoints, got {y.shape[0]}"
        return out
    isys = IntervalNodeSystem(P, chart)
    boxes, ok = krawczyk_test(isys, y)
    out.certificates = [Certificate(boxes[i], bool(ok[i])) for i in range(N_SOLUTIONS)]
    if not ok.all():
        out.reason = f"Krawczyk inconclusive for {int((~ok).sum())} solutions"
        return out
    if not _pairwise_disjoint(boxes):
        out.reason = "certified boxes are not pairwise disjoint"
        return out
    d, _ = isys.det_and_dt(boxes)
    nonzero = ~d.contains_zero()
    for i, cert in enumerate(out.certificates):
        cert.d_interval = d[i]
        cert.node = bool(~nonzero[i])
    if nonzero.sum() != N_SOLUTIONS - N_NODES:
        out.reason = f"{int(nonzero.sum())} boxes exclude det = 0, expected {N_SOLUTIONS - N_NODES}"
        return out
    nodes = np.flatnonzero(~nonzero)
    reality = certify_reality(boxes[nodes])
    if any(r is None for r in reality):
        out.reason = "reality undecided for some node box"
        return out
    real_nodes = nodes[reality.astype(bool)]
    for i, r in zip(nodes, reality):
        out.certificates[i].real = bool(r)
        if not r:
            out.certificates[i].kind = "nonreal"
    sigma = 0
    if len(real_nodes):
        minors = isys.minors(boxes[real_nodes].re)
        for j, i in enumerate(real_nodes):
            cert = out.certificates[i]
            cert.minor_intervals = minors[j]
            cert.sign_pattern = "".join(sign_pattern(minors[j]))
            cert.esums = symmetric_sums(minors[j])
            cert.kind = classify_signs(sign_pattern(cert.esums))
            if cert.kind == "ambiguous":
                out.reason = f"minor signs undecided at node box {i}"
                return out
            sigma += cert.kind == "semidefinite"
    out.type = CombType(len(real_nodes), sigma)
    return out


def certify_solve(solve) -> Certification:
    """:func:`certified_type` for a :class:`~symmetroids.tracker.NodeSolve` (works in its frame)."""
    out = certified_type(solve.framed, solve.endpoints, solve.chart, solve.results)
    out.pencil = solve.pencil
    out.frame = np.asarray(solve.frame)
    return out


def certify_pencil(P: Pencil, seed=0, opts=None, attempts=3) -> Certification:
    """Solve the node system of ``P`` and certify its combinatorial type.

    An inconclusive run is repeated with the next seed (new chart, frame and
    start system), up to ``attempts`` runs; conditioning of the 44 non-node
    solutions depends on those choices.  ``Certification.attempts`` records
    how many runs were used.
    """
    from .tracker import TrackOptions, solve
    out = None
    for k in range(attempts):
        out = certify_solve(solve(P, seed + k, opts or TrackOptions()))
        out.attempts = k + 1
        out.seed = seed + k
        if out.successful:
            break
    return out


# -- certificate files ------------------------------------------------------

def _fmt_lo(x):
    return repr(float(np.nextafter(x, -np.inf)))


def _fmt_hi(x):
    return repr(float(np.nextafter(x, np.inf)))


def _fmt_interval(iv: Interval):
    return f"[{_fmt_lo(iv.lo)}, {_fmt_hi(iv.hi)}]"


def _fmt_cinterval(z: CInterval):
    return f"{_fmt_interval(z.re)} + i{_fmt_interval(z.im)}"


def pencil_digest(P: Pencil) -> str:
    return hashlib.sha256(format_pencil(P).encode()).hexdigest()


def format_certificate(cert: Certification) -> str:
    """Human-readable certificate; every printed endpoint is rounded outward."""
    lines = [f"# symmetroids certificate v{FORMAT_VERSION}"]
    if cert.seed is not None:
        lines.append(f"seed: {cert.seed}")
    if cert.pencil is not None:
        lines.append(f"pencil_sha256: {pencil_digest(cert.pencil)}")
    if cert.frame is not None:
        lines.append("frame: " + " ".join(str(int(v)) for v in np.ravel(cert.frame)))
    if cert.chart is not None:
        lines.append("chart: " + " ".join(repr(float(c)) for c in cert.chart.coeffs))
    if cert.successful:
        lines.append(f"type: {cert.type.rho} {cert.type.sigma}")
    else:
        lines.append(f"result: Unsuccessful ({cert.reason})")
    lines.append(f"boxes: {len(cert.certificates)}")
    names = ("t", "x1", "x2", "x3")
    for i, c in enumerate(cert.certificates):
        flags = f"unique={'yes' if c.unique else 'no'} node={'yes' if c.node else 'no'} real={'yes' if c.real else 'no'}"
        if c.kind:
            flags += f" class={c.kind}"
        lines.append(f"box {i} {flags}")
        for k in range(4):
            lines.append(f"  {names[k]}: {_fmt_cinterval(c.box[k])}")
        if c.d_interval is not None:
            lines.append(f"  d: {_fmt_cinterval(c.d_interval)}")
        if c.sign_pattern:
            lines.append(f"  minor_signs: {c.sign_pattern}")
        if c.esums is not None:
            lines.append("  E1,E2,E3: " + " ".join(_fmt_interval(c.esums[k]) for k in range(3)))
    if cert.successful:
        lines.append(f"summary: rho={cert.type.rho} sigma={cert.type.sigma}")
    return "\n".join(lines) + "\n"


def parse_certificate_intervals(text: str):
    """Read back the box enclosures of a certificate file as a list of ``(4, 2, 2)`` arrays."""
    boxes = []
    current = None
    for line in text.splitlines():
        if line.startswith("box "):
            current = []
            boxes.append(current)
        elif current is not None and line.strip()[:3] in ("t: ", "x1:", "x2:", "x3:"):
            body = line.split(":", 1)[1]
            re_part, im_part = body.split("+ i")
            re_lo, re_hi = (float(v) for v in re_part.strip().strip("[]").split(","))
            im_lo, im_hi = (float(v) for v in im_part.strip().strip("[]").split(","))
            current.append([[re_lo, re_hi], [im_lo, im_hi]])
    return [np.array(b) for b in boxes]
