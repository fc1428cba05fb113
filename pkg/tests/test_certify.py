from fractions import Fraction

import numpy as np
import pytest

from symmetroids.certify import (NEG, POS, ZERO, certify_pencil, certify_reality, certify_solve, classify_signs,
                                 format_certificate, krawczyk, parse_certificate_intervals, symmetric_sums)
from symmetroids.classify import classify_endpoints, comb_type
from symmetroids.interval import CInterval, Interval
from symmetroids.linalg import principal_minors
from symmetroids.pencil import Pencil
from symmetroids.tracker import solve

from conftest import random_pencil


def test_krawczyk_on_one_variable():
    # f(x) = x^2 - 2 near sqrt(2)
    y = np.array([[1.41421356]], dtype=complex)
    X = CInterval.around(y, 1e-3)
    fy = CInterval.point(y * y - 2)
    J = (X * X.re.mid() * 0 + X) * 2.0  # 2X
    K, ok = krawczyk(fy, J.reshape(1, 1, 1), y, X)
    assert ok[0]
    assert K.re.lo[0, 0] <= np.sqrt(2) <= K.re.hi[0, 0]
    far = CInterval.around(np.array([[3.0 + 0j]]), 1e-3)
    K, ok = krawczyk(CInterval.point(np.array([[7.0 + 0j]])), (far * 2.0).reshape(1, 1, 1),
                     np.array([[3.0 + 0j]]), far)
    assert not ok[0]


def test_reality_test():
    real_box = CInterval(Interval(np.array([[1.0, 2.0]]), np.array([[1.1, 2.1]])),
                         Interval(np.array([[-1e-9, -1e-9]]), np.array([[1e-9, 1e-9]])))
    nonreal = CInterval(Interval(np.array([[1.0, 2.0]]), np.array([[1.1, 2.1]])),
                        Interval(np.array([[0.5, -1e-9]]), np.array([[0.6, 1e-9]])))
    lopsided = CInterval(Interval(np.array([[1.0]]), np.array([[1.1]])),
                         Interval(np.array([[-1e-9]]), np.array([[2e-9]])))
    assert list(certify_reality(real_box)) == [True]
    assert list(certify_reality(nonreal)) == [False]
    assert list(certify_reality(lopsided)) == [None]  # conj(box) not inside box: undecided


def test_sign_rule_matches_eigenvalues(rng):
    for _ in range(200):
        ev = np.concatenate([rng.choice([-1, 1], 3) * rng.uniform(0.5, 2, 3), [0, 0]])
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        M = Q @ np.diag(ev) @ Q.T
        pm = principal_minors(M)
        E = symmetric_sums(Interval.point(pm))
        signs = [POS if v > 0 else NEG for v in E.mid()]
        semidef = np.all(ev[:3] > 0) or np.all(ev[:3] < 0)
        assert classify_signs(signs) == ("semidefinite" if semidef else "indefinite")
    assert classify_signs([POS, ZERO, POS]) == "ambiguous"


def test_certified_type_matches_heuristic_on_random_pencil():
    P = random_pencil(31)
    S = solve(P, seed=0)
    cert = certify_solve(S)
    assert cert.successful, cert.reason
    nodes, _ = classify_endpoints(P, S.points)
    assert cert.type == comb_type(nodes)
    assert sum(c.node for c in cert.certificates) == 20
    assert sum(not c.d_interval.contains_zero() for c in cert.certificates) == 44


def test_certificate_file_roundtrip_and_outward_rounding():
    P = random_pencil(32)
    cert = certify_pencil(P, seed=0)
    assert cert.successful
    text = format_certificate(cert)
    assert f"summary: rho={cert.type.rho} sigma={cert.type.sigma}" in text
    boxes = parse_certificate_intervals(text)
    assert len(boxes) == 64
    for b, c in zip(boxes, cert.certificates):
        assert np.all(b[:, 0, 0] < c.box.re.lo) and np.all(b[:, 0, 1] > c.box.re.hi)
        assert np.all(b[:, 1, 0] < c.box.im.lo) and np.all(b[:, 1, 1] > c.box.im.hi)


def test_rational_pencil_certification_sees_exact_entries():
    P = random_pencil(33).rounded()
    assert P.exact is not None
    cert = certify_pencil(P, seed=0)
    assert cert.successful and cert.attempts <= 3


def test_near_singular_tampered_pencil_is_unsuccessful():
    # two nodes of a diagonal-block pencil made to (nearly) collide
    from symmetroids.families import degenerate_pencil
    mats = np.array(degenerate_pencil().mats)
    mats[1, 0, 1] += 1e-13
    mats[1, 1, 0] += 1e-13
    cert = certify_pencil(Pencil(mats), seed=0, attempts=1)
    assert not cert.successful
    assert cert.reason


def test_wrong_endpoint_count_is_reported():
    from symmetroids.certify import certified_type
    from symmetroids.polysys import Chart
    cert = certified_type(random_pencil(34), np.ones((10, 4)), Chart.random(0))
    assert not cert.successful and "expected 64" in cert.reason
