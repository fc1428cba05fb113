import numpy as np
import pytest

from symmetroids.pencil import Pencil, det_and_grad
from symmetroids.polysys import (Chart, NodeSystem, PencilSegment, SegmentBundle, _generic_normal, _plane_normal,
                                 evaluate, extended_values, generic_frame, jacobian, residual)

from conftest import random_pencil


def test_residual_is_x_gradient_plus_chart(rng):
    P = random_pencil(0)
    chart = Chart.random(1)
    p = rng.standard_normal((5, 4))
    F = residual(NodeSystem(P, chart), p)
    _, g = det_and_grad(P, p)
    np.testing.assert_allclose(F[:, :3], g[:, 1:], rtol=1e-12)
    np.testing.assert_allclose(F[:, 3], chart.value(p))


def test_jacobian_against_finite_differences(rng):
    P = random_pencil(4)
    S = NodeSystem(P, Chart.random(2))
    p = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    J = jacobian(S, p)
    h = 1e-6
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        fd = (residual(S, p + e) - residual(S, p - e)) / (2 * h)
        np.testing.assert_allclose(J[:, :, k], fd, rtol=1e-5, atol=1e-8 * np.abs(J).max())


def test_pencil_direction_derivative(rng):
    P = random_pencil(5)
    dm = rng.standard_normal((4, 5, 5))
    dm = dm + np.swapaxes(dm, 1, 2)
    chart = Chart.random(3)
    p = rng.standard_normal((4, 4))
    _, _, dF = evaluate(P.mats, chart, p, dmats=dm)
    h = 1e-6
    fd = (evaluate(P.mats + h * dm, chart, p)[0] - evaluate(P.mats - h * dm, chart, p)[0]) / (2 * h)
    np.testing.assert_allclose(dF, fd, rtol=1e-5, atol=1e-8 * np.abs(dF).max())


def test_segment_and_bundle_match_direct_evaluation(rng):
    A, B, C = (random_pencil(k).mats.astype(complex) for k in (6, 7, 8))
    chart = Chart.random(4)
    p = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
    tau = rng.random(6)
    seg = PencilSegment(A, B - A, chart)
    F, J, dF = seg(p, tau)
    for i in range(6):
        Fi, Ji, dFi = evaluate(A + tau[i] * (B - A), chart, p[i:i + 1], dmats=B - A)
        np.testing.assert_allclose(F[i], Fi[0], rtol=1e-10)
        np.testing.assert_allclose(J[i], Ji[0], rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(dF[i], dFi[0], rtol=1e-10, atol=1e-12)
    groups = np.array([0, 1, 0, 1, 1, 0])
    bundle = SegmentBundle([A, C], [B - A, B - C], chart, groups)
    Fb, Jb, dFb = bundle(p, tau)
    seg2 = PencilSegment(C, B - C, chart)
    for i, g in enumerate(groups):
        ref = (seg if g == 0 else seg2)(p[i:i + 1], tau[i:i + 1])
        np.testing.assert_allclose(Fb[i], ref[0][0], rtol=1e-10)
        np.testing.assert_allclose(Jb[i], ref[1][0], rtol=1e-10, atol=1e-12)


def test_chart_lift_and_validation():
    chart = Chart.random(0)
    q = np.array([[1.0, 2.0, 3.0, 4.0]])
    assert chart.value(chart.lift(q))[0] == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValueError):
        Chart([0, 0, 0, 0, 1])


@pytest.mark.parametrize("seed", range(8))
def test_generic_frame_properties(seed):
    L = generic_frame(seed)
    assert L.dtype.kind == "i"
    assert abs(round(np.linalg.det(L))) >= 1
    w = _plane_normal(L)
    assert np.all(w != 0) and _generic_normal(w)
    np.testing.assert_allclose(w @ L[:, 1:], 0, atol=1e-9)


def test_generic_normal_rejects_symmetric_normals():
    assert not _generic_normal(np.array([0, 0, 1, 1]))
    assert not _generic_normal(np.array([1, 2, 3, 7]))  # 1 + 2 - 3 = 0
    assert _generic_normal(np.array([1, 2, 4, 8]))


def test_extended_values_frame_independent(rng):
    P = random_pencil(9)
    L = generic_frame(0)
    y = rng.standard_normal((3, 4))
    d1, m1 = extended_values(P.recombined(L), y)
    d2, m2 = extended_values(P, y @ L.T)
    np.testing.assert_allclose(d1, d2, rtol=1e-9)
    np.testing.assert_allclose(m1, m2, rtol=1e-9, atol=1e-9)
