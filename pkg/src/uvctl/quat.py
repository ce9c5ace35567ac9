"""Unit-quaternion algebra and rigid-body attitude kinematics.

Quaternions are stored scalar-first as numpy arrays ``[q0, q1, q2, q3]``,
i.e. ``q = q0 + q1*i + q2*j + q3*k``.  A unit quaternion acts on vectors by
conjugation, ``R(q) v = q * v * q^*``, and near-identity attitudes are
parameterized by the vector part alone (the open unit ball, with
``q0 = sqrt(1 - |qv|^2) > 0``).

All functions are pure; nothing here mutates its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import GeometryError

UNIT_TOL = 1e-9
_CHART_EDGE = 1.0 - 1e-12

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def quat(q0: float, qv) -> np.ndarray:
    """Pack a scalar part and a 3-vector part into a quaternion array."""
    out = np.empty(4)
    out[0] = q0
    out[1:] = qv
    return out


def qnorm(q) -> float:
    return float(np.sqrt(np.dot(q, q)))


def qconj(q) -> np.ndarray:
    out = np.array(q, dtype=float)
    out[1:] *= -1.0
    return out


def normalize(q) -> np.ndarray:
    n = qnorm(q)
    if n == 0.0 or not np.isfinite(n):
        raise GeometryError("cannot normalize a zero or non-finite quaternion")
    return np.asarray(q, dtype=float) / n


def qmul(p, q) -> np.ndarray:
    """Hamilton product p * q (non-commutative).

    [p0, pv] * [q0, qv] = [p0*q0 - pv.qv, p0*qv + q0*pv + pv x qv]
    """
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    return np.array([
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
        p0 * q2 + p2 * q0 + p3 * q1 - p1 * q3,
        p0 * q3 + p3 * q0 + p1 * q2 - p2 * q1,
    ])


def _require_unit(q) -> None:
    if abs(qnorm(q) - 1.0) > UNIT_TOL:
        raise GeometryError(
            f"attitude quaternion is not unit (|q| = {qnorm(q):.12g})")


def rotate(q, v) -> np.ndarray:
    """Apply the rotation R(q) to a 3-vector via q * v * q^*."""
    _require_unit(q)
    q0 = q[0]
    qv = q[1:]
    # R(q) v = (q0^2 - |qv|^2) v + 2 (qv.v) qv + 2 q0 (qv x v)
    v = np.asarray(v, dtype=float)
    return ((q0 * q0 - np.dot(qv, qv)) * v
            + 2.0 * np.dot(qv, v) * qv
            + 2.0 * q0 * np.cross(qv, v))


def to_rotation_matrix(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion; R(-q) = R(q)."""
    _require_unit(q)
    q0, q1, q2, q3 = q
    return np.array([
        [q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3,
         2.0 * (q1 * q2 - q0 * q3),
         2.0 * (q1 * q3 + q0 * q2)],
        [2.0 * (q2 * q1 + q0 * q3),
         q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3,
         2.0 * (q2 * q3 - q0 * q1)],
        [2.0 * (q3 * q1 - q0 * q2),
         2.0 * (q3 * q2 + q0 * q1),
         q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3],
    ])


def from_axis_angle(axis, angle: float) -> np.ndarray:
    """Unit quaternion for a rotation of ``angle`` about ``axis``."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise GeometryError("rotation axis must be nonzero")
    half = 0.5 * angle
    return quat(np.cos(half), np.sin(half) / n * axis)


def axis_angle(q):
    """Inverse of from_axis_angle with angle in [0, 2*pi].

    When |q0| = 1 the axis is ambiguous; e1 is returned by convention.
    """
    _require_unit(q)
    q0 = float(np.clip(q[0], -1.0, 1.0))
    angle = 2.0 * np.arccos(q0)
    s = np.linalg.norm(q[1:])
    if s < 1e-15:
        return np.array([1.0, 0.0, 0.0]), angle
    return q[1:] / s, angle


def attitude_rhs(q, r) -> np.ndarray:
    """Attitude kinematics q' = (1/2) q * [0, r] for body rate r."""
    return 0.5 * qmul(q, quat(0.0, r))


def chart_lift(qv) -> np.ndarray:
    """Lift a vector-part chart point to the unit quaternion with q0 > 0."""
    qv = np.asarray(qv, dtype=float)
    n2 = float(np.dot(qv, qv))
    if n2 >= _CHART_EDGE * _CHART_EDGE:
        raise GeometryError(f"chart point outside the unit ball (|qv| = {np.sqrt(n2):.12g})")
    return quat(np.sqrt(1.0 - n2), qv)


def chart_project(q) -> np.ndarray:
    """Vector part of a unit quaternion with positive scalar part."""
    _require_unit(q)
    if q[0] <= 0.0:
        raise GeometryError("attitude left the positive-scalar chart")
    return np.array(q[1:], dtype=float)


def chart_rhs(qv, r, l):
    """Kinematics in the vector-part chart.

    Returns (qv-rate, position-rate):

        qv' = (1/2)(sqrt(1 - |qv|^2) r + qv x r)
        h'  = (1 - |qv|^2) l + 2 sqrt(1 - |qv|^2) qv x l
              + (l.qv) qv - qv x (l x qv)

    The position rate equals R(lift(qv)) l; both formulas are kept because
    the second is what the chart-form equations of motion integrate.
    """
    qv = np.asarray(qv, dtype=float)
    r = np.asarray(r, dtype=float)
    l = np.asarray(l, dtype=float)
    n2 = float(np.dot(qv, qv))
    if n2 >= _CHART_EDGE * _CHART_EDGE:
        raise GeometryError(f"chart point outside the unit ball (|qv| = {np.sqrt(n2):.12g})")
    q0 = np.sqrt(1.0 - n2)
    qv_rate = 0.5 * (q0 * r + np.cross(qv, r))
    h_rate = ((1.0 - n2) * l
              + 2.0 * q0 * np.cross(qv, l)
              + np.dot(l, qv) * qv
              - np.cross(qv, np.cross(l, qv)))
    return qv_rate, h_rate
