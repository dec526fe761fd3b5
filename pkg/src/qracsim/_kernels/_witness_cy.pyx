# cython: language_level=3
"""Compiled batch kernel for the filtered-damping witness pipeline.

Mirror of ``_witness_py``: identical operation order on IEEE doubles;
backends agree to a couple of ulps (exact equality is not guaranteed
across compilers).  See the pure module for the real-arithmetic
reduction of the pipeline.
"""

from libc.math cimport INFINITY, M_PI, NAN, cos, sin, sqrt

import numpy as np

BACKEND_NAME = "cython"

ACCEPTANCE_FLOOR = 1e-15

cdef double _FLOOR = 1e-15

cdef double[4] _THETA_A
cdef double[2] _THETA_B
cdef double[4] _SIGN_Y0
cdef double[4] _SIGN_Y1

_THETA_A[0] = 0.0
_THETA_A[1] = 0.375 * M_PI
_THETA_A[2] = 0.125 * M_PI
_THETA_A[3] = 0.25 * M_PI
_THETA_B[0] = 0.4375 * M_PI
_THETA_B[1] = 0.0625 * M_PI
_SIGN_Y0[0] = 1.0; _SIGN_Y0[1] = 1.0; _SIGN_Y0[2] = -1.0; _SIGN_Y0[3] = -1.0
_SIGN_Y1[0] = 1.0; _SIGN_Y1[1] = -1.0; _SIGN_Y1[2] = 1.0; _SIGN_Y1[3] = -1.0


cdef int _evaluate_one(double gamma, double f_a, double f_b,
                       const double* prep, const double* meas,
                       const double* deltas,
                       double* w_out, double* acc_out) noexcept nogil:
    cdef double fae, fbe, one_minus_fa, one_minus_fb, ta, tb
    cdef double one_minus_gamma, sg
    cdef double phi0, phi1, cz0, sx0, cz1, sx1
    cdef double w, min_acc, theta, c, s, r00, r01, r11, n, e0, e1
    cdef int i

    fae = f_a * (1.0 + deltas[0])
    if fae < 0.0:
        fae = 0.0
    elif fae > 1.0:
        fae = 1.0
    fbe = f_b * (1.0 + deltas[1])
    if fbe < 0.0:
        fbe = 0.0
    elif fbe > 1.0:
        fbe = 1.0

    one_minus_fa = 1.0 - fae
    one_minus_fb = 1.0 - fbe
    ta = sqrt(one_minus_fa)
    tb = sqrt(one_minus_fb)
    one_minus_gamma = 1.0 - gamma
    sg = sqrt(one_minus_gamma)

    phi0 = 4.0 * (_THETA_B[0] + meas[0])
    phi1 = 4.0 * (_THETA_B[1] + meas[1])
    cz0 = cos(phi0)
    sx0 = sin(phi0)
    cz1 = cos(phi1)
    sx1 = sin(phi1)

    w = 0.0
    min_acc = INFINITY
    for i in range(4):
        theta = _THETA_A[i] + prep[i]
        c = cos(2.0 * theta)
        s = sin(2.0 * theta)
        r00 = c * c
        r01 = c * s
        r11 = s * s
        # Alice-side filter, damping channel, Bob-side filter.
        r01 = r01 * ta
        r11 = r11 * one_minus_fa
        r00 = r00 + gamma * r11
        r01 = r01 * sg
        r11 = r11 * one_minus_gamma
        r00 = r00 * one_minus_fb
        r01 = r01 * tb
        n = r00 + r11
        if n < _FLOOR:
            w_out[0] = NAN
            acc_out[0] = 0.0
            return 0
        if n < min_acc:
            min_acc = n
        e0 = 0.5 * ((1.0 + cz0) * r00 + 2.0 * sx0 * r01 + (1.0 - cz0) * r11) / n
        e1 = 0.5 * ((1.0 + cz1) * r00 + 2.0 * sx1 * r01 + (1.0 - cz1) * r11) / n
        w = w + _SIGN_Y0[i] * e0 + _SIGN_Y1[i] * e1
    w_out[0] = w
    acc_out[0] = min_acc
    return 1


def evaluate_one(double gamma, double f_a, double f_b, prep, meas, deltas):
    """Scalar twin of the batch kernel; returns (witness, min_acceptance, ok)."""
    cdef double[::1] p = np.ascontiguousarray(prep, dtype=np.float64)
    cdef double[::1] m = np.ascontiguousarray(meas, dtype=np.float64)
    cdef double[::1] d = np.ascontiguousarray(deltas, dtype=np.float64)
    if p.shape[0] != 4 or m.shape[0] != 2 or d.shape[0] != 2:
        raise ValueError("expected 4 prep offsets, 2 meas offsets, 2 filter deltas")
    cdef double w, acc
    cdef int ok = _evaluate_one(gamma, f_a, f_b, &p[0], &m[0], &d[0], &w, &acc)
    return w, acc, bool(ok)


def witness_batch(double gamma, double f_a, double f_b,
                  prep_offsets, meas_offsets, filter_deltas):
    """Evaluate the witness for a batch of perturbed scenarios.

    Arrays have one row per sample: ``prep_offsets`` (n, 4),
    ``meas_offsets`` (n, 2), ``filter_deltas`` (n, 2).  Returns
    ``(witness, min_acceptance, ok)`` as float64/float64/uint8 arrays.
    """
    cdef double[:, ::1] prep = np.ascontiguousarray(prep_offsets, dtype=np.float64)
    cdef double[:, ::1] meas = np.ascontiguousarray(meas_offsets, dtype=np.float64)
    cdef double[:, ::1] deltas = np.ascontiguousarray(filter_deltas, dtype=np.float64)
    if prep.shape[1] != 4:
        raise ValueError(f"prep_offsets must have shape (n, 4), got (n, {prep.shape[1]})")
    cdef Py_ssize_t n = prep.shape[0]
    if meas.shape[0] != n or meas.shape[1] != 2:
        raise ValueError(f"meas_offsets must have shape ({n}, 2)")
    if deltas.shape[0] != n or deltas.shape[1] != 2:
        raise ValueError(f"filter_deltas must have shape ({n}, 2)")

    out_w_arr = np.empty(n, dtype=np.float64)
    out_acc_arr = np.empty(n, dtype=np.float64)
    out_ok_arr = np.empty(n, dtype=np.uint8)
    cdef double[::1] out_w = out_w_arr
    cdef double[::1] out_acc = out_acc_arr
    cdef unsigned char[::1] out_ok = out_ok_arr
    cdef Py_ssize_t i

    if n > 0:
        with nogil:
            for i in range(n):
                out_ok[i] = <unsigned char> _evaluate_one(
                    gamma, f_a, f_b,
                    &prep[i, 0], &meas[i, 0], &deltas[i, 0],
                    &out_w[i], &out_acc[i],
                )
    return out_w_arr, out_acc_arr, out_ok_arr
