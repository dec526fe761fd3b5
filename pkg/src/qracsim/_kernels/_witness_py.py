"""Pure-Python fallback for the batch witness kernel.

Everything in the pipeline is real-valued (real state amplitudes, real
Kraus and filter matrices, real measurement observables), so one scenario
evaluation reduces to scalar arithmetic on the three independent entries
(r00, r01, r11) of each symmetric 2x2 state.

This module mirrors ``_witness_cy.pyx`` operation for operation; keep the
two in lockstep.  Compiler-level differences (libm inlining, instruction
selection) can still move individual results by a couple of ulps, so
cross-backend comparisons use a 1e-12 tolerance.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

ACCEPTANCE_FLOOR = 1e-15

_PI = math.pi
# Preparation HWP settings for inputs (0,0), (0,1), (1,0), (1,1) and
# measurement HWP settings for questions y = 0, 1.
_THETA_A = (0.0, 0.375 * _PI, 0.125 * _PI, 0.25 * _PI)
_THETA_B = (0.4375 * _PI, 0.0625 * _PI)
# Witness signs: +E_{x,0} for a0 = 0, -E_{x,0} for a0 = 1, likewise a1/y=1.
_SIGN_Y0 = (1.0, 1.0, -1.0, -1.0)
_SIGN_Y1 = (1.0, -1.0, 1.0, -1.0)


def evaluate_one(gamma, f_a, f_b, prep, meas, deltas):
    """Witness and smallest acceptance N(x) for one perturbed scenario.

    ``prep`` holds four preparation-angle offsets, ``meas`` two
    measurement-angle offsets, ``deltas`` two relative filter errors.
    Returns ``(witness, min_acceptance, ok)``; ``ok`` is False when some
    encoded state is annihilated, in which case witness is NaN.
    """
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
    ta = math.sqrt(one_minus_fa)
    tb = math.sqrt(one_minus_fb)
    one_minus_gamma = 1.0 - gamma
    sg = math.sqrt(one_minus_gamma)

    phi0 = 4.0 * (_THETA_B[0] + meas[0])
    phi1 = 4.0 * (_THETA_B[1] + meas[1])
    cz0 = math.cos(phi0)
    sx0 = math.sin(phi0)
    cz1 = math.cos(phi1)
    sx1 = math.sin(phi1)

    w = 0.0
    min_acc = math.inf
    for i in range(4):
        theta = _THETA_A[i] + prep[i]
        c = math.cos(2.0 * theta)
        s = math.sin(2.0 * theta)
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
        if n < ACCEPTANCE_FLOOR:
            return math.nan, 0.0, False
        if n < min_acc:
            min_acc = n
        e0 = 0.5 * ((1.0 + cz0) * r00 + 2.0 * sx0 * r01 + (1.0 - cz0) * r11) / n
        e1 = 0.5 * ((1.0 + cz1) * r00 + 2.0 * sx1 * r01 + (1.0 - cz1) * r11) / n
        w = w + _SIGN_Y0[i] * e0 + _SIGN_Y1[i] * e1
    return w, min_acc, True


def witness_batch(gamma, f_a, f_b, prep_offsets, meas_offsets, filter_deltas):
    """Evaluate the witness for a batch of perturbed scenarios.

    Arrays have one row per sample: ``prep_offsets`` (n, 4),
    ``meas_offsets`` (n, 2), ``filter_deltas`` (n, 2).  Returns
    ``(witness, min_acceptance, ok)`` as float64/float64/uint8 arrays.
    """
    prep = np.ascontiguousarray(prep_offsets, dtype=np.float64)
    meas = np.ascontiguousarray(meas_offsets, dtype=np.float64)
    deltas = np.ascontiguousarray(filter_deltas, dtype=np.float64)
    if prep.ndim != 2 or prep.shape[1] != 4:
        raise ValueError(f"prep_offsets must have shape (n, 4), got {prep.shape}")
    n = prep.shape[0]
    if meas.shape != (n, 2):
        raise ValueError(f"meas_offsets must have shape ({n}, 2), got {meas.shape}")
    if deltas.shape != (n, 2):
        raise ValueError(f"filter_deltas must have shape ({n}, 2), got {deltas.shape}")

    out_w = np.empty(n, dtype=np.float64)
    out_acc = np.empty(n, dtype=np.float64)
    out_ok = np.empty(n, dtype=np.uint8)
    prep_rows = prep.tolist()
    meas_rows = meas.tolist()
    delta_rows = deltas.tolist()
    for i in range(n):
        w, acc, ok = evaluate_one(
            gamma, f_a, f_b, prep_rows[i], meas_rows[i], delta_rows[i]
        )
        out_w[i] = w
        out_acc[i] = acc
        out_ok[i] = 1 if ok else 0
    return out_w, out_acc, out_ok
