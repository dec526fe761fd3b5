"""Amplitude damping channels and the stochastic filter operations.

Two constructions of the same damping channel are provided: the abstract
Kraus pair parameterized by the decay probability gamma, and the optical
realization in which a half-wave plate at angle theta1 inside a
polarization interferometer sets gamma = sin^2(2 theta1).  Both must agree
to machine precision; ``channel_distance`` quantifies the difference.

Filters are single-Kraus trace-non-increasing maps.  The Alice-side filter
attenuates |V>, the Bob-side filter attenuates |H>; applying one yields the
renormalized state together with the post-selection success probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    FilterAnnihilatesStateError,
    NotTracePreservingError,
)
from .qcore import IDENTITY, as_matrix, dagger, validate_density_matrix

CPTP = "cptp"
TRACE_NONINCREASING = "trace-nonincreasing"

COMPLETENESS_ATOL = 1e-12
ACCEPTANCE_FLOOR = 1e-15

ALICE_SIDE = "alice"
BOB_SIDE = "bob"


@dataclass(frozen=True)
class KrausChannel:
    """An ordered set of 2x2 Kraus operators.

    ``kind`` is either ``CPTP`` (sum K^dag K = 1) or ``TRACE_NONINCREASING``
    (sum K^dag K <= 1); the constructor enforces the corresponding bound.
    """

    kraus_ops: tuple[np.ndarray, ...]
    kind: str = CPTP

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus_ops)
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        if self.kind not in (CPTP, TRACE_NONINCREASING):
            raise DomainError(f"unknown channel kind {self.kind!r}")
        defect = self.completeness_defect()
        if self.kind == CPTP and defect > COMPLETENESS_ATOL:
            raise DomainError(f"Kraus operators are not complete: defect {defect:.3e}")
        if self.kind == TRACE_NONINCREASING:
            total = sum(dagger(k) @ k for k in self.kraus_ops)
            top = float(np.linalg.eigvalsh(total).max())
            if top > 1.0 + COMPLETENESS_ATOL:
                raise DomainError(f"map increases trace: largest eigenvalue {top!r}")

    def completeness_defect(self) -> float:
        """Largest entrywise deviation of sum K^dag K from the identity."""
        total = sum(dagger(k) @ k for k in self.kraus_ops)
        return float(np.abs(total - IDENTITY).max())


@dataclass(frozen=True)
class FilterOperation:
    """Single-Kraus stochastic filter with parameter f on one side of the channel."""

    matrix: np.ndarray
    f: float
    side: str

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))
        self.matrix.setflags(write=False)


@dataclass(frozen=True)
class FilterOutcome:
    """Renormalized post-filter state together with the acceptance probability."""

    state: np.ndarray = field(repr=False)
    acceptance: float = 0.0


def adc(gamma: float) -> KrausChannel:
    """Amplitude damping channel: |1> decays to |0> with probability gamma.

    Kraus pair K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma) |0><1|.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma = {gamma!r} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k0, k1), CPTP)


def apply_channel(channel: KrausChannel, rho) -> np.ndarray:
    """Act with a trace-preserving channel: rho -> sum K rho K^dag."""
    if channel.kind != CPTP:
        raise NotTracePreservingError(
            "apply_channel requires a CPTP channel; use apply_filter for filters"
        )
    rho = as_matrix(rho)
    out = np.zeros((2, 2), dtype=complex)
    for k in channel.kraus_ops:
        out += k @ rho @ dagger(k)
    return validate_density_matrix(out, where="apply_channel output")


def make_filter_a(f: float) -> FilterOperation:
    """Alice-side filter |0><0| + sqrt(1-f) |1><1|, attenuating |V>."""
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"filter parameter f = {f!r} outside [0, 1]")
    m = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - f)]], dtype=complex)
    return FilterOperation(m, float(f), ALICE_SIDE)


def make_filter_b(f: float) -> FilterOperation:
    """Bob-side filter sqrt(1-f) |0><0| + |1><1|, attenuating |H>."""
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"filter parameter f = {f!r} outside [0, 1]")
    m = np.array([[math.sqrt(1.0 - f), 0.0], [0.0, 1.0]], dtype=complex)
    return FilterOperation(m, float(f), BOB_SIDE)


def apply_filter(flt: FilterOperation, rho) -> FilterOutcome:
    """Post-selected filter action: state F rho F^dag / Tr(..), acceptance Tr(..)."""
    rho = as_matrix(rho)
    sandwich = flt.matrix @ rho @ dagger(flt.matrix)
    acceptance = float(np.trace(sandwich).real)
    if acceptance < ACCEPTANCE_FLOOR:
        raise FilterAnnihilatesStateError(
            f"{flt.side}-side filter with f = {flt.f} annihilates the state "
            f"(acceptance {acceptance:.3e})"
        )
    state = validate_density_matrix(sandwich / acceptance, where="apply_filter output")
    return FilterOutcome(state=state, acceptance=acceptance)


def gamma_to_theta1(gamma: float) -> float:
    """Half-wave-plate angle realizing a damping of gamma: sin(2 theta1) = sqrt(gamma)."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma = {gamma!r} outside [0, 1]")
    return math.asin(math.sqrt(gamma)) / 2.0


def theta1_to_gamma(theta1: float) -> float:
    """Damping parameter set by a half-wave plate at theta1 in [0, pi/4]."""
    if not 0.0 <= theta1 <= math.pi / 4.0:
        raise DomainError(f"theta1 = {theta1!r} outside [0, pi/4]")
    return math.sin(2.0 * theta1) ** 2


def wrap_waveplate_angle(theta: float) -> float:
    """Reduce a wave-plate angle to the canonical range [0, pi)."""
    if not math.isfinite(theta):
        raise DomainError(f"angle {theta!r} is not finite")
    return theta % math.pi


def hwp_jones(theta: float) -> np.ndarray:
    """Jones matrix of a half-wave plate with fast axis at angle theta."""
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def sagnac_channel(theta1: float) -> KrausChannel:
    """Damping channel realized by the polarization interferometer.

    K0 = |H><H| + cos(2 theta1)|V><V|, K1 = sin(2 theta1)|H><V|; equals
    ``adc(sin^2(2 theta1))`` exactly for theta1 in [0, pi/4].
    """
    if not 0.0 <= theta1 <= math.pi / 4.0:
        raise DomainError(f"theta1 = {theta1!r} outside [0, pi/4]")
    c, s = math.cos(2.0 * theta1), math.sin(2.0 * theta1)
    k0 = np.array([[1.0, 0.0], [0.0, c]], dtype=complex)
    k1 = np.array([[0.0, s], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k0, k1), CPTP)


def sagnac_from_interferometer(theta1: float) -> KrausChannel:
    """Build the interferometer channel literally from its optical elements.

    The polarizing beam splitter routes |H> and |V> onto separate paths
    (a controlled-NOT between polarization and path), the half-wave plate
    acts on path 1 only, and the incoherent recombination of the two output
    paths traces the path degree of freedom out.  That sequence leaves the
    Kraus pair K0 = h - v H(theta1) v, K1 = h H(theta1) v, with
    h = |H><H| and v = |V><V|.
    """
    if not 0.0 <= theta1 <= math.pi / 4.0:
        raise DomainError(f"theta1 = {theta1!r} outside [0, pi/4]")
    h = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    v = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)
    jones = hwp_jones(theta1)
    k0 = h - v @ jones @ v
    k1 = h @ jones @ v
    return KrausChannel((k0, k1), CPTP)


def channel_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Largest entrywise difference of the two channel actions.

    Evaluated on the four matrix units E_jk, which span all inputs by
    linearity; zero iff the channels act identically.
    """

    def action(channel: KrausChannel, basis_elem: np.ndarray) -> np.ndarray:
        out = np.zeros((2, 2), dtype=complex)
        for k in channel.kraus_ops:
            out += k @ basis_elem @ dagger(k)
        return out

    worst = 0.0
    for j in range(2):
        for k in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[j, k] = 1.0
            diff = float(np.abs(action(a, unit) - action(b, unit)).max())
            worst = max(worst, diff)
    return worst
