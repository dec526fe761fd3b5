"""The two-bit-to-one-qubit random access code and its dimension witness.

Alice encodes a uniformly random pair of bits x = (a0, a1) into one of four
polarization qubits, Bob measures one of two observables selected by his
question bit y, and the statistics are summarized by the eight
probabilities E_{a0 a1, y} = p(b=0 | x, y).  The dimension witness W is a
signed sum of those entries, bounded by 2 for classical bits and reaching
2*sqrt(2) for qubits; the average success probability is (W + 4) / 8.

The noise-adapted pipeline inserts an Alice-side filter before the damping
channel and a Bob-side filter after it, post-selecting on both filters
succeeding.  Each encoded state is renormalized by its own acceptance N(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .channels import (
    ACCEPTANCE_FLOOR,
    adc,
    dagger,
    make_filter_a,
    make_filter_b,
)
from .errors import (
    DomainError,
    FilterAnnihilatesStateError,
    MissingEntryError,
    NotHermitianError,
)
from .qcore import (
    IDENTITY,
    PAULI_X,
    PAULI_Z,
    as_matrix,
    density_from_ket,
    hermiticity_defect,
    validate_density_matrix,
)

INPUTS: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))
QUESTIONS: tuple[int, ...] = (0, 1)
CELLS: tuple[tuple[int, int, int], ...] = tuple(
    (a0, a1, y) for (a0, a1) in INPUTS for y in QUESTIONS
)

# Signs of the eight E_{a0 a1, y} entries in the witness.
WITNESS_SIGNS: dict[tuple[int, int, int], int] = {
    (0, 0, 0): +1,
    (0, 0, 1): +1,
    (0, 1, 0): +1,
    (0, 1, 1): -1,
    (1, 0, 0): -1,
    (1, 0, 1): +1,
    (1, 1, 0): -1,
    (1, 1, 1): -1,
}

# Half-wave-plate settings realizing the canonical encodings and measurements.
PREP_ANGLES: dict[tuple[int, int], float] = {
    (0, 0): 0.0,
    (0, 1): 0.375 * math.pi,
    (1, 0): 0.125 * math.pi,
    (1, 1): 0.25 * math.pi,
}
MEAS_ANGLES: dict[int, float] = {0: 0.4375 * math.pi, 1: 0.0625 * math.pi}

QUANTUM_MAX_WITNESS = 2.0 * math.sqrt(2.0)
CLASSICAL_MAX_WITNESS = 2.0


@dataclass(frozen=True)
class DichotomicMeasurement:
    """A +-1-valued observable with its two projectors.

    Convention: outcome b = 0 corresponds to the +1 eigenvalue, so
    observable = proj0 - proj1.
    """

    observable: np.ndarray = field(repr=False)
    proj0: np.ndarray = field(repr=False)
    proj1: np.ndarray = field(repr=False)

    def projector(self, b: int) -> np.ndarray:
        if b not in (0, 1):
            raise DomainError(f"outcome b = {b!r} not in {{0, 1}}")
        return self.proj0 if b == 0 else self.proj1


def measurement_from_observable(observable) -> DichotomicMeasurement:
    """Build a dichotomic measurement from a traceless Hermitian involution."""
    observable = as_matrix(observable)
    if hermiticity_defect(observable) > 1e-10:
        raise NotHermitianError("measurement observable must be Hermitian")
    if abs(complex(np.trace(observable))) > 1e-10:
        raise DomainError("measurement observable must be traceless")
    if np.abs(observable @ observable - IDENTITY).max() > 1e-10:
        raise DomainError("measurement observable must square to the identity")
    proj0 = 0.5 * (IDENTITY + observable)
    proj1 = 0.5 * (IDENTITY - observable)
    return DichotomicMeasurement(observable=observable, proj0=proj0, proj1=proj1)


@dataclass(frozen=True)
class ProbabilityTable:
    """The eight conditional probabilities E_{a0 a1, y} = p(b=0 | x, y).

    ``sigma`` optionally carries one standard error per cell (used by the
    coincidence-count ingestion path).
    """

    e: Mapping[tuple[int, int, int], float]
    sigma: Mapping[tuple[int, int, int], float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "e", dict(self.e))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", dict(self.sigma))
        for key, value in self.e.items():
            if key not in CELLS:
                raise DomainError(f"unknown table cell {key!r}")
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"entry E{key!r} = {value!r} outside [0, 1]")

    def entry(self, a0: int, a1: int, y: int) -> float:
        try:
            return self.e[(a0, a1, y)]
        except KeyError:
            raise MissingEntryError(f"table is missing cell (a0={a0}, a1={a1}, y={y})") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to evaluate one protocol instance.

    ``prep_offsets`` perturb the four preparation wave-plate angles (input
    order (0,0), (0,1), (1,0), (1,1)), ``meas_offsets`` the two measurement
    angles (y = 0, 1), and ``filter_scale_errors`` scale the filter
    parameters multiplicatively: f -> clip(f * (1 + delta), 0, 1).  All
    offsets default to zero, which reproduces the canonical protocol.
    """

    gamma: float
    f_a: float = 0.0
    f_b: float = 0.0
    prep_offsets: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    meas_offsets: tuple[float, float] = (0.0, 0.0)
    filter_scale_errors: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise DomainError(f"gamma = {self.gamma!r} outside [0, 1]")
        for name, value in (("f_a", self.f_a), ("f_b", self.f_b)):
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} = {value!r} outside [0, 1]")
        object.__setattr__(self, "prep_offsets", tuple(float(v) for v in self.prep_offsets))
        object.__setattr__(self, "meas_offsets", tuple(float(v) for v in self.meas_offsets))
        object.__setattr__(
            self, "filter_scale_errors", tuple(float(v) for v in self.filter_scale_errors)
        )
        if len(self.prep_offsets) != 4 or len(self.meas_offsets) != 2:
            raise DomainError("expected 4 preparation offsets and 2 measurement offsets")
        if len(self.filter_scale_errors) != 2:
            raise DomainError("expected 2 filter scale errors")
        for value in (*self.prep_offsets, *self.meas_offsets, *self.filter_scale_errors):
            if not math.isfinite(value):
                raise DomainError(f"offset {value!r} is not finite")

    def effective_filters(self) -> tuple[float, float]:
        """Filter parameters after the multiplicative characterization error."""
        da, db = self.filter_scale_errors
        f_a = min(1.0, max(0.0, self.f_a * (1.0 + da)))
        f_b = min(1.0, max(0.0, self.f_b * (1.0 + db)))
        return f_a, f_b


def hwp_preparation(theta_a: float) -> np.ndarray:
    """Polarization ket cos(2 theta_a)|H> + sin(2 theta_a)|V> prepared by the HWP."""
    if not math.isfinite(theta_a):
        raise DomainError(f"theta_a = {theta_a!r} is not finite")
    return np.array([math.cos(2.0 * theta_a), math.sin(2.0 * theta_a)], dtype=complex)


def canonical_states() -> dict[tuple[int, int], np.ndarray]:
    """The four encoded states: |H>, |->, |+>, |V> for x = 00, 01, 10, 11."""
    h = np.array([1.0, 0.0], dtype=complex)
    v = np.array([0.0, 1.0], dtype=complex)
    plus = (h + v) / math.sqrt(2.0)
    minus = (h - v) / math.sqrt(2.0)
    return {
        (0, 0): density_from_ket(h),
        (0, 1): density_from_ket(minus),
        (1, 0): density_from_ket(plus),
        (1, 1): density_from_ket(v),
    }


def canonical_measurements() -> tuple[DichotomicMeasurement, DichotomicMeasurement]:
    """Bob's two observables M0 = (sz - sx)/sqrt(2) and M1 = (sz + sx)/sqrt(2)."""
    m0 = (PAULI_Z - PAULI_X) / math.sqrt(2.0)
    m1 = (PAULI_Z + PAULI_X) / math.sqrt(2.0)
    return measurement_from_observable(m0), measurement_from_observable(m1)


def hwp_measurement(theta_b: float) -> DichotomicMeasurement:
    """Observable realized by a half-wave plate at theta_b followed by an H/V split.

    Conjugating sigma_z with the half-wave-plate Jones matrix gives
    cos(4 theta_b) sigma_z + sin(4 theta_b) sigma_x; the settings
    theta_b = 7 pi/16 and pi/16 reproduce M0 and M1.
    """
    if not math.isfinite(theta_b):
        raise DomainError(f"theta_b = {theta_b!r} is not finite")
    observable = math.cos(4.0 * theta_b) * PAULI_Z + math.sin(4.0 * theta_b) * PAULI_X
    return measurement_from_observable(observable)


def prepared_state(cfg: ScenarioConfig, a0: int, a1: int) -> np.ndarray:
    """Encoded density matrix for input (a0, a1), including the angle offset."""
    index = INPUTS.index((a0, a1))
    theta = PREP_ANGLES[(a0, a1)] + cfg.prep_offsets[index]
    return density_from_ket(hwp_preparation(theta))


def scenario_measurement(cfg: ScenarioConfig, y: int) -> DichotomicMeasurement:
    """Measurement for question y, including the angle offset."""
    if y not in QUESTIONS:
        raise DomainError(f"question y = {y!r} not in {{0, 1}}")
    return hwp_measurement(MEAS_ANGLES[y] + cfg.meas_offsets[y])


def filtered_damped_state(cfg: ScenarioConfig, a0: int, a1: int):
    """Run one encoded state through filter A, the damping channel and filter B.

    Returns ``(state, acceptance)`` where the state carries the single
    end-of-pipeline normalization N(x) = Tr[F_B Lambda(F_A rho F_A^dag) F_B^dag]
    and ``acceptance`` is N(x) itself.
    """
    f_a, f_b = cfg.effective_filters()
    filter_a = make_filter_a(f_a)
    filter_b = make_filter_b(f_b)
    channel = adc(cfg.gamma)

    rho = prepared_state(cfg, a0, a1)
    sandwich = filter_a.matrix @ rho @ dagger(filter_a.matrix)
    damped = np.zeros((2, 2), dtype=complex)
    for k in channel.kraus_ops:
        damped += k @ sandwich @ dagger(k)
    sandwich = filter_b.matrix @ damped @ dagger(filter_b.matrix)
    acceptance = float(np.trace(sandwich).real)
    if acceptance < ACCEPTANCE_FLOOR:
        raise FilterAnnihilatesStateError(
            f"post-selection probability N(x) vanished for x = ({a0}, {a1})",
            state_label=(a0, a1),
        )
    state = validate_density_matrix(sandwich / acceptance, where=f"pipeline x=({a0},{a1})")
    return state, acceptance


def conditional_probability(cfg: ScenarioConfig, a0: int, a1: int, y: int, b: int) -> float:
    """p(b | x, y) for the post-selected pipeline state."""
    state, _ = filtered_damped_state(cfg, a0, a1)
    measurement = scenario_measurement(cfg, y)
    p = float(np.trace(measurement.projector(b) @ state).real)
    return min(1.0, max(0.0, p))


def scenario_acceptances(cfg: ScenarioConfig) -> dict[tuple[int, int], float]:
    """Post-selection probability N(x) for each of the four encoded states."""
    return {x: filtered_damped_state(cfg, *x)[1] for x in INPUTS}


def evaluate_scenario_with_acceptances(
    cfg: ScenarioConfig,
) -> tuple[ProbabilityTable, dict[tuple[int, int], float]]:
    """Probability table plus the per-state acceptances N(x), in one pass."""
    measurements = {y: scenario_measurement(cfg, y) for y in QUESTIONS}
    entries: dict[tuple[int, int, int], float] = {}
    acceptances: dict[tuple[int, int], float] = {}
    for a0, a1 in INPUTS:
        state, acceptance = filtered_damped_state(cfg, a0, a1)
        acceptances[(a0, a1)] = acceptance
        for y in QUESTIONS:
            p = float(np.trace(measurements[y].proj0 @ state).real)
            entries[(a0, a1, y)] = min(1.0, max(0.0, p))
    return ProbabilityTable(e=entries), acceptances


def evaluate_scenario(cfg: ScenarioConfig) -> ProbabilityTable:
    """All eight conditional probabilities E_{a0 a1, y} = p(b=0 | x, y)."""
    return evaluate_scenario_with_acceptances(cfg)[0]


def witness(table: ProbabilityTable) -> float:
    """Dimension witness: the signed sum of the eight table entries."""
    return float(sum(WITNESS_SIGNS[cell] * table.entry(*cell) for cell in CELLS))


def asp_from_witness(w: float) -> float:
    """Average success probability from the witness: (W + 4) / 8."""
    return (w + 4.0) / 8.0


def asp_direct(table: ProbabilityTable) -> float:
    """Average success probability summed cell by cell.

    P = (1/8) sum over (x, y) of p(b = x_y | x, y), where x_y is a0 for
    y = 0 and a1 for y = 1.  Algebraically identical to
    ``asp_from_witness(witness(table))`` for any table.
    """
    total = 0.0
    for a0, a1, y in CELLS:
        wanted_bit = a0 if y == 0 else a1
        e = table.entry(a0, a1, y)
        total += e if wanted_bit == 0 else 1.0 - e
    return total / 8.0


@dataclass(frozen=True)
class ClassicalBound:
    """Exhaustive optimum over deterministic classical strategies.

    A strategy is an encoding e: (a0, a1) -> message bit and a decoding
    d: (message, y) -> b.  Shared randomness cannot beat the deterministic
    optimum here because witness and success probability are linear in the
    strategy, so the maximum is attained at an extreme point.
    """

    max_witness: float
    max_asp: float
    strategy_count: int
    maximizers: tuple[tuple[tuple[int, int, int, int], tuple[int, int, int, int]], ...]


def classical_bruteforce() -> ClassicalBound:
    """Enumerate all 16 x 16 deterministic strategies; exact maxima are (2, 0.75).

    Maximizing the witness also maximizes the success probability, since
    the two are related by the exact affine map P = (W + 4) / 8.
    """
    best_witness = -math.inf
    maximizers: list[tuple[tuple[int, int, int, int], tuple[int, int, int, int]]] = []
    count = 0
    for enc_bits in range(16):
        encoding = tuple((enc_bits >> i) & 1 for i in range(4))
        for dec_bits in range(16):
            decoding = tuple((dec_bits >> i) & 1 for i in range(4))
            count += 1
            entries = {}
            for index, (a0, a1) in enumerate(INPUTS):
                message = encoding[index]
                for y in QUESTIONS:
                    b = decoding[2 * message + y]
                    entries[(a0, a1, y)] = 1.0 if b == 0 else 0.0
            w = witness(ProbabilityTable(e=entries))
            if w > best_witness:
                best_witness = w
                maximizers = [(encoding, decoding)]
            elif w == best_witness:
                maximizers.append((encoding, decoding))
    return ClassicalBound(
        max_witness=best_witness,
        max_asp=asp_from_witness(best_witness),
        strategy_count=count,
        maximizers=tuple(maximizers),
    )
