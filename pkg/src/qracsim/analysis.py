"""Curve generation, critical-noise solving, error bands and count ingestion.

The sweep and solver routines evaluate the full density-matrix pipeline
from :mod:`qracsim.protocol`; the Monte Carlo error bands run on the batch
witness kernel, whose results are cross-checked against the pipeline in
the test suite.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._kernels import witness_batch
from .errors import (
    DomainError,
    DuplicateCellError,
    EmptyCellError,
    ExcessiveDiscardsError,
    FilterAnnihilatesStateError,
    MissingCellError,
    NoSignChangeError,
    QracError,
)
from .protocol import (
    CELLS,
    CLASSICAL_MAX_WITNESS,
    ProbabilityTable,
    ScenarioConfig,
    asp_from_witness,
    evaluate_scenario,
    evaluate_scenario_with_acceptances,
    witness,
)

DISCARD_BUDGET = 0.01


def witness_closed_form(gamma: float) -> float:
    """Unfiltered witness sqrt(2) (1 + sqrt(1 - gamma) - gamma)."""
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma = {gamma!r} outside [0, 1]")
    return math.sqrt(2.0) * (1.0 + math.sqrt(1.0 - gamma) - gamma)


def asp_closed_form(gamma: float) -> float:
    """Unfiltered average success probability (W(gamma) + 4) / 8."""
    return asp_from_witness(witness_closed_form(gamma))


@dataclass(frozen=True)
class SweepRecord:
    """Witness and success probability at one (gamma, f_a, f_b) point.

    ``acceptance_min`` is the smallest post-selection probability N(x)
    over the four encoded states.  When the filters annihilate a state the
    numeric fields are NaN/0 and ``error`` names the condition.
    """

    gamma: float
    f_a: float
    f_b: float
    witness: float
    asp: float
    acceptance_min: float
    error: str | None = None


def evaluate_point(gamma: float, f_a: float, f_b: float) -> SweepRecord:
    """Evaluate one protocol instance; raises if post-selection fails."""
    cfg = ScenarioConfig(gamma=gamma, f_a=f_a, f_b=f_b)
    table, acceptances = evaluate_scenario_with_acceptances(cfg)
    w = witness(table)
    return SweepRecord(
        gamma=gamma,
        f_a=f_a,
        f_b=f_b,
        witness=w,
        asp=asp_from_witness(w),
        acceptance_min=min(acceptances.values()),
    )


def sweep(gammas, f_a: float, f_b: float) -> list[SweepRecord]:
    """Evaluate the protocol on a gamma grid.

    Annihilation at a grid point is recorded in that record (NaN witness,
    named error) without aborting the rest of the sweep.
    """
    records = []
    for gamma in gammas:
        try:
            records.append(evaluate_point(float(gamma), f_a, f_b))
        except FilterAnnihilatesStateError as exc:
            records.append(
                SweepRecord(
                    gamma=float(gamma),
                    f_a=f_a,
                    f_b=f_b,
                    witness=math.nan,
                    asp=math.nan,
                    acceptance_min=0.0,
                    error=f"FilterAnnihilatesState x={exc.state_label}",
                )
            )
    return records


def critical_gamma(f_a: float, f_b: float, tol: float = 1e-6) -> float:
    """Damping level at which the witness crosses the classical bound 2.

    Bisection on W(gamma) - 2 over [0, 1]; requires W(0) > 2 > W(1), else
    ``NoSignChangeError``.  The returned root satisfies |W - 2| <= 1e-4,
    which is re-checked after the solve.
    """
    if tol <= 0.0:
        raise DomainError(f"tol = {tol!r} must be positive")

    def w_at(gamma: float) -> float:
        return witness(evaluate_scenario(ScenarioConfig(gamma=gamma, f_a=f_a, f_b=f_b)))

    try:
        w_lo = w_at(0.0)
        w_hi = w_at(1.0)
    except FilterAnnihilatesStateError as exc:
        raise NoSignChangeError(
            f"witness undefined at a bracket endpoint (f_a={f_a}, f_b={f_b}): {exc}"
        ) from exc
    if not (w_lo > CLASSICAL_MAX_WITNESS and w_hi < CLASSICAL_MAX_WITNESS):
        raise NoSignChangeError(
            f"W(gamma) - 2 does not change sign on [0, 1] for f_a={f_a}, f_b={f_b}: "
            f"W(0) = {w_lo:.6f}, W(1) = {w_hi:.6f}"
        )

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if w_at(mid) > CLASSICAL_MAX_WITNESS:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    residual = abs(w_at(root) - CLASSICAL_MAX_WITNESS)
    if residual > 1e-4:
        raise QracError(
            f"bisection postcondition violated: |W(gamma_c) - 2| = {residual:.3e}"
        )
    return root


def optimal_filter(gamma: float) -> tuple[float, float]:
    """Symmetric filter strength maximizing the witness at fixed gamma.

    Coarse scan over f in [0, 0.999] with step 0.001, then golden-section
    refinement around the best grid point.  Ties resolve to the smallest f
    (at gamma = 0 every symmetric filter leaves the witness at its
    maximum, so 0 is returned there).
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma = {gamma!r} outside [0, 1]")

    def w_sym(f: float) -> float:
        return witness(evaluate_scenario(ScenarioConfig(gamma=gamma, f_a=f, f_b=f)))

    grid = np.linspace(0.0, 0.999, 1000)
    values = np.array([w_sym(float(f)) for f in grid])
    w_best = float(values.max())
    best_index = int(np.nonzero(values >= w_best - 1e-12)[0][0])
    f_best = float(grid[best_index])
    w_at_best = float(values[best_index])

    lo = max(0.0, f_best - 0.001)
    hi = min(0.999, f_best + 0.001)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    w_c, w_d = w_sym(c), w_sym(d)
    while b - a > 1e-9:
        if w_c > w_d:
            b, d, w_d = d, c, w_c
            c = b - inv_phi * (b - a)
            w_c = w_sym(c)
        else:
            a, c, w_c = c, d, w_d
            d = a + inv_phi * (b - a)
            w_d = w_sym(d)
    f_refined = 0.5 * (a + b)
    w_refined = w_sym(f_refined)
    if w_refined > w_at_best + 1e-13:
        return f_refined, w_refined
    return f_best, w_at_best


@dataclass(frozen=True)
class ErrorModelConfig:
    """Instrument-error model for the Monte Carlo bands.

    Wave-plate settings are drawn uniformly within +-halfwidth of nominal
    (defaults: 1 degree on each preparation and measurement plate) and the
    filter parameters get a relative error f -> f (1 + delta) with delta
    uniform within +-filter_rel_halfwidth (default 1%), clamped to [0, 1].
    """

    hwp_prep_halfwidth: float = math.radians(1.0)
    hwp_meas_halfwidth: float = math.radians(1.0)
    filter_rel_halfwidth: float = 0.01
    samples: int = 10000
    seed: int = 42

    def __post_init__(self):
        for name in ("hwp_prep_halfwidth", "hwp_meas_halfwidth", "filter_rel_halfwidth"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise DomainError(f"{name} = {value!r} must be a finite nonnegative real")
        if self.samples < 1:
            raise DomainError(f"samples = {self.samples!r} must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed = {self.seed!r} must fit in 64 unsigned bits")


@dataclass(frozen=True)
class BandRecord:
    """Error band of the witness at one gamma.

    ``lo``/``hi`` are percentile bounds of the sampled witness, ``minimum``
    and ``maximum`` the sample extremes.  All four edges are widened to
    include the nominal value, so min <= lo <= nominal <= hi <= max always
    holds (at gamma = 0 every perturbation lowers the witness off its
    quantum maximum, so the raw sample range would sit strictly below the
    nominal curve).
    """

    gamma: float
    nominal: float
    lo: float
    hi: float
    minimum: float
    maximum: float
    discards: int


def _thread_count(threads: int | None) -> int:
    """Worker cap: explicit argument, else QRAC_THREADS, else 1."""
    if threads is None:
        env = os.environ.get("QRAC_THREADS", "").strip()
        if not env:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise DomainError(f"QRAC_THREADS must be an integer, got {env!r}") from None
    return max(1, int(threads))


def _batched_witness(gamma, f_a, f_b, prep, meas, deltas, threads):
    """Run the kernel, optionally splitting rows over a thread pool.

    Each sample's perturbations are drawn before any splitting, so the
    result is identical for every worker count.
    """
    n = prep.shape[0]
    if threads <= 1 or n < 2 * threads:
        return witness_batch(gamma, f_a, f_b, prep, meas, deltas)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    spans = [(int(bounds[i]), int(bounds[i + 1])) for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(
            pool.map(
                lambda span: witness_batch(
                    gamma, f_a, f_b,
                    prep[span[0]:span[1]], meas[span[0]:span[1]], deltas[span[0]:span[1]],
                ),
                spans,
            )
        )
    w = np.concatenate([p[0] for p in parts])
    acc = np.concatenate([p[1] for p in parts])
    ok = np.concatenate([p[2] for p in parts])
    return w, acc, ok


def _perturbation_draws(em: ErrorModelConfig, gamma_index: int) -> np.ndarray:
    """Uniform draws in [-1, 1] for one gamma, shape (samples, 8).

    A counter-based Philox stream keyed by (seed, gamma index) makes the
    draws independent of evaluation order and worker count; row i is the
    substream of sample i.
    """
    key = np.array([em.seed, gamma_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.uniform(-1.0, 1.0, size=(em.samples, 8))


def monte_carlo_band(
    gammas,
    f_a: float,
    f_b: float,
    em: ErrorModelConfig | None = None,
    *,
    percentiles: tuple[float, float] = (5.0, 95.0),
    threads: int | None = None,
    return_samples: bool = False,
):
    """Propagate instrument errors through the witness, per gamma.

    For each grid gamma, ``em.samples`` perturbation tuples are drawn (four
    preparation-angle offsets, two measurement-angle offsets, two relative
    filter errors), the witness is evaluated for each, and the summary
    percentiles/extremes are reported next to the unperturbed nominal.
    Samples whose post-selection vanishes are discarded and counted; more
    than 1% discards is an error.

    Fully deterministic for a fixed ``em.seed``, independent of worker
    count (capped by ``threads`` or the QRAC_THREADS variable).  With
    ``return_samples`` the raw per-sample witness arrays are returned too.
    """
    em = em if em is not None else ErrorModelConfig()
    p_lo, p_hi = percentiles
    if not (0.0 <= p_lo < p_hi <= 100.0):
        raise DomainError(f"percentiles {percentiles!r} must satisfy 0 <= lo < hi <= 100")
    workers = _thread_count(threads)

    zeros4 = np.zeros((1, 4))
    zeros2 = np.zeros((1, 2))
    records: list[BandRecord] = []
    all_samples: list[tuple[np.ndarray, np.ndarray]] = []
    for gamma_index, gamma in enumerate(gammas):
        gamma = float(gamma)
        if not 0.0 <= gamma <= 1.0:
            raise DomainError(f"gamma = {gamma!r} outside [0, 1]")
        w_nom, _, ok_nom = witness_batch(gamma, f_a, f_b, zeros4, zeros2, zeros2)
        if not ok_nom[0]:
            raise FilterAnnihilatesStateError(
                f"nominal scenario annihilated at gamma = {gamma} (f_a={f_a}, f_b={f_b})"
            )
        nominal = float(w_nom[0])

        draws = _perturbation_draws(em, gamma_index)
        prep = draws[:, 0:4] * em.hwp_prep_halfwidth
        meas = draws[:, 4:6] * em.hwp_meas_halfwidth
        deltas = draws[:, 6:8] * em.filter_rel_halfwidth
        w, _, ok = _batched_witness(gamma, f_a, f_b, prep, meas, deltas, workers)

        kept = w[ok == 1]
        discards = int(em.samples - kept.size)
        if discards > DISCARD_BUDGET * em.samples:
            raise ExcessiveDiscardsError(
                f"{discards} of {em.samples} samples discarded at gamma = {gamma} "
                f"(budget {DISCARD_BUDGET:.0%})"
            )
        lo_p, hi_p = (float(v) for v in np.percentile(kept, [p_lo, p_hi]))
        records.append(
            BandRecord(
                gamma=gamma,
                nominal=nominal,
                lo=min(lo_p, nominal),
                hi=max(hi_p, nominal),
                minimum=min(float(kept.min()), nominal),
                maximum=max(float(kept.max()), nominal),
                discards=discards,
            )
        )
        if return_samples:
            all_samples.append((w, ok))
    if return_samples:
        return records, all_samples
    return records


@dataclass(frozen=True)
class CoincidenceRecord:
    """Raw coincidence counts for one (a0, a1, y) cell.

    ``cc0``/``cc1`` count events on the b = 0 / b = 1 detector; the
    optional labels carry the experimental context (nominal gamma and
    filter settings) and are informational only.
    """

    a0: int
    a1: int
    y: int
    cc0: int
    cc1: int
    gamma_label: float | None = None
    fa_label: float | None = None
    fb_label: float | None = None

    def __post_init__(self):
        for name in ("a0", "a1", "y"):
            if getattr(self, name) not in (0, 1):
                raise DomainError(f"{name} = {getattr(self, name)!r} must be 0 or 1")
        for name in ("cc0", "cc1"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise DomainError(f"{name} = {value!r} must be a nonnegative integer")


@dataclass(frozen=True)
class IngestResult:
    """Estimated probability table and witness from coincidence counts."""

    table: ProbabilityTable
    witness: float
    witness_sigma: float

    @property
    def asp(self) -> float:
        return asp_from_witness(self.witness)

    @property
    def asp_sigma(self) -> float:
        return self.witness_sigma / 8.0


def ingest_counts(records) -> IngestResult:
    """Estimate E cells and the witness from eight coincidence records.

    E = cc0 / (cc0 + cc1) per cell with the Poisson-propagated standard
    error sigma_E = sqrt(cc0 cc1 / (cc0 + cc1)^3); the witness error adds
    the cell variances since every witness coefficient is +-1.
    """
    by_cell: dict[tuple[int, int, int], CoincidenceRecord] = {}
    for record in records:
        cell = (record.a0, record.a1, record.y)
        if cell in by_cell:
            raise DuplicateCellError(f"cell (a0={cell[0]}, a1={cell[1]}, y={cell[2]}) appears twice")
        by_cell[cell] = record
    for cell in CELLS:
        if cell not in by_cell:
            raise MissingCellError(f"missing cell (a0={cell[0]}, a1={cell[1]}, y={cell[2]})")

    e: dict[tuple[int, int, int], float] = {}
    sigma: dict[tuple[int, int, int], float] = {}
    for cell in CELLS:
        record = by_cell[cell]
        total = record.cc0 + record.cc1
        if total == 0:
            raise EmptyCellError(
                f"cell (a0={cell[0]}, a1={cell[1]}, y={cell[2]}) has zero total counts"
            )
        e[cell] = record.cc0 / total
        sigma[cell] = math.sqrt(record.cc0 * record.cc1 / total**3)
    table = ProbabilityTable(e=e, sigma=sigma)
    w = witness(table)
    w_sigma = math.sqrt(sum(value**2 for value in sigma.values()))
    return IngestResult(table=table, witness=w, witness_sigma=w_sigma)
