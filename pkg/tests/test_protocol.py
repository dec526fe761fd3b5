import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qracsim import protocol, qcore
from qracsim.errors import (
    DomainError,
    FilterAnnihilatesStateError,
    MissingEntryError,
)

SQRT_HALF = math.sqrt(0.5)
IDEAL_E = (1.0 + SQRT_HALF) / 2.0  # 0.8535533905932737


def pipeline_oracle(gamma, f_a, f_b, rho):
    """Direct matrix-product pipeline, independent of the protocol module."""
    fa = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - f_a)]], dtype=complex)
    fb = np.array([[math.sqrt(1.0 - f_b), 0.0], [0.0, 1.0]], dtype=complex)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    sigma = fa @ rho @ fa.conj().T
    sigma = k0 @ sigma @ k0.conj().T + k1 @ sigma @ k1.conj().T
    sigma = fb @ sigma @ fb.conj().T
    return sigma


def random_table(rng):
    return protocol.ProbabilityTable(
        e={cell: float(rng.uniform()) for cell in protocol.CELLS}
    )


def test_canonical_states():
    states = protocol.canonical_states()
    assert np.array_equal(states[(0, 0)], np.diag([1.0 + 0j, 0.0]))
    assert np.array_equal(states[(1, 1)], np.diag([0.0, 1.0 + 0j]))
    assert np.abs(states[(0, 1)][0, 1] + 0.5) <= 1e-15
    assert np.abs(states[(1, 0)][0, 1] - 0.5) <= 1e-15
    for rho in states.values():
        qcore.validate_density_matrix(rho)


def test_hwp_preparation_special_angles():
    assert np.abs(protocol.hwp_preparation(0.0) - qcore.KET_H).max() <= 1e-15
    assert np.abs(protocol.hwp_preparation(math.pi / 8.0) - qcore.KET_PLUS).max() <= 1e-15
    # At 3 pi / 8 the ket is -|->: same density matrix up to global phase.
    rho = qcore.density_from_ket(protocol.hwp_preparation(3.0 * math.pi / 8.0))
    assert np.abs(rho - qcore.density_from_ket(qcore.KET_MINUS)).max() <= 1e-15


def test_hwp_preparation_reproduces_canonical_states():
    states = protocol.canonical_states()
    for x, theta in protocol.PREP_ANGLES.items():
        rho = qcore.density_from_ket(protocol.hwp_preparation(theta))
        assert np.abs(rho - states[x]).max() <= 1e-14


def test_canonical_measurements():
    m0, m1 = protocol.canonical_measurements()
    assert abs(np.trace(m0.observable)) <= 1e-15
    assert abs(np.trace(m1.observable)) <= 1e-15
    assert np.abs(m1.observable @ m1.observable - qcore.IDENTITY).max() <= 1e-14
    expected = (qcore.PAULI_Z - qcore.PAULI_X) / math.sqrt(2.0)
    assert np.abs(m0.observable - expected).max() <= 1e-15
    p = np.trace(m0.proj0 @ np.diag([1.0, 0.0])).real
    assert abs(p - IDEAL_E) <= 1e-15


def test_measurement_invariants():
    for theta in np.linspace(0.0, math.pi, 37):
        m = protocol.hwp_measurement(float(theta))
        assert np.abs(m.proj0 + m.proj1 - qcore.IDENTITY).max() <= 1e-12
        assert np.abs(m.proj0 @ m.proj1).max() <= 1e-12
        assert np.abs(m.observable - (m.proj0 - m.proj1)).max() <= 1e-12


def test_measurement_from_observable_rejects_invalid():
    with pytest.raises(DomainError):
        protocol.measurement_from_observable(qcore.IDENTITY)  # trace 2
    with pytest.raises(DomainError):
        protocol.measurement_from_observable(0.5 * qcore.PAULI_Z)  # eigenvalues +-1/2


def test_hwp_measurement_special_angles():
    assert np.abs(protocol.hwp_measurement(0.0).observable - qcore.PAULI_Z).max() <= 1e-15
    m0, m1 = protocol.canonical_measurements()
    realized_m1 = protocol.hwp_measurement(math.pi / 16.0)
    realized_m0 = protocol.hwp_measurement(7.0 * math.pi / 16.0)
    assert np.abs(realized_m1.observable - m1.observable).max() <= 1e-14
    assert np.abs(realized_m0.observable - m0.observable).max() <= 1e-14


def test_conditional_probability_ideal():
    cfg = protocol.ScenarioConfig(gamma=0.0)
    p = protocol.conditional_probability(cfg, 0, 0, 0, 0)
    assert abs(p - IDEAL_E) <= 1e-12


def test_conditional_probability_full_decay_is_state_independent():
    cfg = protocol.ScenarioConfig(gamma=1.0)
    for a0, a1 in protocol.INPUTS:
        p = protocol.conditional_probability(cfg, a0, a1, 0, 0)
        assert abs(p - IDEAL_E) <= 1e-12


def test_conditional_probability_complementary_outcomes():
    rng = np.random.default_rng(37)
    for _ in range(200):
        cfg = protocol.ScenarioConfig(
            gamma=rng.uniform(),
            f_a=rng.uniform(0.0, 0.95),
            f_b=rng.uniform(0.0, 0.95),
            prep_offsets=tuple(rng.uniform(-0.05, 0.05, size=4)),
            meas_offsets=tuple(rng.uniform(-0.05, 0.05, size=2)),
        )
        a0, a1 = protocol.INPUTS[rng.integers(4)]
        y = int(rng.integers(2))
        p0 = protocol.conditional_probability(cfg, a0, a1, y, 0)
        p1 = protocol.conditional_probability(cfg, a0, a1, y, 1)
        assert 0.0 <= p0 <= 1.0
        assert abs(p0 + p1 - 1.0) <= 1e-12


def test_pipeline_state_against_matrix_oracle():
    # gamma = 0.52, f_a = f_b = 0.45, x = (0,1): compare the normalized
    # pipeline output against the direct sandwich product.
    cfg = protocol.ScenarioConfig(gamma=0.52, f_a=0.45, f_b=0.45)
    state, acceptance = protocol.filtered_damped_state(cfg, 0, 1)
    sigma = pipeline_oracle(0.52, 0.45, 0.45, qcore.density_from_ket(qcore.KET_MINUS))
    n = np.trace(sigma).real
    assert abs(acceptance - n) <= 1e-12
    assert np.abs(state - sigma / n).max() <= 1e-12
    bloch = qcore.density_to_bloch(state)
    assert abs(bloch[0] - (-0.7846209773811451)) <= 1e-12
    assert abs(bloch[2] - 0.4563986409966026) <= 1e-12


def test_evaluate_scenario_ideal_sign_pattern():
    table = protocol.evaluate_scenario(protocol.ScenarioConfig(gamma=0.0))
    for cell in protocol.CELLS:
        expected = IDEAL_E if protocol.WITNESS_SIGNS[cell] > 0 else 1.0 - IDEAL_E
        assert abs(table.entry(*cell) - expected) <= 1e-12


def test_evaluate_scenario_full_decay_equal_entries():
    table = protocol.evaluate_scenario(protocol.ScenarioConfig(gamma=1.0))
    for y in protocol.QUESTIONS:
        values = [table.entry(a0, a1, y) for a0, a1 in protocol.INPUTS]
        assert max(values) - min(values) <= 1e-12


def test_evaluate_scenario_annihilation_names_input():
    cfg = protocol.ScenarioConfig(gamma=0.3, f_a=1.0)
    with pytest.raises(FilterAnnihilatesStateError) as excinfo:
        protocol.evaluate_scenario(cfg)
    assert excinfo.value.state_label == (1, 1)


def test_witness_ideal_and_degenerate_tables():
    ideal = protocol.evaluate_scenario(protocol.ScenarioConfig(gamma=0.0))
    assert abs(protocol.witness(ideal) - 2.0 * math.sqrt(2.0)) <= 1e-9

    flat = protocol.ProbabilityTable(e={cell: 0.5 for cell in protocol.CELLS})
    assert protocol.witness(flat) == 0.0

    decayed = protocol.evaluate_scenario(protocol.ScenarioConfig(gamma=1.0))
    assert abs(protocol.witness(decayed)) <= 1e-12


def test_witness_missing_entry():
    partial = dict.fromkeys(protocol.CELLS, 0.5)
    partial.pop((1, 1, 1))
    with pytest.raises(MissingEntryError):
        protocol.witness(protocol.ProbabilityTable(e=partial))


def test_asp_from_witness_anchors():
    assert abs(protocol.asp_from_witness(2.0 * math.sqrt(2.0)) - IDEAL_E) <= 1e-15
    assert protocol.asp_from_witness(2.0) == 0.75
    assert protocol.asp_from_witness(0.0) == 0.5


def test_asp_direct_matches_witness_identity_bulk():
    rng = np.random.default_rng(41)
    for _ in range(10_000):
        table = random_table(rng)
        lhs = protocol.asp_direct(table)
        rhs = protocol.asp_from_witness(protocol.witness(table))
        assert abs(lhs - rhs) <= 1e-12


@given(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=8, max_size=8))
def test_asp_direct_matches_witness_identity_property(values):
    table = protocol.ProbabilityTable(e=dict(zip(protocol.CELLS, values)))
    lhs = protocol.asp_direct(table)
    rhs = protocol.asp_from_witness(protocol.witness(table))
    assert abs(lhs - rhs) <= 1e-12


def test_witness_bounded_for_quantum_scenarios():
    rng = np.random.default_rng(43)
    for _ in range(100):
        cfg = protocol.ScenarioConfig(
            gamma=rng.uniform(),
            f_a=rng.uniform(0.0, 0.9),
            f_b=rng.uniform(0.0, 0.9),
            prep_offsets=tuple(rng.uniform(-0.3, 0.3, size=4)),
            meas_offsets=tuple(rng.uniform(-0.3, 0.3, size=2)),
        )
        w = protocol.witness(protocol.evaluate_scenario(cfg))
        assert abs(w) <= 2.0 * math.sqrt(2.0) + 1e-9


def test_symmetric_filters_inert_without_noise():
    # At gamma = 0 the two filters compose to a multiple of the identity
    # when f_a = f_b, so the normalized states (and the witness) are
    # untouched for any f < 1.
    for f in np.linspace(0.0, 0.99, 12):
        cfg = protocol.ScenarioConfig(gamma=0.0, f_a=float(f), f_b=float(f))
        w = protocol.witness(protocol.evaluate_scenario(cfg))
        assert abs(w - 2.0 * math.sqrt(2.0)) <= 1e-9


def test_scenario_config_validation():
    with pytest.raises(DomainError):
        protocol.ScenarioConfig(gamma=1.2)
    with pytest.raises(DomainError):
        protocol.ScenarioConfig(gamma=0.5, f_a=-0.1)
    with pytest.raises(DomainError):
        protocol.ScenarioConfig(gamma=0.5, prep_offsets=(0.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        protocol.ScenarioConfig(gamma=0.5, meas_offsets=(math.nan, 0.0))


def test_effective_filters_clamped():
    cfg = protocol.ScenarioConfig(gamma=0.0, f_a=0.999, f_b=0.5, filter_scale_errors=(0.01, -2.0))
    f_a, f_b = cfg.effective_filters()
    assert f_a == 1.0
    assert f_b == 0.0


def test_classical_bruteforce_exact_optimum():
    bound = protocol.classical_bruteforce()
    assert bound.strategy_count == 256
    assert bound.max_witness == 2.0
    assert bound.max_asp == 0.75
    assert len(bound.maximizers) >= 1

    # Re-evaluate one maximizer from scratch to confirm it attains W = 2.
    encoding, decoding = bound.maximizers[0]
    entries = {}
    for index, (a0, a1) in enumerate(protocol.INPUTS):
        message = encoding[index]
        for y in protocol.QUESTIONS:
            entries[(a0, a1, y)] = 1.0 if decoding[2 * message + y] == 0 else 0.0
    assert protocol.witness(protocol.ProbabilityTable(e=entries)) == 2.0


def test_classical_strategies_never_exceed_bound():
    # Independent enumeration over all 256 deterministic strategies.
    for enc_bits in range(16):
        for dec_bits in range(16):
            w = 0.0
            for index, (a0, a1) in enumerate(protocol.INPUTS):
                message = (enc_bits >> index) & 1
                for y in protocol.QUESTIONS:
                    b = (dec_bits >> (2 * message + y)) & 1
                    e = 1.0 if b == 0 else 0.0
                    w += protocol.WITNESS_SIGNS[(a0, a1, y)] * e
            assert w <= 2.0
