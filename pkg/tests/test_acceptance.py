"""Acceptance suite: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion. Criterion 7b is known to fail: it asserts that each upper bound can
be strictly tighter than the other on random states, but the block-sum bound
is provably never looser than the global one (the blocks occupy disjoint
row/column eigenspaces, so the global top-k singular-value sum dominates every
per-block quota selection). The check is kept as stated rather than weakened.
"""

import math
import time

import numpy as np
import pytest

import oracles
from coherence_lab import linalg
from coherence_lab.bounds import (
    bound_kyfan_global,
    bound_kyfan_lrd,
    kyfan_diagonal_lemma_check,
    nogo_check,
)
from coherence_lab.cli import main
from coherence_lab.modes import bipartite_mode, mode_component, mode_measure
from coherence_lab.optimizer import (
    UnitarySearchConfig,
    maximize_delta_m,
    random_allowed_unitary,
)
from coherence_lab.qubit_protocol import (
    amplification_state,
    optimal_concentration,
    purity_ceiling,
    recurrence_step,
    run_concatenation,
)
from coherence_lab.sampling import random_bloch, random_density_matrix
from coherence_lab.states import (
    BipartiteGenerator,
    BlochState,
    DensityMatrix,
    NumberOperator,
    bloch_to_density,
    isotropic_state,
)

QUBIT = NumberOperator(2)
QUTRIT = NumberOperator(3)
GEN2 = BipartiteGenerator(QUBIT)
GEN3 = BipartiteGenerator(QUTRIT)


def _passed(number: str, text: str) -> None:
    print(f"[PASS] criterion {number}: {text}")


def test_criterion_01_closed_form_vs_search_oracle():
    started = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    for k in range(200):
        rho = bloch_to_density(random_bloch(rng))
        closed = optimal_concentration(rho).delta_m
        outcome = maximize_delta_m(rho, QUBIT, 1, UnitarySearchConfig(seed=k))
        worst = max(worst, abs(outcome.best_delta_m - closed))
        assert abs(outcome.best_delta_m - closed) <= 1e-6
    elapsed = time.monotonic() - started
    assert elapsed <= 120.0
    _passed("1", f"200 qubit states, max |closed - search| = {worst:.2e}, {elapsed:.1f}s")


def test_criterion_02_bound_coherence():
    for i, p01 in enumerate(np.linspace(0.01, 0.49, 50)):
        rho = DensityMatrix(np.array([[0.5, p01], [p01, 0.5]]))
        closed = optimal_concentration(rho).delta_m
        assert closed == 0.0
        outcome = maximize_delta_m(rho, QUBIT, 1, UnitarySearchConfig(seed=i))
        assert outcome.best_delta_m <= 1e-8
    _passed("2", "50 balanced-diagonal states: closed form exactly 0, search <= 1e-8")


def _sample_traces():
    rng = np.random.default_rng(303)
    traces = []
    for _ in range(100):
        b = random_bloch(rng)
        start = BlochState(math.hypot(b.nx, b.ny), 0.0, b.nz)
        steps = [start]
        for _ in range(10):
            steps.append(recurrence_step(steps[-1]))
        traces.append(steps)
    return traces


def test_criterion_03_recurrence_matches_direct_simulation():
    worst = 0.0
    for steps in _sample_traces():
        for prev, cur in zip(steps, steps[1:]):
            expected = oracles.two_copy_step(prev.nx, prev.nz)
            worst = max(worst, abs(cur.nx - expected[0]), abs(cur.nz - expected[1]))
            assert abs(cur.nx - expected[0]) <= 1e-12
            assert abs(cur.nz - expected[1]) <= 1e-12
    _passed("3", f"100 starts x 10 steps vs two-copy simulation, max dev = {worst:.2e}")


def test_criterion_04_monotone_trajectories_and_purity_ceiling():
    for steps in _sample_traces():
        ceiling = purity_ceiling(bloch_to_density(steps[0]))
        for prev, cur in zip(steps, steps[1:]):
            assert abs(cur.nx) >= abs(prev.nx) - 1e-12
            assert cur.norm() <= prev.norm() + 1e-12
        for state in steps:
            assert abs(state.nx) <= ceiling + 1e-10
    _passed("4", "all traces monotone with the purity ceiling respected at every step")


def test_criterion_05_amplification():
    started = time.monotonic()
    state = amplification_state(10, 0.1)
    assert abs(state.nx) < 2.0**-10
    trace = run_concatenation(state, max_steps=10, convergence_eps=0.0)
    ratio = abs(trace.steps[-1].nx) / abs(state.nx)
    threshold = 2.0 ** (-0.1) * math.sqrt(1024.0)
    assert ratio > threshold
    elapsed = time.monotonic() - started
    assert elapsed <= 1.0

    ratios = []
    for layers in (4, 6, 8, 10):
        start = amplification_state(layers, 0.1)
        out = run_concatenation(start, max_steps=layers, convergence_eps=0.0)
        ratios.append(abs(out.steps[-1].nx) / abs(start.nx))
        assert ratios[-1] > 2.0 ** (-0.1) * math.sqrt(2.0**layers)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    _passed(
        "5",
        f"N=10 ratio {ratio:.2f} > {threshold:.2f} in {elapsed * 1000:.0f}ms; "
        f"ratios over N=4,6,8,10 grow monotonically",
    )


def test_criterion_06_bound_soundness_on_qutrits():
    started = time.monotonic()
    rng = np.random.default_rng(606)
    cfg_seed = 0
    checked = 0
    for rank in (1, 2, 3):
        for _ in range(100):
            rho = random_density_matrix(3, rank, rng)
            for j in (1, 2):
                cfg = UnitarySearchConfig(restarts=4, max_iters=600, seed=cfg_seed)
                cfg_seed += 1
                achieved = maximize_delta_m(rho, QUTRIT, j, cfg).best_delta_m
                assert bound_kyfan_global(rho, QUTRIT, j) >= achieved - 1e-8
                assert bound_kyfan_lrd(rho, QUTRIT, j) >= achieved - 1e-8
                checked += 1
    elapsed = time.monotonic() - started
    assert elapsed <= 600.0
    _passed("6", f"{checked} (state, mode) pairs sound against the search oracle, {elapsed:.0f}s")


def test_criterion_07a_pure_qutrit_bounds_coincide():
    rng = np.random.default_rng(707)
    for _ in range(100):
        rho = random_density_matrix(3, 1, rng)
        for j in (1, 2):
            b1 = bound_kyfan_global(rho, QUTRIT, j)
            b2 = bound_kyfan_lrd(rho, QUTRIT, j)
            assert abs(b1 - b2) <= 1e-8
    _passed("7a", "100 pure qutrit states: bounds coincide within 1e-8 for every mode")


def test_criterion_07b_both_strict_orderings_occur():
    rng = np.random.default_rng(717)
    bound1_tighter = 0
    bound2_tighter = 0
    samples = []
    samples += [(3, rank) for rank in (2, 3) for _ in range(120)]
    samples += [(4, rank) for rank in (1, 2, 3, 4) for _ in range(60)]
    for d, rank in samples:
        op = NumberOperator(d)
        rho = random_density_matrix(d, rank, rng)
        for j in range(1, d):
            b1 = bound_kyfan_global(rho, op, j)
            b2 = bound_kyfan_lrd(rho, op, j)
            if b1 < b2 - 1e-8:
                bound1_tighter += 1
            elif b2 < b1 - 1e-8:
                bound2_tighter += 1
    print(
        f"criterion 7b orderings over {len(samples)} states: "
        f"bound1 strictly tighter {bound1_tighter}, bound2 strictly tighter {bound2_tighter}"
    )
    assert bound1_tighter > 0 and bound2_tighter > 0, (
        f"both strict orderings must occur; saw bound1-tighter {bound1_tighter} and "
        f"bound2-tighter {bound2_tighter} (the block-sum bound is provably never looser, "
        f"so bound1-tighter cannot occur)"
    )
    _passed("7b", "both strict bound orderings occur on mixed samples")


def test_criterion_08_isotropic_no_go():
    rng = np.random.default_rng(808)
    for p in (0.1, 0.5, 1.0):
        iso = isotropic_state(p)
        assert nogo_check(iso, GEN2) == "no_go"
        before = mode_measure(
            DensityMatrix(linalg.partial_trace_b(iso.matrix, 2, 2)), QUBIT, 1
        )
        worst = -math.inf
        for _ in range(500):
            u = random_allowed_unitary(GEN2, rng)
            reduced = DensityMatrix(linalg.partial_trace_b(iso.evolve(u.matrix).matrix, 2, 2))
            worst = max(worst, mode_measure(reduced, QUBIT, 1) - before)
        assert worst <= 1e-9
    _passed("8", "isotropic states: verdict no_go and zero local gain over 500 unitaries each")


def test_criterion_09_mode_algebra():
    rng = np.random.default_rng(909)
    op4 = NumberOperator(4)
    for _ in range(20):
        rho = random_density_matrix(4, 4, rng)
        total = sum(mode_component(rho, op4, j).op for j in range(-3, 4))
        np.testing.assert_array_equal(total, rho.matrix)
        for j in range(4):
            np.testing.assert_array_equal(
                mode_component(rho, op4, -j).op, mode_component(rho, op4, j).op.conj().T
            )
    for _ in range(20):
        rho_ab = random_density_matrix(9, 5, rng)
        reduced = DensityMatrix(linalg.partial_trace_b(rho_ab.matrix, 3, 3))
        for j in range(-2, 3):
            lhs = linalg.partial_trace_b(bipartite_mode(rho_ab, GEN3, j).op, 3, 3)
            rhs = mode_component(reduced, QUTRIT, j).op
            assert np.abs(lhs - rhs).max() <= 1e-12
    for _ in range(100):
        rho_ab = random_density_matrix(9, 4, rng)
        u = random_allowed_unitary(GEN3, rng)
        evolved = rho_ab.evolve(u.matrix)
        for j in range(-4, 5):
            lhs = bipartite_mode(evolved, GEN3, j).op
            rhs = u.matrix @ bipartite_mode(rho_ab, GEN3, j).op @ u.matrix.conj().T
            assert np.abs(lhs - rhs).max() <= 1e-10
    _passed("9", "completeness exact, adjoint pairing exact, trace link <= 1e-12, covariance <= 1e-10")


def test_criterion_10_diagonal_lemma():
    rng = np.random.default_rng(1010)
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        size = int(rng.integers(1, n + 1))
        rows = rng.permutation(n)[:size]
        cols = rng.permutation(n)[:size]
        assert kyfan_diagonal_lemma_check(m, list(zip(rows, cols)), size)
    _passed("10", "1000 random matrices and generalized diagonals: zero violations beyond 1e-9")


def test_criterion_11_determinism(tmp_path):
    args = ["bound-compare", "--dim", "3", "--ranks", "1,2,3", "--samples", "10", "--seed", "2024"]
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    data1 = open(out1 / "bound_compare.csv", "rb").read()
    data2 = open(out2 / "bound_compare.csv", "rb").read()
    assert data1 == data2 and len(data1) > 0
    _passed("11", "fixed-seed bound comparison reruns are byte-identical")
