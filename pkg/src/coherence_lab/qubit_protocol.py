"""Closed-form qubit coherence concentration and the multi-copy concatenation protocol.

Two copies of a qubit admit a single nontrivial free rotation: the one acting
inside the degenerate {|01>, |10>} subspace of the total number operator. The
optimal angle and the resulting gain in the off-diagonal magnitude have closed
forms, and feeding pairs of outputs back into the same step gives a recurrence
on the Bloch vector whose behaviour this module exposes: monotone trajectories,
a purity ceiling on the reachable coherence, and input states whose
output/input coherence ratio grows without bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import UnsupportedParameterError
from .states import (
    AllowedUnitary,
    BipartiteGenerator,
    BlochState,
    DensityMatrix,
    NumberOperator,
    bloch_to_density,
    density_to_bloch,
)

#: matching tolerance between the closed forms and direct two-copy simulation
SIMULATION_ATOL = 1e-10
#: trajectory monotonicity slack for floating-point rounding
MONOTONE_ATOL = 1e-12
#: factor realizing the "much smaller than" requirement in the amplification construction
AMPLIFICATION_MARGIN = 1e-3
#: smallest representable transverse component before the construction degenerates
AMPLIFICATION_FLOOR = 1e-300


@dataclass(frozen=True)
class ConcentrationResult:
    """Optimal single-step concentration: angle, gain, output state, and the unitary used."""

    theta_opt: float
    delta_m: float
    output_state: BlochState
    unitary: AllowedUnitary

    def __post_init__(self) -> None:
        if self.delta_m < 0:
            raise ValueError(f"concentration gain must be non-negative, got {self.delta_m}")
        if not 0.0 <= self.theta_opt <= math.pi / 2.0:
            raise ValueError(f"rotation angle {self.theta_opt} outside [0, pi/2]")


@dataclass(frozen=True)
class ConcatTrace:
    """Trajectory of the concatenation protocol through the Bloch sphere."""

    steps: tuple
    converged_at: int | None

    def __post_init__(self) -> None:
        for prev, cur in zip(self.steps, self.steps[1:]):
            if abs(cur.nx) < abs(prev.nx) - MONOTONE_ATOL:
                raise ValueError("transverse component decreased along the trace")
            if cur.nz**2 > prev.nz**2 + MONOTONE_ATOL:
                raise ValueError("squared z component increased along the trace")
            if cur.norm() > prev.norm() + MONOTONE_ATOL:
                raise ValueError("Bloch norm increased along the trace")

    @property
    def copies_consumed(self) -> tuple:
        """Input copies used by each step: 2^m at step m."""
        return tuple(1 << m for m in range(len(self.steps)))


def _canonical(b: BlochState) -> BlochState:
    # absorb the free z-rotation: nx <- |transverse component|, ny <- 0
    return BlochState(math.hypot(b.nx, b.ny), 0.0, b.nz)


def optimal_unitary(p00: float) -> AllowedUnitary:
    """Two-copy rotation in the middle degenerate block that is optimal for a state with diagonal p00.

    The rotation magnitude is arccos(1/sqrt(1+(2 p00 - 1)^2)); its sense
    follows the sign of 2 p00 - 1.
    """
    v = 2.0 * p00 - 1.0
    scale = math.sqrt(1.0 + v * v)
    cos_t, sin_t = 1.0 / scale, v / scale
    block = np.array([[cos_t, -sin_t], [sin_t, cos_t]], dtype=complex)
    gen = BipartiteGenerator(NumberOperator(2))
    return AllowedUnitary(gen, (np.eye(1, dtype=complex), block, np.eye(1, dtype=complex)))


def optimal_concentration(rho: DensityMatrix) -> ConcentrationResult:
    """Best achievable increase of the off-diagonal magnitude from two copies of a qubit.

    The closed-form gain is |p01| (sqrt(1+(2 p00 - 1)^2) - 1). The returned
    output state is computed by direct simulation (build the two-copy state,
    conjugate, trace out the partner system) and is checked against the closed
    form before returning.
    """
    if rho.dim != 2:
        raise UnsupportedParameterError(f"expected a qubit state, got dimension {rho.dim}")
    p00 = float(rho.matrix[0, 0].real)
    p01 = complex(rho.matrix[0, 1])
    v = 2.0 * p00 - 1.0
    scale = math.sqrt(1.0 + v * v)
    delta_m = abs(p01) * (scale - 1.0)
    theta_opt = math.acos(1.0 / scale)
    unitary = optimal_unitary(p00)

    conjugated = rho.tensor(rho).evolve(unitary.matrix)
    reduced = DensityMatrix(linalg.partial_trace_b(conjugated.matrix, 2, 2))
    simulated_gain = abs(complex(reduced.matrix[0, 1])) - abs(p01)
    if abs(simulated_gain - delta_m) > SIMULATION_ATOL:
        raise RuntimeError(
            f"closed form and two-copy simulation disagree: {delta_m} vs {simulated_gain}"
        )
    return ConcentrationResult(theta_opt, delta_m, density_to_bloch(reduced), unitary)


def recurrence_step(state: BlochState) -> BlochState:
    """One concatenation layer in Bloch form.

    The free z-rotation is absorbed first (ny is forced to 0), then
        nz <- nz - nz nx^2 / (1 + nz^2)
        nx <- nx sqrt(1 + nz^2).
    Matches the direct two-copy simulation under the optimal unitary.
    """
    b = _canonical(state)
    denom = 1.0 + b.nz * b.nz
    nz = b.nz - b.nz * b.nx * b.nx / denom
    nx = b.nx * math.sqrt(denom)
    return BlochState(nx, 0.0, nz)


def run_concatenation(
    start: BlochState,
    max_steps: int = 1_000_000,
    convergence_eps: float = 1e-3,
) -> ConcatTrace:
    """Iterate the recurrence from a starting state.

    Records the canonicalized state after every layer. ``converged_at`` is the
    first step whose |nz| falls below ``convergence_eps``; it stays None when
    the step cap is reached first (near-axis starting points converge slowly).
    """
    if max_steps < 1:
        raise UnsupportedParameterError(f"max_steps must be at least 1, got {max_steps}")
    current = _canonical(start)
    steps = [current]
    converged_at = 0 if abs(current.nz) < convergence_eps else None
    m = 0
    while converged_at is None and m < max_steps:
        nxt = recurrence_step(current)
        m += 1
        steps.append(nxt)
        if abs(nxt.nz) < convergence_eps:
            converged_at = m
        elif nxt == current:
            # exact fixed point: no further progress is possible
            break
        current = nxt
    return ConcatTrace(tuple(steps), converged_at)


def purity_ceiling(rho: DensityMatrix) -> float:
    """Largest off-diagonal magnitude any number of concatenation layers can reach.

    Equals sqrt(2 tr(rho^2) - 1), the Bloch 2-norm of the starting state.
    """
    if rho.dim != 2:
        raise UnsupportedParameterError(f"expected a qubit state, got dimension {rho.dim}")
    radicand = 2.0 * rho.purity() - 1.0
    return math.sqrt(max(radicand, 0.0))


def _amplification_components(n_layers: int, epsilon: float) -> tuple:
    nz = 2.0 ** (-epsilon / (2.0 * n_layers))
    transverse_sq = (
        AMPLIFICATION_MARGIN
        * 4.0 ** (-n_layers)
        / (2.0 * n_layers)
        * min(1.0 - nz * nz, nz * nz)
    )
    return math.sqrt(transverse_sq), nz


def amplification_state(n_layers: int, epsilon: float) -> BlochState:
    """Starting state whose coherence ratio after n_layers steps exceeds 2^(-epsilon) sqrt(2^n_layers).

    The z component is placed just below 1 (n_layers * |log2 nz| <= epsilon) and
    the transverse component is suppressed far below 2^(-n_layers), so the
    initial coherence is tiny while each layer nearly doubles its square.
    """
    if n_layers < 1:
        raise UnsupportedParameterError(f"layer count must be at least 1, got {n_layers}")
    if epsilon <= 0.0:
        raise UnsupportedParameterError(f"epsilon must be positive, got {epsilon}")
    nx, nz = _amplification_components(n_layers, epsilon)
    if nx < AMPLIFICATION_FLOOR:
        feasible = n_layers
        while feasible > 1 and _amplification_components(feasible, epsilon)[0] < AMPLIFICATION_FLOOR:
            feasible -= 1
        raise UnsupportedParameterError(
            f"transverse component underflows double precision for {n_layers} layers; "
            f"the largest feasible layer count at epsilon={epsilon} is {feasible}"
        )
    if not nx < 2.0 ** (-n_layers):
        raise RuntimeError("constructed state violates its own coherence budget")
    return BlochState(nx, 0.0, nz)


def vector_field(radial: int, angular: int) -> list:
    """Displacement of one recurrence step on a polar grid over the quarter disc.

    Grid points are r in [0, 1] (``radial`` values) by angle in [0, pi/2]
    (``angular`` values) measured from the nx axis, so every point satisfies
    nx, nz >= 0 and norm <= 1, and both bounding axes are included. Returns
    (state, (dnx, dnz)) rows in row-major grid order.
    """
    if radial < 1 or angular < 1:
        raise UnsupportedParameterError("grid resolution must be at least 1 in each direction")
    rows = []
    for r in np.linspace(0.0, 1.0, radial):
        for phi in np.linspace(0.0, math.pi / 2.0, angular):
            state = BlochState(float(r * math.cos(phi)), 0.0, float(r * math.sin(phi)))
            nxt = recurrence_step(state)
            rows.append((state, (nxt.nx - state.nx, nxt.nz - state.nz)))
    return rows
