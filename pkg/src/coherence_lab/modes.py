"""Mode decomposition of states with respect to a number operator.

A mode groups the matrix elements that connect eigenvalue pairs with one fixed
gap. Modes evolve independently under unitaries that commute with the
generator, which is what makes them the right bookkeeping unit for coherence
accounting. Locally the gap of entry (r, c) is simply r - c; for a two-system
state the gaps are taken with respect to the total number operator, so entries
are grouped by (n + m) differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import StateValidationError, UnsupportedParameterError
from .states import BipartiteGenerator, DensityMatrix, NumberOperator

#: a mode counts as present when its trace norm exceeds this threshold,
#: separating structural zeros from roundoff
MODE_PRESENCE_THRESHOLD = 1e-10


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Component of an operator supported on one eigenvalue gap.

    ``eigenvalues`` assigns a generator eigenvalue to every basis index; the
    operator may only have support where the row and column eigenvalues differ
    by exactly ``index``. An index outside the attainable gap range is legal
    only for the zero operator (which is what tracing out a subsystem produces
    when the gap is too large to survive locally).
    """

    index: int
    op: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        op = linalg.as_matrix(self.op)
        eigs = np.asarray(self.eigenvalues, dtype=int)
        if op.shape != (eigs.size, eigs.size):
            raise StateValidationError(
                f"operator shape {op.shape} does not match {eigs.size} eigenvalue labels"
            )
        gaps = eigs[:, None] - eigs[None, :]
        off_support = op[gaps != self.index]
        if off_support.size and np.any(off_support != 0):
            worst = float(np.abs(off_support).max())
            raise StateValidationError(
                f"operator has weight {worst:.3e} outside the gap-{self.index} stripe"
            )
        op = op.copy()
        op.setflags(write=False)
        eigs = eigs.copy()
        eigs.setflags(write=False)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "eigenvalues", eigs)

    @property
    def dim(self) -> int:
        return self.op.shape[0]


@dataclass(frozen=True, eq=False)
class LrdOperator:
    """Restriction of a bipartite mode to one ordered pair of degenerate eigenspaces.

    Rows live in the eigenspace with eigenvalue c + index, columns in the one
    with eigenvalue c. Under a block-diagonal unitary each such restriction
    transforms on its own as V_{c+index} (block) V_c^dagger.
    """

    index: int
    c: int
    op: np.ndarray


class VinProjector(NamedTuple):
    """Basis positions of a bipartite mode that survive the trace over the second system."""

    pairs: tuple
    dim: int


def mode_component(rho: DensityMatrix, op: NumberOperator, index: int) -> ModeOperator:
    """Stripe of rho connecting eigenvalues that differ by ``index``."""
    if rho.dim != op.dim:
        raise ValueError(f"state dimension {rho.dim} does not match operator dimension {op.dim}")
    if abs(index) > op.dim - 1:
        raise UnsupportedParameterError(
            f"mode index {index} outside the range of a {op.dim}-dimensional system"
        )
    return _component(rho.matrix, op.eigenvalues, index)


def _component(matrix: np.ndarray, eigenvalues: np.ndarray, index: int) -> ModeOperator:
    eigs = np.asarray(eigenvalues, dtype=int)
    gaps = eigs[:, None] - eigs[None, :]
    comp = np.where(gaps == index, matrix, 0.0)
    return ModeOperator(index, comp, eigs)


def mode_measure(rho: DensityMatrix, op: NumberOperator, index: int) -> float:
    """Trace norm of the mode component; zero exactly when the mode is absent."""
    return linalg.trace_norm(mode_component(rho, op, index).op)


def mode_set(
    rho: DensityMatrix, op: NumberOperator, threshold: float = MODE_PRESENCE_THRESHOLD
) -> set:
    """Non-negative mode indices carrying weight above the presence threshold.

    Negative indices are redundant: the -index component is the adjoint of the
    +index one, so reports are canonicalized to index >= 0.
    """
    return {
        j
        for j in range(op.dim)
        if linalg.trace_norm(mode_component(rho, op, j).op) > threshold
    }


def bipartite_mode(rho_ab: DensityMatrix, gen: BipartiteGenerator, index: int) -> ModeOperator:
    """Component of a two-system state on one total-eigenvalue gap.

    For a product state this equals the convolution of the local modes: local
    gaps k on the first system pair with gaps index - k on the second.
    """
    if rho_ab.dim != gen.total_dim:
        raise ValueError(
            f"state dimension {rho_ab.dim} does not match generator dimension {gen.total_dim}"
        )
    if abs(index) > 2 * gen.dim - 2:
        raise UnsupportedParameterError(
            f"mode index {index} outside the range of the total number operator"
        )
    return _component(rho_ab.matrix, gen.index_eigenvalues, index)


def bipartite_mode_set(
    rho_ab: DensityMatrix, gen: BipartiteGenerator, threshold: float = MODE_PRESENCE_THRESHOLD
) -> set:
    """Non-negative total-gap indices present in a two-system state."""
    return {
        j
        for j in range(2 * gen.dim - 1)
        if linalg.trace_norm(_component(rho_ab.matrix, gen.index_eigenvalues, j).op) > threshold
    }


def local_mode_of_global(global_mode: ModeOperator, dims: tuple) -> ModeOperator:
    """Trace the second system out of a bipartite mode.

    The result is the mode of the reduced state with the same index. Gaps
    larger than the local range cannot survive the trace, so those inputs map
    to the zero operator.
    """
    dim_a, dim_b = dims
    if global_mode.dim != dim_a * dim_b:
        raise ValueError(
            f"mode dimension {global_mode.dim} does not match factors {dim_a}x{dim_b}"
        )
    reduced = linalg.partial_trace_b(global_mode.op, dim_a, dim_b)
    return ModeOperator(global_mode.index, reduced, np.arange(dim_a))


def vin_projector(gen: BipartiteGenerator, index: int) -> VinProjector:
    """Positions (|n+index, m>, |n, m>) whose coefficients feed the local mode, and their count."""
    d = gen.dim
    if not 0 < index <= d - 1:
        raise UnsupportedParameterError(
            f"mode index {index} outside the local range [1, {d - 1}]"
        )
    pairs = []
    for n in range(d - index):
        for m in range(d):
            pairs.append(((n + index) * d + m, n * d + m))
    return VinProjector(tuple(pairs), len(pairs))


def vin_block_dim(gen: BipartiteGenerator, index: int, c: int) -> int:
    """Number of surviving positions whose column ket |n, m> has n + m = c."""
    d = gen.dim
    count = 0
    for n in range(d - index):
        m = c - n
        if 0 <= m <= d - 1:
            count += 1
    return count


def lrd_decompose(mode: ModeOperator, gen: BipartiteGenerator) -> list:
    """Split a bipartite mode into its eigenspace-pair restrictions.

    The blocks cover every entry of the mode exactly once; stacking them back
    into their row/column positions reassembles the mode.
    """
    if mode.dim != gen.total_dim:
        raise ValueError(
            f"mode dimension {mode.dim} does not match generator dimension {gen.total_dim}"
        )
    blocks = []
    for c in range(gen.n_eigenvalues):
        if not 0 <= c + mode.index < gen.n_eigenvalues:
            continue
        rows = gen.block_indices(c + mode.index)
        cols = gen.block_indices(c)
        blocks.append(LrdOperator(mode.index, c, mode.op[np.ix_(rows, cols)]))
    return blocks


def reassemble_lrd(blocks: list, gen: BipartiteGenerator, index: int) -> np.ndarray:
    """Place eigenspace-pair blocks back at their global positions."""
    out = np.zeros((gen.total_dim, gen.total_dim), dtype=complex)
    for block in blocks:
        rows = gen.block_indices(block.c + index)
        cols = gen.block_indices(block.c)
        out[np.ix_(rows, cols)] = block.op
    return out
