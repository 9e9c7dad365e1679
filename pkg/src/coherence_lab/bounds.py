"""Upper bounds on concentratable coherence and the correlation no-go test.

Both bounds compare what two copies of a state could at best deliver into one
subsystem against what the subsystem already has. The first bound applies a
Ky-Fan norm to the whole two-copy mode; the second applies it per
eigenspace-pair block, exploiting that the blocks evolve independently. The
no-go check inspects which total-gap modes a joint state occupies: when only
gaps outside the local range (and the symmetric gap 0) are present, no
covariant operation can create local coherence, even though such states are
necessarily correlated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import UnsupportedParameterError
from .modes import (
    bipartite_mode,
    bipartite_mode_set,
    lrd_decompose,
    mode_measure,
    vin_block_dim,
    vin_projector,
)
from .states import BipartiteGenerator, DensityMatrix, NumberOperator

#: bounds closer than this are reported as a tie
TIE_ATOL = 1e-8
#: slack allowed when checking an upper bound against an achieved value
SOUNDNESS_ATOL = 1e-8

NO_GO = "no_go"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class BoundReport:
    """Both upper bounds for one mode index, next to the baseline and any achieved value."""

    index: int
    bound1: float
    bound2: float
    baseline: float
    achieved: float | None
    tighter: str

    def __post_init__(self) -> None:
        if self.achieved is not None:
            if self.bound1 < self.achieved - SOUNDNESS_ATOL:
                raise ValueError(
                    f"global-mode bound {self.bound1} fell below the achieved value {self.achieved}"
                )
            if self.bound2 < self.achieved - SOUNDNESS_ATOL:
                raise ValueError(
                    f"block-sum bound {self.bound2} fell below the achieved value {self.achieved}"
                )

    def to_json(self) -> dict:
        return {
            "j": self.index,
            "bound1": self.bound1,
            "bound2": self.bound2,
            "baseline": self.baseline,
            "achieved": self.achieved,
            "tighter": self.tighter,
        }


def _check_mode_range(rho: DensityMatrix, op: NumberOperator, index: int) -> None:
    if rho.dim != op.dim:
        raise ValueError(f"state dimension {rho.dim} does not match operator dimension {op.dim}")
    if not 0 < index <= op.dim - 1:
        raise UnsupportedParameterError(
            f"mode index {index} outside the local range [1, {op.dim - 1}]"
        )


def bound_kyfan_global(rho: DensityMatrix, op: NumberOperator, index: int) -> float:
    """Ky-Fan bound from the whole two-copy mode.

    The Ky-Fan order is the number of two-copy basis positions that survive the
    partial trace into the local mode.
    """
    _check_mode_range(rho, op, index)
    gen = BipartiteGenerator(op)
    pair_mode = bipartite_mode(rho.tensor(rho), gen, index)
    order = vin_projector(gen, index).dim
    return linalg.ky_fan_norm(pair_mode.op, order) - mode_measure(rho, op, index)


def bound_kyfan_lrd(rho: DensityMatrix, op: NumberOperator, index: int) -> float:
    """Ky-Fan bound summed per eigenspace-pair block of the two-copy mode.

    Each block gets the Ky-Fan order equal to its own count of surviving
    positions; blocks with no surviving position contribute nothing. Orders
    are clamped to the block's smaller dimension.
    """
    _check_mode_range(rho, op, index)
    gen = BipartiteGenerator(op)
    pair_mode = bipartite_mode(rho.tensor(rho), gen, index)
    total = 0.0
    for block in lrd_decompose(pair_mode, gen):
        order = vin_block_dim(gen, index, block.c)
        if order == 0:
            continue
        order = min(order, min(block.op.shape))
        total += linalg.ky_fan_norm(block.op, order)
    return total - mode_measure(rho, op, index)


def kyfan_diagonal_lemma_check(matrix: np.ndarray, selection, k: int) -> bool:
    """Whether the absolute row/column-distinct entries summed stay below the k-th Ky-Fan norm.

    ``selection`` lists (row, column) positions that must form a generalized
    diagonal: no row and no column may repeat, and at most k positions are
    allowed. Used as a randomized self-check; a False return would falsify the
    diagonal lemma.
    """
    m = linalg.as_matrix(matrix)
    positions = [(int(r), int(c)) for r, c in selection]
    rows = [r for r, _ in positions]
    cols = [c for _, c in positions]
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise ValueError("selection must not repeat a row or a column")
    if len(positions) > k:
        raise ValueError(f"selection has {len(positions)} entries, more than k={k}")
    total = float(sum(abs(m[r, c]) for r, c in positions))
    return total <= linalg.ky_fan_norm(m, k) + 1e-9


def nogo_check(rho_ab: DensityMatrix, gen: BipartiteGenerator) -> str:
    """Mode-structure verdict on whether local coherence can ever be concentrated.

    Returns ``"no_go"`` when the joint state is coherent only across gaps too
    large to be seen locally (no occupied gap in [1, d-1] but some gap other
    than 0 occupied); ``"not_applicable"`` otherwise.
    """
    present = bipartite_mode_set(rho_ab, gen)
    local_range = set(range(1, gen.dim))
    if present != {0} and not (present & local_range):
        return NO_GO
    return NOT_APPLICABLE


def correlation_witness(rho_ab: DensityMatrix, gen: BipartiteGenerator) -> bool:
    """Sufficient mode-pattern condition for the two systems being correlated.

    Fires exactly when the no-go mode pattern is present: occupied gaps other
    than 0 with nothing in the local range force the state away from any
    product form.
    """
    return nogo_check(rho_ab, gen) == NO_GO


def marginal_product_distance(rho_ab: DensityMatrix, gen: BipartiteGenerator) -> float:
    """Trace-norm distance between a joint state and the product of its marginals."""
    d = gen.dim
    rho_a = linalg.partial_trace_b(rho_ab.matrix, d, d)
    rho_b = linalg.partial_trace_a(rho_ab.matrix, d, d)
    return linalg.trace_norm(rho_ab.matrix - np.kron(rho_a, rho_b))


def bound_report(
    rho: DensityMatrix,
    op: NumberOperator,
    index: int,
    achieved: float | None = None,
) -> BoundReport:
    """Evaluate both bounds and declare which is tighter (smaller), or a tie within 1e-8."""
    b1 = bound_kyfan_global(rho, op, index)
    b2 = bound_kyfan_lrd(rho, op, index)
    if abs(b1 - b2) <= TIE_ATOL:
        tighter = "tie"
    elif b1 < b2:
        tighter = "bound1"
    else:
        tighter = "bound2"
    return BoundReport(
        index=index,
        bound1=b1,
        bound2=b2,
        baseline=mode_measure(rho, op, index),
        achieved=achieved,
        tighter=tighter,
    )
