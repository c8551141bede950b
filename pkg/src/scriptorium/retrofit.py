"""Hierarchy-guided adjustment of the label vector space.

Connected labels are pulled toward each other by iterative weighted
averaging against their original vectors, producing the second vector
space that union nearest-neighbor queries consult. The original space is
never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hierarchy import LabelHierarchy
from .vecspace import VectorSpace


@dataclass
class RetrofitParams:
    alpha: float = 1.0  # pull toward the original vector
    beta: Optional[float] = None  # per-edge weight; None = 1 / degree(i)
    iterations: int = 10
    symmetrize: bool = True  # treat hierarchy edges as undirected adjacency
    include_back_edges: bool = False  # back edges mark conflicts, not semantics

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class RetrofitResult:
    space: VectorSpace
    displacements: list[float]  # max movement per iteration
    skipped: list[str]  # hierarchy nodes without vectors


def retrofit(orig: VectorSpace, hierarchy: LabelHierarchy, params: RetrofitParams | None = None) -> RetrofitResult:
    """Sweep nodes in lexicographic order, replacing each vector with the
    alpha/beta-weighted mean of its original vector and its current
    neighborhood:

        q_i <- (alpha * q^_i + sum_j beta_ij * q_j) / (alpha + sum_j beta_ij)

    Neighbors are hierarchy-adjacent labels that have vectors; an empty
    hierarchy returns a copy of the original space.
    """
    params = params or RetrofitParams()
    edges = hierarchy.edge_set()
    if not params.include_back_edges:
        edges -= hierarchy.back_edges()

    adjacency: dict[str, set[str]] = {}
    for u, v in edges:
        if u in orig and v in orig:
            adjacency.setdefault(u, set()).add(v)
            if params.symmetrize:
                adjacency.setdefault(v, set()).add(u)

    skipped = sorted(n for n in hierarchy.nodes if n not in orig)
    name = f"{orig.name}.retro.v{hierarchy.version}"
    vectors = {key: vec for key, vec in orig.items()}
    originals = {key: vec.copy() for key, vec in vectors.items()}

    participants = sorted(adjacency)
    displacements: list[float] = []
    for _ in range(params.iterations):
        largest = 0.0
        for node in participants:
            neighbors = sorted(adjacency[node])
            if not neighbors:
                continue
            beta = params.beta if params.beta is not None else 1.0 / len(neighbors)
            acc = params.alpha * originals[node]
            for other in neighbors:
                acc = acc + beta * vectors[other]
            new_vec = acc / (params.alpha + beta * len(neighbors))
            largest = max(largest, float(np.linalg.norm(new_vec - vectors[node])))
            vectors[node] = new_vec
        displacements.append(largest)

    return RetrofitResult(
        space=VectorSpace(name, orig.dim, vectors),
        displacements=displacements,
        skipped=skipped,
    )


@dataclass
class ConvergenceReport:
    per_iteration: list[float]
    final_displacement: float
    non_increasing: bool


def convergence_report(displacements: list[float]) -> ConvergenceReport:
    """Summarize per-iteration max displacements of a retrofit run."""
    if not displacements:
        raise ValueError("at least one iteration must be recorded")
    non_increasing = all(b <= a + 1e-12 for a, b in zip(displacements, displacements[1:]))
    return ConvergenceReport(
        per_iteration=list(displacements),
        final_displacement=displacements[-1],
        non_increasing=non_increasing,
    )
