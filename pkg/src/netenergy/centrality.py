"""Energy-flow centralities and driver-node rankings.

``p[i]``  energy node i injects into the whole network as sole driver.
``q[i]``  energy reaching node i from all nodes, itself included.
``q_tilde[i]`` the same without the self term; zero exactly for roots.
``r_diff = p - q`` is a node's net energy contribution, ``r_quot = p / q``
weights the difficulty of reaching a node indirectly more heavily.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Optional

import numpy as np

from . import io
from .errors import ValidationError
from .gramian import GramianSpec, _node_set, aggregate_gramians, energy_flow_matrix
from .netgraph import Network, SeedLike, make_rng

Criterion = Literal["rank_diff", "rank_quot", "p_only"]
Strategy = Literal["rank_diff", "rank_quot", "trace_max", "random"]
STRATEGIES = ("rank_diff", "rank_quot", "trace_max", "random")


@dataclass(frozen=True, eq=False)
class CentralityTable:
    p: np.ndarray
    q: np.ndarray
    q_tilde: np.ndarray
    r_diff: np.ndarray
    r_quot: np.ndarray
    spec: GramianSpec

    @property
    def n(self) -> int:
        return len(self.p)

    def score(self, criterion: str) -> np.ndarray:
        if criterion == "rank_diff":
            return self.r_diff
        if criterion == "rank_quot":
            return self.r_quot
        if criterion in ("p_only", "trace_max"):
            return self.p
        raise ValidationError(f"unknown ranking criterion {criterion!r}")

    def to_csv(self) -> str:
        """CSV with 1-based node ids and 17 significant digits."""
        rows = [(i + 1, self.p[i], self.q[i], self.q_tilde[i], self.r_diff[i], self.r_quot[i])
                for i in range(self.n)]
        return io.csv_text(["node", "p", "q", "q_tilde", "r_diff", "r_quot"], rows)


@dataclass(frozen=True)
class DriverSet:
    members: tuple[int, ...]
    strategy: str
    seed: Optional[int] = None

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise ValidationError(f"driver set has repeated members: {self.members}")

    @property
    def m(self) -> int:
        return len(self.members)


def compute_centralities(net: Network, spec: GramianSpec) -> CentralityTable:
    """All centralities from one pair of aggregate Gramians.

    ``q_tilde`` equals ``q`` minus each node's self-energy; it is evaluated as
    the off-diagonal row sum of the energy-flow matrix, which avoids the
    cancellation in ``q - eps`` and is exactly zero for nodes fed by no
    other node.
    """
    W_I, M_I = aggregate_gramians(net, spec)
    p = np.diag(M_I.mat).copy()
    q = np.diag(W_I.mat).copy()
    E = energy_flow_matrix(net, spec, total_energy=W_I.trace())
    np.fill_diagonal(E, 0.0)
    q_tilde = E.sum(axis=1)
    return CentralityTable(p=p, q=q, q_tilde=q_tilde, r_diff=p - q, r_quot=p / q, spec=spec)


def rank_nodes(table: CentralityTable, criterion: Criterion) -> list[int]:
    """Nodes by descending score; equal scores keep ascending index order."""
    score = table.score(criterion)
    return np.lexsort((np.arange(table.n), -score)).tolist()


def select_drivers(net: Network, strategy: Strategy, m: int, spec: GramianSpec,
                   seed: Optional[SeedLike] = None,
                   table: Optional[CentralityTable] = None) -> DriverSet:
    """Pick ``m`` driver nodes.

    ``trace_max`` takes the top-m nodes by ``p``; since the trace of a
    Gramian is additive over drivers this maximises ``trace(W)`` exactly.
    ``random`` draws a uniform m-subset and needs ``seed``.  A precomputed
    ``table`` skips recomputing the centralities.
    """
    n = net.n
    if int(m) != m or not 1 <= m <= n:
        raise ValidationError(f"m must lie in 1..{n}, got {m}")
    if strategy == "random":
        if seed is None:
            raise ValidationError("random driver placement needs a seed")
        members = make_rng(seed).choice(n, size=m, replace=False)
        return DriverSet(tuple(int(k) for k in members), "random",
                         seed if isinstance(seed, int) else None)
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}")
    if table is None:
        table = compute_centralities(net, spec)
    criterion = "p_only" if strategy == "trace_max" else strategy
    return DriverSet(tuple(rank_nodes(table, criterion)[:m]), strategy)


def _subset(n: int, nodes: Iterable[int]) -> list[int]:
    nodes = list(nodes)
    return list(_node_set(n, nodes, "node")) if nodes else []


def net_energy_flow(net: Network, S1: Iterable[int], S2: Iterable[int],
                    spec: GramianSpec) -> float:
    """Energy sent from set ``S1`` into set ``S2`` minus energy sent back."""
    s1 = _subset(net.n, S1)
    s2 = _subset(net.n, S2)
    if not s1 or not s2:
        return 0.0
    E = energy_flow_matrix(net, spec)
    block = E[np.ix_(s2, s1)]
    back = E[np.ix_(s1, s2)]
    return float(block.sum() - back.sum())


def commutator_diagonal(net: Network, T: int) -> np.ndarray:
    """``diag(sum_{t<T} [(A^T)^t, A^t])``, which reproduces ``r_diff``."""
    if int(T) != T or T < 1:
        raise ValidationError(f"T must be a positive integer, got {T}")
    A = net.adj
    P = np.eye(net.n)
    out = np.zeros(net.n)
    for _ in range(T - 1):
        P = A @ P
        out += np.diag(P.T @ P - P @ P.T)
    return out
