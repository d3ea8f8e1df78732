"""Weighted directed networks: representation, random generators, structure.

Adjacency convention: ``adj[j, i]`` is the weight of the edge from node ``i``
to node ``j`` so that the state update reads ``x(t+1) = adj @ x(t)``.
Node indices are 0-based throughout the Python API.

All randomness goes through :func:`make_rng`, which builds a numpy
``Generator`` on the counter-based Philox bit generator.  Philox output for a
given key is fixed across numpy releases, which is what makes seeded networks
reproducible.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Sequence, Union

import numpy as np
import scipy.sparse.linalg

from .errors import ValidationError

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

#: matrices above this size use ARPACK for the spectral radius
DENSE_EIG_LIMIT = 2000


class ZeroRadiusWarning(UserWarning):
    """A generated network has spectral radius zero and was not rescaled."""


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a Philox-backed generator; an existing Generator passes through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (int, np.integer)):
        if seed < 0 or seed >= 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
        seed = int(seed)
    return np.random.Generator(np.random.Philox(seed))


def spectral_radius(mat: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    n = mat.shape[0]
    if n <= DENSE_EIG_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvals(mat))))
    vals = scipy.sparse.linalg.eigs(mat, k=1, which="LM", tol=1e-10,
                                    return_eigenvectors=False)
    return float(np.abs(vals[0]))


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable weighted directed graph stored as a dense adjacency matrix."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adj, dtype=float)
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @cached_property
    def spectral_radius(self) -> float:
        return spectral_radius(self.adj)

    @property
    def is_stable(self) -> bool:
        return self.spectral_radius < 1.0

    def edges(self) -> list[tuple[int, int, float]]:
        """Edges as ``(source, target, weight)`` triples, row-major order."""
        rows, cols = np.nonzero(self.adj)
        return [(int(c), int(r), float(self.adj[r, c])) for r, c in zip(rows, cols)]

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.adj.shape == other.adj.shape and bool(np.array_equal(self.adj, other.adj))

    def __repr__(self):
        return f"Network(n={self.n}, edges={int(np.count_nonzero(self.adj))})"


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters of the two random network families.

    The scale-free defaults give in/out-degree tail exponents of 3.14 and
    2.88 via ``c_in = 1 + (1 + delta_in*(alpha+gamma)) / (alpha+beta)`` and
    ``c_out = 1 + (1 + delta_out*(alpha+gamma)) / (gamma+beta)``.
    """

    kind: Literal["erdos_renyi", "directed_scale_free"]
    n: int
    edge_prob: float = 0.01
    sf_alpha: float = 0.2
    sf_beta: float = 0.6
    sf_gamma: float = 0.2
    sf_delta_in: float = 1.78
    sf_delta_out: float = 1.26
    target_rho: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("erdos_renyi", "directed_scale_free"):
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}")
        if not 0.0 <= self.edge_prob <= 1.0:
            raise ValidationError(f"edge_prob must lie in [0, 1], got {self.edge_prob}")
        sf = (self.sf_alpha, self.sf_beta, self.sf_gamma, self.sf_delta_in, self.sf_delta_out)
        if any(not math.isfinite(v) or v < 0 for v in sf):
            raise ValidationError("scale-free parameters must be finite and nonnegative")
        if abs(self.sf_alpha + self.sf_beta + self.sf_gamma - 1.0) > 1e-12:
            raise ValidationError("sf_alpha + sf_beta + sf_gamma must equal 1")
        if self.sf_alpha + self.sf_gamma <= 0:
            raise ValidationError("sf_alpha + sf_gamma must be positive or the graph never grows")
        if not (math.isfinite(self.target_rho) and self.target_rho > 0):
            raise ValidationError(f"target_rho must be positive, got {self.target_rho}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def sf_exponents(self) -> tuple[float, float]:
        """Asymptotic (in, out) degree exponents of the growth model."""
        a, b, g = self.sf_alpha, self.sf_beta, self.sf_gamma
        c_in = 1 + (1 + self.sf_delta_in * (a + g)) / (a + b) if a + b > 0 else math.inf
        c_out = 1 + (1 + self.sf_delta_out * (a + g)) / (g + b) if g + b > 0 else math.inf
        return c_in, c_out


def network_from_matrix(mat: Sequence[Sequence[float]] | np.ndarray) -> Network:
    """Wrap a square finite matrix as a :class:`Network` (no rescaling)."""
    try:
        arr = np.array(mat, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix is not numeric: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValidationError(f"adjacency must be a non-empty square matrix, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        r, c = bad[0]
        raise ValidationError(f"non-finite entry {arr[r, c]} at row {r}, column {c}")
    return Network(arr)


def rescale_to_radius(net: Network, rho: float) -> Network:
    """Scale the adjacency so that its spectral radius equals ``rho``."""
    if not (math.isfinite(rho) and rho > 0):
        raise ValidationError(f"rho must be positive, got {rho}")
    radius = net.spectral_radius
    if radius <= 0.0:
        raise ValidationError("cannot rescale a network with spectral radius 0")
    return Network(net.adj * (rho / radius))


def _rescale_or_warn(adj: np.ndarray, rho: float) -> Network:
    net = Network(adj)
    if net.spectral_radius == 0.0:
        warnings.warn("spectral radius is 0; rescaling skipped", ZeroRadiusWarning, stacklevel=3)
        return net
    return rescale_to_radius(net, rho)


def generate_erdos_renyi(params: GeneratorParams) -> Network:
    """Directed ER graph without self-loops, N(0,1) weights, rescaled."""
    if params.kind != "erdos_renyi":
        raise ValidationError(f"expected kind 'erdos_renyi', got {params.kind!r}")
    n = params.n
    rng = make_rng(params.seed)
    present = rng.random((n, n)) < params.edge_prob
    weights = rng.standard_normal((n, n))
    np.fill_diagonal(present, False)
    adj = np.where(present, weights, 0.0)
    return _rescale_or_warn(adj, params.target_rho)


def grow_scale_free_multigraph(params: GeneratorParams, rng: np.random.Generator
                               ) -> list[tuple[int, int]]:
    """Grow a directed multigraph by the three-event preferential scheme.

    Starts from one node carrying a self-loop.  At each step, with probability
    alpha a new node links to an existing one, with probability beta an edge
    is added between existing nodes, and with probability gamma an existing
    node links to a new one.  Targets are drawn with probability proportional
    to in-degree + delta_in, sources to out-degree + delta_out.  Returns the
    edge list ``(source, target)`` in creation order.
    """
    n = params.n
    a, b = params.sf_alpha, params.sf_beta
    d_in, d_out = params.sf_delta_in, params.sf_delta_out
    sources = [0]
    targets = [0]
    nodes = 1

    def pick(endpoints: list[int], delta: float, u: float) -> int:
        # mixture: an edge endpoint (degree term) or a uniform node (delta term)
        total = len(endpoints) + delta * nodes
        r = u * total
        if r < len(endpoints):
            return endpoints[int(r)]
        if delta == 0:
            return endpoints[-1]
        return min(int((r - len(endpoints)) / delta), nodes - 1)

    block = np.empty((0, 3))
    pos = 0
    while nodes < n:
        if pos == len(block):
            block = rng.random((1024, 3))
            pos = 0
        ev, u1, u2 = block[pos]
        pos += 1
        if ev < a:
            w = pick(targets, d_in, u1)
            v = nodes
            nodes += 1
            sources.append(v)
            targets.append(w)
        elif ev < a + b:
            v = pick(sources, d_out, u1)
            w = pick(targets, d_in, u2)
            sources.append(v)
            targets.append(w)
        else:
            w = pick(sources, d_out, u1)
            v = nodes
            nodes += 1
            sources.append(w)
            targets.append(v)
    return list(zip(sources, targets))


def generate_directed_scale_free(params: GeneratorParams) -> Network:
    """Directed scale-free network, repaired to be strongly connected, rescaled.

    Pipeline: grow multigraph, collapse parallel edges, draw one N(0,1)
    weight per distinct edge, link the condensation into a cycle and add
    missing self-loops, rescale to ``target_rho``.
    """
    if params.kind != "directed_scale_free":
        raise ValidationError(f"expected kind 'directed_scale_free', got {params.kind!r}")
    n = params.n
    rng = make_rng(params.seed)
    edges = grow_scale_free_multigraph(params, rng)
    mask = np.zeros((n, n), dtype=bool)
    src, dst = np.array(edges).T
    mask[dst, src] = True
    adj = np.zeros((n, n))
    rows, cols = np.nonzero(mask)
    adj[rows, cols] = rng.standard_normal(rows.size)
    repaired = ensure_strongly_connected(Network(adj), rng)
    return _rescale_or_warn(repaired.adj.copy(), params.target_rho)


def generate(params: GeneratorParams) -> Network:
    """Dispatch on ``params.kind``."""
    if params.kind == "erdos_renyi":
        return generate_erdos_renyi(params)
    return generate_directed_scale_free(params)


def _successors(adj: np.ndarray) -> list[np.ndarray]:
    return [np.flatnonzero(adj[:, i]) for i in range(adj.shape[0])]


def strongly_connected_components(net: Network | np.ndarray) -> list[list[int]]:
    """Tarjan's algorithm (iterative).

    Components come out in reverse topological order of the condensation:
    a component is emitted only after every component it can reach.
    """
    adj = net.adj if isinstance(net, Network) else np.asarray(net)
    n = adj.shape[0]
    succ = _successors(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, k = work[-1]
            if k < len(succ[v]):
                work[-1] = (v, k + 1)
                w = int(succ[v][k])
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def is_strongly_connected(net: Network) -> bool:
    return len(strongly_connected_components(net)) == 1


def ensure_strongly_connected(net: Network, seed: SeedLike) -> Network:
    """Add edges and self-loops so the graph is strongly connected.

    The condensation's components are visited in topological order and linked
    into a single cycle, one edge per consecutive pair, between uniformly
    chosen members.  Then each node without a self-loop receives one.  New
    weights are N(0,1); existing edges keep their weights.
    """
    rng = make_rng(seed)
    adj = net.adj.copy()
    comps = strongly_connected_components(net)[::-1]
    k = len(comps)
    if k > 1:
        for pos in range(k):
            a = comps[pos][int(rng.integers(len(comps[pos])))]
            nxt = comps[(pos + 1) % k]
            b = nxt[int(rng.integers(len(nxt)))]
            w = rng.standard_normal()
            if adj[b, a] == 0.0:
                adj[b, a] = w
    missing = np.flatnonzero(np.diag(adj) == 0.0)
    adj[missing, missing] = rng.standard_normal(missing.size)
    return Network(adj)


def roots_and_leaves(net: Network) -> tuple[list[int], list[int]]:
    """Roots have no incoming edge (zero row), leaves no outgoing edge (zero column)."""
    nz = net.adj != 0.0
    roots = np.flatnonzero(~nz.any(axis=1)).tolist()
    leaves = np.flatnonzero(~nz.any(axis=0)).tolist()
    return roots, leaves


def in_degrees(net: Network, self_loops: bool = False) -> np.ndarray:
    """Number of distinct in-neighbours of each node."""
    nz = net.adj != 0.0
    if not self_loops:
        np.fill_diagonal(nz, False)
    return nz.sum(axis=1)


def out_degrees(net: Network, self_loops: bool = False) -> np.ndarray:
    """Number of distinct out-neighbours of each node."""
    nz = net.adj != 0.0
    if not self_loops:
        np.fill_diagonal(nz, False)
    return nz.sum(axis=0)
