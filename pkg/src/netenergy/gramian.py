"""Controllability and observability Gramians of ``x(t+1) = A x(t) + B u(t)``.

Finite horizons are evaluated by accumulating running powers applied to the
input columns.  Infinite horizons solve the discrete Lyapunov equation with
the squared Smith (doubling) iteration, which needs only matrix products and
converges quadratically when the spectral radius is below one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Optional

import numpy as np

from .errors import ConvergenceError, StabilityError, ValidationError
from .netgraph import Network

#: cap on plain power steps when summing infinite series term by term
MAX_SERIES_STEPS = 1_000_000


@dataclass(frozen=True)
class GramianSpec:
    """Time horizon plus solver tolerances.

    ``T is None`` selects the infinite horizon.
    """

    T: Optional[int] = None
    lyap_tol: float = 1e-12
    lyap_max_iter: int = 200

    def __post_init__(self):
        if self.T is not None and (int(self.T) != self.T or self.T < 1):
            raise ValidationError(f"finite horizon needs an integer T >= 1, got {self.T}")
        if not self.lyap_tol > 0:
            raise ValidationError("lyap_tol must be positive")
        if int(self.lyap_max_iter) != self.lyap_max_iter or self.lyap_max_iter < 1:
            raise ValidationError("lyap_max_iter must be a positive integer")

    @classmethod
    def finite(cls, T: int, **kw) -> "GramianSpec":
        return cls(T=T, **kw)

    @classmethod
    def infinite(cls, **kw) -> "GramianSpec":
        return cls(T=None, **kw)

    @classmethod
    def parse(cls, horizon: str | int | None, **kw) -> "GramianSpec":
        """Accept ``"inf"``/``None`` or a positive integer (also as text)."""
        if horizon is None or (isinstance(horizon, str) and horizon.lower() in ("inf", "infinite")):
            return cls(T=None, **kw)
        try:
            T = int(horizon)
        except (TypeError, ValueError):
            raise ValidationError(f"horizon must be 'inf' or a positive integer, got {horizon!r}") from None
        return cls(T=T, **kw)

    @property
    def is_infinite(self) -> bool:
        return self.T is None

    def label(self) -> str:
        return "inf" if self.T is None else str(self.T)


@dataclass(frozen=True, eq=False)
class Gramian:
    """Symmetric Gramian together with the node set that produced it."""

    mat: np.ndarray
    nodes: tuple[int, ...]
    spec: GramianSpec
    kind: Literal["ctrb", "obsv"] = "ctrb"

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        mat = 0.5 * (mat + mat.T)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def drivers(self) -> tuple[int, ...]:
        return self.nodes

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.mat))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.mat)[0])


def _node_set(n: int, nodes: Iterable[int], what: str = "driver") -> tuple[int, ...]:
    try:
        idx = tuple(int(k) for k in nodes)
    except (TypeError, ValueError):
        raise ValidationError(f"{what} indices must be integers") from None
    if not idx:
        raise ValidationError(f"{what} set must be nonempty")
    if len(set(idx)) != len(idx):
        raise ValidationError(f"{what} indices must be distinct: {idx}")
    bad = [k for k in idx if not 0 <= k < n]
    if bad:
        raise ValidationError(f"{what} indices out of range 0..{n - 1}: {bad}")
    return idx


def _selector(n: int, idx: tuple[int, ...]) -> np.ndarray:
    B = np.zeros((n, len(idx)))
    B[list(idx), range(len(idx))] = 1.0
    return B


def _require_stable(net: Network) -> None:
    if not net.is_stable:
        raise StabilityError(net.spectral_radius)


def controllability_matrix(net: Network, drivers: Iterable[int], T: int) -> np.ndarray:
    """``[B, AB, ..., A^(T-1) B]`` for the driver selector ``B``."""
    if int(T) != T or T < 1:
        raise ValidationError(f"T must be a positive integer, got {T}")
    idx = _node_set(net.n, drivers)
    X = _selector(net.n, idx)
    blocks = []
    for _ in range(T):
        blocks.append(X)
        X = net.adj @ X
    return np.hstack(blocks)


def finite_gramian(A: np.ndarray, B: np.ndarray, T: int) -> np.ndarray:
    """``sum_{t<T} A^t B B^T (A^T)^t`` by running products."""
    X = B.copy()
    G = X @ X.T
    for _ in range(T - 1):
        X = A @ X
        G += X @ X.T
    return G


def smith_lyapunov(A: np.ndarray, Q: np.ndarray, tol: float = 1e-12,
                   max_iter: int = 200) -> np.ndarray:
    """Solve ``A X A^T - X + Q = 0`` by squared Smith iteration.

    After k sweeps ``X = sum_{t < 2^k} A^t Q (A^T)^t``.  Iteration stops once
    both the last update and the residual are below ``tol * ||X||_F``.
    """
    X = np.array(Q, dtype=float)
    Ak = np.array(A, dtype=float)
    for it in range(1, max_iter + 1):
        update = Ak @ X @ Ak.T
        X = X + update
        scale = np.linalg.norm(X)
        if np.linalg.norm(update) <= tol * scale:
            resid = A @ X @ A.T - X + Q
            if np.linalg.norm(resid) <= tol * scale:
                return X
        Ak = Ak @ Ak
        if not np.all(np.isfinite(Ak)):
            break
    raise ConvergenceError("Smith iteration for the Lyapunov equation did not converge", it)


def _gramian(A: np.ndarray, B: np.ndarray, spec: GramianSpec) -> np.ndarray:
    if spec.is_infinite:
        return smith_lyapunov(A, B @ B.T, spec.lyap_tol, spec.lyap_max_iter)
    return finite_gramian(A, B, spec.T)


def ctrb_gramian(net: Network, drivers: Iterable[int], spec: GramianSpec) -> Gramian:
    """Controllability Gramian for the given driver nodes."""
    idx = _node_set(net.n, drivers)
    if spec.is_infinite:
        _require_stable(net)
    mat = _gramian(net.adj, _selector(net.n, idx), spec)
    return Gramian(mat, idx, spec, "ctrb")


def obsv_gramian(net: Network, probes: Iterable[int], spec: GramianSpec) -> Gramian:
    """Observability Gramian for outputs reading the probe nodes."""
    idx = _node_set(net.n, probes, "probe")
    if spec.is_infinite:
        _require_stable(net)
    mat = _gramian(net.adj.T, _selector(net.n, idx), spec)
    return Gramian(mat, idx, spec, "obsv")


def aggregate_gramians(net: Network, spec: GramianSpec) -> tuple[Gramian, Gramian]:
    """Gramians with every node as driver (``W_I``) and as probe (``M_I``).

    ``diag(M_I)`` holds the per-node traces of the single-driver Gramians and
    ``diag(W_I)`` those of the single-probe Gramians.
    """
    n = net.n
    A = net.adj
    every = tuple(range(n))
    if spec.is_infinite:
        _require_stable(net)
        I = np.eye(n)
        W = smith_lyapunov(A, I, spec.lyap_tol, spec.lyap_max_iter)
        M = smith_lyapunov(A.T, I, spec.lyap_tol, spec.lyap_max_iter)
    else:
        P = np.eye(n)
        W = np.eye(n)
        M = np.eye(n)
        for _ in range(spec.T - 1):
            P = A @ P
            W += P @ P.T
            M += P.T @ P
    return Gramian(W, every, spec, "ctrb"), Gramian(M, every, spec, "obsv")


def energy_flow_matrix(net: Network, spec: GramianSpec,
                       total_energy: Optional[float] = None) -> np.ndarray:
    """Matrix ``E`` with ``E[j, i]`` the energy flowing from node i to node j.

    ``E = sum_t A^t ∘ A^t`` (elementwise squares).  For the infinite horizon
    the series is truncated once the tail is provably below
    ``lyap_tol``: for ``s >= t``, ``||A^s||_F <= ||A^t||_2 ||A^(s-t)||_F``, so
    the whole tail is at most ``||A^t||_F^2 * trace(W_I)``.  ``total_energy``
    may pass a precomputed ``trace(W_I)``.
    """
    A = net.adj
    n = net.n
    E = np.eye(n)
    P = np.eye(n)
    if not spec.is_infinite:
        for _ in range(spec.T - 1):
            P = A @ P
            E += P * P
        return E
    _require_stable(net)
    if total_energy is None:
        total_energy = float(np.trace(smith_lyapunov(A, np.eye(n), spec.lyap_tol,
                                                     spec.lyap_max_iter)))
    for step in range(1, MAX_SERIES_STEPS + 1):
        P = A @ P
        sq = P * P
        E += sq
        if sq.sum() * total_energy <= spec.lyap_tol:
            return E
    raise ConvergenceError("energy-flow series did not converge", MAX_SERIES_STEPS)


def self_energy(net: Network, spec: GramianSpec,
                total_energy: Optional[float] = None) -> np.ndarray:
    """``eps[i] = sum_t ((A^t)_ii)^2``, the energy a node returns to itself."""
    return np.diag(energy_flow_matrix(net, spec, total_energy)).copy()


def energy_flow(net: Network, i: int, j: int, spec: GramianSpec) -> float:
    """Energy with which a unit impulse at node ``i`` excites node ``j``."""
    (i,) = _node_set(net.n, [i], "source")
    (j,) = _node_set(net.n, [j], "target")
    if spec.is_infinite:
        return float(ctrb_gramian(net, [i], spec).mat[j, j])
    x = np.zeros(net.n)
    x[i] = 1.0
    total = x[j] ** 2
    for _ in range(spec.T - 1):
        x = net.adj @ x
        total += x[j] ** 2
    return float(total)
