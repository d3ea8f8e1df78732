"""Minimum-energy steering and Gramian-based controllability metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from . import io
from .centrality import CentralityTable, DriverSet
from .errors import NumericError, UncontrollableError, UnreachableTargetError, ValidationError
from .gramian import Gramian, GramianSpec, _node_set, ctrb_gramian, energy_flow_matrix
from .netgraph import Network

#: relative threshold on lambda_min / trace below which W counts as singular
RANK_TOL = 1e-12
#: negative eigenvalues down to -CLAMP_TOL * trace are rounding noise
CLAMP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CtrlMetrics:
    trace_w: float
    lambda_min: float
    spectrum: np.ndarray
    controllable: bool

    def to_json(self) -> str:
        return io.json_line({"trace": self.trace_w, "lambda_min": self.lambda_min,
                             "controllable": self.controllable})

    def spectrum_csv(self) -> str:
        return io.csv_text(["rank", "eigenvalue"],
                           [(k + 1, v) for k, v in enumerate(self.spectrum)])


@dataclass(frozen=True, eq=False)
class ControlPlan:
    """Open-loop input sequence; row ``t`` of ``input_sequence`` is ``u(t)``."""

    input_sequence: np.ndarray
    energy: float
    target_state: np.ndarray
    drivers: tuple[int, ...]

    @property
    def T(self) -> int:
        return self.input_sequence.shape[0]

    def simulate(self, net: Network) -> np.ndarray:
        """Final state reached from ``x(0) = 0``."""
        x = np.zeros(net.n)
        for u in self.input_sequence:
            x = net.adj @ x
            x[list(self.drivers)] += u
        return x

    def to_csv(self) -> str:
        header = ["t"] + [f"u_{k + 1}" for k in range(len(self.drivers))]
        rows = [(t, *row) for t, row in enumerate(self.input_sequence)]
        return io.csv_text(header, rows)


def metrics(gram: Gramian | np.ndarray) -> CtrlMetrics:
    """Trace, smallest eigenvalue and ascending spectrum of a Gramian."""
    mat = gram.mat if isinstance(gram, Gramian) else 0.5 * (np.asarray(gram) + np.asarray(gram).T)
    try:
        spectrum = scipy.linalg.eigh(mat, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"symmetric eigensolve failed: {exc}") from None
    trace = float(np.trace(mat))
    lowest = float(spectrum[0])
    if lowest < -CLAMP_TOL * max(trace, 0.0):
        raise NumericError(f"Gramian is not positive semidefinite: eigenvalue {lowest:.6g}, "
                           f"trace {trace:.6g}")
    spectrum = np.maximum(spectrum, 0.0)
    lam = float(spectrum[0])
    return CtrlMetrics(trace_w=trace, lambda_min=lam, spectrum=spectrum,
                       controllable=lam > RANK_TOL * trace)


def _solve_psd(W: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(W), b)
    except np.linalg.LinAlgError:
        jitter = RANK_TOL * np.trace(W)
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(W + jitter * np.eye(len(W))), b)


def min_energy_input(net: Network, drivers: Iterable[int], T: int,
                     x_f) -> ControlPlan:
    """Cheapest input steering ``x(0) = 0`` to ``x(T) = x_f`` in ``T`` steps."""
    idx = _node_set(net.n, drivers)
    x_f = np.asarray(x_f, dtype=float)
    if x_f.shape != (net.n,):
        raise ValidationError(f"x_f must have length {net.n}")
    W = ctrb_gramian(net, idx, GramianSpec.finite(T))
    m = metrics(W)
    if not m.controllable:
        raise UncontrollableError(m.lambda_min)
    y = _solve_psd(W.mat, x_f)
    # z_s = (A^T)^s y; u(t) reads z_{T-1-t} at the driver nodes
    U = np.empty((T, len(idx)))
    z = y
    for s in range(T):
        U[T - 1 - s] = z[list(idx)]
        z = net.adj.T @ z
    return ControlPlan(U, float(x_f @ y), x_f.copy(), idx)


def target_min_energy(net: Network, drivers: Iterable[int], spec: GramianSpec,
                      i: int) -> tuple[float, np.ndarray]:
    """Least energy to drive ``x_i`` from 0 to 1, other states left free.

    Returns ``(1 / W_ii, W e_i / W_ii)``; the second item is the cheapest
    final state with ``x_i = 1``.
    """
    (i,) = _node_set(net.n, [i], "target")
    W = ctrb_gramian(net, drivers, spec).mat
    w_ii = W[i, i]
    if w_ii <= RANK_TOL * np.trace(W):
        raise UnreachableTargetError(f"no energy reaches node {i} from drivers {tuple(drivers)}")
    x_star = W[:, i] / w_ii
    x_star[i] = 1.0
    return 1.0 / w_ii, x_star


def best_drivers_for_target(net: Network, i: int, m: int, spec: GramianSpec) -> DriverSet:
    """The ``m`` nodes sending the most energy into node ``i``.

    ``W_ii`` is the sum of the drivers' energy flows into ``i``, so these
    nodes minimise ``1 / W_ii``.  Ties go to the lower index.
    """
    (i,) = _node_set(net.n, [i], "target")
    if int(m) != m or not 1 <= m <= net.n:
        raise ValidationError(f"m must lie in 1..{net.n}, got {m}")
    inflow = energy_flow_matrix(net, spec)[i]
    order = np.lexsort((np.arange(net.n), -inflow))
    return DriverSet(tuple(int(k) for k in order[:m]), f"target:{i}")


def lambda_min_upper_bound(table: CentralityTable, m: int) -> float:
    """``(m+1)``-th smallest ``q_tilde``: no m drivers can push lambda_min above it."""
    if int(m) != m or not 1 <= m < table.n:
        raise ValidationError(f"bound needs 1 <= m < n={table.n}, got {m}")
    return float(np.sort(table.q_tilde)[m])
