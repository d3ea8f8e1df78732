import numpy as np
import pytest

from netenergy.netgraph import Network, network_from_matrix, rescale_to_radius

CHAIN2 = [[0.0, 0.0], [0.5, 0.0]]


def random_net(rng, n, kind="cyclic", density=0.4, rho=0.9):
    """Small random network: 'dag' (strictly lower triangular, unscaled,
    radius 0) or 'cyclic' (rescaled to ``rho``)."""
    mask = rng.random((n, n)) < density
    W = rng.standard_normal((n, n)) * mask
    if kind == "dag":
        perm = rng.permutation(n)
        L = np.tril(W, -1)
        return network_from_matrix(L[np.ix_(perm, perm)])
    net = network_from_matrix(W)
    if net.spectral_radius == 0.0:
        W[0, n - 1] = W[n - 1, 0] = 1.0
        net = network_from_matrix(W)
    return rescale_to_radius(net, rho)


def small_instances(count, seed=2024, n_max=8):
    """Seeded mix of DAGs and cyclic networks with 2 <= n <= n_max."""
    rng = np.random.default_rng(seed)
    nets = []
    for k in range(count):
        n = int(rng.integers(2, n_max + 1))
        kind = "dag" if k % 3 == 0 else "cyclic"
        nets.append(random_net(rng, n, kind, density=float(rng.uniform(0.2, 0.7))))
    return nets


@pytest.fixture
def chain2():
    return network_from_matrix(CHAIN2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


def record_acceptance(number, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
    _ACCEPTANCE.append(line)
    print(line)


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0].rstrip("abcd"))):
            terminalreporter.write_line(line)
