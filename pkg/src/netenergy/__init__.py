"""Control-energy centralities and driver-node placement for directed networks.

Typical use::

    from netenergy import network_from_matrix, GramianSpec, compute_centralities
    net = network_from_matrix([[0, 0], [0.5, 0]])
    table = compute_centralities(net, GramianSpec.finite(3))
    table.p, table.q, table.r_diff

Node indices are 0-based in Python and 1-based in files and on the CLI.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, NetEnergyError, NumericError, StabilityError,
                     UncontrollableError, UnreachableTargetError, ValidationError)
from .netgraph import (GeneratorParams, Network, ensure_strongly_connected,
                       generate, generate_directed_scale_free, generate_erdos_renyi,
                       network_from_matrix, rescale_to_radius, roots_and_leaves,
                       strongly_connected_components)
from .gramian import (Gramian, GramianSpec, aggregate_gramians, controllability_matrix,
                      ctrb_gramian, energy_flow, energy_flow_matrix, obsv_gramian)
from .centrality import (CentralityTable, DriverSet, commutator_diagonal,
                         compute_centralities, net_energy_flow, rank_nodes, select_drivers)
from .control import (ControlPlan, CtrlMetrics, best_drivers_for_target,
                      lambda_min_upper_bound, metrics, min_energy_input, target_min_energy)
