"""creditnet: liquidity analysis of payment-channel (credit) networks.

Maps network states to a zonotope in R^n, computes transaction success
probabilities from the weighted spanning-tree polynomial and effective
resistance, samples states exactly uniformly, and simulates the sequential
transaction Markov chain.
"""

__version__ = "0.1.0"

from .network import (  # noqa: F401
    CreditNetwork,
    Edge,
    EscrowConfiguration,
    Flow,
    Transaction,
    execute,
    is_feasible,
    load_network,
    max_sendable,
    parse_network_text,
    route_transaction,
)
from .representation import (  # noqa: F401
    SpanningRepresentation,
    StatePoint,
    build_representation,
    direction_of_path,
    membership,
    point_to_configuration,
    score,
    transaction_vector,
)
