import numpy as np
import pytest

from creditnet import CreditNetwork, EscrowConfiguration


@pytest.fixture
def triangle():
    return CreditNetwork(
        ["a", "b", "c"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0), ("e3", "a", "c", 1.0)],
    )


@pytest.fixture
def four_cycle():
    return CreditNetwork(
        ["a", "b", "c", "d"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0),
         ("e3", "c", "d", 1.0), ("e4", "a", "d", 1.0)],
    )


FIG1_TEXT = """
vertices: [A, B, C, D, E]
edges:
  - {id: AB, tail: A, head: B, capacity: 10}
  - {id: BC, tail: B, head: C, capacity: 4}
  - {id: BD, tail: B, head: D, capacity: 4}
  - {id: CD, tail: C, head: D, capacity: 3}
  - {id: DE, tail: D, head: E, capacity: 2}
configuration: {AB: 5, BC: 2, BD: 2, CD: 2, DE: 1}
"""


@pytest.fixture
def fig1_text():
    return FIG1_TEXT


def random_connected_network(rng, max_vertices=6, max_edges=10, cap_range=(0.1, 10.0)):
    """Random connected multigraph: a random spanning tree plus extra edges."""
    nv = int(rng.integers(2, max_vertices + 1))
    verts = [f"v{i}" for i in range(nv)]
    edges = []
    for i in range(1, nv):
        j = int(rng.integers(0, i))
        edges.append((f"t{i}", verts[j], verts[i],
                      float(rng.uniform(*cap_range))))
    extra = int(rng.integers(0, max_edges - (nv - 1) + 1))
    for k in range(extra):
        i = int(rng.integers(0, nv))
        j = int(rng.integers(0, nv))
        while j == i:
            j = int(rng.integers(0, nv))
        edges.append((f"x{k}", verts[i], verts[j],
                      float(rng.uniform(*cap_range))))
    return CreditNetwork(verts, edges)


def random_configuration(rng, net):
    return EscrowConfiguration(
        net, {e.id: float(rng.uniform(0, e.capacity)) for e in net.edges})


def batch_means_se(values, nbatch=40):
    """Standard error of the mean of a correlated sequence via batch means."""
    values = np.asarray(values, dtype=float)
    nbatch = min(nbatch, len(values))
    usable = (len(values) // nbatch) * nbatch
    batches = values[:usable].reshape(nbatch, -1).mean(axis=1)
    return float(batches.std(ddof=1) / np.sqrt(nbatch))
