"""
Directed graph model, connectivity checks, diameter and random generation.

Edges are stored as out-neighbor lists: node ``i`` lists every ``j`` such
that ``i -> j`` is a link (``j`` can receive from ``i``). Node ids are
0-based.
"""
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
from loguru import logger


class GraphError(ValueError):
    """Invalid graph, edge list or generator parameters."""


class NotStronglyConnectedError(GraphError):
    """Raised where an operation needs a strongly connected digraph."""


@dataclass(frozen=True)
class Digraph:
    """Immutable directed graph without self-edges."""
    node_count: int
    out_neighbors: Tuple[Tuple[int, ...], ...]
    resamples: int = field(default=0, compare=False)

    def __post_init__(self):
        n = self.node_count
        if n < 2:
            raise GraphError(f"A digraph needs at least 2 nodes, got {n}")
        if len(self.out_neighbors) != n:
            raise GraphError(f"Expected {n} out-neighbor lists, got {len(self.out_neighbors)}")

        normalized = []
        for src, targets in enumerate(self.out_neighbors):
            seen = set()
            for dst in targets:
                if not 0 <= dst < n:
                    raise GraphError(f"Edge {src}->{dst}: node index out of range")
                if dst == src:
                    raise GraphError(f"Self-edge at node {src}")
                if dst in seen:
                    raise GraphError(f"Duplicate edge {src}->{dst}")
                seen.add(dst)
            normalized.append(tuple(sorted(targets)))
        object.__setattr__(self, "out_neighbors", tuple(normalized))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Tuple[int, int]], resamples: int = 0) -> "Digraph":
        """Build a digraph from ``(src, dst)`` pairs."""
        if node_count < 2:
            raise GraphError(f"A digraph needs at least 2 nodes, got {node_count}")
        lists: List[List[int]] = [[] for _ in range(node_count)]
        for src, dst in edges:
            if not 0 <= src < node_count:
                raise GraphError(f"Edge {src}->{dst}: node index out of range")
            lists[src].append(dst)
        return cls(node_count, tuple(tuple(x) for x in lists), resamples)

    @classmethod
    def from_networkx(cls, graph: nx.DiGraph, resamples: int = 0) -> "Digraph":
        """Build from a networkx digraph whose nodes are ``0..n-1``."""
        return cls.from_edges(graph.number_of_nodes(), graph.edges(), resamples)

    @cached_property
    def in_neighbors(self) -> Tuple[Tuple[int, ...], ...]:
        lists: List[List[int]] = [[] for _ in range(self.node_count)]
        for src, targets in enumerate(self.out_neighbors):
            for dst in targets:
                lists[dst].append(src)
        return tuple(tuple(x) for x in lists)

    @cached_property
    def nx_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from(self.edges())
        return graph

    def out_degree(self, node: int) -> int:
        return len(self.out_neighbors[node])

    @property
    def edge_count(self) -> int:
        return sum(len(t) for t in self.out_neighbors)

    @property
    def max_out_degree(self) -> int:
        return max(len(t) for t in self.out_neighbors)

    def edges(self) -> List[Tuple[int, int]]:
        """All edges as ``(src, dst)`` pairs in canonical order."""
        return [(src, dst) for src, targets in enumerate(self.out_neighbors) for dst in targets]


def is_strongly_connected(g: Digraph) -> bool:
    """True iff every ordered node pair is joined by a directed path."""
    return nx.is_strongly_connected(g.nx_graph)


def diameter(g: Digraph) -> int:
    """
    Exact diameter in hops (longest shortest directed path).

    Raises:
        NotStronglyConnectedError: If some distance is undefined
    """
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError("Diameter is undefined for a graph that is not strongly connected")
    return nx.diameter(g.nx_graph)


def generate_random_digraph(
    n: int,
    p: float,
    rng: random.Random,
    max_resamples: int = 10000,
) -> Digraph:
    """
    Sample a strongly connected digraph with independent edge probability ``p``.

    Every ordered pair ``(i, j)``, ``i != j``, is included independently. The
    whole graph is redrawn until it is strongly connected, which keeps the
    Erdos-Renyi distribution conditioned on strong connectivity.

    Args:
        n: Number of nodes (>= 2)
        p: Edge probability in (0, 1]
        rng: Seeded generator, consumed in a fixed order
        max_resamples: Number of redraws allowed after the first attempt

    Returns:
        Digraph with ``resamples`` set to the number of rejected draws

    Raises:
        GraphError: On invalid parameters or when the resample cap is exceeded
    """
    if n < 2:
        raise GraphError(f"n must be >= 2, got {n}")
    if not 0.0 < p <= 1.0:
        raise GraphError(f"edge probability must be in (0, 1], got {p}")

    for attempt in range(max_resamples + 1):
        candidate = nx.gnp_random_graph(n, p, seed=rng, directed=True)
        if nx.is_strongly_connected(candidate):
            if attempt:
                logger.debug(f"Accepted digraph after {attempt} resamples (n={n}, p={p})")
            return Digraph.from_networkx(candidate, resamples=attempt)

    raise GraphError(
        f"No strongly connected digraph after {max_resamples} resamples (n={n}, p={p}); "
        f"p is too small for n"
    )


def generate_with_diameter(
    n: int,
    p: float,
    rng: random.Random,
    target_diameter: int,
    max_resamples: int = 10000,
) -> Tuple[Digraph, int]:
    """
    Sample strongly connected digraphs until one has the requested diameter.

    Returns:
        Tuple of (digraph, number of strongly connected graphs rejected by the filter)

    Raises:
        GraphError: When ``max_resamples`` candidates were rejected
    """
    for rejected in range(max_resamples + 1):
        g = generate_random_digraph(n, p, rng, max_resamples)
        if diameter(g) == target_diameter:
            return g, rejected

    raise GraphError(
        f"No digraph with diameter {target_diameter} after {max_resamples} rejections (n={n}, p={p})"
    )


def cycle_digraph(n: int) -> Digraph:
    """Directed cycle ``0 -> 1 -> ... -> n-1 -> 0``."""
    return Digraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_digraph(n: int) -> Digraph:
    """Complete digraph on ``n`` nodes."""
    return Digraph.from_edges(n, [(i, j) for i in range(n) for j in range(n) if i != j])


def degree_sequence(g: Digraph) -> Sequence[int]:
    """Out-degrees ``D+_j`` in node order."""
    return [g.out_degree(j) for j in range(g.node_count)]
