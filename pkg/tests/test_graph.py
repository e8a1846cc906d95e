"""
Unit tests for the graph module.
"""
import random
import sys
import unittest
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from src.graph import (
    Digraph,
    GraphError,
    NotStronglyConnectedError,
    is_strongly_connected,
    diameter,
    generate_random_digraph,
    generate_with_diameter,
    cycle_digraph,
    complete_digraph,
    degree_sequence,
    read_edge_list,
    write_edge_list,
)


def reachability_diameter(g: Digraph) -> int:
    """Diameter from boolean matrix powers (independent of networkx)."""
    n = g.node_count
    adj = np.zeros((n, n), dtype=np.int64)
    for src, dst in g.edges():
        adj[src, dst] = 1
    reach = np.eye(n, dtype=np.int64)
    step = np.eye(n, dtype=np.int64)
    for hops in range(1, n):
        step = np.minimum(step @ adj, 1)
        reach = np.minimum(reach + step, 1)
        if reach.all():
            return hops
    raise AssertionError("not strongly connected")


class TestDigraph(unittest.TestCase):
    """Test cases for the Digraph model."""

    def test_from_edges_sorts_neighbors(self):
        """Test out-neighbors are sorted."""
        g = Digraph.from_edges(3, [(0, 2), (0, 1), (1, 0), (2, 0)])
        self.assertEqual(g.out_neighbors[0], (1, 2))
        self.assertEqual(g.in_neighbors[0], (1, 2))
        self.assertEqual(g.edge_count, 4)
        self.assertEqual(g.max_out_degree, 2)

    def test_self_edge_rejected(self):
        """Test self-edges are invalid."""
        with self.assertRaises(GraphError):
            Digraph.from_edges(2, [(0, 0)])

    def test_duplicate_rejected(self):
        """Test duplicate edges are invalid."""
        with self.assertRaises(GraphError):
            Digraph.from_edges(2, [(0, 1), (0, 1)])

    def test_out_of_range(self):
        """Test node index range check."""
        with self.assertRaises(GraphError):
            Digraph.from_edges(2, [(0, 5)])

    def test_degree_sequence(self):
        """Test out-degree listing."""
        self.assertEqual(list(degree_sequence(complete_digraph(4))), [3, 3, 3, 3])


class TestConnectivity(unittest.TestCase):
    """Test cases for strong connectivity and diameter."""

    def test_cycle(self):
        """Test the directed cycle."""
        g = cycle_digraph(5)
        self.assertTrue(is_strongly_connected(g))
        self.assertEqual(diameter(g), 4)

    def test_complete(self):
        """Test the complete digraph."""
        self.assertEqual(diameter(complete_digraph(4)), 1)

    def test_not_strongly_connected(self):
        """Test a path is rejected."""
        g = Digraph.from_edges(3, [(0, 1), (1, 2)])
        self.assertFalse(is_strongly_connected(g))
        with self.assertRaises(NotStronglyConnectedError):
            diameter(g)

    def test_diameter_matches_matrix_oracle(self):
        """Test networkx diameter against matrix powers."""
        rng = random.Random(7)
        for _ in range(5):
            g = generate_random_digraph(8, 0.35, rng)
            self.assertEqual(diameter(g), reachability_diameter(g))


class TestGenerator(unittest.TestCase):
    """Test cases for random generation."""

    def test_strongly_connected_output(self):
        """Test generated graphs are strongly connected."""
        g = generate_random_digraph(10, 0.5, random.Random(1))
        self.assertEqual(g.node_count, 10)
        self.assertTrue(is_strongly_connected(g))

    def test_same_seed_same_graph(self):
        """Test determinism."""
        a = generate_random_digraph(12, 0.4, random.Random(42))
        b = generate_random_digraph(12, 0.4, random.Random(42))
        self.assertEqual(a, b)

    def test_invalid_probability(self):
        """Test parameter validation."""
        with self.assertRaises(GraphError):
            generate_random_digraph(5, 0.0, random.Random(1))
        with self.assertRaises(GraphError):
            generate_random_digraph(1, 0.5, random.Random(1))

    def test_resample_cap(self):
        """Test exhaustion of the resample cap."""
        with self.assertRaises(GraphError):
            generate_random_digraph(30, 0.01, random.Random(1), max_resamples=3)

    def test_diameter_filter(self):
        """Test the diameter filter."""
        g, rejected = generate_with_diameter(4, 1.0, random.Random(1), target_diameter=1)
        self.assertEqual(diameter(g), 1)
        self.assertEqual(rejected, 0)
        with self.assertRaises(GraphError):
            generate_with_diameter(4, 1.0, random.Random(1), target_diameter=2, max_resamples=5)


class TestEdgeList(unittest.TestCase):
    """Test cases for the edge-list format."""

    def test_read(self):
        """Test 'dst src' lines with 1-based ids."""
        g = read_edge_list("3 3\n2 1\n3 2\n\n1 3\n")
        self.assertEqual(g, cycle_digraph(3))

    def test_write(self):
        """Test canonical output ordering."""
        self.assertEqual(write_edge_list(cycle_digraph(3)), "3 3\n1 3\n2 1\n3 2\n")

    def test_rejects_bad_input(self):
        """Test malformed edge lists."""
        bad = [
            "",
            "3\n",
            "3 1\n2\n",
            "3 1\n4 1\n",
            "3 1\n2 2\n",
            "3 2\n2 1\n2 1\n",
            "3 2\n2 1\n",
            "3 1\nx 1\n",
        ]
        for text in bad:
            with self.subTest(text=text):
                with self.assertRaises(GraphError):
                    read_edge_list(text)


if __name__ == "__main__":
    unittest.main()
