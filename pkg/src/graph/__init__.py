"""
Digraph model, metrics, generation and edge-list IO.
"""
from .digraph import (
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
)
from .edgelist import read_edge_list, write_edge_list, load_edge_list, save_edge_list

__all__ = [
    'Digraph',
    'GraphError',
    'NotStronglyConnectedError',
    'is_strongly_connected',
    'diameter',
    'generate_random_digraph',
    'generate_with_diameter',
    'cycle_digraph',
    'complete_digraph',
    'degree_sequence',
    'read_edge_list',
    'write_edge_list',
    'load_edge_list',
    'save_edge_list',
]
