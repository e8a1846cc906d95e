"""
Command-line interface.
"""
from .commands import main, build_parser, build_sim_config, cmd_run, cmd_sweep, cmd_bounds, cmd_verify, cmd_gen_graph

__all__ = [
    'main',
    'build_parser',
    'build_sim_config',
    'cmd_run',
    'cmd_sweep',
    'cmd_bounds',
    'cmd_verify',
    'cmd_gen_graph',
]
