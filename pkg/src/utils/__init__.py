"""
Utility modules for the quantized network counting toolkit.
"""
from .config import Config, SimConfig, SweepConfig, LoggingConfig, Mode
from .logger import setup_logging
from .helpers import (
    format_ratio,
    parse_ratio,
    parse_int_list,
    format_decimal,
    ensure_parent_dir,
    write_csv,
    write_json,
    read_text,
)

__all__ = [
    'Config',
    'SimConfig',
    'SweepConfig',
    'LoggingConfig',
    'Mode',
    'setup_logging',
    'format_ratio',
    'parse_ratio',
    'parse_int_list',
    'format_decimal',
    'ensure_parent_dir',
    'write_csv',
    'write_json',
    'read_text',
]
