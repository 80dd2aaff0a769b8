"""Command-line package."""
from cli.main import main, build_parser, load_run_config

__all__ = ['main', 'build_parser', 'load_run_config']
