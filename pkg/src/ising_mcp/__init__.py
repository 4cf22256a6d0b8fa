"""Oscillator and dynamical Ising machines: simulation, stability analysis and an MCP tool server."""

import sys

__version__ = "0.1.0"


def main():
    """Main entry point for the package."""
    from ising_mcp import cli

    try:
        sys.exit(cli.main())
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        sys.exit(130)


__all__ = ["main", "__version__"]
