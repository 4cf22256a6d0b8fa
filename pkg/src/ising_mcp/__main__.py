"""``python -m ising_mcp``: same as the ``ising-mcp`` console script."""

from ising_mcp import main

main()
