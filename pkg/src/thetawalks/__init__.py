"""Quarter-plane walk generating functions via Jacobi theta series."""

__version__ = "0.1.0"
