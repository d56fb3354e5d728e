"""Heterogeneous temporal graph neural networks for virtual sensing."""

from htgnn.__version__ import __version__  # noqa: F401


