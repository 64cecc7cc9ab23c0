"""Synthetic transaction-graph benchmarks for fraud detection models."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
