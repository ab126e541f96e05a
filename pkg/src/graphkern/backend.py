"""Selects jitted or plain-numpy implementations of the hot loops.

The functions in `_hot` are written in a numba-compilable subset of Python,
so the numpy backend simply calls them as-is while the numba backend wraps
each one in ``numba.njit``. Selection order: an explicit `use()` override,
then the GRAPHKERN_BACKEND environment variable (``auto``, ``numba`` or
``numpy``), defaulting to ``auto`` which prefers numba when importable.

Both backends execute the same floating-point operations in the same order,
so results are bitwise identical; the benchmark in benchmarks/ relies on
`use()` to time one against the other.
"""

import os

from . import _hot
from .errors import ConfigError

_FUNC_NAMES = (
    "dijkstra_dag",
    "longest_path_len",
    "gap_edges",
    "path_count_vectors",
    "add_outer_products",
    "smo_solve",
)

_CHOICES = ("auto", "numba", "numpy")

_cache = {}
_override = None


class Backend:
    """The six hot-loop callables plus the name they were resolved under."""

    def __init__(self, name, funcs):
        self.name = name
        self.dijkstra_dag = funcs["dijkstra_dag"]
        self.longest_path_len = funcs["longest_path_len"]
        self.gap_edges = funcs["gap_edges"]
        self.path_count_vectors = funcs["path_count_vectors"]
        self.add_outer_products = funcs["add_outer_products"]
        self.smo_solve = funcs["smo_solve"]

    def __repr__(self):
        return f"Backend({self.name!r})"


def _build(name):
    if name == "numpy":
        return Backend("numpy", {f: getattr(_hot, f) for f in _FUNC_NAMES})
    import numba

    jit = numba.njit(cache=True, nogil=True)
    return Backend("numba", {f: jit(getattr(_hot, f)) for f in _FUNC_NAMES})


def get_backend(name="auto"):
    """Resolve a backend by name, caching compiled wrappers per process."""
    if name not in _CHOICES:
        raise ConfigError(
            f"unknown backend {name!r}: expected one of {', '.join(_CHOICES)}"
        )
    if name == "auto":
        try:
            import numba  # noqa: F401
        except ImportError:
            name = "numpy"
        else:
            name = "numba"
    if name not in _cache:
        if name == "numba":
            try:
                _cache[name] = _build("numba")
            except ImportError as exc:
                raise ConfigError(
                    "backend 'numba' requested but numba is not importable"
                ) from exc
        else:
            _cache[name] = _build("numpy")
    return _cache[name]


def active():
    """Backend currently in effect (override, else GRAPHKERN_BACKEND, else auto)."""
    if _override is not None:
        return get_backend(_override)
    return get_backend(os.environ.get("GRAPHKERN_BACKEND", "auto"))


def use(name):
    """Force a backend for this process; `use(None)` reverts to the env var."""
    global _override
    if name is not None and name not in _CHOICES:
        raise ConfigError(
            f"unknown backend {name!r}: expected one of {', '.join(_CHOICES)}"
        )
    _override = name
    return active()
