"""Built-in example systems used by tests, scripts, and the CLI."""

from __future__ import annotations

from .ifs import IfsSpec, Similarity, make_ifs


def four_corner() -> IfsSpec:
    """Four ratio-1/2 corner maps; the attractor is the whole unit square."""
    maps = {
        "a": Similarity(0.5, 0.0, False, (0.0, 0.0)),
        "b": Similarity(0.5, 0.0, False, (0.5, 0.0)),
        "c": Similarity(0.5, 0.0, False, (0.0, 0.5)),
        "d": Similarity(0.5, 0.0, False, (0.5, 0.5)),
    }
    return make_ifs(maps)


def sierpinski() -> IfsSpec:
    """Right-triangle gasket: three ratio-1/2 maps, dimension log3/log2."""
    maps = {
        "a": Similarity(0.5, 0.0, False, (0.0, 0.0)),
        "b": Similarity(0.5, 0.0, False, (0.5, 0.0)),
        "c": Similarity(0.5, 0.0, False, (0.0, 0.5)),
    }
    return make_ifs(maps)


def cantor_dust() -> IfsSpec:
    """Four ratio-1/4 corner maps; dimension exactly 1, all projections thin."""
    maps = {
        "a": Similarity(0.25, 0.0, False, (0.0, 0.0)),
        "b": Similarity(0.25, 0.0, False, (0.75, 0.0)),
        "c": Similarity(0.25, 0.0, False, (0.0, 0.75)),
        "d": Similarity(0.25, 0.0, False, (0.75, 0.75)),
    }
    return make_ifs(maps)


BUILTIN = {
    "four_corner": four_corner,
    "sierpinski": sierpinski,
    "cantor_dust": cantor_dust,
}


def get_builtin(name: str) -> IfsSpec:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown builtin system {name!r}; have {sorted(BUILTIN)}") from None
