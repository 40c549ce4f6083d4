"""Vertex/node identifiers, a total sort order over them, and their JSON codec.

Finite tree nodes are tuples of ints (the sequence of child indices from the
root).  Limit nodes are :class:`Top` instances.  Graph vertices of an
inflation are ``(node, n)`` pairs; generic graphs may use ints or strings.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True, order=True)
class Top:
    """A limit node sitting above the finite branch ``branch``.

    ``tag`` separates several tops over the same finite branch (scale trees
    cut at a depth where two functions still agree).
    """

    branch: tuple
    tag: int = 0

    def __repr__(self) -> str:
        if self.tag:
            return f"Top({self.branch!r}, tag={self.tag})"
        return f"Top({self.branch!r})"


def vkey(v: Any) -> tuple:
    """Total order key for any identifier used in this package."""
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, str):
        return (1, v)
    if isinstance(v, Top):
        return (3, tuple(vkey(x) for x in v.branch), v.tag)
    if isinstance(v, tuple):
        return (2, len(v), tuple(vkey(x) for x in v))
    raise TypeError(f"unsupported identifier {v!r}")


def sort_ids(items) -> list:
    return sorted(items, key=vkey)


def encode_id(v: Any) -> Any:
    if isinstance(v, Top):
        out = {"top": [encode_id(x) for x in v.branch]}
        if v.tag:
            out["tag"] = v.tag
        return out
    if isinstance(v, tuple):
        return [encode_id(x) for x in v]
    if isinstance(v, (int, str)):
        return v
    raise TypeError(f"cannot encode identifier {v!r}")


def decode_id(obj: Any) -> Any:
    if isinstance(obj, dict):
        if "top" not in obj:
            raise ValueError(f"malformed identifier object {obj!r}")
        return Top(tuple(decode_id(x) for x in obj["top"]), int(obj.get("tag", 0)))
    if isinstance(obj, list):
        return tuple(decode_id(x) for x in obj)
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return obj
    raise ValueError(f"malformed identifier {obj!r}")
