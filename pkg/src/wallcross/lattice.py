"""Rank-2 lattice geometry: pairings, primitive normals, and exact angular order.

Lattice vectors and dual vectors are plain integer pairs ``(a, b)``.  The
module fixes the two orientation conventions everything downstream depends on:

* ``primitive_normal(m)`` is the 90-degree *counterclockwise* rotation of
  ``m``, reduced to a primitive vector.
* ``dirac_pairing`` is the determinant ``det(g, g2)``, which for primitive
  ``g`` equals ``pairing(g2, primitive_normal(g))``.

All angular comparisons are exact (integer cross/dot products); no floating
point enters any decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import gcd

Vec = tuple[int, int]


class WallKind(str, Enum):
    LINE = "line"
    RAY = "ray"


@dataclass(frozen=True)
class RayGeometry:
    """A line or ray through the origin with a primitive direction."""

    direction: Vec
    kind: WallKind = WallKind.RAY

    def __post_init__(self):
        if self.direction == (0, 0):
            raise ValueError("zero vector has no direction")
        if not is_primitive(self.direction):
            raise ValueError(f"direction {self.direction} is not primitive")


def pairing(m: Vec, n: Vec) -> int:
    """Natural pairing of a lattice vector with a dual vector."""
    return m[0] * n[0] + m[1] * n[1]


def det2(u: Vec, v: Vec) -> int:
    return u[0] * v[1] - u[1] * v[0]


def content(m: Vec) -> int:
    return gcd(abs(m[0]), abs(m[1]))


def is_primitive(m: Vec) -> bool:
    return content(m) == 1


def primitive_decompose(m: Vec) -> tuple[int, Vec]:
    """Write ``m = l * p`` with ``l > 0`` and ``p`` primitive.

    The sign stays on the primitive part: ``(-3, 0) -> (3, (-1, 0))``.
    """
    if m == (0, 0):
        raise ValueError("zero vector has no primitive decomposition")
    l = content(m)
    return l, (m[0] // l, m[1] // l)


def primitive_part(m: Vec) -> Vec:
    return primitive_decompose(m)[1]


def primitive_normal(m: Vec) -> Vec:
    """The primitive dual vector orthogonal to ``m``, positively oriented.

    Convention: rotate ``m`` counterclockwise by 90 degrees and reduce, so
    ``primitive_normal((1, 0)) == (0, 1)``.  Consequently, for primitive
    ``m`` and any ``m2``: ``pairing(m2, primitive_normal(m)) == det2(m, m2)``.
    """
    if m == (0, 0):
        raise ValueError("zero vector has no normal")
    return primitive_part((-m[1], m[0]))


def dirac_pairing(g: Vec, g2: Vec) -> int:
    """Antisymmetric integer pairing on the charge lattice (the determinant)."""
    return det2(g, g2)


def _angle_class(base: Vec, v: Vec) -> tuple[int, Vec]:
    """Sort key component: which half-turn past ``base`` the vector lies in.

    Returns 0 for v on the open half-turn strictly after ``base`` (CCW),
    1 for v opposite to base, 2 for the second open half-turn, and 3 for
    v parallel to base itself (sorted last).
    """
    c = det2(base, v)
    d = pairing(base, v)
    if c == 0:
        return (3, v) if d > 0 else (1, v)
    return (0, v) if c > 0 else (2, v)


def angular_sort(directions: list[Vec], base: Vec) -> list[Vec]:
    """Sort directions counterclockwise starting strictly after ``base``.

    Exact comparison via cross/dot products.  Two coincident directions are
    an error: same-direction walls must be merged before ordering.
    """
    if base == (0, 0):
        raise ValueError("zero vector cannot serve as a base direction")

    import functools

    def cmp(u: Vec, v: Vec) -> int:
        cu, cv = _angle_class(base, u)[0], _angle_class(base, v)[0]
        if cu != cv:
            return -1 if cu < cv else 1
        c = det2(u, v)
        if c > 0:
            return -1
        if c < 0:
            return 1
        if pairing(u, v) > 0:
            raise ValueError(f"coincident rays must be merged: {u}, {v}")
        # Anti-parallel within one class cannot happen: they differ by a
        # half-turn and land in different classes.
        raise AssertionError("unreachable: anti-parallel in one angle class")

    return sorted(directions, key=functools.cmp_to_key(cmp))
