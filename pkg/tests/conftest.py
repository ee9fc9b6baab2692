import random
from fractions import Fraction

from wallcross.lattice import primitive_normal
from wallcross.vertexlie import LieElem, mat_zero


def rand_matrix(r, rng, span=2):
    return tuple(
        tuple(Fraction(rng.randint(-span, span), rng.randint(1, 2)) for _ in range(r))
        for _ in range(r)
    )


def rand_lie(ctx, rng, directions=((1, 0), (0, 1)), terms=3, max_mult=2):
    """A random element of the vertex algebra supported on the given directions.

    Every derivation part is a rational multiple of the primitive normal of
    its frequency, so the element lies in the orthogonal cut.
    """
    acc = {}
    for _ in range(terms):
        d = rng.choice(directions)
        k = rng.randint(1, max_mult)
        m = (k * d[0], k * d[1])
        j = rng.randint(1, ctx.order)
        n = primitive_normal(m)
        c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        a = rand_matrix(ctx.rank, rng) if rng.random() < 0.7 else mat_zero(ctx.rank)
        key = (m, j)
        if key in acc:
            continue
        acc[key] = (a, (c * n[0], c * n[1]))
    return LieElem(ctx, acc)


def rand_wall_log(ctx, rng, direction, terms=2, stype=None):
    """A random single-direction wall log (S-ish matrix parts, K-ish derivations)."""
    acc = {}
    n = primitive_normal(direction)
    for _ in range(terms):
        k = rng.randint(1, 2)
        m = (k * direction[0], k * direction[1])
        j = rng.randint(1, max(1, ctx.order - 1))
        use_matrix = stype if stype is not None else rng.random() < 0.5
        if use_matrix:
            a = rand_matrix(ctx.rank, rng)
            dvec = (Fraction(0), Fraction(0))
        else:
            a = mat_zero(ctx.rank)
            c = Fraction(rng.randint(-2, 2), rng.randint(1, 2))
            dvec = (c * n[0], c * n[1])
        key = (m, j)
        if key in acc:
            continue
        acc[key] = (a, dvec)
    return LieElem(ctx, acc)
