import random
from fractions import Fraction

import pytest

from conftest import rand_lie
from wallcross.exceptions import ConventionError
from wallcross.series import SeriesElem, SeriesMatrix, TruncationContext
from wallcross.vertexlie import (
    AutPair,
    LieElem,
    bch,
    bch_reference,
    bracket,
    compose,
    elementary,
    exp,
    log,
    mat_zero,
)


def k_log(ctx, gamma, scale=1):
    """The standard 4d wall log: sum_l (1/l) t^l z^(l gamma) d_n."""
    from wallcross.lattice import primitive_normal

    n = primitive_normal(gamma)
    terms = {}
    for l in range(1, ctx.order + 1):
        c = Fraction(scale, l)
        terms[((l * gamma[0], l * gamma[1]), l)] = (
            mat_zero(ctx.rank),
            (c * n[0], c * n[1]),
        )
    return LieElem(ctx, terms)


def s_log(ctx, m, i, j, mu=1, degree=1):
    return LieElem.single(ctx, m, degree, matrix=elementary(ctx.rank, i, j, -mu))


# -- bracket -----------------------------------------------------------------------


def test_bracket_mixed_term():
    # derivation against matrix: the order-2 term of the first worked example
    ctx = TruncationContext(4, 3)
    x = LieElem.single(ctx, (0, 1), 1, dvec=(-1, 0))
    y = LieElem.single(ctx, (1, 0), 1, matrix=elementary(3, 0, 1, -1))
    out = bracket(x, y)
    assert out == LieElem.single(ctx, (1, 1), 2, matrix=elementary(3, 0, 1, 1))


def test_bracket_antisymmetry_with_self():
    ctx = TruncationContext(4, 2)
    rng = random.Random(3)
    for _ in range(20):
        x = rand_lie(ctx, rng)
        assert bracket(x, x).is_zero()


def test_bracket_antisymmetry_and_jacobi_random():
    ctx = TruncationContext(4, 3)
    rng = random.Random(4)
    for _ in range(60):
        x, y, z = (rand_lie(ctx, rng, terms=2) for _ in range(3))
        assert bracket(x, y) == -bracket(y, x)
        jac = (
            bracket(bracket(x, y), z)
            + bracket(bracket(y, z), x)
            + bracket(bracket(z, x), y)
        )
        assert jac.is_zero()


def test_bracket_orthogonality_closure():
    ctx = TruncationContext(4, 2)
    rng = random.Random(5)
    for _ in range(40):
        x = rand_lie(ctx, rng)
        y = rand_lie(ctx, rng)
        assert bracket(x, y).is_orthogonal()


def test_bracket_zero_frequency_guard():
    ctx = TruncationContext(4, 2)
    x = LieElem.single(ctx, (1, 0), 1, dvec=(0, 1))
    y = LieElem.single(ctx, (-1, 0), 1, dvec=(0, 2))
    # anti-parallel orthogonal derivations: the frequency-zero term vanishes
    assert bracket(x, y).is_zero()
    # anti-parallel matrix parts with a nonzero commutator leave the algebra
    a = LieElem.single(ctx, (1, 0), 1, matrix=elementary(2, 0, 1))
    b = LieElem.single(ctx, (-1, 0), 1, matrix=elementary(2, 1, 0))
    with pytest.raises(ConventionError, match="frequency zero"):
        bracket(a, b)


# -- the operator representation ---------------------------------------------------


def test_operator_on_ring_and_sections():
    ctx = TruncationContext(4, 2)
    x = LieElem.single(ctx, (1, 1), 1, dvec=(1, -1))
    f = SeriesElem.monomial(ctx, (1, 0))
    assert x.apply_derivation(f) == SeriesElem.monomial(ctx, (2, 1), 1, 1)

    a = LieElem.single(ctx, (1, 0), 1, matrix=((0, 1), (0, 0)))
    e2 = (SeriesElem.zero(ctx), SeriesElem.one(ctx))
    out = a.apply_section(e2)
    assert out[0] == SeriesElem.monomial(ctx, (1, 0), 1)
    assert out[1].is_zero()


def test_operator_leibniz_rule():
    ctx = TruncationContext(4, 2)
    rng = random.Random(6)
    for _ in range(20):
        x = rand_lie(ctx, rng)
        f = SeriesElem.monomial(ctx, (rng.randint(-1, 2), rng.randint(-1, 2)), rng.randint(0, 2))
        s = tuple(
            SeriesElem.monomial(ctx, (rng.randint(-1, 1), rng.randint(0, 1)), 0)
            for _ in range(2)
        )
        fs = tuple(f * si for si in s)
        lhs = x.apply_section(fs)
        df = x.apply_derivation(f)
        rhs = tuple(df * si + f * ri for si, ri in zip(s, x.apply_section(s)))
        assert lhs == rhs


def test_representation_is_faithful_bracket_match():
    # operator commutator on generators/sections equals the algebra bracket
    ctx = TruncationContext(4, 2)
    rng = random.Random(7)
    gens = [SeriesElem.monomial(ctx, (1, 0)), SeriesElem.monomial(ctx, (0, 1))]
    z = SeriesElem.zero(ctx)
    sections = [(SeriesElem.one(ctx), z), (z, SeriesElem.one(ctx))]
    for _ in range(25):
        x = rand_lie(ctx, rng, terms=2)
        y = rand_lie(ctx, rng, terms=2)
        b = bracket(x, y)
        for f in gens:
            comm = x.apply_derivation(y.apply_derivation(f)) - y.apply_derivation(
                x.apply_derivation(f)
            )
            assert comm == b.apply_derivation(f)
        for s in sections:
            comm = tuple(
                a - c
                for a, c in zip(
                    x.apply_section(y.apply_section(s)), y.apply_section(x.apply_section(s))
                )
            )
            assert comm == b.apply_section(s)


# -- exp / log / compose ------------------------------------------------------------


def test_exp_zero_is_identity():
    ctx = TruncationContext(3, 2)
    assert exp(LieElem.zero(ctx)) == AutPair.identity(ctx)
    assert log(AutPair.identity(ctx)).is_zero()


def test_exp_k_type_closed_form():
    # exp of the 4d log acts on generators by unit powers and leaves gauge I
    ctx = TruncationContext(5, 2)
    gamma = (0, 1)
    g = exp(k_log(ctx, gamma))
    one = SeriesElem.one(ctx)
    u = one - SeriesElem.monomial(ctx, gamma, 1)
    # images are z^(e_i) (1 - t z^gamma)^(-<e_i, n>) with n = (-1, 0)
    assert g.sigma_images[0] == SeriesElem.monomial(ctx, (1, 0)) * u
    assert g.sigma_images[1] == SeriesElem.monomial(ctx, (0, 1))
    assert g.gauge == SeriesMatrix.identity(ctx)


def test_exp_s_type_nilpotent():
    ctx = TruncationContext(5, 3)
    x = s_log(ctx, (1, 0), 0, 1)
    g = exp(x)
    assert g.sigma_images[0] == SeriesElem.monomial(ctx, (1, 0))
    assert g.sigma_images[1] == SeriesElem.monomial(ctx, (0, 1))
    expected = SeriesMatrix.identity(ctx) + x.matrix_series()
    assert g.gauge == expected


def test_exp_log_roundtrip_random():
    ctx = TruncationContext(5, 2)
    rng = random.Random(8)
    for _ in range(25):
        x = rand_lie(ctx, rng)
        assert log(exp(x)) == x


def test_log_exp_roundtrip_group_side():
    ctx = TruncationContext(4, 2)
    rng = random.Random(9)
    for _ in range(10):
        g = exp(rand_lie(ctx, rng))
        assert exp(log(g)) == g


def test_compose_identity_and_inverse():
    ctx = TruncationContext(5, 2)
    rng = random.Random(10)
    for _ in range(10):
        x = rand_lie(ctx, rng)
        g = exp(x)
        assert compose(g, AutPair.identity(ctx)) == g
        assert compose(AutPair.identity(ctx), g) == g
        assert compose(g, exp(-x)) == AutPair.identity(ctx)


def test_compose_associative():
    ctx = TruncationContext(4, 2)
    rng = random.Random(11)
    for _ in range(8):
        g1, g2, g3 = (exp(rand_lie(ctx, rng, terms=2)) for _ in range(3))
        assert compose(compose(g1, g2), g3) == compose(g1, compose(g2, g3))


def test_module_action_twists_by_sigma():
    # g(f s) = sigma(f) g(s): the automorphism law on the free module
    ctx = TruncationContext(4, 2)
    rng = random.Random(12)
    for _ in range(12):
        g = exp(rand_lie(ctx, rng, terms=2))
        f = SeriesElem.monomial(ctx, (rng.randint(-1, 1), rng.randint(-1, 1)), rng.randint(0, 1))
        s = tuple(SeriesElem.monomial(ctx, (rng.randint(0, 1), 0), 0) for _ in range(2))
        lhs = g.apply_section(tuple(f * si for si in s))
        sf = g.apply_ring(f)
        rhs = tuple(sf * r for r in g.apply_section(s))
        assert lhs == rhs


def test_log_rejects_non_pro_unipotent():
    ctx = TruncationContext(3, 1)
    bad = AutPair(
        ctx,
        (SeriesElem.monomial(ctx, (0, 1)), SeriesElem.monomial(ctx, (1, 0))),
        SeriesMatrix.identity(ctx),
    )
    with pytest.raises(ValueError, match="pro-unipotent"):
        log(bad)


def test_log_flags_non_orthogonal_derivation():
    # exp of an element outside the orthogonal cut is a fine automorphism,
    # but reading it back as a wall log must fail loudly.
    ctx = TruncationContext(3, 1)
    x = LieElem.single(ctx, (1, 0), 1, dvec=(1, 0))  # <m, d> = 1 != 0
    with pytest.raises(ConventionError, match="not orthogonal"):
        log(exp(x))


# -- BCH ---------------------------------------------------------------------------


def test_bch_with_zero():
    ctx = TruncationContext(4, 2)
    rng = random.Random(13)
    x = rand_lie(ctx, rng)
    assert bch(x, LieElem.zero(ctx)) == x
    assert bch(LieElem.zero(ctx), x) == x


def test_bch_commuting_case():
    ctx = TruncationContext(6, 2)
    x = LieElem.single(ctx, (1, 0), 1, matrix=((0, 1), (0, 0)))
    y = LieElem.single(ctx, (2, 0), 2, matrix=((0, 2), (0, 0)))
    assert bracket(x, y).is_zero()
    assert bch(x, y) == x + y


def test_bch_s_walls_terminating():
    # two 2d factors: x + y + (1/2) mu1 mu2 t^2 E_il z^(m1+m2), series ends
    ctx = TruncationContext(6, 3)
    mu1, mu2 = 2, 3
    x = s_log(ctx, (1, 0), 0, 1, mu1)
    y = s_log(ctx, (0, 1), 1, 2, mu2)
    extra = LieElem.single(
        ctx, (1, 1), 2, matrix=elementary(3, 0, 2, Fraction(mu1 * mu2, 2))
    )
    assert bch(x, y) == x + y + extra


def test_bch_matches_dynkin_reference():
    ctx = TruncationContext(4, 2)
    rng = random.Random(14)
    for _ in range(15):
        x = rand_lie(ctx, rng, terms=2)
        y = rand_lie(ctx, rng, terms=2)
        assert bch(x, y) == bch_reference(x, y)


# -- the worked two-wall identity ---------------------------------------------------


def test_example1_group_identity_and_commutator_log():
    ctx = TruncationContext(8, 3)
    s = s_log(ctx, (1, 0), 0, 1)
    k = k_log(ctx, (0, 1))
    t_s, t_k = exp(s), exp(k)
    sk = LieElem.single(ctx, (1, 1), 2, matrix=elementary(3, 0, 1, 1))
    lhs = compose(compose(t_k, t_s), exp(-k))
    rhs = compose(t_s, exp(sk))
    assert lhs == rhs
    commutator = compose(compose(compose(exp(-s), t_k), t_s), exp(-k))
    assert log(commutator) == sk


def test_to_operator_wrapper():
    from wallcross.vertexlie import to_operator

    ctx = TruncationContext(3, 2)
    x = LieElem.single(ctx, (1, 1), 1, dvec=(1, -1))
    op = to_operator(x)
    f = SeriesElem.monomial(ctx, (1, 0))
    assert op.on_ring(f) == x.apply_derivation(f)
    s = (SeriesElem.one(ctx), SeriesElem.zero(ctx))
    assert op.on_section(s) == x.apply_section(s)


def test_exp_log_roundtrip_mixed_quadrants():
    # frequencies outside the positive quadrant force negative generator
    # powers (unit inversion) inside the automorphism application
    ctx = TruncationContext(4, 2)
    rng = random.Random(15)
    for _ in range(15):
        x = rand_lie(ctx, rng, directions=((-1, 2), (2, -1), (1, 1), (-1, -1)), terms=2)
        assert log(exp(x)) == x


def test_bch_associative():
    ctx = TruncationContext(4, 2)
    rng = random.Random(16)
    for _ in range(10):
        x, y, z = (rand_lie(ctx, rng, terms=2) for _ in range(3))
        assert bch(bch(x, y), z) == bch(x, bch(y, z))
