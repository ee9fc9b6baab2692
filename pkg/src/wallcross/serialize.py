"""JSON schemas for diagrams, BPS problems, and Lie elements.

Rationals serialize as canonical lowest-terms strings (``"p/q"`` with q > 1,
bare ``"p"`` for integers); exponents as integer pairs.  Dictionary keys are
emitted in sorted order and wall/term lists in a canonical order, so equal
values serialize byte-identically.

Diagram files::

    {"rank": r, "truncation": N,
     "walls": [{"direction": [a, b], "geometry": "line"|"ray",
                "terms": [{"t": j, "k": multiple,
                           "matrix": [["p/q", ...], ...],
                           "derivation": "p/q"}]}]}

The ``derivation`` coefficient is relative to the primitive normal of the
wall direction.  BPS problem files::

    {"vacua": ["i", "j", ...], "basepoints": {"i": [x, y], ...},
     "factors": [{"type": "S", "pair": ["i", "j"], "gamma": [x, y], "mu": n},
                 {"type": "K", "gamma": [x, y], "Omega": n}]}

with optional "truncation" and "twisting" keys.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .exceptions import SchemaError
from .groupoid import BpsProblem, GroupoidContext, KFactor, SFactor
from .lattice import WallKind, primitive_normal
from .scattering import Diagram, Wall
from .series import TruncationContext
from .vertexlie import LieElem, mat_zero


def frac_str(c: Fraction) -> str:
    return str(Fraction(c))


def parse_frac(s) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(f"bad rational {s!r}: {e}") from None


def _vec(v, what="vector") -> tuple[int, int]:
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(x, int) for x in v)
    ):
        raise SchemaError(f"bad {what}: {v!r} (expected a pair of integers)")
    return (v[0], v[1])


# -- diagrams --------------------------------------------------------------------


def wall_to_json(w: Wall) -> dict:
    n = primitive_normal(w.direction)
    terms = []
    for (m, j), (a, d) in sorted(w.logf.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        k = m[0] // w.direction[0] if w.direction[0] else m[1] // w.direction[1]
        if n[0]:
            dcoeff = d[0] / n[0]
        else:
            dcoeff = d[1] / n[1]
        terms.append(
            {
                "t": j,
                "k": k,
                "matrix": [[frac_str(x) for x in row] for row in a],
                "derivation": frac_str(dcoeff),
            }
        )
    return {
        "direction": list(w.direction),
        "geometry": w.kind.value,
        "terms": terms,
    }


def diagram_to_json(d: Diagram) -> dict:
    out = {
        "rank": d.ctx.rank,
        "truncation": d.ctx.order,
        "walls": [wall_to_json(w) for w in sorted(d.walls, key=lambda w: w.direction)],
    }
    if d.base_direction is not None:
        out["base_direction"] = list(d.base_direction)
    return out


def diagram_from_json(data: dict, order: int | None = None) -> Diagram:
    if not isinstance(data, dict):
        raise SchemaError("diagram file must be a JSON object")
    try:
        rank = int(data["rank"])
        n = int(order if order is not None else data["truncation"])
        walls_data = data["walls"]
    except KeyError as e:
        raise SchemaError(f"diagram file missing key {e}") from None
    ctx = TruncationContext(n, rank)
    walls = []
    for wd in walls_data:
        direction = _vec(wd.get("direction"), "direction")
        geometry = wd.get("geometry", "line")
        if geometry not in ("line", "ray"):
            raise SchemaError(f"bad geometry {geometry!r}")
        nrm = primitive_normal(direction)
        terms = {}
        for td in wd.get("terms", []):
            j = int(td["t"])
            k = int(td["k"])
            if k < 1:
                raise SchemaError("frequency multiple k must be >= 1")
            m = (k * direction[0], k * direction[1])
            mat = td.get("matrix")
            if mat is None:
                a = mat_zero(rank)
            else:
                if len(mat) != rank or any(len(row) != rank for row in mat):
                    raise SchemaError("matrix shape does not match rank")
                a = tuple(tuple(parse_frac(x) for x in row) for row in mat)
            dc = parse_frac(td.get("derivation", "0"))
            key = (m, j)
            if key in terms:
                raise SchemaError(f"duplicate term at frequency {m}, degree {j}")
            terms[key] = (a, (dc * nrm[0], dc * nrm[1]))
        try:
            walls.append(Wall(direction, WallKind(geometry), LieElem(ctx, terms)))
        except ValueError as e:
            raise SchemaError(str(e)) from None
    base = data.get("base_direction")
    try:
        return Diagram(ctx, tuple(walls), _vec(base, "base_direction") if base else None)
    except ValueError as e:
        raise SchemaError(str(e)) from None


# -- BPS problems -----------------------------------------------------------------


def bps_from_json(data: dict, order: int | None = None) -> tuple[BpsProblem, int]:
    if not isinstance(data, dict):
        raise SchemaError("BPS file must be a JSON object")
    vacua = data.get("vacua")
    if not isinstance(vacua, list) or not all(isinstance(v, str) for v in vacua):
        raise SchemaError("vacua must be a list of names")
    n = order if order is not None else data.get("truncation")
    if n is None:
        raise SchemaError("no truncation order: set \"truncation\" or pass --order")
    n = int(n)
    basepoints = tuple(
        (name, _vec(v, "basepoint")) for name, v in sorted(data.get("basepoints", {}).items())
    )
    twisting = data.get("twisting", "trivial")
    factors = []
    omega = []
    mu = []
    for fd in data.get("factors", []):
        ftype = fd.get("type")
        if ftype == "S":
            pair = fd.get("pair")
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError("S factor needs a pair of vacua")
            i, j = pair
            if i not in vacua or j not in vacua:
                raise SchemaError(f"unknown vacua in pair {pair}")
            gamma = _vec(fd.get("gamma"), "gamma")
            muv = int(fd.get("mu", 0))
            ei = dict(basepoints).get(i, (0, 0))
            ej = dict(basepoints).get(j, (0, 0))
            g = (gamma[0] - ei[0] + ej[0], gamma[1] - ei[1] + ej[1])
            if g == (0, 0):
                raise SchemaError("S factor has zero charge coordinate")
            factors.append(SFactor((i, j), g, muv))
            mu.append((i, j, g, muv))
        elif ftype == "K":
            gamma = _vec(fd.get("gamma"), "gamma")
            ov = int(fd.get("Omega", 0))
            factors.append(KFactor(gamma, ov))
            omega.append((gamma, ov))
        else:
            raise SchemaError(f"unknown factor type {ftype!r}")
    try:
        ctx = GroupoidContext(
            vacua=tuple(vacua),
            order=n,
            basepoints=basepoints,
            omega=tuple(omega),
            mu=tuple(mu),
            twisting=twisting,
        )
        problem = BpsProblem(ctx, tuple(f for f in factors if _factor_strength(f)))
    except ValueError as e:
        raise SchemaError(str(e)) from None
    return problem, n


def _factor_strength(f) -> int:
    return f.mu if isinstance(f, SFactor) else f.omega


# -- generic Lie elements (bch command) --------------------------------------------


def lie_terms_to_json(x: LieElem) -> list[dict]:
    out = []
    for (m, j), (a, d) in sorted(x.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        out.append(
            {
                "m": list(m),
                "t": j,
                "matrix": [[frac_str(c) for c in row] for row in a],
                "derivation": [frac_str(d[0]), frac_str(d[1])],
            }
        )
    return out


def lie_terms_from_json(ctx: TruncationContext, data) -> LieElem:
    if not isinstance(data, list):
        raise SchemaError("expected a list of terms")
    terms = {}
    for td in data:
        m = _vec(td.get("m"), "frequency")
        j = int(td["t"])
        mat = td.get("matrix")
        a = (
            tuple(tuple(parse_frac(x) for x in row) for row in mat)
            if mat is not None
            else mat_zero(ctx.rank)
        )
        if len(a) != ctx.rank or any(len(row) != ctx.rank for row in a):
            raise SchemaError("matrix shape does not match rank")
        dv = td.get("derivation", ["0", "0"])
        if not isinstance(dv, list) or len(dv) != 2:
            raise SchemaError("derivation must be a pair of rationals")
        key = (m, j)
        if key in terms:
            raise SchemaError(f"duplicate term at {key}")
        terms[key] = (a, (parse_frac(dv[0]), parse_frac(dv[1])))
    try:
        return LieElem(ctx, terms)
    except ValueError as e:
        raise SchemaError(str(e)) from None


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"
