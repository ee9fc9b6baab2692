"""Plain-text reports and deterministic SVG/CSV plots for diagrams and solves."""

from __future__ import annotations

from fractions import Fraction

from .groupoid import ProducedFactor, SFactor, WcfSolution
from .lattice import WallKind, primitive_part
from .scattering import Diagram, new_rays
from .vertexlie import LieElem

_ZERO = Fraction(0)


def _fmt_coeff(c: Fraction) -> str:
    return str(c)


def format_term_lines(x: LieElem, indent: str = "") -> list[str]:
    """Human-readable one-line-per-component rendering of a Lie element."""
    lines = []
    for (m, j), (a, d) in sorted(x.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        r = len(a)
        for row in range(r):
            for col in range(r):
                c = a[row][col]
                if not c:
                    continue
                coeff = "" if c == 1 else f"{_fmt_coeff(c)} * "
                lines.append(f"{indent}t^{j} * {coeff}E[{row + 1},{col + 1}] * z^({m[0]},{m[1]})")
        if d != (_ZERO, _ZERO):
            lines.append(f"{indent}t^{j} * d({d[0]},{d[1]}) * z^({m[0]},{m[1]})")
    if not lines:
        lines.append(f"{indent}0")
    return lines


def completion_report(initial: Diagram, completed: Diagram, consistent: bool) -> str:
    lines = [
        "completion report",
        f"  truncation order: {completed.ctx.order}",
        f"  matrix rank: {completed.ctx.rank}",
        f"  initial walls: {len(initial.walls)}",
        f"  completed walls: {len(completed.walls)}",
        f"  consistency: {'PASS' if consistent else 'FAIL'}",
    ]
    rays = new_rays(initial, completed)
    if rays:
        lines.append(f"  new rays: {len(rays)}")
        for w in sorted(rays, key=lambda w: w.direction):
            lines.append(f"    direction ({w.direction[0]},{w.direction[1]}) [{w.kind.value}]")
            lines.extend(format_term_lines(w.logf, indent="      "))
    else:
        lines.append("  new rays: none")
    return "\n".join(lines) + "\n"


def defect_report(defect: LieElem) -> str:
    k0 = defect.t_order()
    lines = [f"inconsistent: lowest defect at t-degree {k0}"]
    part = defect.degree_part(k0)
    by_freq: dict = {}
    for (m, j), v in sorted(part.terms.items()):
        by_freq.setdefault(m, {})[(m, j)] = v
    for m, terms in sorted(by_freq.items()):
        lines.append(f"  frequency ({m[0]},{m[1]}):")
        lines.extend(format_term_lines(LieElem(defect.ctx, terms), indent="    "))
    return "\n".join(lines) + "\n"


def _factor_label(f) -> str:
    if isinstance(f, SFactor):
        return f"S[{f.pair[0]},{f.pair[1]}]"
    return "K"


def _produced_label(p: ProducedFactor) -> str:
    if p.kind == "S":
        return f"S'[{p.pair[0]},{p.pair[1]}]"
    return "K'"


def wcf_report(sol: WcfSolution) -> str:
    problem = sol.problem
    ctx = problem.context
    lines = [
        "wall-crossing report",
        f"  truncation order: {ctx.order}",
        f"  vacua: {', '.join(ctx.vacua) if ctx.vacua else '(none)'}",
        "  input factors:",
    ]
    if problem.factors:
        for f in problem.factors:
            if isinstance(f, SFactor):
                lines.append(
                    f"    S[{f.pair[0]},{f.pair[1]}] gamma=({f.gamma[0]},{f.gamma[1]}) "
                    f"mu={f.mu} (t^{f.degree})"
                )
            else:
                lines.append(
                    f"    K gamma=({f.gamma[0]},{f.gamma[1]}) Omega={f.omega} (t^{f.degree})"
                )
    else:
        lines.append("    (none)")
    lines.append("  produced factors:")
    if sol.produced:
        for p in sol.produced:
            if p.kind == "S":
                lines.append(
                    f"    S'[{p.pair[0]},{p.pair[1]}] charge=({p.charge[0]},{p.charge[1]}) "
                    f"mu'={p.strength} (t^{p.degree})"
                )
            else:
                extra = "" if p.dilog_pattern else " [nonstandard series]"
                lines.append(
                    f"    K' charge=({p.charge[0]},{p.charge[1]}) "
                    f"Omega'={p.strength} (t^{p.degree}){extra}"
                )
    else:
        lines.append("    identity; no produced factors")
    lines.append(f"  identity: {wcf_identity_string(sol)}")
    lines.append(f"  consistency: {'PASS' if sol.consistent else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _angle_sort_key(direction):
    """Counterclockwise angle from the positive x-axis, compared exactly."""
    x, y = direction
    if y == 0:
        sector = 0 if x > 0 else 4
    elif y > 0:
        sector = 1 if x > 0 else (2 if x == 0 else 3)
    else:
        sector = 5 if x < 0 else (6 if x == 0 else 7)
    # Within an open quadrant the angle grows with the slope y/x.
    return (sector, Fraction(y, x) if x else Fraction(0))


def wcf_identity_string(sol: WcfSolution) -> str:
    """The verified identity in S/K letters, walls in crossing order.

    Left side: initial factors, last-crossed first.  Right side: the
    completed sequence, first-crossed first.
    """
    initial = [(w.direction, w) for w in sol.initial.walls]
    initial.sort(key=lambda t: _angle_sort_key(t[0]))
    completed = [(w.direction, w) for w in sol.completed.walls]
    completed.sort(key=lambda t: _angle_sort_key(t[0]))
    initial_dirs = {w.direction for w in sol.initial.walls}

    def letter(direction, produced: bool) -> str:
        labels = []
        s_done = k_done = False
        for p in sol.produced if produced else ():
            if p.direction != direction:
                continue
            if p.kind == "S" and not s_done:
                labels.append("S'")
                s_done = True
            if p.kind == "K" and not k_done:
                labels.append("K'")
                k_done = True
        if labels:
            return " ".join(labels)
        letters = [
            "S" if isinstance(f, SFactor) else "K"
            for f in sol.problem.factors
            if primitive_part(f.gamma) == direction
        ]
        return "".join(letters) if letters else "?"

    lhs = " ".join(letter(d, False) for d, _ in reversed(initial))
    rhs = " ".join(letter(d, d not in initial_dirs) for d, _ in completed)
    return f"{lhs} = {rhs}" if lhs else "1 = 1"


# -- plots -----------------------------------------------------------------------

_CANVAS = 480
_RADIUS = 200.0


def diagram_svg(d: Diagram) -> str:
    """Deterministic SVG: rays as segments from the canvas center, labeled."""
    mid = _CANVAS // 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CANVAS}" height="{_CANVAS}" '
        f'viewBox="0 0 {_CANVAS} {_CANVAS}">',
        f'<rect width="{_CANVAS}" height="{_CANVAS}" fill="white"/>',
    ]
    segments = []
    for w in sorted(d.walls, key=lambda w: w.direction):
        segments.append((w.direction, w))
        if w.kind is WallKind.LINE:
            segments.append(((-w.direction[0], -w.direction[1]), w))
    for direction, w in segments:
        x, y = direction
        norm = (x * x + y * y) ** 0.5
        ex = mid + _RADIUS * x / norm
        ey = mid - _RADIUS * y / norm
        color = "black" if direction == w.direction else "gray"
        parts.append(
            f'<line x1="{mid}" y1="{mid}" x2="{ex:.2f}" y2="{ey:.2f}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        if direction == w.direction:
            lx, ly = mid + (_RADIUS + 16) * x / norm, mid - (_RADIUS + 16) * y / norm
            label = f"({x},{y}) {_lowest_term_summary(w.logf)}"
            parts.append(
                f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="10" text-anchor="middle">'
                f"{label}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _lowest_term_summary(x: LieElem) -> str:
    if x.is_zero():
        return "0"
    k0 = x.t_order()
    return format_term_lines(x.degree_part(k0))[0]


def diagram_csv(d: Diagram) -> str:
    rows = ["dir_x,dir_y,kind,lowest_degree,summary"]
    for w in sorted(d.walls, key=lambda w: w.direction):
        k0 = w.logf.t_order()
        rows.append(
            f"{w.direction[0]},{w.direction[1]},{w.kind.value},"
            f"{k0 if k0 is not None else ''},{_lowest_term_summary(w.logf)}"
        )
    return "\n".join(rows) + "\n"
