"""Command-line entry point: solve, boundary, verify, normalize, plot and selftest.

Every option can also be set through an environment variable named
G2TODA_<COMMAND>_<OPTION>, e.g. G2TODA_SOLVE_RADIUS=6.

Exit codes: 0 success, 2 solver failure, 3 ray did not converge, 4 non-generic
polygon given to normalize, 64 usage error, 65 malformed input file.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass

import click
import numpy as np

EXIT_SOLVER = 2
EXIT_RAY = 3
EXIT_NONGENERIC = 4
EXIT_USAGE = 64
EXIT_DATA = 65

MIN_NODES = 129


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomial expressions
#
#   expr   := term (('+' | '-') term)*
#   term   := unary ('*' unary)*
#   unary  := '-' unary | power
#   power  := atom ('^' integer)?
#   atom   := number | number 'i' | 'i' | 'z' | '(' expr ')'
#
# Polynomials are lists of complex coefficients in ascending order.


def _tokens(text):
    out = []
    k = 0
    while k < len(text):
        ch = text[k]
        if ch.isspace():
            k += 1
        elif ch.isdigit() or ch == ".":
            start = k
            while k < len(text) and (text[k].isdigit() or text[k] == "."):
                k += 1
            if k < len(text) and text[k] in "eE" and k + 1 < len(text) and (
                    text[k + 1].isdigit() or text[k + 1] in "+-"):
                k += 2
                while k < len(text) and text[k].isdigit():
                    k += 1
            try:
                out.append(("num", float(text[start:k])))
            except ValueError:
                raise ParseError(f"bad number {text[start:k]!r}") from None
        elif ch in "+-*^()":
            out.append((ch, None))
            k += 1
        elif ch in "zZ":
            out.append(("z", None))
            k += 1
        elif ch in "ijIJ":
            out.append(("i", None))
            k += 1
        else:
            raise ParseError(f"unexpected character {ch!r}")
    out.append(("end", None))
    return out


def _add(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def _mul(a, b):
    out = [0j] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos][0]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}")
        self.pos += 1
        return tok

    def expr(self):
        val = self.term()
        while self.peek() in "+-":
            op = self.take()[0]
            rhs = self.term()
            val = _add(val, rhs if op == "+" else [-c for c in rhs])
        return val

    def term(self):
        val = self.unary()
        while self.peek() == "*":
            self.take()
            val = _mul(val, self.unary())
        return val

    def unary(self):
        if self.peek() == "-":
            self.take()
            return [-c for c in self.unary()]
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            _, exponent = self.take("num")
            if exponent != int(exponent) or exponent < 0:
                raise ParseError("exponents must be non-negative integers")
            out = [1 + 0j]
            for _ in range(int(exponent)):
                out = _mul(out, base)
            return out
        return base

    def atom(self):
        kind, value = self.take()
        if kind == "num":
            if self.peek() == "i":
                self.take()
                return [1j * value]
            return [complex(value)]
        if kind == "i":
            return [1j]
        if kind == "z":
            return [0j, 1 + 0j]
        if kind == "(":
            val = self.expr()
            self.take(")")
            return val
        raise ParseError(f"unexpected {kind!r}")


def parse_polynomial(text) -> tuple:
    """Ascending complex coefficients of an expression such as "z^2 + 1" or "(1+2i)*z"."""
    parser = _Parser(text)
    coeffs = parser.expr()
    parser.take("end")
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(complex(c) for c in coeffs)


def parse_coefficients(text) -> tuple:
    """Comma-separated ascending coefficients, each a Python complex literal."""
    try:
        return tuple(complex(part.strip().replace("i", "j")) for part in text.split(","))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_chart(text) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError("--chart takes two indices a,b")
    chart = tuple(int(p) for p in parts)
    if not all(0 <= c < 7 for c in chart) or chart[0] == chart[1]:
        raise ParseError("chart indices must be distinct and in 0..6")
    return chart


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    coeffs: tuple
    radius: float = 8.0
    n: int = 257
    tol: float = 1e-6
    seed: int = 0

    def check(self):
        from .toda import SexticPoly

        q = SexticPoly(self.coeffs)
        if not q.monic:
            raise ParseError("q must be monic")
        if self.n < MIN_NODES:
            raise ParseError(f"--n must be at least {MIN_NODES}")
        reach = q.sublevel_radius()
        if q.degree > 0 and self.radius < 2 * reach:
            raise ParseError(f"--radius must be at least {2 * reach:.3g} to cover |q| <= 1 twice over")
        return q


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _config(q_text, coeffs_text, radius, n, tol, seed):
    if (q_text is None) == (coeffs_text is None):
        raise ParseError("give exactly one of --q and --coeffs")
    coeffs = parse_polynomial(q_text) if q_text is not None else parse_coefficients(coeffs_text)
    cfg = RunConfig(coeffs, radius, n, tol, seed)
    return cfg, cfg.check()


def _read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise _Exit(EXIT_DATA, f"cannot read {path}: {exc}") from None


def _read_polygon(path):
    from .ein23 import AnnihilatorPolygon, NotNullError

    text = _read_text(path)
    try:
        return AnnihilatorPolygon.from_json(text)
    except (ValueError, KeyError, TypeError, NotNullError) as exc:
        raise _Exit(EXIT_DATA, f"malformed polygon file {path}: {exc}") from None


def _write(path, text):
    if path is None or path == "-":
        click.echo(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _solve(q, cfg, newton_tol=None):
    from .toda import ConvergenceError, EnvelopeError, SolverConfig, solve

    sc = SolverConfig(radius=cfg.radius, n=cfg.n)
    if newton_tol is not None:
        sc.tol = newton_tol
    try:
        return solve(q, sc)
    except (ConvergenceError, EnvelopeError) as exc:
        raise _Exit(EXIT_SOLVER, f"solver failed: {exc}") from None


# ---------------------------------------------------------------------------
# commands

_q_options = [
    click.option("--q", "q_text", help='Polynomial expression in z, e.g. "z^2+1".'),
    click.option("--coeffs", "coeffs_text", help="Ascending coefficients, e.g. 0,0,1."),
    click.option("--radius", type=float, default=8.0, show_default=True),
    click.option("--n", type=int, default=257, show_default=True, help="Nodes per side."),
    click.option("--seed", type=int, default=0, show_default=True),
]


def _with_q(func):
    for opt in reversed(_q_options):
        func = opt(func)
    return func


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Toda solver and annihilator polygons for polynomial sextic differentials."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)


@main.command()
@_with_q
@click.option("--tol", type=float, default=1e-11, show_default=True, help="Newton residual tolerance.")
@click.option("--out", type=click.Path(dir_okay=False), help="Solution JSON path (stdout if omitted).")
def solve(q_text, coeffs_text, radius, n, seed, tol, out):
    """Solve the Toda system on a disk and write the solution JSON."""
    from .toda import growth_slopes

    cfg, q = _config(q_text, coeffs_text, radius, n, tol, seed)
    grid = _solve(q, cfg, tol)
    lo, hi = grid.envelope_slack()
    click.echo(f"residual {grid.residual:.3e}", err=True)
    click.echo(f"envelope slack {lo:.3e} {hi:.3e}", err=True)
    if q.degree > 0:
        slope_r, slope_s = growth_slopes(grid, radius / 2, radius - 1)
        click.echo(f"growth slopes log r {slope_r:.4f} log s {slope_s:.4f}", err=True)
    _write(out, grid.to_json())


@main.command()
@_with_q
@click.option("--solution", type=click.Path(dir_okay=False), help="Reuse a solution JSON instead of solving.")
@click.option("--tol", type=float, default=1e-5, show_default=True, help="Null and d3 tolerance.")
@click.option("--out", type=click.Path(dir_okay=False), help="Polygon JSON path (stdout if omitted).")
@click.option("--svg", type=click.Path(dir_okay=False), help="Also write an SVG drawing here.")
@click.option("--chart", default="0,1", show_default=True, help="Coordinate indices a,b for the SVG.")
def boundary(q_text, coeffs_text, radius, n, seed, solution, tol, out, svg, chart):
    """Extract the boundary annihilator polygon from vertex-ray limits."""
    from .ein23 import BoundaryError, extract_boundary, to_svg
    from .toda import SexticPoly, TodaGrid

    chart = parse_chart(chart)
    if solution is not None:
        try:
            grid = TodaGrid.from_json(_read_text(solution))
        except (ValueError, KeyError, TypeError) as exc:
            raise _Exit(EXIT_DATA, f"malformed solution file {solution}: {exc}") from None
        q = grid.q
    else:
        cfg, q = _config(q_text, coeffs_text, radius, n, tol, seed)
        grid = None if q == SexticPoly((1,)) else _solve(q, cfg)
    try:
        poly, results = extract_boundary(q, grid, tol=tol)
    except BoundaryError as exc:
        raise _Exit(EXIT_RAY, str(exc)) from None
    click.echo(f"{len(poly)} vertices, {poly.generic.status}, worst cauchy "
               f"{max(r.cauchy for r in results):.2e}", err=True)
    _write(out, poly.to_json())
    if svg:
        _write(svg, to_svg(poly, chart))


@main.command()
@click.argument("polygon_file", type=click.Path(dir_okay=False))
@click.option("--tol", type=float, default=None, help="Override the tolerance stored in the file.")
def verify(polygon_file, tol):
    """Check the annihilator-polygon conditions and report each one."""
    from .ein23 import validate

    poly = _read_polygon(polygon_file)
    report = validate(poly, tol)
    obj = report.to_json_obj()
    obj["genericity"] = poly.generic.to_json_obj()
    click.echo(json.dumps(obj, indent=1))


@main.command()
@click.argument("polygon_file", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Normalized polygon path (stdout if omitted).")
def normalize(polygon_file, out):
    """Move a polygon to standard position by an element of G2."""
    from .ein23 import NonGenericError
    from .ein23 import normalize as normalize_polygon

    poly = _read_polygon(polygon_file)
    try:
        result, _ = normalize_polygon(poly)
    except NonGenericError as exc:
        raise _Exit(EXIT_NONGENERIC, str(exc)) from None
    _write(out, result.to_json())


@main.command()
@click.argument("polygon_file", type=click.Path(dir_okay=False))
@click.option("--chart", default="0,1", show_default=True, help="Coordinate indices a,b.")
@click.option("--out", type=click.Path(dir_okay=False), help="SVG path (stdout if omitted).")
def plot(polygon_file, chart, out):
    """Draw a polygon file as SVG in an affine chart."""
    from .ein23 import to_svg

    poly = _read_polygon(polygon_file)
    _write(out, to_svg(poly, parse_chart(chart)))


@main.command()
def selftest():
    """Fast consistency checks of the algebra and the model hexagon."""
    from . import octonion
    from .ein23 import polygon, validate
    from .g2lie import Root, chevalley, g2_membership_defect
    from .modelsurface import hexagon

    rng = np.random.default_rng(0)
    checks = []
    xs = [octonion.SplitOctonion(tuple(int(c) for c in rng.integers(-5, 6, 8))) for _ in range(3)]
    x, y, z = xs
    lhs = octonion.mul(octonion.mul(octonion.mul(x, y), x), z)
    rhs = octonion.mul(x, octonion.mul(y, octonion.mul(x, z)))
    checks.append(("moufang", lhs == rhs))
    prod = octonion.qform(octonion.mul(x, y))
    checks.append(("composition", prod == octonion.qform(x) * octonion.qform(y)))
    worst = max(g2_membership_defect(getattr(chevalley(r), part)) for r in Root for part in ("e", "e_neg", "t"))
    checks.append(("g2 generators", worst < 1e-10))
    checks.append(("hexagon", validate(polygon(hexagon())).passed))
    for name, ok in checks:
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}")
    if not all(ok for _, ok in checks):
        raise _Exit(1, "selftest failed")


def run(argv=None) -> int:
    """Run the CLI and return its exit code instead of raising SystemExit."""
    try:
        main.main(args=argv, prog_name="g2toda", standalone_mode=False, auto_envvar_prefix="G2TODA")
        return 0
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (click.UsageError, ParseError) as exc:
        click.echo(f"usage error: {exc}", err=True)
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except _Exit as exc:
        click.echo(str(exc), err=True)
        return exc.code
    except click.ClickException as exc:
        exc.show()
        return EXIT_DATA if isinstance(exc, click.FileError) else 1


def entry():
    sys.exit(run())


if __name__ == "__main__":
    entry()
