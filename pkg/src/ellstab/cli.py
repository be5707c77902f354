"""Command line interface: one subcommand per package procedure.

Exit codes: 0 success, 2 invalid input, 3 genericity or pole error,
4 divergent q -> 0 limit.
"""

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import quiver as qv
from .stab import (
    iter_k_stab_matrix,
    iter_stab_matrix,
    k_stab,
    quasiperiods_of_stab,
    stab,
    thom_class,
)
from .errors import (
    DivergenceError,
    DomainError,
    GenericityError,
    NotQuasiPeriodicError,
    PoleError,
    ValidationError,
)
from .monomial import var_from_name
from .parse import parse_expr
from .theta import eval_numeric, normal_form, substitute

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GENERICITY = 3
EXIT_DIVERGENCE = 4

CACHE_ENV = "ELLSTAB_CACHE_DIR"

MAPLE_NAMES = {
    "FixedPoints": "fixed-points",
    "VirtualTangentSpace": "virtual-tangent",
    "TautologicalBundle": "tautological-bundle",
    "TangentSpace": "tangent",
    "Attracting": "attracting",
    "Repelling": "repelling",
    "ChamberExample": "chamber-example",
    "PolExample": "pol-example",
    "NormalForm": "normal-form",
    "ThomClass": "thom-class",
    "Polarization": "polarization",
    "Quasiperiods": "quasiperiods",
    "Restrict": "restrict",
    "StableEnvelope": "stab",
    "StabMatrix": "stab-matrix",
    "KStableEnvelope": "kstab",
    "KStabMatrix": "kstab-matrix",
}

# subcommands whose results are worth caching
CACHED = {"quasiperiods", "stab", "stab-matrix", "kstab", "kstab-matrix"}
LINEAR_OK = {"kstab", "kstab-matrix", "evaluate"}
LINEAR_OPT_IN = {"stab", "stab-matrix"}


# -- argument helpers -------------------------------------------------------------

def _int_list(text):
    try:
        return [int(a) for a in text.strip("[] ").split(",") if a.strip()]
    except ValueError:
        raise ValidationError("expected a comma separated list of integers, got %r" % text) from None


def _fraction_list(text):
    try:
        return [Fraction(a.strip()) for a in text.strip("[] ").split(",") if a.strip()]
    except ValueError:
        raise ValidationError("expected a comma separated list of rationals, got %r" % text) from None


def _entry(text):
    parts = _int_list(text)
    if len(parts) != 2 or min(parts) < 1:
        raise ValidationError("--entries expects i,j with 1-based indices, got %r" % text)
    return parts[0] - 1, parts[1] - 1


def _values(text):
    out = {}
    for item in (text or "").split(";"):
        if not item.strip():
            continue
        if "=" not in item:
            raise ValidationError("--values expects name=value pairs separated by ';', got %r" % item)
        name, value = item.split("=", 1)
        try:
            out[var_from_name(name.strip())] = complex(Fraction(value.strip())) if "j" not in value else complex(value)
        except ValueError:
            raise ValidationError("bad value %r for %s" % (value, name)) from None
    return out


class Context:
    """Validated quiver data, chamber, polarization and fixed point of one run."""

    def __init__(self, args):
        self.args = args
        self.linear = bool(getattr(args, "linear", False))
        if args.v is None or args.w is None:
            raise ValidationError("--v and --w are required for %s" % args.command)
        v, w = _int_list(args.v), _int_list(args.w)
        self.d = qv.linear_quiver(v, w) if self.linear else qv.QuiverData(v, w)
        self.chamber = qv.parse_chamber(args.chamb, self.d) if args.chamb else qv.chamber_example(self.d)
        if getattr(args, "arrows", None):
            arrows = qv.parse_arrows(args.arrows)
            if self.linear and arrows and len(arrows[0]) == self.d.r - 1:
                arrows = tuple(row + (1,) for row in arrows)
            self.arrows = qv.parse_arrows(arrows, self.d)
        else:
            self.arrows = qv.pol_example(self.d)
        self.slope = None
        if getattr(args, "slope", None):
            slope = _fraction_list(args.slope)
            if self.linear and len(slope) == self.d.r - 1:
                slope.append(Fraction(0))
            if len(slope) != self.d.r:
                raise ValidationError("--slope needs %d entries, got %d" % (self.d.r, len(slope)))
            self.slope = slope
        self._order = None

    @property
    def order(self):
        if self._order is None:
            self._order = qv.fixed_points(self.d, self.chamber)
        return self._order

    def point(self, required=True):
        spec = getattr(self.args, "fixed_point", None)
        if spec is None:
            if required:
                raise ValidationError("--fixed-point (index or literal) is required for %s" % self.args.command)
            return None
        spec = spec.strip()
        if spec.lstrip("-").isdigit():
            k = int(spec)
            if not 1 <= k <= len(self.order):
                raise ValidationError("fixed point index %d out of range 1..%d" % (k, len(self.order)))
            return self.order[k - 1]
        return qv.parse_fixed_point(spec, self.d)

    def entries(self):
        raw = getattr(self.args, "entries", None)
        if not raw:
            return None
        out = []
        for item in raw:
            for piece in item.split(";"):
                if piece.strip():
                    out.append(_entry(piece))
        n = len(self.order)
        for i, j in out:
            if i >= n or j >= n:
                raise ValidationError("entry (%d,%d) out of range for %d fixed points" % (i + 1, j + 1, n))
        return out

    def cache_key(self):
        a = self.args
        payload = {
            "command": a.command,
            "v": list(self.d.v),
            "w": list(self.d.w),
            "chamb": self.chamber.to_text(),
            "arrows": qv.format_arrows(self.arrows),
            "slope": [str(s) for s in self.slope] if self.slope else None,
            "fixed_point": getattr(a, "fixed_point", None),
            "entries": getattr(a, "entries", None),
            "linear": self.linear,
            "format": a.format,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# -- output -------------------------------------------------------------------------

class Output:
    """Writes to stdout and keeps a copy for the cache."""

    def __init__(self, stream):
        self.stream = stream
        self.parts = []

    def write(self, text):
        self.parts.append(text)
        self.stream.write(text)
        self.stream.flush()

    def line(self, text=""):
        self.write(text + "\n")

    def text(self):
        return "".join(self.parts)


def _expr_json(e):
    return {"text": str(e), "expr": e.to_json()}


def _emit_expr(out, args, e):
    if args.format == "json":
        out.line(json.dumps(_expr_json(e)))
    else:
        out.line(str(e))


def _emit_points(out, args, points):
    if args.format == "json":
        out.line(json.dumps([p.to_json() for p in points]))
    else:
        for p in points:
            out.line(p.to_text())


def _emit_matrix(out, args, ctx, rows):
    """Text entries stream as ``[i,j] expr``; JSON is written once complete."""
    order = ctx.order
    n = len(order)
    if args.format == "json":
        matrix = [[None] * n for _ in range(n)]
        for i, j, e in rows:
            matrix[i][j] = str(e)
        out.line(json.dumps({"order": [p.to_json() for p in order], "entries": matrix}))
        return
    for k, p in enumerate(order, 1):
        out.line("# %d %s" % (k, p.to_text()))
    for i, j, e in rows:
        out.line("[%d,%d] %s" % (i + 1, j + 1, e))


# -- subcommands ------------------------------------------------------------------

def cmd_fixed_points(args, out):
    ctx = Context(args)
    if args.fixed_point is not None:
        _emit_points(out, args, [ctx.point()])
    else:
        _emit_points(out, args, ctx.order)


def cmd_virtual_tangent(args, out):
    ctx = Context(args)
    _emit_expr(out, args, qv.virtual_tangent_space(ctx.d))


def cmd_tautological_bundle(args, out):
    if args.v is None:
        raise ValidationError("--v is required")
    v = _int_list(args.v)
    d = qv.QuiverData(v, [0] * len(v))
    roots = qv.tautological_bundle(d, args.vertex)
    _emit_expr(out, args, qv.character((1, e) for e in roots))


def cmd_tangent(args, out):
    ctx = Context(args)
    _emit_expr(out, args, qv.tangent_space_at(ctx.d, ctx.point()))


def _split(args):
    ctx = Context(args)
    return qv.split_attracting(qv.tangent_space_at(ctx.d, ctx.point()), ctx.chamber)


def cmd_attracting(args, out):
    _emit_expr(out, args, _split(args)[0])


def cmd_repelling(args, out):
    _emit_expr(out, args, _split(args)[1])


def cmd_chamber_example(args, out):
    ctx = Context(args)
    c = qv.chamber_example(ctx.d)
    out.line(json.dumps(c.to_json()) if args.format == "json" else c.to_text())


def cmd_pol_example(args, out):
    ctx = Context(args)
    a = qv.pol_example(ctx.d)
    out.line(json.dumps([list(row) for row in a]) if args.format == "json" else qv.format_arrows(a))


def _read_expr(args):
    if args.expr is None:
        raise ValidationError("--expr is required for %s" % args.command)
    text = sys.stdin.read() if args.expr == "-" else args.expr
    return parse_expr(text)


def cmd_normal_form(args, out):
    _emit_expr(out, args, normal_form(_read_expr(args)))


def cmd_thom_class(args, out):
    _emit_expr(out, args, thom_class(_read_expr(args)))


def cmd_polarization(args, out):
    ctx = Context(args)
    _emit_expr(out, args, qv.polarization(ctx.d, ctx.arrows))


def cmd_quasiperiods(args, out):
    ctx = Context(args)
    factors = quasiperiods_of_stab(ctx.d, ctx.point(), ctx.arrows, ctx.chamber)
    if args.format == "json":
        out.line(json.dumps({str(v): str(m) for v, m in factors.items()}))
    else:
        for v, m in factors.items():
            out.line("%s: %s" % (v, m))


def cmd_restrict(args, out):
    ctx = Context(args)
    p = ctx.point()
    mapping = qv.restrict_map(ctx.d, p)
    if args.expr is not None:
        _emit_expr(out, args, normal_form(substitute(_read_expr(args), mapping)))
    elif args.format == "json":
        out.line(json.dumps({str(v): str(m) for v, m in sorted(mapping.items())}))
    else:
        out.line(qv.format_restrict_map(mapping))


def _maybe_linear(ctx, e):
    return qv.specialize_linear(e) if ctx.linear else e


def cmd_stab(args, out):
    ctx = Context(args)
    e = stab(ctx.d, ctx.point(), ctx.arrows, ctx.chamber)
    _emit_expr(out, args, _maybe_linear(ctx, e))


def cmd_stab_matrix(args, out):
    ctx = Context(args)
    rows = (
        (i, j, _maybe_linear(ctx, e))
        for i, j, e in iter_stab_matrix(ctx.d, ctx.arrows, ctx.chamber, ctx.entries())
    )
    _emit_matrix(out, args, ctx, rows)


def _slope(ctx):
    if ctx.slope is None:
        raise ValidationError("--slope is required for %s" % ctx.args.command)
    return ctx.slope


def cmd_kstab(args, out):
    ctx = Context(args)
    e = k_stab(ctx.d, ctx.point(), ctx.arrows, ctx.chamber, _slope(ctx), linear=ctx.linear)
    _emit_expr(out, args, e)


def cmd_kstab_matrix(args, out):
    ctx = Context(args)
    rows = iter_k_stab_matrix(ctx.d, ctx.arrows, ctx.chamber, _slope(ctx), linear=ctx.linear, entries=ctx.entries())
    _emit_matrix(out, args, ctx, rows)


def cmd_evaluate(args, out):
    e = _read_expr(args)
    if args.linear:
        e = qv.specialize_linear(e)
    if not 0 < abs(args.q_val) < 1:
        raise ValidationError("--q-val must satisfy 0 < |q| < 1")
    if args.trunc < 1:
        raise ValidationError("--trunc must be positive")
    value = eval_numeric(e, _values(args.values), args.q_val, trunc=args.trunc)
    if args.format == "json":
        out.line(json.dumps({"real": value.real, "imag": value.imag}))
    else:
        out.line(repr(value.real) if value.imag == 0 else repr(value))


COMMANDS = {
    "fixed-points": (cmd_fixed_points, "list the torus fixed points in chamber order"),
    "virtual-tangent": (cmd_virtual_tangent, "virtual tangent space in Chern roots"),
    "tautological-bundle": (cmd_tautological_bundle, "Chern roots of one tautological bundle"),
    "tangent": (cmd_tangent, "tangent character at a fixed point"),
    "attracting": (cmd_attracting, "attracting part of the tangent character"),
    "repelling": (cmd_repelling, "repelling part of the tangent character"),
    "chamber-example": (cmd_chamber_example, "a default chamber"),
    "pol-example": (cmd_pol_example, "a default polarization"),
    "normal-form": (cmd_normal_form, "reduce theta arguments to minimal q-powers"),
    "thom-class": (cmd_thom_class, "theta class of a Laurent character"),
    "polarization": (cmd_polarization, "polarization selected by --arrows"),
    "quasiperiods": (cmd_quasiperiods, "quasi-period factors of the stable envelope"),
    "restrict": (cmd_restrict, "Chern root weights at a fixed point"),
    "stab": (cmd_stab, "off-shell elliptic stable envelope"),
    "stab-matrix": (cmd_stab_matrix, "matrix of restricted elliptic stable envelopes"),
    "kstab": (cmd_kstab, "off-shell K-theoretic stable envelope"),
    "kstab-matrix": (cmd_kstab_matrix, "matrix of restricted K-theoretic stable envelopes"),
    "evaluate": (cmd_evaluate, "numeric value of an expression (truncated products)"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--v", help="dimension vector, e.g. 2,2,3")
    common.add_argument("--w", help="framing vector, e.g. 2,1,0")
    common.add_argument("--chamb", help="chamber, e.g. t2,t1,u[1,1],u[1,2],u[2,1]")
    common.add_argument("--arrows", help="polarization, e.g. [[1,-1,1],[-1,1,1],[-1,-1,1]]")
    common.add_argument("--fixed-point", "--index", dest="fixed_point",
                        help="1-based position in chamber order or a literal like [[[1],1,1]]")
    common.add_argument("--slope", help="rational slope per vertex, e.g. 1/3")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--linear", action="store_true",
                        help="treat v, w as a linear quiver and substitute t2=1, t1=hbar")
    common.add_argument("--linear-elliptic", action="store_true",
                        help="allow --linear for elliptic output")
    common.add_argument("--expr", help="expression text, or - to read stdin")
    common.add_argument("--vertex", type=int, default=1, help="vertex for tautological-bundle")
    common.add_argument("--values", help="variable assignments for evaluate, e.g. 't1=2/7;z[1]=4/9'")
    common.add_argument("--trunc", type=int, default=40, help="number of factors in truncated products")
    common.add_argument("--q-val", type=float, default=0.1, help="numeric value of q")
    common.add_argument("--entries", action="append",
                        help="only compute entry i,j (1-based); repeatable")
    common.add_argument("--cache-dir", help="cache directory (default $%s)" % CACHE_ENV)

    parser = argparse.ArgumentParser(prog="ellstab", description="Elliptic and K-theoretic stable envelopes of cyclic quiver varieties.")
    parser.add_argument("--maple-names", action="store_true", help="print the procedure name table and exit")
    sub = parser.add_subparsers(dest="command")
    by_command = {}
    for maple, name in MAPLE_NAMES.items():
        by_command.setdefault(name, []).append(maple)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, aliases=by_command.get(name, []))
    return parser


def _canonical_command(name):
    return MAPLE_NAMES.get(name, name)


def _check_linear(args):
    if not args.linear:
        return
    if args.command in LINEAR_OK:
        return
    if args.command in LINEAR_OPT_IN and args.linear_elliptic:
        return
    raise ValidationError("--linear applies to kstab, kstab-matrix and evaluate (stab needs --linear-elliptic)")


def _cache_path(args, ctx):
    root = args.cache_dir or os.environ.get(CACHE_ENV)
    if not root or args.command not in CACHED:
        return None
    return os.path.join(root, ctx.cache_key() + ".txt")


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.maple_names:
        for maple, name in MAPLE_NAMES.items():
            stdout.write("%s\t%s\n" % (maple, name))
        return EXIT_OK
    if not args.command:
        parser.print_help(stderr)
        return EXIT_VALIDATION
    args.command = _canonical_command(args.command)
    out = Output(stdout)
    try:
        _check_linear(args)
        path = None
        if args.command in CACHED:
            path = _cache_path(args, Context(args))
        if path and os.path.exists(path):
            with open(path) as fh:
                out.write(fh.read())
            return EXIT_OK
        COMMANDS[args.command][0](args, out)
        if path:
            os.makedirs(os.path.dirname(path), exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w") as fh:
                fh.write(out.text())
            os.replace(tmp, path)
    except (ValidationError, DomainError) as exc:
        stderr.write("error: %s\n" % exc)
        return EXIT_VALIDATION
    except (GenericityError, PoleError, NotQuasiPeriodicError) as exc:
        stderr.write("error: %s\n" % exc)
        return EXIT_GENERICITY
    except DivergenceError as exc:
        stderr.write("error: %s\n" % exc)
        return EXIT_DIVERGENCE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
