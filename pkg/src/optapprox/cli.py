"""Command-line front end.

Every subcommand maps onto one library operation and writes a JSON document
or a CSV table to stdout (or ``--out``).  Exit status is 0 on success, 2 on
validation errors and 3 on numerical failures; errors print one line of the
form ``CODE: message`` on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import approximants as ap
from . import space as sp
from . import zeros as zr
from .errors import OptApproxError, ParseError
from .series import CoeffSeries, multiply

SCHEMA_VERSION = ap.SCHEMA_VERSION

COMMANDS = (
    "approximant", "norms", "closedform", "cyclicity", "rates", "lemmasum",
    "enestrom", "roots", "regions", "product", "rotate", "kernel",
)
TABULAR = {"norms", "rates", "lemmasum", "product", "rotate", "kernel"}


# -- spec parsing ------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _ExprParser:
    """Sums of complex literals, optionally with linear ``z`` terms.

    Terms look like ``2``, ``-0.5i``, ``i``, ``(1+2i)``, ``3z``, ``0.5iz``,
    ``(1+i)z`` or ``z``.
    """

    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, msg: str):
        raise ParseError(msg, self.text, self.offset + self.pos)

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        return self.peek() == ""

    def parse_sum(self, allow_z: bool) -> tuple[complex, complex]:
        const, zc = 0j, 0j
        first = True
        while True:
            c = self.peek()
            sign = 1.0
            if c in ("+", "-"):
                sign = -1.0 if c == "-" else 1.0
                self.pos += 1
            elif not first:
                break
            coef, is_z = self.parse_term(allow_z)
            if is_z:
                zc += sign * coef
            else:
                const += sign * coef
            first = False
            if self.peek() not in ("+", "-"):
                break
        return const, zc

    def parse_term(self, allow_z: bool) -> tuple[complex, bool]:
        c = self.peek()
        if c == "(":
            self.pos += 1
            const, _ = self.parse_sum(allow_z=False)
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            coef = const
        elif c == "i":
            self.pos += 1
            coef = 1j
        elif c == "z":
            coef = 1.0 + 0j
        else:
            m = _NUMBER.match(self.text, self.pos)
            if not m:
                self.error("expected a number, 'i', 'z' or '('")
            self.pos = m.end()
            coef = complex(float(m.group()))
            if self.pos < len(self.text) and self.text[self.pos] == "i":
                self.pos += 1
                coef *= 1j
        if self.pos < len(self.text) and self.text[self.pos] == "z":
            if not allow_z:
                self.error("'z' is not allowed here")
            self.pos += 1
            return coef, True
        return coef, False


def parse_complex(text: str, offset: int = 0) -> complex:
    p = _ExprParser(text, offset)
    value, _ = p.parse_sum(allow_z=False)
    if not p.at_end():
        p.error(f"unexpected {p.peek()!r}")
    return value


def parse_space_spec(s: str) -> sp.WeightSequence:
    """``dirichlet:alpha=<real>`` or ``table:<path>[,tail=power|forbidden]``."""
    s = s.strip()
    kind, sep, rest = s.partition(":")
    if not sep:
        raise ParseError("space spec needs the form kind:...", s, len(s))
    if kind == "dirichlet":
        m = re.fullmatch(r"alpha=(\S+)", rest)
        if not m:
            raise ParseError("expected alpha=<real>", s, len(kind) + 1)
        try:
            alpha = float(m.group(1))
        except ValueError:
            raise ParseError(f"bad alpha {m.group(1)!r}", s, len(kind) + 7) from None
        if not math.isfinite(alpha):
            raise ParseError("alpha must be finite", s, len(kind) + 7)
        return sp.DirichletAlpha(alpha)
    if kind == "table":
        path, tail = rest, "forbidden"
        if "," in rest:
            path, opt = rest.rsplit(",", 1)
            m = re.fullmatch(r"tail=(power|forbidden)", opt.strip())
            if not m:
                raise ParseError("expected tail=power or tail=forbidden", s, len(kind) + 2 + len(path))
            tail = m.group(1)
        if not path:
            raise ParseError("missing table path", s, len(kind) + 1)
        return sp.load_table_csv(path, tail)
    raise ParseError(f"unknown space kind {kind!r}", s, 0)


def _split_groups(body: str, offset: int, full: str) -> list[tuple[str, int]]:
    """Top-level parenthesised groups of ``(..)(..)``; returns (inner text, offset)."""
    groups = []
    i = 0
    while i < len(body):
        if body[i].isspace() or body[i] == "*":
            i += 1
            continue
        if body[i] != "(":
            raise ParseError("expected '(' starting a factor", full, offset + i)
        depth, j = 0, i
        while j < len(body):
            if body[j] == "(":
                depth += 1
            elif body[j] == ")":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if depth != 0:
            raise ParseError("unbalanced parentheses", full, offset + i)
        groups.append((body[i + 1 : j], offset + i + 1))
        i = j + 1
    return groups


def parse_function_spec(s: str) -> CoeffSeries:
    """``coeffs:[c0,c1,...]`` or ``factors:(1-z)(1+z)...`` with linear factors."""
    s = s.strip()
    kind, sep, body = s.partition(":")
    start = len(kind) + 1
    if not sep:
        raise ParseError("function spec needs the form kind:...", s, len(s))
    if kind == "coeffs":
        b = body.strip()
        lead = len(body) - len(body.lstrip())
        if not (b.startswith("[") and b.endswith("]")):
            raise ParseError("expected [c0,c1,...]", s, start)
        inner = b[1:-1]
        base = start + lead + 1
        items, depth, last = [], 0, 0
        for i, ch in enumerate(inner + ","):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                items.append((inner[last:i], base + last))
                last = i + 1
        if len(items) == 1 and not items[0][0].strip():
            raise ParseError("empty coefficient list", s, base)
        vals = []
        for text, off in items:
            if not text.strip():
                raise ParseError("empty coefficient", s, off)
            try:
                vals.append(parse_complex(text, off))
            except ParseError as exc:
                raise ParseError(str(exc).split(" (at position")[0], s, exc.position) from None
        return CoeffSeries(vals)
    if kind == "factors":
        groups = _split_groups(body, start, s)
        if not groups:
            raise ParseError("no factors given", s, start)
        out = CoeffSeries([1.0])
        for text, off in groups:
            p = _ExprParser(text, off)
            try:
                const, zc = p.parse_sum(allow_z=True)
                if not p.at_end():
                    p.error(f"unexpected {p.peek()!r}")
            except ParseError as exc:
                raise ParseError(str(exc).split(" (at position")[0], s, exc.position) from None
            if zc == 0:
                raise ParseError("factor must be linear in z", s, off)
            out = multiply(out, CoeffSeries([const, zc]))
        return out
    raise ParseError(f"unknown function kind {kind!r}", s, 0)


# -- running -----------------------------------------------------------------


@dataclass
class RunConfig:
    space_spec: str = "dirichlet:alpha=0"
    function_spec: str = "factors:(1-z)"
    n_max: int = 10
    output: str | None = None
    out_path: str | None = None
    seed: int = zr.DEFAULT_SEED
    n: int | None = None
    n_min: int | None = None
    g_spec: str | None = None
    lam: str = "-1"
    grid: int = 11
    radius: float = 0.9

    def __post_init__(self):
        if self.n_max < 0:
            raise ParseError("n-max must be nonnegative")
        if self.n is not None and self.n < 0:
            raise ParseError("n must be nonnegative")
        if self.output not in (None, "json", "csv"):
            raise ParseError("output must be json or csv")


@dataclass
class Artifact:
    payload: dict
    header: list[str] = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    status: int = 0


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _pairs(c) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(c, dtype=complex)]


def _space(cfg: RunConfig) -> sp.SpaceModel:
    return sp.SpaceModel(parse_space_spec(cfg.space_spec))


def _degree(cfg: RunConfig) -> int:
    return cfg.n if cfg.n is not None else cfg.n_max


def _cmd_approximant(cfg):
    space, f = _space(cfg), parse_function_spec(cfg.function_spec)
    r = ap.optimal_approximant(space, f, _degree(cfg))
    d = r.to_dict()
    return Artifact(d, ["k", "re", "im"],
                    [{"k": k, "re": a, "im": b} for k, (a, b) in enumerate(d["p_star"])])


def _cmd_norms(cfg):
    space, f = _space(cfg), parse_function_spec(cfg.function_spec)
    eps = ap.optimal_norm_sequence(space, f, cfg.n_max)
    rows = [{"n": n, "epsilon_n": float(e)} for n, e in enumerate(eps)]
    return Artifact({"rows": rows}, ["n", "epsilon_n"], rows)


def _cmd_closedform(cfg):
    r = ap.closed_form_one_minus_z(_space(cfg), _degree(cfg))
    d = r.to_dict()
    d["epsilon_bounds"] = list(r.epsilon_bounds)
    return Artifact(d, ["k", "re", "im"],
                    [{"k": k, "re": a, "im": b} for k, (a, b) in enumerate(d["p_star"])])


def _cmd_cyclicity(cfg):
    v = ap.cyclicity_verdict(_space(cfg)).to_dict()
    rows = [{"N": n, "partial_sum": s} for n, s in zip(v["partial_sum_indices"], v["partial_sums"])]
    return Artifact(v, ["N", "partial_sum"], rows)


def _cmd_rates(cfg):
    rep = ap.rate_check(_space(cfg), parse_function_spec(cfg.function_spec), cfg.n_max)
    d = rep.to_dict()
    return Artifact(d, ["n", "epsilon_n", "phi_n", "product_eps2_phi", "wiener_norm_pf"], d["rows"])


def _cmd_lemmasum(cfg):
    f = parse_function_spec(cfg.function_spec)
    n_min = cfg.n_min if cfg.n_min is not None else f.degree + 1
    vals = ap.lemma_sum_check(_space(cfg), f, cfg.n_max, n_min)
    rows = [{"n": n_min + i, "scaled_sum": float(v)} for i, v in enumerate(vals)]
    return Artifact({"max": float(vals.max()) if vals.size else None, "rows": rows},
                    ["n", "scaled_sum"], rows)


def _cmd_enestrom(cfg):
    f = parse_function_spec(cfg.function_spec)
    ann = zr.enestrom_annulus(f)
    rs = zr.find_roots(f, seed=cfg.seed)
    inside = bool(np.all(ann.contains(rs.roots)))
    d = {"annulus": ann.to_dict(), "roots": rs.to_list(), "all_roots_inside": inside}
    return Artifact(d, ["re", "im", "multiplicity", "modulus"], _root_rows(rs),
                    0 if rs.converged else 3)


def _root_rows(rs):
    return [dict(r, modulus=math.hypot(r["re"], r["im"])) for r in rs.to_list()]


def _cmd_roots(cfg):
    rs = zr.find_roots(parse_function_spec(cfg.function_spec), seed=cfg.seed)
    d = {"roots": rs.to_list(), "residual_max": rs.residual_max, "converged": rs.converged,
         "sweeps": rs.sweeps}
    return Artifact(d, ["re", "im", "multiplicity", "modulus"], _root_rows(rs),
                    0 if rs.converged else 3)


def _cmd_regions(cfg):
    space = _space(cfg)
    ns = [cfg.n] if cfg.n is not None else list(range(1, cfg.n_max + 1))
    entries, rows, status = [], [], 0
    for n in ns:
        pr = zr.pstar_region(space, n)
        rr = zr.residual_zero_region(space, n)
        p_roots = zr.find_roots(ap.closed_form_one_minus_z(space, n).p_star, seed=cfg.seed)
        r_roots = zr.find_roots(zr.residual_polynomial(space, n), seed=cfg.seed)
        if not (p_roots.converged and r_roots.converged):
            status = 3
        entries.append({
            "n": n,
            "pstar_region": pr.to_dict(),
            "pstar_roots": p_roots.to_list(),
            "pstar_inside": bool(np.all(pr.contains(p_roots.roots))),
            "residual_region": rr.to_dict(),
            "residual_roots": r_roots.to_list(),
            "residual_inside": bool(np.all(rr.contains(r_roots.roots))),
        })
        for kind, ann, rs in (("pstar", pr, p_roots), ("residual", rr, r_roots)):
            for r in _root_rows(rs):
                rows.append({"n": n, "kind": kind, **r, "inner": ann.inner, "outer": ann.outer})
    return Artifact({"regions": entries},
                    ["n", "kind", "re", "im", "multiplicity", "modulus", "inner", "outer"], rows, status)


def _cmd_product(cfg):
    space = _space(cfg)
    f = parse_function_spec(cfg.function_spec)
    g = parse_function_spec(cfg.g_spec or "coeffs:[1]")
    rep = ap.product_experiment(space, f, g, cfg.n_max)
    d = rep.to_dict()
    return Artifact(d, ap.PRODUCT_COLUMNS, d["rows"])


def _cmd_rotate(cfg):
    lam = parse_complex(cfg.lam)
    rep = ap.rotation_experiment(_space(cfg), parse_function_spec(cfg.function_spec), lam, cfg.n_max)
    d = rep.to_dict()
    d["lambda"] = [lam.real, lam.imag]
    return Artifact(d, ["n", "epsilon_f", "epsilon_rotated"], d["rows"])


def _cmd_kernel(cfg):
    space = _space(cfg)
    lam = parse_complex(cfg.lam)
    xs = np.linspace(-cfg.radius, cfg.radius, cfg.grid)
    rows = []
    for y in xs:
        for x in xs:
            z = complex(x, y)
            if abs(z) >= 1 or abs(z) > cfg.radius * (1 + 1e-12):
                continue
            k = sp.kernel_value(space, lam, z)
            rows.append({"z_re": x, "z_im": y, "k_re": k.real, "k_im": k.imag})
    return Artifact({"lambda": [lam.real, lam.imag], "rows": rows},
                    ["z_re", "z_im", "k_re", "k_im"], rows)


_HANDLERS = {
    "approximant": _cmd_approximant, "norms": _cmd_norms, "closedform": _cmd_closedform,
    "cyclicity": _cmd_cyclicity, "rates": _cmd_rates, "lemmasum": _cmd_lemmasum,
    "enestrom": _cmd_enestrom, "roots": _cmd_roots, "regions": _cmd_regions,
    "product": _cmd_product, "rotate": _cmd_rotate, "kernel": _cmd_kernel,
}


def render(command: str, cfg: RunConfig, art: Artifact) -> str:
    fmt = cfg.output or ("csv" if command in TABULAR else "json")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(art.header)
        for row in art.rows:
            w.writerow([ap.format_number(row[h]) if not isinstance(row[h], str) else row[h]
                        for h in art.header])
        return buf.getvalue()
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "space": cfg.space_spec}
    doc.update({k: v for k, v in art.payload.items() if k != "schema_version"})
    return json.dumps(_clean(doc)) + "\n"


def run(command: str, cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, rendered artifact)."""
    if command not in _HANDLERS:
        raise ParseError(f"unknown command {command!r}")
    art = _HANDLERS[command](cfg)
    return art.status, render(command, cfg, art)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optapprox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--space", default="dirichlet:alpha=0",
                       help='"dirichlet:alpha=<real>" or "table:<path>[,tail=power]"')
        p.add_argument("--f", dest="function", default="factors:(1-z)",
                       help='"coeffs:[c0,c1,...]" or "factors:(1-z)(1+z)..."')
        p.add_argument("--g", default=None, help="second factor for the product command")
        p.add_argument("--n", type=int, default=None, help="single degree bound")
        p.add_argument("--n-max", type=int, default=10)
        p.add_argument("--n-min", type=int, default=None)
        p.add_argument("--lambda", dest="lam", default=None,
                       help="unimodular rotation (rotate) or kernel point (kernel)")
        p.add_argument("--grid", type=int, default=11)
        p.add_argument("--radius", type=float, default=0.9)
        p.add_argument("--output", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write to this path instead of stdout")
        p.add_argument("--seed", type=int, default=zr.DEFAULT_SEED)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        lam = args.lam if args.lam is not None else ("0.5" if args.command == "kernel" else "-1")
        cfg = RunConfig(
            space_spec=args.space, function_spec=args.function, n_max=args.n_max,
            output=args.output, out_path=args.out, seed=args.seed, n=args.n,
            n_min=args.n_min, g_spec=args.g, lam=lam, grid=args.grid, radius=args.radius,
        )
        status, text = run(args.command, cfg)
    except OptApproxError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    if cfg.out_path:
        Path(cfg.out_path).write_text(text)
    else:
        sys.stdout.write(text)
    if status:
        print("NO_CONVERGENCE: root iteration did not converge; best iterate written", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
