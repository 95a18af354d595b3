"""Document format, command line and reports.

Complexes are stored as JSON documents::

    {"format": "weightlab/1", "ring": "Z", "name": "X2",
     "ranks": [[0, 1], [1, 1]],
     "differentials": [[0, [[2]]]]}

An optional ``"levels"`` entry ``[[degree, [level, ...]], ...]`` turns the
document into a filtered complex (filtration level of each basis vector).
Wherever a path is expected, ``@NAME`` selects a built-in fixture
(``@Z0``, ``@X2``, ``@X4``, ``@XI``).
"""

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import complexes
from .complexes import Complex
from .exact_linalg import FpAbGroup, parse_ring

FORMAT = "weightlab/1"
FIXTURES = {"Z0": complexes.Z0, "X2": complexes.X2, "X4": complexes.X4, "XI": complexes.XI}


class ParseError(ValueError):
    """Malformed document; the message names the location."""


class ValidationError(ValueError):
    """Well-formed document describing an invalid object."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class UsageError(Exception):
    pass


def ring_tag(p):
    return "Z" if p == 0 else f"Fp:{p}"


# ---------------------------------------------------------------------------
# documents


def emit_complex(X, name=None, levels=None):
    """The JSON-ready document of ``X``."""
    doc = {"format": FORMAT, "ring": ring_tag(X.p)}
    if name or X.name:
        doc["name"] = name or X.name
    doc["ranks"] = [[i, X.rank(i)] for i in X.degrees]
    doc["differentials"] = [[i, X.d(i)] for i in X.degrees if X.rank(i + 1) and any(any(r) for r in X.d(i))]
    if levels is not None:
        doc["levels"] = [[i, list(lv)] for i, lv in sorted(levels.items())]
    return doc


def dumps_complex(X, name=None, levels=None):
    return json.dumps(emit_complex(X, name, levels), sort_keys=True, indent=1)


def _load(source):
    if isinstance(source, dict):
        return source
    text = source
    if isinstance(source, (str, os.PathLike)) and not str(source).lstrip().startswith("{"):
        with open(source) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None


def _int(v, where):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: expected an integer, got {v!r}")
    return v


def _pairs(doc, key):
    got = doc.get(key, [])
    if not isinstance(got, list):
        raise ParseError(f"{key}: expected a list")
    for n, item in enumerate(got):
        if not (isinstance(item, list) and len(item) == 2):
            raise ParseError(f"{key}[{n}]: expected [degree, value]")
        yield n, _int(item[0], f"{key}[{n}][0]"), item[1]


def parse_document(source, ring=None):
    """``(Complex, levels or None)`` from a document, path, JSON text or ``@NAME``."""
    if isinstance(source, str) and source.startswith("@"):
        name = source[1:]
        if name not in FIXTURES:
            raise ParseError(f"unknown fixture {source!r}")
        return FIXTURES[name](ring or 0), None
    doc = _load(source)
    if not isinstance(doc, dict):
        raise ParseError("document: expected a JSON object")
    if doc.get("format", FORMAT) != FORMAT:
        raise ParseError(f"format: expected {FORMAT!r}, got {doc.get('format')!r}")
    try:
        p = parse_ring(doc.get("ring", "Z"))
    except ValueError as e:
        raise ParseError(f"ring: {e}") from None
    if ring is not None and ring != p:
        if p != 0:
            raise ValidationError(f"document is over {ring_tag(p)}, requested {ring_tag(ring)}")
        p = ring
    ranks = {}
    for n, deg, r in _pairs(doc, "ranks"):
        r = _int(r, f"ranks[{n}][1]")
        if r < 0:
            raise ParseError(f"ranks[{n}][1]: rank must be non-negative")
        ranks[deg] = r
    diffs = {}
    for n, deg, rows in _pairs(doc, "differentials"):
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError(f"differentials[{n}][1]: expected a list of rows")
        m, k = ranks.get(deg + 1, 0), ranks.get(deg, 0)
        if len(rows) != m or any(len(r) != k for r in rows):
            raise ParseError(f"differentials[{n}][1]: expected shape {m}x{k} for degree {deg}")
        diffs[deg] = [[_int(x, f"differentials[{n}][1]") % p if p else x for x in r] for r in rows]
    X = Complex({i: r for i, r in ranks.items() if r}, {i: d for i, d in diffs.items() if d and d[0]},
                p, check=False, name=doc.get("name"))
    bad = _failing_square(X)
    if bad is not None:
        raise ValidationError(f"d o d is not zero at degree {bad}", bad)
    levels = None
    if "levels" in doc:
        levels = {}
        for n, deg, lv in _pairs(doc, "levels"):
            if not isinstance(lv, list) or len(lv) != X.rank(deg):
                raise ParseError(f"levels[{n}][1]: expected {X.rank(deg)} levels for degree {deg}")
            levels[deg] = [_int(x, f"levels[{n}][1]") for x in lv]
    return X, levels


def parse_complex(source, ring=None):
    """A validated :class:`Complex` from a document, path or JSON text."""
    return parse_document(source, ring)[0]


def _failing_square(X):
    from .exact_linalg import _mul
    for i in X.degrees:
        if X.rank(i + 1) and X.rank(i + 2):
            dd = _mul(X.d(i + 1), X.d(i), X.p)
            if any(any(r) for r in dd):
                return i
    return None


# ---------------------------------------------------------------------------
# reports


def group_text(g):
    return str(g)


def group_json(g):
    return g.to_json() if isinstance(g, FpAbGroup) else g


@dataclass
class RunReport:
    command: list
    verdicts: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    pages: list = field(default_factory=list)       # (label, r, {(p, q): group})
    complexes: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self):
        return all(self.verdicts.values())

    def to_json(self):
        # timing is left out so that reports are byte-identical across runs
        return {
            "format": FORMAT,
            "command": self.command,
            "ok": self.ok,
            "verdicts": dict(sorted(self.verdicts.items())),
            "tables": {k: _jsonable(v) for k, v in sorted(self.tables.items())},
            "pages": [{"sequence": lab, "r": r,
                       "entries": [[x[0], x[1], group_json(g)] for x, g in sorted(t.items())]}
                      for lab, r, t in self.pages],
            "complexes": {k: emit_complex(X) for k, X in sorted(self.complexes.items())},
            "notes": self.notes,
        }

    def to_text(self):
        out = io.StringIO()
        out.write("$ weightlab " + " ".join(self.command) + "\n")
        for k, v in sorted(self.tables.items()):
            out.write(f"{k}: {_text(v)}\n")
        for lab, r, t in self.pages:
            out.write(f"{lab} E_{r}:")
            if not t:
                out.write(" 0\n")
            else:
                out.write("\n")
                for x, g in sorted(t.items()):
                    out.write(f"  ({x[0]}, {x[1]}): {g}\n")
        for k, X in sorted(self.complexes.items()):
            out.write(f"{k}: {X!r}\n")
        for n in self.notes:
            out.write(n + "\n")
        for k, v in sorted(self.verdicts.items()):
            out.write(f"{'PASS' if v else 'FAIL'} {k}\n")
        out.write(f"time {self.seconds:.2f}s\n")
        return out.getvalue()

    def to_csv(self):
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        if self.pages:
            w.writerow(["sequence", "r", "p", "q", "invariant_factors"])
            for lab, r, t in self.pages:
                for x, g in sorted(t.items()):
                    w.writerow([lab, r, x[0], x[1], " ".join(str(f) for f in g.to_json())])
        else:
            w.writerow(["check", "ok"])
            for k, v in sorted(self.verdicts.items()):
                w.writerow([k, int(v)])
        return out.getvalue()


def _jsonable(v):
    if isinstance(v, FpAbGroup):
        return v.to_json()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _text(v):
    if isinstance(v, dict):
        return ", ".join(f"{k}={_text(x)}" for k, x in sorted(v.items(), key=lambda kv: str(kv[0])))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text(x) for x in v) + "]"
    return str(v)


def render_pages(report, path):
    """Heatmaps of the pages in ``report``: one panel per page, cells coloured by size."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not report.pages:
        return None
    pts = [x for _, _, t in report.pages for x in t] or [(0, 0)]
    p0, p1 = min(x[0] for x in pts), max(x[0] for x in pts)
    q0, q1 = min(x[1] for x in pts), max(x[1] for x in pts)
    n = len(report.pages)
    fig, axes = plt.subplots(1, n, figsize=(2.6 * n + 1, 2.8), squeeze=False)
    for ax, (lab, r, t) in zip(axes[0], report.pages):
        grid = [[0.0] * (p1 - p0 + 1) for _ in range(q1 - q0 + 1)]
        for (a, b), g in t.items():
            grid[b - q0][a - p0] = _size(g)
            ax.text(a - p0, b - q0, str(g), ha="center", va="center", fontsize=7)
        ax.imshow(grid, origin="lower", cmap="Blues", vmin=0, vmax=max(3.0, max(map(max, grid))))
        ax.set_xticks(range(p1 - p0 + 1), [str(a) for a in range(p0, p1 + 1)])
        ax.set_yticks(range(q1 - q0 + 1), [str(b) for b in range(q0, q1 + 1)])
        ax.set_xlabel("p")
        ax.set_ylabel("q")
        ax.set_title(f"{lab} E_{r}")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def _size(g):
    import math
    s = 2.0 * g.free_rank
    for f in g.factors:
        if f:
            s += math.log2(f)
    if g.p:
        s += len(g.factors) * math.log2(g.p)
    return s


# ---------------------------------------------------------------------------
# commands


def _page_table(pg):
    return dict(pg.groups)


def cmd_truncate(args, rep):
    from .orthogonal import t_truncate
    from .weight_core import weight_truncate
    X = _input(args)
    k = _need(args.k, "--k")
    sides = [args.side] if args.side else ["le", "ge"]
    for side in sides:
        if args.kind in ("weight", "both"):
            rep.complexes[f"w_{side}{k}"] = weight_truncate(X, k, side)[0]
        if args.kind in ("t", "both"):
            T, _ = t_truncate(X, k, side)
            rep.complexes[f"t_{side}{k}"] = T
            rep.tables[f"homology t_{side}{k}"] = {i: T.homology(i) for i in T.degrees}


def cmd_tower(args, rep):
    from .weight_core import weight_postnikov_tower
    X = _input(args)
    T = weight_postnikov_tower(X)
    for i, F in sorted(T.factors.items()):
        rep.complexes[f"X_{i}"] = F
    WC = T.weight_complex()
    rep.complexes["weight_complex"] = WC
    rep.verdicts["weight complex recovers X"] = WC == X


def cmd_wss(args, rep):
    from .spectral import weight_spectral_sequence
    from .virtual_trunc import FunctorHandle
    X, Y = _input(args), _rep(args)
    pages, checks = weight_spectral_sequence(FunctorHandle(Y), X, args.r)
    for pg in pages:
        rep.pages.append(("T", pg.r, _page_table(pg)))
    rep.verdicts["d o d = 0"] = checks.dd_zero
    rep.verdicts["pages linked"] = checks.linked


def cmd_tss(args, rep):
    from .orthogonal import t_spectral_sequence
    X, Y = _input(args), _rep(args)
    pages, checks = t_spectral_sequence(X, Y, args.r)
    for pg in pages:
        rep.pages.append(("S", pg.r, _page_table(pg)))
    rep.verdicts["d o d = 0"] = checks.dd_zero
    rep.verdicts["pages linked"] = checks.linked


def cmd_compare(args, rep):
    from .orthogonal import compare_T_S
    X, Y = _input(args), _rep(args)
    res = compare_T_S(X, Y, args.r)
    rep.verdicts["pages equal"] = res.pages_equal
    rep.verdicts["differentials agree"] = res.maps_agree
    rep.verdicts["D_2 terms equal"] = res.d_groups_equal
    rep.verdicts["filtration equal"] = res.filtration_equal
    rep.tables["failures"] = [list(map(str, f)) for f in res.failures]
    words = "pages equal" if res.pages_equal else "pages differ"
    fil = "filtration equal" if res.filtration_equal else "filtration differs"
    rep.notes.append(f"{words} r=2..{res.r_max}, {fil}")


def cmd_virtual(args, rep):
    from .virtual_trunc import FunctorHandle, virtual_les, virtual_truncation
    X, Y = _input(args), _rep(args)
    H = FunctorHandle(Y)
    k = _need(args.k, "--k")
    kind = args.kind_v
    T = virtual_truncation(H, kind, k, j=args.l or 1, m=args.m)
    rep.tables["H(X)"] = H(X)
    rep.tables[f"{kind}(X)"] = T(X)
    les = virtual_les(H, k, X)
    rep.tables["les"] = [[lab, s, g] for lab, s, g in les.nodes]
    rep.verdicts["long exact sequence exact"] = les.exact


def cmd_check_axioms(args, rep):
    import random
    from .generators import random_complex
    from .weight_core import W, check_weight_axioms
    if args.inputs:
        samples = [parse_complex(path, args.ring) for path in args.inputs]
    else:
        rng = random.Random(args.seed)
        samples = [random_complex(rng, args.ring or 0) for _ in range(args.samples)]
    res = check_weight_axioms(W.shifted(args.m or 0), samples)
    rep.tables["checked"] = res.checked
    rep.tables["failures"] = [str(f[0]) for f in res.failures]
    rep.verdicts["weight axioms"] = res.ok


def cmd_oracle(args, rep):
    from .spectral import FilteredComplex, compare_with_oracle, filtered_pages, hom_filtration
    from .virtual_trunc import FunctorHandle
    if not args.inputs:
        raise UsageError("oracle needs a filtered complex document")
    X, levels = parse_document(args.inputs[0], args.ring)
    F = FilteredComplex(X, levels) if levels is not None else FilteredComplex.stupid(X)
    Y = _rep(args)
    res = compare_with_oracle(FunctorHandle(Y), F, args.r)
    for pg in filtered_pages(hom_filtration(F, Y), res.r_max)[1:]:
        rep.pages.append(("oracle", pg.r, _page_table(pg)))
    rep.tables["mismatched pages"] = res.mismatches
    rep.verdicts["tower agrees with filtered complex"] = res.ok


def cmd_selftest(args, rep):
    from .suites import SMALL, SUITES
    for name in sorted(SUITES):
        res = SUITES[name](seed=args.seed, **SMALL[name])
        rep.verdicts[name] = res.ok
        rep.tables[name] = {"samples": res.samples, "failures": len(res.failures)}


COMMANDS = {
    "truncate": cmd_truncate,
    "tower": cmd_tower,
    "wss": cmd_wss,
    "tss": cmd_tss,
    "compare": cmd_compare,
    "virtual": cmd_virtual,
    "check-axioms": cmd_check_axioms,
    "oracle": cmd_oracle,
    "selftest": cmd_selftest,
}


def _need(v, flag):
    if v is None:
        raise UsageError(f"{flag} is required")
    return v


def _input(args):
    if not args.inputs:
        raise UsageError("an input complex is required")
    return parse_complex(args.inputs[0], args.ring)


def _rep(args):
    return parse_complex(_need(args.rep, "--rep"), args.ring)


def _ring_arg(text):
    try:
        return parse_ring(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser():
    ap = argparse.ArgumentParser(prog="weightlab", description="Weight structures and spectral sequences in K^b.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("inputs", nargs="*", help="complex documents (paths or @FIXTURE)")
    ap.add_argument("--ring", type=_ring_arg, default=None, help="Z or Fp:<p>")
    ap.add_argument("--k", type=int)
    ap.add_argument("--l", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--r", type=int)
    ap.add_argument("--rep", help="complex Y representing H = Hom(-, Y)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--side", choices=["le", "ge"])
    ap.add_argument("--kind", choices=["weight", "t", "both"], default="both")
    ap.add_argument("--truncation", dest="kind_v", default="H1",
                    choices=["H1", "H2", "tau_le", "tau_ge", "tau_eq", "tau_window"])
    ap.add_argument("--format", choices=["text", "json", "csv"], default="text")
    ap.add_argument("--out")
    return ap


def run_command(argv):
    """Run one command; returns ``(exit_code, RunReport or None, rendered text)``."""
    ap = build_parser()
    args = ap.parse_intermixed_args(argv)
    rep = RunReport(list(argv))
    t = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"weightlab: error: {e}", file=sys.stderr)
        return 2, None, ""
    except (ParseError, ValidationError, OSError) as e:
        rep.verdicts["input"] = False
        rep.notes.append(f"error: {e}")
    rep.seconds = time.perf_counter() - t
    if args.format == "json":
        text = json.dumps(rep.to_json(), sort_keys=True, indent=1) + "\n"
    elif args.format == "csv":
        text = rep.to_csv()
    else:
        text = rep.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if rep.pages:
            render_pages(rep, os.path.splitext(args.out)[0] + ".pages.png")
    return (0 if rep.ok else 1), rep, text


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        code, _, text = run_command(argv)
    except SystemExit as e:
        return e.code
    if text and not _wrote(argv):
        sys.stdout.write(text)
    return code


def _wrote(argv):
    return "--out" in argv or any(a.startswith("--out=") for a in argv)
