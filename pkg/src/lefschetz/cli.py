"""Command-line front end: ``lefschetz <command> [files] [options]``.

Exit codes: 0 success, 1 usage or input error, 2 the factorization is not a
Lefschetz fibration (monodromy nontrivial in the closed mapping class group).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import fibration as Fb
from . import hyperbolic as Hy
from . import teich
from . import words as W

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def bundled_fixtures() -> list[str]:
    return sorted(p.name for p in resources.files("lefschetz.data").iterdir() if p.name.endswith(".fib"))


def read_fibration(name: str) -> Fb.Fibration:
    """Read a fibration from a path, '-' (stdin), or a bundled fixture name."""
    if name == "-":
        text = sys.stdin.read()
    else:
        p = Path(name)
        if p.exists():
            text = p.read_text(encoding="utf-8")
        elif name in bundled_fixtures():
            text = resources.files("lefschetz.data").joinpath(name).read_text(encoding="utf-8")
        else:
            raise UsageError(f"no such file or bundled fixture: {name}")
    return Fb.parse_fibration(text)


def _section_rows(table: Fb.SectionTable) -> list[dict]:
    return [{"region": r.region_id, "u": W.format_word(r.obstruction), "section": r.has_section,
             "self_intersection": r.self_intersection, "second_arc_agrees": r.second_arc_agrees}
            for r in table.reports]


def _require_valid(f: Fb.Fibration) -> Fb.Validation:
    v = Fb.validate(f)
    if not v.trivial_closed:
        raise _Invalid(v)
    return v


class _Invalid(Exception):
    def __init__(self, v):
        self.validation = v


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> dict:
    f = read_fibration(args.file)
    v = Fb.validate(f)
    out = {"genus": f.genus, "n": f.n, "trivial": v.trivial_closed, "k": v.k_standard,
           "witness": None if v.witness is None else W.format_word(v.witness)}
    if not v.trivial_closed:
        raise _Invalid(out)
    return out


def _fill_data(f: Fb.Fibration) -> dict:
    if f.n == 0:
        return {"V": 0, "E": 0, "R": 1, "fills": False}
    arr = Hy.arrangement(list(f.cycles), f.genus)
    return {"V": arr.V, "E": arr.E, "R": arr.R, "fills": arr.fills}


def cmd_analyze(args) -> dict:
    f = read_fibration(args.file)
    v = _require_valid(f)
    e = Fb.euler_char(f)
    s = Fb.signature_meyer(f)
    table = Fb.enumerate_sections(f, samples=args.samples)
    return {"genus": f.genus, "n": f.n, "trivial": True, "k": v.k_standard,
            "e": e, "sigma": s, "sigma_plus_e": s + e, "b1": Fb.invariant_cohomology_rank(f),
            "fill": _fill_data(f), "split_scan": Fb.split_irreducibility_scan(f),
            "R": table.R, "half_bound": table.half_bound, "sections": _section_rows(table)}


def cmd_sections(args) -> dict:
    f = read_fibration(args.file)
    _require_valid(f)
    table = Fb.enumerate_sections(f, samples=args.samples)
    return {"genus": f.genus, "n": f.n, "R": table.R, "half_bound": table.half_bound,
            "sections": _section_rows(table)}


def cmd_fill(args) -> dict:
    f = read_fibration(args.file)
    out = {"genus": f.genus, "n": f.n, **_fill_data(f)}
    if args.dump and f.n:
        out["dump"] = Hy.arrangement(list(f.cycles), f.genus).dump()
    return out


def cmd_fibresum(args) -> str:
    fs = [read_fibration(p) for p in args.files]
    total = fs[0]
    for g in fs[1:]:
        total = Fb.fibre_sum(total, g)
    return Fb.format_fibration(total)


def cmd_hurwitz(args) -> str:
    f = read_fibration(args.file)
    rng = np.random.default_rng(args.seed)
    return Fb.format_fibration(Fb.random_hurwitz(f, args.depth, rng))


def cmd_split_scan(args) -> dict:
    f = read_fibration(args.file)
    _require_valid(f)
    return {"genus": f.genus, "n": f.n, "splits": Fb.split_irreducibility_scan(f)}


def cmd_length(args) -> dict:
    f = read_fibration(args.file)
    _require_valid(f)
    res = teich.length_invariant(f, args.depth, max_nodes=args.max_nodes, seed=args.seed,
                                 threads=args.threads)
    x = res.minimizer
    return {"value": res.best, "depth": args.depth, "orbit_visited": res.orbit_visited,
            "minimizer": None if x is None else {"lengths": list(x.lengths), "twists": list(x.twists)}}


def cmd_shear(args) -> dict:
    f = read_fibration(args.file)
    _require_valid(f)
    if f.n == 0:
        return {"genus": f.genus, "n": 0, "regions": [{"region": 0, "rotation": 0, "residual": 0.0}]}
    arr = Hy.arrangement(list(f.cycles), f.genus)
    table = Fb.enumerate_sections(f, samples=args.samples)
    cidx = Fb.curve_indices(f, arr)
    rows = []
    for rep in table.sections:
        reg = arr.regions[rep.region_id]
        est = Fb.region_rotation(f, arr, reg, args.samples)
        _, cr = Fb.transport_arc(arr, reg.faces[0])
        pins = Fb.region_pins(cr, cidx)
        signed = []
        for c in sorted(set(cidx)):
            i = cidx.index(c)
            cm = Hy.boundary_circle_map(f.twists()[i].aut, f.genus, args.samples, pins[i])
            signed.append(cm.is_one_signed())
        rows.append({"region": rep.region_id, "rotation": est.integer, "residual": est.residual,
                     "one_signed_lifts": all(signed)})
    if args.csv:
        cm = Hy.boundary_circle_map(f.twists()[args.twist].aut, f.genus, args.samples)
        Path(args.csv).write_text(cm.to_csv() + "\n", encoding="utf-8")
    return {"genus": f.genus, "n": f.n, "regions": rows}


# -- output -------------------------------------------------------------------


def _plain(d, indent: str = "") -> str:
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_plain(v, indent + "  "))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            cols = list(v[0])
            lines.append(f"{indent}{k}:")
            lines.append(indent + "  " + "  ".join(cols))
            for row in v:
                lines.append(indent + "  " + "  ".join(_fmt(row[c]) for c in cols))
        elif k == "dump":
            lines.append(v)
        else:
            lines.append(f"{indent}{k}: {_fmt(v)}")
    return "\n".join(lines)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(map(str, v)) if v else "none"
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=2)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="lefschetz", description="Analyze Lefschetz fibrations given as Dehn twist factorizations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, files="one"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if files == "one":
            sp.add_argument("file", nargs="?", default="-", help="path, bundled fixture name, or - for stdin")
        else:
            sp.add_argument("files", nargs="+")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check the monodromy is trivial; report k")
    add("analyze", cmd_analyze, "invariants, sections, filling and split scan")
    add("sections", cmd_sections, "section classes per complementary region")
    sp = add("fill", cmd_fill, "filling test via the geodesic arrangement")
    sp.add_argument("--dump", action="store_true", help="include the region listing")
    add("fibresum", cmd_fibresum, "concatenate factorizations", files="many")
    add("hurwitz", cmd_hurwitz, "apply --depth random Hurwitz moves")
    add("split-scan", cmd_split_scan, "contiguous splits into two trivial words")
    sp = add("length", cmd_length, "length invariant over a bounded Hurwitz orbit (genus 2)")
    sp.add_argument("--max-nodes", type=int, default=24)
    sp = add("shear", cmd_shear, "rotation numbers of lifted monodromies")
    sp.add_argument("--csv", help="write the circle map of one twist as CSV")
    sp.add_argument("--twist", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.samples < 100:
        print("lefschetz: error: --samples must be at least 100", file=sys.stderr)
        return EXIT_USAGE
    try:
        out = args.func(args)
    except _Invalid as e:
        v = e.validation
        if isinstance(v, dict):
            out = v
        else:
            out = {"trivial": False, "witness": None}
        print(json.dumps(out) if args.json else "not a Lefschetz fibration: monodromy is nontrivial\n"
              + _plain(out))
        return EXIT_INVALID
    except (UsageError, ValueError) as e:
        print(f"lefschetz: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(out, str):
        sys.stdout.write(out)
    elif args.json:
        print(json.dumps(out))
    else:
        print(_plain(out))
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
