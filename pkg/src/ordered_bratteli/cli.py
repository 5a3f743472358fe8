"""Command-line interface.

Inputs are JSON files.  Anywhere a file is expected, ``@fixture/key`` names a
value from a built-in fixture instead, e.g. ``@fig7/B`` or ``@fig7/z``.

Exit status is 0 on success or a passing verdict, 1 on a failing verdict and
2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import io
from .construction import (OdometerConjugacy, TwoOdometers, build_counterexample, check_factoring,
                           classify_decisiveness, rank2_reduce, unique_min_witness)
from .diagram import Kind, count_extreme_paths, telescope_periodic, validate_diagram
from .dot import render_dot
from .dynamics import (NaturalExtension, orbit_segment, truncation_itinerary, vershik_predecessor,
                       vershik_predecessor_infinite, vershik_step, vershik_step_infinite)
from .errors import BratteliError
from .fixtures import FIXTURES, load_fixture
from .generators import random_diagram
from .premorphism import (fiber_bound, induced_map_path, induced_map_prefix, preimage_paths,
                          preimage_prefixes, premorphisms_equivalent, validate_premorphism)
from .sadic import (check_commuting_rectangles, extract_morphism, premorphism_to_eta,
                    sliding_block_pipeline)


class InputError(Exception):
    pass


# ------------------------------------------------------------ loading

def _fixture_value(ref: str, group: str):
    name, _, key = ref[1:].partition("/")
    fx = load_fixture(name)
    table = getattr(fx, group)
    if not key:
        if not table:
            raise InputError(f"fixture {name!r} has no {group}")
        key = next(iter(table))
    if key not in table:
        raise InputError(f"fixture {name!r} has no {group[:-1]} {key!r}; choose from {sorted(table)}")
    return table[key]


def load_diagram(ref: str, validate: bool = True):
    return _fixture_value(ref, "diagrams") if ref.startswith("@") else io.load_diagram(ref, validate)


def load_premorphism(ref: str):
    return _fixture_value(ref, "premorphisms") if ref.startswith("@") else io.load_premorphism(ref)


def load_path(ref: str, d):
    return _fixture_value(ref, "paths") if ref.startswith("@") else io.load_path(ref, d)


def load_extension(ref: str | None, d, fixture: str | None = None):
    if ref is None:
        if fixture:
            # a fixture extension defined on the same diagram
            fx = load_fixture(fixture)
            for key, ext in fx.extensions.items():
                if fx.diagrams.get(key) == d:
                    return ext
        return None
    return _fixture_value(ref, "extensions") if ref.startswith("@") else io.load_extension(ref, d)


def load_prefix(text: str):
    """A prefix given inline as JSON, as a file, or as ``a:0,b:1``."""
    if Path(text).is_file():
        text = Path(text).read_text()
    text = text.strip()
    if not text:
        return ()
    if text.startswith("["):
        items = json.loads(text)
        if items and isinstance(items[0], list):
            return tuple((v, int(r)) for v, r in items)
        return io.prefix_from_json(items)
    out = []
    for part in text.split(","):
        v, _, r = part.strip().rpartition(":")
        out.append((v, int(r)))
    return tuple(out)


def _fmt_prefix(p) -> str:
    return " ".join(f"{v}:{r}" for v, r in p) or "(empty)"


# ------------------------------------------------------------ commands

def cmd_validate(a):
    report = validate_diagram(load_diagram(a.diagram, validate=False))
    return report.ok, {"ok": report.ok, "issues": [str(i) for i in report.issues]}, str(report)


def cmd_telescope(a):
    d = telescope_periodic(load_diagram(a.diagram), a.first, a.step)
    return True, d, json.dumps(io.diagram_to_json(d), indent=2)


def cmd_step(a):
    d = load_diagram(a.diagram)
    if a.path:
        x = load_path(a.path, d)
        ext = load_extension(a.ext, d, a.fixture)
        y = vershik_predecessor_infinite(d, x, ext) if a.inverse else vershik_step_infinite(d, x, ext)
        return True, y, str(y)
    p = load_prefix(a.prefix)
    q = vershik_predecessor(d, p) if a.inverse else vershik_step(d, p)
    if q is None:
        return True, {"result": None, "reason": "needs extension"}, "needs extension: every edge is extreme"
    return True, {"result": io.prefix_to_json(q)}, _fmt_prefix(q)


def cmd_orbit(a):
    d = load_diagram(a.diagram)
    x, ext = load_path(a.path, d), load_extension(a.ext, d, a.fixture)
    if a.depth is not None:
        rows = truncation_itinerary(d, x, a.depth, a.length, ext)
        return True, [io.prefix_to_json(p) for p in rows], "\n".join(map(_fmt_prefix, rows))
    rows = orbit_segment(d, x, a.length, ext)
    return True, rows, "\n".join(map(str, rows))


def cmd_maxpaths(a):
    d = load_diagram(a.diagram)
    mx, mn = count_extreme_paths(d, Kind.MAX), count_extreme_paths(d, Kind.MIN)
    text = [f"max paths: {mx.count}"] + [f"  {w}" for w in mx.witnesses]
    text += [f"min paths: {mn.count}"] + [f"  {w}" for w in mn.witnesses]
    return True, {"max": mx, "min": mn}, "\n".join(text)


def cmd_premorph_validate(a):
    f = io.load_premorphism(a.premorphism, validate=False) if not a.premorphism.startswith("@") \
        else load_premorphism(a.premorphism)
    report = validate_premorphism(f, a.depth)
    return report.ok, {"ok": report.ok, "issues": [str(i) for i in report.issues]}, str(report)


def cmd_apply(a):
    f = load_premorphism(a.premorphism)
    if a.path:
        y = induced_map_path(f, load_path(a.path, f.target))
        return True, y, str(y)
    q = induced_map_prefix(f, load_prefix(a.prefix), a.n)
    return True, {"result": io.prefix_to_json(q)}, _fmt_prefix(q)


def cmd_preimages(a):
    f = load_premorphism(a.premorphism)
    if a.path:
        xs = preimage_paths(f, load_path(a.path, f.source))
        return True, xs, "\n".join(map(str, xs))
    ps = preimage_prefixes(f, load_prefix(a.prefix))
    return True, [io.prefix_to_json(p) for p in ps], "\n".join(map(_fmt_prefix, ps))


def cmd_fiber_bound(a):
    f = load_premorphism(a.premorphism)
    ys = [load_path(a.path, f.source)] if a.path else list(count_extreme_paths(f.source, Kind.MAX).witnesses)
    rows = {str(y): fiber_bound(f, y) for y in ys}
    return True, rows, "\n".join(f"{k}: {v}" for k, v in rows.items())


def cmd_equivalent(a):
    f, g = load_premorphism(a.premorphism), load_premorphism(a.other)
    same = premorphisms_equivalent(f, g, a.depth)
    return same, {"equivalent": same}, "equivalent" if same else "not equivalent"


def cmd_construct(a):
    B = load_diagram(a.diagram)
    z, y = load_path(a.min, B), load_path(a.max, B)
    ext = load_extension(a.ext, B, a.fixture)
    if ext is None and unique_min_witness(B).unique:
        ext = NaturalExtension.unique_min(B)
    res = build_counterexample(B, z, y, ext)
    if a.out:
        out = Path(a.out)
        out.mkdir(parents=True, exist_ok=True)
        io.save(B, out / "source.json")
        io.save(res.b_prime, out / "target.json")
        (out / "premorphism.json").write_text(
            json.dumps(io.premorphism_to_json(res.premorphism, "source.json", "target.json"),
                       indent=2, sort_keys=True) + "\n")
        io.save(res.x, out / "x.json")
        io.save(res.tx, out / "tx.json")
        if ext is not None:
            io.save(ext, out / "ext_source.json")
            io.save(res.lifted_extension(ext), out / "ext_target.json")
    payload = {"target": res.b_prime, "premorphism": res.premorphism, "x": res.x, "tx": res.tx,
               "new_vertex": res.new_vertex}
    text = f"new vertex {res.new_vertex!r}\nx  = {res.x}\nTx = {res.tx}"
    if a.out:
        text += f"\nwritten to {a.out}"
    return True, payload, text


def cmd_classify(a):
    B = load_diagram(a.diagram)
    ext = load_extension(a.ext, B, a.fixture)
    c = classify_decisiveness(B, load_path(a.min, B), load_path(a.max, B), ext_B=ext)
    text = f"{c.verdict}" + (f" (case {c.case})" if c.case else "")
    return c.verdict != "NotDecisive", c, text


def cmd_rank2(a):
    B = load_diagram(a.diagram)
    r = rank2_reduce(B, load_extension(a.ext, B, a.fixture), a.window)
    if isinstance(r, TwoOdometers):
        return True, {"result": "TwoOdometers", "cuts": r.cuts, "components": r.components}, \
            f"TwoOdometers after {r.cuts}"
    assert isinstance(r, OdometerConjugacy)
    return True, {"result": "OdometerConjugacy", "cuts": r.cuts, "odometer": r.odometer,
                  "premorphism": r.premorphism}, f"OdometerConjugacy after {r.cuts}"


def cmd_check_factoring(a):
    f = load_premorphism(a.premorphism)
    r = check_factoring(f, a.depth, load_extension(a.ext_source, f.source, a.fixture),
                        load_extension(a.ext_target, f.target, a.fixture), a.budget)
    lines = [f"verdict: {r.verdict}"]
    for w in r.witnesses:
        lines.append(f"witness {w['path']} fails at level {w['level']}: "
                     f"expected {_fmt_prefix(w['expected_prefix'])}, got {_fmt_prefix(w['actual_prefix'])}")
    lines.append(f"prefix sweep: {r.sweep_checked} prefixes to depth {r.sweep_depth}, "
                 f"{len(r.sweep_failures)} failures")
    payload = {"verdict": r.verdict,
               "witnesses": [{"path": w["path"], "level": w["level"],
                              "expected_prefix": io.prefix_to_json(w["expected_prefix"]),
                              "actual_prefix": io.prefix_to_json(w["actual_prefix"]),
                              "max_path": w["max_path"]} for w in r.witnesses],
               "equiv_conditions": r.equiv_conditions,
               "sweep": {"depth": r.sweep_depth, "checked": r.sweep_checked, "failures": r.sweep_failures}}
    return r.passed, payload, "\n".join(lines)


def _morphism_json(m):
    return {"alphabet": list(m.domain_alphabet), "images": {k: list(v) for k, v in m.images.items()}}


def cmd_sadic_export(a):
    if a.premorphism:
        ms = premorphism_to_eta(load_premorphism(a.premorphism), a.depth)
    else:
        d = load_diagram(a.diagram)
        ms = [extract_morphism(d, i) for i in range(1, (a.depth or d.p + d.c) + 1)]
    payload = {"levels": [_morphism_json(m) for m in ms]}
    text = "\n".join(f"{i}: " + ", ".join(f"{k} -> {''.join(map(str, v))}" for k, v in m.images.items())
                     for i, m in enumerate(ms, start=0 if a.premorphism else 1))
    return True, payload, text


def cmd_rectangles(a):
    r = check_commuting_rectangles(load_premorphism(a.premorphism), a.depth)
    text = "all rectangles commute" if r.ok else "\n".join(
        f"level {x['level']} at {x['symbol']}: {x['left']} != {x['right']}" for x in r.failures)
    return r.ok, r, text


def cmd_pipeline(a):
    f = load_premorphism(a.premorphism)
    r = sliding_block_pipeline(f, a.index, a.word_len, load_extension(a.ext_source, f.source, a.fixture),
                               load_extension(a.ext_target, f.target, a.fixture))
    text = f"truncation rectangles: {'ok' if r.truncation_ok else 'FAIL'}\n" \
           f"shift equivariance: {'ok' if r.shift_ok else 'FAIL'}"
    if r.witness:
        w = r.witness
        text += f"\nwitness: orbit of {w['start']} at position {w['position']}: " \
                f"coded {w['coded']} vs itinerary {w['itinerary']}"
    return r.ok, r, text


def cmd_dot(a):
    obj = load_premorphism(a.premorphism) if a.premorphism else load_diagram(a.diagram)
    text = render_dot(obj, a.depth or 3)
    return True, {"dot": text}, text.rstrip("\n")


def cmd_fixtures(a):
    if a.action == "list":
        rows = {n: load_fixture(n).description for n in FIXTURES}
        return True, rows, "\n".join(f"{n}: {d}" for n, d in rows.items())
    if not a.out:
        raise InputError("fixtures export needs --out")
    out = Path(a.out)
    written = []
    for name in ([a.fixture] if a.fixture else list(FIXTURES)):
        fx = load_fixture(name)
        folder = out / name
        folder.mkdir(parents=True, exist_ok=True)
        for group in ("diagrams", "premorphisms", "paths", "extensions"):
            for key, value in getattr(fx, group).items():
                # diagrams and extensions share keys, so each group gets its own folder
                (folder / group).mkdir(exist_ok=True)
                target = folder / group / f"{key}.json"
                io.save(value, target)
                written.append(str(target))
    return True, written, "\n".join(written)


def cmd_random_diagram(a):
    d = random_diagram(random.Random(a.seed), max_vertices=a.max_vertices, max_cycle=a.max_cycle)
    return True, d, json.dumps(io.diagram_to_json(d), indent=2)


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--fixture", help="fixture name; fills in --diagram/--premorphism when omitted")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="bratteli", description="Ordered Bratteli diagrams and premorphisms.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, *args, help=None):
        s = sub.add_parser(name, parents=[common], help=help)
        s.set_defaults(func=func)
        for flags, kw in args:
            s.add_argument(*flags, **kw)
        return s

    diagram = (("--diagram",), {})
    prem = (("--premorphism",), {})
    path = (("--path",), {})
    prefix = (("--prefix",), {"default": ""})
    ext = (("--ext",), {})
    exts = [(("--ext-source",), {}), (("--ext-target",), {})]
    zy = [(("--min",), {"required": True}), (("--max",), {"required": True})]

    add("validate", cmd_validate, diagram, help="check a diagram")
    add("telescope", cmd_telescope, diagram, (("--first",), {"type": int, "default": 1}),
        (("--step",), {"type": int, "default": 1}), help="periodic telescoping")
    add("step", cmd_step, diagram, prefix, path, ext, (("--inverse",), {"action": "store_true"}),
        help="Vershik successor (or predecessor with --inverse)")
    add("orbit", cmd_orbit, diagram, path, ext, (("--length",), {"type": int, "default": 10}),
        help="forward orbit of a path")
    add("maxpaths", cmd_maxpaths, diagram, help="infinite max and min paths")
    add("premorph-validate", cmd_premorph_validate, prem, help="check a premorphism")
    add("apply", cmd_apply, prem, prefix, path, (("--n",), {"type": int}), help="induced map")
    add("preimages", cmd_preimages, prem, prefix, path, help="preimages under the induced map")
    add("fiber-bound", cmd_fiber_bound, prem, path, help="bound on preimage counts")
    add("equivalent", cmd_equivalent, prem, (("--other",), {"required": True}), help="premorphism equivalence")
    add("construct", cmd_construct, diagram, *zy, ext, help="extend a diagram to break factoring")
    add("classify-decisive", cmd_classify, diagram, *zy, ext, help="decisiveness of the construction")
    add("rank2-reduce", cmd_rank2, diagram, ext, (("--window",), {"type": int, "default": 3}),
        help="two odometers or an odometer conjugacy")
    add("check-factoring", cmd_check_factoring, prem, *exts, (("--budget",), {"type": int, "default": 50_000}),
        help="does the induced map commute with the extended Vershik maps")
    add("sadic-export", cmd_sadic_export, diagram, prem, help="level morphisms as JSON")
    add("rectangles", cmd_rectangles, prem, help="commuting rectangles of the morphism sequence")
    add("pipeline", cmd_pipeline, prem, *exts, (("--index",), {"type": int, "default": 1}),
        (("--word-len",), {"type": int, "default": 100}), help="factor codes on orbit words")
    add("dot", cmd_dot, diagram, prem, help="Graphviz rendering")
    add("fixtures", cmd_fixtures, (("action",), {"choices": ["list", "export"]}), help="built-in fixtures")
    add("random-diagram", cmd_random_diagram, (("--max-vertices",), {"type": int, "default": 3}),
        (("--max-cycle",), {"type": int, "default": 2}), help="random valid diagram")
    return p


def _fill_from_fixture(a):
    if not a.fixture:
        return
    if a.fixture not in FIXTURES:
        raise InputError(f"unknown fixture {a.fixture!r}; choose from {sorted(FIXTURES)}")
    fx = load_fixture(a.fixture)
    if hasattr(a, "diagram") and a.diagram is None and fx.diagrams and not getattr(a, "premorphism", None):
        a.diagram = f"@{a.fixture}"
    if hasattr(a, "premorphism") and a.premorphism is None and fx.premorphisms and \
            not (getattr(a, "diagram", None) and a.command in ("dot", "sadic-export")):
        a.premorphism = f"@{a.fixture}"


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.command == "check-factoring" and a.depth is None:
        a.depth = 8
    try:
        _fill_from_fixture(a)
        for name in ("diagram", "premorphism"):
            if hasattr(a, name) and getattr(a, name) is None and a.command not in ("dot", "sadic-export"):
                raise InputError(f"--{name} (or --fixture) is required")
        if a.command in ("dot", "sadic-export") and not (a.diagram or a.premorphism):
            raise InputError("--diagram or --premorphism (or --fixture) is required")
        ok, payload, text = a.func(a)
    except (InputError, BratteliError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    if a.json:
        print(io.dumps(payload))
    else:
        print(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
