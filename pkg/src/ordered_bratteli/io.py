"""JSON reading and writing for diagrams, paths, premorphisms and reports."""
from __future__ import annotations

import dataclasses
import json
from enum import Enum
from pathlib import Path

from .diagram import Edge, EventuallyPeriodicPath, Kind, Level, OrderedBratteliDiagram, validate_diagram
from .dynamics import NaturalExtension, resolve_extreme_tail
from .errors import BratteliError, ParseError, ValidationError
from .premorphism import OrderedEdgeSet, Premorphism, validate_premorphism


def _read(source) -> tuple:
    """Parse JSON from a path, a JSON string or an already-decoded object."""
    if isinstance(source, (dict, list)):
        return source, None
    path = Path(source) if not str(source).lstrip().startswith(("{", "[")) else None
    text = path.read_text() if path is not None else str(source)
    try:
        return json.loads(text), path
    except json.JSONDecodeError as exc:
        where = f"{path}: " if path else ""
        raise ParseError(f"{where}line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _get(obj, key, where, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise ParseError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return value


def _list(obj, key, where):
    return _get(obj, key, where, list)


# ------------------------------------------------------------ diagrams

def diagram_to_json(d: OrderedBratteliDiagram) -> dict:
    def lev(L):
        return {"vertices": list(L.vertices),
                "edges": [{"source": s, "range": v, "rank": r}
                          for v in L.vertices for r, s in enumerate(L.fibers[v])]}
    return {"preamble": [lev(L) for L in d.preamble], "cycle": [lev(L) for L in d.cycle]}


def _edges(items, where) -> list:
    if not isinstance(items, list):
        raise ParseError(f"{where}: expected a list of edges")
    out = []
    for j, e in enumerate(items):
        w = f"{where}[{j}]"
        out.append(Edge(_get(e, "source", w, str), _get(e, "range", w, str), _get(e, "rank", w, int)))
    return out


def diagram_from_json(obj, validate: bool = True, where: str = "diagram") -> OrderedBratteliDiagram:
    parts = {}
    for key in ("preamble", "cycle"):
        levels = []
        for i, L in enumerate(_list(obj, key, where)):
            w = f"{where}.{key}[{i}]"
            verts = _list(L, "vertices", w)
            if not all(isinstance(v, str) for v in verts):
                raise ParseError(f"{w}.vertices: vertex names must be strings")
            levels.append(Level(tuple(verts), tuple(_edges(_get(L, "edges", w), f"{w}.edges"))))
        parts[key] = tuple(levels)
    d = OrderedBratteliDiagram(parts["preamble"], parts["cycle"])
    if not validate:
        return d  # left raw so a later validation sees the ranks as written
    report = validate_diagram(d)
    if not report.ok:
        raise ValidationError(f"{where} is not a valid ordered diagram:\n{report}", report)
    # canonical edge order, so equal diagrams compare equal
    return OrderedBratteliDiagram(tuple(L.canonical() for L in d.preamble),
                                  tuple(L.canonical() for L in d.cycle))


def load_diagram(source, validate: bool = True) -> OrderedBratteliDiagram:
    obj, path = _read(source)
    return diagram_from_json(obj, validate, str(path) if path else "diagram")


# ------------------------------------------------------------ paths

def prefix_to_json(prefix) -> list:
    return [{"level": n, "range": v, "rank": r} for n, (v, r) in enumerate(prefix, start=1)]


def prefix_from_json(items, where: str = "prefix") -> tuple:
    if not isinstance(items, list):
        raise ParseError(f"{where}: expected a list of edges")
    out = []
    for j, e in enumerate(items):
        w = f"{where}[{j}]"
        if "level" in e and _get(e, "level", w, int) != j + 1:
            raise ParseError(f"{w}.level: expected {j + 1}, got {e['level']}")
        out.append((_get(e, "range", w, str), _get(e, "rank", w, int)))
    return tuple(out)


def path_to_json(x: EventuallyPeriodicPath) -> dict:
    return {"prefix": prefix_to_json(x.head),
            "tail": {"periodic": [{"range": v, "rank": r} for v, r in x.loop]}}


def path_from_json(obj, d: OrderedBratteliDiagram | None = None, where: str = "path") -> EventuallyPeriodicPath:
    """Decode a path; ``all_max``/``all_min`` tails need the diagram ``d``."""
    prefix = prefix_from_json(_get(obj, "prefix", where), f"{where}.prefix")
    tail = _get(obj, "tail", where)
    if tail in ("all_max", "all_min"):
        if d is None:
            raise ParseError(f"{where}.tail: {tail!r} needs a diagram to resolve")
        try:
            return resolve_extreme_tail(d, prefix, Kind.MAX if tail == "all_max" else Kind.MIN)
        except BratteliError as exc:
            raise ParseError(f"{where}.tail: {exc}") from None
    loop = prefix_from_json(_get(tail, "periodic", f"{where}.tail"), f"{where}.tail.periodic")
    if not loop:
        raise ParseError(f"{where}.tail.periodic: must not be empty")
    return EventuallyPeriodicPath(prefix, loop)


def load_path(source, d: OrderedBratteliDiagram | None = None) -> EventuallyPeriodicPath:
    obj, path = _read(source)
    return path_from_json(obj, d, str(path) if path else "path")


# ------------------------------------------------------------ premorphisms

def _edge_set_to_json(F: OrderedEdgeSet) -> list:
    return [{"source": s, "range": w, "rank": r} for w in F.codomain for r, s in enumerate(F.fibers[w])]


def premorphism_to_json(f: Premorphism, source_ref=None, target_ref=None) -> dict:
    """Encode ``f``; diagrams are inlined unless a file reference is given."""
    return {"source": source_ref if source_ref is not None else diagram_to_json(f.source),
            "target": target_ref if target_ref is not None else diagram_to_json(f.target),
            "level_map": {"preamble": list(f.level_preamble), "step": f.level_step},
            "layers": {"preamble": [_edge_set_to_json(F) for F in f.layer_preamble],
                       "cycle": [_edge_set_to_json(F) for F in f.layer_cycle]}}


def _diagram_ref(ref, base: Path | None, where: str) -> OrderedBratteliDiagram:
    if isinstance(ref, str):
        path = Path(ref)
        if not path.is_absolute() and base is not None:
            path = base / path
        try:
            return load_diagram(path)
        except OSError as exc:
            raise ParseError(f"{where}: cannot read {path}: {exc.strerror}") from None
    return diagram_from_json(ref, where=where)


def premorphism_from_json(obj, base: Path | None = None, validate: bool = True,
                          where: str = "premorphism") -> Premorphism:
    B = _diagram_ref(_get(obj, "source", where), base, f"{where}.source")
    C = _diagram_ref(_get(obj, "target", where), base, f"{where}.target")
    lm = _get(obj, "level_map", where, dict)
    level_pre = _list(lm, "preamble", f"{where}.level_map")
    if not all(isinstance(a, int) and not isinstance(a, bool) for a in level_pre):
        raise ParseError(f"{where}.level_map.preamble: expected integers")
    if not level_pre:
        raise ParseError(f"{where}.level_map.preamble: must start with 0")
    step = _get(lm, "step", f"{where}.level_map", int)
    shell = Premorphism(B, C, tuple(level_pre), step, (), ())
    layers = _get(obj, "layers", where, dict)
    pre, cyc = _list(layers, "preamble", f"{where}.layers"), _list(layers, "cycle", f"{where}.layers")
    built = []
    for n, items in enumerate(pre + cyc):
        w = f"{where}.layers.{'preamble' if n < len(pre) else 'cycle'}[{n if n < len(pre) else n - len(pre)}]"
        edges = _edges(items, w)
        try:
            dom, cod = B.vertices(n), C.vertices(shell.level(n))
        except BratteliError as exc:
            raise ParseError(f"{w}: {exc}") from None
        fibers = {}
        for e in sorted(edges, key=lambda e: (e.range, e.rank)):
            fibers.setdefault(e.range, []).append(e)
        for v, es in fibers.items():
            if [e.rank for e in es] != list(range(len(es))):
                raise ValidationError(f"{w}: ranks of the fiber at {v!r} are not 0..{len(es) - 1}")
        built.append(OrderedEdgeSet(dom, cod, {v: tuple(e.source for e in es) for v, es in fibers.items()}))
    f = Premorphism(B, C, tuple(level_pre), step, tuple(built[:len(pre)]), tuple(built[len(pre):]))
    if validate:
        report = validate_premorphism(f)
        if not report.ok:
            raise ValidationError(f"{where} is not an ordered premorphism:\n{report}", report)
    return f


def load_premorphism(source, validate: bool = True) -> Premorphism:
    obj, path = _read(source)
    return premorphism_from_json(obj, path.parent if path else None, validate,
                                 str(path) if path else "premorphism")


# ------------------------------------------------------------ extensions

def extension_to_json(ext: NaturalExtension) -> dict:
    return {"assignment": [{"max": path_to_json(x), "min": path_to_json(y)}
                           for x, y in sorted(ext.assignment.items(), key=lambda kv: str(kv[0]))]}


def extension_from_json(obj, d: OrderedBratteliDiagram | None = None, where: str = "extension") -> NaturalExtension:
    pairs = {}
    for i, item in enumerate(_list(obj, "assignment", where)):
        w = f"{where}.assignment[{i}]"
        pairs[path_from_json(_get(item, "max", w), d, f"{w}.max")] = path_from_json(_get(item, "min", w), d, f"{w}.min")
    ext = NaturalExtension(pairs)
    if d is not None and ext.problems(d):
        raise ValidationError(f"{where}: " + "; ".join(ext.problems(d)))
    return ext


def load_extension(source, d: OrderedBratteliDiagram | None = None) -> NaturalExtension:
    obj, path = _read(source)
    return extension_from_json(obj, d, str(path) if path else "extension")


# ------------------------------------------------------------ generic

def to_jsonable(value):
    """Best-effort conversion of library results to plain JSON values."""
    if isinstance(value, EventuallyPeriodicPath):
        return path_to_json(value)
    if isinstance(value, OrderedBratteliDiagram):
        return diagram_to_json(value)
    if isinstance(value, Premorphism):
        return premorphism_to_json(value)
    if isinstance(value, NaturalExtension):
        return extension_to_json(value)
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "_asdict"):
        return {k: to_jsonable(v) for k, v in value._asdict().items()}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not f.name.startswith("_")}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in value]
        return sorted(items, key=json.dumps) if isinstance(value, (set, frozenset)) else items
    if hasattr(value, "item"):  # numpy scalars
        return value.item()
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def dumps(value) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True)


def save(value, path) -> None:
    Path(path).write_text(dumps(value) + "\n")


__all__ = [
    "diagram_to_json", "diagram_from_json", "load_diagram", "prefix_to_json", "prefix_from_json",
    "path_to_json", "path_from_json", "load_path", "premorphism_to_json", "premorphism_from_json",
    "load_premorphism", "extension_to_json", "extension_from_json", "load_extension",
    "to_jsonable", "dumps", "save",
]
