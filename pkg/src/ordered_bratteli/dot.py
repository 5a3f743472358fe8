"""Graphviz DOT text for diagrams and premorphisms.

Output is deterministic: nodes and edges follow level order, then vertex
order, then rank.
"""
from __future__ import annotations

from .diagram import OrderedBratteliDiagram
from .premorphism import Premorphism


def _quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node(tag: str, n: int, v: str) -> str:
    return _quote(f"{tag}{n}:{v}")


def _diagram_lines(d: OrderedBratteliDiagram, depth: int, tag: str) -> list:
    lines = []
    for n in range(depth + 1):
        nodes = " ".join(f"{_node(tag, n, v)} [label={_quote(v)}];" for v in d.vertices(n))
        lines.append(f"  {{ rank=same; {nodes} }}")
    for n in range(1, depth + 1):
        for v in d.vertices(n):
            for r, u in enumerate(d.fiber(n, v)):
                lines.append(f"  {_node(tag, n - 1, u)} -> {_node(tag, n, v)} [label=\"{r}\"];")
    return lines


def render_dot(obj, depth: int) -> str:
    """DOT source drawing levels ``0..depth`` top to bottom.

    For a premorphism both diagrams are drawn side by side (the target down
    to level ``f_depth``) and the layers ``F_0 .. F_depth`` appear as dashed
    arrows from source vertices to target vertices.
    """
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    out = ["digraph bratteli {", "  rankdir=TB;", "  node [shape=circle];"]
    if isinstance(obj, Premorphism):
        f = obj
        for tag, d, k in (("B", f.source, depth), ("C", f.target, f.level(depth))):
            out.append(f"  subgraph cluster_{tag} {{")
            out.append(f"  label={_quote(tag)};")
            out.extend(_diagram_lines(d, k, tag))
            out.append("  }")
        for n in range(depth + 1):
            F = f.layer(n)
            for w in F.codomain:
                for r, v in enumerate(F.fibers[w]):
                    out.append(f"  {_node('B', n, v)} -> {_node('C', f.level(n), w)} "
                               f"[style=dashed, constraint=false, label=\"{r}\"];")
    else:
        out.extend(_diagram_lines(obj, depth, ""))
    out.append("}")
    return "\n".join(out) + "\n"
