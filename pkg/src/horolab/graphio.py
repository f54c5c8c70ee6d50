"""Reading and writing finite graphs: DOT, GraphML, adjacency CSV."""

from __future__ import annotations

import csv
import io

from .spaces import CustomAction


def _dot_id(s) -> str:
    s = str(s).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def to_dot(g, name: str = "G", vertex_attrs=None) -> str:
    """Undirected DOT text; vertices are written by label, in ball order.

    ``vertex_attrs`` maps a label to a dict of extra attributes.
    """
    vertex_attrs = vertex_attrs or {}
    out = [f"graph {_dot_id(name)} {{"]
    for lab in g.labels:
        attrs = vertex_attrs.get(lab)
        if attrs:
            body = ", ".join(f"{k}={_dot_id(v)}" for k, v in sorted(attrs.items()))
            out.append(f"  {_dot_id(lab)} [{body}];")
        else:
            out.append(f"  {_dot_id(lab)};")
    for i, j in g.edge_array.tolist():
        out.append(f"  {_dot_id(g.labels[i])} -- {_dot_id(g.labels[j])};")
    out.append("}")
    return "\n".join(out) + "\n"


def write_dot(g, path, name: str = "G", vertex_attrs=None):
    with open(path, "w") as fh:
        fh.write(to_dot(g, name, vertex_attrs))


def to_networkx(g):
    import networkx as nx

    G = nx.Graph()
    lv = g.base_row
    for i, lab in enumerate(g.labels):
        G.add_node(lab, level=int(lv[i]))
    G.add_edges_from((g.labels[i], g.labels[j]) for i, j in g.edge_array.tolist())
    return G


def to_graphml(g) -> str:
    import networkx as nx

    buf = io.BytesIO()
    nx.write_graphml(to_networkx(g), buf)
    return buf.getvalue().decode()


def write_graphml(g, path):
    with open(path, "w") as fh:
        fh.write(to_graphml(g))


def to_adjacency_csv(g) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v"])
    for i, j in g.edge_array.tolist():
        w.writerow([g.labels[i], g.labels[j]])
    return buf.getvalue()


def write_adjacency_csv(g, path):
    with open(path, "w", newline="") as fh:
        fh.write(to_adjacency_csv(g))


def read_adjacency_csv(path, automorphisms=None, basepoint=None) -> CustomAction:
    return CustomAction.from_csv(path, automorphisms, basepoint)
