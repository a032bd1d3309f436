"""Catalog builders and the JSON catalog file format.

A catalog is a finite list of structures over one signature, in a fixed
order.  That order is the canonical object order used by every search in
the engine ("first witness", "first counterexample", and so on).
"""

from __future__ import annotations

import json

from .errors import WorkbenchError
from .structures import Signature, Structure, canonical_key

LO_SIGNATURE = Signature(relations=(("lt", 2),))
GRAPH_SIGNATURE = Signature(relations=(("edge", 2),))


def linear_order(n: int, name: str | None = None) -> Structure:
    """The n-element chain 0 < 1 < ... < n-1."""
    table = {(i, j) for i in range(n) for j in range(n) if i < j}
    return Structure.make(LO_SIGNATURE, n, {"lt": table}, name=name or f"LO{n}")


def lo_catalog(max_n: int, min_n: int = 1) -> list[Structure]:
    return [linear_order(n) for n in range(min_n, max_n + 1)]


def graph(n: int, edges, name: str | None = None) -> Structure:
    """Simple undirected graph; each edge is stored in both directions."""
    table = set()
    for u, v in edges:
        if u == v:
            raise WorkbenchError("loops are not allowed")
        table.add((u, v))
        table.add((v, u))
    return Structure.make(GRAPH_SIGNATURE, n, {"edge": table}, name=name)


def path_graph(n: int, name: str | None = None) -> Structure:
    return graph(n, [(i, i + 1) for i in range(n - 1)], name=name or f"P{n}")


def complete_graph(n: int, name: str | None = None) -> Structure:
    return graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)],
                 name=name or f"K{n}")


def empty_graph(n: int, name: str | None = None) -> Structure:
    return graph(n, [], name=name or f"E{n}")


def cycle_graph(n: int, name: str | None = None) -> Structure:
    if n < 3:
        raise WorkbenchError("cycles need at least 3 vertices")
    return graph(n, [(i, (i + 1) % n) for i in range(n)], name=name or f"C{n}")


def all_graphs(n: int) -> list[Structure]:
    """One representative per isomorphism class of simple graphs on n vertices.

    Sorted by canonical key, so sparser graphs come first.
    """
    import itertools

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen: dict[tuple, Structure] = {}
    for mask in range(2 ** len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        g = graph(n, edges)
        key = canonical_key(g)
        if key not in seen:
            seen[key] = g
    ordered = sorted(seen.items(), key=lambda kv: kv[0])
    return [
        graph(n, _undirected_pairs(g), name=f"G{n}_{i}")
        for i, (_, g) in enumerate(ordered)
    ]


def _undirected_pairs(g: Structure):
    return sorted({(min(u, v), max(u, v)) for u, v in g.rel("edge")})


def graph_catalog(max_n: int, min_n: int = 1) -> list[Structure]:
    """All isomorphism types of simple graphs with min_n..max_n vertices."""
    out: list[Structure] = []
    for n in range(min_n, max_n + 1):
        out.extend(all_graphs(n))
    return out


def find_isomorphic(catalog: list[Structure], target: Structure) -> Structure | None:
    from .structures import isomorphic

    for s in catalog:
        if isomorphic(s, target):
            return s
    return None


def catalog_to_json(catalog: list[Structure]) -> dict:
    if not catalog:
        return {"signature": {"relations": [], "constants": []}, "structures": []}
    sig = catalog[0].signature
    return {
        "signature": {
            "relations": [{"name": n, "arity": a} for n, a in sig.relations],
            "constants": list(sig.constants),
        },
        "structures": [
            {
                "name": s.name or f"S{i}",
                "size": s.size,
                "relations": {
                    rname: [list(t) for t in sorted(table)]
                    for rname, table in s.relations
                },
                "constants": {cname: v for cname, v in s.constants},
            }
            for i, s in enumerate(catalog)
        ],
    }


def catalog_from_json(doc: dict) -> list[Structure]:
    sig = Signature(
        relations=tuple((r["name"], r["arity"]) for r in doc["signature"]["relations"]),
        constants=tuple(doc["signature"].get("constants", ())),
    )
    out = []
    names = set()
    for spec in doc["structures"]:
        name = spec["name"]
        if name in names:
            raise WorkbenchError(f"duplicate structure name {name!r}")
        names.add(name)
        out.append(Structure.make(
            sig, spec["size"],
            {k: [tuple(t) for t in v] for k, v in spec.get("relations", {}).items()},
            spec.get("constants", {}),
            name=name,
        ))
    return out


def save_catalog(catalog: list[Structure], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog_to_json(catalog), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_catalog(path) -> list[Structure]:
    with open(path, encoding="utf-8") as fh:
        return catalog_from_json(json.load(fh))
