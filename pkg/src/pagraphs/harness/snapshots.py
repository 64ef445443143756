"""Snapshot directories written by ``pagraphs simulate`` and read by ``analyze``.

A snapshot holds ``graph.txt`` (edge list), ``meta.json``, and when the model
keeps them ``decoration.txt``, ``loop_decoration.txt`` and ``trace.csv``.
"""
import json
import os

import numpy as np

from .. import __version__
from ..errors import ValidationError
from ..glue import GluedSpace, read_decoration, write_decoration
from ..growth import GrowthState, MultiGraph, write_trace
from .models import graph_of


def write_graph(g, path):
    with open(path, "w") as fh:
        fh.write("# pagraphs graph\n")
        fh.write(f"vertices {g.n_vertices}\nroot {g.root}\nedges {g.n_edges}\n")
        for a, b in g.edges:
            fh.write(f"{a} {b}\n")


def read_graph(path):
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    head = {ln[0]: int(ln[1]) for ln in lines[:3]}
    if set(head) != {"vertices", "root", "edges"}:
        raise ValidationError(f"{path}: missing graph header")
    edges = [(int(a), int(b)) for a, b in lines[3:]]
    if len(edges) != head["edges"]:
        raise ValidationError(f"{path}: expected {head['edges']} edges, found {len(edges)}")
    return MultiGraph(head["vertices"], edges, root=head["root"])


def write_snapshot(obj, out_dir, meta):
    os.makedirs(out_dir, exist_ok=True)
    files = ["graph.txt"]
    write_graph(graph_of(obj), os.path.join(out_dir, "graph.txt"))
    if isinstance(obj, GrowthState):
        if obj.blocks is not None:
            write_decoration(obj.decoration(), os.path.join(out_dir, "decoration.txt"))
            files.append("decoration.txt")
        if obj.loop_members is not None:
            write_decoration(obj.loop_decoration()[0], os.path.join(out_dir, "loop_decoration.txt"))
            files.append("loop_decoration.txt")
        if obj.trace is not None:
            write_trace(obj.trace, os.path.join(out_dir, "trace.csv"))
            files.append("trace.csv")
    else:
        np.savetxt(os.path.join(out_dir, "parents.txt"), obj.parents, fmt="%d")
        files.append("parents.txt")
    meta = dict(meta, files=files, version=__version__)
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return files


def load_for_analysis(path, which="graph"):
    """MultiGraph or GluedSpace from a snapshot directory or a single file.

    ``which`` picks the snapshot member: graph, decoration or loop_decoration.
    """
    if os.path.isdir(path):
        path = os.path.join(path, f"{which}.txt")
    if not os.path.exists(path):
        raise ValidationError(f"{path} does not exist")
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("# pagraphs graph"):
        return read_graph(path)
    if first.startswith("# pagraphs decoration"):
        return GluedSpace(read_decoration(path))
    raise ValidationError(f"{path}: not a graph or decoration file")
