"""Readers and writers for hMetis, MatrixMarket, embedding and partition files.

All writers are canonical (pins ascending, single spaces, trailing newline),
so a write -> read -> write cycle reproduces the same bytes.
"""

from __future__ import annotations

import math
import os
from typing import Iterator, Sequence

import numpy as np

from .embedding.table import EmbeddingTable
from .hypergraph import Hypergraph


class ParseError(ValueError):
    """Malformed input file. ``line`` is 1-based, or ``None`` for whole-file problems."""

    def __init__(self, message: str, line: int | None = None, path: str | os.PathLike | None = None):
        self.line = line
        self.path = path
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


def _content_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            yield lineno, line


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno) from None


# hMetis ---------------------------------------------------------------------


def load_hmetis(path) -> Hypergraph:
    lines = _content_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty file", None, path) from None
    tokens = header.split()
    if len(tokens) not in (2, 3):
        raise ParseError(f"malformed header {header!r}, expected 'E V [fmt]'", lineno, path)
    num_edges, num_nodes = _int(tokens[0], lineno), _int(tokens[1], lineno)
    fmt = tokens[2] if len(tokens) == 3 else "0"
    if fmt not in ("0", "1", "10", "11", "00", "01"):
        raise ParseError(f"unsupported fmt {fmt!r}", lineno)
    if num_edges < 0 or num_nodes < 0:
        raise ParseError("negative counts in header", lineno)
    has_edge_weights = fmt.endswith("1")
    has_node_weights = fmt in ("10", "11")

    edges, edge_weights = [], []
    for _ in range(num_edges):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise ParseError(f"expected {num_edges} edge lines, found {len(edges)}", None) from None
        values = [_int(t, lineno) for t in line.split()]
        weight = 1
        if has_edge_weights:
            weight, values = values[0], values[1:]
            if weight < 1:
                raise ParseError(f"non-positive edge weight {weight}", lineno)
        for pin in values:
            if not 1 <= pin <= num_nodes:
                raise ParseError(f"pin {pin} out of range [1, {num_nodes}]", lineno)
        edges.append([pin - 1 for pin in values])
        edge_weights.append(weight)

    node_weights = None
    if has_node_weights:
        node_weights = []
        for _ in range(num_nodes):
            try:
                lineno, line = next(lines)
            except StopIteration:
                raise ParseError(f"expected {num_nodes} node weight lines, found {len(node_weights)}") from None
            w = _int(line.split()[0], lineno)
            if w < 1:
                raise ParseError(f"non-positive node weight {w}", lineno)
            node_weights.append(w)
    for lineno, line in lines:
        raise ParseError(f"unexpected trailing content {line!r}", lineno)
    return Hypergraph(num_nodes, edges, node_weights, edge_weights)


def format_hmetis(h: Hypergraph) -> str:
    edge_weighted = any(w != 1 for w in h.edge_weight)
    node_weighted = any(w != 1 for w in h.node_weight)
    fmt = {(False, False): "", (True, False): " 1", (False, True): " 10", (True, True): " 11"}[
        (edge_weighted, node_weighted)
    ]
    out = [f"{h.num_edges} {h.num_nodes}{fmt}"]
    for pins, w in zip(h.pins_of_edge, h.edge_weight):
        body = " ".join(str(v + 1) for v in pins)
        out.append(f"{w} {body}" if edge_weighted else body)
    if node_weighted:
        out.extend(str(w) for w in h.node_weight)
    return "\n".join(out) + "\n"


def write_hmetis(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_hmetis(h))


# MatrixMarket ---------------------------------------------------------------

_MM_FIELDS = {"pattern", "real", "integer", "double", "complex"}


def load_matrix_market(path, transpose: bool = False) -> Hypergraph:
    """Read a coordinate MatrixMarket file as an incidence matrix.

    Rows are nodes and columns are hyperedges; ``transpose=True`` swaps the
    roles. Entry values are ignored.
    """
    with open(path, encoding="utf-8") as handle:
        banner = handle.readline()
    parts = banner.lower().split()
    if len(parts) < 4 or parts[0] != "%%matrixmarket" or parts[1] != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix' banner", 1, path)
    if parts[2] != "coordinate":
        raise ParseError(f"only coordinate format is supported, got {parts[2]!r}", 1, path)
    if parts[3] not in _MM_FIELDS:
        raise ParseError(f"unsupported field {parts[3]!r}", 1, path)
    symmetric = len(parts) > 4 and parts[4] in ("symmetric", "skew-symmetric", "hermitian")

    lines = _content_lines(path)
    try:
        lineno, size_line = next(lines)
    except StopIteration:
        raise ParseError("missing size line", None, path) from None
    tokens = size_line.split()
    if len(tokens) != 3:
        raise ParseError(f"malformed size line {size_line!r}", lineno)
    n_rows, n_cols, nnz = (_int(t, lineno) for t in tokens)
    if n_rows <= 0 or n_cols <= 0 or nnz <= 0:
        raise ParseError("empty matrix", lineno)

    columns: list[list[int]] = [[] for _ in range(n_rows if transpose else n_cols)]
    seen = 0
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError(f"malformed entry {line!r}", lineno)
        i, j = _int(tokens[0], lineno), _int(tokens[1], lineno)
        if not (1 <= i <= n_rows and 1 <= j <= n_cols):
            raise ParseError(f"entry ({i}, {j}) outside {n_rows}x{n_cols}", lineno)
        entries = [(i, j)] if not symmetric or i == j else [(i, j), (j, i)]
        for r, c in entries:
            if transpose:
                r, c = c, r
            columns[c - 1].append(r - 1)
        seen += 1
    if seen != nnz:
        raise ParseError(f"expected {nnz} entries, found {seen}")
    return Hypergraph(n_cols if transpose else n_rows, columns)


def format_matrix_market(h: Hypergraph) -> str:
    out = [
        "%%MatrixMarket matrix coordinate pattern general",
        f"{h.num_nodes} {h.num_edges} {h.num_pins}",
    ]
    for e, pins in enumerate(h.pins_of_edge):
        out.extend(f"{v + 1} {e + 1}" for v in pins)
    return "\n".join(out) + "\n"


def write_matrix_market(h: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_matrix_market(h))


# embeddings -----------------------------------------------------------------


def load_embedding(path, num_nodes: int | None = None) -> EmbeddingTable:
    """Read ``N dims`` followed by ``node_id f_1 ... f_dims`` lines.

    When ``num_nodes`` is given the file must cover exactly ``0..num_nodes-1``.
    """
    lines = _content_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty embedding file", None, path) from None
    tokens = header.split()
    if len(tokens) != 2:
        raise ParseError(f"malformed header {header!r}, expected 'N dims'", lineno)
    n, dims = _int(tokens[0], lineno), _int(tokens[1], lineno)
    if dims < 1:
        raise ParseError("dims must be positive", lineno)
    expected = n if num_nodes is None else num_nodes
    vectors = np.zeros((expected, dims))
    filled = np.zeros(expected, dtype=bool)
    for lineno, line in lines:
        tokens = line.split()
        node = _int(tokens[0], lineno)
        if len(tokens) - 1 != dims:
            raise ParseError(f"dimension mismatch: expected {dims} values, got {len(tokens) - 1}", lineno)
        if not 0 <= node < expected:
            raise ParseError(f"node id {node} outside [0, {expected})", lineno)
        if filled[node]:
            raise ParseError(f"duplicate node id {node}", lineno)
        try:
            row = [float(t) for t in tokens[1:]]
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno) from None
        if not all(math.isfinite(x) for x in row):
            raise ParseError("non-finite value", lineno)
        vectors[node] = row
        filled[node] = True
    if not filled.all():
        missing = int(np.flatnonzero(~filled)[0])
        raise ParseError(f"missing node {missing}")
    return EmbeddingTable(vectors)


def format_embedding(table: EmbeddingTable) -> str:
    out = [f"{table.num_nodes} {table.dims}"]
    for v, row in enumerate(table.vectors):
        out.append(f"{v} " + " ".join(format(float(x), ".17g") for x in row))
    return "\n".join(out) + "\n"


def write_embedding(table: EmbeddingTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_embedding(table))


# partitions -----------------------------------------------------------------


def format_partition(labels: Sequence[int]) -> str:
    return "".join(f"{int(p)}\n" for p in labels)


def write_partition(labels: Sequence[int], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_partition(labels))


def load_partition(path, num_nodes: int | None = None) -> list[int]:
    labels = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            p = _int(line, lineno)
            if p < 0:
                raise ParseError(f"negative part id {p}", lineno)
            labels.append(p)
    if num_nodes is not None and len(labels) != num_nodes:
        raise ParseError(f"expected {num_nodes} labels, found {len(labels)}")
    return labels
