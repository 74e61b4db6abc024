"""Tanner graphs: bipartite symbol/check adjacency, alist I/O and neighborhoods."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class AlistError(ValueError):
    """Malformed or inconsistent alist input."""


class Kind(str, Enum):
    SYMBOL = "symbol"
    CHECK = "check"


@dataclass(frozen=True, order=True)
class NodeRef:
    kind: Kind
    index: int

    def __repr__(self) -> str:
        return f"{'v' if self.kind is Kind.SYMBOL else 'c'}{self.index}"


def sym(i: int) -> NodeRef:
    return NodeRef(Kind.SYMBOL, i)


def chk(i: int) -> NodeRef:
    return NodeRef(Kind.CHECK, i)


@dataclass(frozen=True)
class TannerGraph:
    """Immutable bipartite graph of an LDPC code.

    ``symbol_adj[v]`` lists the checks incident to symbol ``v`` and
    ``check_adj[c]`` the symbols incident to check ``c``, both sorted.
    Indices are 0-based.
    """

    n: int
    m: int
    symbol_adj: tuple[tuple[int, ...], ...]
    check_adj: tuple[tuple[int, ...], ...]
    _edges: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        if len(self.symbol_adj) != self.n or len(self.check_adj) != self.m:
            raise ValueError("adjacency length does not match n/m")
        from_sym = set()
        for v, checks in enumerate(self.symbol_adj):
            if len(set(checks)) != len(checks):
                raise ValueError(f"duplicate edge at symbol {v}")
            for c in checks:
                if not 0 <= c < self.m:
                    raise ValueError(f"check index {c} out of range at symbol {v}")
                from_sym.add((v, c))
        from_chk = set()
        for c, syms in enumerate(self.check_adj):
            if len(set(syms)) != len(syms):
                raise ValueError(f"duplicate edge at check {c}")
            for v in syms:
                if not 0 <= v < self.n:
                    raise ValueError(f"symbol index {v} out of range at check {c}")
                from_chk.add((v, c))
        if from_sym != from_chk:
            raise ValueError("symbol-side and check-side edge sets differ")
        object.__setattr__(self, "_edges", frozenset(from_sym))

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable[tuple[int, int]]) -> "TannerGraph":
        """Build from (symbol, check) pairs; parallel edges are rejected."""
        s_adj: list[list[int]] = [[] for _ in range(n)]
        c_adj: list[list[int]] = [[] for _ in range(m)]
        seen = set()
        for v, c in edges:
            v, c = int(v), int(c)
            if not (0 <= v < n and 0 <= c < m):
                raise ValueError(f"edge ({v},{c}) out of range")
            if (v, c) in seen:
                raise ValueError(f"duplicate edge ({v},{c})")
            seen.add((v, c))
            s_adj[v].append(c)
            c_adj[c].append(v)
        return cls(n, m, tuple(tuple(sorted(a)) for a in s_adj), tuple(tuple(sorted(a)) for a in c_adj))

    @classmethod
    def from_matrix(cls, H) -> "TannerGraph":
        H = np.asarray(H)
        m, n = H.shape
        rows, cols = np.nonzero(H)
        return cls.from_edges(n, m, zip(cols.tolist(), rows.tolist()))

    @property
    def edges(self) -> frozenset:
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def design_rate(self) -> float:
        """1 - m/n; assumes a full-rank parity-check matrix."""
        return 1.0 - self.m / self.n if self.n else 0.0

    def to_matrix(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for v, c in self._edges:
            H[c, v] = 1
        return H

    def adj(self, z: NodeRef) -> tuple[int, ...]:
        self._check_node(z)
        return self.symbol_adj[z.index] if z.kind is Kind.SYMBOL else self.check_adj[z.index]

    def _check_node(self, z: NodeRef) -> None:
        size = self.n if z.kind is Kind.SYMBOL else self.m
        if not 0 <= z.index < size:
            raise IndexError(f"node {z!r} not in graph (n={self.n}, m={self.m})")


def degree(g: TannerGraph, z: NodeRef) -> int:
    return len(g.adj(z))


def neighborhood(g: TannerGraph, z: NodeRef, depth: int) -> set[NodeRef]:
    """Nodes reachable from ``z`` over at most ``depth`` edges, ``z`` included."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    g._check_node(z)
    seen = {z}
    frontier = [z]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            other = Kind.CHECK if u.kind is Kind.SYMBOL else Kind.SYMBOL
            for i in g.adj(u):
                w = NodeRef(other, i)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return seen


def second_neighbors(g: TannerGraph, v: int) -> list[int]:
    """Sorted symbols within distance 2 of symbol ``v``, including ``v``."""
    out = {v}
    for c in g.symbol_adj[v]:
        out.update(g.check_adj[c])
    return sorted(out)


def component(g: TannerGraph, z: NodeRef) -> set[NodeRef]:
    seen = {z}
    q = deque([z])
    while q:
        u = q.popleft()
        other = Kind.CHECK if u.kind is Kind.SYMBOL else Kind.SYMBOL
        for i in g.adj(u):
            w = NodeRef(other, i)
            if w not in seen:
                seen.add(w)
                q.append(w)
    return seen


# alist format

def _int_rows(text: str) -> list[list[int]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise AlistError(f"non-integer token in line {line!r}") from exc
    return rows


def parse_alist(text: str) -> TannerGraph:
    """Parse MacKay's alist format (1-based, zero padding allowed).

    Both the per-symbol and per-check list sections are read; they must
    describe the same edge set.
    """
    rows = _int_rows(text)
    if len(rows) < 2 or len(rows[0]) != 2 or len(rows[1]) != 2:
        raise AlistError("header must be 'n m' followed by 'max_col_deg max_row_deg'")
    n, m = rows[0]
    if n < 0 or m < 0:
        raise AlistError("negative dimensions")
    if len(rows) < 4:
        raise AlistError("missing degree lines")
    col_deg, row_deg = rows[2], rows[3]
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistError(f"degree lines have {len(col_deg)}/{len(row_deg)} entries, expected {n}/{m}")
    max_col, max_row = rows[1]
    if (col_deg and max(col_deg) > max_col) or (row_deg and max(row_deg) > max_row):
        raise AlistError("degree exceeds declared maximum")
    body = rows[4:]
    if len(body) != n + m:
        raise AlistError(f"expected {n + m} adjacency lines, found {len(body)}")

    def read_section(lines, degs, limit, what):
        out = []
        for i, (line, d) in enumerate(zip(lines, degs)):
            entries = [x for x in line if x != 0]
            if len(entries) != d:
                raise AlistError(f"{what} {i + 1}: degree {d} but {len(entries)} entries")
            if any(not 1 <= x <= limit for x in entries):
                raise AlistError(f"{what} {i + 1}: index out of range 1..{limit}")
            if len(set(entries)) != len(entries):
                raise AlistError(f"{what} {i + 1}: duplicate edge")
            out.append([x - 1 for x in entries])
        return out

    s_lists = read_section(body[:n], col_deg, m, "symbol")
    c_lists = read_section(body[n:], row_deg, n, "check")
    s_edges = {(v, c) for v, cs in enumerate(s_lists) for c in cs}
    c_edges = {(v, c) for c, vs in enumerate(c_lists) for v in vs}
    if s_edges != c_edges:
        diff = sorted(s_edges ^ c_edges)[:3]
        raise AlistError(f"edge-set mismatch between symbol and check sections, e.g. {diff}")
    return TannerGraph.from_edges(n, m, sorted(s_edges))


def to_alist(g: TannerGraph) -> str:
    """Serialize with ascending entries and no zero padding."""
    col_deg = [len(a) for a in g.symbol_adj]
    row_deg = [len(a) for a in g.check_adj]
    lines = [
        f"{g.n} {g.m}",
        f"{max(col_deg, default=0)} {max(row_deg, default=0)}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    # an isolated node gets a lone 0 so its line is not blank
    lines += [" ".join(str(c + 1) for c in a) or "0" for a in g.symbol_adj]
    lines += [" ".join(str(v + 1) for v in a) or "0" for a in g.check_adj]
    return "\n".join(lines) + "\n"


def read_alist(path) -> TannerGraph:
    with open(path) as fh:
        return parse_alist(fh.read())


def write_alist(g: TannerGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_alist(g))


# synthetic codes

def random_regular_graph(n: int, dv: int, dc: int, seed: int = 0, max_tries: int = 1000) -> TannerGraph:
    """Random (dv, dc)-regular graph from the configuration model.

    Sockets are matched by a random permutation; matchings that create a
    parallel edge are repaired by random swaps, and redrawn if that fails.
    """
    if (n * dv) % dc:
        raise ValueError("n*dv must be divisible by dc")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    sym_sock = np.repeat(np.arange(n), dv)
    for _ in range(max_tries):
        chk_sock = np.repeat(np.arange(m), dc)[rng.permutation(n * dv)]
        if _repair_parallel(sym_sock, chk_sock, rng):
            return TannerGraph.from_edges(n, m, zip(sym_sock.tolist(), chk_sock.tolist()))
    raise RuntimeError("could not draw a simple regular graph")


def _repair_parallel(sym_sock: np.ndarray, chk_sock: np.ndarray, rng, rounds: int = 200) -> bool:
    E = len(sym_sock)
    for _ in range(rounds):
        key = sym_sock.astype(np.int64) * (chk_sock.max() + 1) + chk_sock
        _, first = np.unique(key, return_index=True)
        dup = np.setdiff1d(np.arange(E), first)
        if dup.size == 0:
            return True
        for e in dup:
            f = int(rng.integers(E))
            chk_sock[e], chk_sock[f] = chk_sock[f], chk_sock[e]
    return False


def cycle_code(k: int) -> TannerGraph:
    """k symbols and k degree-2 checks forming a single 2k-cycle."""
    return TannerGraph.from_edges(k, k, [(i, i) for i in range(k)] + [(i, (i + 1) % k) for i in range(k)])


def hamming74() -> TannerGraph:
    H = [[1, 0, 1, 0, 1, 0, 1],
         [0, 1, 1, 0, 0, 1, 1],
         [0, 0, 0, 1, 1, 1, 1]]
    return TannerGraph.from_matrix(H)


def degree_histogram(degs: Sequence[int]) -> dict[int, int]:
    return dict(sorted(Counter(degs).items()))
