"""Puncturing patterns: greedy untainted selection and a uniform random baseline."""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import TannerGraph, second_neighbors

CRITERIA = ("full-N2", "lowest-degree", "random")
RNG_NAME = "numpy.PCG64"


def make_rng(*key: int) -> np.random.Generator:
    """PCG64 generator keyed by a tuple of non-negative ints.

    A single int is used as the seed directly; longer keys go through
    ``SeedSequence`` so (seed, run) and (seed, point, block) streams are
    independent of each other and of scheduling.
    """
    if len(key) == 1:
        return np.random.Generator(np.random.PCG64(int(key[0])))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in key])))


@dataclass(frozen=True)
class PuncturePattern:
    order: tuple[int, ...]
    n: int
    seed: Optional[int] = None
    criterion: str = "full-N2"

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if len(set(self.order)) != len(self.order):
            raise ValueError("punctured symbols must be distinct")
        if any(not 0 <= v < self.n for v in self.order):
            raise ValueError("punctured symbol out of range")

    @property
    def p(self) -> int:
        return len(self.order)

    @property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[list(self.order)] = True
        return out

    def prefix(self, p: int) -> "PuncturePattern":
        return PuncturePattern(self.order[:p], self.n, self.seed, self.criterion)

    def dumps(self) -> str:
        seed = "-" if self.seed is None else str(self.seed)
        return f"{self.p} {self.n} {seed} {self.criterion}\n{' '.join(map(str, self.order))}\n"

    @classmethod
    def loads(cls, text: str) -> "PuncturePattern":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise ValueError("empty pattern file")
        head = lines[0].split()
        if len(head) != 4:
            raise ValueError("pattern header must be 'p n seed criterion'")
        p, n = int(head[0]), int(head[1])
        seed = None if head[2] == "-" else int(head[2])
        order = tuple(int(x) for x in lines[1].split()) if len(lines) > 1 else ()
        if len(order) != p:
            raise ValueError(f"pattern header says p={p} but lists {len(order)} symbols")
        return cls(order, n, seed, head[3])


def read_pattern(path) -> PuncturePattern:
    with open(path) as fh:
        return PuncturePattern.loads(fh.read())


def write_pattern(pat: PuncturePattern, path) -> None:
    with open(path, "w") as fh:
        fh.write(pat.dumps())


def untainted_scores(g: TannerGraph, criterion: str = "full-N2") -> np.ndarray:
    """Candidate score per symbol: |N^2(u)| over symbols and checks, or the degree."""
    if criterion == "lowest-degree":
        return np.asarray([len(a) for a in g.symbol_adj], dtype=np.int64)
    if criterion != "full-N2":
        raise ValueError(f"criterion {criterion!r} has no untainted score")
    return np.asarray(
        [len(second_neighbors(g, v)) + len(g.symbol_adj[v]) for v in range(g.n)], dtype=np.int64
    )


def untainted_puncture(
    g: TannerGraph,
    seed: int = 0,
    max_p: Optional[int] = None,
    criterion: str = "full-N2",
    scores: Optional[np.ndarray] = None,
) -> PuncturePattern:
    """Greedy untainted selection.

    While untainted symbols remain, take the ones with the smallest score,
    pick one of them uniformly (ties resolved by ``rng.integers`` over the
    candidates in ascending index order), and drop its depth-2
    neighborhood from the untainted set. Scores never change, so they are
    computed once.
    """
    if max_p is not None and max_p < 1:
        raise ValueError("max_p must be >= 1")
    if scores is None:
        scores = untainted_scores(g, criterion)
    rng = make_rng(seed)
    alive = np.ones(g.n, dtype=bool)
    # symbols grouped by score, ascending index within a group
    levels = np.unique(scores)
    buckets = [np.flatnonzero(scores == s) for s in levels]
    level = 0
    order: list[int] = []
    limit = g.n if max_p is None else max_p
    while len(order) < limit:
        while level < len(buckets):
            b = buckets[level]
            b = b[alive[b]]
            buckets[level] = b
            if b.size:
                break
            level += 1
        else:
            break
        v = int(b[rng.integers(b.size)])
        order.append(v)
        alive[second_neighbors(g, v)] = False
    return PuncturePattern(tuple(order), g.n, seed, criterion)


def random_puncture(g: TannerGraph, p: int, seed: int = 0) -> PuncturePattern:
    if not 0 <= p <= g.n:
        raise ValueError(f"cannot puncture {p} of {g.n} symbols")
    rng = make_rng(seed)
    order = rng.permutation(g.n)[:p]
    return PuncturePattern(tuple(int(v) for v in order), g.n, seed, "random")


@dataclass
class RunStats:
    p_min: int
    p_max: int
    histogram: dict[int, int] = field(default_factory=dict)
    runs: int = 0
    base_seed: int = 0
    criterion: str = "full-N2"


def _run_chunk(args):
    g, seeds, criterion, scores = args
    return [untainted_puncture(g, s, None, criterion, scores).p for s in seeds]


def default_threads() -> int:
    env = os.environ.get("UNTAINTED_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def pattern_run_stats(
    g: TannerGraph,
    runs: int,
    base_seed: int = 0,
    criterion: str = "full-N2",
    threads: int = 1,
) -> RunStats:
    """Run the untainted loop to exhaustion ``runs`` times.

    Run ``i`` uses seed ``base_seed + i``, so the result does not depend on
    how runs are spread over worker processes.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    scores = untainted_scores(g, criterion)
    seeds = [base_seed + i for i in range(runs)]
    if threads <= 1:
        ps = _run_chunk((g, seeds, criterion, scores))
    else:
        chunks = [seeds[i::threads] for i in range(threads)]
        with ProcessPoolExecutor(threads) as ex:
            parts = list(ex.map(_run_chunk, [(g, ch, criterion, scores) for ch in chunks]))
        ps = [0] * runs
        for i, part in enumerate(parts):
            ps[i::threads] = part
    hist = dict(sorted(Counter(ps).items()))
    return RunStats(min(ps), max(ps), hist, runs, base_seed, criterion)
