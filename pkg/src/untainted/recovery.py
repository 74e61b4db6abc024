"""Recovery steps of punctured symbols and error probabilities on recovery trees.

Unpunctured symbols are treated as step 0. Under the pruning rule a symbol
of step ``l`` keeps a child check only when every child of that check has
step at most ``l - 1``, so unpunctured symbols never keep children and
every leaf of a recovery tree is an unpunctured symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .channels import CLAMP, ChannelModel
from .graph import TannerGraph
from .puncturing import PuncturePattern, make_rng

UNRECOVERABLE = -1
NEVER = -1
SYMBOL, CHECK = 0, 1


@dataclass
class RecoveryClassification:
    """``step[v]``: 0 unpunctured, k >= 1 recovered at iteration k, -1 never.

    ``survived_at[c]``: first iteration at which check ``c`` resolves a
    punctured neighbor, -1 if it never does.
    """

    step: np.ndarray
    survived_at: np.ndarray
    punctured: tuple[int, ...]

    def steps_of_punctured(self) -> dict[int, int]:
        return {v: int(self.step[v]) for v in sorted(self.punctured)}


def classify_recovery(g: TannerGraph, pat: PuncturePattern | Iterable[int], max_steps: int = 200) -> RecoveryClassification:
    """Peeling with flooding timing.

    Iteration ``t`` looks at the state left by iteration ``t - 1``: a check
    with exactly one unresolved neighbor resolves it at step ``t``.
    """
    punct = tuple(pat.order) if isinstance(pat, PuncturePattern) else tuple(int(v) for v in pat)
    step = np.zeros(g.n, dtype=np.int64)
    unresolved = np.zeros(g.n, dtype=bool)
    unresolved[list(punct)] = True
    step[list(punct)] = UNRECOVERABLE
    survived = np.full(g.m, NEVER, dtype=np.int64)
    # only checks touching a punctured symbol can ever act
    live = sorted({c for v in punct for c in g.symbol_adj[v]})
    for t in range(1, max_steps + 1):
        newly = {}
        for c in live:
            pending = [w for w in g.check_adj[c] if unresolved[w]]
            if len(pending) == 1:
                newly.setdefault(pending[0], []).append(c)
        if not newly:
            break
        for v, cs in newly.items():
            unresolved[v] = False
            step[v] = t
            for c in cs:
                if survived[c] == NEVER:
                    survived[c] = t
        live = [c for c in live if any(unresolved[w] for w in g.check_adj[c])]
    return RecoveryClassification(step, survived, punct)


@dataclass
class RecoveryTree:
    """Pruned computation tree rooted at a punctured symbol.

    Nodes are stored parents-before-children. ``origin`` is the graph index
    of each node (-1 for synthetic nodes), ``step`` is 0 for unpunctured
    symbols and unused (0) for checks.
    """

    kind: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    origin: np.ndarray
    punctured: np.ndarray
    step: np.ndarray
    locally_tree_like: bool = True
    children: list = field(default_factory=list)

    def __post_init__(self):
        if not self.children:
            self.children = [[] for _ in range(len(self.kind))]
            for i, p in enumerate(self.parent):
                if p >= 0:
                    self.children[p].append(i)

    @property
    def size(self) -> int:
        return len(self.kind)

    @property
    def root_step(self) -> int:
        return int(self.step[0])

    def leaves(self) -> list[int]:
        return [i for i in range(self.size) if not self.children[i]]

    def validate(self) -> None:
        """Raise ValueError if the tree breaks a structural invariant."""
        if self.size == 0 or self.parent[0] != -1 or self.kind[0] != SYMBOL or not self.punctured[0]:
            raise ValueError("root must be a punctured symbol")
        for i in range(1, self.size):
            p = self.parent[i]
            if not 0 <= p < i:
                raise ValueError("nodes must be stored parents first")
            if self.kind[i] == self.kind[p] or self.depth[i] != self.depth[p] + 1:
                raise ValueError("levels must alternate symbol/check")
        for i in range(self.size):
            if (self.kind[i] == SYMBOL) != (self.depth[i] % 2 == 0):
                raise ValueError("symbols must sit at even depth")
            if self.kind[i] == SYMBOL:
                if not self.children[i] and self.punctured[i]:
                    raise ValueError("leaf symbols must be unpunctured")
                for c in self.children[i]:
                    kids = self.children[c]
                    if max((self.step[w] for w in kids), default=0) > self.step[i] - 1:
                        raise ValueError(f"check {c} violates the pruning rule under node {i}")
        if max(self.depth) > 2 * self.root_step:
            raise ValueError("tree deeper than twice the root step")

    def dump(self, fmt: str = "text") -> str:
        def name(i):
            if self.kind[i] == CHECK:
                return f"c{self.origin[i]}" if self.origin[i] >= 0 else f"c#{i}"
            base = f"v{self.origin[i]}" if self.origin[i] >= 0 else f"v#{i}"
            return f"{base}[P{self.step[i]}]" if self.punctured[i] else base

        if fmt == "dot":
            lines = ["digraph T {"]
            lines += [f'  n{p} -> n{i};  // {name(p)} -> {name(i)}' for i, p in enumerate(self.parent) if p >= 0]
            lines.append("}")
            return "\n".join(lines) + "\n"
        out = []

        def walk(i):
            out.append("  " * int(self.depth[i]) + name(i))
            for ch in self.children[i]:
                walk(ch)

        walk(0)
        return "\n".join(out) + "\n"


class TreeBuilder:
    """Incremental construction of a RecoveryTree (parents before children)."""

    def __init__(self):
        self.kind, self.parent, self.depth = [], [], []
        self.origin, self.punctured, self.step = [], [], []

    def add(self, kind: int, parent: int = -1, origin: int = -1, step: int = 0) -> int:
        self.kind.append(kind)
        self.parent.append(parent)
        self.depth.append(0 if parent < 0 else self.depth[parent] + 1)
        self.origin.append(origin)
        self.punctured.append(kind == SYMBOL and step != 0)
        self.step.append(step)
        return len(self.kind) - 1

    def build(self, locally_tree_like: bool = True) -> RecoveryTree:
        return RecoveryTree(
            np.asarray(self.kind, dtype=np.int8),
            np.asarray(self.parent, dtype=np.int64),
            np.asarray(self.depth, dtype=np.int64),
            np.asarray(self.origin, dtype=np.int64),
            np.asarray(self.punctured, dtype=bool),
            np.asarray(self.step, dtype=np.int64),
            locally_tree_like,
        )


def build_recovery_tree(g: TannerGraph, cls: RecoveryClassification, v: int) -> RecoveryTree:
    """Unroll the computation tree of depth 2k at ``v`` and prune it.

    Graph cycles inside the depth-2k neighborhood make a graph node appear
    several times; ``locally_tree_like`` records whether that happened.
    """
    k = int(cls.step[v])
    if v not in cls.punctured:
        raise ValueError(f"symbol {v} is not punctured")
    if k < 1:
        raise ValueError(f"symbol {v} is unrecoverable")
    b = TreeBuilder()
    seen_sym, seen_chk = set(), set()
    tree_like = True
    # breadth-first keeps parents before children
    queue = [(SYMBOL, v, -1, -1)]  # kind, graph index, tree parent, graph parent
    while queue:
        nxt = []
        for kind, idx, tparent, gparent in queue:
            seen = seen_sym if kind == SYMBOL else seen_chk
            if idx in seen:
                tree_like = False
            seen.add(idx)
            if kind == SYMBOL:
                node = b.add(SYMBOL, tparent, idx, int(cls.step[idx]))
                l = int(cls.step[idx])
                if l < 1:
                    continue
                for c in g.symbol_adj[idx]:
                    if c == gparent:
                        continue
                    # a check with no other neighbors pins idx on its own
                    kids = [w for w in g.check_adj[c] if w != idx]
                    if max((_step_rank(cls.step[w]) for w in kids), default=0.0) <= l - 1:
                        nxt.append((CHECK, c, node, idx))
            else:
                node = b.add(CHECK, tparent, idx)
                for w in g.check_adj[idx]:
                    if w != gparent:
                        nxt.append((SYMBOL, w, node, idx))
        queue = nxt
    return b.build(tree_like)


def _step_rank(s) -> float:
    # unrecoverable ranks above every finite step
    return float("inf") if s == UNRECOVERABLE else float(s)


def bec_tree_erasure(tree: RecoveryTree, alpha) -> tuple:
    """Leaf-to-root erasure recursion; returns ``(eps_root, P_e)``.

    symbol: eps = eps0 * prod(child checks), eps0 = 1 if punctured else alpha
    check:  eps = 1 - prod(1 - child symbols)

    Plain Python arithmetic, so a ``fractions.Fraction`` alpha gives exact
    results.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must be in [0,1]")
    one = alpha - alpha + 1
    eps = [one] * tree.size
    for i in range(tree.size - 1, -1, -1):
        if tree.kind[i] == SYMBOL:
            e = one if tree.punctured[i] else alpha
            for c in tree.children[i]:
                e = e * eps[c]
        else:
            keep = one
            for w in tree.children[i]:
                keep = keep * (one - eps[w])
            e = one - keep
        eps[i] = e
    return eps[0], eps[0] / 2


@dataclass
class McEstimate:
    p_e: float
    std_err: float
    trials: int


MC_BLOCK = 4096


def tree_root_llr(tree: RecoveryTree, leaf_llr: np.ndarray, clamp: float = CLAMP) -> np.ndarray:
    """Root total LLR after one upward sum-product sweep.

    ``leaf_llr`` is (trials, size): channel LLR per tree node, ignored for
    checks. On a tree of depth 2k one upward sweep equals k flooding
    iterations at the root.
    """
    T = leaf_llr.shape[0]
    up = np.zeros((T, tree.size))
    for i in range(tree.size - 1, -1, -1):
        ch = tree.children[i]
        if tree.kind[i] == SYMBOL:
            acc = leaf_llr[:, i].copy()
            for c in ch:
                acc += up[:, c]
            up[:, i] = acc if i == 0 else np.clip(acc, -clamp, clamp)
        else:
            prod = np.ones(T)
            for w in ch:
                prod *= np.tanh(0.5 * up[:, w])
            with np.errstate(divide="ignore"):
                up[:, i] = np.clip(2.0 * np.arctanh(np.clip(prod, -1.0, 1.0)), -clamp, clamp)
    return up[:, 0]


def mc_tree_error(tree: RecoveryTree, ch: ChannelModel, trials: int, seed: int = 0, clamp: float = CLAMP) -> McEstimate:
    """Monte-Carlo root error probability given the all-zero word.

    Unpunctured symbols draw channel LLRs, punctured ones start at 0. A
    root LLR of exactly 0 counts as half an error. Trials run in blocks of
    ``MC_BLOCK`` with block ``b`` drawing from stream (seed, b).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    unp = ~tree.punctured & (tree.kind == SYMBOL)
    errs = 0.0
    for b, start in enumerate(range(0, trials, MC_BLOCK)):
        T = min(MC_BLOCK, trials - start)
        rng = make_rng(seed, b)
        llr = np.zeros((T, tree.size))
        llr[:, unp] = ch.sample_zero((T, int(unp.sum())), rng, clamp)
        root = tree_root_llr(tree, llr, clamp)
        errs += float(np.sum(root < 0)) + 0.5 * float(np.sum(root == 0))
    p = errs / trials
    return McEstimate(p, float(np.sqrt(max(p * (1 - p), 0.0) / trials)), trials)


# tree pairs that differ by one attached check

def attach_check(tree: RecoveryTree, x: int, subtree: RecoveryTree) -> RecoveryTree:
    """Copy of ``tree`` with one extra child check under symbol ``x``.

    ``subtree`` is rooted at that check (its node 0 must be a check).
    """
    if tree.kind[x] != SYMBOL:
        raise ValueError("attachment point must be a symbol")
    if subtree.kind[0] != CHECK:
        raise ValueError("attached subtree must be rooted at a check")
    b = TreeBuilder()
    remap = {}
    # keep parents-first order: copy tree, then append subtree below x
    for i in range(tree.size):
        p = int(tree.parent[i])
        remap[i] = b.add(int(tree.kind[i]), remap.get(p, -1), int(tree.origin[i]), int(tree.step[i]))
    sub = {}
    for i in range(subtree.size):
        p = int(subtree.parent[i])
        parent = remap[x] if p < 0 else sub[p]
        sub[i] = b.add(int(subtree.kind[i]), parent, -1, int(subtree.step[i]))
    return b.build(tree.locally_tree_like and subtree.locally_tree_like)


def random_check_subtree(rng: np.random.Generator, child_max_step: int, max_children: int = 3, max_checks: int = 2) -> RecoveryTree:
    """Random survived check whose children have max step ``child_max_step``."""
    b = TreeBuilder()
    root = b.add(CHECK)
    _grow_check(b, rng, root, child_max_step, max_children, max_checks)
    return b.build()


def _grow_check(b, rng, c, child_max_step, max_children, max_checks):
    nkids = int(rng.integers(1, max_children + 1))
    steps = [child_max_step] + [int(rng.integers(0, child_max_step + 1)) for _ in range(nkids - 1)]
    for s in steps:
        w = b.add(SYMBOL, c, -1, s)
        if s > 0:
            for _ in range(int(rng.integers(1, max_checks + 1))):
                cc = b.add(CHECK, w)
                _grow_check(b, rng, cc, s - 1, max_children, max_checks)


def random_recovery_tree(rng: np.random.Generator, k: int, max_children: int = 3, max_checks: int = 2) -> RecoveryTree:
    """Random valid recovery tree whose root has step ``k``.

    Every kept check under a step-l symbol has children of max step l-1,
    one of them exactly l-1.
    """
    b = TreeBuilder()
    root = b.add(SYMBOL, -1, -1, k)
    for _ in range(int(rng.integers(1, max_checks + 1))):
        c = b.add(CHECK, root)
        _grow_check(b, rng, c, k - 1, max_children, max_checks)
    return b.build()


@dataclass
class TreePair:
    """``without`` lacks the check attached at ``x`` (depth ``2*l``) in ``with_``."""

    without: RecoveryTree
    with_: RecoveryTree
    x: int
    l: int


def random_tree_pair(
    rng: np.random.Generator,
    k: int,
    max_leaves: Optional[int] = None,
    max_children: int = 3,
    max_checks: int = 2,
    tries: int = 1000,
) -> TreePair:
    """Random qualifying pair for a root of step ``k``.

    The extra check hangs under a punctured symbol ``x`` at depth ``2l``
    whose step is ``k - l``; its children have max step ``k - l - 1`` so
    the extended tree still satisfies the pruning rule and the depth bound.
    """
    for _ in range(tries):
        base = random_recovery_tree(rng, k, max_children, max_checks)
        cands = [i for i in range(base.size)
                 if base.kind[i] == SYMBOL and base.punctured[i] and base.step[i] == k - base.depth[i] // 2]
        x = int(cands[rng.integers(len(cands))])
        l = int(base.depth[x]) // 2
        sub = random_check_subtree(rng, k - l - 1, max_children, max_checks)
        ext = attach_check(base, x, sub)
        if max_leaves is None or len(ext.leaves()) <= max_leaves:
            return TreePair(base, ext, x, l)
    raise RuntimeError("could not draw a tree pair within the leaf budget")


@dataclass
class OrderingRow:
    pair: int
    alpha: float
    pe_without: float
    pe_with: float
    ok: bool


@dataclass
class OrderingReport:
    rows: list
    ok: bool


def check_extra_check_ordering(pairs: Sequence[TreePair], alphas: Sequence[float]) -> OrderingReport:
    """Strict decrease of P_e for alpha in (0,1), equality at 0 and 1.

    Comparisons run in exact rationals: near alpha = 1 deep trees push both
    erasure probabilities within one ulp of 1.
    """
    rows = []
    for i, pr in enumerate(pairs):
        pr.without.validate()
        pr.with_.validate()
        for a in alphas:
            fa = Fraction(a)
            _, p1 = bec_tree_erasure(pr.without, fa)
            _, p2 = bec_tree_erasure(pr.with_, fa)
            ok = p1 > p2 if 0 < fa < 1 else p1 == p2
            rows.append(OrderingRow(i, float(a), float(p1), float(p2), ok))
    return OrderingReport(rows, all(r.ok for r in rows))
