"""Flooding sum-product decoding in the LLR domain on the mother-code graph."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .channels import CLAMP
from .graph import TannerGraph


@dataclass
class DecodeResult:
    hard_decision: np.ndarray
    iterations_used: int
    syndrome_ok: bool
    converged_at: Optional[int]
    total_llr: np.ndarray


class EdgeLayout:
    """Edge indexing shared by every decode on one graph.

    Edges are numbered check-major; ``chk_ptr`` delimits each check's
    edges and ``sym_ptr``/``sym_edges`` list each symbol's edges.
    """

    def __init__(self, g: TannerGraph):
        self.n, self.m = g.n, g.m
        edge_sym = [v for syms in g.check_adj for v in syms]
        self.edge_sym = np.asarray(edge_sym, dtype=np.int64)
        self.num_edges = len(edge_sym)
        self.chk_ptr = np.zeros(g.m + 1, dtype=np.int64)
        np.cumsum([len(a) for a in g.check_adj], out=self.chk_ptr[1:])
        order = np.argsort(self.edge_sym, kind="stable")
        self.sym_edges = order.astype(np.int64)
        self.sym_ptr = np.zeros(g.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.edge_sym, minlength=g.n), out=self.sym_ptr[1:])
        self.max_check_degree = max((len(a) for a in g.check_adj), default=0)


@numba.njit(cache=True, inline="always")
def _tanh_half(x):
    # tanh(x/2) through one exp; 0 maps to exactly 0 and |x| > 40 to +-1
    if x > 40.0:
        return 1.0
    if x < -40.0:
        return -1.0
    if x >= 0.0:
        e = np.exp(-x)
        return (1.0 - e) / (1.0 + e)
    e = np.exp(x)
    return (e - 1.0) / (1.0 + e)


@numba.njit(cache=True)
def _decode_frame(prior, edge_sym, chk_ptr, sym_ptr, sym_edges, dmax, max_iter, early_stop, clamp,
                  raw, hard, c2v, v2c):
    n = prior.shape[0]
    m = chk_ptr.shape[0] - 1
    fwd = np.empty(dmax + 1)
    bwd = np.empty(dmax + 1)
    t = np.empty(dmax)
    for v in range(n):
        raw[v] = prior[v]
    c2v[:] = 0.0
    converged = -1
    it = 0
    while it < max_iter:
        it += 1
        # symbol -> check: unclipped total minus own contribution
        for e in range(edge_sym.shape[0]):
            x = raw[edge_sym[e]] - c2v[e]
            if x > clamp:
                x = clamp
            elif x < -clamp:
                x = -clamp
            v2c[e] = x
        # check -> symbol: product of tanh halves over the other edges
        for c in range(m):
            a = chk_ptr[c]
            d = chk_ptr[c + 1] - a
            fwd[0] = 1.0
            for i in range(d):
                t[i] = _tanh_half(v2c[a + i])
                fwd[i + 1] = fwd[i] * t[i]
            bwd[d] = 1.0
            for i in range(d - 1, -1, -1):
                bwd[i] = bwd[i + 1] * t[i]
            for i in range(d):
                p = fwd[i] * bwd[i + 1]
                if p >= 1.0:
                    y = clamp
                elif p <= -1.0:
                    y = -clamp
                else:
                    y = np.log((1.0 + p) / (1.0 - p))
                    if y > clamp:
                        y = clamp
                    elif y < -clamp:
                        y = -clamp
                c2v[a + i] = y
        for v in range(n):
            s = prior[v]
            for j in range(sym_ptr[v], sym_ptr[v + 1]):
                s += c2v[sym_edges[j]]
            raw[v] = s
            hard[v] = 1 if s <= 0.0 else 0
        ok = True
        for c in range(m):
            par = 0
            for e in range(chk_ptr[c], chk_ptr[c + 1]):
                par ^= hard[edge_sym[e]]
            if par:
                ok = False
                break
        if ok and converged < 0:
            converged = it
            if early_stop:
                break
    if it == 0:
        for v in range(n):
            hard[v] = 1 if raw[v] <= 0.0 else 0
    return it, converged


@numba.njit(cache=True)
def _decode_many(prior, edge_sym, chk_ptr, sym_ptr, sym_edges, dmax, max_iter, early_stop, clamp):
    B, n = prior.shape
    E = edge_sym.shape[0]
    hard = np.zeros((B, n), dtype=np.uint8)
    total = np.zeros((B, n))
    iters = np.zeros(B, dtype=np.int64)
    conv = np.zeros(B, dtype=np.int64)
    c2v = np.empty(E)
    v2c = np.empty(E)
    raw = np.empty(n)
    for b in range(B):
        it, cv = _decode_frame(prior[b], edge_sym, chk_ptr, sym_ptr, sym_edges, dmax, max_iter,
                               early_stop, clamp, raw, hard[b], c2v, v2c)
        iters[b] = it
        conv[b] = cv
        for v in range(n):
            x = raw[v]
            total[b, v] = clamp if x > clamp else (-clamp if x < -clamp else x)
    return hard, total, iters, conv


def decode_batch(
    layout: EdgeLayout,
    prior_llr: np.ndarray,
    max_iter: int = 200,
    early_stop: bool = True,
    clamp: float = CLAMP,
):
    """Decode a (B, n) batch of prior LLR rows, one frame at a time.

    Returns ``(hard, total, iterations, converged_at)``; ``converged_at``
    is -1 for frames whose syndrome never cleared. Messages are clamped to
    ``clamp`` and a check whose other inputs include an exact 0 sends 0.
    """
    prior = np.clip(np.atleast_2d(np.asarray(prior_llr, dtype=np.float64)), -clamp, clamp)
    if prior.shape[1] != layout.n:
        raise ValueError(f"prior has {prior.shape[1]} symbols, graph has {layout.n}")
    return _decode_many(np.ascontiguousarray(prior), layout.edge_sym, layout.chk_ptr, layout.sym_ptr,
                        layout.sym_edges, layout.max_check_degree, int(max_iter), bool(early_stop),
                        float(clamp))


def sum_product_decode(
    g: TannerGraph,
    prior_llr,
    max_iter: int = 200,
    early_stop: bool = True,
    clamp: float = CLAMP,
    layout: EdgeLayout | None = None,
) -> DecodeResult:
    """Single-frame decode. Punctured symbols must carry prior 0.

    Hard decision is bit 1 whenever the total LLR is <= 0.
    """
    prior = np.asarray(prior_llr, dtype=float)
    if prior.ndim != 1 or prior.shape[0] != g.n:
        raise ValueError(f"prior_llr must have length {g.n}")
    layout = layout or EdgeLayout(g)
    hard, total, iters, conv = decode_batch(layout, prior[None, :], max_iter, early_stop, clamp)
    h = hard[0]
    ok = not syndrome(g, h).any()
    return DecodeResult(h, int(iters[0]), ok, int(conv[0]) if conv[0] > 0 else None, total[0])


def syndrome(g: TannerGraph, bits) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.shape != (g.n,):
        raise ValueError(f"bits must have length {g.n}")
    return np.asarray([int(bits[list(a)].sum()) & 1 if a else 0 for a in g.check_adj], dtype=np.uint8)
