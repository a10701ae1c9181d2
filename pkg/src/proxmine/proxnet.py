"""Proximity network construction, pruning and integerization.

Edge weights accumulate a Gaussian kernel of positional distance over all
in-document position pairs across the corpus.  Two networks are built per
run: a small-sigma network whose edges touch at least one phrase (for
descriptors and attributes) and a large-sigma network of phrase-phrase
edges only (for event connections).

Serialization: header line ``proxnet v1 <sigma> <filter> <n_edges>``, then
one tab-separated row per edge: type_x, surface_x, type_y, surface_y,
weight (full-precision decimal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .corpus import BasisType, Corpus, Vocabulary


class EdgeFilter(Enum):
    AT_LEAST_ONE_PHRASE = "at-least-one-phrase"
    PHRASE_PHRASE_ONLY = "phrase-phrase-only"

    @property
    def mode(self) -> int:
        return (
            _kernels.AT_LEAST_ONE_PHRASE
            if self is EdgeFilter.AT_LEAST_ONE_PHRASE
            else _kernels.PHRASE_PHRASE_ONLY
        )

    @classmethod
    def from_label(cls, label: str) -> "EdgeFilter":
        for f in cls:
            if f.value == label:
                return f
        raise ValueError(f"unknown edge filter {label!r}")


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian kernel with scope ``sigma``, truncated beyond ``window``.

    The default window of ceil(4*sigma) keeps the truncation error per pair
    below e^-8 while making construction O(N_d * window) per document.
    """

    sigma: float
    window: Optional[int] = None

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.window is None:
            object.__setattr__(self, "window", math.ceil(4.0 * self.sigma))
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")

    def table(self) -> np.ndarray:
        d = np.arange(self.window + 1, dtype=np.float64)
        return np.exp(-(d * d) / (2.0 * self.sigma * self.sigma))


def kernel(i: int, j: int, cfg: KernelConfig) -> float:
    """exp(-(i-j)^2 / (2 sigma^2)), zero beyond the window cutoff."""
    d = abs(i - j)
    if d > cfg.window:
        return 0.0
    return math.exp(-(d * d) / (2.0 * cfg.sigma * cfg.sigma))


@dataclass
class ProximityNetwork:
    """Weighted heterogeneous graph over vocabulary bases.

    Edges are stored as parallel arrays over unordered pairs of global
    vocabulary ids with ``u <= v``, sorted by (u, v).  All vocabulary
    entries are nodes; pruning never removes nodes, only edges.  After
    ``integerize`` the ``counts`` array holds the multigraph edge counts.
    """

    vocab: Vocabulary
    sigma: float
    window: int
    edge_filter: EdgeFilter
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray
    counts: Optional[np.ndarray] = None

    @property
    def n_edges(self) -> int:
        return int(self.u.shape[0])

    @property
    def is_integerized(self) -> bool:
        return self.counts is not None

    @property
    def total_integer_edges(self) -> int:
        return int(self.counts.sum()) if self.counts is not None else 0

    def weight_of(self, gu: int, gv: int) -> float:
        """Weight of the unordered edge (gu, gv); 0.0 when absent."""
        lo, hi = (gu, gv) if gu <= gv else (gv, gu)
        idx = np.searchsorted(self.u, lo)
        while idx < self.n_edges and self.u[idx] == lo:
            if self.v[idx] == hi:
                return float(self.weights[idx])
            idx += 1
        return 0.0


def build_network(corpus: Corpus, cfg: KernelConfig, edge_filter: EdgeFilter) -> ProximityNetwork:
    """Accumulate kernel weights over all in-window position pairs.

    Pairs are kept when they pass the endpoint-type filter; two positions
    holding the same basis accumulate on the loop edge (x, x).
    """
    flat = corpus.flat
    n_phrase = corpus.vocabulary.size(BasisType.PHRASE)
    us, vs, ws = _kernels.accumulate_pairs(
        flat.positions,
        flat.node_ids,
        flat.offsets,
        cfg.table(),
        cfg.window,
        n_phrase,
        edge_filter.mode,
    )
    n_total = corpus.vocabulary.total_size
    keys = us * np.int64(n_total) + vs
    uniq, inverse = np.unique(keys, return_inverse=True)
    sums = np.bincount(inverse, weights=ws, minlength=uniq.shape[0])
    return ProximityNetwork(
        vocab=corpus.vocabulary,
        sigma=cfg.sigma,
        window=cfg.window,
        edge_filter=edge_filter,
        u=(uniq // n_total).astype(np.int64),
        v=(uniq % n_total).astype(np.int64),
        weights=sums,
    )


def prune(net: ProximityNetwork, l_minsup: float) -> ProximityNetwork:
    """Drop edges with weight below the link minimum support (inclusive keep)."""
    if l_minsup < 0:
        raise ValueError(f"l_minsup must be >= 0, got {l_minsup}")
    keep = net.weights >= l_minsup
    return replace(
        net,
        u=net.u[keep],
        v=net.v[keep],
        weights=net.weights[keep],
        counts=net.counts[keep] if net.counts is not None else None,
    )


def integerize(net: ProximityNetwork) -> ProximityNetwork:
    """Convert weights to multigraph counts: the integer part of each weight.

    Edges whose integer part is zero are dropped.
    """
    counts = np.floor(net.weights).astype(np.int64)
    keep = counts > 0
    return replace(
        net,
        u=net.u[keep],
        v=net.v[keep],
        weights=net.weights[keep],
        counts=counts[keep],
    )


def _node_type_and_surface(vocab: Vocabulary, gid: int) -> tuple[BasisType, str]:
    off = 0
    for t in BasisType:
        size = vocab.size(t)
        if gid < off + size:
            return t, vocab.surface_of(t, gid - off)
        off += size
    raise IndexError(f"global node id {gid} out of range")


def save_network(net: ProximityNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"proxnet v1 {net.sigma!r} {net.edge_filter.value} {net.n_edges}\n")
        for i in range(net.n_edges):
            tx, sx = _node_type_and_surface(net.vocab, int(net.u[i]))
            ty, sy = _node_type_and_surface(net.vocab, int(net.v[i]))
            fh.write(f"{tx.label}\t{sx}\t{ty.label}\t{sy}\t{net.weights[i]!r}\n")


def load_network(path, vocab: Vocabulary) -> ProximityNetwork:
    """Read the tab-separated format back, resolving surfaces in ``vocab``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 5 or header[0] != "proxnet" or header[1] != "v1":
            raise ValueError(f"{path}: not a proxnet v1 file")
        sigma = float(header[2])
        edge_filter = EdgeFilter.from_label(header[3])
        n_edges = int(header[4])
        us = np.empty(n_edges, dtype=np.int64)
        vs = np.empty(n_edges, dtype=np.int64)
        ws = np.empty(n_edges, dtype=np.float64)
        for i in range(n_edges):
            tx, sx, ty, sy, w = fh.readline().rstrip("\n").split("\t")
            ix = vocab.id_of(BasisType.from_label(tx), sx)
            iy = vocab.id_of(BasisType.from_label(ty), sy)
            if ix is None or iy is None:
                raise ValueError(f"{path}: edge references a surface missing from the vocabulary")
            us[i] = vocab.global_id(BasisType.from_label(tx), ix)
            vs[i] = vocab.global_id(BasisType.from_label(ty), iy)
            ws[i] = float(w)
    order = np.lexsort((vs, us))
    return ProximityNetwork(
        vocab=vocab,
        sigma=sigma,
        window=math.ceil(4.0 * sigma),
        edge_filter=edge_filter,
        u=us[order],
        v=vs[order],
        weights=ws[order],
    )
