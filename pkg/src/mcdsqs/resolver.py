"""Exact-cover search for parallel classes and minimum colorings of small triple systems."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .model import ClassScope, ColorClass, Coloring, Design, ModelError, PreconditionError

DEFAULT_TIMEOUT = 60.0


class SearchTimeout(RuntimeError):
    """The search ran out of time; this is not a proof of impossibility."""


@dataclass
class CoverInstance:
    ground: tuple
    candidate_blocks: list
    target: str = "enumerate-PCs"
    r: int | None = None

    def __post_init__(self):
        self.ground = tuple(sorted(int(p) for p in self.ground))
        self.candidate_blocks = [tuple(sorted(int(p) for p in b)) for b in self.candidate_blocks]
        g = set(self.ground)
        for b in self.candidate_blocks:
            if not set(b) <= g:
                raise ModelError(f"candidate block {b} leaves the ground")


@dataclass
class PCEnumeration:
    classes: list = field(default_factory=list)
    complete: bool = True

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)


def enumerate_parallel_classes(instance: CoverInstance, cap: int | None = 100_000) -> PCEnumeration:
    """All partitions of the ground into candidate blocks (Algorithm X, fewest candidates first).

    Classes come out as sorted lists of block indices; ``complete`` is False
    when the cap cut the enumeration short.
    """
    blocks = instance.candidate_blocks
    ground = instance.ground
    if not blocks:
        return PCEnumeration([] if ground else [[]])
    k = len(blocks[0])
    if any(len(b) != k for b in blocks):
        raise ModelError("mixed block sizes")
    if len(ground) % k:
        # no partition can exist
        return PCEnumeration([])
    cols = {p: set() for p in ground}
    for i, b in enumerate(blocks):
        for p in b:
            cols[p].add(i)
    out = PCEnumeration()
    chosen: list[int] = []

    def select(i):
        removed = []
        for p in blocks[i]:
            for j in cols[p]:
                for q in blocks[j]:
                    if q != p:
                        cols[q].discard(j)
            removed.append(cols.pop(p))
        return removed

    def deselect(i, removed):
        for p, col in zip(reversed(blocks[i]), reversed(removed)):
            cols[p] = col
            for j in col:
                for q in blocks[j]:
                    if q != p:
                        cols[q].add(j)

    def search():
        if not cols:
            out.classes.append(sorted(chosen))
            return cap is None or len(out.classes) < cap
        p = min(cols, key=lambda c: (len(cols[c]), c))
        for i in sorted(cols[p]):
            chosen.append(i)
            removed = select(i)
            go = search()
            deselect(i, removed)
            chosen.pop()
            if not go:
                return False
        return True

    if not search():
        out.complete = False
    return out


def min_coloring(sts: Design, r_max: int, timeout: float | None = DEFAULT_TIMEOUT):
    """A coloring into at most r_max partial parallel classes, or None when none exists.

    The next block is the one meeting the most distinct colors (ties to the
    lowest index); it tries the colors in use, lowest first, then one fresh
    color, so color permutations are never revisited. Raises SearchTimeout
    when the budget runs out; None is returned only after exhaustive search.
    """
    blocks = [tuple(b) for b in sts.blocks]
    nb = len(blocks)
    if nb == 0:
        return Coloring(())
    deadline = None if timeout is None else time.monotonic() + timeout
    pts = sorted({p for b in blocks for p in b})
    pidx = {p: i for i, p in enumerate(pts)}
    bp = [[pidx[p] for p in b] for b in blocks]
    inter = [[] for _ in range(nb)]
    for i, j in combinations(range(nb), 2):
        if set(bp[i]) & set(bp[j]):
            inter[i].append(j)
            inter[j].append(i)
    # usage[c][p] is True when point p is already covered by color c
    usage = np.zeros((r_max, len(pts)), dtype=bool)
    color = [-1] * nb
    steps = [0]

    def order_next():
        # saturation ordering: the uncolored block with fewest available colors
        best, bestkey = -1, None
        for i in range(nb):
            if color[i] >= 0:
                continue
            used = {color[j] for j in inter[i] if color[j] >= 0}
            key = (-len(used), i)
            if bestkey is None or key < bestkey:
                best, bestkey = i, key
        return best

    def go(ncol):
        steps[0] += 1
        if deadline is not None and steps[0] % 512 == 0 and time.monotonic() > deadline:
            raise SearchTimeout(f"min_coloring exceeded {timeout}s")
        i = order_next()
        if i < 0:
            return True
        b = bp[i]
        for c in range(min(ncol + 1, r_max)):
            if usage[c, b].any():
                continue
            usage[c, b] = True
            color[i] = c
            if go(max(ncol, c + 1)):
                return True
            usage[c, b] = False
            color[i] = -1
        return False

    if not go(0):
        return None
    r = max(color) + 1
    classes = []
    for c in range(r):
        rows = np.array([blocks[i] for i in range(nb) if color[i] == c], dtype=np.int64)
        classes.append(ColorClass(rows, ClassScope("PPC")))
    return Coloring(tuple(classes))


def chromatic_index(sts: Design, lo: int = 1, hi: int | None = None, timeout: float | None = DEFAULT_TIMEOUT):
    """(chromatic index, optimal coloring) by increasing r from lo."""
    hi = len(sts.blocks) if hi is None else hi
    for r in range(lo, hi + 1):
        col = min_coloring(sts, r, timeout=timeout)
        if col is not None:
            return r, col
    raise ModelError("no coloring within the given range")


def parallelism_partition(blocks, ground: Sequence[int]) -> list[np.ndarray]:
    """Partition blocks into parallel classes by the closure of disjointness.

    Raises PreconditionError when a component is not a parallel class, which
    is the case whenever disjointness is not an equivalence relation.
    """
    B = np.asarray(blocks, dtype=np.int64)
    if B.ndim != 2 or len(B) == 0:
        raise PreconditionError("no blocks", "empty")
    ground = sorted(int(p) for p in ground)
    pos = {p: i for i, p in enumerate(ground)}
    try:
        cols = np.vectorize(pos.__getitem__)(B)
    except KeyError as e:
        raise PreconditionError(f"block point {e} outside the ground", "ground") from None
    n = len(B)
    inc = csr_matrix((np.ones(B.size), (np.repeat(np.arange(n), B.shape[1]), cols.ravel())),
                     shape=(n, len(ground)))
    meet = (inc @ inc.T).toarray() > 0
    disjoint = ~meet
    ncomp, lab = connected_components(csr_matrix(disjoint), directed=False)
    out = []
    for c in range(ncomp):
        idx = np.flatnonzero(lab == c)
        sub = B[idx]
        if sorted(sub.ravel().tolist()) != ground:
            raise PreconditionError("disjointness is not an equivalence on these blocks",
                                    "not-parallelism")
        out.append(sub[np.lexsort(sub.T[::-1])])
    out.sort(key=lambda a: tuple(a[0]))
    return out


def resolve_all(design: Design, cap: int | None = 100_000) -> PCEnumeration:
    """All parallel classes of a design on its active points."""
    return enumerate_parallel_classes(CoverInstance(design.point_list, list(design.blocks)), cap=cap)


def cyclic_sts(v: int, base: Iterable[Sequence[int]]) -> Design:
    """STS from base blocks developed mod v (full orbits only)."""
    blocks = sorted({tuple(sorted((p + i) % v for p in b)) for b in base for i in range(v)})
    return Design(v=v, blocks=tuple(blocks), t=2, K=frozenset({3}), kind="Steiner")


def fano() -> Design:
    return cyclic_sts(7, [(0, 1, 3)])


def ag23() -> Design:
    """AG(2,3): the 12 lines of the affine plane of order 3 on points 3a+b."""
    lines = set()
    pts = [(a, b) for a in range(3) for b in range(3)]
    for (p, q) in combinations(pts, 2):
        d = ((q[0] - p[0]) % 3, (q[1] - p[1]) % 3)
        line = tuple(sorted(3 * ((p[0] + t * d[0]) % 3) + (p[1] + t * d[1]) % 3 for t in range(3)))
        lines.add(line)
    return Design(v=9, blocks=tuple(sorted(lines)), t=2, K=frozenset({3}), kind="Steiner")
