"""Shared data model: designs, class scopes, colorings and certificates."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

import numpy as np

DESIGN_KINDS = ("Steiner", "GDD", "TD", "CQS", "IncompleteSTS", "IncompleteSQS", "Fan1")

CLAIMED_KINDS = (
    "SQS", "mcDSQS", "RDSQS", "gcDSQS_vh", "STS", "mcSTS", "KTS", "KTS_vh", "gcSTS",
    "gcGDD", "RGDD", "KF", "gcDCQS", "RDCQS", "c1DCQS", "c2DCQS", "RDGDD34", "FDGDD34",
    "RDTD34", "RDS", "RSQS2star", "FG1",
)


class ModelError(ValueError):
    """Malformed design or coloring data."""


class PreconditionError(ValueError):
    """A construction or operation was called with unusable inputs."""

    def __init__(self, message: str, code: str = "precondition"):
        super().__init__(message)
        self.code = code


class CertificationError(RuntimeError):
    """A produced or loaded object failed verification."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------- ranks

@lru_cache(maxsize=None)
def binom_table(n: int, k: int) -> np.ndarray:
    """Table T[a, j] = C(a, j) for 0 <= a < n, 0 <= j <= k (int64)."""
    t = np.zeros((max(n, 1), k + 1), dtype=np.int64)
    for a in range(max(n, 1)):
        for j in range(k + 1):
            t[a, j] = comb(a, j)
    return t


def colex_rank(rows: np.ndarray, v: int) -> np.ndarray:
    """Colex rank of each strictly increasing row among the subsets of 0..v-1."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim == 1:
        rows = rows[None, :]
    w = rows.shape[1]
    tab = binom_table(v, w)
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(w):
        out += tab[rows[:, j], j + 1]
    return out


@lru_cache(maxsize=16)
def all_subsets(v: int, t: int) -> np.ndarray:
    """All t-subsets of 0..v-1 as an array indexed by colex rank."""
    rows = np.fromiter(
        (p for c in combinations(range(v), t) for p in c), dtype=np.int64, count=comb(v, t) * t
    ).reshape(-1, t)
    out = np.empty_like(rows)
    out[colex_rank(rows, v)] = rows
    out.setflags(write=False)
    return out


def sorted_rows(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return np.sort(a, axis=1) if a.size else a.reshape(0, a.shape[1] if a.ndim == 2 else 0)


# ---------------------------------------------------------------- design

@dataclass(frozen=True, eq=False)
class Design:
    """Point universe 0..v-1 plus optional stem, groups and hole, plus blocks.

    ``points`` restricts the active point set; derived designs keep their
    parent's labels and mark the removed points inactive.
    """

    v: int
    blocks: tuple
    t: int = 3
    K: frozenset = frozenset()
    kind: str = "Steiner"
    stem: tuple = ()
    groups: tuple | None = None
    hole: tuple = ()
    points: tuple | None = None
    label_map: Mapping | None = None
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.v <= 0:
            raise ModelError("v must be positive")
        if self.kind not in DESIGN_KINDS:
            raise ModelError(f"unknown design kind {self.kind!r}")
        blocks = tuple(tuple(int(p) for p in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        K = frozenset(self.K) if self.K else frozenset(len(b) for b in blocks)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "stem", tuple(sorted(int(p) for p in self.stem)))
        object.__setattr__(self, "hole", tuple(sorted(int(p) for p in self.hole)))
        if self.groups is not None:
            object.__setattr__(
                self, "groups", tuple(tuple(sorted(int(p) for p in g)) for g in self.groups)
            )
        if self.points is not None:
            object.__setattr__(self, "points", tuple(sorted(int(p) for p in self.points)))
        for b in blocks:
            if len(b) not in K:
                raise ModelError(f"block {b} has size outside K={sorted(K)}")
            for p in b:
                if not 0 <= p < self.v:
                    raise ModelError(f"block {b} has a point outside 0..{self.v - 1}")
        self._check_structure()

    def _check_structure(self):
        seen = set(self.stem)
        if len(seen) != len(self.stem):
            raise ModelError("repeated stem point")
        if any(not 0 <= p < self.v for p in self.stem + self.hole):
            raise ModelError("stem or hole point out of range")
        if self.groups is not None:
            for g in self.groups:
                for p in g:
                    if not 0 <= p < self.v:
                        raise ModelError("group point out of range")
                    if p in seen:
                        raise ModelError(f"point {p} lies in two of stem/groups")
                    seen.add(p)
        if self.points is not None and any(not 0 <= p < self.v for p in self.points):
            raise ModelError("active point out of range")

    # -- views
    @cached_property
    def active(self) -> np.ndarray:
        m = np.zeros(self.v, dtype=bool)
        if self.points is None:
            m[:] = True
        else:
            m[list(self.points)] = True
        return m

    @property
    def point_list(self) -> list[int]:
        return list(range(self.v)) if self.points is None else list(self.points)

    @property
    def n_points(self) -> int:
        return self.v if self.points is None else len(self.points)

    @cached_property
    def group_index(self) -> np.ndarray:
        """Group index per point; -1 for stem or ungrouped points."""
        gi = np.full(self.v, -1, dtype=np.int64)
        for i, g in enumerate(self.groups or ()):
            gi[list(g)] = i
        return gi

    def active_group(self, i: int) -> tuple:
        g = self.groups[i]
        return tuple(p for p in g if self.active[p])

    @cached_property
    def array(self) -> np.ndarray:
        """Blocks as an (N, k) array; only for uniform block size."""
        if len(self.K) != 1:
            raise ModelError("array view needs a uniform block size")
        k = next(iter(self.K))
        a = np.array(self.blocks, dtype=np.int64).reshape(-1, k)
        a.setflags(write=False)
        return a

    @cached_property
    def block_index(self) -> dict:
        return {b: i for i, b in enumerate(self.blocks)}

    @property
    def block_size(self) -> int:
        if len(self.K) != 1:
            raise ModelError("design has mixed block sizes")
        return next(iter(self.K))

    def label(self, p: int) -> str:
        if self.label_map:
            for name, q in self.label_map.items():
                if q == p:
                    return name
        return str(p)

    def with_(self, **kw) -> "Design":
        return replace(self, **kw)


def is_canonical(design: Design) -> bool:
    bs = design.blocks
    if any(list(b) != sorted(set(b)) or len(set(b)) != len(b) for b in bs):
        return False
    return all(bs[i] < bs[i + 1] for i in range(len(bs) - 1))


def canonicalize(design: Design) -> Design:
    """Sort within blocks, sort the block list and drop duplicates (idempotent)."""
    blocks = sorted({tuple(sorted(b)) for b in design.blocks})
    dedup = len(design.blocks) - len(blocks)
    meta = dict(design.meta)
    meta["dedup_count"] = dedup
    return replace(design, blocks=tuple(blocks), meta=meta)


# ---------------------------------------------------------------- derivation

def derived_frame(design: Design, x: int) -> dict:
    """Structure (not blocks) of the derived design at x."""
    if not 0 <= x < design.v or not design.active[x]:
        raise ModelError(f"unknown point {x}")
    if design.t != 3:
        raise ModelError("derivation needs t = 3")
    pts = set(design.point_list)
    kind = design.kind
    if kind == "Steiner":
        return dict(kind="Steiner", points=pts - {x}, hole=(), groups=None, stem=())
    if kind == "IncompleteSQS":
        if x in design.hole:
            hole = tuple(p for p in design.hole if p != x)
            return dict(kind="IncompleteSTS", points=pts - {x}, hole=hole, groups=None, stem=())
        return dict(kind="Steiner", points=pts - {x}, hole=(), groups=None, stem=())
    if kind == "CQS":
        if x in design.stem:
            return dict(kind="GDD", points=pts - set(design.stem), hole=(), groups=design.groups, stem=())
        gi = int(design.group_index[x])
        hole = tuple(sorted((set(design.groups[gi]) | set(design.stem)) - {x}))
        return dict(kind="IncompleteSTS", points=pts - {x}, hole=hole, groups=design.groups,
                    stem=design.stem)
    if kind in ("GDD", "TD"):
        gi = int(design.group_index[x])
        own = set(design.groups[gi]) if gi >= 0 else {x}
        return dict(kind="GDD", points=pts - own, hole=(), groups=design.groups, stem=())
    raise ModelError(f"derivation not defined for kind {kind}")


def derive_at(design: Design, x: int) -> Design:
    """Derived design at x: residues B minus x of the blocks through x."""
    fr = derived_frame(design, x)
    blocks = [tuple(p for p in b if p != x) for b in design.blocks if x in b]
    K = frozenset(k - 1 for k in design.K)
    return Design(
        v=design.v, blocks=tuple(blocks), t=2, K=K, kind=fr["kind"], stem=fr["stem"],
        groups=fr["groups"], hole=fr["hole"], points=tuple(sorted(fr["points"])),
        label_map=design.label_map, meta={"derived_from": x},
    )


def derived_triples(design: Design) -> dict[int, np.ndarray]:
    """Residues at every point in one pass: {x: (r_x, k-1) sorted array}."""
    a = design.array
    n, k = a.shape
    xs = a.T.reshape(-1)
    rest = np.concatenate([np.delete(a, j, axis=1) for j in range(k)], axis=0)
    order = np.argsort(xs, kind="stable")
    xs, rest = xs[order], rest[order]
    cuts = np.flatnonzero(np.diff(xs)) + 1
    out = {}
    for seg_x, seg in zip(np.split(xs, cuts), np.split(rest, cuts)):
        if len(seg_x):
            out[int(seg_x[0])] = seg
    return out


# ---------------------------------------------------------------- counting

def expected_block_count(kind: str, **p) -> int:
    """Block count implied by the covering condition; raises on non-integral values."""
    kind = kind.upper()
    if kind == "SQS":
        num, den = comb(p["v"], 3), 4
    elif kind == "STS":
        num, den = comb(p["v"], 2), 3
    elif kind == "STEINER":
        num, den = comb(p["v"], p["t"]), comb(p["k"], p["t"])
    elif kind == "CQS":
        g, n, s = p["g"], p["n"], p["s"]
        num, den = comb(g * n + s, 3) - n * comb(g + s, 3) + (n - 1) * comb(s, 3), 4
    elif kind in ("GDD", "TD"):
        g, n, t, k = p["g"], p["n"], p.get("t", 3), p.get("k", 4)
        num, den = comb(n, t) * g ** t, comb(k, t)
    elif kind == "INCOMPLETESTS":
        num, den = comb(p["v"], 2) - comb(p["h"], 2), 3
    elif kind == "INCOMPLETESQS":
        num, den = comb(p["v"], 3) - comb(p["h"], 3), 4
    else:
        raise ValueError(f"unknown kind {kind}")
    if num % den:
        raise ValueError(f"non-integral block count {num}/{den} for {kind} {p}")
    return num // den


# ---------------------------------------------------------------- colorings

@dataclass(frozen=True)
class ClassScope:
    """Symbolic ground of a class inside a derived design.

    The ground is the design's active points, minus group ``group`` when set,
    minus the hole when ``hole`` is true.
    """

    mode: str = "PPC"
    group: int | None = None
    hole: bool = False

    def __post_init__(self):
        if self.mode not in ("PC", "PPC"):
            raise ModelError(f"bad scope mode {self.mode}")

    @property
    def restricted(self) -> bool:
        return self.group is not None or self.hole

    def mask(self, design: Design) -> np.ndarray:
        m = design.active.copy()
        if self.group is not None:
            if design.groups is None or not 0 <= self.group < len(design.groups):
                raise ModelError(f"scope names unknown group {self.group}")
            m[list(design.groups[self.group])] = False
        if self.hole:
            m[list(design.hole)] = False
        return m

    def resolve(self, design: Design) -> frozenset:
        return frozenset(np.flatnonzero(self.mask(design)).tolist())

    def remap_group(self, gperm: Mapping[int, int] | None) -> "ClassScope":
        if self.group is None or gperm is None:
            return self
        return replace(self, group=int(gperm[self.group]))

    def describe(self) -> str:
        s = "all"
        if self.group is not None:
            s += f"-G{self.group}"
        if self.hole:
            s += "-hole"
        return f"{self.mode}({s})"

    def to_json(self) -> dict:
        return {"mode": self.mode, "group": self.group, "hole": self.hole}

    @classmethod
    def from_json(cls, d: Mapping) -> "ClassScope":
        return cls(mode=d["mode"], group=d.get("group"), hole=bool(d.get("hole", False)))


@dataclass(frozen=True, eq=False)
class ColorClass:
    blocks: np.ndarray
    scope: ClassScope = ClassScope()

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=np.int64)
        if b.ndim != 2:
            b = b.reshape(len(b), -1) if b.size else b.reshape(0, 0)
        b = sorted_rows(b)
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True, eq=False)
class Coloring:
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def r(self) -> int:
        return len(self.classes)

    @property
    def s(self) -> int:
        return sum(1 for c in self.classes if c.scope.restricted)

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, i):
        return self.classes[i]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def all_blocks(self) -> np.ndarray:
        arrs = [c.blocks for c in self.classes if len(c)]
        return np.concatenate(arrs) if arrs else np.zeros((0, 0), dtype=np.int64)

    def unrestricted(self) -> list[ColorClass]:
        return [c for c in self.classes if not c.scope.restricted]

    def hole_classes(self) -> list[ColorClass]:
        return [c for c in self.classes if c.scope.hole]

    def group_classes(self, g: int) -> list[ColorClass]:
        return [c for c in self.classes if c.scope.group == g]

    def relabel(self, lab: np.ndarray, gperm: Mapping[int, int] | None = None) -> "Coloring":
        lab = np.asarray(lab, dtype=np.int64)
        return Coloring(tuple(
            ColorClass(lab[c.blocks] if len(c) else c.blocks, c.scope.remap_group(gperm))
            for c in self.classes
        ))


def make_coloring(classes: Iterable, scope: ClassScope | None = None) -> Coloring:
    scope = scope or ClassScope()
    out = []
    for c in classes:
        if isinstance(c, ColorClass):
            out.append(c)
        else:
            out.append(ColorClass(np.array(list(c), dtype=np.int64), scope))
    return Coloring(tuple(out))


@dataclass(frozen=True, eq=False)
class CertifiedDesign:
    """A design plus the per-point colorings its claimed kind requires."""

    design: Design
    claimed_kind: str
    derived_colorings: Mapping = field(default_factory=dict)
    coloring: Coloring | None = None
    special_group: int | None = None
    params: Mapping = field(default_factory=dict)
    components: Mapping = field(default_factory=dict)
    group: object = None
    no_transport: tuple = ()
    report: object = None
    provenance: str = ""

    def __post_init__(self):
        if self.claimed_kind not in CLAIMED_KINDS:
            raise ModelError(f"unknown claimed kind {self.claimed_kind!r}")

    def with_(self, **kw) -> "CertifiedDesign":
        return replace(self, **kw)

    @property
    def v(self) -> int:
        return self.design.v

    @property
    def passed(self) -> bool:
        return bool(self.report is not None and self.report.passed)
