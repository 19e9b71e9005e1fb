"""Permutation groups: orbit expansion of base blocks and coloring transport."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import (
    CertifiedDesign, ColorClass, Coloring, Design, ModelError, PreconditionError, sorted_rows,
)


@dataclass(frozen=True, eq=False)
class Perm:
    images: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.images, dtype=np.int64)
        if a.ndim != 1 or sorted(a.tolist()) != list(range(len(a))):
            raise ModelError("images do not form a permutation")
        a.setflags(write=False)
        object.__setattr__(self, "images", a)

    @property
    def v(self) -> int:
        return len(self.images)

    def __call__(self, x):
        return self.images[x]

    def __eq__(self, other):
        return isinstance(other, Perm) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def compose(self, other: "Perm") -> "Perm":
        """self after other."""
        return Perm(self.images[other.images])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.v)
        return Perm(inv)

    def is_identity(self) -> bool:
        return bool(np.all(self.images == np.arange(self.v)))

    @classmethod
    def identity(cls, v: int) -> "Perm":
        return cls(np.arange(v))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence], v: int, label_map: Mapping | None = None) -> "Perm":
        img = np.arange(v)
        seen = set()
        for cyc in cycles:
            pts = [_point(p, label_map) for p in cyc]
            for i, p in enumerate(pts):
                if p in seen or not 0 <= p < v:
                    raise ModelError(f"bad cycle point {p}")
                seen.add(p)
                img[p] = pts[(i + 1) % len(pts)]
        return cls(img)

    @classmethod
    def parse(cls, text: str, v: int, label_map: Mapping | None = None) -> "Perm":
        """Parse cycle notation '(0,1,2)(a,b)' or one-line form '[1,2,0]'."""
        text = text.strip()
        if text.startswith("["):
            return cls(np.array([_point(t, label_map) for t in text.strip("[]").split(",")]))
        cycles = [c.split(",") for c in re.findall(r"\(([^)]*)\)", text)]
        return cls.from_cycles([[t.strip() for t in c if t.strip()] for c in cycles], v, label_map)

    def cycles(self) -> list[tuple]:
        seen = np.zeros(self.v, dtype=bool)
        out = []
        for s in range(self.v):
            if seen[s]:
                continue
            cyc = [s]
            seen[s] = True
            p = int(self.images[s])
            while p != s:
                cyc.append(p)
                seen[p] = True
                p = int(self.images[p])
            out.append(tuple(cyc))
        return out

    def to_cycle_string(self, label_map: Mapping | None = None) -> str:
        names = {q: k for k, q in (label_map or {}).items()}
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + ",".join(names.get(p, str(p)) for p in c) + ")" for c in cyc)

    def to_list(self) -> list[int]:
        return self.images.tolist()


def _point(tok, label_map):
    if isinstance(tok, (int, np.integer)):
        return int(tok)
    tok = str(tok).strip()
    if label_map and tok in label_map:
        return int(label_map[tok])
    return int(tok)


class PermGroup:
    """Finite group given by generators; elements enumerated by BFS closure."""

    def __init__(self, generators: Iterable[Perm], v: int | None = None, order_bound: int = 256):
        self.generators = list(generators)
        if v is None:
            if not self.generators:
                raise ModelError("need v for a group without generators")
            v = self.generators[0].v
        if any(g.v != v for g in self.generators):
            raise ModelError("generators act on different universes")
        self.v = v
        self.order_bound = order_bound
        self._elements = None

    def elements(self) -> list[Perm]:
        if self._elements is None:
            ident = Perm.identity(self.v)
            seen = {ident.images.tobytes(): ident}
            queue = deque([ident])
            while queue:
                h = queue.popleft()
                for g in self.generators:
                    e = g.compose(h)
                    key = e.images.tobytes()
                    if key not in seen:
                        seen[key] = e
                        if len(seen) > self.order_bound:
                            raise PreconditionError(
                                f"group order exceeds bound {self.order_bound}", "group-too-large"
                            )
                        queue.append(e)
            self._elements = list(seen.values())
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def element_array(self) -> np.ndarray:
        return np.stack([e.images for e in self.elements()])

    def transversal(self, rep: int) -> dict[int, Perm]:
        """For each point y in the orbit of rep, the first element (BFS order) mapping rep to y."""
        out: dict[int, Perm] = {}
        for e in self.elements():
            y = int(e.images[rep])
            if y not in out:
                out[y] = e
        return out

    def orbit(self, x: int) -> set[int]:
        return set(self.transversal(x))


def expand_orbits(base_blocks: Sequence[Sequence[int]], group: PermGroup) -> tuple[list, list[int]]:
    """Union of orbits of the base blocks; returns (sorted unique blocks, orbit lengths)."""
    E = group.element_array()
    blocks = set()
    lengths = []
    for b in base_blocks:
        b = np.asarray(b, dtype=np.int64)
        if np.any(b < 0) or np.any(b >= group.v):
            raise ModelError(f"base block {b.tolist()} maps outside the universe")
        imgs = np.unique(np.sort(E[:, b], axis=1), axis=0)
        lengths.append(len(imgs))
        blocks.update(map(tuple, imgs.tolist()))
    return sorted(blocks), lengths


def group_image_map(design: Design, sigma: Perm) -> dict[int, int] | None:
    """Map of group indices induced by sigma, or None if the partition is not preserved."""
    if design.groups is None:
        return {}
    index = {g: i for i, g in enumerate(design.groups)}
    out = {}
    for i, g in enumerate(design.groups):
        img = tuple(sorted(int(sigma.images[p]) for p in g))
        if img not in index:
            return None
        out[i] = index[img]
    return out


def check_automorphism(design: Design, sigma: Perm) -> tuple[bool, object]:
    """(True, None) if sigma preserves blocks, stem, hole and groups; else (False, witness)."""
    if sigma.v != design.v:
        return False, "size mismatch"
    img = sigma.images
    if set(img[list(design.stem)].tolist()) != set(design.stem):
        return False, ("stem", design.stem)
    if set(img[list(design.hole)].tolist()) != set(design.hole):
        return False, ("hole", design.hole)
    if design.points is not None and set(img[list(design.points)].tolist()) != set(design.points):
        return False, ("points", None)
    if group_image_map(design, sigma) is None:
        return False, ("groups", None)
    blocks = design.block_index
    for b in design.blocks:
        nb = tuple(sorted(int(img[p]) for p in b))
        if nb not in blocks:
            return False, ("block", b)
    return True, None


def transport_coloring(coloring: Coloring, sigma: Perm, design: Design, check: bool = True) -> Coloring:
    """Image of a coloring at x under the automorphism sigma (a coloring at sigma(x))."""
    if check:
        ok, wit = check_automorphism(design, sigma)
        if not ok:
            raise PreconditionError(f"not an automorphism: witness {wit}", "not-automorphism")
    gmap = group_image_map(design, sigma)
    if gmap is None:
        raise PreconditionError("sigma does not preserve the groups", "not-automorphism")
    return Coloring(tuple(
        ColorClass(sorted_rows(sigma.images[c.blocks]) if len(c) else c.blocks,
                   c.scope.remap_group(gmap))
        for c in coloring.classes
    ))


def complete_colorings(cert: CertifiedDesign, points: Iterable[int] | None = None) -> tuple[dict, list[int]]:
    """Fill in colorings at missing points by transport from stored representatives.

    Returns (colorings, uncovered points). Points listed in cert.no_transport
    are never used as transport sources or targets.
    """
    cols = dict(cert.derived_colorings)
    want = list(cert.design.point_list if points is None else points)
    missing = [p for p in want if p not in cols]
    if not missing or cert.group is None:
        return cols, missing
    group: PermGroup = cert.group
    ok, wit = True, None
    for g in group.generators:
        ok, wit = check_automorphism(cert.design, g)
        if not ok:
            raise PreconditionError(f"group generator is not an automorphism: {wit}", "not-automorphism")
    fixed = set(cert.no_transport)
    reps = sorted(p for p in cert.derived_colorings if p not in fixed)
    for rep in reps:
        for y, e in group.transversal(rep).items():
            if y not in cols and y not in fixed:
                cols[y] = transport_coloring(cert.derived_colorings[rep], e, cert.design, check=False)
    uncovered = [p for p in want if p not in cols]
    return cols, uncovered
