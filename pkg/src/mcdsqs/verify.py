"""Certification kernel: coverage, class and coloring-profile checks per design kind."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .group import complete_colorings
from .model import (
    CertifiedDesign, ClassScope, Coloring, Design, ModelError, PreconditionError, all_subsets,
    colex_rank, derived_frame, derived_triples,
)

CAP = 16


@dataclass
class VerifyReport:
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    total: int = 0

    def add(self, code: str, witness=None):
        self.total += 1
        if len(self.violations) < CAP:
            self.violations.append((code, witness))

    @property
    def passed(self) -> bool:
        return self.total == 0

    def merge(self, other: "VerifyReport", where=None):
        for code, wit in other.violations:
            if len(self.violations) < CAP:
                self.violations.append((code, wit if where is None else (where, wit)))
        self.total += other.total
        return self

    def codes(self) -> set[str]:
        return {c for c, _ in self.violations}

    def summary(self) -> str:
        if self.passed:
            return "PASS"
        lines = [f"FAIL ({self.total} violations)"]
        lines += [f"  {c}: {w}" for c, w in self.violations]
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "total_violations": self.total,
            "violations": [[c, _jsonable(w)] for c, w in self.violations],
            "stats": _jsonable(self.stats),
        }


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    return o


# ---------------------------------------------------------------- profiles

def chromatic_profile(v: int) -> int:
    """Chromatic index of an STS(v)."""
    if v < 1 or v % 6 not in (1, 3):
        raise ValueError(f"no STS of order {v}")
    if v == 7:
        return 7
    if v == 13:
        return 8
    if v % 6 == 3:
        return (v - 1) // 2
    return (v + 1) // 2


def gcsts_profile(u: int, h: int) -> tuple[int, int]:
    """(r, s) of a good colorable STS(u, h): r classes, s of them avoiding the hole."""
    r = chromatic_profile(u)
    if (u - h) % 2:
        raise ValueError(f"u - h must be even, got u={u}, h={h}")
    return r, r - (u - h) // 2


@dataclass(frozen=True)
class ColoringProfile:
    r: int
    s: int
    restricted_ground: str
    pc_required: str


def profile_for(role: str, shell: Design) -> ColoringProfile:
    u = shell.n_points
    if role == "mc":
        r = chromatic_profile(u)
        return ColoringProfile(r, 0, "none", "all" if u % 6 == 3 else "none")
    if role == "gc":
        r, s = gcsts_profile(u, len(shell.hole))
        return ColoringProfile(r, s, "hole", "all" if u % 6 == 3 else "none")
    groups = [shell.active_group(i) for i in range(len(shell.groups or ()))]
    groups = [g for g in groups if g]
    total = sum(len(g) for g in groups)
    if role == "kf":
        r = sum(len(g) // 2 for g in groups)
        return ColoringProfile(r, r, "group", "all")
    if role == "gcgdd":
        return ColoringProfile(total // 2 + 1, total // 2 + 1, "group", "none")
    if role in ("rgdd", "rs"):
        return ColoringProfile(-1, 0, "none", "all")
    raise ValueError(f"unknown role {role}")


# ---------------------------------------------------------------- coverage

def _block_rows(design: Design, t: int) -> np.ndarray:
    parts = []
    for k in sorted(design.K):
        if len(design.K) == 1:
            bl = design.array
        else:
            bl = np.array([b for b in design.blocks if len(b) == k], dtype=np.int64).reshape(-1, k)
        if len(bl) == 0 or k < t:
            continue
        for c in combinations(range(k), t):
            parts.append(bl[:, list(c)])
    if not parts:
        return np.zeros((0, t), dtype=np.int64)
    return np.concatenate(parts)


def required_mask(design: Design, subsets: np.ndarray) -> np.ndarray:
    """Which t-subsets must be covered exactly once (the rest must be uncovered)."""
    act = design.active[subsets].all(axis=1)
    kind = design.kind
    if kind == "Steiner":
        return act
    if kind in ("GDD", "TD", "Fan1"):
        gi = design.group_index[subsets].copy()
        free = gi < 0
        gi[free] = -(subsets[free] + 2)
        ok = np.ones(len(subsets), dtype=bool)
        for a, b in combinations(range(subsets.shape[1]), 2):
            ok &= gi[:, a] != gi[:, b]
        return act & ok
    if kind == "CQS":
        gi = design.group_index[subsets]
        big = np.iinfo(np.int64).max
        lo = np.where(gi < 0, big, gi).min(axis=1)
        hi = np.where(gi < 0, -1, gi).max(axis=1)
        inside = hi <= lo
        return act & ~inside
    if kind in ("IncompleteSTS", "IncompleteSQS"):
        hm = np.zeros(design.v, dtype=bool)
        hm[list(design.hole)] = True
        return act & ~hm[subsets].all(axis=1)
    raise ModelError(f"no coverage rule for kind {kind}")


def verify_coverage(design: Design) -> VerifyReport:
    """Every required t-subset covered exactly once, every excluded one never."""
    rep = VerifyReport()
    t = design.t
    seen = set()
    for b in design.blocks:
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            rep.add("block-not-sorted", b)
        if b in seen:
            rep.add("duplicate-block", b)
        seen.add(b)
        if not all(design.active[p] for p in b):
            rep.add("block-outside-points", b)
    rows = np.sort(_block_rows(design, t), axis=1)
    total = comb(design.v, t)
    cnt = np.bincount(colex_rank(rows, design.v), minlength=total) if len(rows) else np.zeros(total, np.int64)
    subsets = all_subsets(design.v, t)
    req = required_mask(design, subsets)
    bad = np.flatnonzero(req & (cnt != 1))
    for i in bad[:CAP]:
        rep.add("coverage", {"subset": subsets[i].tolist(), "multiplicity": int(cnt[i]), "required": 1})
    rep.total += max(0, len(bad) - CAP)
    bad2 = np.flatnonzero(~req & (cnt != 0))
    for i in bad2[:CAP]:
        rep.add("excluded-covered", {"subset": subsets[i].tolist(), "multiplicity": int(cnt[i]), "required": 0})
    rep.total += max(0, len(bad2) - CAP)
    rep.stats.update(blocks=len(design.blocks), required_subsets=int(req.sum()))
    return rep


# ---------------------------------------------------------------- classes

def verify_class(blocks, scope: ClassScope, design: Design) -> VerifyReport:
    """Disjointness, containment in the resolved ground and (PC mode) exact partition."""
    rep = VerifyReport()
    b = np.asarray(blocks, dtype=np.int64)
    if b.size == 0:
        if scope.mode == "PC" and scope.mask(design).any():
            rep.add("class-not-pc", {"missing": sorted(scope.resolve(design))[:8]})
        return rep
    ground = scope.mask(design)
    flat = b.ravel()
    u, c = np.unique(flat, return_counts=True)
    for p in u[c > 1][:4]:
        pair = [r.tolist() for r in b if p in r][:2]
        rep.add("class-not-disjoint", {"point": int(p), "blocks": pair})
    out = flat[~ground[flat]]
    if len(out):
        rep.add("class-outside-ground", {"points": sorted(set(out.tolist()))[:8], "scope": scope.describe()})
    if scope.mode == "PC":
        missing = np.flatnonzero(ground & ~np.isin(np.arange(design.v), flat))
        if len(missing):
            rep.add("class-not-pc", {"missing": missing[:8].tolist(), "scope": scope.describe()})
    return rep


def derived_shell(design: Design, x: int) -> Design:
    fr = derived_frame(design, x)
    return Design(v=design.v, blocks=(), t=2, K=frozenset(k - 1 for k in design.K), kind=fr["kind"],
                  stem=fr["stem"], groups=fr["groups"], hole=fr["hole"],
                  points=tuple(sorted(fr["points"])))


def check_coloring(shell: Design, blocks: np.ndarray, coloring: Coloring | None, role: str,
                   special: int | None = None) -> tuple[VerifyReport, dict]:
    """Check a coloring of the block array ``blocks`` (living on ``shell``) against a role profile.

    Roles: mc (minimum colorable STS), gc (good colorable incomplete STS), kf
    (Kirkman frame), gcgdd (good colorable GDD), rgdd / rs (resolution into PCs).
    """
    rep = VerifyReport()
    info: dict = {}
    if coloring is None:
        rep.add("missing-coloring", None)
        return rep, info
    v = shell.v
    blocks = np.asarray(blocks, dtype=np.int64)
    w = blocks.shape[1] if blocks.ndim == 2 and blocks.size else None
    arrs, cids = [], []
    for i, c in enumerate(coloring.classes):
        if len(c) == 0:
            continue
        if w is not None and c.blocks.shape[1] != w:
            rep.add("class-width", {"class": i, "width": int(c.blocks.shape[1])})
            return rep, info
        arrs.append(c.blocks)
        cids.append(np.full(len(c), i, dtype=np.int64))
    T = np.concatenate(arrs) if arrs else np.zeros((0, w or 0), dtype=np.int64)
    cid = np.concatenate(cids) if cids else np.zeros(0, dtype=np.int64)
    if len(T) and (T.min() < 0 or T.max() >= v):
        rep.add("class-point-range", None)
        return rep, info

    # same block multiset
    rb = np.sort(colex_rank(blocks, v)) if len(blocks) else np.zeros(0, np.int64)
    rt = colex_rank(T, v) if len(T) else np.zeros(0, np.int64)
    rts = np.sort(rt)
    if len(rb) != len(rts) or not np.array_equal(rb, rts):
        ut, ct = np.unique(rt, return_counts=True)
        for r in ut[ct > 1][:4]:
            rep.add("coloring-duplicate-block", {"block": T[np.flatnonzero(rt == r)[0]].tolist(),
                                                 "classes": cid[rt == r].tolist()})
        extra = np.setdiff1d(ut, rb)
        for r in extra[:4]:
            i = np.flatnonzero(rt == r)[0]
            rep.add("coloring-extra-block", {"block": T[i].tolist(), "class": int(cid[i])})
        missing = np.setdiff1d(rb, ut)
        bl_rank = colex_rank(blocks, v)
        for r in missing[:4]:
            rep.add("coloring-missing-block", {"block": blocks[np.flatnonzero(bl_rank == r)[0]].tolist()})
        if rep.passed:
            rep.add("coloring-block-mismatch", None)

    # disjointness inside classes
    if len(T):
        flat = T.ravel()
        cflat = np.repeat(cid, T.shape[1])
        key = cflat * v + flat
        uk, ck = np.unique(key, return_counts=True)
        for k in uk[ck > 1][:4]:
            ci, p = divmod(int(k), v)
            rows = T[(cid == ci) & (T == p).any(axis=1)]
            rep.add("class-not-disjoint", {"class": ci, "point": p, "blocks": rows[:2].tolist()})

    # scopes: containment and partition
    scopes = sorted({c.scope for c in coloring.classes}, key=lambda s: (s.mode, s.group is None, s.group or 0, s.hole))
    try:
        masks = {s: s.mask(shell) for s in scopes}
    except ModelError as e:
        rep.add("scope-unresolvable", str(e))
        return rep, info
    sizes = np.bincount(cid, minlength=coloring.r) if coloring.r else np.zeros(0, np.int64)
    prof = None
    try:
        prof = profile_for(role, shell)
    except ValueError as e:
        rep.add("profile-undefined", str(e))
    for i, c in enumerate(coloring.classes):
        m = masks[c.scope]
        if len(c):
            pts = c.blocks.ravel()
            bad = pts[~m[pts]]
            if len(bad):
                rep.add("class-outside-ground", {"class": i, "points": sorted(set(bad.tolist()))[:6],
                                                 "scope": c.scope.describe()})
        need_pc = c.scope.mode == "PC" or (prof is not None and prof.pc_required == "all")
        if need_pc and w is not None and sizes[i] * w != int(m.sum()):
            rep.add("class-not-pc", {"class": i, "size": int(sizes[i]), "ground": int(m.sum()),
                                     "scope": c.scope.describe()})

    # role profile
    r = coloring.r
    info["r"] = r
    info["s"] = coloring.s
    info["sizes"] = sizes.tolist()
    if prof is None:
        return rep, info
    if role == "mc":
        if r != prof.r:
            rep.add("class-count", {"expected": prof.r, "got": r})
        for i, c in enumerate(coloring.classes):
            if c.scope.restricted:
                rep.add("unexpected-restricted-scope", {"class": i, "scope": c.scope.describe()})
    elif role == "gc":
        if r != prof.r:
            rep.add("class-count", {"expected": prof.r, "got": r})
        nh = sum(1 for c in coloring.classes if c.scope.hole)
        if nh != prof.s:
            rep.add("restricted-count", {"expected": prof.s, "got": nh})
        for i, c in enumerate(coloring.classes):
            if c.scope.group is not None:
                rep.add("unexpected-group-scope", {"class": i})
    elif role in ("kf", "gcgdd"):
        groups = {i: shell.active_group(i) for i in range(len(shell.groups or ()))}
        groups = {i: g for i, g in groups.items() if g}
        per = Counter()
        for i, c in enumerate(coloring.classes):
            if c.scope.group is None or c.scope.hole:
                rep.add("class-needs-group-scope", {"class": i, "scope": c.scope.describe()})
            else:
                per[c.scope.group] += 1
        if r != prof.r:
            rep.add("class-count", {"expected": prof.r, "got": r})
        extra = [g for g in groups if per[g] == len(groups[g]) // 2 + 1]
        for g, pts in groups.items():
            want = len(pts) // 2
            if role == "gcgdd" and per[g] == want + 1:
                continue
            if per[g] != want:
                rep.add("per-group-count", {"group": g, "expected": want, "got": per[g]})
        if role == "gcgdd":
            if len(extra) != 1:
                rep.add("special-group", {"candidates": extra})
            else:
                info["special"] = extra[0]
                if special is not None and extra[0] != special:
                    rep.add("special-group-mismatch", {"expected": special, "got": extra[0]})
    elif role in ("rgdd", "rs"):
        for i, c in enumerate(coloring.classes):
            if c.scope.restricted:
                rep.add("unexpected-restricted-scope", {"class": i})
    return rep, info


# ---------------------------------------------------------------- certificates

# claimed kind -> (design kind(s), t, block size or None, roles)
KIND_TABLE = {
    "SQS": (("Steiner",), 3, 4, None),
    "mcDSQS": (("Steiner",), 3, 4, "mc"),
    "RDSQS": (("Steiner",), 3, 4, "mc"),
    "gcDSQS_vh": (("IncompleteSQS",), 3, 4, "hole"),
    "STS": (("Steiner",), 2, 3, None),
    "mcSTS": (("Steiner",), 2, 3, "own:mc"),
    "KTS": (("Steiner",), 2, 3, "own:mc"),
    "KTS_vh": (("IncompleteSTS",), 2, 3, "own:gc"),
    "gcSTS": (("IncompleteSTS",), 2, 3, "own:gc"),
    "gcGDD": (("GDD",), 2, 3, "own:gcgdd"),
    "RGDD": (("GDD",), 2, 3, "own:rgdd"),
    "KF": (("GDD",), 2, 3, "own:kf"),
    "gcDCQS": (("CQS",), 3, 4, "cqs:kf"),
    "RDCQS": (("CQS",), 3, 4, "cqs:kf"),
    "c1DCQS": (("CQS",), 3, 4, "cqs:gcgdd"),
    "c2DCQS": (("CQS",), 3, 4, "cqs:rgdd"),
    "RDGDD34": (("GDD", "TD"), 3, 4, "rgdd"),
    "RDTD34": (("GDD", "TD"), 3, 4, "rgdd"),
    "FDGDD34": (("GDD", "TD"), 3, 4, "kf"),
    "RDS": (("Steiner",), 3, None, "rs"),
    "RSQS2star": (("Steiner",), 3, 4, None),
    "FG1": (("Fan1",), 3, None, None),
}


def point_role(cert: CertifiedDesign, x: int) -> str:
    roles = KIND_TABLE[cert.claimed_kind][3]
    d = cert.design
    if roles == "hole":
        return "gc" if x in d.hole else "mc"
    if roles.startswith("cqs:"):
        return roles[4:] if x in d.stem else "gc"
    return roles


def _kind_preconditions(cert: CertifiedDesign, rep: VerifyReport):
    d = cert.design
    kinds, t, k, _ = KIND_TABLE[cert.claimed_kind]
    if d.kind not in kinds:
        rep.add("design-kind", {"expected": kinds, "got": d.kind})
    if d.t != t:
        rep.add("strength", {"expected": t, "got": d.t})
    if k is not None and d.K != frozenset({k}):
        rep.add("block-size", {"expected": k, "got": sorted(d.K)})
    ck = cert.claimed_kind
    n = d.n_points
    if ck in ("mcDSQS", "SQS") and n % 6 not in (2, 4):
        rep.add("order", {"v": n, "need": "2 or 4 mod 6"})
    if ck == "RDSQS" and n % 6 != 4:
        rep.add("order", {"v": n, "need": "4 mod 6"})
    if ck in ("KTS",) and n % 6 != 3:
        rep.add("order", {"v": n, "need": "3 mod 6"})
    if ck in ("gcDCQS", "RDCQS", "c1DCQS", "c2DCQS"):
        s = len(d.stem)
        sizes = {len(g) for g in (d.groups or ())}
        if len(sizes) != 1:
            rep.add("group-type", {"sizes": sorted(sizes)})
        if ck in ("gcDCQS", "RDCQS") and s == 1:
            rep.add("gcdcqs-s1-unsupported", {"s": 1})
        if ck in ("c1DCQS", "c2DCQS") and s != 2:
            rep.add("stem-size", {"expected": 2, "got": s})
        if ck == "RDCQS" and n % 6 != 4:
            rep.add("order", {"v": n, "need": "4 mod 6"})
    if ck == "RDTD34" and len(d.groups or ()) != 4:
        rep.add("group-count", {"expected": 4, "got": len(d.groups or ())})


def verify_certificate(cert: CertifiedDesign, coverage: bool = True) -> VerifyReport:
    """Full certification of a claimed kind: coverage plus every required coloring profile."""
    if cert.claimed_kind not in KIND_TABLE:
        raise ValueError(f"unknown kind {cert.claimed_kind}")
    rep = VerifyReport()
    _kind_preconditions(cert, rep)
    if not rep.passed:
        return rep
    d = cert.design
    ck = cert.claimed_kind
    if ck == "RSQS2star":
        return verify_rsqs2star(cert)
    if ck == "FG1":
        return verify_fan(cert)
    if coverage:
        rep.merge(verify_coverage(d))
    roles = KIND_TABLE[ck][3]
    if roles is None:
        return rep
    if roles.startswith("own:"):
        sub, info = check_coloring(d, d.array, cert.coloring, roles[4:], cert.special_group)
        rep.merge(sub)
        rep.stats["r"] = info.get("r")
        rep.stats["class_sizes"] = info.get("sizes")
        return rep
    try:
        cols, uncovered = complete_colorings(cert)
    except PreconditionError as e:
        rep.add("transport", str(e))
        return rep
    if uncovered:
        rep.add("uncovered-points", uncovered[:CAP])
    tri = derived_triples(d)
    per_point = {}
    specials = {}
    for x in d.point_list:
        if x not in cols:
            continue
        role = point_role(cert, x)
        shell = derived_shell(d, x)
        blocks = tri.get(x, np.zeros((0, d.block_size - 1), np.int64))
        sub, info = check_coloring(shell, blocks, cols[x], role, cert.special_group)
        rep.merge(sub, where=x)
        per_point[x] = (info.get("r"), info.get("s"), len(blocks))
        if "special" in info:
            specials[x] = info["special"]
    if ck == "c1DCQS":
        if len(set(specials.values())) > 1:
            rep.add("special-group-not-shared", specials)
        elif specials and cert.special_group is None:
            rep.stats["special_group"] = next(iter(specials.values()))
    rep.stats["points"] = len(per_point)
    rep.stats["per_point"] = per_point
    rep.stats["classes_per_point"] = sorted({p[0] for p in per_point.values() if p[0] is not None})
    return rep


# ---------------------------------------------------------------- ingredient structures

def verify_rsqs2star(cert: CertifiedDesign) -> VerifyReport:
    """Structure of a 2-RSQS*(v) stored in cert.components: systems, their parallel classes and the shared part."""
    rep = VerifyReport()
    d = cert.design
    v = d.v
    if v % 12 != 4:
        rep.add("order", {"v": v, "need": "4 mod 12"})
        return rep
    systems = cert.components.get("systems")
    pcs = cert.components.get("pcs")
    if systems is None or pcs is None:
        rep.add("missing-components", None)
        return rep
    kmax = (v - 1) // 3
    keys = {(k, l) for k in range(1, kmax + 1) for l in range(1, 4)}
    if set(systems) != keys:
        rep.add("system-index", {"expected": len(keys), "got": sorted(systems)[:8]})
        return rep
    if set(pcs) != set(range(1, kmax + 1)):
        rep.add("pc-index", sorted(pcs))
        return rep
    for key in sorted(systems):
        sub = verify_coverage(Design(v=v, blocks=tuple(sorted(map(tuple, systems[key]))), t=2,
                                     K=frozenset({4}), kind="Steiner"))
        if not sub.passed:
            rep.merge(sub, where=("system", key))
    bprime = set()
    for k in sorted(pcs):
        pc = [tuple(b) for b in pcs[k]]
        pts = sorted(p for b in pc for p in b)
        if pts != list(range(v)):
            rep.add("pc-not-partition", {"k": k})
        for l in range(1, 4):
            missing = set(pc) - set(map(tuple, systems[(k, l)]))
            if missing:
                rep.add("pc-not-shared", {"k": k, "l": l, "block": sorted(missing)[0]})
        bprime.update(pc)
    sub = verify_coverage(Design(v=v, blocks=tuple(sorted(bprime)), t=2, K=frozenset({4}), kind="Steiner"))
    if not sub.passed:
        rep.merge(sub, where="special-RS")
    mult = Counter(tuple(b) for key in sorted(systems) for b in systems[key])
    if set(mult) != set(d.blocks):
        rep.add("underlying-mismatch", {"extra": sorted(set(mult) - set(d.blocks))[:2],
                                        "missing": sorted(set(d.blocks) - set(mult))[:2]})
    rep.merge(verify_coverage(d), where="underlying-SQS")
    for b, c in sorted(mult.items()):
        want = 3 if b in bprime else 2
        if c != want:
            rep.add("multiplicity", {"block": b, "expected": want, "got": c})
    rep.stats["special_blocks"] = len(bprime)
    return rep


def verify_fan(cert: CertifiedDesign) -> VerifyReport:
    """1-FG: (X, G u B) is a Steiner 2-structure and G u B u T a Steiner 3-structure."""
    rep = VerifyReport()
    d = cert.design
    fan = [tuple(b) for b in cert.components.get("fan", ())]
    T = [tuple(b) for b in cert.components.get("T", ())]
    if sorted(fan + T) != sorted(d.blocks):
        rep.add("fan-components-mismatch", None)
    groups = d.groups or tuple((p,) for p in range(d.v))
    gi = np.full(d.v, -1)
    for i, g in enumerate(groups):
        gi[list(g)] = i
    if (gi < 0).any():
        rep.add("groups-not-partition", np.flatnonzero(gi < 0).tolist()[:8])
        return rep
    pairs = Counter(p for b in fan for p in combinations(b, 2))
    for a, b in combinations(range(d.v), 2):
        want = 0 if gi[a] == gi[b] else 1
        if pairs.get((a, b), 0) != want:
            rep.add("fan-pair", {"pair": (a, b), "expected": want, "got": pairs.get((a, b), 0)})
    triples = Counter(p for b in fan + T for p in combinations(b, 3))
    for tr in combinations(range(d.v), 3):
        c = triples.get(tr, 0) + (1 if gi[tr[0]] == gi[tr[1]] == gi[tr[2]] else 0)
        if c != 1:
            rep.add("fan-triple", {"triple": tr, "got": c})
    return rep


def certify(cert: CertifiedDesign, **kw) -> CertifiedDesign:
    """Return cert with its report attached."""
    return cert.with_(report=verify_certificate(cert, **kw))
