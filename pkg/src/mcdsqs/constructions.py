"""Recursive constructions as certified combinators.

Every combinator checks its ingredients, glues relabeled copies of them
together, assembles the per-point colorings by class unions and re-verifies
its own output before returning it.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .group import complete_colorings
from .model import (
    CertificationError, CertifiedDesign, ClassScope, ColorClass, Coloring, Design,
    PreconditionError, expected_block_count,
)
from .verify import verify_certificate

_CERT_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_COLS_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _mode(order: int) -> str:
    return "PC" if order % 6 == 3 else "PPC"


def require(cert: CertifiedDesign, kinds: Sequence[str], name: str) -> CertifiedDesign:
    """Ingredient gate: right claimed kind and a passing certificate (cached per object)."""
    if cert is None:
        raise PreconditionError(f"ingredient {name} is missing", "missing-ingredient")
    if cert.claimed_kind not in kinds:
        raise PreconditionError(f"ingredient {name} is a {cert.claimed_kind}, expected one of {list(kinds)}",
                                "ingredient-kind")
    ok = _CERT_CACHE.get(cert)
    if ok is None:
        rep = verify_certificate(cert)
        ok = rep.passed
        _CERT_CACHE[cert] = ok
        if not ok:
            raise PreconditionError(f"ingredient {name} fails certification:\n{rep.summary()}",
                                    "ingredient-invalid")
    if not ok:
        raise PreconditionError(f"ingredient {name} fails certification", "ingredient-invalid")
    return cert


def full_colorings(cert: CertifiedDesign) -> dict:
    cols = _COLS_CACHE.get(cert)
    if cols is None:
        cols, missing = complete_colorings(cert)
        if missing:
            raise PreconditionError(f"no coloring at points {missing[:8]}", "missing-coloring")
        _COLS_CACHE[cert] = cols
    return cols


def recast(cert: CertifiedDesign, claimed_kind: str, **design_changes) -> CertifiedDesign:
    """Same blocks and colorings under another claimed kind (e.g. an RDS(3,4,10) as an RDSQS(10))."""
    d = cert.design.with_(**design_changes) if design_changes else cert.design
    cols = full_colorings(cert)
    out = CertifiedDesign(design=d, claimed_kind=claimed_kind, derived_colorings=cols,
                          params=dict(cert.params), provenance=cert.provenance)
    return _finish(out)


def _finish(cert: CertifiedDesign) -> CertifiedDesign:
    rep = verify_certificate(cert)
    if not rep.passed:
        raise CertificationError(f"{cert.claimed_kind} output failed certification:\n{rep.summary()}", rep)
    out = cert.with_(report=rep)
    _CERT_CACHE[out] = True
    return out


@dataclass
class _Copy:
    """One relabeled copy of an ingredient inside the output."""

    cert: CertifiedDesign
    cols: Mapping
    lab: np.ndarray
    loc: dict
    gmap: dict | None

    def at(self, y: int) -> Coloring:
        return self.cols[self.loc[y]].relabel(self.lab, self.gmap)

    def blocks(self) -> np.ndarray:
        return self.lab[self.cert.design.array]


def _place(cert: CertifiedDesign, mapping: Mapping[int, int], gmap: dict | None = None) -> _Copy:
    lab = np.full(cert.v, -1, dtype=np.int64)
    for a, b in mapping.items():
        lab[a] = b
    if (lab[cert.design.point_list] < 0).any():
        raise PreconditionError("incomplete relabeling of an ingredient", "placement")
    return _Copy(cert, full_colorings(cert), lab, {b: a for a, b in mapping.items()}, gmap)


def _place_grouped(cert: CertifiedDesign, order: Sequence[int], m: int, stem_out: Sequence[int],
                   out_group: Mapping[int, int] | None = None) -> _Copy:
    """Ingredient group gi goes to {order[gi]} x I_m, its stem (sorted) to stem_out."""
    d = cert.design
    mp = {}
    for gi, g in enumerate(d.groups):
        for i, p in enumerate(g):
            mp[p] = order[gi] * m + i
    for a, b in zip(d.stem, stem_out):
        mp[a] = b
    gmap = {gi: (order[gi] if out_group is None else out_group[order[gi]]) for gi in range(len(d.groups))}
    return _place(cert, mp, gmap)


def _union(classes: Sequence[ColorClass], scope: ClassScope) -> ColorClass:
    arrs = [c.blocks for c in classes if len(c)]
    if not arrs:
        w = next((c.blocks.shape[1] for c in classes if c.blocks.ndim == 2 and c.blocks.shape[1]), 3)
        return ColorClass(np.zeros((0, w), dtype=np.int64), scope)
    return ColorClass(np.concatenate(arrs), scope)


def _split(col: Coloring) -> tuple[list, list]:
    return [c for c in col if not c.scope.restricted], [c for c in col if c.scope.restricted]


def _by_group(col: Coloring, g: int) -> list[ColorClass]:
    return [c for c in col if c.scope.group == g]


def _cqs_params(cert: CertifiedDesign) -> tuple[int, int, int]:
    d = cert.design
    sizes = {len(g) for g in d.groups}
    if len(sizes) != 1:
        raise PreconditionError("groups of unequal size", "group-type")
    return sizes.pop(), len(d.groups), len(d.stem)


def _grouped_design(n: int, m: int, s: int, blocks: list[np.ndarray], kind: str = "CQS") -> Design:
    allb = np.concatenate(blocks)
    allb = np.unique(np.sort(allb, axis=1), axis=0)
    return Design(v=n * m + s, blocks=tuple(map(tuple, allb.tolist())), t=3, K=frozenset({4}), kind=kind,
                  stem=tuple(range(n * m, n * m + s)),
                  groups=tuple(tuple(range(x * m, x * m + m)) for x in range(n)))


def _check_count(d: Design, want: int, blocks: list[np.ndarray]):
    got = sum(len(b) for b in blocks)
    if got != want or len(d.blocks) != want:
        raise PreconditionError(f"block count {len(d.blocks)} (raw {got}), expected {want}", "block-count")


# ---------------------------------------------------------------- filling

def fill_gcdcqs(cqs: CertifiedDesign, filler_full: CertifiedDesign, filler_holed: CertifiedDesign) -> CertifiedDesign:
    """Fill the groups of a gcDCQS(g^n:s) with mcDSQS(g+s) / gcDSQS(g+s,s) copies."""
    require(cqs, ("gcDCQS", "RDCQS"), "cqs")
    require(filler_full, ("mcDSQS", "RDSQS"), "filler_full")
    require(filler_holed, ("gcDSQS_vh",), "filler_holed")
    g, n, s = _cqs_params(cqs)
    v = g * n + s
    if s not in (0, 2):
        raise PreconditionError(f"stem size {s} is not supported (only 0 and 2)", "stem-size")
    if v % 6 not in (2, 4):
        raise PreconditionError(f"gn+s = {v} is not 2 or 4 mod 6", "congruence")
    if filler_full.design.n_points != g + s or filler_holed.design.n_points != g + s:
        raise PreconditionError("filler order differs from g+s", "size")
    if len(filler_holed.design.hole) != s:
        raise PreconditionError("holed filler hole size differs from s", "size")
    cd = cqs.design
    S = list(cd.stem)
    G0 = 0
    base = _place(cqs, {p: p for p in cd.point_list})
    fills = []
    for gi, G in enumerate(cd.groups):
        f = filler_full if gi == G0 else filler_holed
        fd = f.design
        hole = list(fd.hole)
        rest = [p for p in fd.point_list if p not in set(hole)]
        if gi == G0:
            rest, hole = fd.point_list[:g], fd.point_list[g:]
        mp = dict(zip(rest, G))
        mp.update(zip(hole, S))
        fills.append(_place(f, mp))
    blocks = [base.blocks()] + [c.blocks() for c in fills]
    allb = np.unique(np.sort(np.concatenate(blocks), axis=1), axis=0)
    d = Design(v=v, blocks=tuple(map(tuple, allb.tolist())), t=3, K=frozenset({4}), kind="Steiner")
    _check_count(d, expected_block_count("SQS", v=v), blocks)
    mode = _mode(v - 1)
    cols = {}
    for gi, G in enumerate(cd.groups):
        for x in G:
            unr, res = _split(base.at(x))
            q = list(fills[gi].at(x))
            if len(q) != len(res):
                raise PreconditionError(f"point {x}: {len(res)} restricted classes vs {len(q)} filler classes",
                                        "class-index-misalignment")
            cls = [_union([a, b], ClassScope(mode)) for a, b in zip(res, q)]
            cls += [_union([a], ClassScope(mode)) for a in unr]
            cols[x] = Coloring(tuple(cls))
    for x in S:
        kf = base.at(x)
        cls, extra = [], []
        for gi in range(n):
            P = _by_group(kf, gi)
            fc = list(fills[gi].at(x))
            if gi == G0:
                qa, qb = fc[:g // 2], fc[g // 2:]
            else:
                qa = [c for c in fc if not c.scope.restricted]
                qb = [c for c in fc if c.scope.restricted]
                if [c.scope.restricted for c in fc] != [False] * len(qa) + [True] * len(qb):
                    raise PreconditionError(f"holed filler at {x}: restricted classes not last",
                                            "class-index-misalignment")
            if len(P) != g // 2 or len(qa) != g // 2:
                raise PreconditionError(f"stem point {x}, group {gi}: {len(P)} frame classes, "
                                        f"{len(qa)} filler classes, expected {g // 2}",
                                        "class-index-misalignment")
            cls += [_union([a, b], ClassScope(mode)) for a, b in zip(P, qa)]
            extra.append(qb)
        if len({len(e) for e in extra}) > 1:
            raise PreconditionError("filler extra class counts differ", "class-index-misalignment")
        for j in range(len(extra[0])):
            cls.append(_union([e[j] for e in extra], ClassScope(mode)))
        cols[x] = Coloring(tuple(cls))
    kind = "RDSQS" if v % 6 == 4 else "mcDSQS"
    return _finish(CertifiedDesign(design=d, claimed_kind=kind, derived_colorings=cols, params={"v": v},
                                   provenance=f"filled gcDCQS({g}^{n}:{s})"))


# ---------------------------------------------------------------- fans from an RDS

def fan_split(rds: CertifiedDesign) -> tuple[int, list[tuple], list[tuple]]:
    """(inf, B_inf, T) with inf the largest point."""
    d = rds.design
    inf = max(d.point_list)
    binf = [tuple(p for p in b if p != inf) for b in d.blocks if inf in b]
    T = [b for b in d.blocks if inf not in b]
    return inf, binf, T


def _rds_k(rds: CertifiedDesign) -> int:
    return rds.design.block_size - 1


def _group_point_colorings(rds, inf, n, m, s, fan_copies, t_copies, mode):
    """Shared group-point assembly: F_h^j for unrestricted j, then F^j for the restricted ones."""
    k = _rds_k(rds)
    rcols = full_colorings(rds)
    nu = m * (k - 1) // 2
    out = {}
    for x in range(n):
        gam = rcols[x]
        for i in range(m):
            y = x * m + i
            unions, restr = [], None
            for h, cls in enumerate(gam):
                M = [b for b in cls.blocks.tolist() if inf in b]
                if len(M) != 1:
                    raise PreconditionError(f"class {h} at {x} has {len(M)} blocks through inf", "resolution")
                Minf = tuple(sorted([p for p in M[0] if p != inf] + [x]))
                ua, ra = _split(fan_copies[Minf].at(y))
                if len(ua) != nu:
                    raise PreconditionError(f"fan ingredient on {Minf} has {len(ua)} unrestricted classes at {y}, "
                                            f"expected {nu}", "profile-mismatch")
                ds = []
                for b in cls.blocks.tolist():
                    if inf in b:
                        continue
                    dcol = list(t_copies[tuple(sorted(b + [x]))].at(y))
                    if len(dcol) != nu:
                        raise PreconditionError(f"T ingredient has {len(dcol)} classes at {y}, expected {nu}",
                                                "profile-mismatch")
                    ds.append(dcol)
                for j in range(nu):
                    unions.append(_union([ua[j]] + [dc[j] for dc in ds], ClassScope(mode)))
                if restr is None:
                    restr = [[] for _ in ra]
                if len(ra) != len(restr):
                    raise PreconditionError("fan ingredients disagree on restricted class counts", "profile-mismatch")
                for j, c in enumerate(ra):
                    restr[j].append(c)
            cl = unions + [_union(r, ClassScope(mode, hole=True)) for r in restr]
            out[y] = Coloring(tuple(cl))
    return out


def _check_fan_inputs(rds, ing_k, m, n_needed=None):
    k = _rds_k(rds)
    if ing_k != k:
        raise PreconditionError(f"ingredient has {ing_k} groups, RDS blocks need {k}", "size")
    inf, binf, T = fan_split(rds)
    return k, inf, binf, T


def inflate_rds(rds: CertifiedDesign, ing: CertifiedDesign, rdgdd: CertifiedDesign | None) -> CertifiedDesign:
    """gcDCQS(m^n:s) from an RDS(3,k+1,n+1), a gcDCQS(m^k:s) and an RDGDD(3,4,(k+1){m})."""
    require(rds, ("RDS",), "rds")
    require(ing, ("gcDCQS", "RDCQS"), "ing")
    m, kk, s = _cqs_params(ing)
    k, inf, binf, T = _check_fan_inputs(rds, kk, m)
    n = rds.design.n_points - 1
    if T:
        require(rdgdd, ("RDGDD34",), "rdgdd")
        if len(rdgdd.design.groups) != k + 1 or {len(g) for g in rdgdd.design.groups} != {m}:
            raise PreconditionError("RDGDD type does not match (k+1){m}", "size")
    if (m * n + s) % 6 not in (2, 4) or (m * n + s) % 6 != (m * k + s) % 6:
        raise PreconditionError("need mn+s = mk+s = 2 or 4 mod 6", "congruence")
    stem = list(range(n * m, n * m + s))
    fan = {B: _place_grouped(ing, B, m, stem) for B in binf}
    tc = {B: _place_grouped(rdgdd, B, m, []) for B in T}
    blocks = [c.blocks() for c in fan.values()] + [c.blocks() for c in tc.values()]
    d = _grouped_design(n, m, s, blocks)
    _check_count(d, expected_block_count("CQS", g=m, n=n, s=s), blocks)
    mode = _mode(m * n + s - 1)
    cols = _group_point_colorings(rds, inf, n, m, s, fan, tc, mode)
    for a in stem:
        cls = []
        for y in range(n):
            parts = []
            for B, c in fan.items():
                if y in B:
                    parts.append(_by_group(c.at(a), y))
            if any(len(p) != m // 2 for p in parts):
                raise PreconditionError(f"ingredient frame at {a} lacks {m // 2} classes for a group",
                                        "profile-mismatch")
            for j in range(m // 2):
                cls.append(_union([p[j] for p in parts], ClassScope("PC", group=y)))
        cols[a] = Coloring(tuple(cls))
    kind = "RDCQS" if (m * n + s) % 6 == 4 else "gcDCQS"
    return _finish(CertifiedDesign(design=d, claimed_kind=kind, derived_colorings=cols,
                                   params={"g": m, "n": n, "s": s},
                                   provenance=f"inflated gcDCQS({m}^{k}:{s}) along an RDS(3,{k + 1},{n + 1})"))


# ---------------------------------------------------------------- 1-fan designs

def inflate_fan(fg: CertifiedDesign, ings: Mapping[int, CertifiedDesign],
                fdgdds: Mapping[int, CertifiedDesign], m: int | None = None,
                weaken: bool = False) -> CertifiedDesign:
    """gcDCQS((mg)^n:s) from a 1-FG of type g^n, gcDCQS(m^k1:s) and FDGDD(3,4,k{m}) ingredients."""
    require(fg, ("FG1",), "fg")
    fd = fg.design
    fan = [tuple(sorted(b)) for b in fg.components.get("fan", ())]
    T = [tuple(sorted(b)) for b in fg.components.get("T", ())]
    sizes = {len(g) for g in fd.groups}
    if len(sizes) != 1:
        raise PreconditionError("1-FG groups must have equal size", "group-type")
    g = sizes.pop()
    n = len(fd.groups)
    for k1 in sorted({len(b) for b in fan}):
        if k1 not in ings:
            raise PreconditionError(f"no gcDCQS ingredient for fan block size {k1}", "missing-ingredient")
        require(ings[k1], ("gcDCQS", "RDCQS"), f"ings[{k1}]")
    for k in sorted({len(b) for b in T}):
        if k not in fdgdds:
            raise PreconditionError(f"no FDGDD ingredient for block size {k}", "missing-ingredient")
        require(fdgdds[k], ("FDGDD34",), f"fdgdds[{k}]")
    params = {k1: _cqs_params(c) for k1, c in ings.items() if k1 in {len(b) for b in fan}}
    ms = {p[0] for p in params.values()} | ({m} if m else set())
    ss = {p[2] for p in params.values()}
    if len(ms) != 1 or len(ss) != 1:
        raise PreconditionError("fan ingredients disagree on m or s", "size")
    m, s = ms.pop(), ss.pop()
    for k1, p in params.items():
        if p[1] != k1:
            raise PreconditionError(f"ingredient for size {k1} has {p[1]} groups", "size")
    for k, c in fdgdds.items():
        if {len(gg) for gg in c.design.groups} != {m} or len(c.design.groups) != k:
            raise PreconditionError(f"FDGDD for size {k} has the wrong type", "size")
    total = m * g * n + s
    res = [(m * k1 + s) % 6 for k1 in params]
    if total % 6 not in (2, 4):
        raise PreconditionError("mgn+s must be 2 or 4 mod 6", "congruence")
    if weaken and total % 6 == 2:
        if total % 6 not in res:
            raise PreconditionError("no fan block size meets the weakened congruence", "congruence")
    elif any(r != total % 6 for r in res):
        raise PreconditionError("need mk1+s = mgn+s mod 6 for every fan block size", "congruence")
    X = fd.point_list
    gi = {p: i for i, G in enumerate(fd.groups) for p in G}
    # output point (x,i) -> x*m+i; output groups G x I_m keep the 1-FG group index
    v = len(X) * m + s
    stem = list(range(len(X) * m, v))
    fanc = {B: _place_grouped(ings[len(B)], B, m, stem, gi) for B in fan}
    tc = {B: _place_grouped(fdgdds[len(B)], B, m, [], gi) for B in T}
    blocks = [c.blocks() for c in fanc.values()] + [c.blocks() for c in tc.values()]
    allb = np.unique(np.sort(np.concatenate(blocks), axis=1), axis=0)
    d = Design(v=v, blocks=tuple(map(tuple, allb.tolist())), t=3, K=frozenset({4}), kind="CQS",
               stem=tuple(stem), groups=tuple(tuple(x * m + i for x in G for i in range(m)) for G in fd.groups))
    _check_count(d, expected_block_count("CQS", g=m * g, n=n, s=s), blocks)
    mode = _mode(total - 1)
    half = m // 2
    cols = {}
    for x in X:
        G = set(fd.groups[gi[x]])
        fan_x = [B for B in fan if x in B]
        t_x = [B for B in T if x in B]
        for i in range(m):
            y0 = x * m + i
            fan_cols = {B: fanc[B].at(y0) for B in fan_x}
            t_cols = {B: tc[B].at(y0) for B in t_x}
            cls = []
            for y in X:
                if y == x:
                    continue
                inG = y in G
                for j in range(half):
                    parts = []
                    if not inG:
                        B1 = [B for B in fan_x if y in B]
                        if len(B1) != 1:
                            raise PreconditionError(f"pair {x},{y} lies in {len(B1)} fan blocks", "fan")
                        B1 = B1[0]
                        unr = _split(fan_cols[B1])[0]
                        others = [p for p in B1 if p != x]
                        if len(unr) != half * len(others):
                            raise PreconditionError("fan ingredient unrestricted class count mismatch",
                                                    "profile-mismatch")
                        parts.append(unr[others.index(y) * half + j])
                    for B in t_x:
                        if y in B:
                            kf = _by_group(t_cols[B], gi[y])
                            if len(kf) != half:
                                raise PreconditionError("FDGDD frame class count mismatch", "profile-mismatch")
                            parts.append(kf[j])
                    cls.append(_union(parts, ClassScope(mode, hole=inG)))
            restr = [_split(fan_cols[B])[1] for B in fan_x]
            if len({len(r) for r in restr}) > 1:
                raise PreconditionError("fan ingredients disagree on restricted class counts", "profile-mismatch")
            for j in range(len(restr[0]) if restr else 0):
                cls.append(_union([r[j] for r in restr], ClassScope(mode, hole=True)))
            cols[y0] = Coloring(tuple(cls))
    for a in stem:
        cls = []
        for y in X:
            parts = [_by_group(fanc[B].at(a), gi[y]) for B in fan if y in B]
            if any(len(p) != half for p in parts):
                raise PreconditionError("fan ingredient frame class count mismatch", "profile-mismatch")
            for j in range(half):
                cls.append(_union([p[j] for p in parts], ClassScope("PC", group=gi[y])))
        cols[a] = Coloring(tuple(cls))
    kind = "RDCQS" if total % 6 == 4 else "gcDCQS"
    return _finish(CertifiedDesign(design=d, claimed_kind=kind, derived_colorings=cols,
                                   params={"g": m * g, "n": n, "s": s},
                                   provenance=f"inflated along a 1-FG of type {g}^{n}"))


# ---------------------------------------------------------------- 2-RSQS* quadrupling

def rsqs2_delta(m: int, s: int) -> int:
    r = (4 * m + s) % 6
    if r == 2:
        return (m + s) // 2
    if r == 4:
        return (m + s) // 2 - 1
    raise PreconditionError("4m+s must be 2 or 4 mod 6", "congruence")


def quadruple_rsqs(rsqs2: CertifiedDesign, ing: CertifiedDesign, rdtd: CertifiedDesign | None) -> CertifiedDesign:
    """gcDCQS(m^v:s) from a 2-RSQS*(v), a gcDCQS(m^4:s) and an RDTD(3,4,m)."""
    require(rsqs2, ("RSQS2star",), "rsqs2")
    require(ing, ("gcDCQS", "RDCQS"), "ing")
    m, k4, s = _cqs_params(ing)
    if k4 != 4:
        raise PreconditionError("ingredient must have 4 groups", "size")
    delta = rsqs2_delta(m, s)
    v = rsqs2.design.v
    systems = {key: [tuple(sorted(b)) for b in bl] for key, bl in rsqs2.components["systems"].items()}
    pcs = {k: [tuple(sorted(b)) for b in bl] for k, bl in rsqs2.components["pcs"].items()}
    bprime = set(b for bl in pcs.values() for b in bl)
    under = sorted(rsqs2.design.blocks)
    occ: dict[tuple, list] = {}
    for key in sorted(systems):
        for b in systems[key]:
            if b not in bprime:
                occ.setdefault(b, []).append(key)
    others = [b for b in under if b not in bprime]
    for b in others:
        if len(occ.get(b, [])) != 2:
            raise PreconditionError(f"block {b} of the non-special part occurs {len(occ.get(b, []))} times",
                                    "occurrence")
    if others:
        require(rdtd, ("RDTD34",), "rdtd")
        if len(rdtd.design.groups) != 4 or {len(g) for g in rdtd.design.groups} != {m}:
            raise PreconditionError("RDTD type does not match 4{m}", "size")
    stem = list(range(v * m, v * m + s))
    cc = {B: _place_grouped(ing, B, m, stem) for B in sorted(bprime)}
    ac = {B: _place_grouped(rdtd, B, m, []) for B in others}
    blocks = [c.blocks() for c in cc.values()] + [c.blocks() for c in ac.values()]
    d = _grouped_design(v, m, s, blocks)
    _check_count(d, expected_block_count("CQS", g=m, n=v, s=s), blocks)
    mode = _mode(m * v + s - 1)
    half = m // 2
    kmax = (v - 1) // 3
    cols = {}
    for x in range(v):
        pblock = {k: next(b for b in pcs[k] if x in b) for k in range(1, kmax + 1)}
        for i in range(m):
            y = x * m + i
            ccol = {B: _split(cc[B].at(y)) for B in set(pblock.values())}
            for B, (u, r) in ccol.items():
                if len(u) != 3 * half or len(r) != delta:
                    raise PreconditionError(f"gcDCQS ingredient at {y}: {len(u)}+{len(r)} classes, "
                                            f"expected {3 * half}+{delta}", "profile-mismatch")
            acol = {}
            cls = []
            for k, l, r in product(range(1, kmax + 1), range(1, 4), range(1, half + 1)):
                parts = []
                for B in systems[(k, l)]:
                    if x not in B or B == pblock[k]:
                        continue
                    if B not in acol:
                        acol[B] = list(ac[B].at(y))
                    rp = r if occ[B][0] == (k, l) else r + half
                    parts.append(acol[B][rp - 1])
                parts.append(ccol[pblock[k]][0][half * (l - 1) + r - 1])
                cls.append(_union(parts, ClassScope(mode)))
            for j in range(delta):
                cls.append(_union([ccol[pblock[k]][1][j] for k in range(1, kmax + 1)], ClassScope(mode, hole=True)))
            cols[y] = Coloring(tuple(cls))
    for a in stem:
        cls = []
        for eta in range(v):
            parts = [_by_group(cc[B].at(a), eta) for B in sorted(bprime) if eta in B]
            if any(len(p) != half for p in parts):
                raise PreconditionError("frame class count mismatch", "profile-mismatch")
            for j in range(half):
                cls.append(_union([p[j] for p in parts], ClassScope("PC", group=eta)))
        cols[a] = Coloring(tuple(cls))
    kind = "RDCQS" if (m * v + s) % 6 == 4 else "gcDCQS"
    return _finish(CertifiedDesign(design=d, claimed_kind=kind, derived_colorings=cols,
                                   params={"g": m, "n": v, "s": s},
                                   provenance=f"quadrupled gcDCQS({m}^4:{s}) along a 2-RSQS*({v})"))


# ---------------------------------------------------------------- type I filling

def fill_c1dcqs(c1: CertifiedDesign, filler: CertifiedDesign) -> CertifiedDesign:
    """mcDSQS(gn+2) from a 1cDCQS(g^n:2) and an RDSQS(g+2)."""
    require(c1, ("c1DCQS",), "c1")
    if filler.claimed_kind == "RDS" and filler.design.K == frozenset({4}):
        filler = recast(filler, "RDSQS")
    require(filler, ("RDSQS",), "filler")
    g, n, s = _cqs_params(c1)
    if n % 3:
        raise PreconditionError(f"n = {n} is not 0 mod 3", "congruence")
    if filler.design.n_points != g + 2:
        raise PreconditionError("filler order differs from g+2", "size")
    cd = c1.design
    S = list(cd.stem)
    v = g * n + 2
    base = _place(c1, {p: p for p in cd.point_list})
    fills = []
    for G in cd.groups:
        pl = filler.design.point_list
        fills.append(_place(filler, dict(zip(pl, list(G) + S))))
    blocks = [base.blocks()] + [c.blocks() for c in fills]
    allb = np.unique(np.sort(np.concatenate(blocks), axis=1), axis=0)
    d = Design(v=v, blocks=tuple(map(tuple, allb.tolist())), t=3, K=frozenset({4}), kind="Steiner")
    _check_count(d, expected_block_count("SQS", v=v), blocks)
    mode = _mode(v - 1)
    half = g // 2
    cols = {}
    for gi, G in enumerate(cd.groups):
        for x in G:
            unr, res = _split(base.at(x))
            q = list(fills[gi].at(x))
            if len(res) != half + 1 or len(q) != half:
                raise PreconditionError(f"point {x}: {len(res)} restricted and {len(q)} filler classes",
                                        "class-index-misalignment")
            cls = [_union([a, b], ClassScope(mode)) for a, b in zip(res, q)]
            cls += [_union([c], ClassScope(mode)) for c in res[half:] + unr]
            cols[x] = Coloring(tuple(cls))
    spec = None
    for x in S:
        col = base.at(x)
        cls, leftover = [], []
        for gi in range(n):
            P = _by_group(col, gi)
            q = list(fills[gi].at(x))
            if len(P) not in (half, half + 1) or len(q) != half:
                raise PreconditionError(f"stem {x} group {gi}: {len(P)} frame classes", "class-index-misalignment")
            cls += [_union([a, b], ClassScope(mode)) for a, b in zip(P, q)]
            if len(P) == half + 1:
                leftover.append((gi, P[half]))
        if len(leftover) != 1:
            raise PreconditionError(f"stem {x}: {len(leftover)} groups carry the extra class",
                                    "special-group")
        if spec is not None and spec != leftover[0][0]:
            raise PreconditionError("special groups differ between the stem points", "special-group")
        spec = leftover[0][0]
        cls.append(_union([leftover[0][1]], ClassScope(mode)))
        cols[x] = Coloring(tuple(cls))
    kind = "RDSQS" if v % 6 == 4 else "mcDSQS"
    return _finish(CertifiedDesign(design=d, claimed_kind=kind, derived_colorings=cols, params={"v": v},
                                   provenance=f"filled 1cDCQS({g}^{n}:2)"))


# ---------------------------------------------------------------- type I inflation

def inflate_c1(rds: CertifiedDesign, c1: CertifiedDesign, c2: CertifiedDesign,
               rdgdd: CertifiedDesign | None, eta: int = 0) -> CertifiedDesign:
    """1cDCQS(m^n:2) from an RDS(3,k+1,n+1), a 1cDCQS(m^k:2), a 2cDCQS(m^k:2) and an RDGDD(3,4,(k+1){m})."""
    require(rds, ("RDS",), "rds")
    require(c1, ("c1DCQS",), "c1")
    require(c2, ("c2DCQS",), "c2")
    m, kk, s = _cqs_params(c1)
    if _cqs_params(c2) != (m, kk, s):
        raise PreconditionError("c1 and c2 types differ", "size")
    if m % 6 != 2:
        raise PreconditionError(f"m = {m} is not 2 mod 6", "congruence")
    k, inf, binf, T = _check_fan_inputs(rds, kk, m)
    n = rds.design.n_points - 1
    if not 0 <= eta < n:
        raise PreconditionError(f"eta = {eta} is not a point of I_n", "eta")
    if T:
        require(rdgdd, ("RDGDD34",), "rdgdd")
        if len(rdgdd.design.groups) != k + 1 or {len(g) for g in rdgdd.design.groups} != {m}:
            raise PreconditionError("RDGDD type does not match (k+1){m}", "size")
    sg = c1.special_group
    if sg is None:
        sg = c1.report.stats.get("special_group") if c1.report is not None else None
    if sg is None:
        raise PreconditionError("c1 ingredient has no recorded special group", "special-group")
    stem = [n * m, n * m + 1]

    def aligned(B):
        # put eta at the special group's position, the other points in sorted order
        rest = [p for p in B if p != eta]
        return rest[:sg] + [eta] + rest[sg:]

    fan = {}
    for B in binf:
        if eta in B:
            fan[B] = _place_grouped(c1, aligned(B), m, stem)
        else:
            fan[B] = _place_grouped(c2, B, m, stem)
    tc = {B: _place_grouped(rdgdd, B, m, []) for B in T}
    blocks = [c.blocks() for c in fan.values()] + [c.blocks() for c in tc.values()]
    d = _grouped_design(n, m, s, blocks)
    _check_count(d, expected_block_count("CQS", g=m, n=n, s=s), blocks)
    mode = _mode(m * n + 1)
    cols = _group_point_colorings(rds, inf, n, m, s, fan, tc, mode)
    half = m // 2
    res_inf = full_colorings(rds)[inf]
    for a in stem:
        cls = []
        for h, cl in enumerate(res_inf):
            hb = [tuple(b) for b in cl.blocks.tolist()]
            C = [b for b in hb if eta in b]
            if len(C) != 1:
                raise PreconditionError(f"class {h} at inf has {len(C)} blocks through eta", "resolution")
            C = C[0]
            c1col = fan[C].at(a)
            rg = {}
            for B in hb:
                if B != C:
                    rg[B] = list(fan[B].at(a))
                    if len(rg[B]) != half * (k - 1):
                        raise PreconditionError("2cDCQS stem resolution has the wrong class count",
                                                "profile-mismatch")
            ys = [p for p in C if p != eta]
            for y in ys:
                P = _by_group(c1col, y)
                if len(P) != half:
                    raise PreconditionError(f"1cDCQS frame at {a} has {len(P)} classes for group {y}",
                                            "profile-mismatch")
                for j in range(half):
                    f = ys.index(y) * half + j
                    cls.append(_union([P[j]] + [rg[B][f] for B in rg], ClassScope("PPC", group=y)))
        parts = [_by_group(fan[B].at(a), eta) for B in binf if eta in B]
        if any(len(p) != half + 1 for p in parts):
            raise PreconditionError("special group misaligned in a 1cDCQS copy", "special-group")
        for j in range(half + 1):
            cls.append(_union([p[j] for p in parts], ClassScope("PPC", group=eta)))
        cols[a] = Coloring(tuple(cls))
    return _finish(CertifiedDesign(design=d, claimed_kind="c1DCQS", derived_colorings=cols,
                                   special_group=eta, params={"g": m, "n": n, "s": 2},
                                   no_transport=(), provenance=f"type I inflation along an RDS(3,{k + 1},{n + 1})"))


# ---------------------------------------------------------------- named recipes

def _rdsqs4() -> CertifiedDesign:
    from .algebra import trivial_rds
    return recast(trivial_rds(3), "RDSQS")


def _rdsqs10(hole: tuple = ()) -> CertifiedDesign:
    from .algebra import moebius_rds
    base = moebius_rds(3)
    if hole:
        return recast(base, "gcDSQS_vh", kind="IncompleteSQS", hole=hole)
    return recast(base, "RDSQS")


def recipe_rdsqs10() -> CertifiedDesign:
    return _rdsqs10()


def recipe_rdsqs34() -> CertifiedDesign:
    from .data import load_dataset
    return fill_gcdcqs(load_dataset("rdcqs_8_4_2"), _rdsqs10(), _rdsqs10(hole=(8, 9)))


def recipe_mcdsqs20() -> CertifiedDesign:
    from .data import load_dataset
    return fill_c1dcqs(load_dataset("c1dcqs_2_9_2"), _rdsqs4())


def recipe_mcdsqs26() -> CertifiedDesign:
    from .data import load_dataset
    return load_dataset("mcdsqs_26")


def recipe_mcdsqs32() -> CertifiedDesign:
    from .data import load_dataset
    return load_dataset("mcdsqs_32")


def recipe_c1dcqs162() -> CertifiedDesign:
    from .algebra import moebius_rds
    from .data import load_dataset
    return inflate_c1(moebius_rds(9), load_dataset("c1dcqs_2_9_2"), load_dataset("c2dcqs_2_9_2"),
                      load_dataset("rdgdd_3_4_10_2"))


def recipe_mcdsqs164() -> CertifiedDesign:
    return fill_c1dcqs(recipe_c1dcqs162(), _rdsqs4())


RECIPES = {
    "rdsqs10": recipe_rdsqs10,
    "rdsqs34": recipe_rdsqs34,
    "mcdsqs20": recipe_mcdsqs20,
    "mcdsqs26": recipe_mcdsqs26,
    "mcdsqs32": recipe_mcdsqs32,
    "mcdsqs164": recipe_mcdsqs164,
}

CONSTRUCTIONS = {
    "fill_gcdcqs": (fill_gcdcqs, ("cqs", "filler_full", "filler_holed")),
    "inflate_rds": (inflate_rds, ("rds", "ing", "rdgdd")),
    "inflate_fan": (inflate_fan, ("fg", "ings", "fdgdds")),
    "quadruple_rsqs": (quadruple_rsqs, ("rsqs2", "ing", "rdtd")),
    "fill_c1dcqs": (fill_c1dcqs, ("c1", "filler")),
    "inflate_c1": (inflate_c1, ("rds", "c1", "c2", "rdgdd")),
}


def run_recipe(name: str) -> CertifiedDesign:
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; known: {', '.join(RECIPES)}")
    return RECIPES[name]()


# ---------------------------------------------------------------- declarative recipe files

def resolve_ingredient(ref, base_dir=None) -> CertifiedDesign | None:
    """Ingredient reference: None, a dataset id, a recipe name, 'moebius_rds:q', 'trivial_rds:k',
    a path to a .design file, or a dict {"ref": ..., "as": claimed kind, "hole": [...]}."""
    from pathlib import Path

    from .algebra import moebius_rds, trivial_rds
    from .data import DATASETS, load_dataset
    from .io import load_design

    if ref is None:
        return None
    if isinstance(ref, dict):
        base = resolve_ingredient(ref["ref"], base_dir)
        if "as" in ref or "hole" in ref:
            kw = {}
            if "hole" in ref:
                kw = {"hole": tuple(ref["hole"]), "kind": ref.get("design_kind", "IncompleteSQS")}
            base = recast(base, ref.get("as", base.claimed_kind), **kw)
        return base
    ref = str(ref)
    if ref in DATASETS:
        return load_dataset(ref)
    if ref in RECIPES:
        return run_recipe(ref)
    if ":" in ref:
        fn, arg = ref.split(":", 1)
        if fn == "moebius_rds":
            return moebius_rds(int(arg))
        if fn == "trivial_rds":
            return trivial_rds(int(arg))
    p = Path(ref)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    if not p.exists():
        raise PreconditionError(f"ingredient {ref!r} is neither a dataset, a recipe nor a file", "missing-ingredient")
    return load_design(p)


def run_recipe_file(path) -> CertifiedDesign:
    """Execute a JSON recipe: {"construction": name, "ingredients": {...}, "params": {...}}."""
    import json
    from pathlib import Path

    p = Path(path)
    spec = json.loads(p.read_text())
    name = spec.get("construction")
    if name not in CONSTRUCTIONS:
        raise PreconditionError(f"unknown construction {name!r}", "bad-recipe")
    fn, slots = CONSTRUCTIONS[name]
    ings = spec.get("ingredients", {})
    args = []
    for slot in slots:
        ref = ings.get(slot)
        if slot in ("ings", "fdgdds"):
            args.append({int(k): resolve_ingredient(r, p.parent) for k, r in (ref or {}).items()})
        else:
            args.append(resolve_ingredient(ref, p.parent))
    return fn(*args, **spec.get("params", {}))


def build(recipe: str) -> CertifiedDesign:
    """Named recipe or recipe file."""
    if recipe in RECIPES:
        return run_recipe(recipe)
    return run_recipe_file(recipe)
