"""Constant-weight codes from colored quadruple systems and their distance checks."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .model import CertifiedDesign, ModelError, PreconditionError
from .verify import VerifyReport

PAIRWISE_LIMIT = 2000
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass
class CWCode:
    n: int
    w: int
    q: int
    d: int
    supports: np.ndarray  # (N, w), sorted rows
    symbols: np.ndarray  # (N, w), symbol at the matching support coordinate

    def __len__(self):
        return len(self.supports)

    @property
    def header(self) -> str:
        return f"({self.n}, {len(self)}, {self.d}; {self.w})_{self.q}"

    def dense(self, rows=None) -> np.ndarray:
        sup, sym = (self.supports, self.symbols) if rows is None else (self.supports[rows], self.symbols[rows])
        out = np.zeros((len(sup), self.n), dtype=np.int64)
        out[np.repeat(np.arange(len(sup)), self.w), sup.ravel()] = sym.ravel()
        return out


def emit_code(cert: CertifiedDesign) -> CWCode:
    """Symbol at x in the word of block B: 1 + index of the class holding B - {x} at x."""
    if cert.report is not None and not cert.report.passed:
        raise PreconditionError("certificate does not pass verification", "uncertified")
    from .constructions import full_colorings

    d = cert.design
    sup = np.sort(d.array, axis=1)
    index = {tuple(b): i for i, b in enumerate(sup.tolist())}
    sym = np.zeros_like(sup)
    cols = full_colorings(cert)
    q = 1
    for x in d.point_list:
        col = cols[x]
        q = max(q, col.r + 1)
        for c, cl in enumerate(col):
            for row in cl.blocks.tolist():
                b = tuple(sorted(row + [x]))
                i = index.get(b)
                if i is None:
                    raise ModelError(f"class triple {row} at {x} is not a block residue")
                j = b.index(x)
                if sym[i, j]:
                    raise ModelError(f"triple {row} lies in two classes at {x}")
                sym[i, j] = c + 1
    if (sym == 0).any():
        i, j = np.argwhere(sym == 0)[0]
        raise ModelError(f"triple {[p for p in sup[i] if p != sup[i, j]]} is in no class at {sup[i, j]}")
    return CWCode(n=d.n_points, w=sup.shape[1], q=q, d=2 * sup.shape[1] - 2, supports=sup, symbols=sym)


def _pairwise_min(dense: np.ndarray) -> tuple[int, tuple[int, int]]:
    if len(dense) < 2:
        return 0, (-1, -1)
    dist = np.rint(cdist(dense, dense, metric="hamming") * dense.shape[1]).astype(np.int64)
    np.fill_diagonal(dist, dense.shape[1] + 1)
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    return int(dist[i, j]), (int(min(i, j)), int(max(i, j)))


def _pair_bucket(code: CWCode, rep: VerifyReport) -> tuple[int, int] | None:
    """Weight-4 supports from a 3-design: distance < 6 only via a shared pair with equal symbols or a shared triple."""
    sup, sym = code.supports, code.symbols
    n, w = code.n, code.w
    N = len(code)
    # shared triples
    tri = []
    for a, b, c in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)][: comb(w, 3)]:
        tri.append((sup[:, a] * n + sup[:, b]) * n + sup[:, c])
    tri = np.concatenate(tri)
    owner = np.tile(np.arange(N), comb(w, 3))
    u, cnt = np.unique(tri, return_counts=True)
    if (cnt > 1).any():
        t = u[np.argmax(cnt > 1)]
        who = owner[tri == t][:2]
        rep.add("shared-triple", {"codewords": who.tolist(), "supports": sup[who].tolist()})
    # ordered pairs (x, y) with the symbol at x
    keys, own = [], []
    for a in range(w):
        for b in range(w):
            if a != b:
                keys.append((sup[:, a] * n + sup[:, b]) * code.q + sym[:, a])
                own.append(np.arange(N))
    keys = np.concatenate(keys)
    own = np.concatenate(own)
    order = np.argsort(keys, kind="stable")
    ks = keys[order]
    dup = np.flatnonzero(ks[1:] == ks[:-1])
    if len(dup):
        i, j = own[order[dup[0]]], own[order[dup[0] + 1]]
        k = int(ks[dup[0]])
        x, y = divmod(k // code.q, n)
        rep.add("equal-symbol-on-shared-pair", {"codewords": [int(i), int(j)], "pair": (int(x), int(y)),
                                                "symbol": k % code.q})
    # a distance-6 witness: two supports through a common pair
    rest = [(sup[:, a] * n + sup[:, b]) for a in range(w) for b in range(a + 1, w)]
    allp = np.concatenate(rest)
    ownp = np.tile(np.arange(N), len(rest))
    o = np.argsort(allp, kind="stable")
    same = np.flatnonzero(allp[o][1:] == allp[o][:-1])
    if len(same):
        return int(ownp[o[same[0]]]), int(ownp[o[same[0] + 1]])
    return None


def _distance(code: CWCode, i: int, j: int) -> int:
    a = dict(zip(code.supports[i].tolist(), code.symbols[i].tolist()))
    b = dict(zip(code.supports[j].tolist(), code.symbols[j].tolist()))
    return sum(1 for p in set(a) | set(b) if a.get(p, 0) != b.get(p, 0))


def verify_code(code: CWCode, subsample: int = PAIRWISE_LIMIT, seed: int = 0) -> VerifyReport:
    rep = VerifyReport()
    sup, sym = code.supports, code.symbols
    N = len(code)
    rep.stats.update(n=code.n, w=code.w, q=code.q, d=code.d, size=N)
    if sup.shape != sym.shape or (N and sup.shape[1] != code.w):
        rep.add("shape", {"supports": sup.shape, "symbols": sym.shape})
        return rep
    if N and (np.diff(np.sort(sup, axis=1), axis=1) == 0).any():
        rep.add("weight", int(np.argmax((np.diff(np.sort(sup, axis=1), axis=1) == 0).any(axis=1))))
    if N and ((sup < 0) | (sup >= code.n)).any():
        rep.add("coordinate-range", None)
    if N and ((sym < 1) | (sym >= code.q)).any():
        rep.add("alphabet", {"codeword": int(np.argmax(((sym < 1) | (sym >= code.q)).any(axis=1)))})
    if code.w == 4 and N != comb(code.n, 3) // 4:
        rep.add("size", {"expected": comb(code.n, 3) // 4, "got": N})
    if not rep.passed:
        return rep
    if N <= PAIRWISE_LIMIT:
        dmin, (i, j) = _pairwise_min(code.dense())
        rep.stats.update(method="pairwise", min_distance=dmin, witness=(i, j))
        if dmin != code.d:
            rep.add("min-distance", {"expected": code.d, "got": dmin, "codewords": (i, j),
                                     "words": [code.dense()[i].tolist(), code.dense()[j].tolist()]})
        return rep
    rep.stats["method"] = "pair-bucket"
    wit = _pair_bucket(code, rep)
    if wit is None:
        rep.add("no-distance-witness", None)
    else:
        dw = _distance(code, *wit)
        rep.stats["witness"] = (wit, dw)
        if rep.passed and dw != code.d:
            rep.add("min-distance", {"expected": code.d, "witness": wit, "got": dw})
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(N, size=min(subsample, N), replace=False))
    dmin, (i, j) = _pairwise_min(code.dense(idx))
    rep.stats["subsample_min_distance"] = dmin
    if dmin < code.d:
        rep.add("subsample-min-distance", {"got": dmin, "codewords": (int(idx[i]), int(idx[j]))})
    rep.stats["min_distance"] = code.d if rep.passed else None
    return rep


def anticode_bound_check(n: int, w: int, t: int, q: int, code_size: int) -> VerifyReport:
    """|C| * |A_q(n,w,t)| against |J_q(n,w)|; stats['perfect'] is True on equality."""
    if not (0 < t <= w < n) or 2 * w - t > n or q < 2:
        raise PreconditionError(f"bad parameters n={n} w={w} t={t} q={q}", "bad-parameter")
    anti = comb(n - t, w - t) * (q - 1) ** w
    space = comb(n, w) * (q - 1) ** w
    rep = VerifyReport()
    prod = code_size * anti
    rep.stats.update(anticode=anti, space=space, product=prod, perfect=prod == space)
    if prod > space:
        rep.add("bound-violated", {"product": prod, "space": space})
    elif prod < space:
        rep.add("not-perfect", {"product": prod, "space": space})
    return rep


# ---------------------------------------------------------------- text forms

def code_text(code: CWCode) -> str:
    lines = [f"# {code.header}", f"n={code.n} w={code.w} q={code.q} d={code.d}"]
    for s, y in zip(code.supports.tolist(), code.symbols.tolist()):
        lines.append(" ".join(map(str, s)) + " | " + " ".join(map(str, y)))
    return "\n".join(lines) + "\n"


def dense_text(code: CWCode) -> str:
    """One row per codeword; single characters when q fits the digit alphabet."""
    D = code.dense()
    lines = [f"# {code.header}"]
    if code.q <= len(_DIGITS):
        lines += ["".join(_DIGITS[c] for c in row) for row in D.tolist()]
    else:
        lines += [" ".join(map(str, row)) for row in D.tolist()]
    return "\n".join(lines) + "\n"


def parse_code(text: str) -> CWCode:
    head = None
    sup, sym = [], []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        if head is None:
            head = dict(kv.split("=") for kv in line.split())
            continue
        a, b = line.split("|")
        sup.append([int(p) for p in a.split()])
        sym.append([int(p) for p in b.split()])
    if head is None:
        raise ModelError("missing code header")
    w = int(head["w"])
    return CWCode(n=int(head["n"]), w=w, q=int(head["q"]), d=int(head["d"]),
                  supports=np.array(sup, dtype=np.int64).reshape(-1, w),
                  symbols=np.array(sym, dtype=np.int64).reshape(-1, w))


def save_code(code: CWCode, path, fmt: str = "text") -> None:
    Path(path).write_text(dense_text(code) if fmt == "dense" else code_text(code))
