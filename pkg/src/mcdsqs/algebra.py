"""Finite fields and the Moebius (inversive) plane over GF(q^2)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .model import (
    CertifiedDesign, ClassScope, ColorClass, Coloring, Design, ModelError, PreconditionError,
    all_subsets, colex_rank, derived_triples, expected_block_count,
)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p ** 0.5) + 1))


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, n) with q = p**n, or None."""
    for p in range(2, q + 1):
        if q % p == 0:
            n = 0
            r = q
            while r % p == 0:
                r //= p
                n += 1
            return (p, n) if r == 1 and is_prime(p) else None
    return None


@dataclass(eq=False)
class FieldTable:
    """GF(q) with q = p**n. Elements are ints 0..q-1.

    Over the prime field an element encodes sum c_i p^i. An extension of a
    base field GF(b) encodes c_0 + c_1 b + ... with c_i in the base field, so
    the base field sits inside as 0..b-1. ``modulus`` lists the low
    coefficients (constant first) of the monic defining polynomial.
    """

    p: int
    n: int
    modulus: tuple
    base: "FieldTable | None" = None
    exp: np.ndarray = field(default=None, repr=False)
    log: np.ndarray = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.coef_order ** self.degree

    @property
    def coef_order(self) -> int:
        return self.base.q if self.base is not None else self.p

    @property
    def degree(self) -> int:
        return len(self.modulus)

    # -- coefficient arithmetic
    def _cadd(self, a, b):
        return self.base.add(a, b) if self.base is not None else (a + b) % self.p

    def _cmul(self, a, b):
        return self.base.mul(a, b) if self.base is not None else (a * b) % self.p

    def _cneg(self, a):
        return self.base.neg(a) if self.base is not None else (-a) % self.p

    def digits(self, a) -> list[np.ndarray]:
        a = np.asarray(a, dtype=np.int64)
        b = self.coef_order
        return [(a // b ** i) % b for i in range(self.degree)]

    def undigits(self, ds) -> np.ndarray:
        b = self.coef_order
        return sum(np.asarray(d, dtype=np.int64) * b ** i for i, d in enumerate(ds))

    # -- field operations (vectorized over numpy arrays)
    def add(self, a, b):
        return self.undigits([self._cadd(x, y) for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a):
        return self.undigits([self._cneg(x) for x in self.digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        z = (a == 0) | (b == 0)
        la = self.log[np.where(a == 0, 1, a)]
        lb = self.log[np.where(b == 0, 1, b)]
        return np.where(z, 0, self.exp[la + lb])

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0")
        return self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    @property
    def primitive(self) -> int:
        return int(self.exp[1])

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Full (add, mul) tables; for small fields only."""
        if self.q > 4096:
            raise ValueError("table too large")
        x = np.arange(self.q)
        A, B = np.meshgrid(x, x, indexing="ij")
        return self.add(A, B), self.mul(A, B)

    def modulus_string(self) -> str:
        terms = ["x^%d" % self.degree]
        for i in range(self.degree - 1, -1, -1):
            c = int(self.modulus[i])
            if c:
                terms.append(("%d" % c if c != 1 or i == 0 else "") + ("x^%d" % i if i > 1 else "x" if i == 1 else ""))
        return " + ".join(terms)

    # -- polynomial helpers on coefficient lists (constant first)
    def _polymul_mod(self, a: list, b: list) -> list:
        n = self.degree
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = int(self._cadd(prod[i + j], self._cmul(x, y)))
        for d in range(2 * n - 2, n - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for i, m in enumerate(self.modulus):
                    prod[d - n + i] = int(self._cadd(prod[d - n + i], self._cneg(self._cmul(c, m))))
        return prod[:n]


def _poly_divides(f: list, g: list, p: int) -> bool:
    """Does f divide g over GF(p)? Coefficient lists constant first; f monic."""
    r = list(g)
    df = len(f) - 1
    while len(r) - 1 >= df and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < df:
            break
        c = r[-1]
        shift = len(r) - 1 - df
        for i, fc in enumerate(f):
            r[shift + i] = (r[shift + i] - c * fc) % p
        r.pop()
    return not any(r)


def _irreducible_prime(low: list, p: int) -> bool:
    f = list(low) + [1]
    n = len(low)
    for d in range(1, n // 2 + 1):
        for cs in product(range(p), repeat=d):
            if _poly_divides(list(cs) + [1], f, p):
                return False
    return True


def _finish(F: FieldTable) -> FieldTable:
    """Find a primitive element and fill the log/exp tables."""
    q = F.q
    if q == 2:
        F.exp = np.array([1, 1, 1], dtype=np.int64)
        F.log = np.array([0, 0], dtype=np.int64)
        return F
    for g in range(2 if F.degree == 1 else F.coef_order, q):
        gd = [int(d) for d in F.digits(g)]
        cur = [1] + [0] * (F.degree - 1)
        seq = [1]
        while True:
            cur = [int(c) for c in F._polymul_mod(cur, gd)]
            val = int(F.undigits(cur))
            if val == 1:
                break
            seq.append(val)
        if len(seq) == q - 1:
            exp = np.array(seq + seq + [1], dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            log[np.array(seq)] = np.arange(q - 1)
            F.exp, F.log = exp, log
            return F
    raise ModelError("no primitive element found")


@lru_cache(maxsize=None)
def build_field(p: int, n: int = 1) -> FieldTable:
    """GF(p^n) with the least irreducible monic modulus (low coefficients read as base-p integers)."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime", "not-prime")
    if n < 1 or p ** n > 2 ** 16:
        raise PreconditionError(f"unsupported field order {p}^{n}", "field-too-large")
    if n == 1:
        return _finish(FieldTable(p=p, n=1, modulus=(0,)))
    for code in range(p ** n):
        low = [(code // p ** i) % p for i in range(n)]
        if low[0] and _irreducible_prime(low, p):
            return _finish(FieldTable(p=p, n=n, modulus=tuple(low)))
    raise ModelError("no irreducible polynomial found")


@lru_cache(maxsize=None)
def quadratic_extension(base: FieldTable) -> FieldTable:
    """GF(b^2) over GF(b) via the least irreducible monic x^2 + c1 x + c0 (code c0 + b*c1)."""
    b = base.q
    els = np.arange(b)
    for code in range(b * b):
        c0, c1 = code % b, code // b
        if c0 == 0:
            continue
        vals = base.add(base.add(base.mul(els, els), base.mul(c1, els)), c0)
        if np.all(vals != 0):
            return _finish(FieldTable(p=base.p, n=2 * base.n, modulus=(c0, c1), base=base))
    raise ModelError("no irreducible quadratic found")


def field_for_order(q: int) -> FieldTable:
    pn = prime_power(q)
    if pn is None:
        raise PreconditionError(f"{q} is not a prime power", "not-prime-power")
    return build_field(*pn)


# ---------------------------------------------------------------- Moebius plane

class _Proj:
    """Projective line over a field: points 0..Q-1 and INF = Q; homogeneous pairs."""

    def __init__(self, F: FieldTable):
        self.F = F
        self.Q = F.q
        self.INF = F.q

    def hom(self, z: int) -> tuple[int, int]:
        return (1, 0) if z == self.INF else (z, 1)

    def dehom(self, x: int, y: int) -> int:
        F = self.F
        if y == 0:
            return self.INF
        return int(F.div(x, y))

    def apply(self, M, z: int) -> int:
        (a, b), (c, d) = M
        F = self.F
        x, y = self.hom(z)
        return self.dehom(int(F.add(F.mul(a, x), F.mul(b, y))), int(F.add(F.mul(c, x), F.mul(d, y))))


def _circle_through(P: _Proj, sub: int, z1: int, z2: int, z3: int) -> tuple:
    """Image of GF(sub) u {inf} under the map sending 0, 1, inf to z1, z2, z3."""
    F = P.F
    u1, u2, u3 = P.hom(z1), P.hom(z2), P.hom(z3)
    # alpha*u3 + beta*u1 = u2, by Cramer's rule
    det = int(F.sub(F.mul(u3[0], u1[1]), F.mul(u1[0], u3[1])))
    alpha = int(F.div(F.sub(F.mul(u2[0], u1[1]), F.mul(u1[0], u2[1])), det))
    beta = int(F.div(F.sub(F.mul(u3[0], u2[1]), F.mul(u2[0], u3[1])), det))
    M = ((int(F.mul(alpha, u3[0])), int(F.mul(beta, u1[0]))),
         (int(F.mul(alpha, u3[1])), int(F.mul(beta, u1[1]))))
    pts = [P.apply(M, s) for s in range(sub)] + [P.apply(M, P.INF)]
    return tuple(sorted(pts))


def moebius_circles(q: int) -> list[tuple]:
    """Circles of the Moebius plane of order q, one per uncovered triple (sorted)."""
    Fq = field_for_order(q)
    F = quadratic_extension(Fq)
    P = _Proj(F)
    v = q * q + 1
    subsets = all_subsets(v, 3)
    covered = np.zeros(len(subsets), dtype=bool)
    circles = []
    k = q + 1
    pick = np.array(list(combinations(range(k), 3)), dtype=np.int64)
    for i in range(len(subsets)):
        if covered[i]:
            continue
        z1, z2, z3 = (int(t) for t in subsets[i])
        c = _circle_through(P, q, z1, z2, z3)
        if len(set(c)) != k or z1 not in c or z2 not in c or z3 not in c:
            raise ModelError(f"degenerate circle through {z1, z2, z3}")
        circles.append(c)
        covered[colex_rank(np.array(c, dtype=np.int64)[pick], v)] = True
    return sorted(circles)


def moebius_circles_bfs(q: int) -> list[tuple]:
    """Same circle set, as the orbit of the standard subline under z+1, wz and 1/z."""
    Fq = field_for_order(q)
    F = quadratic_extension(Fq)
    P = _Proj(F)
    w = F.primitive
    maps = [((1, 1), (0, 1)), ((w, 0), (0, 1)), ((0, 1), (1, 0))]
    imgs = [np.array([P.apply(M, z) for z in range(P.INF + 1)], dtype=np.int64) for M in maps]
    start = tuple(sorted(list(range(q)) + [P.INF]))
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        arr = np.array(c)
        for im in imgs:
            d = tuple(sorted(im[arr].tolist()))
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return sorted(seen)


def moebius_rds(q: int, max_q: int = 16, n: int = 2) -> CertifiedDesign:
    """RDS(3, q+1, q^n+1): the single block for n = 1, the Moebius plane for n = 2."""
    from .resolver import parallelism_partition
    from .verify import verify_certificate

    if prime_power(q) is None:
        raise PreconditionError(f"{q} is not a prime power", "not-prime-power")
    if n == 1:
        return trivial_rds(q)
    if n != 2:
        raise PreconditionError(f"RDS(3,{q + 1},{q}^{n}+1) is only built for n in (1, 2)", "capability")
    if q > max_q:
        raise PreconditionError(f"q={q} exceeds the default bound {max_q}", "q-too-large")
    v = q * q + 1
    blocks = moebius_circles(q)
    if len(blocks) != expected_block_count("Steiner", v=v, t=3, k=q + 1):
        raise ModelError("wrong circle count")
    F = quadratic_extension(field_for_order(q))
    d = Design(v=v, blocks=tuple(blocks), t=3, K=frozenset({q + 1}), kind="Steiner",
               label_map={"inf": v - 1},
               meta={"modulus_base": field_for_order(q).modulus_string(),
                     "modulus_ext": list(F.modulus)})
    cols = {}
    for x, res in derived_triples(d).items():
        ground = [p for p in range(v) if p != x]
        classes = parallelism_partition(res, ground)
        cols[x] = Coloring(tuple(ColorClass(np.array(c), ClassScope("PC")) for c in classes))
    cert = CertifiedDesign(design=d, claimed_kind="RDS", derived_colorings=cols,
                           params={"t": 3, "k": q + 1, "v": v, "q": q},
                           provenance=f"Moebius plane over GF({q}^2)")
    rep = verify_certificate(cert)
    if not rep.passed:
        from .model import CertificationError
        raise CertificationError(f"moebius_rds({q}) failed:\n{rep.summary()}", rep)
    return cert.with_(report=rep)


def trivial_rds(k: int) -> CertifiedDesign:
    """The single-block S(3, k+1, k+1); each derived design is one block, one class."""
    from .verify import verify_certificate

    if k < 3:
        raise PreconditionError("k must be at least 3", "bad-parameter")
    v = k + 1
    d = Design(v=v, blocks=(tuple(range(v)),), t=3, K=frozenset({v}), kind="Steiner")
    cols = {x: Coloring((ColorClass(np.array([[p for p in range(v) if p != x]]), ClassScope("PC")),))
            for x in range(v)}
    cert = CertifiedDesign(design=d, claimed_kind="RDS", derived_colorings=cols,
                           params={"t": 3, "k": v, "v": v}, provenance="single block")
    return cert.with_(report=verify_certificate(cert))
