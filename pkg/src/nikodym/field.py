"""Exact arithmetic in F_q for odd prime powers q = p^m.

Field elements are plain integers in [0, q).  The index sum(a_i * p**i)
encodes the residue class a_0 + a_1*x + ... + a_{m-1}*x^(m-1) modulo the
field polynomial, so 0 and 1 are the additive and multiplicative identities
and the prime subfield occupies the indices below p.  The field polynomial
is the lexicographically smallest monic irreducible of degree m over F_p,
coefficients compared low degree first; for m = 1 this degenerates to the
polynomial x and the index equals the value.

A FieldCtx carries lookup tables sized for desk scale: full q-by-q
addition and multiplication tables up to q = 2**10, discrete log tables
above that, and nothing at all beyond q = 2**20.  Contexts are immutable
once built and cached per (p, m, modulus), so they can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import CapacityExceeded, InvalidField, SubfieldRequired

MAX_Q = 1 << 20
FULL_TABLE_Q = 1 << 10


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division (desk-scale n)."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomial arithmetic over F_p, coefficients low degree first


def _poly_trim(a: list[int]) -> list[int]:
    i = len(a)
    while i > 0 and a[i - 1] == 0:
        i -= 1
    return a[:i]


def _poly_mul_mod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    m = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % p
    # modulus is monic: x^m = -sum(modulus[j] x^j, j < m)
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for j in range(m):
                prod[k - m + j] = (prod[k - m + j] - c * modulus[j]) % p
    prod = prod[:m]
    return prod + [0] * (m - len(prod))


def _poly_pow_mod(a: list[int], e: int, modulus: list[int], p: int) -> list[int]:
    m = len(modulus) - 1
    result = [1] + [0] * (m - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mul_mod(result, base, modulus, p)
        base = _poly_mul_mod(base, base, modulus, p)
        e >>= 1
    return result


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by monic b."""
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    for k in range(len(a) - 1, db - 1, -1):
        c = (a[k] * inv_lead) % p
        if c:
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return _poly_trim(a[:db])


def poly_is_irreducible(coeffs: tuple[int, ...] | list[int], p: int) -> bool:
    """Exhaustive factor search: no monic divisor of degree 1..deg/2."""
    f = [c % p for c in coeffs]
    if not f or f[-1] != 1:
        return False
    deg = len(f) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for dg in range(1, deg // 2 + 1):
        for lower in iter_product(range(p), repeat=dg):
            g = list(lower) + [1]
            if not _poly_rem(f, g, p):
                return False
    return True


def canonical_modulus(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree m over F_p."""
    if m == 1:
        return (0, 1)
    for lower in iter_product(range(p), repeat=m):
        f = list(lower) + [1]
        if poly_is_irreducible(f, p):
            return tuple(f)
    raise InvalidField(f"no irreducible of degree {m} over F_{p}")  # unreachable


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.m


@dataclass
class SubfieldCtx:
    """The index-two subfield of F_q (q a square) with the data the parabola
    construction needs: the canonical non-square c, a fixed square root of c
    in F_q, and the table realizing x = a + b*sqrt(c) -> a."""

    field: "FieldCtx"
    sqrt_q: int
    embed: np.ndarray  # subfield index -> F_q index, a field homomorphism
    in_subfield: np.ndarray  # bool per F_q index
    nonsquare: int  # c, as an F_q index inside the embedded subfield
    sqrt_nonsquare: int  # canonical sqrt of c in F_q
    minus_one_is_square: bool
    part_table: np.ndarray  # F_q index -> subfield part, as an F_q index


class FieldCtx:
    """Arithmetic context for one field.  Do not instantiate directly; use
    build_field, which validates parameters and caches contexts."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p = spec.p
        self.m = spec.m
        self.q = spec.q
        self._build_digits()
        self._build_generator_tables()
        if self.q <= FULL_TABLE_Q:
            self._build_full_tables()
        else:
            self._add_tab = None
            self._sub_tab = None
            self._mul_tab = None
        self._build_square_tables()
        self.subfield = self._build_subfield() if self.m % 2 == 0 else None

    # -- construction ------------------------------------------------------

    def _build_digits(self):
        q, p, m = self.q, self.p, self.m
        idx = np.arange(q, dtype=np.int64)
        self._digits = np.empty((q, m), dtype=np.int32)
        for i in range(m):
            self._digits[:, i] = (idx // p**i) % p
        self._p_powers = np.array([p**i for i in range(m)], dtype=np.int64)
        neg_digits = (-self._digits) % p
        self._neg_tab = (neg_digits @ self._p_powers).astype(np.int32)

    def _element_poly(self, e: int) -> list[int]:
        return [int(v) for v in self._digits[e]]

    def _poly_index(self, poly: list[int]) -> int:
        return int(sum(c * self.p**i for i, c in enumerate(poly)))

    def _build_generator_tables(self):
        q, p = self.q, self.p
        modulus = list(self.spec.modulus)
        factors = prime_factors(q - 1)
        gen = None
        for cand in range(2, q):
            cp = self._element_poly(cand)
            if all(
                self._poly_index(_poly_pow_mod(cp, (q - 1) // f, modulus, p)) != 1
                for f in factors
            ):
                gen = cand
                break
        if gen is None:  # q == 3 has generator 2; every field has one
            gen = q - 1
        self.generator = gen
        exp = np.empty(q - 1, dtype=np.int32)
        log = np.full(q, -1, dtype=np.int64)
        cur = [1] + [0] * (self.m - 1)
        gp = self._element_poly(gen)
        for i in range(q - 1):
            e = self._poly_index(cur)
            exp[i] = e
            log[e] = i
            cur = _poly_mul_mod(cur, gp, modulus, p)
        self._exp = exp
        self._log = log
        inv = np.zeros(q, dtype=np.int32)
        nz = np.arange(1, q)
        inv[nz] = exp[(q - 1 - log[nz]) % (q - 1)]
        self._inv_tab = inv

    def _build_full_tables(self):
        q, p = self.q, self.p
        d = self._digits.astype(np.int64)
        self._add_tab = (
            ((d[:, None, :] + d[None, :, :]) % p) @ self._p_powers
        ).astype(np.int32)
        self._sub_tab = self._add_tab[:, self._neg_tab]
        log = self._log
        mul = np.zeros((q, q), dtype=np.int32)
        nz = np.arange(1, q)
        mul[1:, 1:] = self._exp[(log[nz, None] + log[None, nz]) % (q - 1)]
        self._mul_tab = mul

    def _build_square_tables(self):
        q = self.q
        squares = self.mul_arr(np.arange(q), np.arange(q))
        # np.unique reports the first occurrence, which for ascending y is the
        # smaller member of the pair {y, -y}: the canonical square root.
        vals, first = np.unique(squares, return_index=True)
        sqrt_tab = np.full(q, -1, dtype=np.int32)
        sqrt_tab[vals] = first
        self._sqrt_tab = sqrt_tab
        self._residue = sqrt_tab >= 0
        assert int(self._residue.sum()) == (q - 1) // 2 + 1

    def _build_subfield(self) -> SubfieldCtx:
        sub = build_field(self.p, self.m // 2)
        sq = sub.q
        # the embedding sends the subfield generator to the smallest root of
        # the subfield polynomial inside F_q
        coeffs = list(sub.spec.modulus)
        acc = np.zeros(self.q, dtype=np.int32)
        universe = np.arange(self.q)
        for c in reversed(coeffs):
            acc = self.add_arr(self.mul_arr(acc, universe), c % self.p)
        roots = np.nonzero(acc == 0)[0]
        beta = int(roots[0])
        pows = [1]
        for _ in range(1, self.m // 2):
            pows.append(self.mul(pows[-1], beta))
        embed = np.zeros(sq, dtype=np.int32)
        for i in range(self.m // 2):
            embed = self.add_arr(embed, self.mul_arr(sub._digits[:, i], pows[i]))
        in_subfield = np.zeros(self.q, dtype=bool)
        in_subfield[embed] = True
        nonsq_sub = next(x for x in range(sq) if not sub._residue[x])
        c = int(embed[nonsq_sub])
        sqrt_c = self.sqrt(c)
        assert sqrt_c is not None  # subfield elements are squares in F_q
        # x = a + b*sqrt(c) with a, b in the subfield decomposes uniquely
        part = np.full(self.q, -1, dtype=np.int32)
        xs = self.add_arr(embed[:, None], self.mul_arr(embed[None, :], sqrt_c))
        part[xs] = embed[:, None]
        assert not np.any(part < 0)
        minus_one = sub._residue[sub.neg(1)]
        return SubfieldCtx(
            field=sub,
            sqrt_q=sq,
            embed=embed,
            in_subfield=in_subfield,
            nonsquare=c,
            sqrt_nonsquare=sqrt_c,
            minus_one_is_square=bool(minus_one),
            part_table=part,
        )

    # -- scalar ops --------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self._add_tab is not None:
            return int(self._add_tab[a, b])
        if self.m == 1:
            return (a + b) % self.p
        return int(self.add_arr(np.array([a]), np.array([b]))[0])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        return int(self._neg_tab[a])

    def mul(self, a: int, b: int) -> int:
        if self._mul_tab is not None:
            return int(self._mul_tab[a, b])
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self._inv_tab[a])

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def from_int(self, k: int) -> int:
        """The image of the integer k under Z -> F_p -> F_q."""
        return k % self.p

    def is_square(self, a: int) -> bool:
        """True for 0 and for elements with even discrete log."""
        return bool(self._residue[a])

    def sqrt(self, a: int) -> int | None:
        """Canonical square root: the smaller index of the +-pair, if any."""
        s = int(self._sqrt_tab[a])
        return None if s < 0 else s

    def subfield_part(self, x: int) -> int:
        """The component a of x = a + b*sqrt(c) over the index-two subfield."""
        if self.subfield is None:
            raise SubfieldRequired(f"q = {self.q} is not a square")
        return int(self.subfield.part_table[x])

    # -- vectorized ops over arrays of element indices ---------------------

    def add_arr(self, a, b):
        if self._add_tab is not None:
            return self._add_tab[a, b]
        if self.m == 1:
            return ((np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64))
                    % self.p).astype(np.int32)
        dsum = (self._digits[a] + self._digits[b]) % self.p
        return (dsum @ self._p_powers).astype(np.int32)

    def sub_arr(self, a, b):
        if self._sub_tab is not None:
            return self._sub_tab[a, b]
        return self.add_arr(a, self._neg_tab[b])

    def neg_arr(self, a):
        return self._neg_tab[a]

    def mul_arr(self, a, b):
        if self._mul_tab is not None:
            return self._mul_tab[a, b]
        if self.m == 1:
            return ((np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64))
                    % self.p).astype(np.int32)
        a = np.asarray(a)
        b = np.asarray(b)
        la, lb = self._log[a], self._log[b]
        out = self._exp[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out).astype(np.int32)

    def power_arr(self, a, e: int):
        result = np.ones_like(np.asarray(a), dtype=np.int32)
        base = np.asarray(a, dtype=np.int32)
        while e:
            if e & 1:
                result = self.mul_arr(result, base)
            base = self.mul_arr(base, base)
            e >>= 1
        return result

    def residue_arr(self, a):
        return self._residue[a]

    def __repr__(self):
        return f"FieldCtx(p={self.p}, m={self.m}, modulus={self.spec.modulus})"


_field_cache: dict[tuple, FieldCtx] = {}


def build_field(p: int, m: int, modulus: tuple[int, ...] | None = None) -> FieldCtx:
    """Build (or fetch from cache) the context for F_{p^m}.

    A non-canonical modulus may be supplied, e.g. when loading a set file
    written by another tool; it must still be monic irreducible of degree m.
    """
    if m < 1:
        raise InvalidField(f"m = {m} must be at least 1")
    if p == 2:
        raise InvalidField(f"p = {p} is not an odd prime")
    # cheap bounds first so untrusted (p, m) from a file can neither build a
    # gigantic integer nor run a long trial division
    if p > MAX_Q or m > 24 or p**m > MAX_Q:
        raise CapacityExceeded(f"q = {p}**{m} exceeds the table budget {MAX_Q}")
    if not is_prime(p):
        raise InvalidField(f"p = {p} is not an odd prime")
    if modulus is None:
        modulus = canonical_modulus(p, m)
    else:
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise InvalidField(f"modulus {modulus} is not monic of degree {m}")
        if not poly_is_irreducible(modulus, p):
            raise InvalidField(f"modulus {modulus} is reducible over F_{p}")
    key = (p, m, modulus)
    ctx = _field_cache.get(key)
    if ctx is None:
        ctx = FieldCtx(FieldSpec(p, m, modulus))
        _field_cache[key] = ctx
    return ctx


def validate_parabola_field(ctx: FieldCtx) -> bool:
    """True iff q is a square and -1 is a square in the index-two subfield.

    This is the hypothesis under which the planar parabola complement
    works: rejected for q = 9 and q = 49, satisfied for q = 25 and q = 81.
    """
    return ctx.subfield is not None and ctx.subfield.minus_one_is_square
