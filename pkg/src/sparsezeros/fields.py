"""Finite fields F_{p^m} with canonical moduli, Frobenius and compatible embeddings.

Elements are stored as integer codes ``c_0 + c_1 p + ... + c_{m-1} p^{m-1}``
where ``c_t`` is the coefficient of ``g^t`` and ``g`` is the class of ``x``
modulo the canonical modulus.  The hot paths (series arithmetic, residual
root searches) work on codes directly; :class:`FqElem` is the friendly
wrapper used at API boundaries.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, FieldError
from .limits import max_enum

__all__ = [
    "FieldSpec",
    "FqElem",
    "fq_make",
    "frobenius",
    "embed",
    "embedding_table",
    "poly_roots_ff",
    "is_prime",
]

_ADD_TABLE_MAX = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over F_p as low-first coefficient lists ---------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _fp_divmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            q[i - db] = c
            for j, y in enumerate(b):
                a[i - db + j] = (a[i - db + j] - c * y) % p
    return _trim(q), _trim(a[:db])


def _fp_mod(a, b, p):
    return _fp_divmod(a, b, p)[1]


def _fp_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _fp_powmod(a, n, mod, p):
    result = [1]
    base = _fp_mod(a, mod, p)
    while n:
        if n & 1:
            result = _fp_mod(_fp_mul(result, base, p), mod, p)
        base = _fp_mod(_fp_mul(base, base, p), mod, p)
        n >>= 1
    return result


def is_irreducible(poly, p: int) -> bool:
    """Ben-Or test: no common factor with x^{p^i} - x for i <= deg/2."""
    poly = _trim(list(poly))
    m = len(poly) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    h = [0, 1]
    for _ in range(m // 2):
        h = _fp_powmod(h, p, poly, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_fp_gcd(poly, _trim(diff), p)) > 1:
            return False
    return True


def _canonical_modulus(p: int, m: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=m):
        cand = list(low) + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise FieldError(f"no irreducible polynomial of degree {m} over F_{p}")


# -- the field ---------------------------------------------------------------

class FieldSpec:
    """The finite field F_{p^m} = F_p[g]/(modulus).

    Instances are canonical per ``(p, m)``; build them with :func:`fq_make`.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...]):
        self.p = p
        self.m = m
        self.q = p ** m
        self.modulus = modulus
        q = self.q
        self.pw = np.array([p ** t for t in range(m)], dtype=np.int64)
        self.digits = np.array(
            [[(c // p ** t) % p for t in range(m)] for c in range(q)], dtype=np.int64
        ).reshape(q, m)
        # row t: reduction of g^t for t < 2m-1
        red = []
        for t in range(2 * m - 1):
            mono = [0] * t + [1]
            r = _fp_mod(mono, list(modulus), p) if t >= m else mono
            red.append(list(r) + [0] * (m - len(r)))
        self.red = np.array(red, dtype=np.int64)
        self.prim = self._find_primitive()
        self._build_log_tables()
        self.neg_table = [self.from_vector([(-c) % p for c in self.vector(a)]) for a in range(q)]
        self.add_table = None
        if p != 2 and m > 1 and q <= _ADD_TABLE_MAX:
            d = self.digits
            s = (d[:, None, :] + d[None, :, :]) % p
            self.add_table = (s @ self.pw).tolist()

    def __repr__(self):
        return f"FieldSpec(p={self.p}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self):
        return hash(("FieldSpec", self.p, self.m))

    def __reduce__(self):
        return (fq_make, (self.p, self.m))

    # vectors <-> codes
    def vector(self, a: int) -> list[int]:
        return [(a // self.p ** t) % self.p for t in range(self.m)]

    def from_vector(self, v) -> int:
        v = list(v)
        if len(v) > self.m:
            v = _fp_mod(_trim([c % self.p for c in v]), list(self.modulus), self.p)
        return sum((c % self.p) * self.p ** t for t, c in enumerate(v))

    def _vmul(self, a, b):
        prod = _fp_mul(self.vector(a), self.vector(b), self.p)
        return self.from_vector(_fp_mod(prod, list(self.modulus), self.p)) if prod else 0

    def _vpow(self, a, n):
        r = 1
        while n:
            if n & 1:
                r = self._vmul(r, a)
            a = self._vmul(a, a)
            n >>= 1
        return r

    def _find_primitive(self) -> int:
        q = self.q
        if q == 2:
            return 1
        fac = prime_factors(q - 1)
        for a in range(2, q):
            if all(self._vpow(a, (q - 1) // r) != 1 for r in fac):
                return a
        raise FieldError("no primitive element")  # unreachable for a field

    def _build_log_tables(self):
        q = self.q
        exp = [0] * (q - 1)
        log = [0] * q
        cur = 1
        for i in range(q - 1):
            exp[i] = cur
            log[cur] = i
            cur = self._vmul(cur, self.prim)
        self.exp_table = exp
        self.log_table = log

    # scalar arithmetic on codes
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        if self.add_table is not None:
            return self.add_table[a][b]
        return self.from_vector([x + y for x, y in zip(self.vector(a), self.vector(b))])

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg_table[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self.exp_table[(-self.log_table[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 1 if n == 0 else 0
        return self.exp_table[(self.log_table[a] * n) % (self.q - 1)]

    def frob(self, a: int, i: int = 1) -> int:
        """a^(p^i), i taken modulo m."""
        return self.pow(a, self.p ** (i % self.m))

    def gen(self) -> int:
        """Code of g, the class of x modulo the modulus (0 when m = 1)."""
        return self.from_vector([0, 1])

    def from_int(self, n: int) -> int:
        return n % self.p

    def in_subfield(self, a: int, s: int) -> bool:
        """Whether a lies in the subfield F_{p^s} (s must divide m)."""
        return self.pow(a, self.p ** s) == a if a else True

    def degree_of(self, a: int) -> int:
        """Least s with a in F_{p^s}."""
        for s in range(1, self.m + 1):
            if self.m % s == 0 and self.in_subfield(a, s):
                return s
        return self.m

    def elements(self):
        return range(self.q)

    def fmt(self, a: int) -> str:
        """Element as a polynomial in g, e.g. ``1 + 2*g^2``."""
        if a == 0:
            return "0"
        parts = []
        for t, c in enumerate(self.vector(a)):
            if not c:
                continue
            if t == 0:
                parts.append(str(c))
            else:
                mono = "g" if t == 1 else f"g^{t}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


@lru_cache(maxsize=None)
def fq_make(p: int, m: int = 1) -> FieldSpec:
    """Canonical F_{p^m}: modulus is the lexicographically smallest irreducible."""
    if not isinstance(p, int) or not is_prime(p):
        raise FieldError(f"characteristic must be prime, got {p!r}")
    if not isinstance(m, int) or m < 1:
        raise FieldError(f"extension degree must be >= 1, got {m!r}")
    if p ** m > max_enum("field"):
        raise CapExceeded(f"F_{p}^{m} exceeds the field-size cap {max_enum('field')}")
    return FieldSpec(p, m, _canonical_modulus(p, m))


def field_of_size(q: int) -> FieldSpec:
    for p in prime_factors(q)[:1]:
        m = round(math.log(q, p))
        if p ** m == q:
            return fq_make(p, m)
    raise FieldError(f"{q} is not a prime power")


# -- embeddings --------------------------------------------------------------

def _eval_at(dst: FieldSpec, vec, root: int) -> int:
    acc = 0
    for c in reversed(list(vec)):
        acc = dst.add(dst.mul(acc, root), dst.from_int(c))
    return acc


@lru_cache(maxsize=None)
def _generator_image(p: int, a: int, b: int) -> int:
    """Image of g_a in F_{p^b}.

    Lexicographically smallest root of the modulus of F_{p^a}, restricted to
    roots compatible with the embeddings of every proper subfield so that
    embeddings commute along towers.
    """
    src, dst = fq_make(p, a), fq_make(p, b)
    if a == b:
        return dst.gen() if a > 1 else 0
    if a == 1:
        return 0
    constraints = []
    for c in range(2, a):
        if a % c == 0:
            via = src.vector(_generator_image(p, c, a))
            constraints.append((via, _generator_image(p, c, b)))
    roots = [r for r in range(dst.q) if _eval_at(dst, src.modulus, r) == 0]
    roots.sort(key=dst.vector)
    for r in roots:
        if all(_eval_at(dst, via, r) == target for via, target in constraints):
            return r
    raise FieldError(f"no compatible embedding F_{p}^{a} -> F_{p}^{b}")  # pragma: no cover


@lru_cache(maxsize=None)
def embedding_table(p: int, a: int, b: int) -> tuple[int, ...]:
    """Code map F_{p^a} -> F_{p^b} as a tuple indexed by source code."""
    if b % a:
        raise FieldError(f"F_{p}^{a} does not embed in F_{p}^{b}")
    src, dst = fq_make(p, a), fq_make(p, b)
    if a == b:
        return tuple(range(src.q))
    r = _generator_image(p, a, b)
    powers = [1]
    for _ in range(1, a):
        powers.append(dst.mul(powers[-1], r))
    out = []
    for code in range(src.q):
        acc = 0
        for c, pw in zip(src.vector(code), powers):
            for _ in range(c):
                acc = dst.add(acc, pw)
        out.append(acc)
    return tuple(out)


@lru_cache(maxsize=None)
def restriction_table(p: int, a: int, b: int) -> dict[int, int]:
    """Inverse of :func:`embedding_table` on its image."""
    return {img: src for src, img in enumerate(embedding_table(p, a, b))}


# -- user-facing element wrapper ---------------------------------------------

_VEC_RE = re.compile(r"^\[\s*(-?\d+(\s*,\s*-?\d+)*)?\s*\]$")
_POW_RE = re.compile(r"^g(\s*\^\s*(\d+))?$")


@dataclass(frozen=True)
class FqElem:
    spec: FieldSpec
    code: int

    @classmethod
    def from_vector(cls, spec: FieldSpec, vec) -> "FqElem":
        return cls(spec, spec.from_vector(vec))

    @classmethod
    def parse(cls, spec: FieldSpec, text: str) -> "FqElem":
        """Accepts ``[c0,...,c_{m-1}]``, ``g^i``, ``g`` or an integer."""
        s = text.strip()
        if _VEC_RE.match(s):
            inner = s[1:-1].strip()
            vec = [int(t) for t in inner.split(",")] if inner else []
            return cls.from_vector(spec, vec)
        mt = _POW_RE.match(s)
        if mt:
            return cls(spec, spec.pow(spec.gen(), int(mt.group(2) or 1)))
        if re.fullmatch(r"-?\d+", s):
            return cls(spec, spec.from_int(int(s)))
        raise FieldError(f"cannot parse field element {text!r}")

    @property
    def repr(self) -> list[int]:
        return self.spec.vector(self.code)

    def __str__(self):
        return "[" + ",".join(map(str, self.repr)) + "]"

    def __add__(self, other):
        return FqElem(self.spec, self.spec.add(self.code, other.code))

    def __sub__(self, other):
        return FqElem(self.spec, self.spec.sub(self.code, other.code))

    def __neg__(self):
        return FqElem(self.spec, self.spec.neg(self.code))

    def __mul__(self, other):
        return FqElem(self.spec, self.spec.mul(self.code, other.code))

    def __truediv__(self, other):
        return FqElem(self.spec, self.spec.div(self.code, other.code))

    def __pow__(self, n: int):
        return FqElem(self.spec, self.spec.pow(self.code, n))

    def inverse(self):
        return FqElem(self.spec, self.spec.inv(self.code))

    def is_zero(self) -> bool:
        return self.code == 0


def frobenius(a: FqElem, i: int = 1) -> FqElem:
    return FqElem(a.spec, a.spec.frob(a.code, i))


def embed(a: FqElem, target: FieldSpec) -> FqElem:
    src = a.spec
    if src.p != target.p or target.m % src.m:
        raise FieldError(f"{src} does not embed in {target}")
    return FqElem(target, embedding_table(src.p, src.m, target.m)[a.code])


# -- roots of dense polynomials over F_q --------------------------------------

def _horner(F: FieldSpec, coeffs, x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _deflate(F: FieldSpec, coeffs, r: int):
    """Synthetic division by (x - r); returns (quotient, remainder)."""
    n = len(coeffs) - 1
    out = [0] * n
    acc = 0
    for i in range(n, 0, -1):
        acc = F.add(F.mul(acc, r), coeffs[i])
        out[i - 1] = acc
    rem = F.add(F.mul(acc, r), coeffs[0])
    return out, rem


def roots_with_multiplicity(F: FieldSpec, coeffs) -> list[tuple[int, int]]:
    """Roots (code, multiplicity) of a low-first code polynomial, by exhaustion."""
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise FieldError("zero polynomial has every element as a root")
    if F.q > max_enum("field"):
        raise CapExceeded(f"exhaustive root search over {F} exceeds cap")
    out = []
    for x in range(F.q):
        if len(coeffs) < 2:
            break
        if _horner(F, coeffs, x):
            continue
        mult = 0
        while len(coeffs) > 1:
            quo, rem = _deflate(F, coeffs, x)
            if rem:
                break
            coeffs = quo
            mult += 1
        out.append((x, mult))
    return out


def poly_roots_ff(coeffs: list[FqElem]) -> list[tuple[FqElem, int]]:
    """Roots with multiplicity of ``sum coeffs[i] x^i`` in the coefficient field."""
    if not coeffs:
        raise FieldError("empty coefficient list")
    F = coeffs[0].spec
    return [(FqElem(F, r), mlt) for r, mlt in roots_with_multiplicity(F, [c.code for c in coeffs])]
