"""Exact linear algebra over finite fields.

Prime fields GF(p) carry all sheaf data.  Extension fields GF(q^m) are used
when a generic specialization needs more room than a small prime field
offers, e.g. twisted ranks of a sheaf defined over GF(2).  Matrices are
plain 2-D ``numpy.int64`` arrays holding reduced field elements.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError

DEFAULT_PRIME = 2147483647
# generic specialization wants at least this many field elements
GENERIC_FIELD_SIZE = 1 << 16


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit integers."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class PrimeField:
    """The field of residues mod a prime ``p`` (``p < 2**31.5`` so products fit in int64)."""

    def __init__(self, p: int = DEFAULT_PRIME):
        p = int(p)
        if not is_prime(p):
            raise InputError(f"field modulus {p} is not prime")
        if p > 3037000499:
            raise InputError("field modulus too large for int64 arithmetic")
        self.p = p
        self.order = p
        self.characteristic = p

    @property
    def name(self) -> str:
        return f"GF({self.p})"

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("prime", self.p))

    def embed(self, values) -> np.ndarray:
        """Interpret integers as field elements."""
        return np.mod(np.asarray(values, dtype=np.int64), self.p)

    def to_int(self, x) -> int:
        return int(x)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a = int(a)
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[1] == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        if self.p < (1 << 20):
            return (a @ b) % self.p
        # split the left factor so partial dot products stay below 2**63
        lo = a & 0xFFFF
        hi = a >> 16
        return (((hi @ b) % self.p) * 65536 + (lo @ b) % self.p) % self.p

    def random(self, rng: np.random.Generator, shape, nonzero: bool = False) -> np.ndarray:
        if nonzero:
            return rng.integers(1, self.p, size=shape, dtype=np.int64)
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def elements(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)


def _poly_mulmod(a: list[int], b: list[int], f: list[int], q: int) -> list[int]:
    """Product of polynomials (low-degree-first digit lists) modulo monic ``f``."""
    m = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % q
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for j in range(m + 1):
                prod[k - m + j] = (prod[k - m + j] - c * f[j]) % q
    return (prod + [0] * m)[:m]


def _poly_powmod(base: list[int], e: int, f: list[int], q: int) -> list[int]:
    m = len(f) - 1
    result = [1] + [0] * (m - 1)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, q)
        base = _poly_mulmod(base, base, f, q)
        e >>= 1
    return result


def _primitive_polynomial(q: int, m: int) -> list[int]:
    """Smallest monic degree-``m`` polynomial over GF(q) with ``x`` of full order."""
    n = q**m - 1
    one = [1] + [0] * (m - 1)
    x = ([0, 1] + [0] * m)[:m] if m > 1 else None
    factors = prime_factors(n)
    for code in range(1, q**m):
        low = [(code // q**j) % q for j in range(m)]
        if low[0] == 0:
            continue
        f = low + [1]
        base = x if x is not None else [(-low[0]) % q]
        if _poly_powmod(base, n, f, q) != one:
            continue
        if all(_poly_powmod(base, n // r, f, q) != one for r in factors):
            return f
    raise AssertionError(f"no primitive polynomial of degree {m} over GF({q})")


@lru_cache(maxsize=None)
def _extension_tables(q: int, m: int) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    f = _primitive_polynomial(q, m)
    size = q**m
    weights = q ** np.arange(m, dtype=np.int64)
    vals = np.arange(size, dtype=np.int64)
    digits = (vals[:, None] // weights[None, :]) % q
    top = digits[:, m - 1]
    shifted = np.zeros_like(digits)
    shifted[:, 1:] = digits[:, : m - 1]
    shifted = (shifted - top[:, None] * np.asarray(f[:m], dtype=np.int64)[None, :]) % q
    times_x = (shifted @ weights).tolist()
    exp = np.zeros(2 * (size - 1), dtype=np.int64)
    cur = 1
    for i in range(size - 1):
        exp[i] = cur
        cur = times_x[cur]
    exp[size - 1 :] = exp[: size - 1]
    log = np.zeros(size, dtype=np.int64)
    log[exp[: size - 1]] = np.arange(size - 1, dtype=np.int64)
    return exp, log, tuple(f)


class ExtensionField:
    """GF(q^m) with elements encoded as base-q digit strings of polynomials.

    The prime subfield GF(q) is the set of constants ``0..q-1``, so sheaf data
    over GF(q) embeds without conversion.
    """

    def __init__(self, q: int, m: int):
        if not is_prime(q) or m < 1:
            raise InputError(f"bad extension parameters q={q}, m={m}")
        self.q = q
        self.m = m
        self.order = q**m
        self.characteristic = q
        self._exp, self._log, self.modulus = _extension_tables(q, m)
        self._n = self.order - 1

    @property
    def name(self) -> str:
        return f"GF({self.q}^{self.m})"

    def __repr__(self) -> str:
        return f"ExtensionField({self.q}, {self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtensionField) and (other.q, other.m) == (self.q, self.m)

    def __hash__(self) -> int:
        return hash(("ext", self.q, self.m))

    def embed(self, values) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=np.int64), self.q)

    def to_int(self, x) -> int:
        return int(x)

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def _one_plus(self, a):
        c = a % self.q
        return a - c + (c + 1) % self.q

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.q == 2:
            return a ^ b
        # a + b = a * (1 + b/a)
        ratio = self._exp[(self._log[b] - self._log[a]) % self._n]
        ratio = np.where(b == 0, 0, ratio)
        out = self.mul(a, self._one_plus(ratio))
        return np.where(a == 0, b, out)

    def neg(self, a):
        if self.q == 2:
            return np.asarray(a, dtype=np.int64)
        return self.mul(a, self.q - 1)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def inv(self, a: int) -> int:
        a = int(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self._exp[(self._n - self._log[a]) % self._n])

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            out = self.add(out, self.mul(a[:, k : k + 1], b[k : k + 1, :]))
        return out

    def random(self, rng: np.random.Generator, shape, nonzero: bool = False) -> np.ndarray:
        low = 1 if nonzero else 0
        return rng.integers(low, self.order, size=shape, dtype=np.int64)

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)


Field = PrimeField | ExtensionField


def generic_field(field: Field, minimum: int = GENERIC_FIELD_SIZE) -> Field:
    """A field of the same characteristic with at least ``minimum`` elements."""
    if field.order >= minimum:
        return field
    q = field.characteristic
    m = max(1, math.ceil(math.log(minimum) / math.log(q) - 1e-9))
    return ExtensionField(q, m)


def as_matrix(field: Field, rows: int, cols: int, data=None) -> np.ndarray:
    if data is None:
        return np.zeros((rows, cols), dtype=np.int64)
    arr = field.embed(data).reshape(rows, cols)
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def rref(a: np.ndarray, field: Field) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (lowest-index pivots)."""
    r_mat = np.array(a, dtype=np.int64, copy=True)
    if r_mat.ndim != 2:
        raise InputError("rref expects a 2-D array")
    rows, cols = r_mat.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(r_mat[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            r_mat[[r, i]] = r_mat[[i, r]]
        r_mat[r] = field.mul(r_mat[r], field.inv(r_mat[r, c]))
        col = r_mat[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            update = field.mul(col[others][:, None], r_mat[r][None, :])
            r_mat[others] = field.sub(r_mat[others], update)
        pivots.append(c)
        r += 1
    return r_mat[:r], pivots


def rank(a: np.ndarray, field: Field) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, field)[1])


def kernel(a: np.ndarray, field: Field) -> np.ndarray:
    """Basis (as rows) of the right kernel ``{v : a v = 0}``."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r_mat, pivots = rref(a, field)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, p in enumerate(pivots):
            basis[j, p] = field.neg(r_mat[i, f])
    return basis


def rank_kernel(a: np.ndarray, field: Field) -> tuple[int, "Subspace"]:
    a = np.asarray(a, dtype=np.int64)
    basis = kernel(a, field)
    return a.shape[1] - basis.shape[0], Subspace.span(field, a.shape[1], basis)


def _rows(vectors, n: int) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.ndim == 2:
        return arr
    if n == 0:
        return np.zeros((1 if arr.ndim == 1 else 0, 0), dtype=np.int64)
    return arr.reshape(-1, n)


class Subspace:
    """A subspace of ``field**ambient`` stored by its canonical RREF basis."""

    __slots__ = ("field", "ambient", "basis", "pivots", "_key")

    def __init__(self, field: Field, ambient: int, basis: np.ndarray, pivots: Sequence[int]):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = tuple(pivots)
        self._key = (ambient, basis.shape[0], basis.tobytes())

    @classmethod
    def span(cls, field: Field, ambient: int, vectors) -> "Subspace":
        vecs = _rows(vectors, ambient)
        if vecs.shape[0] == 0 or ambient == 0:
            return cls.zero(field, ambient)
        basis, pivots = rref(vecs, field)
        return cls(field, ambient, basis, pivots)

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, np.zeros((0, ambient), dtype=np.int64), ())

    @classmethod
    def full(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, np.eye(ambient, dtype=np.int64), range(ambient))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, basis={self.basis.tolist()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.field == other.field and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def _check(self, other: "Subspace") -> None:
        if other.ambient != self.ambient or other.field != self.field:
            raise InputError("subspaces live in different ambient spaces")

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Residues of row vectors modulo the subspace (zero at pivot columns)."""
        v = _rows(vectors, self.ambient)
        if self.dim == 0:
            return v.copy()
        coeff = v[:, list(self.pivots)]
        return self.field.sub(v, self.field.matmul(coeff, self.basis))

    def contains(self, vectors) -> bool:
        return not np.any(self.reduce(vectors))

    def __contains__(self, vector) -> bool:
        return self.contains(vector)

    def coordinates(self, vectors) -> np.ndarray:
        """Coefficients of row vectors in the canonical basis; they must lie in the subspace."""
        v = _rows(vectors, self.ambient)
        if not self.contains(v):
            raise ValueError("vector not in subspace")
        return v[:, list(self.pivots)]

    def complement_columns(self) -> list[int]:
        piv = set(self.pivots)
        return [c for c in range(self.ambient) if c not in piv]

    def quotient_matrix(self) -> np.ndarray:
        """Matrix of the projection onto ``ambient / self`` in complement coordinates."""
        comp = self.complement_columns()
        eye = np.eye(self.ambient, dtype=np.int64)
        return self.reduce(eye)[:, comp].T.copy()

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, self.ambient, np.vstack([self.basis, other.basis]))

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient)
        stacked = np.vstack([self.basis, other.basis])
        left = kernel(stacked.T, self.field)
        if left.shape[0] == 0:
            return Subspace.zero(self.field, self.ambient)
        vecs = self.field.matmul(left[:, : self.dim], self.basis)
        return Subspace.span(self.field, self.ambient, vecs)

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return other.contains(self.basis)

    def quotient_dim(self, sub: "Subspace") -> int:
        """dim(self / sub); ``sub`` must be contained in self."""
        if not sub.is_subspace_of(self):
            raise InputError("quotient by a non-subspace")
        return self.dim - sub.dim


def count_subspaces(q: int, d: int) -> int:
    """Total number of subspaces of GF(q)^d (sum of Gaussian binomials)."""
    total = 0
    for k in range(d + 1):
        num = den = 1
        for i in range(k):
            num *= q ** (d - i) - 1
            den *= q ** (i + 1) - 1
        total += num // den
    return total


def enumerate_subspaces(field: PrimeField, d: int) -> Iterator[Subspace]:
    """Every subspace of ``field**d`` exactly once, by increasing dimension."""
    q = field.order
    for k in range(d + 1):
        for pivots in itertools.combinations(range(d), k):
            slots = [(i, c) for i, p in enumerate(pivots) for c in range(p + 1, d) if c not in pivots]
            for values in itertools.product(range(q), repeat=len(slots)):
                basis = np.zeros((k, d), dtype=np.int64)
                for i, p in enumerate(pivots):
                    basis[i, p] = 1
                for (i, c), x in zip(slots, values):
                    basis[i, c] = x
                yield Subspace(field, d, basis, pivots)


def random_subspace(field: Field, d: int, rng: np.random.Generator, dim: int | None = None) -> Subspace:
    if dim is None:
        dim = int(rng.integers(0, d + 1))
    vecs = field.random(rng, (dim, d))
    return Subspace.span(field, d, vecs)


def is_totally_independent(m: np.ndarray, field: Field) -> bool:
    """Every choice of ``k`` columns of the ``k x n`` matrix is independent."""
    m = np.asarray(m, dtype=np.int64)
    k, n = m.shape
    if k == 0:
        return True
    if k > n:
        return False
    return all(rank(m[:, list(cols)], field) == k for cols in itertools.combinations(range(n), k))


def vandermonde_totally_independent(
    k: int, labels: Sequence, field: PrimeField, seed: int = 0
) -> np.ndarray:
    """Columns ``(1, x, ..., x^(k-1))`` at distinct nonzero nodes ``x`` drawn from a seeded shuffle."""
    n = len(labels)
    if n > field.order - 1:
        raise InputError(f"{field.name} has too few nonzero elements for {n} distinct nodes")
    rng = np.random.default_rng(seed)
    nodes = rng.choice(field.order - 1, size=n, replace=False).astype(np.int64) + 1
    out = np.ones((k, n), dtype=np.int64)
    for i in range(1, k):
        out[i] = field.mul(out[i - 1], nodes)
    return out


def random_totally_independent(
    k: int, n: int, field: Field, rng: np.random.Generator, attempts: int = 200
) -> np.ndarray | None:
    """Rejection sampling of a totally independent ``k x n`` matrix; None if none found."""
    for _ in range(attempts):
        m = field.random(rng, (k, n))
        if is_totally_independent(m, field):
            return m
    return None


def block_diag(blocks: Iterable[np.ndarray]) -> np.ndarray:
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out
