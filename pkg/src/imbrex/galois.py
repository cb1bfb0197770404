"""Finite fields, projective subspaces and sesquilinear forms.

Field elements are integers ``0 .. q-1``; the base-``p`` digits of an element
are the coefficients of its polynomial representative (digit ``i`` is the
coefficient of ``x**i``).  All arithmetic goes through precomputed tables, so
vectors and matrices are plain integer numpy arrays and every row operation is
a fancy-indexing lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "FiniteField",
    "GF",
    "ProjSubspace",
    "SesquilinearForm",
    "DegenerateFormError",
    "gaussian_binomial",
    "rref",
    "rank",
    "pg_points",
    "pg_enumerate",
    "isotropic_subspaces",
]


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    """Multiply coefficient lists ``a*b`` modulo the monic polynomial ``mod``."""
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            for i in range(k + 1):
                prod[deg - k + i] = (prod[deg - k + i] - c * mod[i]) % p
    out = prod[:k] + [0] * (k - len(prod[:k]))
    return out


def _is_irreducible(mod: list[int], p: int) -> bool:
    """True iff the monic ``mod`` is irreducible.

    Brute force: ``mod`` is reducible iff it has a monic factor of degree
    ``1 .. k//2``; we test divisibility by every such polynomial.
    """
    k = len(mod) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            rem = list(mod)
            for deg in range(k, d - 1, -1):
                c = rem[deg]
                if c:
                    for i in range(d + 1):
                        rem[deg - d + i] = (rem[deg - d + i] - c * divisor[i]) % p
            if not any(rem[:d]):
                return False
    return True


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for tail in itertools.product(range(p), repeat=k):
        mod = list(reversed(tail)) + [1]
        if mod[0] and _is_irreducible(mod, p):
            return tuple(mod)
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


@dataclass(frozen=True)
class FiniteField:
    """GF(p**k) with table-driven arithmetic.

    ``modulus`` lists the coefficients of a monic irreducible polynomial from
    the constant term upwards; by default the lexicographically smallest one
    is used (``x^2+x+1`` for GF(4), ``x^2+1`` for GF(9)).
    """

    p: int
    k: int = 1
    modulus: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.k < 1:
            raise ValueError("degree must be positive")
        if self.modulus is None:
            object.__setattr__(self, "modulus", _smallest_irreducible(self.p, self.k))
        mod = tuple(self.modulus)
        if len(mod) != self.k + 1 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if self.k > 1 and not _is_irreducible(list(mod), self.p):
            raise ValueError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p**self.k

    def __len__(self) -> int:
        return self.q

    def __repr__(self) -> str:
        return f"GF({self.q})"

    # -- conversion --------------------------------------------------------
    def to_poly(self, a: int) -> list[int]:
        digits = []
        for _ in range(self.k):
            digits.append(a % self.p)
            a //= self.p
        return digits

    def from_poly(self, coeffs: Sequence[int]) -> int:
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    # -- tables ------------------------------------------------------------
    @cached_property
    def add_table(self) -> np.ndarray:
        q = self.q
        polys = [self.to_poly(a) for a in range(q)]
        t = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                t[a, b] = self.from_poly([(x + y) % self.p for x, y in zip(polys[a], polys[b])])
        t.flags.writeable = False
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        polys = [self.to_poly(a) for a in range(q)]
        mod = list(self.modulus)
        t = np.empty((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                t[a, b] = self.from_poly(_poly_mulmod(polys[a], polys[b], mod, self.p))
        t.flags.writeable = False
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        t = np.array([int(np.flatnonzero(self.add_table[a] == 0)[0]) for a in range(self.q)])
        t.flags.writeable = False
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        # inv_table[0] is a sentinel; inv() refuses zero
        t = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            t[a] = int(np.flatnonzero(self.mul_table[a] == 1)[0])
        t.flags.writeable = False
        return t

    @cached_property
    def frobenius_table(self) -> np.ndarray:
        """The involution ``x -> x**sqrt(q)``; only defined for even degree."""
        if self.k % 2:
            raise ValueError(f"{self!r} has odd degree; no involutory Frobenius")
        e = self.p ** (self.k // 2)
        t = np.array([self.power(a, e) for a in range(self.q)], dtype=np.int64)
        t.flags.writeable = False
        return t

    # -- scalar operations -------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.inv_table[a])

    def power(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = int(self.mul_table[out, a])
        return out

    def frob(self, a: int) -> int:
        return int(self.frobenius_table[a])

    def op(self, a: int, b: int | None, op: str) -> int:
        """Dispatch ``add``/``mul``/``inv``/``frob`` by name (``b`` unused for unary ops)."""
        if op == "add":
            return self.add(a, b)
        if op == "mul":
            return self.mul(a, b)
        if op == "inv":
            return self.inv(a if b is None else b)
        if op == "frob":
            return self.frob(a)
        raise ValueError(f"unknown field operation {op!r}")

    def elements(self) -> range:
        return range(self.q)

    def x(self) -> int:
        """The class of the indeterminate (``p`` in the integer encoding)."""
        return self.p if self.k > 1 else 1

    # -- vector helpers ----------------------------------------------------
    def normalize(self, v: np.ndarray) -> np.ndarray:
        """Scale rows so the first nonzero entry is 1 (zero rows stay zero)."""
        v = np.atleast_2d(np.asarray(v, dtype=np.int64))
        nz = v != 0
        lead = np.argmax(nz, axis=1)
        c = v[np.arange(len(v)), lead]
        scale = self.inv_table[c]
        return self.mul_table[scale[:, None], v]

    def combine(self, u: np.ndarray, v: np.ndarray, a: int, b: int) -> np.ndarray:
        """``a*u + b*v`` elementwise."""
        return self.add_table[self.mul_table[a, u], self.mul_table[b, v]]

    def dot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Row-wise dot products over the last axis."""
        prod = self.mul_table[u, v]
        out = prod[..., 0]
        for i in range(1, prod.shape[-1]):
            out = self.add_table[out, prod[..., i]]
        return out

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return self.dot(a[:, None, :], b.T[None, :, :])

    def encode(self, v: np.ndarray) -> np.ndarray:
        """Integer code of each row, base ``q`` with coordinate 0 most significant."""
        v = np.atleast_2d(v)
        weights = self.q ** np.arange(v.shape[1] - 1, -1, -1, dtype=np.int64)
        return v @ weights


_FIELD_CACHE: dict[int, FiniteField] = {}


def GF(q: int) -> FiniteField:
    """The field of order ``q`` with its default modulus (cached)."""
    if q not in _FIELD_CACHE:
        for p in range(2, q + 1):
            if q % p == 0:
                break
        k, r = 0, q
        while r % p == 0:
            r //= p
            k += 1
        if r != 1 or not _is_prime(p):
            raise ValueError(f"{q} is not a prime power")
        _FIELD_CACHE[q] = FiniteField(p, k)
    return _FIELD_CACHE[q]


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of ``k``-dimensional subspaces of an ``n``-dimensional space over GF(q)."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# linear algebra
# ---------------------------------------------------------------------------
def rref(rows: np.ndarray, f: FiniteField) -> np.ndarray:
    """Reduced row echelon form with zero rows removed."""
    m = np.array(rows, dtype=np.int64, copy=True)
    if m.ndim == 1:
        m = m[None, :]
    if m.size == 0:
        return m.reshape(0, m.shape[1] if m.ndim == 2 else 0)
    add, mul, neg, inv = f.add_table, f.mul_table, f.neg_table, f.inv_table
    nrows, ncols = m.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(m[r:, c])
        if not len(nz):
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = mul[inv[m[r, c]], m[r]]
        col = m[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if len(others):
            m[others] = add[m[others], neg[mul[col[others, None], m[r][None, :]]]]
        r += 1
    return m[:r]


def rank(rows: np.ndarray, f: FiniteField) -> int:
    return len(rref(rows, f))


def nullspace(m: np.ndarray, f: FiniteField) -> np.ndarray:
    """Basis (rows) of ``{v : m @ v = 0}``."""
    m = np.atleast_2d(np.asarray(m, dtype=np.int64))
    ncols = m.shape[1]
    r = rref(m, f)
    pivots = [int(np.flatnonzero(row)[0]) for row in r]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[fc] = 1
        for row, pc in zip(r, pivots):
            v[pc] = f.neg_table[row[fc]]
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), ncols)


def _all_combinations(basis: np.ndarray, f: FiniteField) -> np.ndarray:
    """Every vector of the span (including zero)."""
    k, n = basis.shape
    vecs = np.zeros((1, n), dtype=np.int64)
    for row in basis:
        scaled = f.mul_table[np.arange(f.q)[:, None], row[None, :]]
        vecs = f.add_table[vecs[:, None, :], scaled[None, :, :]].reshape(-1, n)
    return vecs


@dataclass(frozen=True)
class ProjSubspace:
    """A projective subspace of PG(n, q) held as its canonical RREF basis."""

    field: FiniteField
    n: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, f: FiniteField, n: int, vectors: Iterable[Sequence[int]]) -> "ProjSubspace":
        vecs = np.array(list(vectors), dtype=np.int64).reshape(-1, n + 1)
        r = rref(vecs, f) if len(vecs) else vecs
        return cls(f, n, tuple(tuple(int(x) for x in row) for row in r))

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(len(self.basis), self.n + 1)

    def canonical(self) -> "ProjSubspace":
        return ProjSubspace.span(self.field, self.n, self.basis)

    def join(self, other: "ProjSubspace") -> "ProjSubspace":
        return ProjSubspace.span(self.field, self.n, self.basis + other.basis)

    def meet(self, other: "ProjSubspace") -> "ProjSubspace":
        """Intersection via the Zassenhaus block-matrix trick."""
        f, n1 = self.field, self.n + 1
        a, b = self.matrix, other.matrix
        if not len(a) or not len(b):
            return ProjSubspace(f, self.n, ())
        top = np.hstack([a, a])
        bottom = np.hstack([b, np.zeros_like(b)])
        r = rref(np.vstack([top, bottom]), f)
        inter = [row[n1:] for row in r if not row[:n1].any()]
        return ProjSubspace.span(f, self.n, inter)

    def contains(self, v: Sequence[int]) -> bool:
        return rank(np.vstack([self.matrix, np.asarray(v)[None, :]]), self.field) == len(self.basis)

    def contains_subspace(self, other: "ProjSubspace") -> bool:
        return self.join(other) == self

    def points(self) -> np.ndarray:
        """All projective points (normalized rows), in code order."""
        if not self.basis:
            return np.zeros((0, self.n + 1), dtype=np.int64)
        vecs = _all_combinations(self.matrix, self.field)
        vecs = vecs[vecs.any(axis=1)]
        vecs = self.field.normalize(vecs)
        codes = self.field.encode(vecs)
        _, idx = np.unique(codes, return_index=True)
        return vecs[idx]


def pg_points(n: int, f: FiniteField) -> np.ndarray:
    """All points of PG(n, q) as normalized rows, sorted by code."""
    return ProjSubspace(f, n, tuple(tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1))).points()


def _rref_matrices(n: int, f: FiniteField, dim: int) -> Iterator[np.ndarray]:
    k = dim + 1
    for pivots in itertools.combinations(range(n + 1), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n + 1) if c not in pivots]
        base = np.zeros((k, n + 1), dtype=np.int64)
        for i, pc in enumerate(pivots):
            base[i, pc] = 1
        for vals in itertools.product(range(f.q), repeat=len(free)):
            m = base.copy()
            for (i, c), v in zip(free, vals):
                m[i, c] = v
            yield m


def pg_enumerate(n: int, f: FiniteField, dim: int) -> list[ProjSubspace]:
    """All ``dim``-dimensional subspaces of PG(n, q) in canonical form."""
    if not 0 <= dim <= n:
        raise ValueError(f"dimension {dim} out of range for PG({n},{f.q})")
    return [ProjSubspace(f, n, tuple(tuple(int(x) for x in row) for row in m)) for m in _rref_matrices(n, f, dim)]


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------
class DegenerateFormError(ValueError):
    def __init__(self, radical: ProjSubspace):
        super().__init__(f"form is degenerate; radical has projective dimension {radical.dim}")
        self.radical = radical


@dataclass(frozen=True)
class SesquilinearForm:
    """A quadratic, hermitian or alternating form on GF(q)**(n+1).

    For ``kind='quadratic'`` the matrix is upper triangular and
    ``Q(x) = sum_{i<=j} m[i,j] x_i x_j``; the associated bilinear form has Gram
    matrix ``m + m.T``.  For ``'hermitian'`` ``h(x, y) = x M conj(y)^T`` with
    ``conj`` the involutory Frobenius; for ``'alternating'`` ``B(x, y) = x M y^T``.
    """

    kind: str
    field: FiniteField
    matrix: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self) -> None:
        if self.kind not in ("quadratic", "hermitian", "alternating"):
            raise ValueError(f"unknown form kind {self.kind!r}")
        m = self.gram_input
        if m.shape[0] != m.shape[1]:
            raise ValueError("form matrix must be square")
        f = self.field
        if self.kind == "hermitian":
            if f.k % 2:
                raise ValueError("hermitian forms need a field of even degree")
            if not np.array_equal(m.T, f.frobenius_table[m]):
                raise ValueError("matrix is not hermitian")
        if self.kind == "alternating":
            if not np.array_equal(m.T, f.neg_table[m]) or m.diagonal().any():
                raise ValueError("matrix is not alternating")

    @classmethod
    def from_matrix(cls, kind: str, f: FiniteField, m: Sequence[Sequence[int]]) -> "SesquilinearForm":
        return cls(kind, f, tuple(tuple(int(x) for x in row) for row in m))

    @property
    def gram_input(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    @property
    def n(self) -> int:
        """Projective dimension of the underlying space."""
        return len(self.matrix) - 1

    @property
    def gram(self) -> np.ndarray:
        m = self.gram_input
        if self.kind == "quadratic":
            return self.field.add_table[m, m.T]
        return m

    def conj(self, v: np.ndarray) -> np.ndarray:
        return self.field.frobenius_table[v] if self.kind == "hermitian" else v

    def bilinear(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Associated (sesqui)linear form, vectorized over leading axes."""
        f = self.field
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        gv = f.dot(self.conj(v)[..., None, :], self.gram)
        return f.dot(u, gv)

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        """``Q(v)`` for quadratic forms, ``h(v, v)`` / ``B(v, v)`` otherwise."""
        f = self.field
        v = np.atleast_2d(np.asarray(v, dtype=np.int64))
        if self.kind != "quadratic":
            return self.bilinear(v, v)
        m = self.gram_input
        out = np.zeros(len(v), dtype=np.int64)
        for i in range(m.shape[0]):
            for j in range(i, m.shape[0]):
                if m[i, j]:
                    term = f.mul_table[m[i, j], f.mul_table[v[:, i], v[:, j]]]
                    out = f.add_table[out, term]
        return out

    def radical(self) -> ProjSubspace:
        """Singular radical: vectors orthogonal to everything (and singular, for quadratic forms)."""
        f = self.field
        g = self.gram
        # x is radical iff x G = 0, for every kind
        ns = nullspace(g.T, f)
        rad = ProjSubspace.span(f, self.n, ns) if len(ns) else ProjSubspace(f, self.n, ())
        if self.kind == "quadratic" and rad.basis:
            pts = rad.points()
            sing = pts[self.evaluate(pts) == 0]
            return ProjSubspace.span(f, self.n, sing) if len(sing) else ProjSubspace(f, self.n, ())
        return rad

    def check_nondegenerate(self) -> None:
        rad = self.radical()
        if rad.basis:
            raise DegenerateFormError(rad)

    def is_totally_isotropic(self, basis: np.ndarray) -> bool:
        basis = np.atleast_2d(basis)
        if self.kind == "quadratic" and self.evaluate(basis).any():
            return False
        g = self.bilinear(basis[:, None, :], basis[None, :, :])
        return not np.asarray(g).any()


def isotropic_subspaces(form: SesquilinearForm, n: int, dim: int) -> list[ProjSubspace]:
    """All totally isotropic (singular, for quadratic forms) ``dim``-subspaces.

    Built by extension: a subspace of the next level is spanned by one of the
    current level and an isotropic point orthogonal to it.  Results are sorted
    by canonical basis.
    """
    if form.n != n:
        raise ValueError(f"form lives on PG({form.n},q), not PG({n},q)")
    if not 0 <= dim <= n:
        raise ValueError(f"dimension {dim} out of range")
    form.check_nondegenerate()
    f = form.field
    pts = pg_points(n, f)
    iso = pts[form.evaluate(pts) == 0]
    level = {(tuple(int(x) for x in row),) for row in iso}
    for _ in range(dim):
        nxt: set[tuple[tuple[int, ...], ...]] = set()
        for basis in level:
            b = np.array(basis, dtype=np.int64)
            ortho = form.bilinear(iso[:, None, :], b[None, :, :])
            cand = iso[~np.asarray(ortho).any(axis=1)]
            for p in cand:
                m = rref(np.vstack([b, p[None, :]]), f)
                if len(m) == len(b) + 1:
                    nxt.add(tuple(tuple(int(x) for x in row) for row in m))
        level = nxt
    return [ProjSubspace(f, n, b) for b in sorted(level)]
