"""Truncated symmetric Fock space in the occupation-number basis.

Sector ``n`` is spanned by unit-norm occupation states ``|n_1, ..., n_d>`` with
``sum(n_i) == n``. Operators are stored per source sector as dense blocks of a
fixed particle-number degree; ``safe_ceiling`` records the largest source
sector on which a block is exact, i.e. not affected by the cutoff ``n_max``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, TruncationError


@dataclass(frozen=True)
class OneParticleSpace:
    dim: int
    label: str = ""

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ConfigurationError(f"one-particle dimension must be >= 1, got {self.dim}")


def _compositions(d: int, n: int) -> Iterator[tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(d - 1, n - first):
            yield (first,) + rest


@dataclass(frozen=True)
class OccupationBasis:
    dim: int
    n: int
    states: tuple[tuple[int, ...], ...]

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def occupations(self) -> np.ndarray:
        return np.array(self.states, dtype=np.int64).reshape(len(self.states), self.dim)

    def __len__(self):
        return len(self.states)


def sym_basis(d: int, n: int) -> OccupationBasis:
    """All occupation multi-indices of ``n`` bosons in ``d`` modes, lexicographic."""
    if d < 1 or n < 0:
        raise ConfigurationError(f"need d >= 1 and n >= 0, got d={d}, n={n}")
    return OccupationBasis(d, n, tuple(_compositions(d, n)))


def sector_dim(d: int, n: int) -> int:
    return math.comb(d + n - 1, n)


@dataclass(frozen=True)
class FockTruncation:
    space: OneParticleSpace
    n_max: int

    def __post_init__(self):
        if self.n_max < 2:
            raise ConfigurationError(f"n_max must be >= 2, got {self.n_max}")

    @classmethod
    def of(cls, d: int, n_max: int, label: str = "") -> "FockTruncation":
        return cls(OneParticleSpace(d, label), n_max)

    @property
    def d(self) -> int:
        return self.space.dim

    @cached_property
    def bases(self) -> tuple[OccupationBasis, ...]:
        return tuple(sym_basis(self.d, n) for n in range(self.n_max + 1))

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(sector_dim(self.d, n) for n in range(self.n_max + 1))

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims)]))

    @property
    def total_dim(self) -> int:
        return self.offsets[-1]

    def span_dim(self, top: int) -> int:
        """Dimension of sectors ``0..top``."""
        return self.offsets[top + 1]

    def sector_slice(self, n: int) -> slice:
        return slice(self.offsets[n], self.offsets[n + 1])

    @cached_property
    def _raising(self) -> tuple[tuple[sp.csr_matrix, ...], ...]:
        # _raising[n][i]: single-mode creator a_i^dagger from sector n to n+1
        out = []
        for n in range(self.n_max):
            src, tgt = self.bases[n], self.bases[n + 1]
            occ = src.occupations
            cols = np.arange(len(src))
            per_mode = []
            for i in range(self.d):
                rows = np.fromiter(
                    (tgt.index[s[:i] + (s[i] + 1,) + s[i + 1:]] for s in src.states),
                    dtype=np.int64, count=len(src))
                vals = np.sqrt(occ[:, i] + 1.0)
                per_mode.append(sp.csr_matrix((vals, (rows, cols)), shape=(len(tgt), len(src))))
            out.append(tuple(per_mode))
        return tuple(out)

    def raising(self, i: int, n: int) -> sp.csr_matrix:
        return self._raising[n][i]

    def lowering(self, i: int, n: int) -> sp.csr_matrix:
        """Single-mode annihilator a_i from sector ``n`` to ``n-1``."""
        return self._raising[n - 1][i].T.tocsr()


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True, eq=False)
class FockVector:
    trunc: FockTruncation
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (self.trunc.total_dim,):
            raise ConfigurationError(
                f"vector length {data.shape} does not match Fock dimension {self.trunc.total_dim}")
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, trunc: FockTruncation) -> "FockVector":
        return cls(trunc, np.zeros(trunc.total_dim, dtype=complex))

    @classmethod
    def vacuum(cls, trunc: FockTruncation) -> "FockVector":
        v = np.zeros(trunc.total_dim, dtype=complex)
        v[0] = 1.0
        return cls(trunc, v)

    @classmethod
    def from_sectors(cls, trunc: FockTruncation, sectors: Mapping[int, np.ndarray]) -> "FockVector":
        v = np.zeros(trunc.total_dim, dtype=complex)
        for n, comp in sectors.items():
            v[trunc.sector_slice(n)] = comp
        return cls(trunc, v)

    @classmethod
    def random(cls, trunc: FockTruncation, rng: np.random.Generator, top: int,
               bottom: int = 0, normalize: bool = True) -> "FockVector":
        """Gaussian random vector supported on sectors ``bottom..top``."""
        v = np.zeros(trunc.total_dim, dtype=complex)
        sl = slice(trunc.offsets[bottom], trunc.offsets[top + 1])
        size = sl.stop - sl.start
        v[sl] = rng.normal(size=size) + 1j * rng.normal(size=size)
        if normalize:
            v /= np.linalg.norm(v)
        return cls(trunc, v)

    def sector(self, n: int) -> np.ndarray:
        return self.data[self.trunc.sector_slice(n)]

    def top_sector(self) -> int:
        nz = np.flatnonzero(self.data)
        if nz.size == 0:
            return -1
        return int(np.searchsorted(self.trunc.offsets, nz[-1], side="right") - 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def vdot(self, other: "FockVector") -> complex:
        return complex(np.vdot(self.data, other.data))

    def __add__(self, other):
        return FockVector(self.trunc, self.data + other.data)

    def __sub__(self, other):
        return FockVector(self.trunc, self.data - other.data)

    def __mul__(self, c):
        return FockVector(self.trunc, c * self.data)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# operators


class _OperatorAlgebra:
    """Arithmetic shared by single-degree and mixed-degree operators."""

    # numpy scalars must defer to the reflected operators below
    __array_ufunc__ = None

    def parts(self) -> tuple["BlockOperator", ...]:
        raise NotImplementedError

    def __add__(self, other):
        if isinstance(other, (int, float, complex)) and other == 0:
            return self
        return OperatorSum.combine(self.parts() + other.parts())

    __radd__ = __add__

    def __neg__(self):
        return (-1.0) * self

    def __sub__(self, other):
        return self + (-1.0) * other

    def __matmul__(self, other):
        if isinstance(other, FockVector):
            return apply(self, other)
        return OperatorSum.combine(tuple(p._compose(q) for p in self.parts() for q in other.parts()))

    @property
    def H(self):
        return OperatorSum.combine(tuple(p.H for p in self.parts()))


@dataclass(frozen=True, eq=False)
class BlockOperator(_OperatorAlgebra):
    """Operator of fixed particle-number degree on a truncated Fock space.

    ``blocks[n]`` maps sector ``n`` to sector ``n + degree``. It is stored for
    every ``n <= safe_ceiling`` whose target lies in ``0..n_max``; sources
    whose target would be negative are mapped to zero.
    """

    trunc: FockTruncation
    degree: int
    blocks: Mapping[int, np.ndarray]
    safe_ceiling: int

    def __post_init__(self):
        t = self.trunc
        cap = t.n_max - max(self.degree, 0)
        if self.safe_ceiling > cap:
            object.__setattr__(self, "safe_ceiling", cap)
        for n in self.sources():
            b = self.blocks.get(n)
            shape = (t.dims[n + self.degree], t.dims[n])
            if b is None or b.shape != shape:
                raise ConfigurationError(
                    f"degree {self.degree} block for sector {n} missing or has wrong shape")

    def parts(self):
        return (self,)

    def sources(self) -> range:
        return range(max(0, -self.degree), self.safe_ceiling + 1)

    def block(self, n: int) -> np.ndarray | None:
        """Exact block on source ``n``, ``None`` when the image is zero."""
        if n > self.safe_ceiling:
            raise TruncationError(
                f"sector {n} is above the safe ceiling {self.safe_ceiling} of a degree {self.degree} operator")
        if n + self.degree < 0:
            return None
        return self.blocks[n]

    @classmethod
    def zero(cls, trunc: FockTruncation, degree: int, safe_ceiling: int | None = None) -> "BlockOperator":
        if safe_ceiling is None:
            safe_ceiling = trunc.n_max - max(degree, 0)
        blocks = {n: np.zeros((trunc.dims[n + degree], trunc.dims[n]), dtype=complex)
                  for n in range(max(0, -degree), safe_ceiling + 1)}
        return cls(trunc, degree, blocks, safe_ceiling)

    @classmethod
    def identity(cls, trunc: FockTruncation) -> "BlockOperator":
        blocks = {n: np.eye(trunc.dims[n], dtype=complex) for n in range(trunc.n_max + 1)}
        return cls(trunc, 0, blocks, trunc.n_max)

    def __mul__(self, c):
        return BlockOperator(self.trunc, self.degree,
                             {n: c * b for n, b in self.blocks.items()}, self.safe_ceiling)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, BlockOperator) and other.degree == self.degree:
            safe = min(self.safe_ceiling, other.safe_ceiling)
            blocks = {n: self.blocks[n] + other.blocks[n]
                      for n in range(max(0, -self.degree), safe + 1)}
            return BlockOperator(self.trunc, self.degree, blocks, safe)
        return super().__add__(other)

    def _compose(self, q: "BlockOperator") -> "BlockOperator":
        # self after q
        if self.trunc != q.trunc:
            raise ConfigurationError("operators live on different truncations")
        t = self.trunc
        deg = self.degree + q.degree
        safe = min(q.safe_ceiling, self.safe_ceiling - q.degree, t.n_max - max(deg, 0))
        blocks = {}
        for n in range(max(0, -deg), safe + 1):
            shape = (t.dims[n + deg], t.dims[n])
            bq = q.block(n)
            if bq is None:
                blocks[n] = np.zeros(shape, dtype=complex)
                continue
            bp = self.block(n + q.degree)
            blocks[n] = np.zeros(shape, dtype=complex) if bp is None else bp @ bq
        return BlockOperator(t, deg, blocks, safe)

    @property
    def H(self) -> "BlockOperator":
        t = self.trunc
        deg = -self.degree
        safe = min(self.safe_ceiling + self.degree, t.n_max - max(deg, 0))
        blocks = {}
        for m in range(max(0, -deg), safe + 1):
            src = m + deg
            b = self.block(src) if src >= 0 else None
            blocks[m] = (np.zeros((t.dims[m + deg], t.dims[m]), dtype=complex)
                         if b is None else b.conj().T)
        return BlockOperator(t, deg, blocks, safe)


@dataclass(frozen=True, eq=False)
class OperatorSum(_OperatorAlgebra):
    """Sum of single-degree parts, at most one per degree."""

    terms: tuple[BlockOperator, ...]

    @staticmethod
    def combine(parts) -> "_OperatorAlgebra":
        by_degree: dict[int, BlockOperator] = {}
        for p in parts:
            by_degree[p.degree] = by_degree[p.degree] + p if p.degree in by_degree else p
        terms = tuple(by_degree[k] for k in sorted(by_degree))
        if len(terms) == 1:
            return terms[0]
        return OperatorSum(terms)

    def parts(self):
        return self.terms

    @property
    def trunc(self) -> FockTruncation:
        return self.terms[0].trunc

    @property
    def safe_ceiling(self) -> int:
        return min(p.safe_ceiling for p in self.terms)

    def part(self, degree: int) -> BlockOperator | None:
        for p in self.terms:
            if p.degree == degree:
                return p
        return None

    def __mul__(self, c):
        return OperatorSum(tuple(c * p for p in self.terms))

    __rmul__ = __mul__


def apply(op, vec: FockVector) -> FockVector:
    """Apply ``op`` to ``vec``; every occupied sector of ``vec`` must be safe."""
    t = vec.trunc
    top = vec.top_sector()
    out = np.zeros(t.total_dim, dtype=complex)
    for p in op.parts():
        if top > p.safe_ceiling:
            raise TruncationError(
                f"vector reaches sector {top}, above safe ceiling {p.safe_ceiling} of a degree {p.degree} part")
        for n in range(max(0, -p.degree), top + 1):
            b = p.block(n)
            if b is not None:
                out[t.sector_slice(n + p.degree)] += b @ vec.sector(n)
    return FockVector(t, out)


def matrix(op, src_top: int, tgt_top: int | None = None) -> np.ndarray:
    """Dense matrix of ``op`` from sectors ``0..src_top`` to sectors ``0..tgt_top``.

    Only blocks landing inside the target window are read; each of them must
    be exact.
    """
    if tgt_top is None:
        tgt_top = src_top
    parts = op.parts()
    t = parts[0].trunc
    out = np.zeros((t.span_dim(tgt_top), t.span_dim(src_top)), dtype=complex)
    for p in parts:
        for n in range(max(0, -p.degree), src_top + 1):
            m = n + p.degree
            if m > tgt_top:
                continue
            b = p.block(n)
            if b is not None:
                out[t.sector_slice(m), t.sector_slice(n)] += b
    return out


def compress(op, top: int) -> np.ndarray:
    """``P op P`` with ``P`` the projection onto sectors ``0..top``."""
    return matrix(op, top, top)


def block_norms(op: BlockOperator) -> dict[int, float]:
    out = {}
    for n in op.sources():
        b = op.block(n)
        out[n] = 0.0 if b is None or b.size == 0 else float(np.linalg.norm(b, 2))
    return out


# ---------------------------------------------------------------------------
# constructors


def _as_mode_vector(f, trunc: FockTruncation) -> np.ndarray:
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.shape != (trunc.d,):
        raise ConfigurationError(f"vector of length {f.size} does not live in a {trunc.d}-dimensional space")
    return f


def creation_op(f, trunc: FockTruncation) -> BlockOperator:
    """a*(f) = sum_i f_i a_i^dagger (degree +1)."""
    f = _as_mode_vector(f, trunc)
    blocks = {}
    for n in range(trunc.n_max):
        acc = sp.csr_matrix((trunc.dims[n + 1], trunc.dims[n]), dtype=complex)
        for i in np.flatnonzero(f):
            acc = acc + f[i] * trunc.raising(i, n)
        blocks[n] = acc.toarray()
    return BlockOperator(trunc, 1, blocks, trunc.n_max - 1)


def annihilation_op(f, trunc: FockTruncation) -> BlockOperator:
    """a(f), the adjoint of a*(f): antilinear in ``f`` and zero on the vacuum."""
    return creation_op(f, trunc).H


def number_op(trunc: FockTruncation) -> BlockOperator:
    blocks = {n: n * np.eye(trunc.dims[n], dtype=complex) for n in range(trunc.n_max + 1)}
    return BlockOperator(trunc, 0, blocks, trunc.n_max)


def _check_tensor(F, l: int, m: int, trunc: FockTruncation) -> np.ndarray:
    if l < 0 or m < 0 or l + m > 4:
        raise ConfigurationError(f"monomials need 0 <= l+m <= 4, got l={l}, m={m}")
    F = np.asarray(F, dtype=complex)
    if F.shape != (trunc.d,) * (l + m):
        raise ConfigurationError(
            f"tensor of shape {F.shape} does not match rank {l + m} over dimension {trunc.d}")
    return F


def _ladder_product(F: np.ndarray, ops: tuple[int, ...], n: int, trunc: FockTruncation):
    """sum_idx F[idx] X_{idx_0} ... X_{idx_last} on sector ``n``.

    ``ops`` lists the ladder steps left to right (+1 creator, -1 annihilator);
    the rightmost acts first. Returns a sparse matrix or ``None`` if the
    product leaves the Fock space at the bottom.
    """
    if not ops:
        return F.item() * sp.identity(trunc.dims[n], dtype=complex, format="csr")
    inner_deg = sum(ops[1:])
    src = n + inner_deg
    if src < 0 or src + ops[0] < 0:
        return None
    acc = None
    for i in range(trunc.d):
        sub = F[i]
        if not np.any(sub):
            continue
        inner = _ladder_product(sub, ops[1:], n, trunc)
        if inner is None:
            continue
        step = trunc.raising(i, src) if ops[0] > 0 else trunc.lowering(i, src)
        term = step @ inner
        acc = term if acc is None else acc + term
    if acc is None:
        acc = sp.csr_matrix((trunc.dims[src + ops[0]], trunc.dims[n]), dtype=complex)
    return acc


def _monomial(F, ops: tuple[int, ...], safe: int, trunc: FockTruncation) -> BlockOperator:
    deg = sum(ops)
    blocks = {}
    for n in range(max(0, -deg), safe + 1):
        prod = _ladder_product(F, ops, n, trunc)
        shape = (trunc.dims[n + deg], trunc.dims[n])
        blocks[n] = np.zeros(shape, dtype=complex) if prod is None else prod.toarray()
    return BlockOperator(trunc, deg, blocks, safe)


def normal_monomial(F, l: int, m: int, trunc: FockTruncation) -> BlockOperator:
    """sum F[i_1..i_l, k_1..k_m] a*_{i_1}...a*_{i_l} a_{k_1}...a_{k_m}.

    The last ``m`` tensor slots are conjugate-space coordinates: a simple
    tensor ``f_1 x ... x j(h_1) x ...`` has coordinates ``f_1[i] ... conj(h_1[k])``,
    so it produces ``a*(f_1)...a(h_1)...``.
    """
    F = _check_tensor(F, l, m, trunc)
    safe = trunc.n_max - max(l - m, 0)
    return _monomial(F, (1,) * l + (-1,) * m, safe, trunc)


def antinormal_monomial(F, l: int, m: int, trunc: FockTruncation) -> BlockOperator:
    """Same tensor as :func:`normal_monomial` with all annihilators to the left."""
    F = _check_tensor(F, l, m, trunc)
    F = np.moveaxis(F, tuple(range(l)), tuple(range(m, l + m))) if l and m else F
    return _monomial(F, (-1,) * m + (1,) * l, trunc.n_max - l, trunc)


def nest_bound(l: int, m: int, n: int) -> float:
    """Norm bound sqrt(n! (n-m+l)!) / (n-m)! of a normal-ordered monomial on sector n."""
    if n < m:
        return 0.0
    return math.sqrt(math.factorial(n) * math.factorial(n - m + l)) / math.factorial(n - m)


def antinormal_bound(l: int, m: int, n: int) -> float:
    """(n+l)! / sqrt(n! (n-m+l)!) for annihilators placed left of creators."""
    if n - m + l < 0:
        return 0.0
    return math.factorial(n + l) / math.sqrt(math.factorial(n) * math.factorial(n - m + l))
