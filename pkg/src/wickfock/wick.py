"""Second-order Wick operators smeared with difference operators.

The test-space kernel ``F = sum_j Q_j diag(f_j) Q_j^T`` is the single source of
truth. With ``E`` the quotient map, the normal-ordered square
``:Phi'^{x2}:(F) = sum_{yz} F[y, z] :Phi'(e_y) Phi'(e_z):`` splits into

* ``A  = sum (E F E^H)[i, k] a*_i a_k``      (degree 0),
* ``B+ = 1/2 sum (E F E^T)[i, j] a*_i a*_j`` (degree +2),
* ``B- = 1/2 sum (conj(E) F E^H)[k, l] a_k a_l`` (degree -2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, PreconditionError, TruncationError
from .fock import (BlockOperator, FockTruncation, FockVector, OperatorSum, compress,
                   creation_op, normal_monomial)
from .quasifree import QuotientMap
from .report import CertificateReport

CLASS_S_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SmearingTerm:
    """One ``(Q_j, f_j)`` pair; ``witnesses`` holds real ``g`` with ``f = sum g^2``."""

    Q: np.ndarray
    f: np.ndarray
    witnesses: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        Q = np.asarray(self.Q)
        f = np.asarray(self.f)
        if np.iscomplexobj(Q) and np.any(Q.imag):
            raise ConfigurationError("difference operators must have real coefficients")
        if np.iscomplexobj(f) and np.any(f.imag):
            raise ConfigurationError("smearing functions must be real")
        Q, f = np.real(Q).astype(float), np.real(f).astype(float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or f.shape != (Q.shape[0],):
            raise ConfigurationError(f"inconsistent term shapes Q{Q.shape}, f{f.shape}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "f", f)
        if self.witnesses is not None:
            ws = tuple(np.asarray(g, dtype=float) for g in self.witnesses)
            if any(g.shape != f.shape for g in ws):
                raise ConfigurationError("witness shapes do not match the smearing function")
            res = np.max(np.abs(f - sum(g ** 2 for g in ws))) if ws else np.max(np.abs(f))
            if res > CLASS_S_TOL * max(1.0, np.max(np.abs(f))):
                raise ConfigurationError(f"witnesses do not square-sum to f (residual {res:.3e})")
            object.__setattr__(self, "witnesses", ws)

    @classmethod
    def from_squares(cls, Q, generators) -> "SmearingTerm":
        gens = tuple(np.asarray(g, dtype=float) for g in generators)
        return cls(Q, sum(g ** 2 for g in gens), gens)

    @property
    def d_test(self) -> int:
        return self.f.size


@dataclass(frozen=True, eq=False)
class SmearingSpec:
    terms: tuple[SmearingTerm, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ConfigurationError("smearing needs at least one term")
        if len({t.d_test for t in terms}) != 1:
            raise ConfigurationError("smearing terms live on different test spaces")
        object.__setattr__(self, "terms", terms)

    @property
    def d_test(self) -> int:
        return self.terms[0].d_test

    @property
    def class_S(self) -> bool:
        return all(t.witnesses is not None for t in self.terms)

    def square_terms(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """``(Q, g)`` pairs with ``f_j = sum g^2`` unrolled into single squares."""
        if not self.class_S:
            raise PreconditionError("class-S witnesses are missing for some smearing term")
        return [(t.Q, g) for t in self.terms for g in t.witnesses]

    def kernel(self) -> np.ndarray:
        return sum(t.Q @ np.diag(t.f) @ t.Q.T for t in self.terms)

    def support(self) -> np.ndarray:
        """Grid sites touched by any smearing vector ``Q e_x`` with ``f(x) != 0``."""
        touched = np.zeros(self.d_test, dtype=bool)
        for t in self.terms:
            cols = np.flatnonzero(t.f)
            touched[cols] = True
            touched |= np.any(t.Q[:, cols] != 0, axis=1)
        return touched


@dataclass(frozen=True, eq=False)
class QuadraticKernel:
    F_test: np.ndarray
    F_K: np.ndarray
    F_Kbar: np.ndarray
    F_mix: np.ndarray
    qm: QuotientMap

    @property
    def norm_K(self) -> float:
        return float(np.linalg.norm(self.F_K))

    @property
    def norm_Kbar(self) -> float:
        return float(np.linalg.norm(self.F_Kbar))

    @property
    def relative_bound_constant(self) -> float:
        return max(self.norm_K, self.norm_Kbar)

    def ordering_constant(self) -> complex:
        """w2(F): the shift between normal-ordered and plain products."""
        return self.qm.two_point.pair_kernel(self.F_test)


def kernel_from_matrix(F_test, qm: QuotientMap) -> QuadraticKernel:
    F = np.asarray(F_test, dtype=complex)
    if F.shape != (qm.d_test, qm.d_test):
        raise ConfigurationError(f"kernel of shape {F.shape} for a {qm.d_test}-point test space")
    F = 0.5 * (F + F.T)
    E = qm.matrix
    return QuadraticKernel(F, E @ F @ E.T, E.conj() @ F @ E.conj().T, E @ F @ E.conj().T, qm)


def kernel_from_smearing(spec: SmearingSpec, qm: QuotientMap) -> QuadraticKernel:
    if spec.d_test != qm.d_test:
        raise ConfigurationError(
            f"smearing over {spec.d_test} points, quotient map over {qm.d_test}")
    return kernel_from_matrix(spec.kernel(), qm)


@dataclass(frozen=True, eq=False)
class WickOperator:
    A: BlockOperator
    B_plus: BlockOperator
    B_minus: BlockOperator
    kernel: QuadraticKernel
    ordering_constant: complex = field(default=0j)

    @property
    def B(self) -> OperatorSum:
        return self.B_plus + self.B_minus

    @property
    def T(self) -> OperatorSum:
        return self.A + self.B_plus + self.B_minus

    @property
    def trunc(self) -> FockTruncation:
        return self.A.trunc

    @property
    def safe_top(self) -> int:
        """Largest sector ``K`` such that every part is exact on sectors ``0..K``."""
        return self.trunc.n_max - 2

    def compressed(self, top: int | None = None) -> np.ndarray:
        return compress(self.T, self.safe_top if top is None else top)


def wick_square_operator(ker: QuadraticKernel, trunc: FockTruncation) -> WickOperator:
    if trunc.d != ker.qm.rank:
        raise ConfigurationError(
            f"truncation over dimension {trunc.d} does not match quotient rank {ker.qm.rank}")
    if trunc.n_max - 2 < 2:
        raise TruncationError(f"n_max={trunc.n_max} leaves no sector above 1 where the square is exact")
    A = normal_monomial(ker.F_mix, 1, 1, trunc)
    Bp = 0.5 * normal_monomial(ker.F_K, 2, 0, trunc)
    Bm = 0.5 * normal_monomial(ker.F_Kbar, 0, 2, trunc)
    return WickOperator(A, Bp, Bm, ker, ker.ordering_constant())


def compression_T1(T: WickOperator) -> np.ndarray:
    """One-particle block of ``T`` in mode coordinates; only the degree-0 part contributes."""
    basis = T.trunc.bases[1]
    # sector 1 is ordered lexicographically by occupation, which reverses the modes
    order = [basis.index[tuple(int(i == k) for i in range(T.trunc.d))] for k in range(T.trunc.d)]
    return T.A.blocks[1][np.ix_(order, order)].copy()


def second_quantization(T1, trunc: FockTruncation) -> BlockOperator:
    """dGamma(T1) = sum_{ik} T1[i, k] a*_i a_k, acting as T1 on every tensor slot."""
    T1 = np.asarray(T1, dtype=complex)
    if T1.shape != (trunc.d, trunc.d):
        raise ConfigurationError(f"one-particle operator of shape {T1.shape} on dimension {trunc.d}")
    if np.linalg.norm(T1 - T1.conj().T) > 1e-10 * max(1.0, np.linalg.norm(T1)):
        raise ConfigurationError("second quantization needs a Hermitian one-particle operator")
    return normal_monomial(T1, 1, 1, trunc)


def region_projector(region, qm: QuotientMap, trunc: FockTruncation, top: int) -> np.ndarray:
    """Projection onto the Fock space over ``span{[e_x] : x in region}``, sectors ``0..top``."""
    cols = np.flatnonzero(np.asarray(region, dtype=bool))
    basis = scipy.linalg.orth(qm.matrix[:, cols]) if cols.size else np.zeros((qm.rank, 0))
    raisers = [creation_op(basis[:, i], trunc) for i in range(basis.shape[1])]
    dim = trunc.span_dim(top)
    P = np.zeros((dim, dim), dtype=complex)
    current = [FockVector.vacuum(trunc)]
    for n in range(top + 1):
        sl = trunc.sector_slice(n)
        if current:
            M = np.stack([v.sector(n) for v in current], axis=1)
            U = scipy.linalg.orth(M)
            P[sl, sl] = U @ U.conj().T
            if n < top:
                seeds = [FockVector.from_sectors(trunc, {n: U[:, j]}) for j in range(U.shape[1])]
                current = [c @ s for c in raisers for s in seeds]
    return P


def support_invariance_check(spec: SmearingSpec, region, qm: QuotientMap,
                             trunc: FockTruncation, tol: float = 1e-9) -> CertificateReport:
    """Residual of ``(I - P_O) T P_O`` on the safe sectors."""
    region = np.asarray(region, dtype=bool)
    if region.shape != (spec.d_test,):
        raise ConfigurationError("region mask must cover the test grid")
    outside = spec.support() & ~region
    if np.any(outside):
        raise PreconditionError(
            f"smearing reaches grid sites {np.flatnonzero(outside).tolist()} outside the region")
    T = wick_square_operator(kernel_from_smearing(spec, qm), trunc)
    top = T.safe_top
    M = T.compressed(top)
    P = region_projector(region, qm, trunc, top)
    res = float(np.linalg.norm((np.eye(len(P)) - P) @ M @ P, 2))
    return CertificateReport.make(
        "locality_invariance", {"region_sites": float(region.sum()),
                                "region_fock_rank": float(np.real(np.trace(P)))},
        res, tol, n_probes=0, notes="norm of (I - P_O) T P_O on sectors <= n_max - 2")
