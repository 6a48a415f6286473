"""Sufficient-condition certificates for essential self-adjointness at truncation.

Nothing here decides self-adjointness of an infinite-dimensional operator. Each
function checks one finite, exactly representable statement on the safe
sectors of a truncation (analytic growth, relative bounds, the number-operator
lower bound, commutator identities) or reports how spectra move with the
cutoff. Operator inequalities are always checked through minimal eigenvalues
of Hermitian parts; random probes are a secondary smoke test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, MemoryGuardError
from .fock import (FockTruncation, FockVector, compress, creation_op, matrix, number_op)
from .quasifree import QuotientMap, embed, field_op
from .regularization import cutoff_kernels, full_cutoff
from .report import CertificateReport
from .wick import SmearingSpec, WickOperator, kernel_from_matrix, kernel_from_smearing, wick_square_operator

IDENTITY_TOL = 1e-10
PSD_TOL = 1e-8
MEMORY_CAP = 20_000


def psd_tolerance(M: np.ndarray, base: float = PSD_TOL) -> float:
    """``base``, scaled by the operator norm once it exceeds 1e3."""
    return base * max(1.0, float(np.linalg.norm(M, 2)) / 1e3)


def min_hermitian_eig(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])


def _operator(O):
    return O.T if isinstance(O, WickOperator) else O


@dataclass(frozen=True)
class KonradyConstants:
    d: float
    c: float

    def __post_init__(self):
        if self.d < 0 or self.c < 0:
            raise ConfigurationError(f"constants must be non-negative, got d={self.d}, c={self.c}")

    @property
    def c_prime(self) -> float:
        return self.c + math.sqrt(self.c ** 2 + 2 * self.c * self.d)

    def as_dict(self) -> dict[str, float]:
        return {"d": self.d, "c": self.c, "c_prime": self.c_prime}


# ---------------------------------------------------------------------------
# analytic vectors


def nelson_block_constant(O, trunc: FockTruncation) -> tuple[float, list[float]]:
    """Smallest ``c`` with ``||O restricted to sectors <= n|| <= c (n + 2)`` for ``n <= n_max - 2``."""
    op = _operator(O)
    ratios = []
    for n in range(trunc.n_max - 1):
        M = matrix(op, n, min(n + 2, trunc.n_max))
        ratios.append(float(np.linalg.norm(M, 2)) / (n + 2))
    return max(ratios), ratios


def nelson_certificate(O, trunc: FockTruncation, rng: np.random.Generator,
                       n_probes: int = 10, tol: float = IDENTITY_TOL) -> CertificateReport:
    """Check ``||O^m psi|| <= c^m prod_j (n + 2j + 2) <= c^m (n+2)^m m!`` for ``n + 2m <= n_max``."""
    op = _operator(O)
    if any(abs(p.degree) > 2 for p in op.parts()):
        raise ConfigurationError("analytic-growth bound is only implemented for degree <= 2")
    c, _ = nelson_block_constant(op, trunc)
    worst_prod = worst_relaxed = worst_matrix = worst_def = -np.inf
    count = 0
    for n in range(trunc.n_max - 1):
        m_max = (trunc.n_max - n) // 2
        prods = [math.prod(n + 2 * j + 2 for j in range(m)) for m in range(m_max + 1)]
        relaxed = [(n + 2) ** m * math.factorial(m) for m in range(m_max + 1)]
        # matrix form of the iterate on sectors <= n
        P = np.eye(trunc.span_dim(n), dtype=complex)
        for m in range(1, m_max + 1):
            lo = n + 2 * (m - 1)
            P = matrix(op, lo, lo + 2) @ P
            nrm = float(np.linalg.norm(P, 2))
            worst_matrix = max(worst_matrix, nrm / (c ** m * prods[m]) - 1 if c > 0 else nrm)
        for _ in range(n_probes):
            psi = FockVector.random(trunc, rng, n)
            count += 1
            c_hat = max(c * (n + 2), psi.norm())
            v = psi
            for m in range(0, m_max + 1):
                if m:
                    v = op @ v
                nv = v.norm()
                bp = c ** m * prods[m] * psi.norm()
                br = c ** m * relaxed[m] * psi.norm()
                if bp > 0:
                    worst_prod = max(worst_prod, nv / bp - 1)
                    worst_relaxed = max(worst_relaxed, nv / br - 1)
                else:
                    worst_prod = max(worst_prod, nv)
                    worst_relaxed = max(worst_relaxed, nv)
                worst_def = max(worst_def, nv / (c_hat ** (m + 1) * math.factorial(m)) - 1)
            worst_relaxed = max(worst_relaxed, max(p / r - 1 for p, r in zip(prods, relaxed)))
    parts = [
        CertificateReport.make("iterate_product_bound", {"c_block": c}, worst_prod, tol, count,
                               "relative excess of ||O^m psi|| over c^m prod_j (n+2j+2)"),
        CertificateReport.make("iterate_factorial_bound", {"c_block": c}, worst_relaxed, tol, count,
                               "relative excess over c^m (n+2)^m m!"),
        CertificateReport.make("iterate_matrix_bound", {"c_block": c}, worst_matrix, tol, 0,
                               "relative excess of ||O^m on sectors <= n|| over the product bound"),
        CertificateReport.make("analytic_vector_definition", {"c_block": c}, worst_def, tol, count,
                               "||O^m psi|| <= c_hat^(m+1) m! with c_hat = max(c (n+2), ||psi||)"),
    ]
    return CertificateReport.combine("nelson", parts, {"c_block": c})


# ---------------------------------------------------------------------------
# relative bounds


def _number_matrix(trunc: FockTruncation, top: int) -> np.ndarray:
    return np.diag(np.concatenate([np.full(trunc.dims[n], float(n)) for n in range(top + 1)]))


def _probe_vectors(trunc: FockTruncation, rng: np.random.Generator, top: int, n_probes: int):
    """The vacuum, then ``n_probes`` random unit vectors on sectors ``<= top``."""
    dim = trunc.span_dim(top)
    yield FockVector.vacuum(trunc).data[:dim]
    for _ in range(n_probes):
        yield FockVector.random(trunc, rng, top).data[:dim]


def wuest_certificate(A, B, d: float, trunc: FockTruncation, rng: np.random.Generator,
                      n_probes: int = 100, tol: float = IDENTITY_TOL) -> CertificateReport:
    """``||B psi|| <= ||(A + dN) psi|| + d ||psi||`` and ``(A + dN)^2 >= d^2 N^2``."""
    if d < 0:
        raise ConfigurationError("relative-bound constant must be non-negative")
    top = trunc.n_max - 2
    Am = compress(A, top)
    a_min = min_hermitian_eig(Am)
    if a_min < -1e-10 * max(1.0, np.linalg.norm(Am, 2)):
        return CertificateReport(
            "wuest", {"d": float(d), "min_eig_A": a_min}, float("inf"), tol, False, 0,
            "precondition failed: A is not positive on the safe sectors")
    Bm = matrix(B, top, trunc.n_max)
    Nm = _number_matrix(trunc, top)
    worst = -np.inf
    for psi in _probe_vectors(trunc, rng, top, n_probes):
        lhs = np.linalg.norm(Bm @ psi)
        rhs = np.linalg.norm((Am + d * Nm) @ psi) + d * np.linalg.norm(psi)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
    probes = CertificateReport.make("relative_bound_probes", {"d": d}, worst, tol, n_probes + 1,
                                    "max (||B psi|| - ||(A+dN) psi|| - d||psi||) / max(1, rhs)")
    # A and N are block diagonal, so the square inequality splits by sector
    sq_worst, sq_tol = -np.inf, PSD_TOL
    for n in range(top + 1):
        sl = trunc.sector_slice(n)
        M = Am[sl, sl] + d * n * np.eye(trunc.dims[n])
        S = M.conj().T @ M - (d * n) ** 2 * np.eye(trunc.dims[n])
        sq_tol = max(sq_tol, psd_tolerance(S))
        sq_worst = max(sq_worst, -min_hermitian_eig(S))
    square = CertificateReport.make("square_domination", {"d": d}, sq_worst, sq_tol, 0,
                                    "-min eig of (A+dN)^2 - d^2 N^2 per sector")
    return CertificateReport.combine("wuest", [probes, square], {"d": d, "min_eig_A": a_min})


def konrady_constant(spec: SmearingSpec, qm: QuotientMap, grid, d: float | None = None) -> KonradyConstants:
    """Lower-bound constant from the half-frequency sum, relative-bound constant from kernel norms.

    With ``c_full`` the constant of the full cutoff member (every frequency
    pair counted once through the half-space weights), ``c = 3/2 c_full``: three
    times each strict half-space pairing. ``d`` defaults to
    ``max(||F_K||, ||F_Kbar||)``.
    """
    _, Fp = cutoff_kernels(spec, grid, full_cutoff(grid.shape))
    c_full = qm.two_point.pair_kernel(Fp).real
    c = max(0.0, 1.5 * float(c_full))
    if d is None:
        d = kernel_from_smearing(spec, qm).relative_bound_constant
    return KonradyConstants(float(d), c)


def konrady_certificate(A, B, consts: KonradyConstants, trunc: FockTruncation,
                        rng: np.random.Generator, n_probes: int = 100,
                        tol: float = IDENTITY_TOL) -> CertificateReport:
    """Both hypotheses of the number-operator perturbation argument, on safe sectors.

    (i)  ``||B psi|| <= d ||N psi|| + d ||psi||``, by probes and by the sufficient
         operator bound ``B^H B <= d^2 (N + 1)^2``;
    (ii) ``Re <N psi, (A + B) psi> >= -c <psi, (N + I) psi>``.
    """
    top = trunc.n_max - 2
    Am = compress(A, top)
    a_min = min_hermitian_eig(Am)
    consts_d = consts.as_dict()
    if a_min < -1e-10 * max(1.0, np.linalg.norm(Am, 2)):
        return CertificateReport(
            "konrady", {**consts_d, "min_eig_A": a_min}, float("inf"), tol, False, 0,
            "precondition failed: A is not positive on the safe sectors")
    d, c = consts.d, consts.c
    Bm = matrix(B, top, trunc.n_max)
    Nm = _number_matrix(trunc, top)
    Id = np.eye(len(Nm))
    worst = -np.inf
    for psi in _probe_vectors(trunc, rng, top, n_probes):
        lhs = np.linalg.norm(Bm @ psi)
        rhs = d * np.linalg.norm(Nm @ psi) + d * np.linalg.norm(psi)
        worst = max(worst, (lhs - rhs) / max(1.0, rhs))
    probes = CertificateReport.make("bound_probes", {"d": d}, worst, tol, n_probes + 1,
                                    "max (||B psi|| - d||N psi|| - d||psi||) / max(1, rhs)")
    S = d ** 2 * (Nm + Id) @ (Nm + Id) - Bm.conj().T @ Bm
    bound = CertificateReport.make("bound_operator", {"d": d}, -min_hermitian_eig(S), psd_tolerance(S), 0,
                                   "-min eig of d^2 (N+1)^2 - B^H B")
    Tm = Am + compress(B, top)
    L = Nm @ Tm + c * (Nm + Id)
    lower = CertificateReport.make("number_lower_bound", {"c": c}, -min_hermitian_eig(L), psd_tolerance(L), 0,
                                   "-min eig of Herm(N (A+B) + c (N+I))")
    return CertificateReport.combine("konrady", [probes, bound, lower], {**consts_d, "min_eig_A": a_min})


# ---------------------------------------------------------------------------
# commutators


def normal_square(h, qm: QuotientMap, trunc: FockTruncation) -> WickOperator:
    """``:Phi'(conj h) Phi'(h):`` as a Wick square with kernel ``conj(h) h^T``."""
    h = np.asarray(h, dtype=complex)
    return wick_square_operator(kernel_from_matrix(np.outer(h.conj(), h), qm), trunc)


def commutator_identities(h, qm: QuotientMap, trunc: FockTruncation,
                          tol: float = IDENTITY_TOL) -> CertificateReport:
    """``N Phi'(h) = Phi'(h)(N - I) + sqrt2 a*([h])`` and the number-weighted lower bound."""
    h = np.asarray(h, dtype=complex)
    top = trunc.n_max - 2
    N = number_op(trunc)
    I = N.identity(trunc)
    phi = field_op(h, qm, trunc).op
    X = N @ phi - phi @ (N - I) - np.sqrt(2.0) * creation_op(embed(h, qm), trunc)
    res = float(np.linalg.norm(matrix(X, top, top + 1), 2))
    ident = CertificateReport.make("field_number_commutator", {}, res, tol, 0,
                                   "norm of N Phi(h) - Phi(h)(N-I) - sqrt2 a*([h]) on safe sectors")
    w = float(qm.two_point(h.conj(), h).real)
    Sm = normal_square(h, qm, trunc).compressed(top)
    Nm = _number_matrix(trunc, top)
    L = Nm @ Sm + Sm @ Nm + 3 * w * (Nm + np.eye(len(Nm)))
    lower = CertificateReport.make("weighted_square_lower_bound", {"w2_hbar_h": w}, -min_hermitian_eig(L),
                                   psd_tolerance(L), 0,
                                   "-min eig of Herm(N S + S N + 3 w2(conj h, h)(N+I))")
    return CertificateReport.combine("commutator_identities", [ident, lower], {"w2_hbar_h": w})


# ---------------------------------------------------------------------------
# truncation stability


def memory_guard(trunc: FockTruncation, cap: int = MEMORY_CAP) -> None:
    if trunc.total_dim > cap:
        raise MemoryGuardError(
            f"total Fock dimension {trunc.total_dim} exceeds the cap {cap} "
            f"(rank {trunc.d}, n_max {trunc.n_max})")


@dataclass(frozen=True, eq=False)
class StabilityResult:
    report: CertificateReport
    n_max: tuple[int, ...]
    lowest: np.ndarray
    deltas: np.ndarray


def truncation_stability(builder: Callable[[int], WickOperator], n_max_list, k: int = 3,
                         shift_tol: float = 1e-3, cap: int = MEMORY_CAP) -> StabilityResult:
    """Lowest ``k`` eigenvalues of ``P_K T P_K`` with ``K = n_max - 2`` across truncations.

    The relative shift between consecutive truncations is
    ``max_i |lam_i' - lam_i| / max(|lam_i|, 1)``. The final shift must stay
    below ``shift_tol`` and the shifts must not grow, up to a noise floor of
    ``1e-3 * shift_tol`` once they have settled.
    """
    ns = tuple(int(n) for n in n_max_list)
    if len(ns) < 2 or list(ns) != sorted(set(ns)):
        raise ConfigurationError("need at least two strictly ascending truncation levels")
    rows = []
    for n in ns:
        T = builder(n)
        memory_guard(T.trunc, cap)
        M = T.compressed(n - 2)
        ev = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        if ev.size < k:
            raise ConfigurationError(f"only {ev.size} eigenvalues at n_max={n}, asked for {k}")
        rows.append(ev[:k])
    lowest = np.array(rows)
    deltas = np.max(np.abs(np.diff(lowest, axis=0)) / np.maximum(np.abs(lowest[:-1]), 1.0), axis=1)
    consts = {f"shift_{a}_{b}": s for a, b, s in zip(ns, ns[1:], deltas)}
    shift = CertificateReport.make("final_relative_shift", consts, deltas[-1], shift_tol)
    trend = CertificateReport.make(
        "shift_trend", {}, float(np.max(np.diff(deltas))) if deltas.size > 1 else -np.inf, 1e-3 * shift_tol,
        notes="largest increase between consecutive shifts")
    report = CertificateReport.combine(
        "truncation_stability", [shift, trend], consts,
        notes="finite-truncation proxy; self-adjointness is certified only via sufficient conditions")
    return StabilityResult(report, ns, lowest, deltas)


def t1_scan(T1, class_S: bool, identity_Q: bool, tol: float = 1e-12) -> CertificateReport:
    """Hermiticity and real spectrum of the one-particle compression; positivity when expected."""
    T1 = np.asarray(T1, dtype=complex)
    herm = float(np.linalg.norm(T1 - T1.conj().T, 2)) / max(1.0, float(np.linalg.norm(T1, 2)))
    parts = [CertificateReport.make("t1_hermitian", {}, herm, tol)]
    ev = np.linalg.eigvals(T1)
    parts.append(CertificateReport.make(
        "t1_real_spectrum", {}, float(np.max(np.abs(ev.imag))) if ev.size else 0.0, 1e-10,
        notes="no eigenvalues at +-i: automatic for a finite Hermitian matrix"))
    lam = np.linalg.eigvalsh(0.5 * (T1 + T1.conj().T))
    consts = {"t1_min_eig": lam[0], "t1_max_eig": lam[-1]}
    if class_S and identity_Q:
        parts.append(CertificateReport.make("t1_positive", {"t1_min_eig": lam[0]}, -lam[0], 1e-10))
    note = "" if class_S and identity_Q else "positivity not asserted for derivative smearing"
    return CertificateReport.combine("t1_scan", parts, consts, note)
