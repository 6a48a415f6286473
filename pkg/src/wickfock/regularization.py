"""Monotone cutoff family for class-S smearing, and resolvent convergence.

On a periodic grid with ``N`` points and integer DFT frequencies ``k`` (one
representative per class, in ``(-s/2, s/2]`` per axis), each single-square
term ``(Q, g)`` contributes plane-wave smearings ``v_k = Q (g e^{-i p_k x})``:

    F_n  = (1/N) sum_{|k| <= n}        v_k v_k^H
    F'_n = (1/N) sum_{|k| <= n} w_k    v_k v_k^H,   w_k + w_{-k} = 2,

with ``w`` supported on the half space ``k_0 >= 0``. At the full cutoff DFT
completeness gives ``F_n = sum_j Q_j diag(g_j^2) Q_j^T``. The constants
``c_n = w2(F'_n)`` are sums of ``w2(conj(h), h)`` and hence non-negative and
non-decreasing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, CoverageError, EndpointError, PreconditionError, SpectralError
from .fock import FockTruncation, FockVector, compress
from .quasifree import QuotientMap, state_two_point
from .report import CertificateReport
from .wick import SmearingSpec, SmearingTerm, WickOperator, kernel_from_matrix, wick_square_operator

PSD_TOL = 1e-8
RESOLVENT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SquaresPartition:
    bumps: tuple[np.ndarray, ...]
    chi: tuple[np.ndarray, ...]

    def residual(self) -> float:
        return float(np.max(np.abs(sum(c ** 2 for c in self.chi) - 1.0)))


def squares_partition(bumps) -> SquaresPartition:
    """chi_k = phi_k / sqrt(sum_l phi_l^2), so that sum_k chi_k^2 == 1."""
    phis = tuple(np.asarray(b, dtype=float) for b in bumps)
    if not phis:
        raise CoverageError("need at least one bump")
    if any(np.any(p < 0) for p in phis):
        raise ConfigurationError("partition bumps must be non-negative")
    total = sum(p ** 2 for p in phis)
    gaps = np.flatnonzero(total <= 0)
    if gaps.size:
        raise CoverageError(f"no bump covers grid points {gaps.tolist()}")
    norm = np.sqrt(total)
    return SquaresPartition(phis, tuple(p / norm for p in phis))


def localize(spec: SmearingSpec, partition: SquaresPartition) -> SmearingSpec:
    """Split every square ``g^2`` into ``sum_{k,l} (g chi_k chi_l)^2``."""
    terms = []
    for Q, g in spec.square_terms():
        pieces = [g * ck * cl for ck in partition.chi for cl in partition.chi]
        terms.append(SmearingTerm.from_squares(Q, pieces))
    return SmearingSpec(tuple(terms))


# ---------------------------------------------------------------------------
# discrete momentum space


def frequencies(shape) -> np.ndarray:
    """Integer frequency vectors, one per DFT class, components in ``(-s/2, s/2]``."""
    axes = [np.arange(s) - (s - 1) // 2 for s in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def full_cutoff(shape) -> int:
    return max(s // 2 for s in shape)


def half_space_weights(freqs: np.ndarray, shape) -> np.ndarray:
    """2 on ``0 < k_0 < s_0/2``, 1 where ``k_0`` is self-conjugate (0 or Nyquist), else 0."""
    k0, s0 = freqs[:, 0], shape[0]
    self_conj = (k0 == 0) | ((s0 % 2 == 0) & (k0 == s0 // 2))
    return np.where(self_conj, 1.0, np.where(k0 > 0, 2.0, 0.0))


def plane_waves(shape) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies and the matrix ``P[k, x] = exp(-i p_k . x)`` over flattened grid points."""
    freqs = frequencies(shape)
    mesh = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    phase = sum(np.outer(freqs[:, a], points[:, a]) * (2 * np.pi / s) for a, s in enumerate(shape))
    return freqs, np.exp(-1j * phase)


def _smearing_vectors(spec: SmearingSpec, grid):
    if not grid.periodic:
        raise PreconditionError("cutoff kernels need a periodic grid")
    shape = grid.shape
    if int(np.prod(shape)) != spec.d_test:
        raise ConfigurationError(f"grid with {int(np.prod(shape))} points, smearing over {spec.d_test}")
    freqs, P = plane_waves(shape)
    # rows: v_k for every (term, k)
    rows = [(P * g[None, :]) @ Q.T for Q, g in spec.square_terms()]
    return freqs, rows


def cutoff_kernels(spec: SmearingSpec, grid, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(F_n, F'_n)`` for integer cutoff ``n``; ``n >= full_cutoff`` recovers the full kernel."""
    if n < 0:
        raise ConfigurationError("cutoff must be non-negative")
    freqs, rows = _smearing_vectors(spec, grid)
    N = freqs.shape[0]
    inside = np.all(np.abs(freqs) <= n, axis=1).astype(float)
    w = half_space_weights(freqs, grid.shape) * inside
    Fn = sum(V.T @ (inside[:, None] * V.conj()) for V in rows) / N
    Fp = sum(V.T @ (w[:, None] * V.conj()) for V in rows) / N
    return np.real(Fn), Fp


@dataclass(frozen=True, eq=False)
class CutoffFamily:
    spec: SmearingSpec
    qm: QuotientMap
    trunc: FockTruncation
    cutoffs: tuple[int, ...]
    kernels: tuple[np.ndarray, ...]
    primed: tuple[np.ndarray, ...]
    constants: tuple[float, ...]
    operators: tuple[WickOperator, ...]
    limit: WickOperator
    limit_constant: float
    full: int
    reports: tuple[CertificateReport, ...] = field(default=())

    @property
    def top(self) -> int:
        return self.trunc.n_max - 2

    def member_matrix(self, i: int) -> np.ndarray:
        M = self.operators[i].compressed(self.top)
        return M + self.constants[i] * np.eye(len(M))

    def limit_matrix(self) -> np.ndarray:
        M = self.limit.compressed(self.top)
        return M + self.limit_constant * np.eye(len(M))


def _min_eig(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])


def _psd_tol(M: np.ndarray, base: float) -> float:
    # eigensolver accuracy degrades with scale; relax beyond norm 1e3
    return base * max(1.0, np.linalg.norm(M, 2) / 1e3)


def build_cutoff_family(spec: SmearingSpec, qm: QuotientMap, trunc: FockTruncation, grid,
                        cutoffs=None, rng: np.random.Generator | None = None,
                        n_probes: int = 5) -> CutoffFamily:
    full = full_cutoff(grid.shape)
    cutoffs = tuple(range(full + 1)) if cutoffs is None else tuple(int(c) for c in cutoffs)
    if list(cutoffs) != sorted(set(cutoffs)):
        raise ConfigurationError("cutoff schedule must be strictly increasing")
    kernels, primed, consts, ops = [], [], [], []
    for n in cutoffs:
        Fn, Fp = cutoff_kernels(spec, grid, n)
        c = qm.two_point.pair_kernel(Fp)
        kernels.append(Fn)
        primed.append(Fp)
        consts.append(float(c.real))
        ops.append(wick_square_operator(kernel_from_matrix(Fn, qm), trunc))
    limit = wick_square_operator(kernel_from_matrix(spec.kernel(), qm), trunc)
    c_full = float(qm.two_point.pair_kernel(cutoff_kernels(spec, grid, full)[1]).real)
    fam = CutoffFamily(spec, qm, trunc, cutoffs, tuple(kernels), tuple(primed), tuple(consts),
                       tuple(ops), limit, c_full, full)
    reports = certify_family(fam, rng if rng is not None else np.random.default_rng(0), n_probes)
    object.__setattr__(fam, "reports", reports)
    return fam


def certify_family(fam: CutoffFamily, rng: np.random.Generator, n_probes: int = 5):
    out = []
    c = np.array(fam.constants)
    scale = max(1.0, float(np.max(np.abs(c))))
    worst = max(-c[0], float(np.max(c[:-1] - c[1:])) if c.size > 1 else -np.inf)
    out.append(CertificateReport.make(
        "cutoff_constants_monotone", {"c_first": c[0], "c_last": c[-1]}, worst, 1e-12 * scale,
        notes="max(-c_0, max_n (c_n - c_{n+1}))"))

    M0 = fam.member_matrix(0)
    out.append(CertificateReport.make(
        "cutoff_first_psd", {"min_eig": _min_eig(M0)}, -_min_eig(M0), _psd_tol(M0, PSD_TOL)))

    mats = [fam.member_matrix(i) for i in range(len(fam.cutoffs))]
    incs = [_min_eig(b - a) for a, b in zip(mats, mats[1:])]
    if incs:
        out.append(CertificateReport.make(
            "cutoff_increments_psd", {"min_increment_eig": min(incs)}, -min(incs),
            max(_psd_tol(m, PSD_TOL) for m in mats)))

    if fam.cutoffs[-1] >= fam.full:
        last, lim = fam.operators[-1], fam.limit
        diff = 0.0
        for p, q in zip(last.T.parts(), lim.T.parts()):
            for n in p.sources():
                diff = max(diff, float(np.max(np.abs(p.blocks[n] - q.blocks[n]), initial=0.0)))
        diff = max(diff, abs(fam.constants[-1] - fam.limit_constant))
        out.append(CertificateReport.make(
            "cutoff_limit_exact", {"c_full": fam.limit_constant}, diff, 1e-9,
            notes="blockwise max |T_full - (T + c I)|"))

    worst = 0.0
    for _ in range(n_probes):
        psi = FockVector.random(fam.trunc, rng, fam.top)
        W2 = state_two_point(psi, fam.qm, fam.trunc)
        for i in range(len(fam.cutoffs)):
            lhs = np.vdot(psi.data[: len(mats[i])], mats[i] @ psi.data[: len(mats[i])])
            rhs = np.sum(fam.primed[i] * W2)
            worst = max(worst, abs(lhs - rhs))
    out.append(CertificateReport.make(
        "cutoff_expectation_identity", {}, worst, 1e-8, n_probes=n_probes,
        notes="|<psi, T_n psi> - w2'(F'_n)| over random unit psi"))
    return tuple(out)


# ---------------------------------------------------------------------------
# resolvents


def resolvent(op: np.ndarray, shift: complex = 1.0) -> np.ndarray:
    """``(op + shift I)^{-1}`` for a Hermitian matrix via its eigendecomposition."""
    op = np.asarray(op)
    H = 0.5 * (op + op.conj().T)
    if np.linalg.norm(op - H) > 1e-10 * max(1.0, np.linalg.norm(op)):
        raise ConfigurationError("resolvent needs a Hermitian operator")
    mu, V = np.linalg.eigh(H)
    gap = mu + shift
    i = int(np.argmin(np.abs(gap)))
    if abs(gap[i]) < 1e-12 * max(1.0, float(np.max(np.abs(mu)))):
        raise SpectralError(f"shift {shift} hits eigenvalue {mu[i]:.6e}", nearest_eigenvalue=float(mu[i]))
    return (V / gap) @ V.conj().T


def inverse_inequality_check(fam: CutoffFamily, tol: float = RESOLVENT_TOL) -> CertificateReport:
    """(T_n + I)^{-1} - (T_{n+1} + I)^{-1} >= 0 and (T_n + I)^{-1} >= 0 along the family."""
    R = [resolvent(fam.member_matrix(i)) for i in range(len(fam.cutoffs))]
    worst = max((-_min_eig(a - b) for a, b in zip(R, R[1:])), default=-np.inf)
    worst = max(worst, max(-_min_eig(r) for r in R))
    return CertificateReport.make("inverse_inequality", {"steps": len(R) - 1}, worst, tol)


@dataclass(frozen=True, eq=False)
class GraphLimitResult:
    report: CertificateReport
    cutoffs: tuple[int, ...]
    resolvent_residuals: np.ndarray
    projection_residuals: np.ndarray
    projection_ranks: tuple[int, ...]
    interval: tuple[float, float]


def _spectral_projector(M: np.ndarray, a: float, b: float) -> np.ndarray:
    mu, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    sel = (mu > a) & (mu < b)
    return V[:, sel] @ V[:, sel].conj().T


def graph_limit_experiment(fam: CutoffFamily, probes, interval=None,
                           slack: float = RESOLVENT_TOL, final_tol: float = 1e-10) -> GraphLimitResult:
    """Resolvent and spectral-projection convergence of the family, per probe."""
    lim = fam.limit_matrix()
    mu = np.linalg.eigvalsh(0.5 * (lim + lim.conj().T))
    if interval is None:
        interval = (-0.5, 0.5 * (mu[0] + mu[1]))
    a, b = map(float, interval)
    near = float(np.min(np.abs(mu[:, None] - np.array([a, b])[None, :])))
    if near < 1e-6:
        raise EndpointError(f"interval endpoint within {near:.1e} of an eigenvalue of the limit",
                            nearest_eigenvalue=float(mu[np.argmin(np.min(np.abs(mu[:, None] - [a, b]), axis=1))]))
    dim = len(lim)
    vs = [np.asarray(p.data if isinstance(p, FockVector) else p, dtype=complex)[:dim] for p in probes]
    R_lim = resolvent(lim)
    P_lim = _spectral_projector(lim, a, b)
    res = np.zeros((len(fam.cutoffs), len(vs)))
    proj = np.zeros_like(res)
    ranks = []
    for i in range(len(fam.cutoffs)):
        M = fam.member_matrix(i)
        R = resolvent(M)
        P = _spectral_projector(M, a, b)
        ranks.append(int(round(np.real(np.trace(P)))))
        for j, v in enumerate(vs):
            res[i, j] = np.linalg.norm(R @ v - R_lim @ v)
            proj[i, j] = np.linalg.norm(P @ v - P_lim @ v)
    parts = []
    rise = float(np.max(res[1:] - res[:-1])) if len(res) > 1 else -np.inf
    parts.append(CertificateReport.make(
        "resolvent_residual_nonincreasing", {}, rise, slack, n_probes=len(vs)))
    if fam.cutoffs[-1] >= fam.full:
        parts.append(CertificateReport.make(
            "resolvent_residual_final", {}, float(np.max(res[-1])), final_tol, n_probes=len(vs)))
        parts.append(CertificateReport.make(
            "projection_final", {"a": a, "b": b, "rank": ranks[-1]}, float(np.max(proj[-1])), final_tol,
            n_probes=len(vs)))
    report = CertificateReport.combine("graph_limit", parts, {"a": a, "b": b})
    return GraphLimitResult(report, fam.cutoffs, res, proj, tuple(ranks), (a, b))


def family_table(fam: CutoffFamily, graph: GraphLimitResult | None = None) -> list[dict]:
    """Per-cutoff rows: cutoff, c_n, min eigenvalue of the increment, resolvent residuals."""
    mats = [fam.member_matrix(i) for i in range(len(fam.cutoffs))]
    rows = []
    for i, n in enumerate(fam.cutoffs):
        row = {"cutoff": n, "c_n": fam.constants[i],
               "min_eig_increment": _min_eig(mats[i] - mats[i - 1]) if i else _min_eig(mats[0])}
        if graph is not None:
            for j in range(graph.resolvent_residuals.shape[1]):
                row[f"resolvent_residual_probe{j}"] = float(graph.resolvent_residuals[i, j])
        rows.append(row)
    return rows
