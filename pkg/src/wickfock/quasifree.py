"""One-particle space from a two-point matrix, and the field operator.

Test functions are complex vectors of length ``d_test``. A two-point matrix
``W`` pairs them bilinearly, ``w2(f, g) = f @ W @ g``. The one-particle space is
the quotient of test space by the null space of the Gram form
``G(f, g) = 2 w2(conj(f), g) = 2 f^H W g``, realized by an ``r x d_test`` map
``[f] = Q f`` with ``<Qf, Qg> = G(f, g)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateStateError, ModelError
from .fock import FockTruncation, OneParticleSpace, annihilation_op, creation_op

POSITIVE_TYPE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TwoPointMatrix:
    W: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        W = np.asarray(self.W, dtype=complex)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ModelError(f"two-point matrix must be square, got shape {W.shape}")
        object.__setattr__(self, "W", W)

    @property
    def d_test(self) -> int:
        return self.W.shape[0]

    def __call__(self, f, g) -> complex:
        """Bilinear pairing w2(f, g)."""
        return complex(np.asarray(f) @ self.W @ np.asarray(g))

    def pair_kernel(self, F) -> complex:
        """w2(F) = sum_{xy} F[x, y] W[x, y] for a kernel on test space x test space."""
        return complex(np.sum(np.asarray(F) * self.W))

    @property
    def gram(self) -> np.ndarray:
        return 2.0 * self.W

    def check_positive_type(self, tol: float = POSITIVE_TYPE_TOL) -> np.ndarray:
        """Return the Gram eigenvalues, raising :class:`ModelError` if not positive type."""
        G = self.gram
        scale = max(np.linalg.norm(G, 2), 1e-300)
        herm = np.linalg.norm(G - G.conj().T, 2)
        if herm > 1e-10 * scale:
            raise ModelError(
                f"two-point matrix is not of positive type: Gram form not Hermitian (residual {herm:.3e})")
        evals = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
        if evals[0] < -tol * scale:
            raise ModelError(
                f"two-point matrix is not of positive type: Gram eigenvalue {evals[0]:.6e} "
                f"below -{tol:g} * {scale:.6e}")
        return evals


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """``rank x d_test`` matrix sending a test vector to its class in K."""

    rank: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    tol: float
    two_point: TwoPointMatrix

    @property
    def d_test(self) -> int:
        return self.matrix.shape[1]


def one_particle_space(two_point: TwoPointMatrix, tol: float = 1e-10,
                       label: str = "") -> tuple[OneParticleSpace, QuotientMap]:
    """Divide out the Gram null space, keeping eigenvalues above ``tol * lambda_max``."""
    if tol <= 0:
        raise ConfigurationError("null-space tolerance must be positive")
    two_point.check_positive_type()
    G = two_point.gram
    evals, V = np.linalg.eigh(0.5 * (G + G.conj().T))
    lam_max = evals[-1]
    if lam_max <= 0:
        raise DegenerateStateError("two-point matrix has an empty one-particle space")
    keep = evals > tol * lam_max
    # largest eigenvalues first
    order = np.flatnonzero(keep)[::-1]
    lam = evals[order]
    Q = np.sqrt(lam)[:, None] * V[:, order].conj().T
    qm = QuotientMap(int(lam.size), Q, lam, tol, two_point)
    return OneParticleSpace(qm.rank, label or two_point.provenance), qm


def embed(f, qm: QuotientMap) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (qm.d_test,):
        raise ConfigurationError(f"test vector of length {f.shape} for a {qm.d_test}-point test space")
    return qm.matrix @ f


@dataclass(frozen=True, eq=False)
class FieldOperator:
    """Phi'(f) = (a([conj f]) + a*([f])) / sqrt(2)."""

    op: object
    test_vector: np.ndarray

    def __matmul__(self, other):
        return self.op @ (other.op if isinstance(other, FieldOperator) else other)

    def parts(self):
        return self.op.parts()


def field_op(f, qm: QuotientMap, trunc: FockTruncation) -> FieldOperator:
    if trunc.d != qm.rank:
        raise ConfigurationError(
            f"truncation over dimension {trunc.d} does not match quotient rank {qm.rank}")
    f = np.asarray(f, dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    op = s * annihilation_op(embed(f.conj(), qm), trunc) + s * creation_op(embed(f, qm), trunc)
    return FieldOperator(op, f)


def state_two_point(psi, qm: QuotientMap, trunc: FockTruncation) -> np.ndarray:
    """Matrix of w2'(f, g) = <psi, Phi'(f) Phi'(g) psi> on test-space unit vectors.

    ``psi`` must live on sectors ``<= n_max - 2`` so both field applications
    are exact.
    """
    cols = []
    for y in range(qm.d_test):
        e = np.zeros(qm.d_test)
        e[y] = 1.0
        cols.append((field_op(e, qm, trunc).op @ psi).data)
    X = np.stack(cols, axis=1)
    # Phi'(e_y) is self-adjoint for real e_y
    return X.conj().T @ X
