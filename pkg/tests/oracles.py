"""Independent reference constructions used by the tests.

Nothing here imports the package's ladder machinery. Symmetric sectors are
realized inside the full tensor power (C^d)^{(x)n} through an explicit
isometry, and operators are built there by plain tensor contraction.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np
import scipy.linalg


def occupations(d: int, n: int) -> list[tuple[int, ...]]:
    """All occupation tuples of ``n`` particles in ``d`` modes, lexicographic, by brute force."""
    seen = set()
    for word in itertools.product(range(d), repeat=n):
        c = Counter(word)
        seen.add(tuple(c.get(i, 0) for i in range(d)))
    return sorted(seen)


def isometry(d: int, n: int) -> np.ndarray:
    """``d**n x dim`` matrix whose columns are the normalized symmetric product states."""
    occ = occupations(d, n)
    col = {s: j for j, s in enumerate(occ)}
    V = np.zeros((d ** n, len(occ)))
    for pos, word in enumerate(itertools.product(range(d), repeat=n)):
        c = Counter(word)
        s = tuple(c.get(i, 0) for i in range(d))
        multinom = math.factorial(n) // math.prod(math.factorial(k) for k in s)
        V[pos, col[s]] = 1 / math.sqrt(multinom)
    return V


def symmetrizer(d: int, n: int) -> np.ndarray:
    """Average over all slot permutations, as a ``d**n`` square matrix."""
    dim = d ** n
    P = np.zeros((dim, dim))
    for perm in itertools.permutations(range(n)):
        for pos, word in enumerate(itertools.product(range(d), repeat=n)):
            w2 = tuple(word[p] for p in perm)
            P[np.ravel_multi_index(w2, (d,) * n) if n else 0, pos] += 1
    return P / math.factorial(n)


def full_creation(f, n: int) -> np.ndarray:
    """``sqrt(n+1) P_+ (f (x) psi)`` on the full ``n``-fold tensor power."""
    f = np.asarray(f, dtype=complex)
    d = f.size
    M = np.kron(f[:, None], np.eye(d ** n))
    return math.sqrt(n + 1) * symmetrizer(d, n + 1) @ M


def creation_block(f, n: int) -> np.ndarray:
    d = np.asarray(f).size
    return isometry(d, n + 1).T @ full_creation(f, n) @ isometry(d, n)


def monomial_block(F, l: int, m: int, n: int, d: int) -> np.ndarray:
    """Normal-ordered monomial on sector ``n`` via contraction on full tensors.

    Contract the ``m`` conjugate slots of ``F`` with the first ``m`` slots of the
    input, emit ``l`` new slots, symmetrize, and scale by
    ``sqrt(n! (n-m+l)!) / (n-m)!`` (the product of the ladder square roots).
    """
    F = np.asarray(F, dtype=complex).reshape(d ** l, d ** m)
    rest = d ** (n - m)
    G = np.kron(F, np.eye(rest))
    c = math.sqrt(math.factorial(n) * math.factorial(n - m + l)) / math.factorial(n - m)
    return c * isometry(d, n - m + l).T @ symmetrizer(d, n - m + l) @ G @ isometry(d, n)


def second_quantized_block(T1, n: int) -> np.ndarray:
    """``sum_slots I (x) ... T1 ... (x) I`` restricted to the symmetric sector."""
    T1 = np.asarray(T1, dtype=complex)
    d = T1.shape[0]
    total = np.zeros((d ** n, d ** n), dtype=complex)
    for slot in range(n):
        mats = [np.eye(d)] * n
        mats[slot] = T1
        out = np.eye(1)
        for m in mats:
            out = np.kron(out, m)
        total += out
    V = isometry(d, n)
    return V.T @ total @ V


def chain_covariance(mass: float, sites: int, spacing: float, times) -> np.ndarray:
    """Ground-state ``<phi_x(t) phi_y(s)>`` via matrix functions of the stiffness.

    Uses ``scipy.linalg.sqrtm`` and ``expm`` instead of an eigendecomposition:
    ``C(t - s) = 1/2 K^{-1/2} exp(-i K^{1/2} (t - s))``.
    """
    L = sites
    K = mass ** 2 * np.eye(L)
    for x in range(L):
        K[x, x] += 2 / spacing ** 2
        K[x, (x + 1) % L] -= 1 / spacing ** 2
        K[x, (x - 1) % L] -= 1 / spacing ** 2
    root = np.real(scipy.linalg.sqrtm(K))
    inv_root = np.linalg.inv(root)
    times = np.asarray(times, dtype=float)
    n = times.size
    out = np.empty((n, L, n, L), dtype=complex)
    for a in range(n):
        for b in range(n):
            out[a, :, b, :] = 0.5 * inv_root @ scipy.linalg.expm(-1j * root * (times[a] - times[b]))
    return out.reshape(n * L, n * L)


def dft_completeness(size: int) -> np.ndarray:
    """``sum_p exp(i p (x - y))`` over the DFT momenta; should be ``size * I``."""
    p = 2 * np.pi * np.arange(size) / size
    x = np.arange(size)
    return np.exp(1j * np.subtract.outer(x, x)[..., None] * p).sum(axis=-1)
