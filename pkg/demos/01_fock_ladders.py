"""Ladder operators on a truncated symmetric Fock space.

Walks through the occupation basis, the norm of a creation operator on each
particle-number sector, the canonical commutation relations on the sectors
that the truncation leaves intact, and the norm bound for normal-ordered
monomials.
"""
import math

import numpy as np

from wickfock import FockTruncation, annihilation_op, compress, creation_op, nest_bound, normal_monomial, sym_basis

rng = np.random.default_rng(0)

# %% occupation basis
print("two modes, two particles:", sym_basis(2, 2).states)
t = FockTruncation.of(3, 5)
print("sector dimensions for d=3, n_max=5:", t.dims, "total", t.total_dim)

# %% creation norms grow like sqrt(n+1)
f = rng.normal(size=3) + 1j * rng.normal(size=3)
op = creation_op(f, t)
for n in range(t.n_max):
    print(f"n={n}: ||a*(f) on sector n|| = {np.linalg.norm(op.block(n), 2):.6f}"
          f"   sqrt(n+1)||f|| = {math.sqrt(n + 1) * np.linalg.norm(f):.6f}")

# %% commutation relations, checked below the cutoff only
g = rng.normal(size=3) + 1j * rng.normal(size=3)
af, cg = annihilation_op(f, t), creation_op(g, t)
top = t.n_max - 2
resid = compress(af @ cg - cg @ af, top) - np.vdot(f, g) * np.eye(t.span_dim(top))
print("\n[a(f), a*(g)] - <f,g> on sectors <= 3:", np.abs(resid).max())

# %% normal-ordered monomials
print("\nmonomial norms against sqrt(n!(n-m+l)!)/(n-m)! ||F||")
for l, m in [(2, 0), (1, 1), (0, 2), (2, 2)]:
    F = rng.normal(size=(3,) * (l + m))
    blk = normal_monomial(F, l, m, t).block(2)
    print(f"  l={l} m={m}: {np.linalg.norm(blk, 2):8.4f} <= {nest_bound(l, m, 2) * np.linalg.norm(F):8.4f}")
