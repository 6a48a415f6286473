"""The smeared Wick square for a harmonic oscillator.

A time grid carries the oscillator ground-state two-point matrix. Its Gram
form has rank one, so the one-particle space is one-dimensional and the
Fock space is the usual single-mode ladder. The Wick square smeared with
f = 1 splits into a number-like part A and pair creation/annihilation B.
"""
import numpy as np

from wickfock import (FockTruncation, FockVector, OscillatorModel, SmearingSpec, SmearingTerm, TimeGrid,
                      compression_T1, kernel_from_smearing, one_particle_space, oscillator_two_point,
                      squares_partition, wick_square_operator)
from wickfock.models import triangle_bump
from wickfock.quasifree import state_two_point

grid = TimeGrid(8, 0.4)
tp = oscillator_two_point(OscillatorModel(1.0, grid))
space, qm = one_particle_space(tp)
print(tp.provenance)
print("Gram eigenvalues:", np.round(np.linalg.eigvalsh(tp.gram), 12))
print("one-particle rank:", qm.rank)

# f = 1 written as a sum of squares via a partition of unity by squares
part = squares_partition([triangle_bump(grid, c, 0.8) for c in (0.0, 0.8, 1.6, 2.4)])
print("sum chi^2 - 1:", part.residual())
spec = SmearingSpec((SmearingTerm.from_squares(np.eye(8), part.chi),))
ker = kernel_from_smearing(spec, qm)
print("\npushed-forward kernels: mixed", ker.F_mix.ravel(), " pair", np.round(ker.F_K.ravel(), 5))

trunc = FockTruncation.of(qm.rank, 6)
T = wick_square_operator(ker, trunc)
M = T.compressed()
print("\nT on sectors 0..4:")
print(np.round(M.real, 4))
print("vacuum expectation:", M[0, 0])
print("one-particle compression:", compression_T1(T))

# expectation values reproduce the difference of two-point functions
rng = np.random.default_rng(1)
psi = FockVector.random(trunc, rng, 4)
lhs = np.vdot(psi.data[:len(M)], M @ psi.data[:len(M)])
rhs = np.sum(ker.F_test * (state_two_point(psi, qm, trunc) - tp.W))
print(f"\n<psi,T psi> = {lhs.real:.12f},  (w2' - w2)(F) = {rhs.real:.12f}")
