"""Sufficient conditions for essential self-adjointness, at finite truncation.

Each certificate checks a finite statement exactly on the sectors the cutoff
leaves intact: analytic growth of iterates, the relative bound of the pair
part, the number-operator lower bound, commutator identities. None of them
claims self-adjointness of the infinite-dimensional operator by itself.
"""
import math

import numpy as np

from wickfock import (FockTruncation, FockVector, OscillatorModel, SmearingSpec, SmearingTerm, TimeGrid,
                      TwoPointMatrix, commutator_identities, compression_T1, kernel_from_matrix,
                      kernel_from_smearing, konrady_certificate, konrady_constant, nelson_certificate,
                      one_particle_space, oscillator_two_point, squares_partition, t1_scan,
                      wick_square_operator, wuest_certificate)
from wickfock.models import triangle_bump

rng = np.random.default_rng(2)
grid = TimeGrid(8, 0.4)
_, qm = one_particle_space(oscillator_two_point(OscillatorModel(1.0, grid)))
part = squares_partition([triangle_bump(grid, c, 0.8) for c in (0.0, 0.8, 1.6, 2.4)])
spec = SmearingSpec((SmearingTerm.from_squares(np.eye(8), part.chi),))
trunc = FockTruncation.of(1, 6)
T = wick_square_operator(kernel_from_smearing(spec, qm), trunc)


def show(rep):
    print(rep)
    for p in rep.parts:
        print("   ", p)


show(nelson_certificate(T, trunc, rng))
kc = konrady_constant(spec, qm, grid)
print(f"\nconstants: d={kc.d:.5f} c={kc.c:.5f} c'={kc.c_prime:.5f}")
show(wuest_certificate(T.A, T.B, kc.d, trunc, rng))
show(konrady_certificate(T.A, T.B, kc, trunc, rng))
show(commutator_identities(rng.normal(size=8) + 1j * rng.normal(size=8), qm, trunc))
show(t1_scan(compression_T1(T), spec.class_S, identity_Q=True))

# designed failures
print("\nforcing d = 0:")
show(wuest_certificate(T.A, T.B, 0.0, trunc, rng))

# a tempting but false bound: ||B psi|| <= (d/2)||(N+2) psi||
_, qm1 = one_particle_space(TwoPointMatrix(np.array([[0.5]])))
T1 = wick_square_operator(kernel_from_matrix(np.array([[1.0]]), qm1), trunc)
psi = FockVector.from_sectors(trunc, {3: np.array([1.0])})
print(f"\nsingle mode, |3>: ||B psi|| = {(T1.B @ psi).norm():.4f}"
      f"  (d/2)||(N+2)psi|| = {2.5:.4f}  d||(N+1)psi|| = {4.0:.4f}  (sqrt(26)/2 = {math.sqrt(26) / 2:.4f})")
