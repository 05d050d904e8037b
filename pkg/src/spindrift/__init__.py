"""Relativistic spinning-electron mass centers and anomalous velocity.

Three layers:

* `algebra`  -- the Dirac matrix representation and momentum-dependent
  operator kernels (Hamiltonian, little-group generators, Foldy-Wouthuysen
  rotation, Pryce mass-center kernels).
* `packets`  -- sharp positive-energy Gaussian wave packets and the
  expectation-value relations linking spin, little-group and mass-center
  operators.
* `dynamics` -- classical Lorentz + spin-precession integration, spin
  boosts, position shift, Thomas precession, and the anomalous velocity of
  the mass center in its equivalent analytic forms.

The `spindrift` command line front end runs simulations, verification
suites and convergence studies from plain-text scenario configs.
"""

from .algebra import (
    PryceKind,
    dirac_matrices,
    energy,
    free_hamiltonian,
    fw_transform,
    little_group_generators,
    o_operator,
    pryce_factors,
    pryce_kernel,
)
from .packets import (
    MomentumWavePacket,
    expectation,
    expectation_position,
    make_gaussian_packet,
    verify_fg_relations,
    verify_main_result,
)

__version__ = "0.1.0"
