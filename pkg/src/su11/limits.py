"""Internal mean photon number and the SQL / HL benchmarks built on it.

The standard quantum limit and Heisenberg limit are referenced to the mean
photon number of the state inside the interferometer, counted just before
the second amplifier with the subtraction folded in as a non-local
operation.  Internal loss enters through the single transmittance T = T1;
the mode-a and mode-b number insertions are separate extractions over a
shared normalizer.
"""

from __future__ import annotations

from dataclasses import dataclass

from su11.errors import DarkFringeError
from su11.model import Params, kernels
from su11.series import order_pair, order_single_insertion

DARK_FRINGE_FLOOR = 1e-300
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class LimitsReport:
    n_t: float
    sql: float
    hl: float


def internal_photon_number(p: Params) -> float:
    """<n_a + n_b> of the internal state, with m-photon subtraction folded in."""
    ks = kernels(p)
    m = p.m
    norm = ks.exponent_n1().exp().extract(order_pair(m)).val
    if abs(norm) < DARK_FRINGE_FLOOR:
        raise DarkFringeError(f"internal-state normalizer vanished at m={m}")
    exps = ks.exponents_nt()
    num = sum(s.exp().extract(order_single_insertion(m)).val for s in exps.values())
    n_t = num / norm
    if abs(n_t.imag) > IMAG_TOL * max(1.0, abs(n_t.real)):
        raise ArithmeticError(f"internal photon number should be real, got {n_t!r}")
    return n_t.real


def limits(p: Params) -> LimitsReport:
    """SQL = N_T^(-1/2) and HL = N_T^(-1)."""
    n_t = internal_photon_number(p)
    if n_t <= 0.0:
        raise ArithmeticError(f"internal photon number must be positive, got {n_t}")
    return LimitsReport(n_t=n_t, sql=n_t**-0.5, hl=1.0 / n_t)
