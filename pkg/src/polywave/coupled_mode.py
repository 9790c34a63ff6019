"""Two-mode coupling: ODE integration, closed-form power exchange, and
transfer-matrix cascades of directional couplers with delay sections.

The propagation equations are

    da/dz = -i (beta1 + kappa11) a - i kappa12 b
    db/dz = -i (beta2 + kappa22) b - i kappa21 a

Power |a|^2 + |b|^2 is conserved when kappa21 = conj(kappa12) and the
self-coupling terms are real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonPositiveStep(ValueError):
    pass


class BothZero(ValueError):
    pass


class NegativeLength(ValueError):
    pass


class MalformedSpec(ValueError):
    pass


@dataclass(frozen=True)
class CoupledModeParams:
    beta1: float
    beta2: float
    kappa11: complex = 0j
    kappa22: complex = 0j
    kappa12: complex = 0j
    kappa21: complex = 0j


@dataclass(frozen=True)
class ModeTrajectory:
    z_grid: np.ndarray
    a: np.ndarray
    b: np.ndarray


def default_step(p: CoupledModeParams, z_max: float) -> float:
    """1e-3 of the shortest beat period, with fallbacks for slow systems."""
    scale = max(abs(p.beta1), abs(p.beta2), abs(p.kappa11), abs(p.kappa22),
                abs(p.kappa12), abs(p.kappa21))
    if scale == 0.0:
        return z_max / 1000.0
    return 1e-3 * 2.0 * np.pi / scale


def integrate_coupled_modes(
    p: CoupledModeParams,
    z_max: float,
    step: float | None = None,
    a0: complex = 1.0 + 0j,
    b0: complex = 0j,
) -> ModeTrajectory:
    """Fixed-step 4th-order Runge-Kutta trajectory from z=0 to z=z_max.

    The grid starts at 0 and advances by `step`; a short final step lands
    exactly on z_max when it is not a multiple of `step`.
    """
    if step is None:
        step = default_step(p, z_max)
    if step <= 0.0:
        raise NonPositiveStep(f"step must be > 0, got {step}")
    if z_max < step:
        raise ValueError(f"z_max ({z_max}) must be >= step ({step})")

    ca = -1j * (p.beta1 + p.kappa11)
    cb = -1j * (p.beta2 + p.kappa22)
    cab = -1j * p.kappa12
    cba = -1j * p.kappa21

    n_full = int(np.floor(z_max / step + 1e-12))
    remainder = z_max - n_full * step
    steps = [step] * n_full
    if remainder > 1e-12 * z_max:
        steps.append(remainder)

    z_list = [0.0]
    a_list = [complex(a0)]
    b_list = [complex(b0)]
    a, b, z = complex(a0), complex(b0), 0.0
    for h in steps:
        k1a = ca * a + cab * b
        k1b = cb * b + cba * a
        a2 = a + 0.5 * h * k1a
        b2 = b + 0.5 * h * k1b
        k2a = ca * a2 + cab * b2
        k2b = cb * b2 + cba * a2
        a3 = a + 0.5 * h * k2a
        b3 = b + 0.5 * h * k2b
        k3a = ca * a3 + cab * b3
        k3b = cb * b3 + cba * a3
        a4 = a + h * k3a
        b4 = b + h * k3b
        k4a = ca * a4 + cab * b4
        k4b = cb * b4 + cba * a4
        a = a + (h / 6.0) * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + (h / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
        z = z + h
        z_list.append(z)
        a_list.append(a)
        b_list.append(b)
    return ModeTrajectory(
        z_grid=np.asarray(z_list), a=np.asarray(a_list), b=np.asarray(b_list)
    )


def closed_form_power(delta_beta: float, kappa: float, z) -> tuple:
    """(Pa, Pb) for symmetric coupling kappa12 = kappa21 = kappa, zero
    self-coupling, unit input in mode a.

    Pb = kappa^2/(delta_beta^2/4 + kappa^2) * sin^2(sqrt(...)*z), Pa = 1 - Pb.
    Accepts scalar or array z.
    """
    if delta_beta == 0.0 and kappa == 0.0:
        raise BothZero("delta_beta and kappa cannot both be zero")
    s = np.sqrt(delta_beta**2 / 4.0 + kappa**2)
    pb = (kappa**2 / s**2) * np.sin(s * np.asarray(z, dtype=float)) ** 2
    pa = 1.0 - pb
    if np.isscalar(z) or np.ndim(z) == 0:
        return float(pa), float(pb)
    return pa, pb


def coupler_matrix(kappa: float, length: float) -> np.ndarray:
    """2x2 transfer of one directional coupler with coupling angle kappa*L."""
    if length < 0:
        raise NegativeLength(f"coupler length must be >= 0, got {length}")
    th = kappa * length
    c, s = np.cos(th), np.sin(th)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def delay_matrix(beta: float, length1: float, length2: float) -> np.ndarray:
    """Diagonal phase section diag(e^{-i beta L1}, e^{-i beta L2})."""
    if length1 < 0 or length2 < 0:
        raise NegativeLength(
            f"delay lengths must be >= 0, got {length1}, {length2}"
        )
    return np.array(
        [[np.exp(-1j * beta * length1), 0.0], [0.0, np.exp(-1j * beta * length2)]],
        dtype=complex,
    )


@dataclass(frozen=True)
class CouplerStage:
    kappa: float
    length: float


@dataclass(frozen=True)
class DelayStage:
    beta: float
    length1: float
    length2: float


@dataclass(frozen=True)
class CascadeSpec:
    stages: tuple


def cascade_transfer(spec: CascadeSpec) -> np.ndarray:
    """Total 2x2 transfer of an alternating coupler/delay cascade.

    Stages are listed in propagation order; the first stage acts first, so
    the total is T = T_last @ ... @ T_first.  The cascade must begin and
    end with a CouplerStage and alternate stage kinds.
    """
    stages = tuple(spec.stages)
    if not stages:
        raise MalformedSpec("cascade has no stages")
    if not isinstance(stages[0], CouplerStage) or not isinstance(stages[-1], CouplerStage):
        raise MalformedSpec("cascade must begin and end with a coupler stage")
    total = np.eye(2, dtype=complex)
    expect_coupler = True
    for st in stages:
        if expect_coupler:
            if not isinstance(st, CouplerStage):
                raise MalformedSpec(f"expected a coupler stage, got {st!r}")
            m = coupler_matrix(st.kappa, st.length)
        else:
            if not isinstance(st, DelayStage):
                raise MalformedSpec(f"expected a delay stage, got {st!r}")
            m = delay_matrix(st.beta, st.length1, st.length2)
        total = m @ total
        expect_coupler = not expect_coupler
    return total
