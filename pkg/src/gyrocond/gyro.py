"""Two-mode behavioral model of a vibrating-ring rate sensor.

The ring is reduced to its two modal coordinates: the driven primary
resonator and the secondary resonator excited by Coriolis coupling of
the yaw rate into the primary velocity. Each mode is a second-order
system x'' + (w/Q) x' + w^2 x = F/m, discretized exactly (zero-order
hold) for a fixed step, with the cubic stiffness term of the secondary
applied as an explicit per-step force.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import resonator_step

TEMP_REF_C = 25.0
TEMP_GUARD_MIN_C = -55.0
TEMP_GUARD_MAX_C = 150.0
STEPPER_REFRESH_DEG_C = 0.01


class SimulationFault(RuntimeError):
    """Raised when the model state or an input stops being finite."""


@dataclass(frozen=True)
class GyroParams:
    """Physical parameters of the two-mode model.

    None of these are register-backed; they describe the sensing element
    itself. Defaults are the tuned values recorded in
    docs/parameter_ledger.md.
    """

    f1: float = 15000.0        # primary resonance, Hz
    f2: float = 15000.0        # secondary resonance, Hz
    q1: float = 5000.0
    q2: float = 5000.0
    kappa: float = 0.1         # Coriolis coupling, dimensionless
    mass: float = 1e-7         # modal mass, kg
    g_drive: float = 1e-6      # drive transduction, N/V
    g_pickoff: float = 1e6     # pickoff transduction, V/m
    tc_f: float = -25e-6       # fractional resonance drift, 1/degC
    tc_g: float = -100e-6      # fractional pickoff-gain drift, 1/degC
    k3: float = 1e-4           # cubic stiffness fraction at k3_ref
    k3_ref: float = 1e-7       # amplitude where the cubic force fraction
                               # equals k3, m
    pickoff_noise: float = 1.25e-5  # V/sqrt(Hz), calibrated default

    def __post_init__(self):
        if not (self.f1 > 0 and self.f2 > 0):
            raise ValueError("resonance frequencies must be positive")
        if not (self.q1 > 0 and self.q2 > 0):
            raise ValueError("quality factors must be positive")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        for name in ("f1", "f2", "kappa", "mass", "g_drive", "g_pickoff",
                     "tc_f", "tc_g", "k3", "k3_ref", "pickoff_noise"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")

    def f1_at(self, temp_c: float) -> float:
        return self.f1 * (1.0 + self.tc_f * (temp_c - TEMP_REF_C))

    def f2_at(self, temp_c: float) -> float:
        return self.f2 * (1.0 + self.tc_f * (temp_c - TEMP_REF_C))

    def g_pickoff_at(self, temp_c: float) -> float:
        return self.g_pickoff * (1.0 + self.tc_g * (temp_c - TEMP_REF_C))


@dataclass
class GyroState:
    x1: float = 0.0
    v1: float = 0.0
    x2: float = 0.0
    v2: float = 0.0
    temp: float = TEMP_REF_C   # degC
    omega_z: float = 0.0       # rad/s


@dataclass(frozen=True)
class ModeCoeffs:
    """ZOH transition (m11..m22) and input (b1, b2) coefficients for one
    mode; b maps a held force-per-mass to the end-of-step state."""

    m11: float
    m12: float
    m21: float
    m22: float
    b1: float
    b2: float


@dataclass(frozen=True)
class ResonatorStepper:
    primary: ModeCoeffs
    secondary: ModeCoeffs
    dt: float
    temp: float


def _mode_coeffs(f_hz: float, q: float, dt: float) -> ModeCoeffs:
    """Exact discretization of x'' + (w/Q)x' + w^2 x = u for a constant u
    over one step.

    For finite Q the mode is underdamped in any sane configuration
    (Q > 0.5); Q = inf degenerates to the lossless rotation, which
    preserves the modal energy exactly.
    """
    w = 2.0 * math.pi * f_hz
    if math.isinf(q):
        c = math.cos(w * dt)
        s = math.sin(w * dt)
        m11, m12 = c, s / w
        m21, m22 = -w * s, c
    else:
        zeta = 1.0 / (2.0 * q)
        if zeta >= 1.0:
            raise ValueError("overdamped modes are not supported (Q <= 0.5)")
        wd = w * math.sqrt(1.0 - zeta * zeta)
        e = math.exp(-zeta * w * dt)
        cwd = math.cos(wd * dt)
        swd = math.sin(wd * dt)
        k = zeta / math.sqrt(1.0 - zeta * zeta)
        m11 = e * (cwd + k * swd)
        m12 = e * swd / wd
        m21 = -(w * w) * m12
        m22 = e * (cwd - k * swd)
    # b = A^-1 (M - I) B for A = [[0, 1], [-w^2, -w/Q]], B = [0, 1]^T
    inv_w2 = 1.0 / (w * w)
    if math.isinf(q):
        b1 = -(m22 - 1.0) * inv_w2
    else:
        b1 = -m12 / (q * w) - (m22 - 1.0) * inv_w2
    b2 = m12
    return ModeCoeffs(m11, m12, m21, m22, b1, b2)


def derive_stepper(params: GyroParams, temp: float, dt: float) -> ResonatorStepper:
    """Build the fixed-step ZOH stepper for the given temperature.

    Rejects steps that undersample the resonance (dt * 2*pi*f1 must stay
    below 0.5).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    f1 = params.f1_at(temp)
    f2 = params.f2_at(temp)
    if dt * 2.0 * math.pi * f1 >= 0.5:
        raise ValueError(
            f"dt={dt:g} s undersamples the {f1:g} Hz resonance "
            "(need dt*2*pi*f1 < 0.5)")
    return ResonatorStepper(
        primary=_mode_coeffs(f1, params.q1, dt),
        secondary=_mode_coeffs(f2, params.q2, dt),
        dt=dt,
        temp=temp,
    )


def step(state: GyroState, drive_v: float, control_v: float,
         stepper: ResonatorStepper, params: GyroParams,
         rng: np.ndarray | None = None):
    """Advance one physics tick.

    Forces are held constant over the step: the primary sees the drive
    voltage, the secondary sees Coriolis coupling, the rebalance control
    voltage, and the cubic stiffness reaction. Returns the new state and
    the two pickoff voltages. A seeded kernel RNG array may be supplied
    to add pickoff noise at the equivalent white density.
    """
    if not (math.isfinite(drive_v) and math.isfinite(control_v)):
        raise SimulationFault("non-finite drive/control input")
    if not all(math.isfinite(v) for v in
               (state.x1, state.v1, state.x2, state.v2)):
        raise SimulationFault("non-finite mechanical state")

    p = stepper.primary
    s = stepper.secondary
    f2_eff = 2.0 * math.pi * params.f2_at(stepper.temp)
    k3_force = params.k3 * params.mass * f2_eff * f2_eff / (
        params.k3_ref * params.k3_ref)

    u1 = params.g_drive * drive_v / params.mass
    force2 = (2.0 * params.kappa * params.mass * state.omega_z * state.v1
              + params.g_drive * control_v
              - k3_force * state.x2 ** 3)
    u2 = force2 / params.mass

    x1, v1 = resonator_step(state.x1, state.v1, u1,
                            p.m11, p.m12, p.m21, p.m22, p.b1, p.b2)
    x2, v2 = resonator_step(state.x2, state.v2, u2,
                            s.m11, s.m12, s.m21, s.m22, s.b1, s.b2)
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise SimulationFault("mechanical state diverged")

    new = replace_state(state, x1=x1, v1=v1, x2=x2, v2=v2)
    gp = params.g_pickoff_at(stepper.temp)
    p1 = gp * x1
    p2 = gp * x2
    if rng is not None and params.pickoff_noise > 0.0:
        sigma = params.pickoff_noise * math.sqrt(0.5 / stepper.dt)
        p1 += sigma * kernels.rng_normal(rng)
        p2 += sigma * kernels.rng_normal(rng)
    return new, p1, p2


def replace_state(state: GyroState, **kw) -> GyroState:
    d = dict(x1=state.x1, v1=state.v1, x2=state.x2, v2=state.v2,
             temp=state.temp, omega_z=state.omega_z)
    d.update(kw)
    return GyroState(**d)


def set_environment(state: GyroState, omega=None, unit: str = "rad/s",
                    temp: float | None = None) -> GyroState:
    """Set the applied yaw rate (with an explicit unit) and/or ambient
    temperature. Temperature outside the guard band is rejected."""
    new = replace_state(state)
    if omega is not None:
        if unit in ("rad/s", "rad"):
            new.omega_z = float(omega)
        elif unit in ("dps", "deg/s"):
            new.omega_z = math.radians(float(omega))
        else:
            raise ValueError(f"unknown rate unit {unit!r}")
        if not math.isfinite(new.omega_z):
            raise ValueError("rate must be finite")
    if temp is not None:
        if not (TEMP_GUARD_MIN_C <= temp <= TEMP_GUARD_MAX_C):
            raise ValueError(
                f"temperature {temp:g} degC outside guard band "
                f"[{TEMP_GUARD_MIN_C:g}, {TEMP_GUARD_MAX_C:g}]")
        new.temp = float(temp)
    return new


def needs_refresh(stepper: ResonatorStepper, temp: float) -> bool:
    """Steppers are refreshed once the temperature has moved more than
    the refresh threshold since derivation."""
    return abs(temp - stepper.temp) > STEPPER_REFRESH_DEG_C
