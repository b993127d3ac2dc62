"""Behavioral analog front end: PGAs, SAR-style ADCs, DACs and seeded
noise sources.

Conversions are ideal (no INL/DNL, no aperture effects); out-of-range
inputs clip and latch a sticky flag rather than raising. All front-end
parameters are register-backed in the full simulation.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

PHYSICS_RATE_HZ = 1_000_000


@dataclass(frozen=True)
class AdcConfig:
    bits: int = 12
    vref: float = 5.0
    fs: float = 250_000.0

    def __post_init__(self):
        if not 8 <= self.bits <= 16:
            raise ValueError("ADC resolution must be 8..16 bits")
        if self.vref <= 0:
            raise ValueError("vref must be positive")
        if self.fs <= 0 or PHYSICS_RATE_HZ % int(self.fs) != 0:
            raise ValueError("fs must divide the 1 MHz physics rate")

    @property
    def levels(self) -> int:
        return 1 << self.bits

    @property
    def lsb(self) -> float:
        return self.vref / self.levels


@dataclass(frozen=True)
class DacConfig:
    bits: int = 12
    vref: float = 5.0

    def __post_init__(self):
        if not 8 <= self.bits <= 16:
            raise ValueError("DAC resolution must be 8..16 bits")
        if self.vref <= 0:
            raise ValueError("vref must be positive")

    @property
    def levels(self) -> int:
        return 1 << self.bits


PGA_GAINS = (1, 2, 4, 8, 16, 32, 64, 128)


@dataclass(frozen=True)
class PgaConfig:
    gain_code: int = 0

    def __post_init__(self):
        if not 0 <= self.gain_code <= 7:
            raise ValueError("gain code must be 0..7")

    @property
    def gain(self) -> int:
        return 1 << self.gain_code


@dataclass
class StickyFlags:
    """Per-instance clip/saturation flags; sticky until reset."""
    clip: bool = False

    def reset(self):
        self.clip = False


def adc_convert(v: float, cfg: AdcConfig, flags: StickyFlags | None = None) -> int:
    """Quantize a voltage to an unsigned code; clipping is in-contract
    and latches the sticky flag."""
    code, clipped = kernels.adc_quantize(float(v), cfg.vref, cfg.levels - 1)
    if clipped and flags is not None:
        flags.clip = True
    return int(code)


def dac_convert(code: int, cfg: DacConfig) -> float:
    if not 0 <= code < cfg.levels:
        raise ValueError(f"code {code} out of range for {cfg.bits}-bit DAC")
    return cfg.vref * code / cfg.levels


def pga_apply(v: float, cfg: PgaConfig, vref: float = 5.0,
              flags: StickyFlags | None = None) -> float:
    """Exact power-of-two gain, saturating at +/-vref."""
    out = v * cfg.gain
    if out > vref:
        out = vref
        if flags is not None:
            flags.clip = True
    elif out < -vref:
        out = -vref
        if flags is not None:
            flags.clip = True
    return out


def noise_sample(density: float, fs: float, rng: np.ndarray) -> float:
    """One Gaussian sample of a white noise source with the given
    density (V/sqrt(Hz)) observed at sample rate fs."""
    if density == 0.0:
        return 0.0
    sigma = density * math.sqrt(fs / 2.0)
    return sigma * kernels.rng_normal(rng)


def make_rng(seed: int) -> np.ndarray:
    """Seeded generator state for the noise sources."""
    return kernels.rng_seed(seed)
