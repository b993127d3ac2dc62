"""Hot simulation kernels.

Everything in this module is written in a numba-compatible subset of
Python/numpy and compiled with ``@njit`` unless the fallback backend is
selected (see ``_accel``). State lives in flat arrays indexed by the
constants below, register-file style, so one kernel signature covers
every configuration.

Rates: the mechanical model advances at the physics tick (1 MHz by
default); the conditioning chain runs every ``ICFG_DSP_DIV`` ticks
(250 kHz); the rate output is produced at 1 kHz by the decimation
cascade (boxcar, two FIR decimators, final channel FIR).
"""

import numpy as np

from ._accel import njit

# ---------------------------------------------------------------------------
# float state indices
SF_X1 = 0          # primary displacement, m
SF_V1 = 1          # primary velocity, m/s
SF_X2 = 2          # secondary displacement, m
SF_V2 = 3          # secondary velocity, m/s
SF_AA1 = 4         # anti-alias filter state, primary pickoff, V
SF_AA2 = 5         # anti-alias filter state, secondary pickoff, V
SF_C1 = 6          # centered primary ADC sample, V
SF_C2 = 7          # centered secondary ADC sample, V
SF_SIN = 8         # NCO sine output
SF_COS = 9         # NCO cosine output
SF_PD_LPF = 10     # filtered phase-detector product, V
SF_PD_NORM = 11    # normalized phase error, rad-equivalent
SF_PLL_INT = 12    # PLL integrator, frequency-word units
SF_AGC_LPF = 13    # amplitude estimate at ADC, V
SF_AGC_INT = 14    # AGC integrator, V
SF_DRIVE_AMP = 15  # quantized drive amplitude, V
SF_DRIVE_V = 16    # held drive DAC output (bipolar), V
SF_CTRL_V = 17     # held control DAC output (bipolar), V
SF_I_LPF = 18      # filtered in-phase demod, V
SF_Q_LPF = 19      # filtered quadrature demod, V
SF_I_INT = 20      # rebalance I-loop integrator, V
SF_Q_INT = 21      # rebalance Q-loop integrator, V
SF_I_CMD = 22      # rebalance I command, V
SF_Q_CMD = 23      # rebalance Q command, V
SF_BOX_ACC = 24    # boxcar accumulator
SF_RATE_RAW = 25   # rate-channel sample entering decimation
SF_RATE_1K = 26    # decimated, filtered rate channel (raw units)
SF_RATE_COMP = 27  # compensated rate, deg/s
SF_OUT_V = 28      # formatted output voltage, V
SF_SRC_PHASE = 29  # synthetic-source phase, rad
SF_STIM_PHASE = 30 # rate-stimulus phase, rad
NF_STATE = 31

# int state indices
S_TICK = 0         # physics ticks since reset
S_DSP_CNT = 1      # physics ticks since last DSP tick
S_PHASE = 2        # NCO phase accumulator (32-bit word)
S_FW = 3           # NCO frequency word
S_LOCKED = 4
S_LOCK_CNT = 5
S_SETTLED = 6
S_SETTLE_CNT = 7
S_NULLED = 8
S_NULL_CNT = 9
S_CLIP1 = 10       # sticky clip, primary channel
S_CLIP2 = 11       # sticky clip, secondary channel
S_CLIP_OUT = 12    # sticky clamp, formatted output
S_F2_CNT = 13      # decimator stage-2 phase
S_F3_CNT = 14      # decimator stage-3 phase
S_BOX_CNT = 15
S_FIR2_POS = 16
S_FIR3_POS = 17
S_FIRCH_POS = 18
S_SAFE = 19        # watchdog safe state: drives zeroed, loops frozen
S_FAULT = 20       # non-finite state detected
S_OUT_CNT = 21     # 1 kHz output samples since reset
NI_STATE = 22

# float config indices
F_M11_1 = 0        # primary-mode ZOH transition / input coefficients
F_M12_1 = 1
F_M21_1 = 2
F_M22_1 = 3
F_B1_1 = 4
F_B2_1 = 5
F_M11_2 = 6        # secondary mode
F_M12_2 = 7
F_M21_2 = 8
F_M22_2 = 9
F_B1_2 = 10
F_B2_2 = 11
F_INV_MASS = 12
F_TWO_KAPPA_M = 13  # 2*kappa*mass
F_K3_FORCE = 14     # cubic force coefficient: F = -k3f * x2^3
F_GDRIVE = 15
F_GPICK = 16        # temperature-corrected pickoff gain, V/m
F_AA_ALPHA = 17
F_NOISE_SIG = 18    # per-sample pickoff noise sigma, V
F_PGA1 = 19
F_PGA2 = 20
F_VREF = 21
F_ADC_LSB = 22
F_ADC_MID = 23      # vref/2
F_AMP_LSB = 24      # drive-amplitude DAC LSB, V
F_PD_ALPHA = 25
F_PLL_KP = 26       # word per rad
F_PLL_KI = 27       # word per rad per DSP tick
F_PLL_CLAMP = 28    # max |frequency-word deviation|
F_LOCK_EPS = 29     # rad
F_AMIN = 30         # amplitude floor for phase normalization, V
F_AGC_ALPHA = 31
F_AGC_KP = 32
F_AGC_KI = 33
F_AGC_SET = 34      # amplitude setpoint at ADC, V
F_DRIVE_INIT = 35   # pre-AGC drive amplitude, V
F_AMP_MAX = 36      # drive amplitude clamp, V
F_DM_ALPHA = 37
F_RB_KP = 38
F_RB_KI = 39
F_CMD_MAX = 40      # rebalance command clamp, V
F_NULL_EPS = 41     # nulled-detector threshold, V
F_O0 = 42           # offset polynomial (raw units vs temperature)
F_O1 = 43
F_O2 = 44
F_G0 = 45           # gain polynomial (deg/s per raw unit vs temperature)
F_G1 = 46
F_G2 = 47
F_TEMP = 48         # ambient temperature, degC
F_OUT_NULL = 49     # output null, V
F_OUT_SCALE = 50    # output scale, V per deg/s
F_OUT_MIN = 51
F_OUT_MAX = 52
F_OMEGA = 53        # applied yaw rate, rad/s
F_STIM_AMP = 54     # rate-stimulus sine amplitude, rad/s
F_STIM_DPHI = 55    # rate-stimulus phase increment per physics tick
F_SRC_AMP = 56      # synthetic-source amplitude (raw pickoff), V
F_SRC_DPHI = 57     # synthetic-source phase increment per DSP tick
F_FW_FORCE = 58     # test hook: >=0 forces the NCO frequency word
NF_CFG = 59

# int config indices
I_DSP_DIV = 0       # physics ticks per DSP tick
I_ADC_MAXCODE = 1
I_ADC_HALF = 2
I_DAC_MAXCODE = 3
I_MODE_CLOSED = 4
I_PLL_EN = 5
I_AGC_EN = 6
I_RB_EN = 7
I_DRIVE_EN = 8
I_CTRL_EN = 9
I_FW_NOM = 10
I_LOCK_DWELL = 11   # DSP ticks
I_SETTLE_DWELL = 12
I_NULL_DWELL = 13
I_NOISE_ON = 14
I_SRC_MODE = 15     # test hook: replace primary pickoff with an oscillator
I_BOX_N = 16
I_DEC2 = 17
I_DEC3 = 18
NI_CFG = 19

# tap identifiers (native rate in parentheses)
TAP_X1 = 0                    # (physics rate)
TAP_X2 = 1                    # (physics rate)
TAP_PRIMARY_PICKOFF_ADC = 2   # (DSP rate)
TAP_PD_ERROR = 3
TAP_NCO_FW = 4
TAP_AGC_GAIN = 5
TAP_DEMOD_I = 6
TAP_DEMOD_Q = 7
TAP_RATE_FILTERED = 8         # (output rate)
TAP_RATE_COMPENSATED = 9
TAP_OUTPUT_VOLTS = 10

TWO_PI = 2.0 * np.pi

_U32 = np.uint64(0xFFFFFFFF)


# ---------------------------------------------------------------------------
# seeded RNG: two xorshift32 lanes combined into a 53-bit uniform.
# All intermediates stay below 2**46, so uint64 arithmetic never wraps
# and the fallback backend produces the identical stream.

@njit
def rng_next_u32(state, lane):
    x = state[lane]
    x = x ^ ((x << np.uint64(13)) & _U32)
    x = x ^ (x >> np.uint64(17))
    x = x ^ ((x << np.uint64(5)) & _U32)
    state[lane] = x
    return x


@njit
def rng_uniform(state):
    a = rng_next_u32(state, 0)
    b = rng_next_u32(state, 1)
    u = (a >> np.uint64(6)) * np.uint64(1 << 27) + (b >> np.uint64(5))
    return float(u) * (1.0 / 9007199254740992.0)


@njit
def rng_normal(state):
    u1 = rng_uniform(state)
    u2 = rng_uniform(state)
    return np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(TWO_PI * u2)


def rng_seed(seed: int) -> np.ndarray:
    """Build a warmed-up RNG state array from an integer seed."""
    s0 = np.uint64((seed ^ 0x9E3779B9) & 0xFFFFFFFF)
    s1 = np.uint64(((seed >> 32) ^ 0x6A09E667) & 0xFFFFFFFF)
    if s0 == 0:
        s0 = np.uint64(0x9E3779B9)
    if s1 == 0:
        s1 = np.uint64(0x6A09E667)
    state = np.array([s0, s1], dtype=np.uint64)
    for _ in range(16):
        rng_next_u32(state, 0)
        rng_next_u32(state, 1)
    return state


# ---------------------------------------------------------------------------
# quarter-wave sine table

def make_sine_table(n: int = 1024) -> np.ndarray:
    k = np.arange(n + 1, dtype=np.float64)
    return np.sin(0.5 * np.pi * k / n)


@njit
def lut_sin(phase, table):
    """Sine of a 32-bit phase word via quarter-wave interpolation."""
    idx = (phase >> 20) & 0xFFF
    frac = float(phase & 0xFFFFF) * (1.0 / 1048576.0)
    quad = idx >> 10
    i = idx & 1023
    if quad == 0:
        return table[i] + frac * (table[i + 1] - table[i])
    if quad == 1:
        j = 1023 - i
        return table[j + 1] + (1.0 - frac) * (table[j] - table[j + 1])
    if quad == 2:
        return -(table[i] + frac * (table[i + 1] - table[i]))
    j = 1023 - i
    return -(table[j + 1] + (1.0 - frac) * (table[j] - table[j + 1]))


@njit
def lut_sincos(phase, table):
    s = lut_sin(phase, table)
    c = lut_sin((phase + 0x40000000) & 0xFFFFFFFF, table)
    return s, c


# ---------------------------------------------------------------------------
# small elements

@njit
def resonator_step(x, v, u, m11, m12, m21, m22, b1, b2):
    """One zero-order-hold step of x'' + (w/Q)x' + w^2 x = u."""
    xn = m11 * x + m12 * v + b1 * u
    vn = m21 * x + m22 * v + b2 * u
    return xn, vn


@njit
def pi_update(err, integ, kp, ki, lo, hi):
    """PI step with conditional integration: the integrator holds while
    the output is clamped."""
    cand = integ + ki * err
    u = kp * err + cand
    if u > hi:
        return hi, integ
    if u < lo:
        return lo, integ
    return u, cand


@njit
def adc_quantize(vin, vref, maxcode):
    """Ideal ADC: code = round(vin/vref * 2^bits), clamped. Returns
    (code, clipped)."""
    raw = np.floor(vin / vref * (maxcode + 1) + 0.5)
    if raw < 0.0:
        return 0, 1
    if raw > maxcode:
        return maxcode, 1
    return int(raw), 0


@njit
def fir_push_dot(coefs, state, pos, x):
    """Push x into the circular delay line and return the filter output
    and updated position."""
    n = coefs.shape[0]
    state[pos] = x
    acc = 0.0
    j = pos
    for k in range(n):
        acc += coefs[k] * state[j]
        j -= 1
        if j < 0:
            j = n - 1
    pos += 1
    if pos >= n:
        pos = 0
    return acc, pos


@njit
def fir_push(state, pos, n, x):
    state[pos] = x
    pos += 1
    if pos >= n:
        pos = 0
    return pos


@njit
def fir_dot(coefs, state, pos):
    """Dot product against the delay line; pos is one past the newest
    sample."""
    n = coefs.shape[0]
    acc = 0.0
    j = pos - 1
    if j < 0:
        j = n - 1
    for k in range(n):
        acc += coefs[k] * state[j]
        j -= 1
        if j < 0:
            j = n - 1
    return acc


@njit
def _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf, tid, value):
    for k in range(tap_ids.shape[0]):
        if tap_ids[k] == tid:
            if tap_phase[k] == 0:
                c = tap_cnt[k]
                if c < tap_buf.shape[1]:
                    tap_buf[k, c] = value
                    tap_cnt[k] = c + 1
            tap_phase[k] += 1
            if tap_phase[k] >= tap_dec[k]:
                tap_phase[k] = 0


# ---------------------------------------------------------------------------
# fused simulation loop

@njit
def run_chunk(n_ticks, fst, ist, rng, fcfg, icfg, sin_tab,
              fir2_c, fir2_s, fir3_c, fir3_s, firch_c, firch_s,
              tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf):
    """Advance the full simulation by n_ticks physics ticks.

    Returns 0, or 1 if a non-finite mechanical state was detected (the
    caller must halt and raise).
    """
    dsp_div = icfg[I_DSP_DIV]
    maxcode = icfg[I_ADC_MAXCODE]
    half = icfg[I_ADC_HALF]
    dac_max = icfg[I_DAC_MAXCODE]
    vref = fcfg[F_VREF]
    lsb = fcfg[F_ADC_LSB]
    mid = fcfg[F_ADC_MID]

    for _ in range(n_ticks):
        # ---- rate stimulus -------------------------------------------------
        omega = fcfg[F_OMEGA]
        if fcfg[F_STIM_AMP] != 0.0:
            ph = fst[SF_STIM_PHASE]
            omega += fcfg[F_STIM_AMP] * np.sin(ph)
            ph += fcfg[F_STIM_DPHI]
            if ph > TWO_PI:
                ph -= TWO_PI
            fst[SF_STIM_PHASE] = ph

        # ---- mechanics (forces held since the last DSP tick) --------------
        x2 = fst[SF_X2]
        u1 = fcfg[F_GDRIVE] * fst[SF_DRIVE_V] * fcfg[F_INV_MASS]
        f2 = (fcfg[F_TWO_KAPPA_M] * omega * fst[SF_V1]
              + fcfg[F_GDRIVE] * fst[SF_CTRL_V]
              - fcfg[F_K3_FORCE] * x2 * x2 * x2)
        u2 = f2 * fcfg[F_INV_MASS]

        x1n, v1n = resonator_step(fst[SF_X1], fst[SF_V1], u1,
                                  fcfg[F_M11_1], fcfg[F_M12_1],
                                  fcfg[F_M21_1], fcfg[F_M22_1],
                                  fcfg[F_B1_1], fcfg[F_B2_1])
        x2n, v2n = resonator_step(fst[SF_X2], fst[SF_V2], u2,
                                  fcfg[F_M11_2], fcfg[F_M12_2],
                                  fcfg[F_M21_2], fcfg[F_M22_2],
                                  fcfg[F_B1_2], fcfg[F_B2_2])
        fst[SF_X1] = x1n
        fst[SF_V1] = v1n
        fst[SF_X2] = x2n
        fst[SF_V2] = v2n

        # pickoffs through the continuous-domain anti-alias pole
        p1 = fcfg[F_GPICK] * x1n
        p2 = fcfg[F_GPICK] * x2n
        fst[SF_AA1] += fcfg[F_AA_ALPHA] * (p1 - fst[SF_AA1])
        fst[SF_AA2] += fcfg[F_AA_ALPHA] * (p2 - fst[SF_AA2])

        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf, TAP_X1, x1n)
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf, TAP_X2, x2n)

        # ---- conditioning chain tick ---------------------------------------
        ist[S_DSP_CNT] += 1
        if ist[S_DSP_CNT] < dsp_div:
            ist[S_TICK] += 1
            continue
        ist[S_DSP_CNT] = 0

        if not (np.isfinite(x1n) and np.isfinite(x2n)):
            ist[S_FAULT] = 1
            return 1

        # front end: optional synthetic source, noise, PGA, ADC
        if icfg[I_SRC_MODE] == 1:
            sph = fst[SF_SRC_PHASE] + fcfg[F_SRC_DPHI]
            if sph > TWO_PI:
                sph -= TWO_PI
            fst[SF_SRC_PHASE] = sph
            pick1 = fcfg[F_SRC_AMP] * np.sin(sph)
        else:
            pick1 = fst[SF_AA1]
        pick2 = fst[SF_AA2]

        if icfg[I_NOISE_ON] == 1 and fcfg[F_NOISE_SIG] > 0.0:
            pick1 += fcfg[F_NOISE_SIG] * rng_normal(rng)
            pick2 += fcfg[F_NOISE_SIG] * rng_normal(rng)

        g1 = pick1 * fcfg[F_PGA1]
        if g1 > vref:
            g1 = vref
            ist[S_CLIP1] = 1
        elif g1 < -vref:
            g1 = -vref
            ist[S_CLIP1] = 1
        g2 = pick2 * fcfg[F_PGA2]
        if g2 > vref:
            g2 = vref
            ist[S_CLIP2] = 1
        elif g2 < -vref:
            g2 = -vref
            ist[S_CLIP2] = 1

        code1, clip1 = adc_quantize(mid + g1, vref, maxcode)
        code2, clip2 = adc_quantize(mid + g2, vref, maxcode)
        if clip1 == 1:
            ist[S_CLIP1] = 1
        if clip2 == 1:
            ist[S_CLIP2] = 1
        c1 = (code1 - half) * lsb
        c2 = (code2 - half) * lsb
        fst[SF_C1] = c1
        fst[SF_C2] = c2

        # NCO
        fw = ist[S_FW]
        if fcfg[F_FW_FORCE] >= 0.0:
            fw = int(fcfg[F_FW_FORCE])
            ist[S_FW] = fw
        phase = (ist[S_PHASE] + fw) & 0xFFFFFFFF
        ist[S_PHASE] = phase
        s, c = lut_sincos(phase, sin_tab)
        fst[SF_SIN] = s
        fst[SF_COS] = c

        # PLL: multiplier phase detector referenced to the NCO cosine
        pd = c1 * c
        fst[SF_PD_LPF] += fcfg[F_PD_ALPHA] * (pd - fst[SF_PD_LPF])
        amp_est = fst[SF_AGC_LPF]
        norm = amp_est
        if norm < fcfg[F_AMIN]:
            norm = fcfg[F_AMIN]
        pd_norm = fst[SF_PD_LPF] / (0.5 * norm)
        fst[SF_PD_NORM] = pd_norm

        frozen = ist[S_SAFE] == 1 or fcfg[F_FW_FORCE] >= 0.0
        if icfg[I_PLL_EN] == 1 and not frozen:
            dfw, integ = pi_update(pd_norm, fst[SF_PLL_INT],
                                   fcfg[F_PLL_KP], fcfg[F_PLL_KI],
                                   -fcfg[F_PLL_CLAMP], fcfg[F_PLL_CLAMP])
            fst[SF_PLL_INT] = integ
            fw = icfg[I_FW_NOM] + int(np.floor(dfw + 0.5))
            if fw < 0:
                fw = 0
            ist[S_FW] = fw & 0xFFFFFFFF

        # lock detector: needs signal and a small sustained phase error
        signal_ok = amp_est > fcfg[F_AMIN]
        if icfg[I_PLL_EN] == 1 and signal_ok:
            ae = abs(pd_norm)
            if ist[S_LOCKED] == 1:
                if ae > 2.0 * fcfg[F_LOCK_EPS]:
                    ist[S_LOCKED] = 0
                    ist[S_LOCK_CNT] = 0
            else:
                if ae < fcfg[F_LOCK_EPS]:
                    ist[S_LOCK_CNT] += 1
                    if ist[S_LOCK_CNT] >= icfg[I_LOCK_DWELL]:
                        ist[S_LOCKED] = 1
                else:
                    ist[S_LOCK_CNT] = 0
        elif icfg[I_PLL_EN] == 1:
            ist[S_LOCKED] = 0
            ist[S_LOCK_CNT] = 0

        # AGC: coherent amplitude estimate against the NCO sine
        a_inst = 2.0 * c1 * s
        fst[SF_AGC_LPF] += fcfg[F_AGC_ALPHA] * (a_inst - fst[SF_AGC_LPF])

        if ist[S_SAFE] == 1:
            amp_q = 0.0
        elif icfg[I_AGC_EN] == 1:
            err = fcfg[F_AGC_SET] - fst[SF_AGC_LPF]
            amp, integ = pi_update(err, fst[SF_AGC_INT],
                                   fcfg[F_AGC_KP], fcfg[F_AGC_KI],
                                   0.0, fcfg[F_AMP_MAX])
            fst[SF_AGC_INT] = integ
            code = int(np.floor(amp / fcfg[F_AMP_LSB] + 0.5))
            if code < 0:
                code = 0
            if code > dac_max:
                code = dac_max
            amp_q = code * fcfg[F_AMP_LSB]
        elif icfg[I_PLL_EN] == 1:
            amp_q = fcfg[F_DRIVE_INIT]
        else:
            amp_q = 0.0
        fst[SF_DRIVE_AMP] = amp_q

        # settle detector on the amplitude error
        if icfg[I_AGC_EN] == 1 and fcfg[F_AGC_SET] > 0.0:
            rel = abs(fst[SF_AGC_LPF] - fcfg[F_AGC_SET]) / fcfg[F_AGC_SET]
            if ist[S_SETTLED] == 1:
                if rel > 0.02:
                    ist[S_SETTLED] = 0
                    ist[S_SETTLE_CNT] = 0
            else:
                if rel < 0.01:
                    ist[S_SETTLE_CNT] += 1
                    if ist[S_SETTLE_CNT] >= icfg[I_SETTLE_DWELL]:
                        ist[S_SETTLED] = 1
                else:
                    ist[S_SETTLE_CNT] = 0
        else:
            ist[S_SETTLED] = 0
            ist[S_SETTLE_CNT] = 0

        # drive DAC: cosine carrier scaled by the quantized amplitude
        if ist[S_SAFE] == 1 or icfg[I_DRIVE_EN] == 0:
            fst[SF_DRIVE_V] = 0.0
        else:
            wf = mid + amp_q * c
            dcode, _ = adc_quantize(wf, vref, dac_max)
            fst[SF_DRIVE_V] = dcode * vref / (dac_max + 1) - mid

        # secondary demodulation
        i_f = 2.0 * c2 * s
        q_f = 2.0 * c2 * c
        fst[SF_I_LPF] += fcfg[F_DM_ALPHA] * (i_f - fst[SF_I_LPF])
        fst[SF_Q_LPF] += fcfg[F_DM_ALPHA] * (q_f - fst[SF_Q_LPF])

        # force rebalance: i_cmd cancels the Coriolis-phase force (the
        # resonator turns a cosine force into sine displacement, so the
        # command that nulls the i channel modulates the cosine carrier)
        closed = icfg[I_MODE_CLOSED] == 1
        if closed and icfg[I_RB_EN] == 1 and ist[S_SAFE] == 0:
            icmd, ii = pi_update(fst[SF_I_LPF], fst[SF_I_INT],
                                 fcfg[F_RB_KP], fcfg[F_RB_KI],
                                 -fcfg[F_CMD_MAX], fcfg[F_CMD_MAX])
            qcmd, qi = pi_update(-fst[SF_Q_LPF], fst[SF_Q_INT],
                                 fcfg[F_RB_KP], fcfg[F_RB_KI],
                                 -fcfg[F_CMD_MAX], fcfg[F_CMD_MAX])
            fst[SF_I_INT] = ii
            fst[SF_Q_INT] = qi
            fst[SF_I_CMD] = icmd
            fst[SF_Q_CMD] = qcmd
        elif not closed:
            fst[SF_I_CMD] = 0.0
            fst[SF_Q_CMD] = 0.0

        if closed and icfg[I_CTRL_EN] == 1 and icfg[I_RB_EN] == 1 \
                and ist[S_SAFE] == 0:
            wf = mid - (fst[SF_I_CMD] * c + fst[SF_Q_CMD] * s)
            ccode, _ = adc_quantize(wf, vref, dac_max)
            fst[SF_CTRL_V] = ccode * vref / (dac_max + 1) - mid
        else:
            fst[SF_CTRL_V] = 0.0

        # nulled detector
        if closed and icfg[I_RB_EN] == 1:
            if abs(fst[SF_I_LPF]) < fcfg[F_NULL_EPS] and \
                    abs(fst[SF_Q_LPF]) < fcfg[F_NULL_EPS]:
                ist[S_NULL_CNT] += 1
                if ist[S_NULL_CNT] >= icfg[I_NULL_DWELL]:
                    ist[S_NULLED] = 1
            else:
                ist[S_NULL_CNT] = 0
                ist[S_NULLED] = 0
        else:
            ist[S_NULLED] = 0
            ist[S_NULL_CNT] = 0

        # rate channel into the decimation cascade
        if closed:
            rate_raw = fst[SF_I_CMD]
        else:
            rate_raw = fst[SF_I_LPF]
        fst[SF_RATE_RAW] = rate_raw

        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_PRIMARY_PICKOFF_ADC, c1)
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_PD_ERROR, pd_norm)
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_NCO_FW, float(ist[S_FW]))
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_AGC_GAIN, amp_q)
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_DEMOD_I, fst[SF_I_LPF])
        _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                TAP_DEMOD_Q, fst[SF_Q_LPF])

        fst[SF_BOX_ACC] += rate_raw
        ist[S_BOX_CNT] += 1
        if ist[S_BOX_CNT] >= icfg[I_BOX_N]:
            y10k = fst[SF_BOX_ACC] / icfg[I_BOX_N]
            fst[SF_BOX_ACC] = 0.0
            ist[S_BOX_CNT] = 0

            ist[S_FIR2_POS] = fir_push(fir2_s, ist[S_FIR2_POS],
                                       fir2_c.shape[0], y10k)
            ist[S_F2_CNT] += 1
            if ist[S_F2_CNT] >= icfg[I_DEC2]:
                ist[S_F2_CNT] = 0
                y2k = fir_dot(fir2_c, fir2_s, ist[S_FIR2_POS])
                ist[S_FIR3_POS] = fir_push(fir3_s, ist[S_FIR3_POS],
                                           fir3_c.shape[0], y2k)
                ist[S_F3_CNT] += 1
                if ist[S_F3_CNT] >= icfg[I_DEC3]:
                    ist[S_F3_CNT] = 0
                    y1k = fir_dot(fir3_c, fir3_s, ist[S_FIR3_POS])
                    rate_f, pos = fir_push_dot(firch_c, firch_s,
                                               ist[S_FIRCH_POS], y1k)
                    ist[S_FIRCH_POS] = pos
                    fst[SF_RATE_1K] = rate_f

                    t = fcfg[F_TEMP]
                    off = fcfg[F_O0] + t * (fcfg[F_O1] + t * fcfg[F_O2])
                    gain = fcfg[F_G0] + t * (fcfg[F_G1] + t * fcfg[F_G2])
                    rate_c = (rate_f - off) * gain
                    fst[SF_RATE_COMP] = rate_c

                    out = fcfg[F_OUT_NULL] + fcfg[F_OUT_SCALE] * rate_c
                    if out > fcfg[F_OUT_MAX]:
                        out = fcfg[F_OUT_MAX]
                        ist[S_CLIP_OUT] = 1
                    elif out < fcfg[F_OUT_MIN]:
                        out = fcfg[F_OUT_MIN]
                        ist[S_CLIP_OUT] = 1
                    fst[SF_OUT_V] = out
                    ist[S_OUT_CNT] += 1

                    _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                            TAP_RATE_FILTERED, rate_f)
                    _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                            TAP_RATE_COMPENSATED, rate_c)
                    _record(tap_ids, tap_dec, tap_phase, tap_cnt, tap_buf,
                            TAP_OUTPUT_VOLTS, out)

        ist[S_TICK] += 1

    return 0


@njit
def decimate_batch(x, fir2_c, fir3_c, firch_c, box_n, dec2, dec3):
    """Run the decimation cascade over a fast-rate array; returns the
    output-rate stream. Same structure as the in-loop path."""
    n_out = x.shape[0] // (box_n * dec2 * dec3)
    out = np.zeros(n_out, dtype=np.float64)
    fir2_s = np.zeros(fir2_c.shape[0], dtype=np.float64)
    fir3_s = np.zeros(fir3_c.shape[0], dtype=np.float64)
    firch_s = np.zeros(firch_c.shape[0], dtype=np.float64)
    p2 = 0
    p3 = 0
    pch = 0
    box_acc = 0.0
    box_cnt = 0
    c2 = 0
    c3 = 0
    m = 0
    for i in range(x.shape[0]):
        box_acc += x[i]
        box_cnt += 1
        if box_cnt >= box_n:
            y = box_acc / box_n
            box_acc = 0.0
            box_cnt = 0
            p2 = fir_push(fir2_s, p2, fir2_c.shape[0], y)
            c2 += 1
            if c2 >= dec2:
                c2 = 0
                y = fir_dot(fir2_c, fir2_s, p2)
                p3 = fir_push(fir3_s, p3, fir3_c.shape[0], y)
                c3 += 1
                if c3 >= dec3:
                    c3 = 0
                    y = fir_dot(fir3_c, fir3_s, p3)
                    y, pch = fir_push_dot(firch_c, firch_s, pch, y)
                    if m < n_out:
                        out[m] = y
                        m += 1
    return out
