"""Vibrotactile rendering chain for 3-axis acceleration capture.

Three stages, each a pure function: per-axis high-pass conditioning to strip
slow motion artifacts, per-frame spectral reduction of the three axes to one
channel (root-sum-square magnitude per bin, phase taken from the axis-sum
spectrum, so per-bin spectral energy is preserved), and a bipolar duty-cycle
mapping for a voice-coil actuator driven by PWM on a 5 kHz carrier updated at
1 kHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .errors import EmptyInputError, InvalidSpecError, SchemaViolationError

DEFAULT_SAMPLE_RATE = 1000
DEFAULT_FRAME_LEN = 256
PWM_UPDATE_RATE_HZ = 1000
PWM_CARRIER_HZ = 5000
DUTY_MIN = 0.05
DUTY_MAX = 0.95
DUTY_REST = 0.5
A_REF = 10.0  # m/s^2 mapped to the full duty swing at unit gain

ACTUATOR_BAND_LO_HZ = 50.0
ACTUATOR_BAND_HI_HZ = 500.0


@dataclass(frozen=True)
class AccelTrace:
    """Uniformly sampled 3-axis acceleration, one (ax, ay, az) row per sample, m/s^2."""

    sample_rate: int
    samples: np.ndarray
    label: str | None = None

    def __post_init__(self):
        arr = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise InvalidSpecError(f"samples must have shape (n, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.size == 0:
            raise EmptyInputError("trace has no samples")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidSpecError("sample_rate must be a positive integer")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpecError("samples must be finite")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate

    def rms(self) -> float:
        """Root-mean-square magnitude across axes: sqrt(mean(ax^2 + ay^2 + az^2))."""
        return float(np.sqrt(np.mean(np.sum(self.samples**2, axis=1))))


@dataclass(frozen=True)
class FilterSpec:
    """High-pass conditioning filter; order restricted to 2 or 4."""

    kind: str = "highpass"
    order: int = 2
    cutoff_hz: float = 20.0

    def __post_init__(self):
        if self.kind != "highpass":
            raise InvalidSpecError(f"unsupported filter kind {self.kind!r}")
        if self.order not in (2, 4):
            raise InvalidSpecError("filter order must be 2 or 4")
        if not (self.cutoff_hz > 0 and math.isfinite(self.cutoff_hz)):
            raise InvalidSpecError("cutoff_hz must be positive and finite")

    def validate_for(self, sample_rate: int) -> None:
        if not 0 < self.cutoff_hz < sample_rate / 2:
            raise InvalidSpecError(
                f"cutoff {self.cutoff_hz} Hz must lie below the Nyquist rate "
                f"{sample_rate / 2} Hz"
            )


@dataclass(frozen=True)
class ReducedSignal:
    """Single-channel signal produced by the spectral reduction, m/s^2."""

    sample_rate: int
    values: np.ndarray
    frame_len: int

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).reshape(-1)
        if arr.size == 0:
            raise EmptyInputError("reduced signal has no samples")
        if not np.all(np.isfinite(arr)):
            raise InvalidSpecError("values must be finite")
        _check_power_of_two(self.frame_len)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.values**2)))


@dataclass(frozen=True)
class PwmSchedule:
    """Duty-cycle schedule; rest point 0.5, clamped to [DUTY_MIN, DUTY_MAX]."""

    update_rate_hz: int
    carrier_hz: int
    duties: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.duties, dtype=float).reshape(-1)
        if self.update_rate_hz <= 0 or self.carrier_hz <= 0:
            raise InvalidSpecError("PWM rates must be positive")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise InvalidSpecError("duties must lie in [0, 1]")
        object.__setattr__(self, "duties", arr)

    def __len__(self) -> int:
        return self.duties.size


@dataclass(frozen=True)
class ActuatorModel:
    """Band limits (and informational mechanicals) of the voice-coil actuator."""

    band_lo_hz: float = ACTUATOR_BAND_LO_HZ
    band_hi_hz: float = ACTUATOR_BAND_HI_HZ
    mass_g: float = 1.8
    dims_mm: tuple[float, float, float] = (12.0, 12.0, 6.0)

    def __post_init__(self):
        if not self.band_lo_hz < self.band_hi_hz:
            raise InvalidSpecError("band_lo_hz must be below band_hi_hz")


def _check_power_of_two(frame_len: int) -> None:
    if frame_len < 1 or (frame_len & (frame_len - 1)) != 0:
        raise InvalidSpecError(f"frame_len must be a power of two, got {frame_len}")


def highpass_filter(trace: AccelTrace, spec: FilterSpec = FilterSpec()) -> AccelTrace:
    """Apply the causal high-pass per axis, starting from rest (zero initial state).

    Output has the same length and sample rate as the input.
    """
    spec.validate_for(trace.sample_rate)
    sos = _sig.butter(
        spec.order, spec.cutoff_hz, btype="highpass", fs=trace.sample_rate, output="sos"
    )
    filtered = _sig.sosfilt(sos, trace.samples, axis=0)
    return AccelTrace(trace.sample_rate, filtered, trace.label)


def dft321_reduce(trace: AccelTrace, frame_len: int = DEFAULT_FRAME_LEN) -> ReducedSignal:
    """Merge the three axes into one channel, frame by frame.

    Per non-overlapping frame of ``frame_len`` samples (last frame zero-padded,
    output trimmed back to the input length), the output spectrum has
    per-bin magnitude sqrt(|Ax|^2 + |Ay|^2 + |Az|^2) and the phase of the
    spectrum of (ax + ay + az), so the output's per-bin spectral energy equals
    the three axes' summed energy.
    """
    _check_power_of_two(frame_len)
    x = trace.samples
    n = x.shape[0]
    n_frames = -(-n // frame_len)
    padded = np.zeros((n_frames * frame_len, 3))
    padded[:n] = x
    frames = padded.reshape(n_frames, frame_len, 3)

    spectra = np.fft.rfft(frames, axis=1)
    magnitude = np.sqrt(np.sum(np.abs(spectra) ** 2, axis=2))
    phase = np.angle(spectra.sum(axis=2))  # spectrum of the axis sum, by linearity
    reduced = np.fft.irfft(magnitude * np.exp(1j * phase), n=frame_len, axis=1)
    return ReducedSignal(trace.sample_rate, reduced.reshape(-1)[:n], frame_len)


def to_pwm_schedule(
    sig: ReducedSignal,
    gain: float,
    a_ref: float = A_REF,
    update_rate_hz: int = PWM_UPDATE_RATE_HZ,
    carrier_hz: int = PWM_CARRIER_HZ,
    duty_min: float = DUTY_MIN,
    duty_max: float = DUTY_MAX,
) -> PwmSchedule:
    """Mean-decimate to the update rate and map bipolarly around the 0.5 rest duty.

    duty = clamp(0.5 + 0.5 * gain * A / a_ref, duty_min, duty_max); output
    length is ceil(duration_s * update_rate_hz).
    """
    if not (gain > 0 and math.isfinite(gain)):
        raise InvalidSpecError("gain must be positive")
    if sig.sample_rate < update_rate_hz:
        raise InvalidSpecError(
            f"sample rate {sig.sample_rate} is below the {update_rate_hz} Hz update rate"
        )
    n = len(sig)
    n_out = -(-n * update_rate_hz // sig.sample_rate)
    factor = sig.sample_rate / update_rate_hz
    edges = np.minimum(np.floor(np.arange(n_out + 1) * factor).astype(int), n)
    sums = np.add.reduceat(sig.values, edges[:-1])
    counts = np.maximum(np.diff(edges), 1)
    means = sums / counts
    duties = np.clip(DUTY_REST + 0.5 * gain * means / a_ref, duty_min, duty_max)
    return PwmSchedule(update_rate_hz, carrier_hz, duties)


# --- CSV interchange -------------------------------------------------------
#
# AccelTrace:    t_ms,ax,ay,az    ReducedSignal: t_ms,a    PwmSchedule: t_ms,duty
# t_ms is monotone at 1000/sample_rate spacing starting from 0.


def write_trace_csv(trace: AccelTrace, path) -> None:
    t_ms = np.arange(len(trace)) * (1000.0 / trace.sample_rate)
    data = np.column_stack([t_ms, trace.samples])
    np.savetxt(path, data, delimiter=",", header="t_ms,ax,ay,az", comments="", fmt="%.10g")


def read_trace_csv(path, label: str | None = None) -> AccelTrace:
    t, cols = _read_timed_csv(path, n_cols=4)
    return AccelTrace(_rate_from_times(t), cols, label)


def write_reduced_csv(sig: ReducedSignal, path) -> None:
    t_ms = np.arange(len(sig)) * (1000.0 / sig.sample_rate)
    np.savetxt(
        path,
        np.column_stack([t_ms, sig.values]),
        delimiter=",",
        header="t_ms,a",
        comments="",
        fmt="%.10g",
    )


def read_reduced_csv(path, frame_len: int = DEFAULT_FRAME_LEN) -> ReducedSignal:
    t, cols = _read_timed_csv(path, n_cols=2)
    return ReducedSignal(_rate_from_times(t), cols[:, 0], frame_len)


def write_pwm_csv(schedule: PwmSchedule, path) -> None:
    t_ms = np.arange(len(schedule)) * (1000.0 / schedule.update_rate_hz)
    np.savetxt(
        path,
        np.column_stack([t_ms, schedule.duties]),
        delimiter=",",
        header="t_ms,duty",
        comments="",
        fmt="%.10g",
    )


def _read_timed_csv(path, n_cols: int):
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise SchemaViolationError(f"unparseable CSV {path}: {exc}") from exc
    if data.size == 0:
        raise EmptyInputError(f"{path} holds no samples")
    if data.shape[1] != n_cols:
        raise SchemaViolationError(f"{path}: expected {n_cols} columns, got {data.shape[1]}")
    return data[:, 0], data[:, 1:]


def _rate_from_times(t_ms: np.ndarray) -> int:
    if t_ms.size < 2:
        return DEFAULT_SAMPLE_RATE
    dt = np.diff(t_ms)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-9):
        raise SchemaViolationError("t_ms must be strictly monotone with uniform spacing")
    return int(round(1000.0 / dt[0]))
