"""Synthetic sandpaper vibration traces and simulated observers.

Real recordings are replaced by seeded band-limited noise whose RMS grows
with particle size and whose spectral bump sits near scan_speed / particle
spacing, clipped to the actuator band. Two observer layers answer 2AFC
roughness questions: an analytic observer draws straight from a logistic
curve over particle size (known ground truth for estimator checks), and a
signal-chain observer pushes both traces through the rendering chain and
compares noisy intensities (exercises the full DSP path).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit, ndtr

from .errors import InvalidSpecError
from .signal_chain import (
    ACTUATOR_BAND_HI_HZ,
    ACTUATOR_BAND_LO_HZ,
    DEFAULT_FRAME_LEN,
    DEFAULT_SAMPLE_RATE,
    AccelTrace,
    FilterSpec,
    dft321_reduce,
    highpass_filter,
    read_trace_csv,
    write_trace_csv,
)

# FEPA P-grade -> average particle size in micrometres, smoothest to roughest.
SANDPAPER_PARTICLE_UM = {
    "P1000": 18.0,
    "P220": 65.0,
    "P120": 127.0,
    "P80": 195.0,
    "P60": 264.0,
}
CANONICAL_GRIT_ORDER = ("P1000", "P220", "P120", "P80", "P60")
REFERENCE_GRADE = "P120"

CHOICE_COMPARISON = "comparison"
CHOICE_REFERENCE = "reference"

OBSERVER_ANALYTIC = "analytic"
OBSERVER_SIGNAL_CHAIN = "signal-chain"


@dataclass(frozen=True)
class GritLevel:
    p_grade: str
    particle_um: float

    def __post_init__(self):
        if not (self.particle_um > 0 and np.isfinite(self.particle_um)):
            raise InvalidSpecError("particle_um must be positive and finite")


def canonical_grit(p_grade: str) -> GritLevel:
    try:
        return GritLevel(p_grade, SANDPAPER_PARTICLE_UM[p_grade])
    except KeyError:
        raise InvalidSpecError(
            f"unknown grit {p_grade!r}; known: {sorted(SANDPAPER_PARTICLE_UM)}"
        ) from None


def canonical_grits() -> tuple[GritLevel, ...]:
    """The five standard stimuli, smoothest to roughest."""
    return tuple(canonical_grit(g) for g in CANONICAL_GRIT_ORDER)


def grit_from_um(particle_um: float) -> GritLevel:
    """Recover a grit from its particle size; falls back to a size-named label."""
    for grade, um in SANDPAPER_PARTICLE_UM.items():
        if abs(um - particle_um) < 1e-9:
            return GritLevel(grade, um)
    return GritLevel(f"{particle_um:g}um", particle_um)


@dataclass(frozen=True)
class TextureModel:
    """Parameters of the synthetic texture generator.

    base_rms is the output RMS (across axes) per micrometre of particle size;
    noise_color tilts the in-band amplitude by f**noise_color (0 = flat).
    """

    scan_speed_mps: float = 0.1
    base_rms: float = 0.02
    noise_color: float = 0.0
    seed: int = 0
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if not self.scan_speed_mps > 0:
            raise InvalidSpecError("scan_speed_mps must be positive")
        if not self.base_rms > 0:
            raise InvalidSpecError("base_rms must be positive")
        if self.sample_rate <= 0:
            raise InvalidSpecError("sample_rate must be positive")


@dataclass(frozen=True)
class ObserverModel:
    """A simulated responder.

    kind="analytic": answers from a psychometric curve in the comparison's
    particle size with parameters (beta0, beta1); link picks the curve shape
    (logistic by default, probit optional). kind="signal-chain": compares
    rendered intensities perturbed by multiplicative Gaussian noise of
    fractional size sigma.
    """

    kind: str
    beta0: float = 0.0
    beta1: float = 0.0
    sigma: float = 0.0
    seed: int = 0
    link: str = "logit"

    def __post_init__(self):
        if self.kind not in (OBSERVER_ANALYTIC, OBSERVER_SIGNAL_CHAIN):
            raise InvalidSpecError(f"unknown observer kind {self.kind!r}")
        if not (np.isfinite(self.beta0) and np.isfinite(self.beta1)):
            raise InvalidSpecError("beta0/beta1 must be finite")
        if self.sigma < 0:
            raise InvalidSpecError("sigma must be non-negative")
        if self.link not in ("logit", "probit"):
            raise InvalidSpecError("link must be 'logit' or 'probit'")


def synthesize_texture_trace(
    grit: GritLevel,
    duration_s: float,
    model: TextureModel = TextureModel(),
    seed=None,
    label: str | None = None,
) -> AccelTrace:
    """Generate a seeded noise trace for one grit.

    Each axis is independent band-limited noise with a Gaussian spectral bump
    at scan_speed / particle spacing (clipped to the actuator band), scaled so
    the trace RMS across axes is exactly base_rms * particle_um.
    """
    if not duration_s > 0:
        raise InvalidSpecError("duration_s must be positive")
    n = int(round(duration_s * model.sample_rate))
    if n < 1:
        raise InvalidSpecError("duration too short for one sample")
    rng = np.random.default_rng(model.seed if seed is None else seed)

    freqs = np.fft.rfftfreq(n, 1.0 / model.sample_rate)
    f_center = float(
        np.clip(
            model.scan_speed_mps / (grit.particle_um * 1e-6),
            ACTUATOR_BAND_LO_HZ,
            ACTUATOR_BAND_HI_HZ,
        )
    )
    bandwidth = max(20.0, 0.15 * f_center)
    weight = np.exp(-0.5 * ((freqs - f_center) / bandwidth) ** 2)
    if model.noise_color != 0.0:
        with np.errstate(divide="ignore"):
            tilt = np.where(freqs > 0, (freqs / f_center) ** model.noise_color, 0.0)
        weight = weight * tilt
    weight[(freqs < ACTUATOR_BAND_LO_HZ) | (freqs > ACTUATOR_BAND_HI_HZ)] = 0.0
    if not np.any(weight > 0):
        raise InvalidSpecError("duration too short to shape noise inside the actuator band")

    target_axis_rms = model.base_rms * grit.particle_um / np.sqrt(3.0)
    axes = []
    for _ in range(3):
        shaped = np.fft.irfft(np.fft.rfft(rng.standard_normal(n)) * weight, n=n)
        rms = np.sqrt(np.mean(shaped**2))
        axes.append(shaped * (target_axis_rms / rms))
    return AccelTrace(model.sample_rate, np.column_stack(axes), label or grit.p_grade)


def stimulus_label(grit: GritLevel, replicate: int) -> str:
    return f"{grit.p_grade}#{replicate}"


def parse_stimulus_label(label: str) -> tuple[str, int]:
    grade, _, rep = label.partition("#")
    if not rep:
        raise InvalidSpecError(f"label {label!r} is not grade#replicate")
    return grade, int(rep)


@dataclass(frozen=True)
class StimulusLibrary:
    """Saved traces per grit, keyed by (p_grade, replicate index)."""

    grits: tuple[GritLevel, ...]
    per_grit: int
    model: TextureModel
    duration_s: float
    entries: dict

    def trace(self, p_grade: str, replicate: int) -> AccelTrace:
        try:
            return self.entries[(p_grade, replicate)]
        except KeyError:
            raise InvalidSpecError(f"library has no stimulus {p_grade}#{replicate}") from None

    def grit(self, p_grade: str) -> GritLevel:
        for g in self.grits:
            if g.p_grade == p_grade:
                return g
        raise InvalidSpecError(f"library has no grit {p_grade!r}")

    def covers(self, grits) -> bool:
        have = {g.p_grade for g in self.grits}
        return all(g.p_grade in have for g in grits)


def build_stimulus_library(
    grits,
    per_grit: int = 2,
    model: TextureModel = TextureModel(),
    duration_s: float = 2.0,
) -> StimulusLibrary:
    """Synthesize per_grit distinct-seed traces for every grit."""
    grits = tuple(grits)
    if not grits:
        raise InvalidSpecError("grit list is empty")
    if per_grit < 1:
        raise InvalidSpecError("per_grit must be at least 1")
    entries = {}
    for gi, grit in enumerate(grits):
        for rep in range(per_grit):
            entries[(grit.p_grade, rep)] = synthesize_texture_trace(
                grit,
                duration_s,
                model,
                seed=(model.seed, gi, rep),
                label=stimulus_label(grit, rep),
            )
    return StimulusLibrary(grits, per_grit, model, duration_s, entries)


def save_library(library: StimulusLibrary, out_dir) -> Path:
    """Write one CSV per stimulus plus a manifest.json; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = []
    for gi, grit in enumerate(library.grits):
        for rep in range(library.per_grit):
            trace = library.trace(grit.p_grade, rep)
            csv_name = f"{grit.p_grade}_{rep}.csv"
            write_trace_csv(trace, out / csv_name)
            records.append(
                {
                    "label": stimulus_label(grit, rep),
                    "grit_p_grade": grit.p_grade,
                    "particle_um": grit.particle_um,
                    "seed": [library.model.seed, gi, rep],
                    "csv_path": csv_name,
                }
            )
    manifest = {
        "per_grit": library.per_grit,
        "duration_s": library.duration_s,
        "model": {
            "scan_speed_mps": library.model.scan_speed_mps,
            "base_rms": library.model.base_rms,
            "noise_color": library.model.noise_color,
            "seed": library.model.seed,
            "sample_rate": library.model.sample_rate,
        },
        "stimuli": records,
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_library(in_dir) -> StimulusLibrary:
    root = Path(in_dir)
    manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    model = TextureModel(**manifest["model"])
    entries = {}
    grits = []
    for rec in manifest["stimuli"]:
        grit = GritLevel(rec["grit_p_grade"], rec["particle_um"])
        if grit not in grits:
            grits.append(grit)
        grade, rep = parse_stimulus_label(rec["label"])
        entries[(grade, rep)] = read_trace_csv(root / rec["csv_path"], label=rec["label"])
    return StimulusLibrary(
        tuple(grits), manifest["per_grit"], model, manifest["duration_s"], entries
    )


# --- observers -------------------------------------------------------------


def analytic_observer_respond(
    ref_um: float, comp_um: float, obs: ObserverModel, rng: np.random.Generator
) -> str:
    """Answer "comparison" with probability link(beta0 + beta1 * comp_um).

    The reference level is absorbed into beta0, matching the fitted-model
    convention where the regressor is the comparison stimulus.
    """
    if obs.kind != OBSERVER_ANALYTIC:
        raise InvalidSpecError("observer kind must be 'analytic'")
    eta = obs.beta0 + obs.beta1 * comp_um
    p = expit(eta) if obs.link == "logit" else ndtr(eta)
    return CHOICE_COMPARISON if rng.random() < p else CHOICE_REFERENCE


def perceived_intensity(
    trace: AccelTrace,
    filter_spec: FilterSpec = FilterSpec(),
    frame_len: int = DEFAULT_FRAME_LEN,
) -> float:
    """RMS of the trace after the rendering chain (high-pass + reduction)."""
    return dft321_reduce(highpass_filter(trace, filter_spec), frame_len).rms()


def signal_chain_respond(
    ref_trace: AccelTrace,
    comp_trace: AccelTrace,
    obs: ObserverModel,
    rng: np.random.Generator,
    filter_spec: FilterSpec = FilterSpec(),
    frame_len: int = DEFAULT_FRAME_LEN,
) -> str:
    """Compare rendered intensities under multiplicative noise; ties split uniformly."""
    if obs.kind != OBSERVER_SIGNAL_CHAIN:
        raise InvalidSpecError("observer kind must be 'signal-chain'")
    i_ref = perceived_intensity(ref_trace, filter_spec, frame_len)
    i_comp = perceived_intensity(comp_trace, filter_spec, frame_len)
    p_ref = i_ref * (1.0 + obs.sigma * rng.standard_normal())
    p_comp = i_comp * (1.0 + obs.sigma * rng.standard_normal())
    if p_comp > p_ref:
        return CHOICE_COMPARISON
    if p_comp < p_ref:
        return CHOICE_REFERENCE
    return CHOICE_COMPARISON if rng.random() < 0.5 else CHOICE_REFERENCE


def simulate_identification(
    library: StimulusLibrary,
    observer: ObserverModel | None,
    presentations_per_grit: int = 5,
    seed: int = 0,
) -> list[tuple[str, str]]:
    """Run one texture-matching block; returns (true, answered) grade pairs.

    Each grit is presented presentations_per_grit times in shuffled order.
    observer=None guesses uniformly. A signal-chain observer matches the
    presented trace's noisy intensity to the noisy intensity of one candidate
    per grit (replicate 0).
    """
    if observer is not None and observer.kind != OBSERVER_SIGNAL_CHAIN:
        raise InvalidSpecError("identification supports signal-chain observers (or None)")
    rng = np.random.default_rng(seed)
    grades = [g.p_grade for g in library.grits]
    schedule = np.repeat(np.arange(len(grades)), presentations_per_grit)
    rng.shuffle(schedule)

    candidate_i = {g: perceived_intensity(library.trace(g, 0)) for g in grades}
    presented_i = {
        (g, rep): perceived_intensity(library.trace(g, rep))
        for g in grades
        for rep in range(library.per_grit)
    }

    results = []
    for gi in schedule:
        true_grade = grades[gi]
        if observer is None:
            answer = grades[rng.integers(len(grades))]
        else:
            rep = int(rng.integers(library.per_grit))
            felt = presented_i[(true_grade, rep)] * (
                1.0 + observer.sigma * rng.standard_normal()
            )
            noisy = {
                g: candidate_i[g] * (1.0 + observer.sigma * rng.standard_normal())
                for g in grades
            }
            answer = min(grades, key=lambda g: abs(felt - noisy[g]))
        results.append((true_grade, answer))
    return results
