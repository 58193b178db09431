/** View-model math for the live psychometric display.
 *
 * Turns recorded trials and the service's fit report into per-level
 * proportions, sampled curve points, and threshold markers. Pure functions,
 * no DOM.
 */

import type { FitReport, TrialJson } from "./types.js";

export interface LevelPoint {
  x: number;
  proportion: number;
  n: number;
}

export interface CurveSample {
  x: number;
  p: number;
}

export type FitViewModel =
  | { state: "empty" }
  | { state: "points-only"; points: LevelPoint[]; notice: string }
  | {
      state: "full";
      points: LevelPoint[];
      curve: CurveSample[];
      jndUm: number;
      pseUm: number;
      jndCi: [number, number] | null;
      pseCi: [number, number] | null;
    };

function erf(x: number): number {
  // Abramowitz & Stegun 7.1.26, |error| < 1.5e-7: plenty below plot resolution
  const sign = x < 0 ? -1 : 1;
  const t = 1 / (1 + 0.3275911 * Math.abs(x));
  const y =
    1 -
    (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t +
      0.254829592) *
      t *
      Math.exp(-x * x);
  return sign * y;
}

export function linkProbability(
  fit: Pick<FitReport, "link" | "beta0" | "beta1">,
  x: number,
): number {
  const eta = fit.beta0 + fit.beta1 * x;
  if (fit.link === "probit") return 0.5 * (1 + erf(eta / Math.SQRT2));
  return 1 / (1 + Math.exp(-eta));
}

export function levelProportions(trials: readonly TrialJson[]): LevelPoint[] {
  const byLevel = new Map<number, { sum: number; n: number }>();
  for (const t of trials) {
    const cell = byLevel.get(t.comparison_um) ?? { sum: 0, n: 0 };
    cell.sum += t.Y;
    cell.n += 1;
    byLevel.set(t.comparison_um, cell);
  }
  return [...byLevel.entries()]
    .map(([x, { sum, n }]) => ({ x, proportion: sum / n, n }))
    .sort((a, b) => a.x - b.x);
}

export function curvePoints(
  fit: Pick<FitReport, "link" | "beta0" | "beta1">,
  xMin: number,
  xMax: number,
  samples = 121,
): CurveSample[] {
  const step = (xMax - xMin) / (samples - 1);
  return Array.from({ length: samples }, (_, i) => {
    const x = xMin + i * step;
    return { x, p: linkProbability(fit, x) };
  });
}

export function fitViewModel(
  trials: readonly TrialJson[],
  fit: FitReport | null,
): FitViewModel {
  if (trials.length === 0) return { state: "empty" };
  const points = levelProportions(trials);
  if (fit === null) {
    return {
      state: "points-only",
      points,
      notice: "Not enough distinct levels answered to fit a curve yet.",
    };
  }
  if (!fit.converged) {
    return {
      state: "points-only",
      points,
      notice: "Fit did not identify a usable slope (flat or separated responses).",
    };
  }
  const xs = points.map((p) => p.x);
  const span = Math.max(xs[xs.length - 1] - xs[0], 1);
  const xMin = xs[0] - 0.1 * span;
  const xMax = xs[xs.length - 1] + 0.1 * span;
  return {
    state: "full",
    points,
    curve: curvePoints(fit, xMin, xMax),
    jndUm: fit.jnd_um,
    pseUm: fit.pse_um,
    jndCi: fit.ci ? fit.ci.jnd : null,
    pseCi: fit.ci ? fit.ci.pse : null,
  };
}
