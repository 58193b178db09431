import { describe, expect, it } from "vitest";

import {
  curvePoints,
  fitViewModel,
  levelProportions,
  linkProbability,
} from "../src/fitView.js";
import type { FitReport, TrialJson } from "../src/types.js";

function trial(j: number, x: number, y: 0 | 1): TrialJson {
  return {
    j,
    comparison_um: x,
    order: "comparison-first",
    replicate_ids: [0, 0],
    Y: y,
    rt_ms: null,
  };
}

function syntheticTrials(fit: FitReport, perLevel = 20): TrialJson[] {
  // deterministic "responses": round the model probability into counts
  const levels = [18, 65, 127, 195, 264];
  const trials: TrialJson[] = [];
  let j = 0;
  for (const x of levels) {
    const ones = Math.round(linkProbability(fit, x) * perLevel);
    for (let i = 0; i < perLevel; i++) trials.push(trial(j++, x, i < ones ? 1 : 0));
  }
  return trials;
}

const LOGIT_FIT: FitReport = {
  link: "logit",
  beta0: -2.326,
  beta1: 0.01701,
  jnd_um: 1 / 0.01701,
  pse_um: 2.326 / 0.01701,
  ci: { jnd: [50, 70], pse: [120, 150] },
  n_trials: 100,
  converged: true,
  seed: 0,
};

describe("linkProbability", () => {
  it("is the logistic curve for the logit link", () => {
    expect(linkProbability(LOGIT_FIT, LOGIT_FIT.pse_um)).toBeCloseTo(0.5, 9);
    const p = linkProbability(LOGIT_FIT, 264);
    expect(p).toBeCloseTo(1 / (1 + Math.exp(-(-2.326 + 0.01701 * 264))), 12);
  });

  it("is the normal CDF for the probit link", () => {
    const probit = { link: "probit" as const, beta0: 0, beta1: 1 };
    expect(linkProbability(probit, 0)).toBeCloseTo(0.5, 7);
    expect(linkProbability(probit, 1.959964)).toBeCloseTo(0.975, 4);
    expect(linkProbability(probit, -1.959964)).toBeCloseTo(0.025, 4);
  });
});

describe("levelProportions", () => {
  it("aggregates per level, sorted, proportions within [0, 1]", () => {
    const trials = [trial(0, 195, 1), trial(1, 18, 0), trial(2, 195, 0), trial(3, 18, 0)];
    const points = levelProportions(trials);
    expect(points.map((p) => p.x)).toEqual([18, 195]);
    expect(points[0]).toEqual({ x: 18, proportion: 0, n: 2 });
    expect(points[1]).toEqual({ x: 195, proportion: 0.5, n: 2 });
    for (const p of points) {
      expect(p.proportion).toBeGreaterThanOrEqual(0);
      expect(p.proportion).toBeLessThanOrEqual(1);
    }
  });
});

describe("fitViewModel", () => {
  it("is empty with zero responses", () => {
    expect(fitViewModel([], null)).toEqual({ state: "empty" });
  });

  it("is points-only with a notice before a fit exists", () => {
    const model = fitViewModel([trial(0, 127, 1)], null);
    expect(model.state).toBe("points-only");
    if (model.state === "points-only") expect(model.notice).toMatch(/levels/i);
  });

  it("is points-only with a notice for a non-converged (flat) fit", () => {
    const flat: FitReport = { ...LOGIT_FIT, converged: false };
    const model = fitViewModel(syntheticTrials(LOGIT_FIT), flat);
    expect(model.state).toBe("points-only");
    if (model.state === "points-only") expect(model.notice).toMatch(/flat|separated/i);
  });

  it("renders the full view with curve and threshold markers", () => {
    const trials = syntheticTrials(LOGIT_FIT);
    const model = fitViewModel(trials, LOGIT_FIT);
    expect(model.state).toBe("full");
    if (model.state !== "full") return;
    expect(model.jndUm).toBeCloseTo(58.79, 1);
    expect(model.pseUm).toBeCloseTo(136.74, 1);
    expect(model.jndCi).toEqual([50, 70]);
    // curve passes through the fit's own prediction at every data level
    for (const point of model.points) {
      const predicted = linkProbability(LOGIT_FIT, point.x);
      const nearest = model.curve.reduce((best, c) =>
        Math.abs(c.x - point.x) < Math.abs(best.x - point.x) ? c : best,
      );
      expect(Math.abs(nearest.p - predicted)).toBeLessThan(0.01);
      expect(Math.abs(linkProbability(LOGIT_FIT, nearest.x) - nearest.p)).toBeLessThan(1e-12);
    }
  });

  it("produces a monotone curve when the slope is positive", () => {
    const curve = curvePoints(LOGIT_FIT, 0, 300, 200);
    for (let i = 1; i < curve.length; i++) {
      expect(curve[i].p).toBeGreaterThanOrEqual(curve[i - 1].p);
    }
    expect(curve.every((c) => c.p >= 0 && c.p <= 1)).toBe(true);
  });
});
