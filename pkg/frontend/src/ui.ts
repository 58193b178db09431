/** DOM wiring for the live session panel.
 *
 * The panel is a pure client: it holds no state of record. Closing or
 * reloading the tab loses nothing; the loop always resumes from the trial the
 * service says is open.
 */

import { ApiError, SessionClient } from "./api.js";
import { drawFitView } from "./chart.js";
import { fitViewModel } from "./fitView.js";
import { WhiteNoise } from "./noise.js";
import type { Phase } from "./phase.js";
import { TrialController } from "./phase.js";
import type { Choice, FitReport, TrialDescriptor } from "./types.js";

const GRIT_UM: Record<string, number> = {
  P1000: 18,
  P220: 65,
  P120: 127,
  P80: 195,
  P60: 264,
};

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const PHASE_LABEL: Record<Phase, string> = {
  stim1: "stimulus 1 playing",
  gap: "pause",
  stim2: "stimulus 2 playing",
  respond: "which felt rougher?",
};

class Panel {
  private client: SessionClient | null = null;
  private sessionId = "";
  private totalTrials = 0;
  private controller: TrialController | null = null;
  private ticker: number | null = null;
  private lastPhase: Phase | null = null;
  private lastFit: FitReport | null = null;
  private trials: { j: number; comparison_um: number; order: "comparison-first" | "reference-first"; replicate_ids: [number, number]; Y: 0 | 1; rt_ms: number | null }[] = [];
  private readonly noise = new WhiteNoise();
  private audioCues = false;

  bind(): void {
    $<HTMLButtonElement>("start").addEventListener("click", () => void this.start());
    $<HTMLButtonElement>("resume").addEventListener("click", () => void this.resume());
    $<HTMLButtonElement>("choose-first").addEventListener("click", () => void this.choose("first"));
    $<HTMLButtonElement>("choose-second").addEventListener("click", () => void this.choose("second"));
    $<HTMLButtonElement>("noise-toggle").addEventListener("click", () => {
      const on = this.noise.toggle();
      $("noise-toggle").textContent = on ? "white noise: on" : "white noise: off";
    });
    $<HTMLInputElement>("audio-cues").addEventListener("change", (event) => {
      this.audioCues = (event.target as HTMLInputElement).checked;
    });
    $<HTMLButtonElement>("fullscreen").addEventListener("click", () => {
      void $("trial-panel").requestFullscreen?.();
    });
    $<HTMLButtonElement>("download").addEventListener("click", () => void this.download());
  }

  private planFromForm() {
    const comparisons = [...document.querySelectorAll<HTMLInputElement>(".grit:checked")].map(
      (box) => GRIT_UM[box.value],
    );
    return {
      reference_um: GRIT_UM[$<HTMLSelectElement>("reference").value],
      comparisons_um: comparisons,
      reps: Number($<HTMLInputElement>("reps").value),
      seed: Number($<HTMLInputElement>("seed").value),
      per_grit: 2,
    };
  }

  private makeClient(): SessionClient {
    return new SessionClient($<HTMLInputElement>("service-url").value);
  }

  async start(): Promise<void> {
    try {
      this.client = this.makeClient();
      const created = await this.client.createSession({
        participant_id: $<HTMLInputElement>("participant").value,
        condition_label: $<HTMLInputElement>("condition").value,
        plan: this.planFromForm(),
      });
      this.sessionId = created.id;
      this.totalTrials = created.total_trials;
      this.trials = [];
      $<HTMLInputElement>("session-id").value = created.id;
      this.setStatus(`session ${created.id} created`);
      this.showTrialPanel();
      await this.nextTrial();
    } catch (error) {
      this.setStatus(`could not start: ${String(error)}`, true);
    }
  }

  async resume(): Promise<void> {
    try {
      this.client = this.makeClient();
      this.sessionId = $<HTMLInputElement>("session-id").value.trim();
      const log = await this.client.exportLog(this.sessionId);
      this.trials = log.trials.slice();
      this.totalTrials = log.plan.comparisons_um.length * log.plan.reps;
      this.setStatus(`resumed session ${this.sessionId} at trial ${log.trials.length}`);
      this.showTrialPanel();
      await this.refreshFit();
      await this.nextTrial();
    } catch (error) {
      this.setStatus(`could not resume: ${String(error)}`, true);
    }
  }

  private showTrialPanel(): void {
    $("setup-panel").hidden = true;
    $("trial-panel").hidden = false;
  }

  private beep(freq: number): void {
    if (!this.audioCues) return;
    const context = new AudioContext();
    const osc = context.createOscillator();
    const gain = context.createGain();
    gain.gain.value = 0.05;
    osc.frequency.value = freq;
    osc.connect(gain).connect(context.destination);
    osc.start();
    osc.stop(context.currentTime + 0.1);
  }

  private async nextTrial(): Promise<void> {
    if (!this.client) return;
    const state = await this.client.getTrial(this.sessionId);
    if (state.kind === "complete") {
      await this.finish();
      return;
    }
    const trial = state.trial;
    $("trial-counter").textContent = `trial ${trial.trial_index + 1} / ${trial.total_trials}`;
    this.controller = new TrialController(trial.phases, (choice, rtMs) =>
      this.postChoice(trial, choice, rtMs),
    );
    this.controller.start();
    this.lastPhase = null;
    this.startTicker();
  }

  private startTicker(): void {
    if (this.ticker !== null) window.clearInterval(this.ticker);
    this.ticker = window.setInterval(() => {
      if (!this.controller) return;
      const view = this.controller.view();
      if (view.phase !== this.lastPhase) {
        this.lastPhase = view.phase;
        if (view.phase === "stim1") this.beep(660);
        if (view.phase === "stim2") this.beep(880);
        $("phase-label").textContent = PHASE_LABEL[view.phase];
        $("stim1-light").classList.toggle("on", view.phase === "stim1");
        $("stim2-light").classList.toggle("on", view.phase === "stim2");
      }
      $("countdown").textContent =
        view.phase === "respond" ? "" : `${(view.remainingMs / 1000).toFixed(1)} s`;
      const enabled = this.controller.choiceEnabled;
      $<HTMLButtonElement>("choose-first").disabled = !enabled;
      $<HTMLButtonElement>("choose-second").disabled = !enabled;
    }, 50);
  }

  private async choose(choice: Choice): Promise<void> {
    await this.controller?.submit(choice);
  }

  private async postChoice(trial: TrialDescriptor, choice: Choice, rtMs: number): Promise<void> {
    if (!this.client) return;
    this.setStatus("");
    try {
      await this.client.postResponseReliably(
        this.sessionId,
        trial.trial_index,
        choice,
        rtMs,
        { onRetry: (attempt) => this.setStatus(`network trouble, retrying (${attempt})…`, true) },
      );
    } catch (error) {
      this.setStatus(`response not delivered: ${String(error)} — it stays open`, true);
      await this.nextTrial();
      return;
    }
    // the service owns the log of record (incl. the Y encoding); re-read it
    // so the plotted points always agree with what was journaled
    const log = await this.client.exportLog(this.sessionId);
    this.trials = log.trials.slice();
    const answered = trial.trial_index + 1;
    if (answered % 10 === 0 || answered === this.totalTrials) {
      await this.refreshFit();
    } else {
      this.renderFit();
    }
    await this.nextTrial();
  }

  private async refreshFit(): Promise<void> {
    if (!this.client) return;
    try {
      const state = await this.client.getFit(this.sessionId, { bootstrap: 0 });
      this.lastFit = state.kind === "fit" ? state.fit : null;
    } catch (error) {
      this.setStatus(`fit unavailable: ${String(error)}`, true);
      this.lastFit = null;
    }
    this.renderFit();
  }

  private renderFit(): void {
    const model = fitViewModel(this.trials, this.lastFit);
    drawFitView($<HTMLCanvasElement>("fit-canvas"), model);
    const readout = $("fit-readout");
    if (model.state === "full") {
      const jndCi = model.jndCi ? ` (95% CI ${model.jndCi[0].toFixed(1)}–${model.jndCi[1].toFixed(1)})` : "";
      const pseCi = model.pseCi ? ` (95% CI ${model.pseCi[0].toFixed(1)}–${model.pseCi[1].toFixed(1)})` : "";
      readout.textContent =
        `discrimination threshold ${model.jndUm.toFixed(2)} um${jndCi} · ` +
        `50% point ${model.pseUm.toFixed(2)} um${pseCi}`;
    } else if (model.state === "points-only") {
      readout.textContent = model.notice;
    } else {
      readout.textContent = "";
    }
  }

  private async finish(): Promise<void> {
    if (this.ticker !== null) window.clearInterval(this.ticker);
    $("phase-label").textContent = "session complete — thank you!";
    $("countdown").textContent = "";
    $<HTMLButtonElement>("choose-first").disabled = true;
    $<HTMLButtonElement>("choose-second").disabled = true;
    if (!this.client) return;
    const final = await this.client.getFit(this.sessionId, { bootstrap: 2000 });
    this.lastFit = final.kind === "fit" ? final.fit : null;
    const log = await this.client.exportLog(this.sessionId);
    this.trials = log.trials.slice();
    this.renderFit();
    $<HTMLButtonElement>("download").hidden = false;
  }

  private async download(): Promise<void> {
    if (!this.client) return;
    const log = await this.client.exportLog(this.sessionId);
    const blob = new Blob([JSON.stringify(log, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `session-${this.sessionId}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private setStatus(text: string, warn = false): void {
    const status = $("status");
    status.textContent = text;
    status.classList.toggle("warn", warn);
  }
}

declare global {
  interface Window {
    hapticbenchPanel: Panel;
  }
}

if (typeof document !== "undefined" && document.getElementById("setup-panel")) {
  const panel = new Panel();
  panel.bind();
  window.hapticbenchPanel = panel;
}

export { ApiError, Panel };
