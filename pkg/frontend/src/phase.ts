/** Trial phase machine: stim1 -> gap -> stim2 -> respond.
 *
 * The schedule is a pure function of elapsed time and the service-provided
 * durations; choice input is accepted only in the respond phase, and at most
 * once per trial.
 */

import type { Choice, PhaseDurations } from "./types.js";

export type Phase = "stim1" | "gap" | "stim2" | "respond";

export interface PhaseView {
  phase: Phase;
  /** ms left in the current phase; 0 while awaiting the response */
  remainingMs: number;
}

export function phaseAt(elapsedMs: number, durations: PhaseDurations): PhaseView {
  const stim1End = durations.stim1_ms;
  const gapEnd = stim1End + durations.gap_ms;
  const stim2End = gapEnd + durations.stim2_ms;
  if (elapsedMs < stim1End) return { phase: "stim1", remainingMs: stim1End - elapsedMs };
  if (elapsedMs < gapEnd) return { phase: "gap", remainingMs: gapEnd - elapsedMs };
  if (elapsedMs < stim2End) return { phase: "stim2", remainingMs: stim2End - elapsedMs };
  return { phase: "respond", remainingMs: 0 };
}

export class TrialController {
  private startedAt: number | null = null;
  private submitted = false;

  constructor(
    readonly durations: PhaseDurations,
    private readonly post: (choice: Choice, rtMs: number) => Promise<void>,
    private readonly now: () => number = () => Date.now(),
  ) {}

  start(): void {
    this.startedAt = this.now();
  }

  get started(): boolean {
    return this.startedAt !== null;
  }

  view(): PhaseView {
    if (this.startedAt === null) return { phase: "stim1", remainingMs: this.durations.stim1_ms };
    return phaseAt(this.now() - this.startedAt, this.durations);
  }

  get choiceEnabled(): boolean {
    return this.started && !this.submitted && this.view().phase === "respond";
  }

  private respondPhaseStart(): number {
    return (
      (this.startedAt ?? 0) +
      this.durations.stim1_ms +
      this.durations.gap_ms +
      this.durations.stim2_ms
    );
  }

  /** Forward a click; returns false (and sends nothing) outside the respond phase. */
  async submit(choice: Choice): Promise<boolean> {
    if (!this.choiceEnabled) return false;
    this.submitted = true;
    const rtMs = Math.max(0, this.now() - this.respondPhaseStart());
    await this.post(choice, rtMs);
    return true;
  }
}
