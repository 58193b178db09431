/** Headless session driver.
 *
 * The same loop the browser panel uses, minus the DOM: fetch the open trial,
 * obtain a choice, post it reliably, repeat until the service says complete.
 * Resuming is free because the loop always starts from the service's view of
 * the open trial.
 */

import type { SessionClient } from "./api.js";
import type { Choice, TrialDescriptor } from "./types.js";

export type Chooser = (trial: TrialDescriptor) => Choice | Promise<Choice>;

export interface RunOptions {
  /** called before each trial is answered */
  onTrial?: (trial: TrialDescriptor) => void;
  /** called after every accepted response with the number answered so far */
  onAnswered?: (answered: number) => void;
  /** stop after this many responses (for simulating an interrupted run) */
  maxResponses?: number;
  rtMs?: number | null;
}

export async function runSession(
  client: SessionClient,
  sessionId: string,
  choose: Chooser,
  options: RunOptions = {},
): Promise<number> {
  let posted = 0;
  for (;;) {
    if (options.maxResponses !== undefined && posted >= options.maxResponses) return posted;
    const state = await client.getTrial(sessionId);
    if (state.kind === "complete") return posted;
    options.onTrial?.(state.trial);
    const choice = await choose(state.trial);
    await client.postResponseReliably(
      sessionId,
      state.trial.trial_index,
      choice,
      options.rtMs ?? null,
    );
    posted += 1;
    options.onAnswered?.(state.trial.trial_index + 1);
  }
}
