/** Payload shapes of the session service API. */

export interface PlanForm {
  reference_um: number;
  comparisons_um: number[];
  reps: number;
  seed: number;
  per_grit?: number;
}

export interface CreateSessionBody {
  participant_id: string;
  condition_label: string;
  plan: PlanForm;
}

export interface CreatedSession {
  id: string;
  total_trials: number;
  phases: PhaseDurations;
}

export interface PhaseDurations {
  stim1_ms: number;
  gap_ms: number;
  stim2_ms: number;
}

export interface StimulusRef {
  p_grade: string;
  particle_um: number;
  replicate: number;
}

export interface TrialDescriptor {
  trial_index: number;
  total_trials: number;
  answered: number;
  first: StimulusRef;
  second: StimulusRef;
  phases: PhaseDurations;
}

export type Choice = "first" | "second";

export interface ResponseAck {
  answered: number;
  status: "pending" | "running" | "complete";
}

export interface FitReport {
  link: "logit" | "probit";
  beta0: number;
  beta1: number;
  jnd_um: number;
  pse_um: number;
  ci: { jnd: [number, number]; pse: [number, number] } | null;
  n_trials: number;
  converged: boolean;
  seed: number;
  answered?: number;
  total_trials?: number;
  ci_error?: string;
}

export interface TrialJson {
  j: number;
  comparison_um: number;
  order: "comparison-first" | "reference-first";
  replicate_ids: [number, number];
  Y: 0 | 1;
  rt_ms: number | null;
}

export interface SessionLogJson {
  participant_id: string;
  condition_label: string;
  plan: Required<PlanForm>;
  trials: TrialJson[];
  status: "pending" | "running" | "complete";
}
