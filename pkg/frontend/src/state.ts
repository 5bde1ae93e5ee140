/**
 * View model and pure transition functions. Rendered rule strings are kept
 * verbatim as served by the API — no client-side rewriting — so the rules
 * panel is always byte-equal to `GET /api/rules`.
 */

import type { HistoryRecord, LabelOutcome, Prediction, RulesByCategory } from "./api.js";

export type ConnectionState = "ok" | "degraded";

export interface ViewModel {
  pendingTask: string | null;
  lastPrediction: Prediction | null;
  rulesByCategory: RulesByCategory;
  history: HistoryRecord[];
  connection: ConnectionState;
  /** Rule strings that appeared in the most recent label response. */
  highlightedRules: string[];
  notice: string | null;
}

export function initialModel(): ViewModel {
  return {
    pendingTask: null,
    lastPrediction: null,
    rulesByCategory: {},
    history: [],
    connection: "ok",
    highlightedRules: [],
    notice: null,
  };
}

export function withPrediction(
  model: ViewModel,
  task: string,
  prediction: Prediction,
): ViewModel {
  return {
    ...model,
    pendingTask: task,
    lastPrediction: prediction,
    connection: "ok",
    notice: null,
  };
}

export function withLabelOutcome(model: ViewModel, outcome: LabelOutcome): ViewModel {
  if (outcome.failure_reason !== null) {
    // learning failed: prior rules stay intact, the reason is shown verbatim
    return {
      ...model,
      pendingTask: null,
      connection: "ok",
      highlightedRules: [],
      notice: outcome.failure_reason,
    };
  }
  if (outcome.already_covered) {
    return {
      ...model,
      pendingTask: null,
      connection: "ok",
      highlightedRules: [],
      notice: "already covered",
    };
  }
  return {
    ...model,
    pendingTask: null,
    connection: "ok",
    highlightedRules: outcome.new_hypothesis ?? [],
    notice: null,
  };
}

export function withRules(model: ViewModel, rules: RulesByCategory): ViewModel {
  return { ...model, rulesByCategory: rules, connection: "ok" };
}

export function withHistory(model: ViewModel, history: HistoryRecord[]): ViewModel {
  return { ...model, history, connection: "ok" };
}

/** Network failure: flag the connection, keep everything else (no state loss). */
export function withDegraded(model: ViewModel, message: string): ViewModel {
  return { ...model, connection: "degraded", notice: message };
}

export function withReset(model: ViewModel): ViewModel {
  return { ...initialModel(), connection: model.connection };
}

export function canSubmitTask(text: string): boolean {
  return text.trim().length > 0;
}

export function canLabel(model: ViewModel): boolean {
  return model.pendingTask !== null;
}
