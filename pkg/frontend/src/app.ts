/**
 * DOM wiring for the session UI. All rendering reads from the ViewModel; all
 * mutations go through the ApiClient. Labels are never rendered
 * optimistically — the panel updates only after the service responds, because
 * a learning failure is meaningful feedback, not a transient error.
 */

import { ApiClient, ConnectionError } from "./api.js";
import {
  ViewModel,
  canLabel,
  canSubmitTask,
  initialModel,
  withDegraded,
  withHistory,
  withLabelOutcome,
  withPrediction,
  withReset,
  withRules,
} from "./state.js";

export interface App {
  model(): ViewModel;
  submitTask(text: string): Promise<void>;
  submitLabel(category: string): Promise<void>;
  refresh(): Promise<void>;
  reset(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, client: ApiClient): App {
  let model = initialModel();
  let inFlight = false; // at most one mutating request at a time

  root.innerHTML = `
    <header class="topbar">
      <h1>Meta-Goal Learner</h1>
      <div class="banner" hidden></div>
    </header>
    <section class="task-form">
      <input class="task-input" placeholder="Enter a task, e.g. call mother" />
      <button class="task-submit" disabled>Submit</button>
    </section>
    <section class="prediction" hidden></section>
    <section class="label-form" hidden>
      <input class="label-input" placeholder="category" />
      <button class="label-submit">Label</button>
    </section>
    <div class="notice" hidden></div>
    <section class="rules">
      <h2>Learned rules</h2>
      <div class="rules-panel"></div>
    </section>
    <section class="history">
      <h2>History</h2>
      <ol class="history-list"></ol>
      <button class="session-reset">Reset session</button>
    </section>
  `;

  const banner = root.querySelector<HTMLElement>(".banner")!;
  const taskInput = root.querySelector<HTMLInputElement>(".task-input")!;
  const taskSubmit = root.querySelector<HTMLButtonElement>(".task-submit")!;
  const predictionBox = root.querySelector<HTMLElement>(".prediction")!;
  const labelForm = root.querySelector<HTMLElement>(".label-form")!;
  const labelInput = root.querySelector<HTMLInputElement>(".label-input")!;
  const labelSubmit = root.querySelector<HTMLButtonElement>(".label-submit")!;
  const noticeBox = root.querySelector<HTMLElement>(".notice")!;
  const rulesPanel = root.querySelector<HTMLElement>(".rules-panel")!;
  const historyList = root.querySelector<HTMLOListElement>(".history-list")!;
  const resetButton = root.querySelector<HTMLButtonElement>(".session-reset")!;

  function renderPrediction(): void {
    const pred = model.lastPrediction;
    if (pred === null || model.pendingTask === null) {
      predictionBox.hidden = true;
      labelForm.hidden = model.pendingTask === null;
      return;
    }
    predictionBox.hidden = false;
    predictionBox.innerHTML = "";
    if (pred.categories.length === 0) {
      predictionBox.append(
        el("p", "unlabeled", "unlabeled — please choose a category"),
      );
    } else {
      const badges = el("div", "badges");
      for (const category of pred.categories) {
        badges.append(el("span", "badge", category));
      }
      predictionBox.append(badges);
      const matched = el("ul", "matched-rules");
      for (const rule of pred.matched_rules) {
        matched.append(el("li", "rule", rule));
      }
      predictionBox.append(matched);
    }
    if (pred.warning) {
      predictionBox.append(el("p", "warning", pred.warning));
    }
    labelForm.hidden = false;
  }

  function renderRules(): void {
    rulesPanel.innerHTML = "";
    const categories = Object.keys(model.rulesByCategory).sort();
    if (categories.length === 0) {
      rulesPanel.append(el("p", "empty", "no rules learned yet"));
      return;
    }
    for (const category of categories) {
      const block = el("div", "rule-block");
      block.append(el("h3", "rule-category", category));
      for (const rule of model.rulesByCategory[category] ?? []) {
        const line = el("pre", "rule", rule);
        if (model.highlightedRules.includes(rule)) {
          line.classList.add("rule-new");
        }
        block.append(line);
      }
      rulesPanel.append(block);
    }
  }

  function renderHistory(): void {
    historyList.innerHTML = "";
    if (model.history.length === 0) {
      historyList.append(el("li", "empty", "nothing yet — submit a task above"));
      return;
    }
    for (const record of model.history) {
      const item = el("li", `record record-${record.kind}`);
      const summary =
        record.kind === "predict"
          ? `task: ${record.text}`
          : `label: ${record.text} -> ${record.label ?? ""}`;
      item.append(el("span", "record-summary", summary));
      if (record.note) item.append(el("span", "record-note", record.note));
      historyList.append(item);
    }
  }

  function render(): void {
    banner.hidden = model.connection !== "degraded";
    if (model.connection === "degraded") {
      banner.textContent = model.notice ?? "connection lost — retrying on next action";
    }
    noticeBox.hidden = model.connection === "degraded" || model.notice === null;
    if (!noticeBox.hidden) noticeBox.textContent = model.notice ?? "";
    taskSubmit.disabled = !canSubmitTask(taskInput.value) || inFlight;
    labelSubmit.disabled = !canLabel(model) || inFlight;
    renderPrediction();
    renderRules();
    renderHistory();
  }

  async function refresh(): Promise<void> {
    try {
      model = withRules(model, await client.getRules());
      model = withHistory(model, await client.getHistory());
    } catch (err) {
      model = withDegraded(model, String(err instanceof Error ? err.message : err));
    }
    render();
  }

  async function submitTask(text: string): Promise<void> {
    if (!canSubmitTask(text) || inFlight) return;
    inFlight = true;
    try {
      const prediction = await client.submitTask(text);
      model = withPrediction(model, text, prediction);
      model = withHistory(model, await client.getHistory());
    } catch (err) {
      if (err instanceof ConnectionError) {
        // keep the typed-in task; nothing was lost
        model = withDegraded(model, err.message);
      } else {
        model = withDegraded(model, String(err instanceof Error ? err.message : err));
      }
    } finally {
      inFlight = false;
    }
    render();
  }

  async function submitLabel(category: string): Promise<void> {
    const task = model.pendingTask;
    if (task === null || inFlight) return;
    inFlight = true;
    try {
      const outcome = await client.submitLabel(task, category);
      model = withLabelOutcome(model, outcome);
      model = withRules(model, await client.getRules());
      model = withHistory(model, await client.getHistory());
      labelInput.value = "";
    } catch (err) {
      model = withDegraded(model, String(err instanceof Error ? err.message : err));
    } finally {
      inFlight = false;
    }
    render();
  }

  async function reset(): Promise<void> {
    if (inFlight) return;
    inFlight = true;
    try {
      await client.resetSession();
      model = withReset(model);
    } catch (err) {
      model = withDegraded(model, String(err instanceof Error ? err.message : err));
    } finally {
      inFlight = false;
    }
    render();
  }

  taskInput.addEventListener("input", () => {
    taskSubmit.disabled = !canSubmitTask(taskInput.value) || inFlight;
  });
  taskSubmit.addEventListener("click", () => void submitTask(taskInput.value));
  taskInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void submitTask(taskInput.value);
  });
  labelSubmit.addEventListener("click", () => void submitLabel(labelInput.value));
  labelInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void submitLabel(labelInput.value);
  });
  resetButton.addEventListener("click", () => void reset());
  window.addEventListener("focus", () => void refresh());

  render();
  return { model: () => model, submitTask, submitLabel, refresh, reset };
}

export function main(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app root element");
  const base = root.dataset.apiBase ?? "";
  const app = createApp(root, new ApiClient(base));
  void app.refresh();
}
