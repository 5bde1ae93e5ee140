/**
 * Full UI flows against a stub service that mirrors the HTTP API payloads.
 * The stub serves the exact rule strings the real engine produces, so these
 * tests double as the UI half of the round-trip check.
 */

import { beforeEach, describe, expect, it } from "vitest";

import type {
  HistoryRecord,
  LabelOutcome,
  Prediction,
  RulesByCategory,
} from "../src/api.js";
import { ApiClient, ConnectionError } from "../src/api.js";
import { createApp } from "../src/app.js";

const CHAIN_RULE = "category(A,B) :- contains(A,C), related_to(C,B).";

/** In-memory stand-in for the session service. */
class StubService {
  rules: RulesByCategory = {};
  history: HistoryRecord[] = [];
  down = false;

  client(): ApiClient {
    const stub = this;
    const client = Object.create(ApiClient.prototype) as ApiClient;
    return Object.assign(client, {
      async submitTask(text: string): Promise<Prediction> {
        stub.check();
        const categories = Object.keys(stub.rules).filter((c) =>
          text.includes("mother") ? c === "family" : false,
        );
        stub.history.push({
          kind: "predict",
          text,
          label: null,
          learned_rules: [],
          timestamp: stub.history.length,
          note: "",
        });
        return {
          categories,
          matched_rules: categories.length > 0 ? [CHAIN_RULE] : [],
          warning: null,
        };
      },
      async submitLabel(text: string, category: string): Promise<LabelOutcome> {
        stub.check();
        let outcome: LabelOutcome;
        if (text.includes("zeppelin")) {
          outcome = {
            already_covered: false,
            new_hypothesis: null,
            failure_reason:
              "no hypothesis exists within the session's clause and depth bounds",
          };
        } else if (stub.rules[category]?.includes(CHAIN_RULE)) {
          outcome = { already_covered: true, new_hypothesis: null, failure_reason: null };
        } else {
          stub.rules = { ...stub.rules, [category]: [CHAIN_RULE] };
          outcome = {
            already_covered: false,
            new_hypothesis: [CHAIN_RULE],
            failure_reason: null,
          };
        }
        stub.history.push({
          kind: "label",
          text,
          label: category,
          learned_rules: outcome.new_hypothesis ?? [],
          timestamp: stub.history.length,
          note: "",
        });
        return outcome;
      },
      async getRules(): Promise<RulesByCategory> {
        stub.check();
        return stub.rules;
      },
      async getHistory(): Promise<HistoryRecord[]> {
        stub.check();
        return [...stub.history];
      },
      async resetSession(): Promise<void> {
        stub.check();
        stub.rules = {};
        stub.history = [];
      },
    });
  }

  private check(): void {
    if (this.down) throw new ConnectionError("cannot reach the session service");
  }
}

let root: HTMLElement;
let stub: StubService;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  stub = new StubService();
});

describe("round trip", () => {
  it("submit, label, and see the exact chain rule in the rules panel", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    expect(root.querySelector(".unlabeled")?.textContent).toContain(
      "unlabeled — please choose a category",
    );

    await app.submitLabel("family");
    const rules = [...root.querySelectorAll(".rules-panel .rule")].map(
      (node) => node.textContent,
    );
    expect(rules).toEqual([CHAIN_RULE]); // byte-equal to the API string
    expect(root.querySelector(".rule-new")?.textContent).toBe(CHAIN_RULE);
    expect(root.querySelector(".rule-category")?.textContent).toBe("family");
  });

  it("a later prediction shows the category badge", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    await app.submitTask("visit mother");
    expect(root.querySelector(".badge")?.textContent).toBe("family");
    expect(root.querySelector(".matched-rules .rule")?.textContent).toBe(CHAIN_RULE);
  });
});

describe("correction flow", () => {
  it("labeling an already-covered task toasts without changing rules", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    await app.submitTask("text mother");
    await app.submitLabel("family");
    expect(root.querySelector<HTMLElement>(".notice")?.textContent).toBe(
      "already covered",
    );
    expect(root.querySelectorAll(".rules-panel .rule")).toHaveLength(1);
    expect(root.querySelectorAll(".rule-new")).toHaveLength(0);
  });

  it("history shows both the prediction and the corrected label", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    const records = [...root.querySelectorAll(".history-list .record")];
    expect(records.map((r) => r.className)).toEqual([
      "record record-predict",
      "record record-label",
    ]);
    expect(records[1]?.textContent).toContain("call mother -> family");
  });
});

describe("learner failure flow", () => {
  it("shows the failure reason verbatim and keeps prior rules", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    await app.submitTask("buy zeppelin");
    await app.submitLabel("family");
    expect(root.querySelector<HTMLElement>(".notice")?.textContent).toBe(
      "no hypothesis exists within the session's clause and depth bounds",
    );
    const rules = [...root.querySelectorAll(".rules-panel .rule")].map(
      (node) => node.textContent,
    );
    expect(rules).toEqual([CHAIN_RULE]); // prior rules intact
  });
});

describe("degraded mode", () => {
  it("server down shows the banner and preserves state", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    stub.down = true;
    await app.submitTask("plan trip");
    const banner = root.querySelector<HTMLElement>(".banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("cannot reach the session service");
    // nothing was lost: the rules panel still shows the learned rule
    expect(root.querySelector(".rules-panel .rule")?.textContent).toBe(CHAIN_RULE);
  });

  it("empty input keeps the submit button disabled", () => {
    createApp(root, stub.client());
    const input = root.querySelector<HTMLInputElement>(".task-input")!;
    const button = root.querySelector<HTMLButtonElement>(".task-submit")!;
    expect(button.disabled).toBe(true);
    input.value = "   ";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(true);
    input.value = "call mother";
    input.dispatchEvent(new Event("input"));
    expect(button.disabled).toBe(false);
  });

  it("reset clears the rules panel and history", async () => {
    const app = createApp(root, stub.client());
    await app.submitTask("call mother");
    await app.submitLabel("family");
    await app.reset();
    expect(root.querySelector(".rules-panel .empty")?.textContent).toBe(
      "no rules learned yet",
    );
    expect(root.querySelector(".history-list .empty")).not.toBeNull();
  });
});
