// @vitest-environment jsdom
//
// End-to-end round trip against the real training service: create a
// session through the UI, memorize + confirm, answer 20 drill challenges,
// then check that the UI's aggregates equal the server's and that no
// mapping digit survives in the DOM after training.

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { TrainerApi } from "./api.js";
import { TrainerApp } from "./app.js";

let server: ChildProcess;
let baseUrl = "";

async function waitForServer(proc: ChildProcess): Promise<string> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("server start timeout")), 20_000);
    let buffer = "";
    proc.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/"serving":\s*"(http:[^"]+)"/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    proc.on("exit", (code) => reject(new Error(`server exited early: ${code}`)));
  });
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "hcpw.cli", "serve", "--port", "0"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  baseUrl = await waitForServer(server);
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("trainer round trip", () => {
  it("matches server aggregates and never re-shows digits", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const api = new TrainerApi(baseUrl);
    const app = new TrainerApp(root, api);
    await app.start();

    await app.createSession(26, 10, 424242);
    const sessionId = app.session!;

    // "memorize": scrape the one-time table exactly as a user would read it
    const digits = new Map<number, number>();
    root.querySelectorAll("tr.assoc").forEach((row) => {
      const cell = row.querySelector("[data-digit]") as HTMLElement;
      const btn = row.querySelector("button.mark") as HTMLElement;
      digits.set(Number(btn.dataset.index), Number(cell.dataset.digit));
    });
    expect(digits.size).toBe(26);

    root.querySelectorAll("button.mark").forEach((btn) => (btn as HTMLElement).click());
    (root.querySelector("#confirm") as HTMLElement).click();
    await new Promise((r) => setTimeout(r, 200));

    // secrecy: no digit-bearing nodes anywhere after confirmation
    expect(document.querySelectorAll("[data-digit]").length).toBe(0);
    expect(document.querySelectorAll("tr.assoc").length).toBe(0);

    const solve = (clause: number[]): number => {
      const d = (i: number) => digits.get(i)!;
      const j = (d(clause[10]) + d(clause[11])) % 10;
      return (d(clause[j]) + d(clause[12]) + d(clause[13])) % 10;
    };

    let expectedCorrect = 0;
    for (let i = 0; i < 20; i++) {
      const clause = app.drill!.clause;
      // answer two of them wrong on purpose; verdicts must track exactly
      const right = solve(clause);
      const digit = i % 10 === 3 ? (right + 1) % 10 : right;
      const verdict = await app.submitDigit(digit);
      expect(verdict!.correct).toBe(digit === right);
      if (verdict!.correct) expectedCorrect += 1;
      expect(document.querySelectorAll("[data-digit]").length).toBe(0);
    }

    // UI aggregates: read off the rendered drill panel
    const panel = root.querySelector("#drill-stats") as HTMLElement;
    const uiAnswered = Number(panel.dataset.answered);
    const uiCorrect = Number(panel.dataset.correct);
    const uiTotalMs = Number(panel.dataset.totalMs);

    const state = await api.state(sessionId);
    expect(uiAnswered).toBe(20);
    expect(state.answered).toBe(20);
    expect(uiCorrect).toBe(expectedCorrect);
    expect(state.correct).toBe(expectedCorrect);
    expect(state.mean_ms).not.toBeNull();
    expect(uiTotalMs / uiAnswered).toBeCloseTo(state.mean_ms!, 6);

    // reload safety: a fresh app instance rebuilds the same aggregates
    const root2 = document.createElement("div");
    document.body.appendChild(root2);
    const app2 = new TrainerApp(root2, api);
    await app2.start(sessionId);
    expect(app2.drillStats.answered).toBe(20);
    expect(app2.drillStats.correct).toBe(expectedCorrect);
    expect(root2.querySelectorAll("[data-digit]").length).toBe(0);

    // rehearsal dashboard renders recalled cues for the session
    const rehearsal = await api.rehearsal(sessionId);
    expect(rehearsal.cues.length).toBeGreaterThan(0);
    for (const cue of rehearsal.cues) {
      expect(cue.due_end - cue.due_start).toBeGreaterThan(0);
    }

    // account creation + login practice through the API the UI uses
    await app.createAccount("demo");
    const created = await api.state(sessionId);
    expect(created.accounts).toContain("demo");
  }, 60_000);
});
