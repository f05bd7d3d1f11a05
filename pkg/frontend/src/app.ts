// The trainer single-page app. Views: setup -> training -> drill, plus a
// rehearsal dashboard and account/login practice. All state of record
// lives on the server; the page rebuilds itself from the session id.
//
// Secrecy rule: mapping digits appear only inside the training view, and
// only within elements carrying a data-digit attribute. Confirming
// training deletes the table from memory and from the DOM; nothing
// re-renders it afterwards.

import { AnswerVerdict, ChallengeView, MnemonicRow, TrainerApi } from "./api.js";
import { glyphFor, labelFor } from "./glyphs.js";
import {
  DrillStats,
  accuracy,
  emptyStats,
  fromServer,
  meanSeconds,
  recordAnswer,
  sortByDue,
} from "./state.js";

type View = "setup" | "training" | "drill" | "rehearsal" | "accounts";

export class TrainerApp {
  private sessionId: string | null = null;
  private table: MnemonicRow[] | null = null; // dropped at confirmation
  private trainingConfirmed = false;
  private memorized = new Set<number>();
  private stats: DrillStats = emptyStats();
  private currentChallenge: ChallengeView | null = null;
  private challengeShownAt = 0;
  private lastVerdict: AnswerVerdict | null = null;
  private view: View = "setup";
  private statusLine = "";

  constructor(
    private root: HTMLElement,
    private api: TrainerApi,
    private now: () => number = () => Date.now(),
  ) {}

  // ---- lifecycle -------------------------------------------------------

  get session(): string | null {
    return this.sessionId;
  }

  get drill(): ChallengeView | null {
    return this.currentChallenge;
  }

  get drillStats(): DrillStats {
    return this.stats;
  }

  async start(sessionId?: string): Promise<void> {
    if (sessionId) {
      await this.resume(sessionId);
    }
    this.render();
  }

  async createSession(n: number, t: number, seed?: number): Promise<void> {
    const created = await this.api.createSession({ n, d: 10, k1: 2, k2: 2, t, seed });
    this.sessionId = created.session_id;
    this.table = created.mnemonic_table;
    this.trainingConfirmed = false;
    this.memorized = new Set();
    this.stats = emptyStats();
    this.view = "training";
    this.render();
  }

  async resume(sessionId: string): Promise<void> {
    const state = await this.api.state(sessionId);
    this.sessionId = state.session_id;
    this.trainingConfirmed = state.training_confirmed;
    this.stats = fromServer(state.answered, state.correct, state.mean_ms);
    this.table = null; // the mapping is never re-transmitted
    this.view = state.training_confirmed ? "drill" : "setup";
    if (this.view === "drill") {
      await this.loadChallenge();
    }
    this.render();
  }

  // ---- training --------------------------------------------------------

  markMemorized(index: number): void {
    this.memorized.add(index);
    this.render();
  }

  get allMemorized(): boolean {
    return this.table !== null && this.memorized.size === this.table.length;
  }

  async confirmTraining(): Promise<void> {
    if (!this.sessionId || !this.allMemorized) return;
    await this.api.confirmTraining(this.sessionId);
    this.trainingConfirmed = true;
    this.table = null; // secrecy: the digits leave the client for good
    this.view = "drill";
    await this.loadChallenge();
    this.render();
  }

  // ---- drill -----------------------------------------------------------

  async loadChallenge(): Promise<void> {
    if (!this.sessionId) return;
    this.currentChallenge = await this.api.challenge(this.sessionId);
    this.challengeShownAt = this.now();
  }

  async submitDigit(digit: number): Promise<AnswerVerdict | null> {
    if (!this.sessionId || !this.currentChallenge) return null;
    const elapsed = this.now() - this.challengeShownAt;
    const verdict = await this.api.answer(this.sessionId, digit, elapsed);
    this.lastVerdict = verdict;
    this.stats = recordAnswer(this.stats, verdict.correct, elapsed);
    await this.loadChallenge();
    this.render();
    return verdict;
  }

  // ---- rehearsal / accounts --------------------------------------------

  async showRehearsal(): Promise<void> {
    this.view = "rehearsal";
    await this.renderRehearsal();
  }

  async createAccount(label: string): Promise<void> {
    if (!this.sessionId) return;
    await this.api.createAccount(this.sessionId, label);
    this.statusLine = `account "${label}" created`;
    await this.renderAccounts();
  }

  async tryLogin(label: string, digits: string): Promise<boolean> {
    if (!this.sessionId) return false;
    const out = await this.api.login(this.sessionId, label, digits);
    this.statusLine = out.ok ? `login to "${label}" accepted` : `login to "${label}" rejected`;
    await this.renderAccounts();
    return out.ok;
  }

  // ---- rendering ---------------------------------------------------------

  render(): void {
    switch (this.view) {
      case "setup":
        this.renderSetup();
        break;
      case "training":
        this.renderTraining();
        break;
      case "drill":
        this.renderDrill();
        break;
      case "rehearsal":
        void this.renderRehearsal();
        break;
      case "accounts":
        void this.renderAccounts();
        break;
    }
  }

  private shell(content: string): void {
    const nav = this.trainingConfirmed
      ? `<nav>
           <button id="nav-drill">Drill</button>
           <button id="nav-rehearsal">Rehearsal</button>
           <button id="nav-accounts">Accounts</button>
         </nav>`
      : "";
    this.root.innerHTML = `
      <h1>Mapping Trainer</h1>
      ${nav}
      <main>${content}</main>
    `;
    this.root.querySelector("#nav-drill")?.addEventListener("click", () => {
      this.view = "drill";
      void this.loadChallenge().then(() => this.render());
    });
    this.root.querySelector("#nav-rehearsal")?.addEventListener("click", () => {
      void this.showRehearsal();
    });
    this.root.querySelector("#nav-accounts")?.addEventListener("click", () => {
      this.view = "accounts";
      void this.renderAccounts();
    });
  }

  private renderSetup(): void {
    this.shell(`
      <section class="setup">
        <p>Memorize a secret table of digits, then answer challenges by
           adding a few of them in your head.</p>
        <label>objects <input id="setup-n" type="number" value="26" min="14" /></label>
        <label>password length <input id="setup-t" type="number" value="10" min="1" /></label>
        <button id="setup-create">Start training</button>
      </section>
    `);
    this.root.querySelector("#setup-create")?.addEventListener("click", () => {
      const n = Number((this.root.querySelector("#setup-n") as HTMLInputElement).value);
      const t = Number((this.root.querySelector("#setup-t") as HTMLInputElement).value);
      void this.createSession(n, t);
    });
  }

  private renderTraining(): void {
    if (!this.table) {
      this.shell(`<p>This session's table was already shown; it is never displayed twice.</p>`);
      return;
    }
    const rows = this.table
      .map(
        (row) => `
        <tr class="assoc${this.memorized.has(row.index) ? " memorized" : ""}">
          <td>${glyphFor(row.index)} ${labelFor(row.index)}</td>
          <td data-digit="${row.digit}">${row.digit}</td>
          <td><button class="mark" data-index="${row.index}">memorized</button></td>
        </tr>`,
      )
      .join("");
    this.shell(`
      <section class="training">
        <p>Memorize each association, then confirm. The digits are shown
           <strong>only once</strong>.</p>
        <table class="mnemonic"><tbody>${rows}</tbody></table>
        <button id="confirm" ${this.allMemorized ? "" : "disabled"}>
          I memorized all ${this.table.length}
        </button>
      </section>
    `);
    this.root.querySelectorAll("button.mark").forEach((btn) =>
      btn.addEventListener("click", () =>
        this.markMemorized(Number((btn as HTMLElement).dataset.index)),
      ),
    );
    this.root.querySelector("#confirm")?.addEventListener("click", () => {
      void this.confirmTraining();
    });
  }

  private renderDrill(): void {
    const ch = this.currentChallenge;
    if (!ch) {
      this.shell(`<p>loading challenge…</p>`);
      return;
    }
    const slots = ch.layout.slots;
    const half = Math.ceil(slots.length / 2);
    const slotRow = (i: number) => `
      <tr>
        <td>${i}</td><td>${glyphFor(slots[i])} ${labelFor(slots[i])}</td>
        <td>${i + half < slots.length ? i + half : ""}</td>
        <td>${i + half < slots.length ? `${glyphFor(slots[i + half])} ${labelFor(slots[i + half])}` : ""}</td>
      </tr>`;
    const table = Array.from({ length: half }, (_, i) => slotRow(i)).join("");
    const objects = (ids: number[]) =>
      ids.map((i) => `<span class="obj">${glyphFor(i)} ${labelFor(i)}</span>`).join(" ");
    const acc = accuracy(this.stats);
    const mean = meanSeconds(this.stats);
    const verdictLine = this.lastVerdict
      ? `<p class="verdict ${this.lastVerdict.correct ? "good" : "bad"}">
           previous answer ${this.lastVerdict.correct ? "correct" : "wrong"}</p>`
      : "";
    this.shell(`
      <section class="drill">
        <p>challenge ${ch.challenge_index + 1}, digit ${ch.cursor + 1}</p>
        <table class="slot-table"><tbody>${table}</tbody></table>
        <p>index objects: ${objects(ch.layout.index_vars)}</p>
        <p>tail objects: ${objects(ch.layout.tail_vars)}</p>
        <input id="drill-digit" type="number" min="0" max="9" autofocus />
        <button id="drill-submit">submit</button>
        ${verdictLine}
        <p class="stats" id="drill-stats"
           data-answered="${this.stats.answered}"
           data-correct="${this.stats.correct}"
           data-total-ms="${this.stats.totalMs}">
          answered ${this.stats.answered},
          accuracy ${acc === null ? "–" : (100 * acc).toFixed(1) + "%"},
          mean ${mean === null ? "–" : mean.toFixed(2) + "s"} per digit
        </p>
      </section>
    `);
    this.root.querySelector("#drill-submit")?.addEventListener("click", () => {
      const input = this.root.querySelector("#drill-digit") as HTMLInputElement;
      const digit = Number(input.value);
      if (Number.isInteger(digit) && digit >= 0 && digit <= 9) {
        void this.submitDigit(digit);
      }
    });
  }

  private async renderRehearsal(): Promise<void> {
    if (!this.sessionId) return;
    const out = await this.api.rehearsal(this.sessionId);
    const rows = sortByDue(
      out.cues.map((c) => ({
        cue: c.cue,
        dueStart: c.due_start,
        dueEnd: c.due_end,
        overdue: c.overdue,
        recalls: c.recalls,
      })),
    )
      .map(
        (c) => `
        <tr class="${c.overdue ? "overdue" : ""}">
          <td>${glyphFor(c.cue)} ${labelFor(c.cue)}</td>
          <td>${c.recalls}</td>
          <td>${new Date(c.dueStart * 1000).toISOString()}</td>
          <td>${c.overdue ? "overdue" : "scheduled"}</td>
        </tr>`,
      )
      .join("");
    this.shell(`
      <section class="rehearsal">
        <p>Each association must be used once per doubling window; overdue
           cues come first.</p>
        <table><thead><tr><th>cue</th><th>recalls</th><th>next due</th><th></th></tr></thead>
        <tbody>${rows || "<tr><td colspan=4>no recalls yet</td></tr>"}</tbody></table>
      </section>
    `);
  }

  private async renderAccounts(): Promise<void> {
    if (!this.sessionId) return;
    const state = await this.api.state(this.sessionId);
    const options = state.accounts
      .map((label) => `<option value="${label}">${label}</option>`)
      .join("");
    this.shell(`
      <section class="accounts">
        <p>${this.statusLine}</p>
        <div>
          <input id="acct-label" placeholder="account label" />
          <button id="acct-create">create account</button>
        </div>
        <div>
          <select id="login-label">${options}</select>
          <input id="login-digits" placeholder="password digits" />
          <button id="login-try">practice login</button>
        </div>
      </section>
    `);
    this.root.querySelector("#acct-create")?.addEventListener("click", () => {
      const label = (this.root.querySelector("#acct-label") as HTMLInputElement).value.trim();
      if (label) void this.createAccount(label);
    });
    this.root.querySelector("#login-try")?.addEventListener("click", () => {
      const label = (this.root.querySelector("#login-label") as HTMLSelectElement).value;
      const digits = (this.root.querySelector("#login-digits") as HTMLInputElement).value;
      void this.tryLogin(label, digits);
    });
  }
}
