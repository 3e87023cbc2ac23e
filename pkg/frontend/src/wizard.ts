// Wizard state machine for the five-step flow. Holds drafts and talks to the
// server; contains no storage/layout logic of its own. Step N+1 becomes
// reachable only after step N's server call has succeeded.

import {
  AccountDraft,
  ApiClient,
  ApiError,
  CaseDoc,
  Diagnostic,
  EventDraft,
  ExpectationDraft,
  PrestateDraft,
  Report,
  RunOptions,
  VariableRow,
} from "./api.js";

export type StepNumber = 1 | 2 | 3 | 4 | 5;

export const STEP_TITLES: Record<StepNumber, string> = {
  1: "Upload contract",
  2: "Review variables",
  3: "Front-end events",
  4: "Pre-state & accounts",
  5: "DBDL & report",
};

export interface Banner {
  message: string;
  diagnostics: Diagnostic[];
}

type Listener = () => void;

export class Wizard {
  step: StepNumber = 1;
  sessionId: string | null = null;
  contractNames: string[] = [];
  variables: VariableRow[] = [];
  caseName = "case-1";
  accounts: AccountDraft[] = [];
  events: EventDraft[] = [];
  prestate: PrestateDraft[] = [];
  expectations: ExpectationDraft[] = [];
  dbdl: string | null = null;
  report: Report | null = null;
  rawReport: string | null = null;
  banner: Banner | null = null;
  busy = false;

  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  // -- gating ---------------------------------------------------------------

  maxStep(): StepNumber {
    if (this.dbdl !== null) {
      return 5;
    }
    if (this.variables.length > 0) {
      return 4;
    }
    return 1;
  }

  canGo(step: StepNumber): boolean {
    return step <= this.maxStep();
  }

  goTo(step: StepNumber): void {
    if (this.canGo(step)) {
      this.step = step;
      this.emit();
    }
  }

  dismissBanner(): void {
    this.banner = null;
    this.emit();
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.banner = { message: err.message, diagnostics: err.diagnostics };
    } else {
      this.banner = { message: String(err), diagnostics: [] };
    }
    this.emit();
  }

  // -- step 1: upload ----------------------------------------------------------

  async uploadContract(name: string, source: string): Promise<boolean> {
    this.busy = true;
    this.banner = null;
    this.emit();
    try {
      if (this.sessionId === null) {
        this.sessionId = await this.api.createSession();
      }
      const variables = await this.api.uploadContract(this.sessionId, name, source);
      this.variables = variables;
      this.contractNames = [...new Set(variables.map((v) => v.contract))];
      this.step = 2;
      return true;
    } catch (err) {
      this.fail(err); // stay on step 1, diagnostics in the banner
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  // -- steps 3-4: local drafts ---------------------------------------------------

  addAccount(account: AccountDraft): void {
    this.accounts.push(account);
    this.emit();
  }

  addEvent(event: EventDraft): void {
    this.events.push(event);
    this.emit();
  }

  addPrestate(entry: PrestateDraft): void {
    this.prestate.push(entry);
    this.emit();
  }

  addExpectation(entry: ExpectationDraft): void {
    this.expectations.push(entry);
    this.emit();
  }

  removeAccount(index: number): void {
    this.accounts.splice(index, 1);
    this.emit();
  }

  removeEvent(index: number): void {
    this.events.splice(index, 1);
    this.emit();
  }

  removePrestate(index: number): void {
    this.prestate.splice(index, 1);
    this.emit();
  }

  removeExpectation(index: number): void {
    this.expectations.splice(index, 1);
    this.emit();
  }

  caseDoc(): CaseDoc {
    return {
      name: this.caseName,
      accounts: this.accounts.map((a) => ({ alias: a.alias, balance: a.balance })),
      prestate: this.prestate.map((p) => ({ path: p.path, value: p.value })),
      events: this.events.map((e) => ({
        contract: e.contract,
        function: e.function,
        args: e.args,
        sender: e.sender,
        value: e.value === "" ? "0" : e.value,
      })),
      expectations: this.expectations.map((x) => ({ path: x.path, cmp: x.cmp, value: x.value })),
    };
  }

  // -- step 4 -> 5: submit the case --------------------------------------------------

  async submitCase(): Promise<boolean> {
    if (this.sessionId === null) {
      return false;
    }
    this.busy = true;
    this.banner = null;
    this.emit();
    try {
      this.dbdl = await this.api.putCase(this.sessionId, this.caseDoc());
      this.report = null;
      this.rawReport = null;
      this.step = 5;
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }

  // -- step 5: run -------------------------------------------------------------------

  async run(options: RunOptions = {}): Promise<boolean> {
    if (this.sessionId === null || this.dbdl === null) {
      return false;
    }
    this.busy = true;
    this.banner = null;
    this.emit();
    try {
      const { report, raw } = await this.api.run(this.sessionId, options);
      this.report = report;
      this.rawReport = raw;
      return true;
    } catch (err) {
      this.fail(err);
      return false;
    } finally {
      this.busy = false;
      this.emit();
    }
  }
}
