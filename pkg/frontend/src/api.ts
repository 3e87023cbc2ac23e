// Typed client for the kaya HTTP API. All layout/address work happens
// server-side; this module only moves JSON.

export interface VariableRow {
  contract: string;
  name: string;
  type: string;
  slot: string;
  offset: number;
  width: number;
}

export interface Diagnostic {
  code: string;
  message: string;
  line: number;
  col: number;
}

export interface AccountDraft {
  alias: string;
  balance: string; // "1 ether", "5 wei", or a decimal wei amount
}

export interface EventDraft {
  contract: string;
  function: string;
  args: string[];
  sender: string;
  value: string; // empty or an amount
}

export interface PrestateDraft {
  path: string;
  value: string;
}

export interface ExpectationDraft {
  path: string;
  cmp: string;
  value: string;
}

export interface CaseDoc {
  name: string;
  accounts: { alias: string; balance: string }[];
  prestate: { path: string; value: string }[];
  events: { contract: string; function: string; args: string[]; sender: string; value: string }[];
  expectations: { path: string; cmp: string; value: string }[];
}

export interface ChangeRow {
  path: string;
  initial: string;
  final: string;
  delta: string;
  writes: number;
}

export interface ExpectationResult {
  expr: string;
  pass: boolean;
}

export interface CaseReport {
  name: string;
  changes: ChangeRow[];
  expectations: ExpectationResult[];
}

export interface CorrelationRow {
  a: string;
  b: string;
  r: number;
  n: number;
}

export interface Report {
  cases: CaseReport[];
  correlations: CorrelationRow[];
}

export interface RunOptions {
  threshold?: number;
  step_limit?: number;
  jobs?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly diagnostics: Diagnostic[],
    message: string,
  ) {
    super(message);
  }
}

async function parseBody(resp: Response): Promise<any> {
  const text = await resp.text();
  try {
    return text ? JSON.parse(text) : {};
  } catch {
    return { error: text };
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const doc = await parseBody(resp);
    if (!resp.ok) {
      const diagnostics: Diagnostic[] = Array.isArray(doc.diagnostics) ? doc.diagnostics : [];
      const message =
        diagnostics.length > 0
          ? diagnostics.map((d) => d.message).join("; ")
          : typeof doc.error === "string"
            ? doc.error
            : `request failed with status ${resp.status}`;
      throw new ApiError(resp.status, diagnostics, message);
    }
    return doc;
  }

  async health(): Promise<boolean> {
    try {
      await this.request("GET", "/health");
      return true;
    } catch {
      return false;
    }
  }

  async createSession(): Promise<string> {
    const doc = await this.request("POST", "/sessions");
    return doc.id;
  }

  async uploadContract(sessionId: string, name: string, source: string): Promise<VariableRow[]> {
    const doc = await this.request("POST", `/sessions/${sessionId}/contracts`, { name, source });
    return doc.variables;
  }

  async putCase(sessionId: string, caseDoc: CaseDoc): Promise<string> {
    const doc = await this.request("PUT", `/sessions/${sessionId}/case`, caseDoc);
    return doc.dbdl;
  }

  async run(sessionId: string, options: RunOptions = {}): Promise<{ report: Report; raw: string }> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sessionId}/run`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ options }),
    });
    const raw = await resp.text();
    if (!resp.ok) {
      let doc: any = {};
      try {
        doc = JSON.parse(raw);
      } catch {
        /* not json */
      }
      const diagnostics: Diagnostic[] = Array.isArray(doc.diagnostics) ? doc.diagnostics : [];
      throw new ApiError(resp.status, diagnostics, doc.error ?? `run failed with status ${resp.status}`);
    }
    return { report: JSON.parse(raw) as Report, raw };
  }

  async latestReport(sessionId: string): Promise<Report | null> {
    try {
      return (await this.request("GET", `/sessions/${sessionId}/report`)) as Report;
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        return null;
      }
      throw err;
    }
  }
}
