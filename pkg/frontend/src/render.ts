// DOM rendering for the wizard. Pure view code: reads wizard state, forwards
// user input to wizard methods, and re-renders on every state change.

import { CorrelationRow, Report } from "./api.js";
import { STEP_TITLES, StepNumber, Wizard } from "./wizard.js";

const STEPS: StepNumber[] = [1, 2, 3, 4, 5];

export function renderApp(root: HTMLElement, wizard: Wizard): void {
  root.innerHTML = "";
  const nav = el("nav", "wizard-nav");
  const banner = el("div", "banner-slot");
  const content = el("section", "wizard-content");
  root.append(nav, banner, content);

  const sortState = { key: "r", descending: true };

  const sync = () => {
    renderNav(nav, wizard);
    renderBanner(banner, wizard);
    content.innerHTML = "";
    switch (wizard.step) {
      case 1:
        renderStep1(content, wizard);
        break;
      case 2:
        renderStep2(content, wizard);
        break;
      case 3:
        renderStep3(content, wizard);
        break;
      case 4:
        renderStep4(content, wizard);
        break;
      case 5:
        renderStep5(content, wizard, sortState);
        break;
    }
  };
  wizard.subscribe(sync);
  sync();
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

function renderNav(nav: HTMLElement, wizard: Wizard): void {
  nav.innerHTML = "";
  for (const step of STEPS) {
    const button = el("button", step === wizard.step ? "step active" : "step");
    button.textContent = `${step}. ${STEP_TITLES[step]}`;
    button.disabled = !wizard.canGo(step);
    button.addEventListener("click", () => wizard.goTo(step));
    nav.appendChild(button);
  }
}

function renderBanner(slot: HTMLElement, wizard: Wizard): void {
  slot.innerHTML = "";
  if (!wizard.banner) {
    return;
  }
  const box = el("div", "banner");
  box.appendChild(el("strong", "", wizard.banner.message));
  if (wizard.banner.diagnostics.length) {
    const list = el("ul", "diagnostics");
    for (const diag of wizard.banner.diagnostics) {
      const position = diag.line ? `${diag.line}:${diag.col}: ` : "";
      list.appendChild(el("li", "", `${position}${diag.code}: ${diag.message}`));
    }
    box.appendChild(list);
  }
  const dismiss = el("button", "dismiss", "dismiss");
  dismiss.addEventListener("click", () => wizard.dismissBanner());
  box.appendChild(dismiss);
  slot.appendChild(box);
}

function renderStep1(root: HTMLElement, wizard: Wizard): void {
  root.appendChild(el("h2", "", "Step 1: upload a smart contract"));
  const nameInput = el("input", "contract-name") as HTMLInputElement;
  nameInput.placeholder = "contract.msol";
  nameInput.value = "contract.msol";
  const sourceArea = el("textarea", "contract-source") as HTMLTextAreaElement;
  sourceArea.placeholder = "contract Example { uint256 x; function f() { x += 1; } }";
  sourceArea.rows = 14;
  const upload = el("button", "primary", "Upload & extract variables");
  upload.addEventListener("click", () => {
    void wizard.uploadContract(nameInput.value.trim() || "contract.msol", sourceArea.value);
  });
  root.append(nameInput, sourceArea, upload);
}

function renderStep2(root: HTMLElement, wizard: Wizard): void {
  root.appendChild(el("h2", "", "Step 2: extracted variables"));
  const table = el("table", "variables");
  table.appendChild(headerRow(["contract", "name", "type", "slot"]));
  for (const row of wizard.variables) {
    const tr = el("tr");
    for (const cell of [row.contract, row.name, row.type, row.slot]) {
      tr.appendChild(el("td", "", cell));
    }
    table.appendChild(tr);
  }
  root.appendChild(table);
  root.appendChild(nextButton(wizard, 3, "Add front-end events"));
}

function renderStep3(root: HTMLElement, wizard: Wizard): void {
  root.appendChild(el("h2", "", "Step 3: front-end events"));

  const list = el("ol", "drafts");
  wizard.events.forEach((event, index) => {
    const item = el("li");
    const value = event.value && event.value !== "0" ? ` value ${event.value}` : "";
    item.textContent = `call ${event.contract}.${event.function}(${event.args.join(", ")}) from ${event.sender}${value}`;
    item.appendChild(removeButton(() => wizard.removeEvent(index)));
    list.appendChild(item);
  });
  root.appendChild(list);

  const contractSelect = selectOf(wizard.contractNames, "contract");
  const fnInput = inputOf("function name", "sellSnails");
  const argsInput = inputOf("arguments (comma separated)", "");
  const senderSelect = selectOf(wizard.accounts.map((a) => a.alias), "sender");
  senderSelect.classList.add("sender-picker");
  const senderInput = inputOf("or new sender alias", "player");
  const valueInput = inputOf("attached value (e.g. 1 ether)", "");
  valueInput.classList.add("value-picker");
  const add = el("button", "", "Add event");
  add.addEventListener("click", () => {
    const sender = senderSelect.value || senderInput.value.trim();
    if (!fnInput.value.trim() || !sender) {
      return;
    }
    wizard.addEvent({
      contract: contractSelect.value,
      function: fnInput.value.trim(),
      args: argsInput.value.trim() === "" ? [] : argsInput.value.split(",").map((a) => a.trim()),
      sender,
      value: valueInput.value.trim(),
    });
  });
  root.append(
    labeled("contract", contractSelect),
    labeled("function", fnInput),
    labeled("args", argsInput),
    labeled("sender", senderSelect),
    labeled("", senderInput),
    labeled("value", valueInput),
    add,
    nextButton(wizard, 4, "Set pre-state"),
  );
}

function renderStep4(root: HTMLElement, wizard: Wizard): void {
  root.appendChild(el("h2", "", "Step 4: accounts & blockchain pre-state"));

  const accounts = el("ul", "drafts");
  wizard.accounts.forEach((account, index) => {
    const item = el("li", "", `account ${account.alias} balance ${account.balance}`);
    item.appendChild(removeButton(() => wizard.removeAccount(index)));
    accounts.appendChild(item);
  });
  const aliasInput = inputOf("alias", "player");
  const balanceInput = inputOf("balance (e.g. 1 ether)", "1 ether");
  const addAccount = el("button", "", "Add account");
  addAccount.addEventListener("click", () => {
    if (aliasInput.value.trim()) {
      wizard.addAccount({ alias: aliasInput.value.trim(), balance: balanceInput.value.trim() || "0 wei" });
    }
  });

  const entries = el("ul", "drafts");
  wizard.prestate.forEach((entry, index) => {
    const item = el("li", "", `${entry.path} = ${entry.value}`);
    item.appendChild(removeButton(() => wizard.removePrestate(index)));
    entries.appendChild(item);
  });
  const variableSelect = selectOf(
    wizard.variables.map((v) => `${v.contract}.${v.name}`),
    "variable",
  );
  const keyInput = inputOf("mapping key / array index (optional, comma-separate to nest)", "");
  const valueInput = inputOf("value", "0");
  const addEntry = el("button", "", "Set variable");
  addEntry.addEventListener("click", () => {
    const suffix = keyInput.value.trim() === ""
      ? ""
      : keyInput.value.split(",").map((k) => `[${k.trim()}]`).join("");
    wizard.addPrestate({ path: variableSelect.value + suffix, value: valueInput.value.trim() });
  });

  const expectations = el("ul", "drafts");
  wizard.expectations.forEach((entry, index) => {
    const item = el("li", "", `${entry.path} ${entry.cmp} ${entry.value}`);
    item.appendChild(removeButton(() => wizard.removeExpectation(index)));
    expectations.appendChild(item);
  });
  const expPath = inputOf("path (e.g. C.x or C.m[player])", "");
  const cmpSelect = selectOf(["==", "!=", "<", "<=", ">", ">="], "cmp");
  const expValue = inputOf("expected", "0");
  const addExpectation = el("button", "", "Add expectation");
  addExpectation.addEventListener("click", () => {
    if (expPath.value.trim()) {
      wizard.addExpectation({ path: expPath.value.trim(), cmp: cmpSelect.value, value: expValue.value.trim() });
    }
  });

  const submit = el("button", "primary", "Generate DBDL test case");
  submit.addEventListener("click", () => {
    void wizard.submitCase();
  });

  root.append(
    el("h3", "", "accounts"),
    accounts,
    labeled("alias", aliasInput),
    labeled("balance", balanceInput),
    addAccount,
    el("h3", "", "variable pre-state"),
    entries,
    labeled("variable", variableSelect),
    labeled("key", keyInput),
    labeled("value", valueInput),
    addEntry,
    el("h3", "", "expectations (optional)"),
    expectations,
    labeled("path", expPath),
    labeled("cmp", cmpSelect),
    labeled("value", expValue),
    addExpectation,
    submit,
  );
}

function renderStep5(
  root: HTMLElement,
  wizard: Wizard,
  sortState: { key: string; descending: boolean },
): void {
  root.appendChild(el("h2", "", "Step 5: test case & report"));
  const dbdl = el("pre", "dbdl", wizard.dbdl ?? "");
  root.appendChild(dbdl);
  const run = el("button", "primary", wizard.busy ? "Running..." : "Run test case");
  run.disabled = wizard.busy;
  run.addEventListener("click", () => {
    void wizard.run();
  });
  root.appendChild(run);
  if (wizard.report) {
    renderReport(root, wizard.report, sortState, () => renderStep5Refresh(root, wizard, sortState));
  }
}

function renderStep5Refresh(
  root: HTMLElement,
  wizard: Wizard,
  sortState: { key: string; descending: boolean },
): void {
  root.innerHTML = "";
  renderStep5(root, wizard, sortState);
}

function renderReport(
  root: HTMLElement,
  report: Report,
  sortState: { key: string; descending: boolean },
  refresh: () => void,
): void {
  for (const caseReport of report.cases) {
    root.appendChild(el("h3", "", `case ${caseReport.name}`));
    const table = el("table", "changes");
    table.appendChild(headerRow(["variable", "initial", "final", "delta", "writes"]));
    for (const change of caseReport.changes) {
      const tr = el("tr", change.delta !== "0" ? "changed" : "");
      for (const cell of [change.path, change.initial, change.final, change.delta, String(change.writes)]) {
        tr.appendChild(el("td", "", cell));
      }
      table.appendChild(tr);
    }
    root.appendChild(table);
    for (const expectation of caseReport.expectations) {
      root.appendChild(
        el("p", expectation.pass ? "expect pass" : "expect fail",
          `expect ${expectation.expr} : ${expectation.pass ? "pass" : "FAIL"}`),
      );
    }
  }

  root.appendChild(el("h3", "", "correlations"));
  const table = el("table", "correlations");
  const header = el("tr");
  for (const column of ["a", "b", "r", "n"]) {
    const th = el("th", "sortable", column);
    th.addEventListener("click", () => {
      if (sortState.key === column) {
        sortState.descending = !sortState.descending;
      } else {
        sortState.key = column;
        sortState.descending = column === "r";
      }
      refresh();
    });
    header.appendChild(th);
  }
  table.appendChild(header);
  for (const row of sortCorrelations(report.correlations, sortState.key, sortState.descending)) {
    const tr = el("tr");
    for (const cell of [row.a, row.b, row.r.toFixed(6), String(row.n)]) {
      tr.appendChild(el("td", "", cell));
    }
    table.appendChild(tr);
  }
  root.appendChild(table);
}

export function sortCorrelations(
  rows: CorrelationRow[],
  key: string,
  descending: boolean,
): CorrelationRow[] {
  const sorted = [...rows].sort((x, y) => {
    const a = key === "r" ? x.r : key === "n" ? x.n : key === "a" ? x.a : x.b;
    const b = key === "r" ? y.r : key === "n" ? y.n : key === "a" ? y.a : y.b;
    if (a < b) return -1;
    if (a > b) return 1;
    return 0;
  });
  return descending ? sorted.reverse() : sorted;
}

function headerRow(columns: string[]): HTMLTableRowElement {
  const tr = el("tr");
  for (const column of columns) {
    tr.appendChild(el("th", "", column));
  }
  return tr;
}

function nextButton(wizard: Wizard, step: StepNumber, label: string): HTMLButtonElement {
  const button = el("button", "primary", `Next: ${label}`);
  button.addEventListener("click", () => wizard.goTo(step));
  return button;
}

function removeButton(onClick: () => void): HTMLButtonElement {
  const button = el("button", "remove", "x");
  button.addEventListener("click", onClick);
  return button;
}

function selectOf(options: string[], name: string): HTMLSelectElement {
  const select = el("select") as HTMLSelectElement;
  select.name = name;
  for (const option of options) {
    const node = el("option", "", option) as HTMLOptionElement;
    node.value = option;
    select.appendChild(node);
  }
  return select;
}

function inputOf(placeholder: string, value: string): HTMLInputElement {
  const input = el("input") as HTMLInputElement;
  input.placeholder = placeholder;
  input.value = value;
  return input;
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const wrap = el("label", "field");
  if (text) {
    wrap.appendChild(el("span", "", text));
  }
  wrap.appendChild(control);
  return wrap;
}
