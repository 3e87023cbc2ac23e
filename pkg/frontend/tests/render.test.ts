// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiClient, CorrelationRow } from "../src/api.js";
import { renderApp, sortCorrelations } from "../src/render.js";
import { Wizard } from "../src/wizard.js";

function mount(): { root: HTMLElement; wizard: Wizard } {
  const wizard = new Wizard({} as unknown as ApiClient);
  const root = document.createElement("div");
  document.body.appendChild(root);
  renderApp(root, wizard);
  return { root, wizard };
}

describe("renderApp", () => {
  it("shows five nav steps with later steps disabled", () => {
    const { root } = mount();
    const buttons = root.querySelectorAll("nav button");
    expect(buttons.length).toBe(5);
    expect((buttons[0] as HTMLButtonElement).disabled).toBe(false);
    for (const later of [1, 2, 3, 4]) {
      expect((buttons[later] as HTMLButtonElement).disabled).toBe(true);
    }
    expect(root.querySelector("textarea")).not.toBeNull(); // step 1 source box
  });

  it("renders the variable table on step 2", () => {
    const { root, wizard } = mount();
    wizard.variables = [
      { contract: "C", name: "x", type: "uint256", slot: "0x0", offset: 0, width: 32 },
    ];
    wizard.contractNames = ["C"];
    wizard.goTo(2);
    const cells = [...root.querySelectorAll("table.variables td")].map((td) => td.textContent);
    expect(cells).toEqual(["C", "x", "uint256", "0x0"]);
  });

  it("renders a dismissable banner with diagnostics", () => {
    const { root, wizard } = mount();
    wizard.banner = {
      message: "upload failed",
      diagnostics: [{ code: "syntax", message: "expected type", line: 2, col: 5 }],
    };
    wizard.goTo(1);
    expect(root.querySelector(".banner")?.textContent).toContain("2:5: syntax: expected type");
    (root.querySelector(".banner .dismiss") as HTMLButtonElement).click();
    expect(root.querySelector(".banner")).toBeNull();
  });

  it("renders DBDL text and report tables on step 5", () => {
    const { root, wizard } = mount();
    wizard.variables = [{ contract: "C", name: "x", type: "uint256", slot: "0x0", offset: 0, width: 32 }];
    wizard.dbdl = 'testcase "demo" { }';
    wizard.report = {
      cases: [
        {
          name: "demo",
          changes: [{ path: "C.x", initial: "0x0", final: "0x2", delta: "2", writes: 2 }],
          expectations: [{ expr: "C.x == 2", pass: true }],
        },
      ],
      correlations: [{ a: "C.x", b: "C.y", r: 1, n: 5 }],
    };
    wizard.goTo(5);
    expect(root.querySelector("pre.dbdl")?.textContent).toContain("demo");
    expect(root.querySelector("table.changes")?.textContent).toContain("C.x");
    expect(root.querySelector("table.correlations")?.textContent).toContain("1.000000");
    expect(root.querySelector("p.expect")?.textContent).toContain("pass");
  });
});

describe("sortCorrelations", () => {
  const rows: CorrelationRow[] = [
    { a: "p", b: "q", r: 0.5, n: 4 },
    { a: "a", b: "z", r: -0.9, n: 6 },
    { a: "m", b: "n", r: 1.0, n: 3 },
  ];

  it("sorts by r descending by default semantics", () => {
    expect(sortCorrelations(rows, "r", true).map((x) => x.r)).toEqual([1.0, 0.5, -0.9]);
  });

  it("sorts by any column in both directions", () => {
    expect(sortCorrelations(rows, "a", false).map((x) => x.a)).toEqual(["a", "m", "p"]);
    expect(sortCorrelations(rows, "n", true).map((x) => x.n)).toEqual([6, 4, 3]);
  });

  it("does not mutate its input", () => {
    const before = [...rows];
    sortCorrelations(rows, "r", true);
    expect(rows).toEqual(before);
  });
});
