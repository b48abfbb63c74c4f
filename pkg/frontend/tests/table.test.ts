import { describe, expect, it, vi } from "vitest";

import type { YearRef, YearRefs } from "../src/api.js";
import { annotatedRefs, formatShare, renderYearTable } from "../src/table.js";

function ref(overrides: Partial<YearRef> & { variant_id: string }): YearRef {
  return {
    raw: "Someone X, 1977, SOLAR ENERGY, V1, P1",
    first_author: "Someone X",
    rpy: 1977,
    source: "SOLAR ENERGY",
    volume: "1",
    start_page: "1",
    doi: null,
    cluster_id: null,
    ncr: 1,
    share: 0.1,
    top: false,
    merged: false,
    annotation: null,
    ...overrides,
  };
}

// the {7, 2, 1} fixture: shares 0.7 / 0.2 / 0.1 with the strict 10% rule
const YEAR: YearRefs = {
  rpy: 1977,
  total_ncr: 10,
  version: 1,
  refs: [
    ref({ variant_id: "v1", ncr: 7, share: 0.7, top: true }),
    ref({ variant_id: "v2", ncr: 2, share: 0.2, top: true }),
    ref({ variant_id: "v3", ncr: 1, share: 0.1, top: false }),
  ],
};

describe("renderYearTable", () => {
  it("highlights exactly the strictly-above-threshold rows", () => {
    const container = document.createElement("div");
    renderYearTable(container, YEAR, new Set());
    const rows = [...container.querySelectorAll("tbody tr")];
    expect(rows.map((r) => r.classList.contains("top-share"))).toEqual([true, true, false]);
    const shares = [...container.querySelectorAll("td.share")].map((td) => td.textContent);
    expect(shares).toEqual(["70.0%", "20.0%", "10.0%"]);
  });

  it("enables merge only with at least two selected variants", () => {
    const container = document.createElement("div");
    renderYearTable(container, YEAR, new Set(["v1"]));
    expect(container.querySelector<HTMLButtonElement>(".merge-button")!.disabled).toBe(true);

    const onMerge = vi.fn();
    renderYearTable(container, YEAR, new Set(["v2", "v1"]), { onMerge });
    const button = container.querySelector<HTMLButtonElement>(".merge-button")!;
    expect(button.disabled).toBe(false);
    button.click();
    expect(onMerge).toHaveBeenCalledWith(["v1", "v2"]);
  });

  it("reports checkbox toggles", () => {
    const container = document.createElement("div");
    const onToggle = vi.fn();
    renderYearTable(container, YEAR, new Set(), { onToggle });
    const checkbox = container.querySelector<HTMLInputElement>(
      'tr[data-variant-id="v2"] input.select-variant',
    )!;
    checkbox.checked = true;
    checkbox.dispatchEvent(new Event("change"));
    expect(onToggle).toHaveBeenCalledWith("v2", true);
  });

  it("badges merge products and offers split", () => {
    const container = document.createElement("div");
    const onSplit = vi.fn();
    const year: YearRefs = {
      ...YEAR,
      refs: [ref({ variant_id: "vm", ncr: 9, share: 0.9, top: true, merged: true })],
    };
    renderYearTable(container, year, new Set(), { onSplit });
    const row = container.querySelector('tr[data-variant-id="vm"]')!;
    expect(row.querySelector(".merged-badge")!.textContent).toBe("(M)");
    (row.querySelector(".split-button") as HTMLButtonElement).click();
    expect(onSplit).toHaveBeenCalledWith("vm");
  });

  it("sends annotation edits", () => {
    const container = document.createElement("div");
    const onAnnotate = vi.fn();
    renderYearTable(container, YEAR, new Set(), { onAnnotate });
    const input = container.querySelector<HTMLInputElement>(
      'tr[data-variant-id="v1"] .annotation-input',
    )!;
    input.value = "seminal";
    input.dispatchEvent(new Event("change"));
    expect(onAnnotate).toHaveBeenCalledWith("v1", "seminal");
  });
});

describe("helpers", () => {
  it("formats shares with one decimal", () => {
    expect(formatShare(0.1)).toBe("10.0%");
    expect(formatShare(1)).toBe("100.0%");
    expect(formatShare(0.3333)).toBe("33.3%");
  });

  it("annotatedRefs keeps only non-empty annotations", () => {
    const refs = [
      ref({ variant_id: "a", annotation: "keep" }),
      ref({ variant_id: "b", annotation: "" }),
      ref({ variant_id: "c", annotation: "  " }),
      ref({ variant_id: "d", annotation: null }),
    ];
    expect(annotatedRefs(refs).map((r) => r.variant_id)).toEqual(["a"]);
  });
});
