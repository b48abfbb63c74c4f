/**
 * Year drill-down: the selected year's reference variants, ordered by ncr,
 * with citation shares, strict >threshold highlighting, multi-select for
 * manual merge, an (M) badge on merge products, and annotation editing.
 * Shares and flags are rendered exactly as fetched, never recomputed.
 */

import type { YearRef, YearRefs } from "./api.js";

export interface TableHandlers {
  onToggle?: (variantId: string, selected: boolean) => void;
  onMerge?: (variantIds: string[]) => void;
  onSplit?: (variantId: string) => void;
  onAnnotate?: (variantId: string, text: string) => void;
}

export function formatShare(share: number): string {
  return (share * 100).toFixed(1) + "%";
}

function cell(row: HTMLTableRowElement, className: string, text: string): HTMLTableCellElement {
  const td = document.createElement("td");
  td.className = className;
  td.textContent = text;
  row.appendChild(td);
  return td;
}

export function renderYearTable(
  container: HTMLElement,
  year: YearRefs,
  selected: Set<string>,
  handlers: TableHandlers = {},
): HTMLTableElement {
  container.textContent = "";

  const heading = document.createElement("div");
  heading.className = "year-heading";
  heading.textContent = `${year.rpy}: ${year.refs.length} variants, ${year.total_ncr} citations`;
  container.appendChild(heading);

  const table = document.createElement("table");
  table.className = "year-table";
  const head = table.createTHead().insertRow();
  for (const label of ["", "cited reference", "ncr", "share", "flags", "annotation"]) {
    const th = document.createElement("th");
    th.textContent = label;
    head.appendChild(th);
  }

  const body = table.createTBody();
  for (const ref of year.refs) {
    const row = body.insertRow();
    row.dataset.variantId = ref.variant_id;
    if (ref.top) row.classList.add("top-share");

    const selectCell = row.insertCell();
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.className = "select-variant";
    checkbox.checked = selected.has(ref.variant_id);
    checkbox.addEventListener("change", () =>
      handlers.onToggle?.(ref.variant_id, checkbox.checked),
    );
    selectCell.appendChild(checkbox);

    cell(row, "raw", ref.raw);
    cell(row, "ncr", String(ref.ncr));
    cell(row, "share", formatShare(ref.share));

    const flags = row.insertCell();
    flags.className = "flags";
    if (ref.merged) {
      const badge = document.createElement("span");
      badge.className = "merged-badge";
      badge.textContent = "(M)";
      badge.title = "merged from multiple variants";
      flags.appendChild(badge);
      if (handlers.onSplit) {
        const split = document.createElement("button");
        split.className = "split-button";
        split.textContent = "split";
        split.addEventListener("click", () => handlers.onSplit?.(ref.variant_id));
        flags.appendChild(split);
      }
    }

    const noteCell = row.insertCell();
    noteCell.className = "annotation";
    const note = document.createElement("input");
    note.type = "text";
    note.className = "annotation-input";
    note.value = ref.annotation ?? "";
    note.placeholder = "annotate…";
    note.addEventListener("change", () => handlers.onAnnotate?.(ref.variant_id, note.value));
    noteCell.appendChild(note);
  }

  container.appendChild(table);

  const actions = document.createElement("div");
  actions.className = "table-actions";
  const mergeButton = document.createElement("button");
  mergeButton.className = "merge-button";
  mergeButton.textContent = `Merge selected (${selected.size})`;
  mergeButton.disabled = selected.size < 2;
  mergeButton.addEventListener("click", () => handlers.onMerge?.([...selected].sort()));
  actions.appendChild(mergeButton);
  container.appendChild(actions);

  return table;
}

/** Rows the seminal-list exporter feeds on: only annotated variants qualify. */
export function annotatedRefs(refs: YearRef[]): YearRef[] {
  return refs.filter((r) => r.annotation !== null && r.annotation.trim() !== "");
}
