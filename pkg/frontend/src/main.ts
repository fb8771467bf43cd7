/**
 * Browser entry point: wires the workbench state machine to a plain DOM.
 * Build with `npm run build`, serve index.html next to dist/, and point
 * the service URL box at a running `rolecast serve` instance.
 */

import { ServiceClient, type ExampleCandidate, type TemplateDraft } from "./api.js";
import { HEARTBEAT_INTERVAL_SECONDS } from "./timer.js";
import { StaleLibraryError, Workbench } from "./workbench.js";

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    clearTimeout(handle);
    handle = setTimeout(() => fn(...args), waitMs);
  };
}

const BAND_COLORS: Record<string, string> = {
  entailed: "#b8e6c0",
  allowed: "#f5e6a3",
  excluded: "#d9d9d9",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

async function loadExamples(url: string): Promise<ExampleCandidate[]> {
  const response = await fetch(url);
  if (!response.ok) return [];
  return (await response.json()) as ExampleCandidate[];
}

export async function mount(root: HTMLElement, serviceUrl: string,
                            examplesUrl = "examples.json"): Promise<Workbench> {
  const client = new ServiceClient(serviceUrl);
  const workbench = new Workbench(client);

  const roleList = el("select", { id: "role-select", size: "12" });
  const editor = el("div", { id: "editor" });
  const errorBox = el("div", { id: "inline-error", style: "color:#b00020;min-height:1.2em" });
  const timerBox = el("div", { id: "timer", style: "font:bold 18px monospace" });
  const gridBox = el("div", { id: "grid" });
  const checkButton = el("button", {}, "Check drafts");
  const saveButton = el("button", {}, "Save");
  const loadButton = el("button", {}, "Reload library");

  const left = el("div", { style: "float:left;width:220px" });
  left.append(el("h3", {}, "Roles"), roleList);
  const right = el("div", { style: "margin-left:240px" });
  right.append(timerBox, editor, errorBox, checkButton, saveButton, loadButton, gridBox);
  root.append(left, right);

  function readDrafts(): TemplateDraft[] {
    return Array.from(editor.querySelectorAll("textarea")).map((area) => ({
      id: area.dataset.templateId || undefined,
      pattern: area.value,
      category: area.dataset.category || "implicit-arg",
    }));
  }

  function render(): void {
    const state = workbench.state;
    if (roleList.childElementCount !== state.roles.length) {
      roleList.replaceChildren(
        ...state.roles.map((role) => el("option", { value: role }, role)),
      );
    }
    const view = workbench.timerView();
    if (view) {
      timerBox.textContent = `${view.role}  ${view.display}${view.warning ? "  OVER BUDGET" : ""}`;
      timerBox.style.color = view.warning ? "#b00020" : "#222";
    }
    errorBox.textContent = state.inlineError ?? "";
    if (state.grid) {
      const table = el("table", { border: "1", cellpadding: "4" });
      const header = el("tr");
      header.append(el("th", {}, "example"));
      for (const t of state.savedTemplates) header.append(el("th", {}, t.id));
      table.append(header);
      for (const row of state.grid) {
        const tr = el("tr");
        const context = row.example.context;
        tr.append(el("td", {}, context.length > 60 ? context.slice(0, 57) + "..." : context));
        for (const cell of row.cells) {
          const td = el("td", { style: `background:${BAND_COLORS[cell.band]}` });
          td.append(
            el("div", {}, cell.hypothesis ?? "(not applicable)"),
            el("small", {}, cell.entail === null ? "not scored" : `entail ${cell.entail.toFixed(3)}`),
          );
          tr.append(td);
        }
        table.append(tr);
      }
      gridBox.replaceChildren(table);
    }
  }

  function renderEditor(): void {
    editor.replaceChildren(
      ...workbench.state.drafts.map((draft) => {
        const area = el("textarea", { rows: "2", cols: "70" });
        area.value = draft.pattern;
        if (draft.id) area.dataset.templateId = draft.id;
        area.dataset.category = draft.category;
        return area;
      }),
      el("button", { id: "add-template" }, "+ template"),
    );
    editor.querySelector("#add-template")?.addEventListener("click", () => {
      workbench.setDrafts([...readDrafts(), { pattern: "{arg} ", category: "implicit-arg" }]);
      renderEditor();
    });
  }

  workbench.onChange(render);
  await workbench.init(await loadExamples(examplesUrl));

  roleList.addEventListener("change", async () => {
    await workbench.selectRole(roleList.value);
    renderEditor();
  });
  checkButton.addEventListener("click", () => {
    workbench.setDrafts(readDrafts());
    void workbench.liveCheck();
  });
  // edits re-score automatically; superseded responses are discarded
  editor.addEventListener("input", debounce(() => {
    workbench.setDrafts(readDrafts());
    void workbench.liveCheck();
  }, 600));
  saveButton.addEventListener("click", async () => {
    workbench.setDrafts(readDrafts());
    try {
      await workbench.saveLibrary();
    } catch (error) {
      if (error instanceof StaleLibraryError) {
        if (window.confirm(`${error.message}\nReload the library now?`)) {
          await workbench.loadLibrary();
          renderEditor();
        }
        return;
      }
      throw error;
    }
  });
  loadButton.addEventListener("click", async () => {
    await workbench.loadLibrary();
    renderEditor();
  });

  // Heartbeats accumulate only while a role editor is focused.
  let focused = false;
  editor.addEventListener("focusin", () => (focused = true));
  editor.addEventListener("focusout", () => (focused = false));
  setInterval(() => {
    if (focused && workbench.state.selectedRole) {
      void workbench.heartbeat(HEARTBEAT_INTERVAL_SECONDS);
    }
  }, HEARTBEAT_INTERVAL_SECONDS * 1000);

  return workbench;
}

declare global {
  interface Window {
    rolecastWorkbench?: Workbench;
  }
}

if (typeof document !== "undefined" && document.getElementById("workbench-root")) {
  const params = new URLSearchParams(window.location.search);
  const serviceUrl = params.get("service") ?? "http://127.0.0.1:8710";
  void mount(document.getElementById("workbench-root")!, serviceUrl).then((workbench) => {
    window.rolecastWorkbench = workbench;
  });
}
