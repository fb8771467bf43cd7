/**
 * Workbench state machine: role selection, draft editing, live checks,
 * explicit save/load, and budget timers.
 *
 * A live check is PUT-then-score: the draft templates are saved through
 * the service (which validates them — an invalid draft surfaces as an
 * inline error and the previous grid stays), then every guideline example
 * is re-scored and the probability grid rebuilt from the responses.
 * Responses of superseded checks are discarded by sequence number, so a
 * slow older check can never overwrite a newer grid.
 */

import type { ExampleCandidate, ServiceApi, TemplateDraft, TemplateRecord } from "./api.js";
import { ServiceError } from "./api.js";
import { buildGrid, type GridRow } from "./grid.js";
import { RoleTimer, type TimerView } from "./timer.js";

/** The library changed on the server since this session loaded the role;
 * saving would clobber someone else's work, so the UI prompts a reload. */
export class StaleLibraryError extends Error {
  constructor(public role: string) {
    super(`templates for '${role}' changed on the server; reload before saving`);
    this.name = "StaleLibraryError";
  }
}

export interface WorkbenchState {
  roles: string[];
  selectedRole: string | null;
  drafts: TemplateDraft[];
  savedTemplates: TemplateRecord[];
  examples: ExampleCandidate[];
  grid: GridRow[] | null;
  inlineError: string | null;
  checking: boolean;
  sessionId: string | null;
}

export interface WorkbenchOptions {
  /** Guideline examples shown per role; a fixed dev slice keeps grids
   * comparable across edits. */
  exampleSliceSize?: number;
}

export class Workbench {
  state: WorkbenchState = {
    roles: [],
    selectedRole: null,
    drafts: [],
    savedTemplates: [],
    examples: [],
    grid: null,
    inlineError: null,
    checking: false,
    sessionId: null,
  };

  readonly timer = new RoleTimer();
  private exampleSliceSize: number;
  private examplePool: ExampleCandidate[] = [];
  private checkSequence = 0;
  private listeners: Array<(state: WorkbenchState) => void> = [];

  constructor(private client: ServiceApi, options: WorkbenchOptions = {}) {
    this.exampleSliceSize = options.exampleSliceSize ?? 5;
  }

  onChange(listener: (state: WorkbenchState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async init(examplePool: ExampleCandidate[]): Promise<void> {
    const [library, session] = await Promise.all([
      this.client.getLibrary(),
      this.client.createSession(),
    ]);
    this.examplePool = examplePool;
    this.state.roles = Object.keys(library.roles).sort();
    this.state.sessionId = session.id;
    this.emit();
  }

  async selectRole(role: string): Promise<void> {
    const current = await this.client.getRoleTemplates(role);
    this.state.selectedRole = role;
    this.state.savedTemplates = current.templates;
    this.state.drafts = current.templates.map((t) => ({ ...t }));
    // fixed dev slice chosen at session start, so grids stay comparable
    this.state.examples = this.examplePool.slice(0, this.exampleSliceSize);
    this.state.grid = null;
    this.state.inlineError = null;
    this.emit();
  }

  setDrafts(drafts: TemplateDraft[]): void {
    this.state.drafts = drafts;
    this.emit();
  }

  /** The saved templates must still match what this session last saw;
   * otherwise another session edited the role and a save would clobber it. */
  private async ensureFresh(role: string): Promise<void> {
    const current = await this.client.getRoleTemplates(role);
    const snapshot = JSON.stringify(current.templates);
    if (snapshot !== JSON.stringify(this.state.savedTemplates)) {
      this.state.inlineError = new StaleLibraryError(role).message;
      this.emit();
      throw new StaleLibraryError(role);
    }
  }

  /** Save drafts and rebuild the probability grid from fresh scores. */
  async liveCheck(): Promise<void> {
    const role = this.state.selectedRole;
    if (!role) throw new Error("no role selected");
    const sequence = ++this.checkSequence;
    this.state.checking = true;
    this.emit();
    try {
      await this.ensureFresh(role);
      const saved = await this.client.putRoleTemplates(role, this.state.drafts);
      const grid = await buildGrid(this.client, role, saved.templates, this.state.examples);
      if (sequence !== this.checkSequence) return; // superseded by a newer check
      this.state.savedTemplates = saved.templates;
      this.state.grid = grid;
      this.state.inlineError = null;
    } catch (error) {
      if (sequence !== this.checkSequence) return;
      if (error instanceof ServiceError && error.status === 422) {
        // validation failure: show it at the editor, keep the old grid
        this.state.inlineError = error.message;
      } else if (error instanceof StaleLibraryError) {
        // already surfaced inline by ensureFresh; the grid stays
      } else {
        throw error;
      }
    } finally {
      if (sequence === this.checkSequence) {
        this.state.checking = false;
        this.emit();
      }
    }
  }

  /** Persist drafts without re-scoring (the save path of the round-trip).
   * Throws StaleLibraryError when another session edited the role. */
  async saveLibrary(): Promise<TemplateRecord[]> {
    const role = this.state.selectedRole;
    if (!role) throw new Error("no role selected");
    await this.ensureFresh(role);
    const saved = await this.client.putRoleTemplates(role, this.state.drafts);
    this.state.savedTemplates = saved.templates;
    this.state.inlineError = null;
    this.emit();
    return saved.templates;
  }

  /** Re-read the library from the service, replacing local drafts. */
  async loadLibrary(): Promise<void> {
    const library = await this.client.getLibrary();
    this.state.roles = Object.keys(library.roles).sort();
    if (this.state.selectedRole && library.roles[this.state.selectedRole]) {
      const templates = library.roles[this.state.selectedRole] ?? [];
      this.state.savedTemplates = templates;
      this.state.drafts = templates.map((t) => ({ ...t }));
    }
    this.state.inlineError = null; // a reload resolves stale-save conflicts
    this.emit();
  }

  /** Report focused-editing time; returns the updated countdown view. */
  async heartbeat(seconds: number): Promise<TimerView> {
    const role = this.state.selectedRole;
    if (!role) throw new Error("no role selected");
    const view = this.timer.tick(role, seconds);
    if (this.state.sessionId) {
      const reply = await this.client.heartbeat(this.state.sessionId, role, seconds);
      this.timer.sync(reply.timers);
    }
    this.emit();
    return this.timer.view(role);
  }

  timerView(role?: string): TimerView | null {
    const target = role ?? this.state.selectedRole;
    return target ? this.timer.view(target) : null;
  }
}
