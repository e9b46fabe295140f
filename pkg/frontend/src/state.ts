import { ApiClient, ApiError } from "./api.js";
import { diffScenes, type DiffEntry } from "./diff.js";
import type { CameraMode, EditResponse, SceneSnapshot } from "./types.js";

export interface EditRecord {
  seq: number;
  instruction: string;
  ok: boolean;
  changedIds: string[];
  diff: DiffEntry[];
  error: string | null;
}

export interface Banner {
  kind: "info" | "error";
  text: string;
}

export type Listener = () => void;

/**
 * Single source of truth for the UI.  The snapshot version only ever moves
 * forward and the edit history is append-only; renderers subscribe and
 * re-draw whatever is here.
 */
export class ViewState {
  snapshot: SceneSnapshot | null = null;
  selectedId: string | null = null;
  cameraMode: CameraMode = "top-down";
  pendingEdit = "";
  history: EditRecord[] = [];
  banner: Banner | null = null;
  highlighted: Set<string> = new Set();
  busy = false;

  private listeners: Listener[] = [];
  private seq = 0;

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Accept a snapshot only if it does not move the version backwards. */
  applySnapshot(snapshot: SceneSnapshot): void {
    if (this.snapshot !== null && snapshot.version < this.snapshot.version) {
      return;
    }
    this.snapshot = snapshot;
    if (this.selectedId !== null && !snapshot.scene.items.some((i) => i.id === this.selectedId)) {
      this.selectedId = null;
    }
    this.emit();
  }

  setCameraMode(mode: CameraMode): void {
    this.cameraMode = mode;
    this.emit();
  }

  setPendingEdit(text: string): void {
    this.pendingEdit = text;
    this.emit();
  }

  select(id: string | null): void {
    this.selectedId = id;
    this.emit();
  }

  setBanner(banner: Banner | null): void {
    this.banner = banner;
    this.emit();
  }

  async refresh(): Promise<void> {
    this.applySnapshot(await this.api.getScene());
  }

  /**
   * Submit the pending instruction.  On success the changed objects are
   * highlighted and the diff recorded; on a solver failure the report is
   * shown verbatim; on 400/409 the typed text is kept for correction.
   * Either way the view re-syncs from the server.
   */
  async submitEdit(): Promise<EditRecord | null> {
    const instruction = this.pendingEdit.trim();
    if (!instruction || this.busy) return null;
    this.busy = true;
    this.emit();
    const before = this.snapshot;
    try {
      let response: EditResponse;
      try {
        response = await this.api.submitEdit({ instruction });
      } catch (error) {
        if (error instanceof ApiError) {
          this.setBanner({ kind: "error", text: error.detail });
          return null; // keep pendingEdit so the user can fix it
        }
        throw error;
      }
      await this.refresh();
      const after = this.snapshot;
      const diff =
        before !== null && after !== null ? diffScenes(before.scene, after.scene) : [];
      const record: EditRecord = {
        seq: this.seq++,
        instruction,
        ok: response.ok,
        changedIds: response.changed_ids,
        diff,
        error: response.error,
      };
      this.history.push(record);
      if (response.ok) {
        this.highlighted = new Set(response.changed_ids);
        this.pendingEdit = "";
        this.setBanner({ kind: "info", text: `changed: ${response.changed_ids.join(", ")}` });
      } else {
        this.highlighted = new Set();
        this.setBanner({ kind: "error", text: response.error ?? "edit failed" });
      }
      return record;
    } finally {
      this.busy = false;
      this.emit();
    }
  }
}
