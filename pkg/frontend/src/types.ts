// Wire types mirroring the serve API payloads. The viewer never derives
// poses itself: whatever arrives here is what gets drawn.

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface SceneItem {
  id: string;
  name: string;
  position: Vec3;
  rotation: Vec3;
  size: Vec3;
  visual_description: string;
  asset_ref?: string;
}

export interface SceneDocument {
  description?: string;
  style?: string;
  background_ref?: string;
  reference_image?: string;
  items: SceneItem[];
}

export interface PlacementJson {
  position: Vec3;
  yaw: number;
}

export interface ObjectFailureJson {
  object_id: string;
  violated_constraints: number[];
}

export interface SolverReportJson {
  layout: Record<string, PlacementJson>;
  score: number;
  failures: ObjectFailureJson[];
  terminated_by: string;
}

export interface ConstraintJson {
  type: string;
  relation: string;
  source: string;
  target: string;
}

export interface SceneSnapshot {
  version: number;
  scene: SceneDocument;
  placed: string[];
  constraints?: ConstraintJson[];
  report: SolverReportJson | null;
}

export interface EditRequestBody {
  instruction?: string;
  kind?: string;
  focus_id?: string;
  new_spec?: Record<string, unknown>;
  expect_version?: number;
}

export interface EditResponse {
  ok: boolean;
  changed_ids: string[];
  version: number;
  error: string | null;
  warnings: string[];
  report: SolverReportJson | null;
}

export type CameraMode = "top-down" | "orbit-boxes" | "orbit-meshes";
