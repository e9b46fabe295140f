import type { SceneDocument, SceneItem, Vec3 } from "./types.js";

export type DiffKind = "added" | "removed" | "moved" | "resized" | "restyled";

export interface DiffEntry {
  id: string;
  kind: DiffKind;
  detail: string;
}

function vecEqual(a: Vec3, b: Vec3): boolean {
  return a.x === b.x && a.y === b.y && a.z === b.z;
}

function fmt(v: Vec3): string {
  return `(${v.x.toFixed(2)}, ${v.y.toFixed(2)}, ${v.z.toFixed(2)})`;
}

function describeChange(before: SceneItem, after: SceneItem): DiffEntry | null {
  if (!vecEqual(before.position, after.position) || !vecEqual(before.rotation, after.rotation)) {
    return {
      id: after.id,
      kind: "moved",
      detail: `${fmt(before.position)} -> ${fmt(after.position)}, yaw ${before.rotation.z} -> ${after.rotation.z}`,
    };
  }
  if (!vecEqual(before.size, after.size)) {
    return { id: after.id, kind: "resized", detail: `${fmt(before.size)} -> ${fmt(after.size)}` };
  }
  if (
    before.asset_ref !== after.asset_ref ||
    before.visual_description !== after.visual_description
  ) {
    return { id: after.id, kind: "restyled", detail: "asset or description changed" };
  }
  return null;
}

/** Exact comparison of two scene documents; no tolerance, no interpretation. */
export function diffScenes(before: SceneDocument, after: SceneDocument): DiffEntry[] {
  const entries: DiffEntry[] = [];
  const beforeById = new Map(before.items.map((item) => [item.id, item]));
  const afterById = new Map(after.items.map((item) => [item.id, item]));
  for (const item of before.items) {
    if (!afterById.has(item.id)) {
      entries.push({ id: item.id, kind: "removed", detail: item.name });
    }
  }
  for (const item of after.items) {
    const previous = beforeById.get(item.id);
    if (previous === undefined) {
      entries.push({ id: item.id, kind: "added", detail: item.name });
      continue;
    }
    const change = describeChange(previous, item);
    if (change !== null) {
      entries.push(change);
    }
  }
  return entries;
}
