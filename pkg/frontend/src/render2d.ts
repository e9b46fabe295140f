import type { SceneSnapshot } from "./types.js";

// Top-down floor plan: world +X is screen right, world +Y (backward) is
// screen down, so an object's forward (-Y) points up the page.

export interface BoxPrimitive {
  id: string;
  name: string;
  description: string;
  x: number; // world center, straight from the snapshot
  y: number;
  width: number; // size.x
  depth: number; // size.y
  yaw: number; // rotation.z, degrees
  placed: boolean;
  selected: boolean;
  highlighted: boolean;
  hasAsset: boolean;
}

export function buildDrawList(
  snapshot: SceneSnapshot,
  selectedId: string | null = null,
  highlighted: Set<string> = new Set(),
): BoxPrimitive[] {
  const placed = new Set(snapshot.placed);
  return snapshot.scene.items.map((item) => ({
    id: item.id,
    name: item.name,
    description: item.visual_description,
    x: item.position.x,
    y: item.position.y,
    width: item.size.x,
    depth: item.size.y,
    yaw: item.rotation.z,
    placed: placed.has(item.id),
    selected: item.id === selectedId,
    highlighted: highlighted.has(item.id),
    hasAsset: Boolean(item.asset_ref),
  }));
}

export interface EdgePrimitive {
  sourceId: string;
  targetId: string;
  relation: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/** Constraint edges as source-center -> target-center segments; constraints
 * whose endpoints are missing from the scene are skipped. */
export function buildEdgeList(snapshot: SceneSnapshot): EdgePrimitive[] {
  const byId = new Map(snapshot.scene.items.map((item) => [item.id, item]));
  const edges: EdgePrimitive[] = [];
  for (const constraint of snapshot.constraints ?? []) {
    const source = byId.get(constraint.source);
    const target = byId.get(constraint.target);
    if (!source || !target) continue;
    edges.push({
      sourceId: constraint.source,
      targetId: constraint.target,
      relation: constraint.relation,
      x1: source.position.x,
      y1: source.position.y,
      x2: target.position.x,
      y2: target.position.y,
    });
  }
  return edges;
}

/** Point-in-oriented-rectangle test in world coordinates; returns the last
 * (topmost-drawn) hit so small stacked objects win over their bases. */
export function hitTest(drawList: BoxPrimitive[], wx: number, wy: number): string | null {
  let hit: string | null = null;
  for (const box of drawList) {
    const t = (box.yaw * Math.PI) / 180;
    const dx = wx - box.x;
    const dy = wy - box.y;
    // The layout yaw maps body +x to world R(-yaw); invert with R(+yaw).
    const lx = dx * Math.cos(t) - dy * Math.sin(t);
    const ly = dx * Math.sin(t) + dy * Math.cos(t);
    if (Math.abs(lx) <= box.width / 2 && Math.abs(ly) <= box.depth / 2) {
      hit = box.id;
    }
  }
  return hit;
}

export interface Viewport {
  canvasWidth: number;
  canvasHeight: number;
  scale: number; // pixels per meter
  centerX: number; // world point mapped to the canvas center
  centerY: number;
}

export function fitViewport(
  drawList: BoxPrimitive[],
  canvasWidth: number,
  canvasHeight: number,
  margin = 1.0,
): Viewport {
  if (drawList.length === 0) {
    return { canvasWidth, canvasHeight, scale: 50, centerX: 0, centerY: 0 };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const box of drawList) {
    const reach = Math.max(box.width, box.depth) / 2;
    minX = Math.min(minX, box.x - reach);
    maxX = Math.max(maxX, box.x + reach);
    minY = Math.min(minY, box.y - reach);
    maxY = Math.max(maxY, box.y + reach);
  }
  const spanX = maxX - minX + 2 * margin;
  const spanY = maxY - minY + 2 * margin;
  return {
    canvasWidth,
    canvasHeight,
    scale: Math.min(canvasWidth / spanX, canvasHeight / spanY),
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
  };
}

export function worldToScreen(vp: Viewport, wx: number, wy: number): [number, number] {
  return [
    vp.canvasWidth / 2 + (wx - vp.centerX) * vp.scale,
    vp.canvasHeight / 2 + (wy - vp.centerY) * vp.scale,
  ];
}

export function screenToWorld(vp: Viewport, sx: number, sy: number): [number, number] {
  return [
    vp.centerX + (sx - vp.canvasWidth / 2) / vp.scale,
    vp.centerY + (sy - vp.canvasHeight / 2) / vp.scale,
  ];
}

export function renderToCanvas(
  ctx: CanvasRenderingContext2D,
  drawList: BoxPrimitive[],
  vp: Viewport,
  edges: EdgePrimitive[] = [],
): void {
  ctx.clearRect(0, 0, vp.canvasWidth, vp.canvasHeight);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, vp.canvasWidth, vp.canvasHeight);
  for (const edge of edges) {
    const [x1, y1] = worldToScreen(vp, edge.x1, edge.y1);
    const [x2, y2] = worldToScreen(vp, edge.x2, edge.y2);
    ctx.strokeStyle = "#b08cc4";
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = "#7d5a96";
    ctx.font = "10px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(edge.relation, (x1 + x2) / 2, (y1 + y2) / 2 - 3);
  }
  for (const box of drawList) {
    const [sx, sy] = worldToScreen(vp, box.x, box.y);
    ctx.save();
    ctx.translate(sx, sy);
    // world yaw turns -Y toward -X; with +Y drawn downward this is a
    // negative canvas rotation
    ctx.rotate((-box.yaw * Math.PI) / 180);
    const w = box.width * vp.scale;
    const d = box.depth * vp.scale;
    ctx.fillStyle = box.highlighted ? "#ffe08a" : box.placed ? "#cfe3f7" : "#e8e8e8";
    ctx.strokeStyle = box.selected ? "#d8431f" : "#4a6b8a";
    ctx.lineWidth = box.selected ? 3 : 1.5;
    ctx.fillRect(-w / 2, -d / 2, w, d);
    ctx.strokeRect(-w / 2, -d / 2, w, d);
    // forward tick: -Y in body frame (up the page before rotation)
    ctx.beginPath();
    ctx.moveTo(0, 0);
    ctx.lineTo(0, -d / 2);
    ctx.stroke();
    ctx.restore();
    ctx.fillStyle = "#333";
    ctx.font = "11px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(box.id, sx, sy + 4);
  }
}
