import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import { ApiClient } from "./api.js";
import {
  buildDrawList,
  buildEdgeList,
  fitViewport,
  hitTest,
  renderToCanvas,
  screenToWorld,
} from "./render2d.js";
import { buildBoxGroup, makeCamera, makeScene, upgradeToMeshes } from "./render3d.js";
import { ViewState } from "./state.js";
import type { CameraMode } from "./types.js";

const api = new ApiClient(resolveBaseUrl());
const state = new ViewState(api);

function resolveBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("server") ?? "http://127.0.0.1:8823";
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("plan");
const ctx = canvas.getContext("2d");
const banner = el<HTMLDivElement>("banner");
const tooltip = el<HTMLDivElement>("tooltip");
const historyList = el<HTMLUListElement>("history");
const editInput = el<HTMLInputElement>("edit-input");
const submitButton = el<HTMLButtonElement>("edit-submit");
const modeSelect = el<HTMLSelectElement>("camera-mode");
const edgeToggle = el<HTMLInputElement>("show-constraints");
const threeHost = el<HTMLDivElement>("three-host");

let renderer3d: THREE.WebGLRenderer | null = null;
let controls: OrbitControls | null = null;
let camera: THREE.PerspectiveCamera | null = null;
let scene3d: THREE.Scene | null = null;

function render2d(): void {
  if (!ctx || state.snapshot === null) return;
  const drawList = buildDrawList(state.snapshot, state.selectedId, state.highlighted);
  const vp = fitViewport(drawList, canvas.width, canvas.height);
  const edges = edgeToggle.checked ? buildEdgeList(state.snapshot) : [];
  renderToCanvas(ctx, drawList, vp, edges);
  canvas.onmousemove = (event) => {
    const rect = canvas.getBoundingClientRect();
    const [wx, wy] = screenToWorld(vp, event.clientX - rect.left, event.clientY - rect.top);
    const id = hitTest(drawList, wx, wy);
    if (id !== null) {
      const item = state.snapshot!.scene.items.find((entry) => entry.id === id)!;
      tooltip.textContent = `${item.id} — ${item.name}: ${item.visual_description}`;
      tooltip.style.display = "block";
    } else {
      tooltip.style.display = "none";
    }
  };
  canvas.onclick = (event) => {
    const rect = canvas.getBoundingClientRect();
    const [wx, wy] = screenToWorld(vp, event.clientX - rect.left, event.clientY - rect.top);
    state.select(hitTest(drawList, wx, wy));
  };
}

async function render3d(): Promise<void> {
  if (state.snapshot === null) return;
  if (renderer3d === null) {
    renderer3d = new THREE.WebGLRenderer({ antialias: true });
    renderer3d.setSize(threeHost.clientWidth || 800, 500);
    threeHost.appendChild(renderer3d.domElement);
    camera = makeCamera((threeHost.clientWidth || 800) / 500);
    controls = new OrbitControls(camera, renderer3d.domElement);
    const animate = () => {
      requestAnimationFrame(animate);
      controls?.update();
      if (scene3d && camera && renderer3d) renderer3d.render(scene3d, camera);
    };
    animate();
  }
  const group = buildBoxGroup(state.snapshot, state.highlighted);
  if (state.cameraMode === "orbit-meshes") {
    await upgradeToMeshes(group, state.snapshot, (id) => api.assetUrl(id));
  }
  scene3d = makeScene(group);
}

function renderHistory(): void {
  historyList.innerHTML = "";
  for (const record of [...state.history].reverse()) {
    const entry = document.createElement("li");
    const status = record.ok ? "ok" : "failed";
    const diffText = record.diff
      .map((d) => `${d.kind} ${d.id}${d.detail ? ` (${d.detail})` : ""}`)
      .join("; ");
    entry.textContent = `#${record.seq} [${status}] "${record.instruction}" ${
      record.ok ? `-> ${diffText || "no visible change"}` : `-> ${record.error ?? ""}`
    }`;
    entry.className = record.ok ? "ok" : "failed";
    historyList.appendChild(entry);
  }
}

function renderBanner(): void {
  if (state.banner === null) {
    banner.style.display = "none";
    return;
  }
  banner.style.display = "block";
  banner.textContent = state.banner.text;
  banner.className = state.banner.kind;
}

function renderAll(): void {
  renderBanner();
  renderHistory();
  editInput.value = state.pendingEdit;
  submitButton.disabled = state.busy || state.pendingEdit.trim() === "";
  const topDown = state.cameraMode === "top-down";
  canvas.style.display = topDown ? "block" : "none";
  threeHost.style.display = topDown ? "none" : "block";
  if (topDown) {
    render2d();
  } else {
    void render3d();
  }
  const versionLabel = el<HTMLSpanElement>("version");
  versionLabel.textContent = state.snapshot ? `v${state.snapshot.version}` : "not loaded";
}

state.subscribe(renderAll);

editInput.addEventListener("input", () => {
  state.pendingEdit = editInput.value;
  submitButton.disabled = state.busy || state.pendingEdit.trim() === "";
});
editInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void state.submitEdit();
});
submitButton.addEventListener("click", () => void state.submitEdit());
modeSelect.addEventListener("change", () => {
  state.setCameraMode(modeSelect.value as CameraMode);
});
edgeToggle.addEventListener("change", renderAll);

state
  .refresh()
  .catch((error) =>
    state.setBanner({ kind: "error", text: `cannot reach server: ${error}` }),
  );
