import * as THREE from "three";
import { GLTFLoader } from "three/examples/jsm/loaders/GLTFLoader.js";

import type { SceneSnapshot } from "./types.js";

// The scene frame is Z-up; three.js defaults to Y-up, so cameras built here
// get their up-vector overridden instead of rotating the world.

export function yawToRadians(yawDegrees: number): number {
  // Layout yaw turns -Y toward -X: a negative rotation about +Z in the
  // standard right-handed sense.
  return (-yawDegrees * Math.PI) / 180;
}

export function buildBoxGroup(snapshot: SceneSnapshot, highlighted: Set<string> = new Set()): THREE.Group {
  const group = new THREE.Group();
  group.name = "layout";
  for (const item of snapshot.scene.items) {
    const geometry = new THREE.BoxGeometry(item.size.x, item.size.y, item.size.z);
    const material = new THREE.MeshLambertMaterial({
      color: highlighted.has(item.id) ? 0xffc04d : 0x7fa8cc,
      transparent: true,
      opacity: 0.9,
    });
    const mesh = new THREE.Mesh(geometry, material);
    mesh.name = item.id;
    mesh.position.set(item.position.x, item.position.y, item.position.z);
    mesh.rotation.z = yawToRadians(item.rotation.z);
    group.add(mesh);
  }
  return group;
}

/** Replace the box of every item with a loaded asset where one exists;
 * items whose GLB fails to load keep their box. */
export async function upgradeToMeshes(
  group: THREE.Group,
  snapshot: SceneSnapshot,
  assetUrl: (id: string) => string,
): Promise<void> {
  const loader = new GLTFLoader();
  const jobs = snapshot.scene.items
    .filter((item) => item.asset_ref)
    .map(async (item) => {
      try {
        const gltf = await loader.loadAsync(assetUrl(item.id));
        const placeholder = group.getObjectByName(item.id);
        if (!placeholder) return;
        const wrapper = new THREE.Group();
        wrapper.name = item.id;
        wrapper.position.copy((placeholder as THREE.Mesh).position);
        wrapper.rotation.z = yawToRadians(item.rotation.z);
        wrapper.add(gltf.scene);
        group.remove(placeholder);
        group.add(wrapper);
      } catch {
        // keep the box fallback
      }
    });
  await Promise.all(jobs);
}

export function makeScene(group: THREE.Group): THREE.Scene {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0xf4f4f4);
  const ambient = new THREE.AmbientLight(0xffffff, 0.7);
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(4, -6, 8);
  scene.add(ambient, sun, group);
  const grid = new THREE.GridHelper(20, 20, 0xbbbbbb, 0xdddddd);
  grid.rotation.x = Math.PI / 2; // grid lives in the xy plane (z-up frame)
  scene.add(grid);
  return scene;
}

export function makeCamera(aspect: number): THREE.PerspectiveCamera {
  const camera = new THREE.PerspectiveCamera(55, aspect, 0.1, 200);
  camera.up.set(0, 0, 1);
  camera.position.set(6, -6, 5);
  camera.lookAt(0, 0, 0);
  return camera;
}
