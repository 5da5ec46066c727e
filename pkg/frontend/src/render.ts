// Canvas rendering of the pushing scene. Colored edges mark the faces; the
// active one is highlighted. Everything drawn comes from the last server
// state, never from client-side simulation.

import { Camera, worldToPixel } from "./camera.js";
import { pusherWorldPosition } from "./input.js";
import type { FaceName, StateVector } from "./protocol.js";

export const FACE_COLORS: Record<FaceName, string> = {
  Left: "#e4574c",
  Bottom: "#53a7e0",
  Right: "#67c587",
  Top: "#e0b453",
};

export interface Scene {
  state: StateVector;
  face: FaceName;
  target: [number, number, number] | null;
  rS: number;
  rP: number;
  recording: boolean;
}

// Face edges in the slider body frame: [from, to] corners per face label.
function faceEdge(face: FaceName, r: number): [number, number][] {
  switch (face) {
    case "Left":
      return [
        [-r, -r],
        [-r, r],
      ];
    case "Right":
      return [
        [r, -r],
        [r, r],
      ];
    case "Top":
      return [
        [-r, r],
        [r, r],
      ];
    case "Bottom":
      return [
        [-r, -r],
        [r, -r],
      ];
  }
}

function bodyToWorld(state: StateVector, bx: number, by: number): [number, number] {
  const [x, y, theta] = state;
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  return [x + c * bx - s * by, y + s * bx + c * by];
}

export function drawScene(ctx: CanvasRenderingContext2D, cam: Camera, scene: Scene): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);

  // Task-space boundary.
  ctx.strokeStyle = "#3a4150";
  ctx.lineWidth = 1;
  const [bx0, by0] = worldToPixel(cam, -0.25, 0.25);
  const [bx1, by1] = worldToPixel(cam, 0.25, -0.25);
  ctx.strokeRect(bx0, by0, bx1 - bx0, by1 - by0);

  // Target marker.
  if (scene.target) {
    const [tx, ty, tth] = scene.target;
    const [px, py] = worldToPixel(cam, tx, ty);
    ctx.strokeStyle = "#f2c14e";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(px, py, 7, 0, 2 * Math.PI);
    ctx.moveTo(px, py);
    ctx.lineTo(px + 14 * Math.cos(tth), py - 14 * Math.sin(tth));
    ctx.stroke();
  }

  // Slider body.
  const r = scene.rS;
  const corners: [number, number][] = [
    [-r, -r],
    [r, -r],
    [r, r],
    [-r, r],
  ];
  ctx.beginPath();
  corners.forEach(([bx, by], i) => {
    const [px, py] = worldToPixel(cam, ...bodyToWorld(scene.state, bx, by));
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.closePath();
  ctx.fillStyle = "#242b38";
  ctx.fill();
  ctx.strokeStyle = "#8a93a6";
  ctx.lineWidth = 1.5;
  ctx.stroke();

  // Face edges, active one emphasized.
  for (const face of ["Left", "Bottom", "Right", "Top"] as FaceName[]) {
    const [a, b] = faceEdge(face, r);
    const [ax, ay] = worldToPixel(cam, ...bodyToWorld(scene.state, a[0], a[1]));
    const [bx, by] = worldToPixel(cam, ...bodyToWorld(scene.state, b[0], b[1]));
    ctx.strokeStyle = FACE_COLORS[face];
    ctx.globalAlpha = face === scene.face ? 1.0 : 0.25;
    ctx.lineWidth = face === scene.face ? 4 : 2;
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
  }
  ctx.globalAlpha = 1.0;

  // Pusher disc.
  const [ux, uy] = pusherWorldPosition(scene.state);
  const [px, py] = worldToPixel(cam, ux, uy);
  ctx.beginPath();
  ctx.arc(px, py, Math.max(scene.rP * cam.scale, 3), 0, 2 * Math.PI);
  ctx.fillStyle = scene.recording ? "#e4574c" : "#c9d1e0";
  ctx.fill();
}
