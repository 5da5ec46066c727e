// Pointer-to-command mapping. The service expects the pusher velocity in the
// slider body frame, so the world-frame error toward the pointer is rotated
// back by the slider angle.

import type { StateVector } from "./protocol.js";

export const POINTER_GAIN = 2.0; // 1/s
export const SPEED_CLAMP = 0.1; // m/s

/** Pusher position in the world frame: slider center plus rotated contact. */
export function pusherWorldPosition(state: StateVector): [number, number] {
  const [x, y, theta, cx, cy] = state;
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  return [x + c * cx - s * cy, y + s * cx + c * cy];
}

/**
 * Proportional command toward the pointer, speed-clamped, expressed in the
 * slider body frame.
 */
export function commandFromPointer(
  pointerWorld: [number, number],
  state: StateVector,
  gain: number = POINTER_GAIN,
  clamp: number = SPEED_CLAMP,
): [number, number] {
  const pusher = pusherWorldPosition(state);
  let vx = gain * (pointerWorld[0] - pusher[0]);
  let vy = gain * (pointerWorld[1] - pusher[1]);
  const speed = Math.hypot(vx, vy);
  if (speed > clamp) {
    vx *= clamp / speed;
    vy *= clamp / speed;
  }
  const theta = state[2];
  const c = Math.cos(theta);
  const s = Math.sin(theta);
  return [c * vx + s * vy, -s * vx + c * vy];
}
