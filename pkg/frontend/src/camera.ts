// Task-space <-> pixel transform. World y points up, canvas y points down.

export interface Camera {
  scale: number; // pixels per meter
  cx: number; // canvas x of the world origin
  cy: number; // canvas y of the world origin
}

export function makeCamera(width: number, height: number, worldHalfExtent: number): Camera {
  const margin = 0.92;
  const scale = (Math.min(width, height) / 2) * (margin / worldHalfExtent);
  return { scale, cx: width / 2, cy: height / 2 };
}

export function worldToPixel(cam: Camera, x: number, y: number): [number, number] {
  return [cam.cx + x * cam.scale, cam.cy - y * cam.scale];
}

export function pixelToWorld(cam: Camera, px: number, py: number): [number, number] {
  return [(px - cam.cx) / cam.scale, (cam.cy - py) / cam.scale];
}
