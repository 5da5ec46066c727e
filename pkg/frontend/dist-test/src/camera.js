// Task-space <-> pixel transform. World y points up, canvas y points down.
export function makeCamera(width, height, worldHalfExtent) {
    const margin = 0.92;
    const scale = (Math.min(width, height) / 2) * (margin / worldHalfExtent);
    return { scale, cx: width / 2, cy: height / 2 };
}
export function worldToPixel(cam, x, y) {
    return [cam.cx + x * cam.scale, cam.cy - y * cam.scale];
}
export function pixelToWorld(cam, px, py) {
    return [(px - cam.cx) / cam.scale, (cam.cy - py) / cam.scale];
}
