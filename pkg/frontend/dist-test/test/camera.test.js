import assert from "node:assert/strict";
import { test } from "node:test";
import { makeCamera, pixelToWorld, worldToPixel } from "../src/camera.js";
test("world/pixel round trip", () => {
    const cam = makeCamera(640, 480, 0.3);
    for (const [x, y] of [
        [0, 0],
        [0.25, -0.25],
        [-0.1, 0.2],
    ]) {
        const [px, py] = worldToPixel(cam, x, y);
        const [bx, by] = pixelToWorld(cam, px, py);
        assert.ok(Math.abs(bx - x) < 1e-12);
        assert.ok(Math.abs(by - y) < 1e-12);
    }
});
test("origin maps to canvas center and +y points up", () => {
    const cam = makeCamera(640, 480, 0.3);
    assert.deepEqual(worldToPixel(cam, 0, 0), [320, 240]);
    const [, pyUp] = worldToPixel(cam, 0, 0.1);
    assert.ok(pyUp < 240);
});
test("task space fits the canvas", () => {
    const cam = makeCamera(500, 500, 0.3);
    const [px0] = worldToPixel(cam, -0.3, 0);
    const [px1] = worldToPixel(cam, 0.3, 0);
    assert.ok(px0 >= 0 && px1 <= 500);
});
