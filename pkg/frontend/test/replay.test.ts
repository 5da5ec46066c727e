import assert from "node:assert/strict";
import { test } from "node:test";

import { frameForElapsed, playbackDurationMs } from "../src/replay.js";

test("scrubber start shows the initial frame", () => {
  assert.deepEqual(frameForElapsed(0, 50, 1, 100), { frame: 0, done: false });
});

test("playback ends on the last frame", () => {
  const r = frameForElapsed(1e9, 50, 1, 100);
  assert.equal(r.frame, 99);
  assert.equal(r.done, true);
});

test("frames advance monotonically", () => {
  let last = -1;
  for (let t = 0; t < 5000; t += 37) {
    const { frame } = frameForElapsed(t, 50, 1, 100);
    assert.ok(frame >= last);
    last = frame;
  }
});

test("double speed halves the wall duration", () => {
  const once = playbackDurationMs(50, 1, 201);
  const twice = playbackDurationMs(50, 2, 201);
  assert.equal(once, 2 * twice);
  assert.equal(once, 10000);
});
