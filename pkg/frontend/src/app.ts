// Recorder application: wires pointer input, the session loop, rendering,
// the demo list, and replay together.

import { makeCamera, pixelToWorld } from "./camera.js";
import { commandFromPointer } from "./input.js";
import { SessionLoop } from "./loop.js";
import { RecorderClient } from "./protocol.js";
import type { DemoDocument, DemoSummary, FaceName, SessionState, StateVector } from "./protocol.js";
import { frameForElapsed } from "./replay.js";
import { drawScene } from "./render.js";

const FACES: FaceName[] = ["Left", "Bottom", "Right", "Top"];
const FACE_KEYS: Record<string, FaceName> = { "1": "Left", "2": "Bottom", "3": "Right", "4": "Top" };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d")!;
const cam = makeCamera(canvas.width, canvas.height, 0.3);

const modeBadge = el<HTMLSpanElement>("mode-badge");
const faceBadge = el<HTMLSpanElement>("face-badge");
const stepCounter = el<HTMLSpanElement>("step-counter");
const banner = el<HTMLDivElement>("banner");
const recordBtn = el<HTMLButtonElement>("record-btn");
const labelInput = el<HTMLInputElement>("label-input");
const demoList = el<HTMLUListElement>("demo-list");
const replaySpeed = el<HTMLSelectElement>("replay-speed");
const scrubber = el<HTMLInputElement>("scrubber");
const faceButtons = new Map<FaceName, HTMLButtonElement>(
  FACES.map((f) => [f, el<HTMLButtonElement>(`face-${f.toLowerCase()}`)]),
);

const client = new RecorderClient("");
let pointerWorld: [number, number] | null = null;
let target: [number, number, number] | null = null;
let replay: { doc: DemoDocument; startedAt: number; playing: boolean; frame: number } | null = null;

const loop = new SessionLoop(
  client,
  (state: SessionState) => {
    if (!pointerWorld) return [0, 0];
    return commandFromPointer(pointerWorld, state.state);
  },
  {
    onUpdate: (state) => {
      modeBadge.textContent = state.mode;
      modeBadge.dataset.mode = state.mode;
      faceBadge.textContent = state.face;
      stepCounter.textContent = `${state.steps}`;
      const separated = state.mode === "Separation";
      faceButtons.forEach((btn, face) => {
        btn.disabled = !separated || face === state.face;
      });
      render(state.state, state.face, true, state.geometry.r_s, state.geometry.r_p);
    },
    onPause: (reason) => {
      banner.textContent = `connection lost (${reason}); recording paused — retrying...`;
      banner.hidden = false;
      setTimeout(() => {
        loop.resume();
      }, 1000);
    },
    onResume: () => {
      banner.hidden = true;
    },
  },
);

function render(state: StateVector, face: FaceName, recording: boolean, rS = 0.06, rP = 0.005) {
  drawScene(ctx, cam, { state, face, target, rS, rP, recording });
}

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  pointerWorld = pixelToWorld(cam, ev.clientX - rect.left, ev.clientY - rect.top);
});
canvas.addEventListener("pointerleave", () => {
  pointerWorld = null;
});
canvas.addEventListener("contextmenu", (ev) => {
  // Right click drops a target marker (visual aid only).
  ev.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const [x, y] = pixelToWorld(cam, ev.clientX - rect.left, ev.clientY - rect.top);
  target = [x, y, 0];
});

faceButtons.forEach((btn, face) => {
  btn.style.borderColor = "";
  btn.addEventListener("click", () => loop.requestFaceSwitch(face));
});

async function startRecording() {
  replay = null;
  await loop.begin("Left");
  loop.start((loop.state?.dt ?? 0.05) * 1000);
  recordBtn.textContent = "finish recording";
}

async function stopRecording() {
  const label = labelInput.value || `recording-${new Date().toISOString().slice(11, 19)}`;
  try {
    const result = await loop.finish(label);
    banner.hidden = false;
    banner.textContent =
      `saved ${result.demo_id}: reached (${result.reached.map((v) => v.toFixed(3)).join(", ")}), ` +
      `${result.switches} switch(es)`;
    await refreshDemos();
  } finally {
    recordBtn.textContent = "start recording";
  }
}

recordBtn.addEventListener("click", () => {
  if (loop.state) void stopRecording();
  else void startRecording();
});

window.addEventListener("keydown", (ev) => {
  if (ev.key === " ") {
    ev.preventDefault();
    recordBtn.click();
  }
  const face = FACE_KEYS[ev.key];
  if (face && loop.state) loop.requestFaceSwitch(face);
});

async function refreshDemos() {
  const demos = await client.listDemos();
  demoList.innerHTML = "";
  demos.forEach((demo: DemoSummary) => {
    const li = document.createElement("li");
    const pose = demo.reached.map((v) => v.toFixed(3)).join(", ");
    li.textContent = `${demo.id} [${demo.label}] -> (${pose}) N_s=${demo.switches} `;
    const btn = document.createElement("button");
    btn.textContent = "replay";
    btn.addEventListener("click", () => void startReplay(demo.id));
    li.appendChild(btn);
    demoList.appendChild(li);
  });
}

async function startReplay(id: string) {
  const doc = await client.getDemo(id);
  replay = { doc, startedAt: performance.now(), playing: true, frame: 0 };
  scrubber.max = `${doc.states.length - 1}`;
}

scrubber.addEventListener("input", () => {
  if (!replay) return;
  replay.playing = false;
  replay.frame = Number(scrubber.value);
});

function animate() {
  requestAnimationFrame(animate);
  if (!replay) return;
  const doc = replay.doc;
  if (replay.playing) {
    const speed = Number(replaySpeed.value);
    const { frame, done } = frameForElapsed(
      performance.now() - replay.startedAt,
      doc.dt * 1000,
      speed,
      doc.states.length,
    );
    replay.frame = frame;
    if (done) replay.playing = false;
    scrubber.value = `${frame}`;
  }
  const state = doc.states[replay.frame] as StateVector;
  const faceIdx = Math.min(replay.frame, doc.faces.length - 1);
  render(state, doc.faces[faceIdx], false);
}

void refreshDemos();
animate();
