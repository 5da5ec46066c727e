// Typed client for the recorder service. The browser never simulates
// anything; every state transition comes from these endpoints.

export type FaceName = "Left" | "Bottom" | "Right" | "Top";
export type ModeName = "Sticking" | "SlidingUp" | "SlidingDown" | "Separation";

/** Packed system state: [x, y, theta, cx, cy, vn, vt]. */
export type StateVector = [number, number, number, number, number, number, number];

export interface SessionState {
  id: string;
  state: StateVector;
  mode: ModeName;
  face: FaceName;
  steps: number;
  dt: number;
  geometry: { r_s: number; r_p: number };
}

export interface FinishResult {
  demo_id: string;
  reached: [number, number, number];
  switches: number;
  steps: number;
}

export interface DemoSummary {
  id: string;
  label: string;
  reached: [number, number, number];
  switches: number;
  steps: number;
  dt: number;
}

export interface DemoDocument {
  version: number;
  dt: number;
  states: number[][];
  controls: number[][];
  faces: FaceName[];
  switch_times: number[];
  reached: [number, number, number];
  label: string;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = `${res.status}`;
    try {
      const body = (await res.json()) as { detail?: string };
      if (body.detail) detail = `${res.status}: ${body.detail}`;
    } catch {
      // keep the bare status
    }
    throw new ServiceError(res.status, detail);
  }
  if (res.status === 204) return undefined as T;
  return (await res.json()) as T;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class RecorderClient {
  constructor(private base: string = "") {}

  createSession(face: FaceName = "Left"): Promise<SessionState> {
    return request(`${this.base}/session`, post({ face }));
  }

  step(id: string, vCmd: [number, number]): Promise<SessionState> {
    return request(`${this.base}/session/${id}/step`, post({ v_cmd: vCmd }));
  }

  switchFace(id: string, face: FaceName): Promise<SessionState> {
    return request(`${this.base}/session/${id}/switch-face`, post({ face }));
  }

  finish(id: string, label: string): Promise<FinishResult> {
    return request(`${this.base}/session/${id}/finish`, post({ label }));
  }

  deleteSession(id: string): Promise<void> {
    return request(`${this.base}/session/${id}`, { method: "DELETE" });
  }

  listDemos(): Promise<DemoSummary[]> {
    return request(`${this.base}/demos`);
  }

  getDemo(id: string): Promise<DemoDocument> {
    return request(`${this.base}/demos/${id}`);
  }
}
