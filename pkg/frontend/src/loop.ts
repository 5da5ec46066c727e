// Session tick loop. Strictly sequential: a tick is skipped entirely while a
// request is in flight, so step requests never overlap and the server stays
// the single source of truth.

import { RecorderClient, ServiceError } from "./protocol.js";
import type { FaceName, SessionState } from "./protocol.js";

export type CommandSource = (state: SessionState) => [number, number];

export interface LoopEvents {
  onUpdate?: (state: SessionState) => void;
  onPause?: (reason: string) => void;
  onResume?: () => void;
}

export class SessionLoop {
  state: SessionState | null = null;
  paused = false;
  private inflight = false;
  private pendingFace: FaceName | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private client: RecorderClient,
    private commandSource: CommandSource,
    private events: LoopEvents = {},
  ) {}

  async begin(face: FaceName = "Left"): Promise<SessionState> {
    this.state = await this.client.createSession(face);
    this.events.onUpdate?.(this.state);
    return this.state;
  }

  /** Queue a face switch; it is sent before the next step request. */
  requestFaceSwitch(face: FaceName): void {
    this.pendingFace = face;
  }

  resume(): void {
    if (this.paused) {
      this.paused = false;
      this.events.onResume?.();
    }
  }

  /**
   * One loop tick. Returns true when a step was executed, false when skipped
   * (no session, paused, or a request still in flight).
   */
  async tick(): Promise<boolean> {
    if (!this.state || this.paused || this.inflight) return false;
    this.inflight = true;
    try {
      if (this.pendingFace) {
        const face = this.pendingFace;
        this.pendingFace = null;
        try {
          this.state = await this.client.switchFace(this.state.id, face);
          this.events.onUpdate?.(this.state);
        } catch (err) {
          if (err instanceof ServiceError && err.status === 409) {
            // Still in contact; surface through onPause? No: just drop the
            // request, the UI disables the buttons outside separation.
          } else {
            throw err;
          }
        }
      }
      const cmd = this.commandSource(this.state);
      this.state = await this.client.step(this.state.id, cmd);
      this.events.onUpdate?.(this.state);
      return true;
    } catch (err) {
      this.paused = true;
      this.events.onPause?.(err instanceof Error ? err.message : String(err));
      return false;
    } finally {
      this.inflight = false;
    }
  }

  start(intervalMs: number): void {
    this.stop();
    this.timer = setInterval(() => {
      void this.tick();
    }, intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async finish(label: string) {
    if (!this.state) throw new Error("no active session");
    this.stop();
    const result = await this.client.finish(this.state.id, label);
    this.state = null;
    return result;
  }
}
