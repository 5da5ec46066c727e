// Session tick loop. Strictly sequential: a tick is skipped entirely while a
// request is in flight, so step requests never overlap and the server stays
// the single source of truth.
import { ServiceError } from "./protocol.js";
export class SessionLoop {
    client;
    commandSource;
    events;
    state = null;
    paused = false;
    inflight = false;
    pendingFace = null;
    timer = null;
    constructor(client, commandSource, events = {}) {
        this.client = client;
        this.commandSource = commandSource;
        this.events = events;
    }
    async begin(face = "Left") {
        this.state = await this.client.createSession(face);
        this.events.onUpdate?.(this.state);
        return this.state;
    }
    /** Queue a face switch; it is sent before the next step request. */
    requestFaceSwitch(face) {
        this.pendingFace = face;
    }
    resume() {
        if (this.paused) {
            this.paused = false;
            this.events.onResume?.();
        }
    }
    /**
     * One loop tick. Returns true when a step was executed, false when skipped
     * (no session, paused, or a request still in flight).
     */
    async tick() {
        if (!this.state || this.paused || this.inflight)
            return false;
        this.inflight = true;
        try {
            if (this.pendingFace) {
                const face = this.pendingFace;
                this.pendingFace = null;
                try {
                    this.state = await this.client.switchFace(this.state.id, face);
                    this.events.onUpdate?.(this.state);
                }
                catch (err) {
                    if (err instanceof ServiceError && err.status === 409) {
                        // Still in contact; surface through onPause? No: just drop the
                        // request, the UI disables the buttons outside separation.
                    }
                    else {
                        throw err;
                    }
                }
            }
            const cmd = this.commandSource(this.state);
            this.state = await this.client.step(this.state.id, cmd);
            this.events.onUpdate?.(this.state);
            return true;
        }
        catch (err) {
            this.paused = true;
            this.events.onPause?.(err instanceof Error ? err.message : String(err));
            return false;
        }
        finally {
            this.inflight = false;
        }
    }
    start(intervalMs) {
        this.stop();
        this.timer = setInterval(() => {
            void this.tick();
        }, intervalMs);
    }
    stop() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
    }
    async finish(label) {
        if (!this.state)
            throw new Error("no active session");
        this.stop();
        const result = await this.client.finish(this.state.id, label);
        this.state = null;
        return result;
    }
}
