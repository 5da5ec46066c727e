// Typed client for the recorder service. The browser never simulates
// anything; every state transition comes from these endpoints.
async function request(url, init) {
    const res = await fetch(url, init);
    if (!res.ok) {
        let detail = `${res.status}`;
        try {
            const body = (await res.json());
            if (body.detail)
                detail = `${res.status}: ${body.detail}`;
        }
        catch {
            // keep the bare status
        }
        throw new ServiceError(res.status, detail);
    }
    if (res.status === 204)
        return undefined;
    return (await res.json());
}
export class ServiceError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
function post(body) {
    return {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
    };
}
export class RecorderClient {
    base;
    constructor(base = "") {
        this.base = base;
    }
    createSession(face = "Left") {
        return request(`${this.base}/session`, post({ face }));
    }
    step(id, vCmd) {
        return request(`${this.base}/session/${id}/step`, post({ v_cmd: vCmd }));
    }
    switchFace(id, face) {
        return request(`${this.base}/session/${id}/switch-face`, post({ face }));
    }
    finish(id, label) {
        return request(`${this.base}/session/${id}/finish`, post({ label }));
    }
    deleteSession(id) {
        return request(`${this.base}/session/${id}`, { method: "DELETE" });
    }
    listDemos() {
        return request(`${this.base}/demos`);
    }
    getDemo(id) {
        return request(`${this.base}/demos/${id}`);
    }
}
