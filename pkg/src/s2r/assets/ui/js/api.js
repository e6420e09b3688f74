/** Thin client for the preview server's JSON API. */
export class ApiError extends Error {
    constructor(message, status, report = null) {
        super(message);
        this.status = status;
        this.report = report;
    }
}
async function reject(resp) {
    let report = null;
    let message = `${resp.status} ${resp.statusText}`;
    try {
        const body = await resp.json();
        if (body && Array.isArray(body.issues)) {
            report = body;
            message = report.issues.map((i) => `${i.path}: ${i.message}`).join("; ") || message;
        }
        else if (body && body.error) {
            message = String(body.error);
        }
    }
    catch {
        // non-JSON error body; keep the status line
    }
    throw new ApiError(message, resp.status, report);
}
export async function getConfig() {
    const resp = await fetch("/api/config");
    if (!resp.ok)
        return reject(resp);
    return resp.json();
}
export async function putConfig(config) {
    const resp = await fetch("/api/config", {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(config),
    });
    if (!resp.ok)
        return reject(resp);
    return resp.json();
}
export async function getTimeline(mode) {
    const resp = await fetch(`/api/timeline?mode=${encodeURIComponent(mode)}`);
    if (!resp.ok)
        return reject(resp);
    return resp.json();
}
export async function getVariants() {
    const resp = await fetch("/api/variants");
    if (!resp.ok)
        return reject(resp);
    return resp.json();
}
