/** Thin client for the preview server's JSON API. */

import type { ConfigDoc, ModeName, TimelineDoc, ValidationReportDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public report: ValidationReportDoc | null = null
  ) {
    super(message);
  }
}

async function reject(resp: Response): Promise<never> {
  let report: ValidationReportDoc | null = null;
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && Array.isArray(body.issues)) {
      report = body as ValidationReportDoc;
      message = report.issues.map((i) => `${i.path}: ${i.message}`).join("; ") || message;
    } else if (body && body.error) {
      message = String(body.error);
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(message, resp.status, report);
}

export async function getConfig(): Promise<ConfigDoc> {
  const resp = await fetch("/api/config");
  if (!resp.ok) return reject(resp);
  return resp.json();
}

export async function putConfig(config: ConfigDoc): Promise<ConfigDoc> {
  const resp = await fetch("/api/config", {
    method: "PUT",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(config),
  });
  if (!resp.ok) return reject(resp);
  return resp.json();
}

export async function getTimeline(mode: ModeName): Promise<TimelineDoc> {
  const resp = await fetch(`/api/timeline?mode=${encodeURIComponent(mode)}`);
  if (!resp.ok) return reject(resp);
  return resp.json();
}

export async function getVariants(): Promise<Record<ModeName, ConfigDoc>> {
  const resp = await fetch("/api/variants");
  if (!resp.ok) return reject(resp);
  return resp.json();
}
