export interface Finding {
  sentence: string;
  span: [number, number];
  label: string;
  confidence: number;
  distribution: Record<string, number>;
}

export interface ScreenResponse {
  source_digest: string;
  checkpoint_id: string;
  threshold: number;
  findings: Finding[];
}

export interface HealthResponse {
  status: "ready" | "loading";
  checkpoint_id: string | null;
  uptime_seconds: number;
  parallelism: number;
}

export type Transport = (text: string, threshold?: number) => Promise<ScreenResponse>;

export class GatewayError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

/** POST /v1/screen against the configured gateway. */
export function makeTransport(baseUrl: string): Transport {
  return async (text: string, threshold?: number) => {
    const body: Record<string, unknown> = { text };
    if (threshold !== undefined) body.threshold = threshold;
    let response: Response;
    try {
      response = await fetch(`${baseUrl.replace(/\/$/, "")}/v1/screen`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new GatewayError(`gateway unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { error?: string };
        if (payload.error) detail = payload.error;
      } catch {
        // keep the status text
      }
      throw new GatewayError(`screen failed (${response.status}): ${detail}`, response.status);
    }
    return (await response.json()) as ScreenResponse;
  };
}

export async function fetchHealth(baseUrl: string): Promise<HealthResponse> {
  const response = await fetch(`${baseUrl.replace(/\/$/, "")}/v1/health`);
  if (!response.ok) throw new GatewayError(`health failed (${response.status})`, response.status);
  return (await response.json()) as HealthResponse;
}
