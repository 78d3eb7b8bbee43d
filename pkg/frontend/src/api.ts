/** Thin typed client over the twin service HTTP API.
 *
 * Reads are plain GETs; the only write paths are decisions and scenario
 * evaluation, each carrying the version the view was rendered from so stale
 * writes surface as conflicts instead of silent overwrites.
 */

import type {
  BufferPayload,
  EvmPayload,
  ForecastPayload,
  ProjectPayload,
  RecommendationsPayload,
  ScenarioResultPayload,
  ScenarioSpec,
  TornadoPayload,
} from "./types.js";

export class ConflictError extends Error {
  constructor(public detail: unknown) {
    super("version conflict");
  }
}

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(`API error ${status}`);
  }
}

async function parse<T>(res: Response): Promise<T> {
  const body = await res.json().catch(() => ({}));
  if (res.status === 409) throw new ConflictError((body as any).detail);
  if (!res.ok) throw new ApiError(res.status, (body as any).detail ?? body);
  return body as T;
}

export class TwinApi {
  constructor(private base: string, private fetchFn: typeof fetch = fetch) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchFn(this.url(path)).then((r) => parse<T>(r));
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => parse<T>(r));
  }

  project(): Promise<ProjectPayload> {
    return this.get("/project");
  }

  forecast(): Promise<ForecastPayload> {
    return this.get("/forecast");
  }

  evm(): Promise<EvmPayload> {
    return this.get("/evm");
  }

  buffers(): Promise<BufferPayload> {
    return this.get("/buffers");
  }

  recommendations(): Promise<RecommendationsPayload> {
    return this.get("/recommendations");
  }

  tornado(): Promise<TornadoPayload> {
    return this.get("/tornado");
  }

  decide(
    actionId: string,
    adopted: boolean,
    reason: string,
    expectedVersion: number,
  ): Promise<{ version: number }> {
    return this.post(`/recommendations/${actionId}/decision`, {
      adopted,
      reason,
      expected_version: expectedVersion,
    });
  }

  evaluateScenario(
    scenario: ScenarioSpec,
    n?: number,
    seed?: number,
  ): Promise<ScenarioResultPayload> {
    return this.post("/scenarios/evaluate", { scenario, n, seed });
  }
}
