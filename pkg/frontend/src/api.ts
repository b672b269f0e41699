/** Thin typed client over the session service. The console performs no
 * retouching math; it only reads and posts what the server defines. */

import { SessionStateDoc } from "./types.js";

export interface ApiError {
  status: number;
  detail: string;
}

export class SessionApi {
  constructor(private readonly baseUrl: string = "",
              private readonly fetchImpl: typeof fetch = fetch) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async json<T>(response: Response): Promise<T> {
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // keep the status text
      }
      throw { status: response.status, detail } satisfies ApiError;
    }
    return response.json() as Promise<T>;
  }

  async createSession(image: Blob, filename: string,
                      instruction?: string): Promise<SessionStateDoc> {
    const form = new FormData();
    form.append("image", image, filename);
    if (instruction) form.append("instruction", instruction);
    const response = await this.fetchImpl(this.url("/api/sessions"), {
      method: "POST",
      body: form,
    });
    return this.json<SessionStateDoc>(response);
  }

  async getSession(sessionId: string): Promise<SessionStateDoc> {
    const response = await this.fetchImpl(this.url(`/api/sessions/${sessionId}`));
    return this.json<SessionStateDoc>(response);
  }

  async postDirection(sessionId: string,
                      direction: { approach_index?: number; text?: string }): Promise<SessionStateDoc> {
    const response = await this.fetchImpl(this.url(`/api/sessions/${sessionId}/direction`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(direction),
    });
    return this.json<SessionStateDoc>(response);
  }

  async run(sessionId: string, mode: "step" | "auto"): Promise<SessionStateDoc> {
    const response = await this.fetchImpl(this.url(`/api/sessions/${sessionId}/run`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ mode }),
    });
    return this.json<SessionStateDoc>(response);
  }

  async uploadReference(sessionId: string, image: Blob, filename: string,
                        paramsJson?: string): Promise<{ directive: string }> {
    const form = new FormData();
    form.append("image", image, filename);
    if (paramsJson) form.append("params", paramsJson);
    const response = await this.fetchImpl(this.url(`/api/sessions/${sessionId}/reference`), {
      method: "POST",
      body: form,
    });
    return this.json<{ directive: string }>(response);
  }

  iterationImageUrl(sessionId: string, index: number): string {
    return this.url(`/api/sessions/${sessionId}/iterations/${index}/image`);
  }

  iterationHistogramUrl(sessionId: string, index: number): string {
    return this.url(`/api/sessions/${sessionId}/iterations/${index}/histogram`);
  }

  sourceImageUrl(sessionId: string): string {
    // the source is iteration 0 conceptually; served from the session store
    return this.url(`/api/sessions/${sessionId}/source`);
  }

  eventsUrl(sessionId: string): string {
    return this.url(`/api/sessions/${sessionId}/events`);
  }
}

export function isApiError(err: unknown): err is ApiError {
  return typeof err === "object" && err !== null && "status" in err && "detail" in err;
}
