// Thin typed client over the pledgewatch HTTP JSON API. The fetch
// implementation is injected so tests can simulate the server.

import type { EventKey, EventRowJson, PledgeFormFields, RunPayload, Suggestion, Verdict } from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

export class NetworkError extends Error {}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = await response.json();
    return new ApiError(response.status, body.code ?? 'error', body.message ?? 'request failed', body.field);
  } catch {
    return new ApiError(response.status, 'error', `request failed with ${response.status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<any> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      throw await parseError(response);
    }
    return response.json();
  }

  async suggestSimilar(claim: string, k = 5): Promise<Suggestion[]> {
    const params = new URLSearchParams({ claim, k: String(k) });
    const body = await this.request(`/pledges/similar?${params.toString()}`);
    return body.suggestions as Suggestion[];
  }

  async createRun(fields: PledgeFormFields, reuseFromRunId?: string): Promise<string> {
    const body = await this.request('/runs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        speaker: fields.speaker,
        date_made: fields.dateMade,
        geo_scope: fields.geoScope,
        claim: fields.claim,
        range: { start: fields.rangeStart, end: fields.rangeEnd },
        options: {
          keep_all: true, // review mode: filtered events stay visible
          reuse_from_run_id: reuseFromRunId ?? null,
        },
      }),
    });
    return body.run_id as string;
  }

  getRun(runId: string): Promise<RunPayload> {
    return this.request(`/runs/${runId}`);
  }

  async getEvents(runId: string): Promise<EventRowJson[]> {
    const body = await this.request(`/runs/${runId}/events`);
    return body.events as EventRowJson[];
  }

  async postFeedback(runId: string, key: EventKey, verdict: Verdict, reviewer: string): Promise<void> {
    await this.request(`/runs/${runId}/feedback`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        description: key.description,
        timestamp: key.timestamp,
        url: key.url,
        verdict,
        reviewer,
      }),
    });
  }
}
