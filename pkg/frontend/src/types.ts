// Shapes exchanged with the pledgewatch HTTP API, plus view models.

export type RunStatus =
  | 'queued'
  | 'retrieving'
  | 'extracting'
  | 'filtering'
  | 'done'
  | 'failed';

export type Verdict = 'not_relevant' | 'relevant_seen' | 'relevant_update';

export interface PledgeFormFields {
  speaker: string;
  dateMade: string;
  geoScope: string;
  claim: string;
  rangeStart: string;
  rangeEnd: string;
}

export interface Suggestion {
  pledge_id: string;
  claim: string;
  speaker: string;
  date_made: string;
  score: number;
  match: boolean;
}

export interface TimelineEventJson {
  description: string;
  timestamp: string;
  source_url: string;
  decision: 'useful' | 'not_useful';
  confidence: number;
}

export interface RunPayload {
  run_id: string;
  status: RunStatus;
  created_at: string;
  pledge: { id: string; speaker: string; date_made: string; geo_scope: string; claim: string };
  range: { start: string; end: string };
  options: { keep_all?: boolean; order?: string; seed?: number; reuse_from_run_id?: string | null };
  error: string | null;
  timeline?: {
    pledge_id: string;
    range: { start: string; end: string };
    order: string;
    events: TimelineEventJson[];
  };
}

export interface EventRowJson {
  description: string;
  date: string;
  precision: string;
  raw_date_expression: string;
  date_fallback: boolean;
  source_url: string;
  decision: 'useful' | 'not_useful' | null;
  confidence: number | null;
  feedback: { reviewer: string; verdict: Verdict }[];
}

export interface EventKey {
  description: string;
  timestamp: string;
  url: string;
}

export interface TimelineRow {
  key: EventKey;
  date: string;
  description: string;
  sourceUrl: string;
  decision: 'useful' | 'not_useful' | null;
  confidence: number | null;
  filtered: boolean;
  myVerdict: Verdict | null;
  verdictPending: boolean;
}

export interface RunView {
  runId: string;
  status: RunStatus;
  stageLabel: string;
  stageIndex: number;
  error: string | null;
  stale: boolean;
  rows: TimelineRow[];
}
