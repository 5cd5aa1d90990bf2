// Orchestrates the review flow: submit form, confirm or decline pledge
// suggestions, poll run status every 2 s until terminal, reload the view
// from the API on demand, and submit revisable verdicts with an offline
// outbox. DOM-free so the whole flow is testable.

import { ApiClient, NetworkError } from './api.js';
import { buildRunView, rowKeyId } from './runview.js';
import { isTerminal } from './stages.js';
import type {
  EventKey,
  PledgeFormFields,
  RunView,
  Suggestion,
  Verdict,
} from './types.js';
import { validatePledgeForm, type FieldError } from './validation.js';
import { VerdictOutbox, type OutboxStorage, MemoryStorage } from './verdicts.js';

export const POLL_INTERVAL_MS = 2000;

export type Screen =
  | { kind: 'form'; errors: FieldError[] }
  | { kind: 'suggestions'; fields: PledgeFormFields; suggestions: Suggestion[] }
  | { kind: 'run'; view: RunView };

type Listener = (screen: Screen) => void;
type Sleeper = (ms: number) => Promise<void>;

const realSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export class AppController {
  private screen: Screen = { kind: 'form', errors: [] };
  private listeners: Listener[] = [];
  private outbox: VerdictOutbox;
  private lastView: RunView | null = null;

  constructor(
    private api: ApiClient,
    public reviewer: string = 'reviewer',
    storage: OutboxStorage = new MemoryStorage(),
    private sleep: Sleeper = realSleep,
  ) {
    this.outbox = new VerdictOutbox(api, storage);
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  current(): Screen {
    return this.screen;
  }

  private show(screen: Screen): void {
    this.screen = screen;
    for (const listener of this.listeners) listener(screen);
  }

  /** Form submission: validate, look for similar pledges, then create or ask. */
  async submitForm(fields: PledgeFormFields): Promise<void> {
    const errors = validatePledgeForm(fields);
    if (errors.length > 0) {
      this.show({ kind: 'form', errors });
      return;
    }
    let suggestions: Suggestion[] = [];
    try {
      suggestions = await this.api.suggestSimilar(fields.claim);
    } catch {
      suggestions = []; // suggestions are an accelerator, never a blocker
    }
    const matches = suggestions.filter((s) => s.match);
    if (matches.length > 0) {
      this.show({ kind: 'suggestions', fields, suggestions: matches });
      return;
    }
    await this.startRun(fields);
  }

  /** Explicit accept: reuse the matched pledge's cached results. */
  async acceptSuggestion(fields: PledgeFormFields, suggestion: Suggestion, reuseRunId?: string): Promise<void> {
    await this.startRun(fields, reuseRunId);
  }

  /** Explicit decline: track as a fresh pledge. */
  async declineSuggestions(fields: PledgeFormFields): Promise<void> {
    await this.startRun(fields);
  }

  private async startRun(fields: PledgeFormFields, reuseRunId?: string): Promise<void> {
    const runId = await this.api.createRun(fields, reuseRunId);
    await this.refreshView(runId);
    await this.pollUntilTerminal(runId);
  }

  /** Rebuild the run view purely from the API (also the page-refresh path). */
  async refreshView(runId: string): Promise<RunView> {
    const run = await this.api.getRun(runId);
    const events = run.status === 'done' ? await this.api.getEvents(runId) : [];
    const pendingKeys = new Set(
      this.outbox.pending().map((item) => rowKeyId(item.runId, item.key, item.reviewer)),
    );
    const view = buildRunView(run, events, this.reviewer, { pendingKeys });
    this.lastView = view;
    this.show({ kind: 'run', view });
    return view;
  }

  async pollUntilTerminal(runId: string): Promise<RunView> {
    for (;;) {
      let view: RunView;
      try {
        view = await this.refreshView(runId);
      } catch (err) {
        if (err instanceof NetworkError && this.lastView) {
          // keep showing the last data, visibly stale, and retry
          view = { ...this.lastView, stale: true };
          this.lastView = view;
          this.show({ kind: 'run', view });
          await this.sleep(POLL_INTERVAL_MS);
          continue;
        }
        throw err;
      }
      if (isTerminal(view.status)) {
        return view;
      }
      await this.sleep(POLL_INTERVAL_MS);
    }
  }

  /** Submit or revise a verdict; queues it when offline, then reloads the view. */
  async submitVerdict(runId: string, key: EventKey, verdict: Verdict): Promise<boolean> {
    const delivered = await this.outbox.submit({
      runId,
      key,
      verdict,
      reviewer: this.reviewer,
    });
    try {
      await this.refreshView(runId);
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
    }
    return delivered;
  }

  /** Retry queued verdicts (call on reconnect); reloads the view afterwards. */
  async flushOutbox(runId?: string): Promise<number> {
    const delivered = await this.outbox.flush();
    if (runId) {
      try {
        await this.refreshView(runId);
      } catch (err) {
        if (!(err instanceof NetworkError)) throw err;
      }
    }
    return delivered;
  }
}
