// Verdict submission with an offline outbox: failed posts queue locally
// and flush on the next opportunity, so a dropped connection never loses
// a reviewer's work.

import { ApiClient, NetworkError } from './api.js';
import type { EventKey, Verdict } from './types.js';

export interface QueuedVerdict {
  runId: string;
  key: EventKey;
  verdict: Verdict;
  reviewer: string;
}

export interface OutboxStorage {
  load(): QueuedVerdict[];
  save(items: QueuedVerdict[]): void;
}

export class MemoryStorage implements OutboxStorage {
  private items: QueuedVerdict[] = [];
  load(): QueuedVerdict[] {
    return [...this.items];
  }
  save(items: QueuedVerdict[]): void {
    this.items = [...items];
  }
}

export class BrowserStorage implements OutboxStorage {
  constructor(private storageKey = 'pledgewatch.verdict-outbox') {}
  load(): QueuedVerdict[] {
    try {
      return JSON.parse(window.localStorage.getItem(this.storageKey) ?? '[]');
    } catch {
      return [];
    }
  }
  save(items: QueuedVerdict[]): void {
    window.localStorage.setItem(this.storageKey, JSON.stringify(items));
  }
}

function sameTarget(a: QueuedVerdict, b: QueuedVerdict): boolean {
  return (
    a.runId === b.runId &&
    a.reviewer === b.reviewer &&
    a.key.description === b.key.description &&
    a.key.timestamp === b.key.timestamp &&
    a.key.url === b.key.url
  );
}

export class VerdictOutbox {
  constructor(
    private api: ApiClient,
    private storage: OutboxStorage = new MemoryStorage(),
  ) {}

  pending(): QueuedVerdict[] {
    return this.storage.load();
  }

  isPending(runId: string, key: EventKey, reviewer: string): boolean {
    const probe: QueuedVerdict = { runId, key, verdict: 'relevant_seen', reviewer };
    return this.storage.load().some((item) => sameTarget(item, probe));
  }

  /** Submit now; on network loss queue for a later flush. Returns true when delivered. */
  async submit(item: QueuedVerdict): Promise<boolean> {
    try {
      await this.api.postFeedback(item.runId, item.key, item.verdict, item.reviewer);
      return true;
    } catch (err) {
      if (err instanceof NetworkError) {
        const queue = this.storage.load().filter((existing) => !sameTarget(existing, item));
        queue.push(item); // one active verdict per (run, event, reviewer)
        this.storage.save(queue);
        return false;
      }
      throw err;
    }
  }

  /** Retry everything queued; items that still fail stay queued. */
  async flush(): Promise<number> {
    const queue = this.storage.load();
    const remaining: QueuedVerdict[] = [];
    let delivered = 0;
    for (const item of queue) {
      try {
        await this.api.postFeedback(item.runId, item.key, item.verdict, item.reviewer);
        delivered += 1;
      } catch (err) {
        if (err instanceof NetworkError) {
          remaining.push(item);
        }
        // API-level rejections (e.g. unknown event) are dropped, not retried forever
      }
    }
    this.storage.save(remaining);
    return delivered;
  }
}
