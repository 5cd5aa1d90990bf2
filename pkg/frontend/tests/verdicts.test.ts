import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { MemoryStorage, VerdictOutbox } from '../src/verdicts.js';
import { FakeServer } from './fakeserver.js';

const FIELDS = {
  speaker: 'Labour',
  dateMade: '2024-07-04',
  geoScope: 'UK',
  claim: 'We will ban trail hunting',
  rangeStart: '2024-07-05',
  rangeEnd: '2024-09-30',
};

const KEY = {
  description: 'A consultation on the ban is launched.',
  timestamp: '2024-08-21',
  url: 'https://example.org/consultation',
};

async function setup() {
  const server = new FakeServer({ statusScript: ['done'] });
  const api = new ApiClient('', server.fetch);
  const runId = await api.createRun(FIELDS);
  await api.getRun(runId);
  const outbox = new VerdictOutbox(api, new MemoryStorage());
  return { server, api, runId, outbox };
}

describe('VerdictOutbox', () => {
  it('delivers immediately when online', async () => {
    const { server, runId, outbox } = await setup();
    const delivered = await outbox.submit({
      runId,
      key: KEY,
      verdict: 'relevant_update',
      reviewer: 'nasim',
    });
    expect(delivered).toBe(true);
    expect(outbox.pending()).toHaveLength(0);
    expect([...server.feedback.get(runId)!.values()]).toEqual([
      { reviewer: 'nasim', verdict: 'relevant_update' },
    ]);
  });

  it('queues when offline and flushes on reconnect', async () => {
    const { server, runId, outbox } = await setup();
    server.offline = true;
    const delivered = await outbox.submit({
      runId,
      key: KEY,
      verdict: 'relevant_seen',
      reviewer: 'nasim',
    });
    expect(delivered).toBe(false);
    expect(outbox.pending()).toHaveLength(1);
    expect(outbox.isPending(runId, KEY, 'nasim')).toBe(true);

    server.offline = false;
    const flushed = await outbox.flush();
    expect(flushed).toBe(1);
    expect(outbox.pending()).toHaveLength(0);
    expect([...server.feedback.get(runId)!.values()]).toEqual([
      { reviewer: 'nasim', verdict: 'relevant_seen' },
    ]);
  });

  it('keeps a single queued verdict per event and reviewer', async () => {
    const { server, runId, outbox } = await setup();
    server.offline = true;
    await outbox.submit({ runId, key: KEY, verdict: 'relevant_seen', reviewer: 'nasim' });
    await outbox.submit({ runId, key: KEY, verdict: 'not_relevant', reviewer: 'nasim' });
    expect(outbox.pending()).toHaveLength(1);
    expect(outbox.pending()[0].verdict).toBe('not_relevant');
  });

  it('drops permanently rejected items instead of retrying forever', async () => {
    const { server, runId, outbox } = await setup();
    server.offline = true;
    await outbox.submit({
      runId,
      key: { ...KEY, description: 'fabricated event' },
      verdict: 'relevant_seen',
      reviewer: 'nasim',
    });
    server.offline = false;
    const flushed = await outbox.flush();
    expect(flushed).toBe(0);
    expect(outbox.pending()).toHaveLength(0);
  });
});
