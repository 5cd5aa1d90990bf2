// Pipeline status to user-facing stage labels, in display order.

import type { RunStatus } from './types.js';

export const STAGE_LABELS: Record<RunStatus, string> = {
  queued: 'queued',
  retrieving: 'retrieving evidence',
  extracting: 'generating timeline',
  filtering: 'identifying fulfilment events',
  done: 'done',
  failed: 'failed',
};

export const STAGE_SEQUENCE: RunStatus[] = [
  'queued',
  'retrieving',
  'extracting',
  'filtering',
  'done',
];

export function stageLabel(status: RunStatus): string {
  return STAGE_LABELS[status] ?? status;
}

export function stageIndex(status: RunStatus): number {
  const index = STAGE_SEQUENCE.indexOf(status);
  return index === -1 ? STAGE_SEQUENCE.length : index;
}

export function isTerminal(status: RunStatus): boolean {
  return status === 'done' || status === 'failed';
}
