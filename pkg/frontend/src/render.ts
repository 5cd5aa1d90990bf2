// HTML renderers. Pure string builders so they can be asserted on
// directly; the DOM layer just assigns innerHTML and wires events.

import type { RunView, Suggestion, TimelineRow } from './types.js';
import type { FieldError } from './validation.js';
import { STAGE_SEQUENCE, STAGE_LABELS } from './stages.js';

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
    .replaceAll("'", '&#39;');
}

export function renderFieldErrors(errors: FieldError[]): string {
  if (errors.length === 0) return '';
  const items = errors
    .map((e) => `<li data-field="${escapeHtml(e.field)}">${escapeHtml(e.message)}</li>`)
    .join('');
  return `<ul class="field-errors">${items}</ul>`;
}

export function renderSuggestionDialog(suggestions: Suggestion[]): string {
  const rows = suggestions
    .map(
      (s) => `
      <li class="suggestion" data-pledge-id="${escapeHtml(s.pledge_id)}">
        <span class="score">${s.score.toFixed(2)}</span>
        <span class="claim">${escapeHtml(s.claim)}</span>
        <span class="meta">${escapeHtml(s.speaker)}, ${escapeHtml(s.date_made)}</span>
        <button type="button" class="accept" data-pledge-id="${escapeHtml(s.pledge_id)}">Use previous results</button>
      </li>`,
    )
    .join('');
  return `
    <div class="suggestion-dialog" role="dialog">
      <p>This pledge looks like one already tracked. Reuse its results?</p>
      <ul>${rows}</ul>
      <button type="button" class="decline">Track as new pledge</button>
    </div>`;
}

export function renderStageProgress(view: RunView): string {
  const steps = STAGE_SEQUENCE.map((status, index) => {
    const classes = ['stage'];
    if (index < view.stageIndex) classes.push('complete');
    if (index === view.stageIndex) classes.push('active');
    return `<li class="${classes.join(' ')}">${escapeHtml(STAGE_LABELS[status])}</li>`;
  }).join('');
  const stale = view.stale ? '<span class="badge stale">connection lost, retrying</span>' : '';
  const failed =
    view.status === 'failed'
      ? `<div class="error-banner">Run failed: ${escapeHtml(view.error ?? 'unknown error')}</div>`
      : '';
  return `<ol class="stages" data-status="${escapeHtml(view.status)}">${steps}</ol>${stale}${failed}`;
}

const VERDICT_BADGES: Record<string, string> = {
  not_relevant: 'not relevant',
  relevant_seen: 'seen',
  relevant_update: 'update',
};

function renderRow(row: TimelineRow, index: number): string {
  const filtered = row.filtered ? '<span class="badge filtered">filtered</span>' : '';
  const verdict = row.myVerdict
    ? `<span class="badge verdict verdict-${row.myVerdict}">${VERDICT_BADGES[row.myVerdict]}</span>`
    : '';
  const pending = row.verdictPending ? '<span class="badge pending">queued offline</span>' : '';
  const confidence = row.confidence === null ? '' : ` (${row.confidence.toFixed(2)})`;
  const verdictButtons = (['relevant_update', 'relevant_seen', 'not_relevant'] as const)
    .map(
      (v) =>
        `<button type="button" class="verdict-btn" data-row="${index}" data-verdict="${v}">${VERDICT_BADGES[v]}</button>`,
    )
    .join('');
  return `
    <tr class="event${row.filtered ? ' filtered' : ''}" data-row="${index}">
      <td class="date">${escapeHtml(row.date)}</td>
      <td class="description">${escapeHtml(row.description)}
        ${filtered}${verdict}${pending}</td>
      <td class="source"><a href="${escapeHtml(row.sourceUrl)}" target="_blank" rel="noopener">source</a></td>
      <td class="decision">${escapeHtml(row.decision ?? 'unclassified')}${confidence}</td>
      <td class="verdicts">${verdictButtons}</td>
    </tr>`;
}

export function renderTimelineTable(view: RunView): string {
  if (view.status !== 'done') return '';
  if (view.rows.length === 0) {
    return '<p class="empty">No events found in this monitoring range.</p>';
  }
  const rows = view.rows.map((row, index) => renderRow(row, index)).join('');
  return `
    <table class="timeline">
      <thead><tr><th>date</th><th>event</th><th>source</th><th>decision</th><th>my verdict</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

export function renderRunView(view: RunView): string {
  return `
    <section class="run" data-run-id="${escapeHtml(view.runId)}">
      ${renderStageProgress(view)}
      ${renderTimelineTable(view)}
    </section>`;
}
