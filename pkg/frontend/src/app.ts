// DOM wiring: reads the form, delegates to the controller, renders
// screens, and binds suggestion/verdict buttons.

import { ApiClient } from './api.js';
import { AppController, type Screen } from './controller.js';
import { renderFieldErrors, renderRunView, renderSuggestionDialog } from './render.js';
import type { PledgeFormFields, Suggestion } from './types.js';
import { BrowserStorage } from './verdicts.js';

function fieldValue(form: HTMLFormElement, name: string): string {
  const input = form.elements.namedItem(name) as HTMLInputElement | null;
  return input ? input.value : '';
}

function readForm(form: HTMLFormElement): PledgeFormFields {
  return {
    speaker: fieldValue(form, 'speaker'),
    dateMade: fieldValue(form, 'date_made'),
    geoScope: fieldValue(form, 'geo_scope') || 'UK',
    claim: fieldValue(form, 'claim'),
    rangeStart: fieldValue(form, 'range_start'),
    rangeEnd: fieldValue(form, 'range_end'),
  };
}

export function mountApp(root: HTMLElement, baseUrl = ''): AppController {
  const api = new ApiClient(baseUrl);
  const reviewer = window.localStorage.getItem('pledgewatch.reviewer') ?? 'reviewer';
  const controller = new AppController(api, reviewer, new BrowserStorage());

  const form = root.querySelector('form#pledge-form') as HTMLFormElement;
  const errorsBox = root.querySelector('#form-errors') as HTMLElement;
  const screenBox = root.querySelector('#screen') as HTMLElement;

  let lastFields: PledgeFormFields | null = null;

  controller.onChange((screen: Screen) => {
    if (screen.kind === 'form') {
      errorsBox.innerHTML = renderFieldErrors(screen.errors);
      return;
    }
    errorsBox.innerHTML = '';
    if (screen.kind === 'suggestions') {
      screenBox.innerHTML = renderSuggestionDialog(screen.suggestions);
      screenBox.querySelector('button.decline')?.addEventListener('click', () => {
        void controller.declineSuggestions(screen.fields);
      });
      screenBox.querySelectorAll('button.accept').forEach((button) => {
        button.addEventListener('click', () => {
          const pledgeId = (button as HTMLElement).dataset.pledgeId ?? '';
          const suggestion = screen.suggestions.find((s: Suggestion) => s.pledge_id === pledgeId);
          if (suggestion) void controller.acceptSuggestion(screen.fields, suggestion);
        });
      });
      return;
    }
    screenBox.innerHTML = renderRunView(screen.view);
    screenBox.querySelectorAll('button.verdict-btn').forEach((button) => {
      button.addEventListener('click', () => {
        const el = button as HTMLElement;
        const row = screen.view.rows[Number(el.dataset.row)];
        const verdict = el.dataset.verdict as 'not_relevant' | 'relevant_seen' | 'relevant_update';
        if (row) void controller.submitVerdict(screen.view.runId, row.key, verdict);
      });
    });
  });

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    lastFields = readForm(form);
    void controller.submitForm(lastFields);
  });

  window.addEventListener('online', () => {
    const screen = controller.current();
    void controller.flushOutbox(screen.kind === 'run' ? screen.view.runId : undefined);
  });

  // Reload into the same run after a refresh: state lives in the URL hash.
  controller.onChange((screen) => {
    if (screen.kind === 'run') window.location.hash = screen.view.runId;
  });
  const initial = window.location.hash.replace('#', '');
  if (initial) {
    void controller.refreshView(initial).then((view) => {
      if (view.status !== 'done' && view.status !== 'failed') {
        void controller.pollUntilTerminal(initial);
      }
    });
  }

  return controller;
}
