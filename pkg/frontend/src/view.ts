// DOM rendering: the whole chat pane is redrawn from ChatViewState. No
// fetches happen here, so view-only changes (like the act toggle) never
// touch the network.

import type { ChatViewState } from './state.js';

export interface ViewElements {
  messages: HTMLElement;
  contentPanel: HTMLElement;
  banner: HTMLElement;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  actToggle: HTMLInputElement;
  sessionLabel: HTMLElement;
}

export interface ViewHandlers {
  onRetry: (text: string) => void;
}

export function bindElements(root: ParentNode): ViewElements {
  const get = <T extends HTMLElement>(id: string): T => {
    const el = root.querySelector<T>(`#${id}`);
    if (!el) throw new Error(`missing element #${id}`);
    return el;
  };
  return {
    messages: get('messages'),
    contentPanel: get('content-panel'),
    banner: get('banner'),
    input: get<HTMLInputElement>('message-input'),
    sendButton: get<HTMLButtonElement>('send-button'),
    actToggle: get<HTMLInputElement>('act-toggle'),
    sessionLabel: get('session-label'),
  };
}

export function render(state: ChatViewState, els: ViewElements, handlers: ViewHandlers): void {
  els.sessionLabel.textContent = state.sessionId
    ? `session ${state.sessionId} (${state.mode})`
    : 'no session';

  els.banner.textContent = state.error ?? '';
  els.banner.style.display = state.error ? 'block' : 'none';

  els.contentPanel.textContent = state.contentPanel;

  els.messages.replaceChildren();
  for (const message of state.messages) {
    const row = document.createElement('div');
    row.className = `msg ${message.speaker} ${message.status}`;

    if (message.speaker === 'tutor' && message.act) {
      const badge = document.createElement('span');
      badge.className = 'act-badge';
      badge.textContent = message.act;
      badge.style.display = state.showActs ? 'inline-block' : 'none';
      row.appendChild(badge);
    }

    const text = document.createElement('span');
    text.className = 'msg-text';
    text.textContent = message.text;
    row.appendChild(text);

    if (message.status === 'failed') {
      const retry = document.createElement('button');
      retry.className = 'retry-button';
      retry.textContent = 'Retry';
      retry.addEventListener('click', () => handlers.onRetry(message.text));
      row.appendChild(retry);
    }
    els.messages.appendChild(row);
  }
  els.messages.scrollTop = els.messages.scrollHeight;

  const ready = state.sessionId !== null && !state.pending;
  els.input.disabled = !ready;
  els.sendButton.disabled = !ready || !els.input.value.trim();
}
