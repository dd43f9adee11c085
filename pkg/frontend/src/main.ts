// Wires the start form, the chat pane, and the session service client
// together. Single base-URL setting; everything else comes from the server.

import { ApiError, TutorClient, type ContentTag } from './api.js';
import {
  dropFailedMessage,
  initialState,
  messageSent,
  sendFailed,
  sessionStarted,
  startFailed,
  toggleActs,
  tutorReplied,
  type ChatViewState,
} from './state.js';
import { bindElements, render, type ViewElements } from './view.js';

export interface AppOptions {
  baseUrl?: string;
  now?: () => number;
}

export class ChatApp {
  state: ChatViewState = initialState();
  private client: TutorClient | null = null;
  private els: ViewElements;
  private now: () => number;

  constructor(root: ParentNode, options: AppOptions = {}) {
    this.els = bindElements(root);
    this.now = options.now ?? Date.now;

    const baseInput = root.querySelector<HTMLInputElement>('#base-url');
    if (baseInput && options.baseUrl) baseInput.value = options.baseUrl;

    root.querySelector<HTMLElement>('#start-button')?.addEventListener('click', () => {
      void this.startSession();
    });
    this.els.sendButton.addEventListener('click', () => {
      void this.sendCurrentInput();
    });
    this.els.input.addEventListener('keydown', (event) => {
      if ((event as KeyboardEvent).key === 'Enter') void this.sendCurrentInput();
    });
    this.els.input.addEventListener('input', () => this.redraw());
    this.els.actToggle.addEventListener('change', () => {
      this.state = toggleActs(this.state);
      this.redraw();
    });
    this.redraw();
  }

  private readForm(root: ParentNode = document): {
    baseUrl: string;
    mode: string;
    pack: ContentTag[];
  } {
    const value = (id: string, fallback: string) =>
      (document.querySelector<HTMLInputElement | HTMLSelectElement>(`#${id}`)?.value ?? fallback) ||
      fallback;
    const activityId = value('activity-id', 'Activity1-1');
    const contentText = value('content-text', '');
    return {
      baseUrl: value('base-url', 'http://127.0.0.1:8080'),
      mode: value('mode-select', 'zero-shot'),
      pack: [{ activity_id: activityId, content_text: contentText || null }],
    };
  }

  async startSession(): Promise<void> {
    const { baseUrl, mode, pack } = this.readForm();
    const client = new TutorClient(baseUrl);
    try {
      const created = await client.createSession(pack, mode);
      this.client = client;
      const panel = pack
        .map((t) => (t.content_text ? `[${t.activity_id}] ${t.content_text}` : `[${t.activity_id}]`))
        .join('\n');
      this.state = sessionStarted(
        this.state,
        created.session_id,
        created.mode,
        panel,
        created.opening,
        this.now(),
      );
    } catch (err) {
      // Error banner only; no session state mutation.
      this.state = startFailed(this.state, describe(err));
    }
    this.redraw();
  }

  async sendCurrentInput(): Promise<void> {
    const text = this.els.input.value.trim();
    if (!text) return;
    this.els.input.value = '';
    await this.sendMessage(text);
  }

  async sendMessage(text: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!this.client || !sessionId || this.state.pending) return;
    this.state = messageSent(this.state, text, this.now());
    this.redraw();
    try {
      const reply = await this.client.sendMessage(sessionId, text);
      this.state = tutorReplied(this.state, reply, this.now());
    } catch (err) {
      const hint = err instanceof ApiError && err.status === 409 ? ' (busy; retry shortly)' : '';
      this.state = sendFailed(this.state, describe(err) + hint);
    }
    this.redraw();
  }

  retry(text: string): void {
    this.state = dropFailedMessage(this.state);
    this.redraw();
    void this.sendMessage(text);
  }

  private redraw(): void {
    render(this.state, this.els, { onRetry: (text) => this.retry(text) });
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return `service unreachable: ${err.message}`;
  return String(err);
}

declare global {
  interface Window {
    chatApp?: ChatApp;
  }
}

if (typeof document !== 'undefined' && document.getElementById('messages')) {
  const params = new URLSearchParams(window.location.search);
  window.chatApp = new ChatApp(document, { baseUrl: params.get('base') ?? undefined });
}
