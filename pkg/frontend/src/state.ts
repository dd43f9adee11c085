// Pure view state and its transitions. The message list mirrors the server
// transcript order; at most one request is in flight at a time.

export type Speaker = 'student' | 'tutor';
export type MessageStatus = 'ok' | 'pending' | 'failed';

// Student acts are labeled server-side with this default; the client records
// it so the serialized view transcript lines up with the server's export.
export const DEFAULT_STUDENT_ACT = 's.answer.answer';

export interface ChatMessage {
  speaker: Speaker;
  text: string;
  act: string | null;
  timestamp: number;
  status: MessageStatus;
}

export interface ChatViewState {
  sessionId: string | null;
  mode: string;
  messages: ChatMessage[];
  contentPanel: string;
  showActs: boolean;
  pending: boolean;
  error: string | null;
}

export function initialState(): ChatViewState {
  return {
    sessionId: null,
    mode: 'zero-shot',
    messages: [],
    contentPanel: '',
    showActs: false,
    pending: false,
    error: null,
  };
}

export function sessionStarted(
  state: ChatViewState,
  sessionId: string,
  mode: string,
  contentPanel: string,
  opening: { act: string; utterance: string } | undefined,
  now: number,
): ChatViewState {
  const messages: ChatMessage[] = [];
  if (opening) {
    messages.push({
      speaker: 'tutor',
      text: opening.utterance,
      act: opening.act,
      timestamp: now,
      status: 'ok',
    });
  }
  return { ...state, sessionId, mode, contentPanel, messages, pending: false, error: null };
}

export function startFailed(state: ChatViewState, message: string): ChatViewState {
  // No session state is touched; only the banner changes.
  return { ...state, error: message, pending: false };
}

export function messageSent(state: ChatViewState, text: string, now: number): ChatViewState {
  return {
    ...state,
    pending: true,
    error: null,
    messages: [
      ...state.messages,
      { speaker: 'student', text, act: DEFAULT_STUDENT_ACT, timestamp: now, status: 'pending' },
    ],
  };
}

export function tutorReplied(
  state: ChatViewState,
  reply: { act: string; utterance: string },
  now: number,
): ChatViewState {
  const messages = state.messages.map((m, i) =>
    i === state.messages.length - 1 && m.status === 'pending'
      ? { ...m, status: 'ok' as MessageStatus }
      : m,
  );
  messages.push({
    speaker: 'tutor',
    text: reply.utterance,
    act: reply.act,
    timestamp: now,
    status: 'ok',
  });
  return { ...state, messages, pending: false };
}

export function sendFailed(state: ChatViewState, message: string): ChatViewState {
  const messages = state.messages.map((m, i) =>
    i === state.messages.length - 1 && m.status === 'pending'
      ? { ...m, status: 'failed' as MessageStatus }
      : m,
  );
  return { ...state, messages, pending: false, error: message };
}

/** Text of the last failed student message (the retry control resends it). */
export function failedMessageText(state: ChatViewState): string | null {
  const last = state.messages[state.messages.length - 1];
  return last && last.status === 'failed' ? last.text : null;
}

/** Drop the failed trailing message so a retry can resend it cleanly. */
export function dropFailedMessage(state: ChatViewState): ChatViewState {
  const last = state.messages[state.messages.length - 1];
  if (!last || last.status !== 'failed') return state;
  return { ...state, messages: state.messages.slice(0, -1) };
}

export function toggleActs(state: ChatViewState): ChatViewState {
  return { ...state, showActs: !state.showActs };
}

/**
 * Serialize the confirmed exchange in the server's transcript line shape
 * (``speaker: [act]text``). Pending and failed messages are local-only and
 * excluded; the server export additionally carries a session header line and
 * content tags on the first turn.
 */
export function serializeTranscript(state: ChatViewState): string {
  return state.messages
    .filter((m) => m.status === 'ok')
    .map((m) => `${m.speaker}: ${m.act ? `[${m.act}]` : ''}${m.text}`)
    .join('\n');
}
