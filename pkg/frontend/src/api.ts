// Thin typed client over the session service HTTP interface. All tutoring
// logic (act selection, generation) happens server-side; this file only
// moves JSON.

export interface ContentTag {
  activity_id: string;
  content_text?: string | null;
}

export interface OpeningStep {
  act: string;
  utterance: string;
}

export interface CreateSessionResponse {
  session_id: string;
  mode: string;
  opening?: OpeningStep;
}

export interface TutorReply {
  act: string;
  utterance: string;
  attempts?: number;
}

export interface ActInfo {
  id: string;
  role: string;
  category: string;
  description: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function readDetail(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (body && typeof body.detail === 'string') return body.detail;
  } catch {
    // non-JSON error body; fall through
  }
  return `HTTP ${resp.status}`;
}

export class TutorClient {
  constructor(private baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      headers: { 'Content-Type': 'application/json' },
      ...init,
    });
    if (!resp.ok) throw new ApiError(resp.status, await readDetail(resp));
    return (await resp.json()) as T;
  }

  createSession(
    contentPack: ContentTag[],
    mode: string,
    openWithTutor = false,
  ): Promise<CreateSessionResponse> {
    return this.json<CreateSessionResponse>('/sessions', {
      method: 'POST',
      body: JSON.stringify({
        content_pack: contentPack,
        mode,
        open_with_tutor: openWithTutor,
      }),
    });
  }

  sendMessage(sessionId: string, text: string, act?: string): Promise<TutorReply> {
    return this.json<TutorReply>(`/sessions/${sessionId}/messages`, {
      method: 'POST',
      body: JSON.stringify(act ? { text, act } : { text }),
    });
  }

  async fetchTranscript(sessionId: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/sessions/${sessionId}/transcript`);
    if (!resp.ok) throw new ApiError(resp.status, await readDetail(resp));
    return resp.status === 204 ? '' : await resp.text();
  }

  fetchActs(): Promise<ActInfo[]> {
    return this.json<ActInfo[]>('/acts');
  }

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(this.baseUrl + '/healthz');
      return resp.ok;
    } catch {
      return false;
    }
  }
}
