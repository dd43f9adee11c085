// @vitest-environment happy-dom
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ChatApp } from '../src/main.js';
import { serializeTranscript } from '../src/state.js';
import { MockTutorServer, unreachableFetch, type ScriptStep } from './mockServer.js';

const HERE = dirname(fileURLToPath(import.meta.url));

const SCRIPT: ScriptStep[] = [
  { act: 't.assess.display_question', utterance: 'Activity1-1을 볼까요? 답이 몇번일까요?' },
  { act: 't.teach.direct_answer', utterance: '맞아요. navigate 가 정답입니다.' },
  { act: 't.engage.encourage', utterance: '너무 좋아요. 잘하셨어요.' },
];

function mountDom(): void {
  const html = readFileSync(join(HERE, '..', 'index.html'), 'utf-8');
  document.body.innerHTML = html.replace(/^[\s\S]*<body>/, '').replace(/<\/body>[\s\S]*$/, '');
}

function messageRows(): { speaker: string; text: string }[] {
  return Array.from(document.querySelectorAll('#messages .msg')).map((el) => ({
    speaker: el.classList.contains('student') ? 'student' : 'tutor',
    text: el.querySelector('.msg-text')?.textContent ?? '',
  }));
}

async function startedApp(server: MockTutorServer): Promise<ChatApp> {
  vi.stubGlobal('fetch', server.fetch);
  const app = new ChatApp(document);
  await app.startSession();
  return app;
}

describe('web chat client', () => {
  beforeEach(() => {
    mountDom();
  });

  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it('renders a three-message exchange in transcript order', async () => {
    const server = new MockTutorServer(SCRIPT);
    const app = await startedApp(server);
    expect(app.state.sessionId).toBe('mock-1');

    await app.sendMessage('네 준비됐습니다');
    await app.sendMessage('navigate 같아요');
    await app.sendMessage('이해했어요');

    const rows = messageRows();
    expect(rows).toEqual([
      { speaker: 'student', text: '네 준비됐습니다' },
      { speaker: 'tutor', text: 'Activity1-1을 볼까요? 답이 몇번일까요?' },
      { speaker: 'student', text: 'navigate 같아요' },
      { speaker: 'tutor', text: '맞아요. navigate 가 정답입니다.' },
      { speaker: 'student', text: '이해했어요' },
      { speaker: 'tutor', text: '너무 좋아요. 잘하셨어요.' },
    ]);
    // content panel shows the learning content in play
    expect(document.querySelector('#content-panel')?.textContent).toContain('Activity1-1');
  });

  it('toggles act badges without refetching', async () => {
    const server = new MockTutorServer(SCRIPT);
    const app = await startedApp(server);
    await app.sendMessage('첫 메시지');

    const visibleBadges = () =>
      Array.from(document.querySelectorAll('.act-badge')).filter(
        (el) => (el as HTMLElement).style.display !== 'none',
      );
    expect(visibleBadges()).toHaveLength(0); // hidden by default

    const calls = server.fetchCalls;
    const toggle = document.querySelector<HTMLInputElement>('#act-toggle')!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event('change'));

    expect(visibleBadges()).toHaveLength(1);
    expect(visibleBadges()[0]!.textContent).toBe('t.assess.display_question');
    expect(server.fetchCalls).toBe(calls); // pure view change

    toggle.checked = false;
    toggle.dispatchEvent(new Event('change'));
    expect(visibleBadges()).toHaveLength(0);
    expect(server.fetchCalls).toBe(calls);
  });

  it('serialized view transcript matches the server transcript endpoint', async () => {
    const server = new MockTutorServer(SCRIPT);
    const app = await startedApp(server);
    await app.sendMessage('네 준비됐습니다');
    await app.sendMessage('navigate 같아요');

    const resp = await server.fetch(`http://x/sessions/${app.state.sessionId}/transcript`);
    const serverTranscript = await resp.text();

    // modulo formatting: drop the header line and non-act bracket groups
    const normalized = serverTranscript
      .trimEnd()
      .split('\n')
      .filter((line) => !line.startsWith('=== session'))
      .map((line) => line.replace(/\[(?![ts]\.)[^\]]*\]/g, ''))
      .join('\n');
    expect(serializeTranscript(app.state)).toBe(normalized);
  });

  it('shows an error banner when the service is unreachable, without state', async () => {
    vi.stubGlobal('fetch', unreachableFetch);
    const app = new ChatApp(document);
    await app.startSession();

    const banner = document.querySelector<HTMLElement>('#banner')!;
    expect(banner.style.display).toBe('block');
    expect(banner.textContent).toContain('service unreachable');
    expect(app.state.sessionId).toBeNull();
    expect(app.state.messages).toHaveLength(0);
  });

  it('marks a busy rejection as failed with a working retry control', async () => {
    const server = new MockTutorServer(SCRIPT);
    const app = await startedApp(server);
    server.busyOnce = true;

    await app.sendMessage('바쁠 때 보낸 메시지');
    expect(document.querySelector('.msg.failed')).not.toBeNull();
    expect(document.querySelector('#banner')?.textContent).toContain('retry');

    const retry = document.querySelector<HTMLButtonElement>('.retry-button')!;
    retry.click();
    await vi.waitFor(() => {
      expect(messageRows()).toEqual([
        { speaker: 'student', text: '바쁠 때 보낸 메시지' },
        { speaker: 'tutor', text: 'Activity1-1을 볼까요? 답이 몇번일까요?' },
      ]);
    });
    expect(document.querySelector('.msg.failed')).toBeNull();
  });

  it('allows only one in-flight request per session', async () => {
    const server = new MockTutorServer(SCRIPT);
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const slowFetch = async (input: RequestInfo | URL, init?: RequestInit) => {
      if (String(input).includes('/messages')) await gate;
      return server.fetch(input, init);
    };
    vi.stubGlobal('fetch', slowFetch);
    const app = new ChatApp(document);
    await app.startSession();

    const first = app.sendMessage('느린 첫 요청');
    await app.sendMessage('두번째는 무시되어야 함'); // no-op while pending
    release();
    await first;

    const rows = messageRows();
    expect(rows.filter((r) => r.speaker === 'student')).toHaveLength(1);
    expect(rows[0]!.text).toBe('느린 첫 요청');
  });

  it('renders the opening tutor turn when the server provides one', async () => {
    const server = new MockTutorServer(SCRIPT);
    const opening = { act: 't.general', utterance: '안녕하세요, 시작해 볼까요?' };
    const fetchWithOpening = async (input: RequestInfo | URL, init?: RequestInit) => {
      const resp = await server.fetch(input, init);
      if (String(input).endsWith('/sessions') && init?.method === 'POST') {
        const body = await resp.json();
        return new Response(JSON.stringify({ ...body, opening }), { status: 200 });
      }
      return resp;
    };
    vi.stubGlobal('fetch', fetchWithOpening);
    const app = new ChatApp(document);
    await app.startSession();

    expect(messageRows()).toEqual([
      { speaker: 'tutor', text: '안녕하세요, 시작해 볼까요?' },
    ]);
  });
});
