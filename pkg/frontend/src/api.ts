// Typed client for the local trainer service.

export interface SchemeParamsDto {
  d: number;
  k1: number;
  k2: number;
  n: number;
  t: number;
}

export interface MnemonicRow {
  index: number;
  image_id: string;
  digit: number;
}

export interface SessionCreated {
  session_id: string;
  params: SchemeParamsDto;
  mnemonic_table: MnemonicRow[];
}

export interface SessionState {
  session_id: string;
  params: SchemeParamsDto;
  training_confirmed: boolean;
  challenge_index: number;
  cursor: number;
  answered: number;
  correct: number;
  accuracy: number | null;
  mean_ms: number | null;
  accounts: string[];
}

export interface ChallengeView {
  challenge_index: number;
  cursor: number;
  clause: number[];
  layout: { slots: number[]; index_vars: number[]; tail_vars: number[] };
  image_ids: string[];
}

export interface AnswerVerdict {
  correct: boolean;
  cursor: number;
  challenge_index: number;
  rehearsed_cues: number[];
  answered: number;
  accuracy: number;
}

export interface RehearsalCue {
  cue: number;
  image_id: string;
  recalls: number;
  due_start: number;
  due_end: number;
  overdue: boolean;
}

export interface AccountCreated {
  label: string;
  challenge: number[][];
  algorithm: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `HTTP ${resp.status}`);
  }
  return body;
}

function post<T>(url: string, payload: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class TrainerApi {
  constructor(public baseUrl: string = "") {}

  createSession(params: Partial<SchemeParamsDto> & { seed?: number }): Promise<SessionCreated> {
    return post(`${this.baseUrl}/api/session`, params);
  }

  state(sessionId: string): Promise<SessionState> {
    return request(`${this.baseUrl}/api/session/${sessionId}`);
  }

  confirmTraining(sessionId: string): Promise<{ training_confirmed: boolean }> {
    return post(`${this.baseUrl}/api/session/${sessionId}/confirm`, {});
  }

  challenge(sessionId: string): Promise<ChallengeView> {
    return request(`${this.baseUrl}/api/session/${sessionId}/challenge`);
  }

  answer(sessionId: string, digit: number, elapsedMs: number): Promise<AnswerVerdict> {
    return post(`${this.baseUrl}/api/session/${sessionId}/answer`, {
      digit,
      elapsed_ms: elapsedMs,
    });
  }

  rehearsal(sessionId: string): Promise<{ now: number; cues: RehearsalCue[] }> {
    return request(`${this.baseUrl}/api/session/${sessionId}/rehearsal`);
  }

  createAccount(sessionId: string, label: string): Promise<AccountCreated> {
    return post(`${this.baseUrl}/api/session/${sessionId}/account`, { label });
  }

  login(sessionId: string, label: string, digits: string): Promise<{ ok: boolean }> {
    return post(`${this.baseUrl}/api/session/${sessionId}/login`, { label, digits });
  }
}
