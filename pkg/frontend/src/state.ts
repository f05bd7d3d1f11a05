// Client-side drill aggregates. Everything here can be rebuilt from the
// server state endpoint, so reloading the page loses nothing.

export interface DrillStats {
  answered: number;
  correct: number;
  totalMs: number;
}

export function emptyStats(): DrillStats {
  return { answered: 0, correct: 0, totalMs: 0 };
}

export function recordAnswer(stats: DrillStats, correct: boolean, elapsedMs: number): DrillStats {
  return {
    answered: stats.answered + 1,
    correct: stats.correct + (correct ? 1 : 0),
    totalMs: stats.totalMs + elapsedMs,
  };
}

export function accuracy(stats: DrillStats): number | null {
  return stats.answered === 0 ? null : stats.correct / stats.answered;
}

export function meanSeconds(stats: DrillStats): number | null {
  return stats.answered === 0 ? null : stats.totalMs / stats.answered / 1000;
}

export function fromServer(answered: number, correct: number, meanMs: number | null): DrillStats {
  return {
    answered,
    correct,
    totalMs: (meanMs ?? 0) * answered,
  };
}

export interface RehearsalRow {
  cue: number;
  dueStart: number;
  dueEnd: number;
  overdue: boolean;
}

export function sortByDue<T extends RehearsalRow>(rows: T[]): T[] {
  return [...rows].sort((a, b) =>
    a.overdue !== b.overdue ? (a.overdue ? -1 : 1) : a.dueStart - b.dueStart,
  );
}
