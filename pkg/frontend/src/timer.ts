/**
 * Per-role authoring budget: 15 minutes, counted down from the first
 * heartbeat. The countdown clamps at 0:00 and flags overrun; the budget is
 * advisory, so nothing ever locks.
 */

export const ROLE_BUDGET_SECONDS = 900;
export const HEARTBEAT_INTERVAL_SECONDS = 10;

export interface TimerView {
  role: string;
  elapsed: number;
  /** Seconds left, clamped at 0. */
  remaining: number;
  /** MM:SS of the remaining budget. */
  display: string;
  /** True once the full budget is spent (elapsed >= 900). */
  warning: boolean;
  /** Same condition as warning: the countdown sits clamped at 0:00. */
  overrun: boolean;
}

export function formatClock(seconds: number): string {
  const whole = Math.max(0, Math.floor(seconds));
  const minutes = Math.floor(whole / 60);
  const rest = whole % 60;
  return `${String(minutes).padStart(2, "0")}:${String(rest).padStart(2, "0")}`;
}

export class RoleTimer {
  private elapsedByRole = new Map<string, number>();

  constructor(private budgetSeconds: number = ROLE_BUDGET_SECONDS) {}

  /** Accumulate focused-editing time; negative ticks are ignored. */
  tick(role: string, seconds: number): TimerView {
    if (seconds > 0) {
      this.elapsedByRole.set(role, (this.elapsedByRole.get(role) ?? 0) + seconds);
    }
    return this.view(role);
  }

  /** Adopt server-side totals without ever moving a timer backwards. */
  sync(serverTimers: Record<string, number>): void {
    for (const [role, elapsed] of Object.entries(serverTimers)) {
      const local = this.elapsedByRole.get(role) ?? 0;
      this.elapsedByRole.set(role, Math.max(local, elapsed));
    }
  }

  view(role: string): TimerView {
    const elapsed = this.elapsedByRole.get(role) ?? 0;
    const remaining = Math.max(0, this.budgetSeconds - elapsed);
    return {
      role,
      elapsed,
      remaining,
      display: formatClock(remaining),
      warning: elapsed >= this.budgetSeconds,
      overrun: elapsed >= this.budgetSeconds,
    };
  }

  snapshot(): Record<string, number> {
    return Object.fromEntries(this.elapsedByRole);
  }
}
