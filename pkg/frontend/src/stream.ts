/**
 * Pointer-sample conditioning before the wire: pressure fallback and
 * client-side rate limiting.
 */

import { PenPoint } from "./protocol.js";

/**
 * Mice report no useful pressure (0, or a constant 0.5 on some
 * browsers); fall back to 0.5 so strokes still sound. Stylus values
 * pass through clamped to [0, 1].
 */
export function normalizePressure(pressure: number, pointerType: string): number {
  if (pointerType === "mouse" || pressure <= 0 || Number.isNaN(pressure)) {
    return 0.5;
  }
  return Math.min(1, Math.max(0, pressure));
}

/**
 * Keeps the outbound message rate at or below maxPerSecond by sending
 * the newest sample immediately when the interval allows and otherwise
 * holding it as the pending trailing sample. Timestamps are injected so
 * behavior is fully deterministic under test.
 */
export class RateLimiter {
  readonly intervalMs: number;
  private lastSentMs = -Infinity;
  private pending: PenPoint | null = null;

  constructor(maxPerSecond = 120) {
    if (maxPerSecond <= 0) {
      throw new Error("maxPerSecond must be positive");
    }
    this.intervalMs = 1000 / maxPerSecond;
  }

  /** Offer a new sample; returns it if it should go out now. */
  offer(point: PenPoint, nowMs: number): PenPoint | null {
    if (nowMs - this.lastSentMs >= this.intervalMs) {
      this.lastSentMs = nowMs;
      this.pending = null;
      return point;
    }
    this.pending = point; // newer sample replaces the held one
    return null;
  }

  /** Trailing sample to send once the interval has elapsed, if any. */
  takeDue(nowMs: number): PenPoint | null {
    if (this.pending !== null && nowMs - this.lastSentMs >= this.intervalMs) {
      const point = this.pending;
      this.pending = null;
      this.lastSentMs = nowMs;
      return point;
    }
    return null;
  }

  hasPending(): boolean {
    return this.pending !== null;
  }

  /** Absolute time at which the pending sample becomes due. */
  nextDueMs(): number | null {
    return this.pending === null ? null : this.lastSentMs + this.intervalMs;
  }
}
