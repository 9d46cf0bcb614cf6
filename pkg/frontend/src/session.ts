/**
 * Client side of the /session gain channel.
 *
 * Streams conditioned pen points (rate-limited to the protocol's
 * 120/s ceiling) and surfaces exactly the gains the service computes;
 * the client never evaluates the pressure/speed law itself. A dropped
 * connection ramps the gain to zero over 100 ms instead of cutting.
 */

import { DISCONNECT_RAMP_MS, GAIN_RAMP_MS } from "./audio.js";
import { PenPoint, decodeReply, encodePoint } from "./protocol.js";
import { RateLimiter } from "./stream.js";

// handler slots typed loosely so a browser WebSocket satisfies the
// interface structurally (its handlers carry `this` and event params)
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((...args: any[]) => void) | null;
  onmessage: ((event: any) => void) | null;
  onclose: ((...args: any[]) => void) | null;
  onerror: ((...args: any[]) => void) | null;
}

export interface SessionCallbacks {
  onGain(gain: number, rampMs: number): void;
  onError(message: string): void;
  onStatus(connected: boolean): void;
}

interface Scheduler {
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
  now(): number;
}

const realScheduler: Scheduler = {
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (handle) => clearTimeout(handle as number),
  now: () => performance.now(),
};

export class SessionClient {
  currentGain = 0;
  private socket: SocketLike | null = null;
  private connected = false;
  private readonly limiter = new RateLimiter(120);
  private flushHandle: unknown = null;

  constructor(
    private readonly connectSocket: () => SocketLike,
    private readonly callbacks: SessionCallbacks,
    private readonly scheduler: Scheduler = realScheduler,
  ) {}

  connect(): void {
    const socket = this.connectSocket();
    socket.onopen = () => {
      this.connected = true;
      this.callbacks.onStatus(true);
    };
    socket.onmessage = (event) => this.handleReply(event.data);
    socket.onclose = () => this.handleDrop();
    socket.onerror = () => this.handleDrop();
    this.socket = socket;
  }

  /** Rate-limited send; the newest sample always wins. */
  sendPoint(point: PenPoint): void {
    const due = this.limiter.offer(point, this.scheduler.now());
    if (due !== null) {
      this.transmit(due);
      return;
    }
    this.scheduleFlush();
  }

  /** Pen-up: flush the trailing sample, then silence locally. */
  penUp(): void {
    const pending = this.limiter.takeDue(Infinity);
    if (pending !== null) {
      this.transmit(pending);
    }
    this.currentGain = 0;
    this.callbacks.onGain(0, GAIN_RAMP_MS);
  }

  close(): void {
    this.socket?.close();
  }

  private transmit(point: PenPoint): void {
    if (this.socket === null || !this.connected) {
      return;
    }
    this.socket.send(encodePoint(point));
  }

  private scheduleFlush(): void {
    if (this.flushHandle !== null) {
      return;
    }
    const dueAt = this.limiter.nextDueMs();
    if (dueAt === null) {
      return;
    }
    const delay = Math.max(0, dueAt - this.scheduler.now());
    this.flushHandle = this.scheduler.setTimeout(() => {
      this.flushHandle = null;
      const point = this.limiter.takeDue(this.scheduler.now());
      if (point !== null) {
        this.transmit(point);
      }
    }, delay);
  }

  private handleReply(data: string): void {
    const reply = decodeReply(data);
    if (reply.kind === "gain") {
      this.currentGain = reply.gain;
      this.callbacks.onGain(reply.gain, GAIN_RAMP_MS);
    } else {
      this.callbacks.onError(reply.message);
    }
  }

  private handleDrop(): void {
    if (!this.connected && this.socket === null) {
      return;
    }
    this.connected = false;
    this.socket = null;
    if (this.flushHandle !== null) {
      this.scheduler.clearTimeout(this.flushHandle);
      this.flushHandle = null;
    }
    this.currentGain = 0;
    this.callbacks.onGain(0, DISCONNECT_RAMP_MS);
    this.callbacks.onStatus(false);
  }
}
