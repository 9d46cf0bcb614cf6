/**
 * Wire protocol of the /session channel.
 *
 * One outbound point per message, one inbound reply per point. Field
 * names are fixed by the service: {"t","x","y","p","pen"} out,
 * {"gain","t"} or {"error"} back.
 */

export interface PenPoint {
  t: number;
  x: number;
  y: number;
  p: number;
  pen: string;
}

export type SessionReply =
  | { kind: "gain"; gain: number; t: number }
  | { kind: "error"; message: string };

export function encodePoint(point: PenPoint): string {
  return JSON.stringify({
    t: point.t,
    x: point.x,
    y: point.y,
    p: point.p,
    pen: point.pen,
  });
}

export function decodeReply(data: string): SessionReply {
  let parsed: unknown;
  try {
    parsed = JSON.parse(data);
  } catch {
    return { kind: "error", message: "unparseable reply" };
  }
  if (typeof parsed !== "object" || parsed === null) {
    return { kind: "error", message: "non-object reply" };
  }
  const reply = parsed as Record<string, unknown>;
  if (typeof reply.error === "string") {
    return { kind: "error", message: reply.error };
  }
  if (typeof reply.gain === "number" && typeof reply.t === "number") {
    // the service already clamps; clamp again so a misbehaving server
    // can never push the audio gain outside [0, 1]
    const gain = Math.min(1, Math.max(0, reply.gain));
    return { kind: "gain", gain, t: reply.t };
  }
  return { kind: "error", message: "malformed reply" };
}

export interface PresetInfo {
  name: string;
  audio_url: string;
  tactile_url: string;
  pattern_url: string;
}
