// GatewayMessage schema: the only traffic the console speaks.
// Inbound: state / class / view. Outbound: gesture / frame.

export interface StateMessage {
  type: "state";
  x: number;
  y: number;
  theta: number;
  grip: boolean;
  tick: number;
}

export interface ClassMessage {
  type: "class";
  label: number | null;
  distance: number;
  frame_seq: number;
}

export interface ViewMessage {
  type: "view";
  cells: number[][]; // 9x9, 0 free / 1 obstacle / 2 robot
}

export type InboundMessage = StateMessage | ClassMessage | ViewMessage;

export interface GestureMessage {
  type: "gesture";
  label: number;
}

export interface FrameMessage {
  type: "frame";
  data: string; // base64 PGM
}

export type OutboundMessage = GestureMessage | FrameMessage;

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/** Parse one inbound text frame; returns null on anything malformed. */
export function parseInbound(text: string): InboundMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const msg = raw as Record<string, unknown>;
  switch (msg.type) {
    case "state":
      if (
        isFiniteNumber(msg.x) &&
        isFiniteNumber(msg.y) &&
        isFiniteNumber(msg.theta) &&
        typeof msg.grip === "boolean" &&
        isFiniteNumber(msg.tick)
      ) {
        return {
          type: "state",
          x: msg.x,
          y: msg.y,
          theta: msg.theta,
          grip: msg.grip,
          tick: msg.tick,
        };
      }
      return null;
    case "class":
      if (
        (msg.label === null || isFiniteNumber(msg.label)) &&
        isFiniteNumber(msg.distance) &&
        isFiniteNumber(msg.frame_seq)
      ) {
        return {
          type: "class",
          label: msg.label as number | null,
          distance: msg.distance,
          frame_seq: msg.frame_seq,
        };
      }
      return null;
    case "view": {
      const cells = msg.cells;
      if (
        Array.isArray(cells) &&
        cells.length === 9 &&
        cells.every(
          (row) =>
            Array.isArray(row) &&
            row.length === 9 &&
            row.every((c) => c === 0 || c === 1 || c === 2),
        )
      ) {
        return { type: "view", cells: cells as number[][] };
      }
      return null;
    }
    default:
      return null;
  }
}

export function gestureMessage(label: number): string {
  if (!Number.isInteger(label) || label < 0 || label > 254) {
    throw new RangeError(`gesture label out of range: ${label}`);
  }
  return JSON.stringify({ type: "gesture", label });
}

export function frameMessage(base64Pgm: string): string {
  return JSON.stringify({ type: "frame", data: base64Pgm });
}
