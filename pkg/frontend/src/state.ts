// Pure console state: a reducer over inbound messages plus the offline
// send queue and reconnect backoff schedule. No DOM access here so the
// whole file is unit-testable.

import type { InboundMessage, StateMessage, ClassMessage } from "./messages.js";

export const TRAIL_LIMIT = 500;
export const QUEUE_LIMIT = 16;
export const BACKOFF_MIN_MS = 250;
export const BACKOFF_MAX_MS = 8000;

export type Connection = "connecting" | "connected" | "disconnected";

export interface Pose {
  x: number;
  y: number;
  theta: number;
}

export interface ConsoleState {
  connection: Connection;
  robot: StateMessage | null;
  trail: Pose[]; // newest last, capped at TRAIL_LIMIT
  classification: ClassMessage | null;
  view: number[][] | null;
  droppedSends: number;
}

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    robot: null,
    trail: [],
    classification: null,
    view: null,
    droppedSends: 0,
  };
}

/** Fold one inbound message into the state; unknown input is a no-op. */
export function applyMessage(state: ConsoleState, msg: InboundMessage): ConsoleState {
  switch (msg.type) {
    case "state": {
      const trail = state.trail.concat([{ x: msg.x, y: msg.y, theta: msg.theta }]);
      return {
        ...state,
        robot: msg,
        trail: trail.length > TRAIL_LIMIT ? trail.slice(trail.length - TRAIL_LIMIT) : trail,
      };
    }
    case "class":
      return { ...state, classification: msg };
    case "view":
      return { ...state, view: msg.cells };
  }
}

export function setConnection(state: ConsoleState, connection: Connection): ConsoleState {
  // a fresh connection replays the full state from the greeting, so the
  // stale trail is dropped rather than stitched across sessions
  if (connection === "connected") {
    return { ...state, connection, trail: [] };
  }
  return { ...state, connection };
}

/**
 * Queue an outbound payload while disconnected. At most QUEUE_LIMIT
 * messages are held; overflow is counted so the UI can warn.
 */
export function enqueueOffline(
  state: ConsoleState,
  queue: readonly string[],
  payload: string,
): { state: ConsoleState; queue: string[] } {
  if (queue.length >= QUEUE_LIMIT) {
    return { state: { ...state, droppedSends: state.droppedSends + 1 }, queue: [...queue] };
  }
  return { state, queue: [...queue, payload] };
}

/** Next reconnect delay: doubles from 250 ms and saturates at 8 s. */
export function nextBackoff(previousMs: number | null): number {
  if (previousMs === null || previousMs < BACKOFF_MIN_MS) return BACKOFF_MIN_MS;
  return Math.min(previousMs * 2, BACKOFF_MAX_MS);
}

/** Human-readable classification readout; Unknown implies a Stop. */
export function classificationText(c: ClassMessage | null): string {
  if (c === null) return "no classification yet";
  if (c.label === null) return `Unknown (distance ${c.distance.toFixed(2)}) -> Stop`;
  return `label ${c.label} (distance ${c.distance.toFixed(2)})`;
}
