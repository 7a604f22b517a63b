// Console wiring: one websocket, canvas rendering per animation frame,
// gesture buttons and optional webcam capture. All logic lives in the
// pure modules; this file only touches the DOM.

import { frameMessage, gestureMessage, parseInbound } from "./messages.js";
import {
  ConsoleState,
  applyMessage,
  classificationText,
  enqueueOffline,
  initialState,
  nextBackoff,
  setConnection,
} from "./state.js";
import { fitDimensions, rgbaToPgm, toBase64 } from "./pgm.js";

const GESTURE_BUTTONS: { label: number; caption: string }[] = [
  { label: 0, caption: "Stop" },
  { label: 1, caption: "Forward" },
  { label: 2, caption: "Backward" },
  { label: 3, caption: "TurnLeft" },
  { label: 4, caption: "TurnRight" },
  { label: 5, caption: "GripToggle" },
];

const ARENA_METERS = 32; // 64 cells x 0.5 m
const VIEW_COLORS = ["#f4f4f4", "#333333", "#d33636"];

let state: ConsoleState = initialState();
let queue: string[] = [];
let socket: WebSocket | null = null;
let backoffMs: number | null = null;
let dirty = true;

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/`;
}

function send(payload: string) {
  if (socket !== null && socket.readyState === WebSocket.OPEN) {
    socket.send(payload);
    return;
  }
  const result = enqueueOffline(state, queue, payload);
  state = result.state;
  queue = result.queue;
  dirty = true;
}

function connect() {
  state = setConnection(state, "connecting");
  dirty = true;
  const ws = new WebSocket(wsUrl());
  socket = ws;
  ws.onopen = () => {
    backoffMs = null;
    state = setConnection(state, "connected");
    for (const payload of queue.splice(0)) ws.send(payload);
    dirty = true;
  };
  ws.onmessage = (ev) => {
    const msg = parseInbound(String(ev.data));
    if (msg !== null) {
      state = applyMessage(state, msg);
      dirty = true;
    }
  };
  ws.onclose = () => {
    if (socket === ws) socket = null;
    state = setConnection(state, "disconnected");
    dirty = true;
    backoffMs = nextBackoff(backoffMs);
    setTimeout(connect, backoffMs);
  };
  ws.onerror = () => ws.close();
}

// --- rendering --------------------------------------------------------------

function drawArena(canvas: HTMLCanvasElement) {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const scale = canvas.width / ARENA_METERS;
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#888888";
  ctx.strokeRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#6fa8dc";
  ctx.beginPath();
  state.trail.forEach((p, i) => {
    const px = p.x * scale;
    const py = canvas.height - p.y * scale;
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  const robot = state.robot;
  if (robot !== null) {
    const px = robot.x * scale;
    const py = canvas.height - robot.y * scale;
    ctx.fillStyle = robot.grip ? "#38761d" : "#1155cc";
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#1155cc";
    ctx.beginPath();
    ctx.moveTo(px, py);
    ctx.lineTo(px + 12 * Math.cos(robot.theta), py - 12 * Math.sin(robot.theta));
    ctx.stroke();
  }
}

function drawView(canvas: HTMLCanvasElement) {
  const ctx = canvas.getContext("2d");
  if (ctx === null || state.view === null) return;
  const cell = canvas.width / 9;
  for (let r = 0; r < 9; r++) {
    for (let c = 0; c < 9; c++) {
      ctx.fillStyle = VIEW_COLORS[state.view[r][c]] ?? VIEW_COLORS[0];
      // row 0 is the farthest-north cell; canvas y grows downward already
      ctx.fillRect(c * cell, r * cell, cell - 1, cell - 1);
    }
  }
}

function renderLoop() {
  if (dirty) {
    dirty = false;
    const arena = document.getElementById("arena") as HTMLCanvasElement | null;
    const view = document.getElementById("view") as HTMLCanvasElement | null;
    if (arena !== null) drawArena(arena);
    if (view !== null) drawView(view);
    const banner = document.getElementById("banner");
    if (banner !== null) {
      banner.textContent =
        state.connection === "connected" ? "" : `${state.connection}… retrying`;
      banner.style.display = state.connection === "connected" ? "none" : "block";
    }
    const readout = document.getElementById("classification");
    if (readout !== null) readout.textContent = classificationText(state.classification);
    const pose = document.getElementById("pose");
    if (pose !== null && state.robot !== null) {
      const r = state.robot;
      pose.textContent =
        `x=${r.x.toFixed(2)} y=${r.y.toFixed(2)} theta=${r.theta.toFixed(2)} ` +
        `grip=${r.grip} tick=${r.tick}`;
    }
    const warn = document.getElementById("dropwarn");
    if (warn !== null) {
      warn.textContent =
        state.droppedSends > 0 ? `${state.droppedSends} message(s) dropped while offline` : "";
    }
  }
  requestAnimationFrame(renderLoop);
}

// --- webcam -----------------------------------------------------------------

async function setupWebcam(button: HTMLButtonElement) {
  let video: HTMLVideoElement;
  try {
    const stream = await navigator.mediaDevices.getUserMedia({ video: true });
    video = document.createElement("video");
    video.srcObject = stream;
    await video.play();
  } catch {
    button.disabled = true;
    button.title = "webcam unavailable";
    return;
  }
  button.onclick = () => {
    const { width, height } = fitDimensions(video.videoWidth, video.videoHeight);
    const scratch = document.createElement("canvas");
    scratch.width = width;
    scratch.height = height;
    const ctx = scratch.getContext("2d");
    if (ctx === null) return;
    ctx.drawImage(video, 0, 0, width, height);
    const rgba = new Uint8Array(ctx.getImageData(0, 0, width, height).data.buffer);
    send(frameMessage(toBase64(rgbaToPgm(rgba, width, height))));
  };
}

function main() {
  const buttons = document.getElementById("buttons");
  if (buttons !== null) {
    for (const { label, caption } of GESTURE_BUTTONS) {
      const b = document.createElement("button");
      b.textContent = caption;
      b.onclick = () => send(gestureMessage(label));
      buttons.appendChild(b);
    }
  }
  const camButton = document.getElementById("send-frame") as HTMLButtonElement | null;
  if (camButton !== null) void setupWebcam(camButton);
  connect();
  requestAnimationFrame(renderLoop);
}

main();
