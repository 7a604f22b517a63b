"""Operator console gateway: one TCP port speaking HTTP with a websocket
upgrade.

Outbound it fans robot state, classification and surroundings-view events
to every connected console as single-line JSON text frames; inbound it
accepts manual gesture labels and base64 PGM frames.  The same port serves
the console's static assets.  A UDP endpoint on the command port lets a
remote pipeline drive the robot with Cmd packets.
"""

from __future__ import annotations

import asyncio
import base64
import binascii
import json
import logging
import mimetypes
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response

from . import eigengesture
from .command_map import MappingTable, RobotCommand, default_table, map_gesture
from .eigengesture import Classification, EigenModel
from .errors import GestureBotError
from .motion_gate import GateState, gate_step
from .pipeline import PipelineConfig, command_record
from .raster import binarize, decode_pgm, preprocess
from .robot_sim import Outcome, RobotState, World, apply_command, render_view
from .wire import CmdPacket, decode_packet

log = logging.getLogger(__name__)

MAX_BACKLOG = 64  # queued messages before a slow consumer is dropped


def state_message(state: RobotState) -> dict:
    return {
        "type": "state",
        "x": state.x,
        "y": state.y,
        "theta": state.theta,
        "grip": state.grip,
        "tick": state.tick,
    }


def class_message(c: Classification) -> dict:
    return {
        "type": "class",
        "label": c.label,
        "distance": c.distance,
        "frame_seq": c.frame_seq,
    }


def view_message(view: np.ndarray) -> dict:
    return {"type": "view", "cells": view.tolist()}


@dataclass
class Diagnostics:
    dropped_messages: int = 0
    slow_disconnects: int = 0
    bad_datagrams: int = 0


class GatewayServer:
    """Event-loop-owned hub between the robot simulator and consoles."""

    def __init__(
        self,
        world: World,
        state: RobotState,
        table: MappingTable | None = None,
        model: EigenModel | None = None,
        cfg: PipelineConfig | None = None,
        static_dir: str | Path | None = None,
    ):
        self.world = world
        self.state = state
        self.table = table if table is not None else default_table()
        self.model = model
        self.cfg = cfg if cfg is not None else PipelineConfig()
        self.static_dir = Path(static_dir) if static_dir else None
        self.diagnostics = Diagnostics()
        self.command_log: list[dict] = []
        self._gate = GateState()
        self._frame_seq = 0
        self._clients: dict[ServerConnection, asyncio.Queue] = {}
        self._senders: set[asyncio.Task] = set()

    # --- publishing -------------------------------------------------------

    def publish(self, message: dict):
        """Queue a JSON message for every connected console; consoles more
        than MAX_BACKLOG messages behind are disconnected."""
        text = json.dumps(message)
        for ws, queue in list(self._clients.items()):
            try:
                queue.put_nowait(text)
            except asyncio.QueueFull:
                self.diagnostics.slow_disconnects += 1
                self._clients.pop(ws, None)
                asyncio.ensure_future(ws.close(1013, "backlog overflow"))

    def publish_state(self):
        self.publish(state_message(self.state))
        self.publish(view_message(render_view(self.world, self.state)))

    # --- command execution ------------------------------------------------

    def execute(self, cmd: RobotCommand, c: Classification | None = None) -> Outcome:
        self.state, outcome = apply_command(self.world, self.state, cmd)
        if c is not None:
            self.publish(class_message(c))
            self.command_log.append(
                command_record(c, cmd.verb.value, cmd.magnitude, outcome, self.state)
            )
        self.publish_state()
        return outcome

    def inject_classification(self, c: Classification):
        self.execute(map_gesture(self.table, c), c)

    def inject_frame(self, frame_bytes: bytes):
        """Run a raw PGM frame through the standard pipeline head."""
        frame = decode_pgm(frame_bytes)
        self._frame_seq += 1
        seq = self._frame_seq
        bin_frame = binarize(preprocess(frame), self.cfg.threshold)
        self._gate, fired = gate_step(self._gate, self.cfg.gate, bin_frame)
        if fired is None or self.model is None:
            return
        from .pipeline import classify_frame  # local import to avoid a cycle

        c = classify_frame(self.model, fired, self.cfg.orientation, frame_seq=seq)
        self.inject_classification(c)

    # --- inbound console messages ------------------------------------------

    def handle_message(self, text: str):
        try:
            msg = json.loads(text)
            if not isinstance(msg, dict):
                raise ValueError("not an object")
            kind = msg.get("type")
            if kind == "gesture":
                label = msg["label"]
                if not isinstance(label, int) or not (0 <= label <= 254):
                    raise ValueError("bad label")
                self.inject_classification(Classification(label, 0.0, 0))
            elif kind == "frame":
                self.inject_frame(base64.b64decode(msg["data"], validate=True))
            else:
                raise ValueError(f"unknown type {kind!r}")
        except (ValueError, KeyError, TypeError, binascii.Error, GestureBotError) as e:
            self.diagnostics.dropped_messages += 1
            log.debug("dropped console message: %s", e)

    # --- websocket plumbing -------------------------------------------------

    async def _sender(self, ws: ServerConnection, queue: asyncio.Queue):
        try:
            while True:
                await ws.send(await queue.get())
        except ConnectionClosed:
            pass
        finally:
            self._clients.pop(ws, None)

    async def _handler(self, ws: ServerConnection):
        queue: asyncio.Queue = asyncio.Queue(maxsize=MAX_BACKLOG)
        self._clients[ws] = queue
        sender = asyncio.ensure_future(self._sender(ws, queue))
        self._senders.add(sender)
        sender.add_done_callback(self._senders.discard)
        # greet a fresh console with the current state
        queue.put_nowait(json.dumps(state_message(self.state)))
        queue.put_nowait(json.dumps(view_message(render_view(self.world, self.state))))
        try:
            async for text in ws:
                if isinstance(text, bytes):
                    text = text.decode("utf-8", errors="replace")
                self.handle_message(text)
        except ConnectionClosed:
            pass
        finally:
            self._clients.pop(ws, None)
            sender.cancel()

    def _process_request(self, connection, request):
        if "upgrade" in request.headers.get("Connection", "").lower():
            return None
        path = request.path.split("?")[0]
        if self.static_dir is None:
            return Response(404, "Not Found", _static_headers("text/plain", 16), b"no console here\n")
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            return Response(404, "Not Found", _static_headers("text/plain", 10), b"not found\n")
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        body = target.read_bytes()
        return Response(200, "OK", _static_headers(ctype, len(body)), body)

    async def serve_forever(self, host: str = "127.0.0.1", port: int = 9104,
                            cmd_port: int | None = None, ready: asyncio.Event | None = None):
        loop = asyncio.get_running_loop()
        transports = []
        if cmd_port is not None:
            transport, _ = await loop.create_datagram_endpoint(
                lambda: _CmdProtocol(self), local_addr=(host, cmd_port)
            )
            transports.append(transport)
        async with serve(self._handler, host, port, process_request=self._process_request):
            if ready is not None:
                ready.set()
            try:
                await asyncio.Future()
            finally:
                for t in transports:
                    t.close()


def _static_headers(ctype: str, length: int):
    from websockets.datastructures import Headers

    return Headers(
        [("Content-Type", ctype), ("Content-Length", str(length)), ("Connection", "close")]
    )


class _CmdProtocol(asyncio.DatagramProtocol):
    """UDP listener applying Cmd packets from a remote pipeline."""

    def __init__(self, gateway: GatewayServer):
        self.gateway = gateway

    def datagram_received(self, data: bytes, addr):
        try:
            packet = decode_packet(data)
        except GestureBotError:
            self.gateway.diagnostics.bad_datagrams += 1
            return
        if isinstance(packet, CmdPacket):
            self.gateway.execute(packet.to_command())
        else:
            self.gateway.diagnostics.bad_datagrams += 1
