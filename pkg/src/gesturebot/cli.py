"""Command-line entry points.

Results go to standard output as JSON Lines; exit code 0 on success,
1 on runtime errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import socket
import sys
import time
from pathlib import Path

from . import eigengesture
from .command_map import default_table, dump_mapping, load_mapping
from .errors import GestureBotError
from .gateway import GatewayServer
from .pipeline import (
    CONFIG_ENV_VAR,
    PipelineConfig,
    config_from_json,
    dump_log,
    evaluate,
    frame_dir_source,
    run_pipeline,
    run_pipeline_bin,
)
from .raster import binarize, decode_pbm, decode_pgm, encode_pbm, preprocess
from .robot_sim import RobotState, World, center_of_cell, empty_arena, load_world
from .segmenter import Orientation
from .synth import DATASET_ORIENTATION, SyntheticSpec, gen_dataset
from .wire import ReassemblyBuffer, chunk_frame, decode_packet, encode_packet, FrameChunkPacket


def _emit(obj: dict):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def _load_config(path: str | None) -> PipelineConfig:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if path:
        return config_from_json(Path(path).read_text())
    return PipelineConfig()


def _load_world(cfg: PipelineConfig, override: str | None) -> World:
    path = override or cfg.world_path
    return load_world(path) if path else empty_arena()


def _load_table(cfg: PipelineConfig, override: str | None):
    path = override or cfg.mapping_path
    return load_mapping(Path(path).read_text()) if path else default_table()


def _initial_state(world: World) -> RobotState:
    x, y = center_of_cell(world, world.rows // 2, world.cols // 2)
    return RobotState(x, y)


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    templates = eigengesture.load_templates(args.template_dir)
    model = eigengesture.train(templates, k_max=args.k_max, tau_override=args.tau)
    eigengesture.save_model(args.output, templates, model)
    _emit({"trained": len(templates), "k": model.k,
           "tau": None if model.tau == float("inf") else model.tau,
           "model_dir": str(args.output)})
    return 0


def cmd_classify(args) -> int:
    _, model = eigengesture.load_model(args.model_dir)
    image = decode_pbm(Path(args.image).read_bytes())
    c = eigengesture.classify(model, image)
    _emit({"label": c.label, "distance": c.distance,
           "name": eigengesture.template_name(model, c.label) if c.label is not None else "unknown"})
    return 0


def cmd_gen_dataset(args) -> int:
    spec = SyntheticSpec(seed=args.seed, n_labels=args.labels,
                         variants_per_label=args.variants)
    templates, probes = gen_dataset(spec)
    out = Path(args.output)
    tdir = out / "templates"
    pdir = out / "probes"
    tdir.mkdir(parents=True, exist_ok=True)
    pdir.mkdir(parents=True, exist_ok=True)
    per_label: dict[int, int] = {}
    names = {}
    for t in templates:
        idx = per_label.get(t.label, 0)
        per_label[t.label] = idx + 1
        (tdir / f"{t.label}_{idx}.pbm").write_bytes(encode_pbm(t.image))
        names[str(t.label)] = t.name
    (tdir / "model.json").write_text(json.dumps(
        {"geometry": {"width": 60, "height": 80}, "k": min(20, len(templates) - 1),
         "tau": None, "names": names}, indent=2, sort_keys=True))
    per_label.clear()
    for label, probe in probes:
        idx = per_label.get(label, 0)
        per_label[label] = idx + 1
        (pdir / f"{label}_{idx:04d}.pbm").write_bytes(encode_pbm(probe))
    manifest = {"seed": spec.seed, "n_labels": spec.n_labels,
                "variants_per_label": spec.variants_per_label,
                "orientation": DATASET_ORIENTATION.value}
    (out / "dataset.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    (pdir / "dataset.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    _emit({"templates": len(templates), "probes": len(probes), "out": str(out)})
    return 0


def _probe_orientation(probe_dir: Path, flag: str | None) -> Orientation:
    if flag:
        return Orientation(flag)
    for candidate in (probe_dir / "dataset.json", probe_dir.parent / "dataset.json"):
        if candidate.exists():
            return Orientation(json.loads(candidate.read_text())["orientation"])
    return Orientation.ARM_FROM_LEFT


def cmd_eval(args) -> int:
    probe_dir = Path(args.probe_dir)
    _, model = eigengesture.load_model(args.model_dir)
    orientation = _probe_orientation(probe_dir, args.orientation)

    def probes():
        for path in sorted(probe_dir.glob("*.pbm")):
            yield int(path.stem.split("_")[0]), decode_pbm(path.read_bytes())

    _emit(evaluate(model, probes(), orientation))
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    _, model = eigengesture.load_model(args.model_dir)
    table = _load_table(cfg, args.mapping)
    world = _load_world(cfg, args.world)
    state = _initial_state(world)
    callbacks = {}
    sock = None
    if args.send_class or args.send_state:
        sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        seqs = {"class": 0, "state": 0}
        if args.send_class:
            addr = _parse_addr(args.send_class)

            def on_classify(c, _addr=addr):
                from .wire import ClassPacket
                packet = ClassPacket(seqs["class"], c.frame_seq, c.label, c.distance)
                seqs["class"] += 1
                sock.sendto(encode_packet(packet), _addr)

            callbacks["on_classify"] = on_classify
        if args.send_state:
            addr = _parse_addr(args.send_state)

            def on_state(s, _addr=addr):
                from .wire import StatePacket
                packet = StatePacket(seqs["state"], s.x, s.y, s.theta, s.grip, s.tick)
                seqs["state"] += 1
                sock.sendto(encode_packet(packet), _addr)

            callbacks["on_state"] = on_state

    if args.frames:
        if args.orientation:
            cfg = _replace_orientation(cfg, args.orientation)
        records, _ = run_pipeline(frame_dir_source(args.frames), cfg, model, table, world,
                                  state, **callbacks)
    elif args.listen is not None:
        records = _run_listen(args, cfg, model, table, world, state, callbacks)
    else:
        raise GestureBotError("run needs --frames or --listen")
    text = dump_log(records)
    sys.stdout.write(text)
    if args.log:
        Path(args.log).write_text(text)
    if sock is not None:
        sock.close()
    return 0


def _replace_orientation(cfg: PipelineConfig, orientation: str) -> PipelineConfig:
    from dataclasses import replace
    return replace(cfg, orientation=Orientation(orientation))


def _run_listen(args, cfg, model, table, world, state, callbacks) -> list[dict]:
    """Receive binary frames as FrameChunk datagrams and run the gate-onward
    pipeline; stops after --count frames or --idle-ms of silence."""
    if args.orientation:
        cfg = _replace_orientation(cfg, args.orientation)
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.bind(("127.0.0.1", args.listen))
    sock.settimeout(args.idle_ms / 1000)
    buf = ReassemblyBuffer()

    def frames():
        received = 0
        while args.count is None or received < args.count:
            try:
                data, _ = sock.recvfrom(65535)
            except socket.timeout:
                return
            try:
                packet = decode_packet(data)
            except GestureBotError:
                continue
            if not isinstance(packet, FrameChunkPacket):
                continue
            frame = buf.step(packet, int(time.monotonic() * 1000))
            if frame is not None:
                received += 1
                yield packet.frame_id, frame

    try:
        records, _ = run_pipeline_bin(frames(), cfg, model, table, world, state, **callbacks)
    finally:
        sock.close()
    return records


def cmd_send_frame(args) -> int:
    cfg = _load_config(args.config)
    path = Path(args.source)
    paths = sorted(path.glob("*.pgm")) + sorted(path.glob("*.pbm")) if path.is_dir() else [path]
    addr = _parse_addr(args.to)
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    seq = 0
    sent = 0
    for i, p in enumerate(paths):
        if p.suffix == ".pbm":
            bin_frame = decode_pbm(p.read_bytes())
        else:
            bin_frame = binarize(preprocess(decode_pgm(p.read_bytes())), cfg.threshold)
        for chunk in chunk_frame(bin_frame, frame_id=i, seq_start=seq):
            sock.sendto(encode_packet(chunk), addr)
            seq += 1
        sent += 1
        if args.period_ms:
            time.sleep(args.period_ms / 1000)
    sock.close()
    _emit({"frames_sent": sent, "datagrams": seq})
    return 0


def cmd_recv_frame(args) -> int:
    sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
    sock.bind(("127.0.0.1", args.port))
    sock.settimeout(args.idle_ms / 1000)
    buf = ReassemblyBuffer()
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    received = 0
    while received < args.count:
        try:
            data, _ = sock.recvfrom(65535)
        except socket.timeout:
            break
        try:
            packet = decode_packet(data)
        except GestureBotError:
            continue
        if not isinstance(packet, FrameChunkPacket):
            continue
        frame = buf.step(packet, int(time.monotonic() * 1000))
        if frame is not None:
            (out / f"frame_{packet.frame_id:06d}.pbm").write_bytes(encode_pbm(frame))
            received += 1
            _emit({"frame_id": packet.frame_id, "width": frame.width, "height": frame.height})
    sock.close()
    return 0


def cmd_serve(args) -> int:
    cfg = _load_config(args.config)
    world = _load_world(cfg, args.world)
    table = _load_table(cfg, args.mapping)
    model = None
    if args.model_dir:
        _, model = eigengesture.load_model(args.model_dir)
    gateway = GatewayServer(world, _initial_state(world), table, model, cfg,
                            static_dir=args.static_dir)

    async def main():
        await gateway.serve_forever("127.0.0.1", args.gateway, cmd_port=args.cmd_port)

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        pass
    if args.log:
        Path(args.log).write_text(dump_log(gateway.command_log))
    return 0


def cmd_show_mapping(args) -> int:
    cfg = _load_config(args.config)
    table = _load_table(cfg, args.mapping)
    sys.stdout.write(dump_mapping(table) + "\n")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gesturebot",
                                     description="gesture-driven robot teleoperation stack")
    parser.add_argument("--config", help=f"pipeline config JSON (default: ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit an eigengesture model from a template directory")
    p.add_argument("template_dir")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--k-max", type=int, default=20)
    p.add_argument("--tau", type=float, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify a single 60x80 PBM image")
    p.add_argument("model_dir")
    p.add_argument("image")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gen-dataset", help="generate a synthetic template/probe dataset")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--labels", type=int, default=10)
    p.add_argument("--variants", type=int, default=100)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("eval", help="measure accuracy over a probe directory")
    p.add_argument("model_dir")
    p.add_argument("probe_dir")
    p.add_argument("--orientation", choices=[o.value for o in Orientation])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="run the pipeline over files or the network")
    p.add_argument("model_dir")
    p.add_argument("--frames", help="directory of numbered PGM frames")
    p.add_argument("--listen", type=int, help="UDP port for incoming frame chunks")
    p.add_argument("--count", type=int, default=None, help="stop after N received frames")
    p.add_argument("--idle-ms", type=int, default=2000)
    p.add_argument("--orientation", choices=[o.value for o in Orientation])
    p.add_argument("--mapping")
    p.add_argument("--world")
    p.add_argument("--log")
    p.add_argument("--send-class", metavar="HOST:PORT")
    p.add_argument("--send-state", metavar="HOST:PORT")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("send-frame", help="send PGM/PBM frames as UDP frame chunks")
    p.add_argument("source", help="file or directory")
    p.add_argument("--to", required=True, metavar="HOST:PORT")
    p.add_argument("--period-ms", type=int, default=0)
    p.set_defaults(func=cmd_send_frame)

    p = sub.add_parser("recv-frame", help="receive frame chunks and write PBM files")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--idle-ms", type=int, default=2000)
    p.set_defaults(func=cmd_recv_frame)

    p = sub.add_parser("serve", help="robot simulator + operator console gateway")
    p.add_argument("--world")
    p.add_argument("--gateway", type=int, default=9104)
    p.add_argument("--cmd-port", type=int, default=9102)
    p.add_argument("--mapping")
    p.add_argument("--model-dir")
    p.add_argument("--static-dir", help="console assets directory")
    p.add_argument("--log")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("show-mapping", help="print the active gesture mapping table")
    p.add_argument("--mapping")
    p.set_defaults(func=cmd_show_mapping)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GestureBotError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
