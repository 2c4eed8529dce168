"""Command-line interface. Exit codes: 0 success, 1 runtime error, 2 usage error."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import ProcGraphError


def _vec3(text: str) -> np.ndarray:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(parts)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed {v} outside [0, 2^64)")
    return v


def _emit_json(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _samplers():
    from . import materials  # noqa: F401  (registers the library samplers)
    from .sampler import SAMPLERS

    return SAMPLERS


def _get_sampler(name: str):
    samplers = _samplers()
    if name not in samplers:
        raise ProcGraphError(f"unknown sampler {name!r}; known: {', '.join(sorted(samplers))}")
    return samplers[name]


# commands


def cmd_ops(args) -> int:
    from .catalog import manifest

    _emit_json(manifest(), args.out)
    return 0


def cmd_bake(args) -> int:
    from .evaluate import bake_texture
    from .io import read_graph, write_pfm, write_png
    from .materials import make_material

    if args.graph:
        graph = read_graph(args.graph)
    else:
        params = {}
        if args.params:
            with open(args.params) as fh:
                params = json.load(fh)
        graph = make_material(args.material, params)
    img = bake_texture(graph, args.channel, args.res, threads=args.threads)
    if args.validate_output:
        nan = int(np.isnan(img).any(axis=2).sum())
        print(json.dumps({"channel": args.channel, "nan_pixels": nan}))
    if args.out.endswith(".pfm"):
        write_pfm(args.out, img)
    else:
        write_png(args.out, img, srgb=args.channel == "surface")
    return 0


def cmd_sample(args) -> int:
    from .io import write_graph
    from .sampler import sample

    write_graph(args.out, sample(_get_sampler(args.sampler), args.seed))
    return 0


def cmd_trace(args) -> int:
    from .tracer import trace_distribution, trace_instance

    if args.mode == "instance":
        if not args.sampler:
            raise ProcGraphError("instance tracing needs --sampler")
        _emit_json(trace_instance(_get_sampler(args.sampler), args.seed).to_json(), args.out)
        return 0
    names = [args.sampler] if args.sampler else sorted(_samplers())
    start = time.perf_counter()
    docs = {name: trace_distribution(_get_sampler(name)).to_json() for name in names}
    elapsed = time.perf_counter() - start
    _emit_json(docs[names[0]] if args.sampler else docs, args.out)
    print(f"traced {len(names)} sampler(s) in {elapsed:.3f} s", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    from .analytics import diversity
    from .tracer import trace_distribution

    names = [args.sampler] if args.sampler else sorted(_samplers())
    reports = {name: diversity(trace_distribution(_get_sampler(name))).to_json() for name in names}
    _emit_json(reports[names[0]] if args.sampler else reports, args.out)
    return 0


def cmd_normalvar(args) -> int:
    from .analytics import normal_variation
    from .io import read_pfm, write_pfm

    normals = read_pfm(args.input)
    if normals.ndim != 3:
        raise ProcGraphError("normal map must be a 3-channel PFM")
    v, mean, (counts, edges) = normal_variation(normals, args.window)
    write_pfm(args.out, v)
    summary = {
        "window": args.window,
        "mean": mean,
        "valid_pixels": int(np.sum(np.linalg.norm(normals, axis=2) > 0.5)),
        "histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
    }
    _emit_json(summary, args.summary)
    return 0


def cmd_transpile(args) -> int:
    from .io import read_graph
    from .transpiler import EmitOptions, emit

    opts = EmitOptions(inline_max_uses=args.inline, use_operators=not args.no_operators, hsv_colors=args.hsv)
    src = emit(read_graph(args.input), opts)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(src)
    else:
        sys.stdout.write(src)
    return 0


def cmd_room(args) -> int:
    from .scene.generate import sample_room

    scene = sample_room(args.seed, n_cameras=args.cams, resolution=(args.res, args.res))
    scene.save(args.out)
    return 0


def cmd_campath(args) -> int:
    from .rng import RandomStream
    from .scene.cameras import path_to_cameras
    from .scene.generate import Scene
    from .scene.planning import rrt_star

    scene = Scene.load(args.scene)
    free = scene.free_space()
    result = rrt_star(
        args.start, args.goal, free, (free.lo, free.hi), RandomStream(args.seed),
        step=args.step, max_iters=args.max_iters,
    )
    cams = path_to_cameras(result.path, args.spacing, args.look_ahead, resolution=(args.res, args.res))
    doc = {
        "path": result.path.tolist(),
        "cost": result.cost,
        "iterations": result.iterations,
        "cameras": [c.to_json() for c in cams],
    }
    _emit_json(doc, args.out)
    if args.write_scene:
        scene.cameras = cams
        scene.save(args.scene)
    return 0


def cmd_rendergt(args) -> int:
    from .gt import render_gt
    from .io import depth_preview, normal_preview, write_pfm, write_png
    from .scene.collision import ColliderCache
    from .scene.generate import Scene

    scene = Scene.load(args.scene)
    if not scene.cameras:
        raise ProcGraphError("scene has no cameras")
    indices = [args.camera] if args.camera is not None else range(len(scene.cameras))
    os.makedirs(args.out, exist_ok=True)
    cache = ColliderCache()
    for k in indices:
        if not 0 <= k < len(scene.cameras):
            raise ProcGraphError(f"camera index {k} out of range (scene has {len(scene.cameras)})")
        res = (args.res, args.res) if args.res else None
        frame = render_gt(scene, scene.cameras[k], res, cache)
        stem = os.path.join(args.out, f"scene{scene.seed}_cam{k}")
        if args.format == "pfm":
            write_pfm(f"{stem}_depth.pfm", frame.depth)
            write_pfm(f"{stem}_normal.pfm", frame.normal)
        else:
            write_png(f"{stem}_depth.png", depth_preview(frame.depth), srgb=False)
            write_png(f"{stem}_normal.png", normal_preview(frame.normal), srgb=False)
    return 0


def cmd_dataset(args) -> int:
    from .dataset import run_dataset

    run_dataset(args.seed, args.scenes, args.cams, args.res, args.out, args.format, args.threads)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="procgraph", description="Procedural graphs, samplers, scenes and ground truth.")
    sub = p.add_subparsers(dest="command", required=True)

    ops = sub.add_parser("ops", help="operation catalog")
    ops.add_argument("action", choices=["list"])
    ops.add_argument("--out")
    ops.set_defaults(fn=cmd_ops)

    bake = sub.add_parser("bake", help="bake a material channel to an image")
    src = bake.add_mutually_exclusive_group(required=True)
    src.add_argument("--material", help="base material name")
    src.add_argument("--graph", help="material graph JSON")
    bake.add_argument("--params", help="JSON file of material parameters")
    bake.add_argument("--channel", choices=["surface", "roughness", "displacement"], default="surface")
    bake.add_argument("--res", type=_positive_int, default=512)
    bake.add_argument("--out", required=True, help=".png (preview) or .pfm (raw float)")
    bake.add_argument("--threads", type=_positive_int, default=1)
    bake.add_argument("--validate-output", action="store_true", help="report NaN pixel count")
    bake.set_defaults(fn=cmd_bake)

    smp = sub.add_parser("sample", help="run a sampler and write its graph")
    smp.add_argument("--sampler", required=True)
    smp.add_argument("--seed", type=_seed, default=0)
    smp.add_argument("--out", required=True)
    smp.set_defaults(fn=cmd_sample)

    tr = sub.add_parser("trace", help="instance or distribution trace")
    tr.add_argument("--sampler", help="sampler id; distribution mode traces the whole library when omitted")
    tr.add_argument("--mode", choices=["instance", "distribution"], default="instance")
    tr.add_argument("--seed", type=_seed, default=0)
    tr.add_argument("--out")
    tr.set_defaults(fn=cmd_trace)

    an = sub.add_parser("analyze", help="diversity report of a sampler's distribution")
    an.add_argument("--sampler", help="sampler id; all samplers when omitted")
    an.add_argument("--out")
    an.set_defaults(fn=cmd_analyze)

    nv = sub.add_parser("normalvar", help="normal-variation map of a normal PFM")
    nv.add_argument("--in", dest="input", required=True)
    nv.add_argument("--window", type=_positive_int, default=15)
    nv.add_argument("--out", required=True, help="V map as PFM")
    nv.add_argument("--summary", help="JSON summary path (stdout when omitted)")
    nv.set_defaults(fn=cmd_normalvar)

    tp = sub.add_parser("transpile", help="graph JSON to builder source")
    tp.add_argument("--in", dest="input", required=True)
    tp.add_argument("--out")
    tp.add_argument("--hsv", action="store_true", help="write colors as hsv literals")
    tp.add_argument("--no-operators", action="store_true", help="write arithmetic as op calls")
    tp.add_argument("--inline", type=int, default=1, help="inline nodes with at most this many consumers")
    tp.set_defaults(fn=cmd_transpile)

    rm = sub.add_parser("room", help="sample a furnished room")
    rm.add_argument("--seed", type=_seed, default=0)
    rm.add_argument("--cams", type=_positive_int, default=12)
    rm.add_argument("--res", type=_positive_int, default=128)
    rm.add_argument("--out", required=True)
    rm.set_defaults(fn=cmd_room)

    cp = sub.add_parser("campath", help="RRT* trajectory and cameras through a scene")
    cp.add_argument("--scene", required=True)
    cp.add_argument("--start", type=_vec3, required=True)
    cp.add_argument("--goal", type=_vec3, required=True)
    cp.add_argument("--seed", type=_seed, default=0)
    cp.add_argument("--step", type=float, default=0.5)
    cp.add_argument("--max-iters", type=_positive_int, default=5000)
    cp.add_argument("--spacing", type=float, default=0.5)
    cp.add_argument("--look-ahead", type=float, default=1.0)
    cp.add_argument("--res", type=_positive_int, default=128)
    cp.add_argument("--out")
    cp.add_argument("--write-scene", action="store_true", help="replace the scene's cameras with the path cameras")
    cp.set_defaults(fn=cmd_campath)

    rg = sub.add_parser("rendergt", help="depth and normal frames for a scene's cameras")
    rg.add_argument("--scene", required=True)
    rg.add_argument("--camera", type=int)
    rg.add_argument("--res", type=_positive_int)
    rg.add_argument("--format", choices=["pfm", "png"], default="pfm")
    rg.add_argument("--out", required=True)
    rg.set_defaults(fn=cmd_rendergt)

    ds = sub.add_parser("dataset", help="rooms, cameras and GT frames end to end")
    ds.add_argument("--seed", type=_seed, default=0)
    ds.add_argument("--scenes", type=_positive_int, default=1)
    ds.add_argument("--cams", type=_positive_int, default=12)
    ds.add_argument("--res", type=_positive_int, default=128)
    ds.add_argument("--format", choices=["pfm", "png"], default="pfm")
    ds.add_argument("--threads", type=_positive_int, default=1)
    ds.add_argument("--out", required=True)
    ds.set_defaults(fn=cmd_dataset)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else 2
    try:
        return args.fn(args)
    except (ProcGraphError, OSError, ValueError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
