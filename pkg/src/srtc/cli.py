"""Command-line front end: ``synth``, ``run``, ``eval`` and ``export``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import csv
import datetime
import hashlib
import json
import os
import subprocess
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .admm import AdmmConfig
from .data import (
    Blob,
    SceneSpec,
    SRT1Error,
    apply_missing,
    export_frames,
    read_mask,
    read_tensor,
    synth_scene,
    write_mask,
    write_tensor,
)
from .metrics import foreground_mask, frame_metrics, prf
from .tenpam import TRACE_FIELDS, SolverConfig, run

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

TRACE_COLUMNS = (
    "iter",
    "objective",
    "relchg_x",
    "relchg_s",
    "relchg_l",
    "relchg_u1",
    "relchg_u2",
    "relchg_u3",
    "literal_fit_criterion",
    "inner_iters",
    "seconds",
)


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _ints(text, count, name):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name}: expected {count} comma-separated integers, got {text!r}")
    if len(vals) != count:
        raise UsageError(f"{name}: expected {count} values, got {text!r}")
    return vals


def _floats(text, count, name):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{name}: expected {count} comma-separated numbers, got {text!r}")
    if len(vals) != count:
        raise UsageError(f"{name}: expected {count} values, got {text!r}")
    return vals


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _build_id():
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"srtc-{__version__}"


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _num(v):
    return format(float(v), ".17g")


# --- synth -------------------------------------------------------------------

def _place_blobs(args, dims, rng):
    h, w, t = dims
    size = args.blob_size
    vr, vc = args.blob_velocity
    blobs = []
    for _ in range(args.blobs):
        ranges = []
        for extent, v in ((h, vr), (w, vc)):
            lo = max(0.0, -v * (t - 1))
            hi = extent - size - max(0.0, v * (t - 1))
            if hi < lo:
                raise UsageError(
                    f"a {size}px blob moving at {args.blob_velocity} px/frame "
                    f"cannot stay inside a {h}x{w} frame for {t} frames"
                )
            ranges.append((lo, hi))
        pos = tuple(float(np.floor(rng.uniform(lo, hi + 1e-9))) for lo, hi in ranges)
        blobs.append(
            Blob(
                shape=args.blob_shape,
                size=(size, size),
                intensity=args.blob_intensity,
                velocity=(vr, vc),
                position=pos if args.blob_shape == "rectangle" else tuple(p + size / 2 for p in pos),
            )
        )
    return tuple(blobs)


def cmd_synth(args):
    dims = _ints(args.dims, 3, "--dims")
    bg_rank = _ints(args.bg_rank, 3, "--bg-rank")
    args.blob_velocity = _floats(args.blob_velocity, 2, "--blob-velocity")
    bg_range = _floats(args.bg_range, 2, "--bg-range")
    if args.blobs < 0:
        raise UsageError("--blobs must be nonnegative")
    if args.ratio is not None and not 0 <= args.ratio < 1:
        raise UsageError("--ratio must lie in [0, 1)")
    rng = np.random.default_rng([args.seed, 3])
    spec = SceneSpec(
        dims=dims,
        background_rank=bg_rank,
        blobs=_place_blobs(args, dims, rng),
        noise_sigma=args.noise,
        seed=args.seed,
        background_range=bg_range,
    )
    try:
        video, bg, fg = synth_scene(spec)
    except ValueError as exc:
        raise UsageError(str(exc))
    os.makedirs(args.out, exist_ok=True)
    write_tensor(os.path.join(args.out, "video.srt1"), video)
    write_tensor(os.path.join(args.out, "background.srt1"), bg)
    write_mask(os.path.join(args.out, "fgmask.srt1"), fg)
    if args.ratio is not None:
        observed, mask = apply_missing(video, args.ratio, seed=args.seed)
        write_tensor(os.path.join(args.out, "observed.srt1"), observed)
        write_mask(os.path.join(args.out, "mask.srt1"), mask)
    return EXIT_OK


# --- run ---------------------------------------------------------------------

def write_trace(path, trace, timing=False):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRACE_COLUMNS)
        for k, row in enumerate(trace.rows(), start=1):
            vals = [str(k)]
            for name in TRACE_FIELDS:
                if name == "inner_iters":
                    vals.append(str(int(row[name])))
                elif name == "elapsed_seconds":
                    vals.append(_num(row[name]) if timing else "")
                else:
                    vals.append(_num(row[name]))
            out.writerow(vals)


def cmd_run(args):
    started = _now()
    try:
        f = read_tensor(args.input)
        mask = read_mask(args.mask) if args.mask else np.ones(f.shape, dtype=bool)
    except (OSError, SRT1Error) as exc:
        raise DataError(str(exc))
    if mask.shape != f.shape:
        raise DataError(f"mask shape {mask.shape} differs from input shape {f.shape}")
    if not mask.any():
        raise DataError("mask has no observed entries")

    ranks = None if args.ranks == "auto" else _ints(args.ranks, 3, "--ranks")
    try:
        cfg = SolverConfig(
            lam=args.lam, rho=args.rho, ranks=ranks, outer_tol=args.tol,
            outer_max_iter=args.max_iter, admm=AdmmConfig(), scale=args.scale,
        )
        cfg.resolve_ranks(f.shape)
    except ValueError as exc:
        raise UsageError(str(exc))

    result = run(f, mask, cfg)
    os.makedirs(args.out, exist_ok=True)
    write_tensor(os.path.join(args.out, "x.srt1"), result.x)
    write_tensor(os.path.join(args.out, "s.srt1"), result.s)
    write_tensor(os.path.join(args.out, "l.srt1"), result.l)
    write_trace(os.path.join(args.out, "trace.csv"), result.trace, timing=args.timing)

    config = asdict(cfg)
    config["ranks"] = list(cfg.resolve_ranks(f.shape))
    inputs = {"input": {"path": args.input, "sha256": _sha256(args.input)}}
    if args.mask:
        inputs["mask"] = {"path": args.mask, "sha256": _sha256(args.mask)}
    elapsed = result.trace.elapsed_seconds
    manifest = {
        "build_id": _build_id(),
        "config": config,
        "inputs": inputs,
        "iterations": len(result.trace),
        "converged": result.converged,
        "final_objective": result.trace.objective[-1],
        "solve_seconds": elapsed[-1] if elapsed else 0.0,
        "started": started,
        "finished": _now(),
        "outputs": ["x.srt1", "s.srt1", "l.srt1", "trace.csv"],
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


# --- eval --------------------------------------------------------------------

def cmd_eval(args):
    if (args.fg_est is None) != (args.fg_truth is None):
        raise UsageError("--fg-est and --fg-truth must be given together")
    try:
        est = read_tensor(args.est)
        truth = read_tensor(args.truth)
        if args.fg_est is not None:
            fg_est = read_tensor(args.fg_est)
            fg_truth = read_mask(args.fg_truth)
    except (OSError, SRT1Error) as exc:
        raise DataError(str(exc))
    if est.shape != truth.shape:
        raise DataError(f"shape mismatch: {est.shape} vs {truth.shape}")
    try:
        fm = frame_metrics(truth, est)
    except ValueError as exc:
        raise DataError(str(exc))

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["frame", "psnr", "ssim"])
    for k, (p, s) in enumerate(zip(fm.psnr, fm.ssim)):
        out.writerow([k, _num(p), _num(s)])
    out.writerow(["mean", _num(fm.mean_psnr), _num(fm.mean_ssim)])
    if args.fg_est is not None:
        if fg_est.shape != fg_truth.shape:
            raise DataError(f"shape mismatch: {fg_est.shape} vs {fg_truth.shape}")
        if args.threshold == "otsu":
            pred = foreground_mask(fg_est)
        else:
            try:
                tau = float(args.threshold)
            except ValueError:
                raise UsageError(f"--threshold must be 'otsu' or a number, got {args.threshold!r}")
            pred = foreground_mask(fg_est, policy="fixed", tau=tau)
        p, r, f = prf(pred, fg_truth)
        out.writerow([])
        out.writerow(["precision", "recall", "fmeasure"])
        out.writerow([_num(p), _num(r), _num(f)])
    return EXIT_OK


# --- export ------------------------------------------------------------------

def cmd_export(args):
    try:
        x = read_tensor(args.input)
    except (OSError, SRT1Error) as exc:
        raise DataError(str(exc))
    export_frames(x, args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="srtc", description="Smooth robust tensor completion for video.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate a synthetic scene")
    s.add_argument("--dims", default="48,48,24")
    s.add_argument("--bg-rank", default="2,2,1")
    s.add_argument("--bg-range", default="20,60")
    s.add_argument("--blobs", type=int, default=1)
    s.add_argument("--blob-shape", choices=("rectangle", "disc"), default="rectangle")
    s.add_argument("--blob-size", type=int, default=6)
    s.add_argument("--blob-intensity", type=float, default=180.0)
    s.add_argument("--blob-velocity", default="1,1")
    s.add_argument("--noise", type=float, default=2.0)
    s.add_argument("--ratio", type=float, default=None,
                   help="also write observed.srt1 and mask.srt1 with this missing ratio")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("run", help="solve for x, s and l")
    r.add_argument("--input", required=True)
    r.add_argument("--mask")
    r.add_argument("--lambda", dest="lam", type=float, default=0.5)
    r.add_argument("--rho", type=float, default=0.001)
    r.add_argument("--ranks", default="auto")
    r.add_argument("--max-iter", type=int, default=50)
    r.add_argument("--tol", type=float, default=1e-6)
    r.add_argument("--scale", type=float, default=255.0,
                   help="data are divided by this before solving")
    r.add_argument("--timing", action="store_true",
                   help="fill the seconds column of trace.csv")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="PSNR/SSIM and optional P/R/F as CSV")
    e.add_argument("--est", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--fg-est")
    e.add_argument("--fg-truth")
    e.add_argument("--threshold", default="otsu")
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("export", help="write PGM frames")
    x.add_argument("--input", required=True)
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"srtc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"srtc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"srtc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"srtc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
