"""SRT1 tensor files, PGM frames and the command-line pipeline.

Runs ``synth -> run -> eval -> export`` in a temporary directory through the
same entry point as the ``srtc`` console script.
"""

import os
import tempfile

from srtc.cli import main
from srtc.data import read_tensor

with tempfile.TemporaryDirectory() as tmp:
    scene = os.path.join(tmp, "scene")
    out = os.path.join(tmp, "out")
    main(["synth", "--dims", "32,32,8", "--ratio", "0.5", "--seed", "4", "--out", scene])
    print("scene files:", sorted(os.listdir(scene)))
    print("video.srt1 bytes:", os.path.getsize(os.path.join(scene, "video.srt1")), "= 16 + 8*32*32*8")

    main([
        "run", "--input", os.path.join(scene, "observed.srt1"),
        "--mask", os.path.join(scene, "mask.srt1"),
        "--ranks", "2,2,1", "--lambda", "0.3", "--max-iter", "15", "--out", out,
    ])
    print("run outputs:", sorted(os.listdir(out)))
    with open(os.path.join(out, "trace.csv")) as fh:
        lines = fh.read().splitlines()
    print(lines[0])
    print(lines[-1])

    print("background metrics (last lines of eval output):")
    main([
        "eval", "--est", os.path.join(out, "l.srt1"),
        "--truth", os.path.join(scene, "background.srt1"),
        "--fg-est", os.path.join(out, "s.srt1"),
        "--fg-truth", os.path.join(scene, "fgmask.srt1"),
    ])

    frames = os.path.join(tmp, "frames")
    main(["export", "--input", os.path.join(out, "x.srt1"), "--out", frames])
    print("exported", len(os.listdir(frames)), "PGM frames; x shape", read_tensor(os.path.join(out, "x.srt1")).shape)
