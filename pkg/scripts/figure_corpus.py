"""Run the seven plate composites through the CLI and print their verdicts.

Usage: python3 scripts/figure_corpus.py [--svg-dir DIR]
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import time
from pathlib import Path

from matg import cli
from matg import fixtures as fx


def run(case, svg_dir: Path | None) -> dict:
    argv = ["compose", case.a, case.b]
    if svg_dir is not None:
        argv += ["--svg", str(svg_dir / f"{case.name}.svg")]
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    if code != 0:
        raise SystemExit(f"{case.name}: exit code {code}")
    return json.loads(buf.getvalue())["result"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--svg-dir", type=Path)
    args = ap.parse_args()
    if args.svg_dir:
        args.svg_dir.mkdir(parents=True, exist_ok=True)
    head = f"{'case':16} {'uniform':8} {'homogeneous':15} {'stress-free':12} {'comps':>5}  {'LT':12} class"
    print(head)
    print("-" * len(head))
    t0 = time.perf_counter()
    for case in fx.FIGURES:
        r = run(case, args.svg_dir)
        lt = r["locally_trivial"]
        classes = sorted({c["label"] for c in r["pointwise_class"].values()})
        print(f"{case.name:16} {str(r['uniform']):8} {r['homogeneous']:15} "
              f"{r['stress_free_configuration']:12} {len(r['components']):5}  "
              f"{str((lt['horizontal'], lt['vertical'])):12} {','.join(classes)}")
    print(f"\n{len(fx.FIGURES)} composites in {time.perf_counter() - t0:.2f} s")


if __name__ == "__main__":
    main()
