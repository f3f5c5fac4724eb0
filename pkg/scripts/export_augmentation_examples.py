#!/usr/bin/env python3
"""Export before/after series for each augmentation method on one window.

Writes one CSV per method (columns: channel,index,original,augmented),
ready for any external plotting tool, e.g. to eyeball how strongly a
parameter distorts a gesture before sweeping it.

    python scripts/export_augmentation_examples.py --out-dir runs/aug-examples
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from motionid import (
    SynthConfig,
    add_random_noise,
    draw_warp_cuts,
    generate,
    intensity_scale,
    temporal_scale,
    warp,
)


def export(path: Path, original, augmented) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("channel,index,original,augmented\n")
        for c in range(original.n_channels):
            before = original.values[c].tolist()
            after = augmented.values[c].tolist()
            for i, (b, a) in enumerate(zip(before, after)):
                fh.write(f"{c},{i},{b!r},{a!r}\n")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sigma", type=float, default=0.1)
    parser.add_argument("--time-factor", type=float, default=1.2)
    parser.add_argument("--intensity-factor", type=float, default=0.8)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = generate(SynthConfig(n_users=1, samples_per_user=1, seed=args.seed))
    signal = dataset.samples[0].signal
    rng = np.random.default_rng(args.seed)

    cases = {
        "noise": add_random_noise(signal, 0.0, args.sigma, rng),
        "temporal": temporal_scale(signal, args.time_factor),
        "intensity": intensity_scale(signal, args.intensity_factor),
        "warp_lr": warp(signal, "lr", draw_warp_cuts(signal.length, rng)),
        "warp_rl": warp(signal, "rl", draw_warp_cuts(signal.length, rng)),
    }
    for name, augmented in cases.items():
        path = out_dir / f"{name}.csv"
        export(path, signal, augmented)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
