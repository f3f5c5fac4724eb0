"""Command-line interface.

Subcommands: synth, validate, augment, sweep, report. Global flags
--seed, --threads and --config may appear before or after the
subcommand. Exit codes: 0 success, 1 usage or configuration error,
2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .augment import AugmentationSpec, Method, augment_once
from .config import load_experiment_config
from .dataio import Dataset, GestureSample, load_dataset, load_embeddings, write_dataset
from .errors import ConfigError, ConvergenceError, DataFormatError
from .protocol import run_experiment
from .report import read_grid_csv, recompute_markers, render_combined_table, render_independent_table, write_report
from .seeds import derive_seed
from .synth import SynthConfig, generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; remap to the documented 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _global_flags() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=None, help="base seed (default 0)")
    shared.add_argument("--threads", type=int, default=None, help="parallel workers for sweeps")
    shared.add_argument("--config", default=None, help="experiment configuration file (sweep)")
    return shared


def build_parser() -> argparse.ArgumentParser:
    shared = _global_flags()
    parser = _Parser(prog="motionid", description=__doc__, parents=[shared])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_synth = sub.add_parser("synth", parents=[shared], help="generate a synthetic dataset")
    p_synth.add_argument("--out", required=True, help="output windowed-sample file")
    p_synth.add_argument("--users", type=int, default=100)
    p_synth.add_argument("--samples-per-user", type=int, default=200)
    p_synth.add_argument("--length", type=int, default=150)
    p_synth.add_argument("--channels", type=int, default=6)
    p_synth.add_argument("--jitter-std", type=float, default=0.1)
    p_synth.add_argument("--round-decimals", type=int, default=6,
                         help="quantize values to this many decimals (-1: full precision)")
    p_synth.set_defaults(func=cmd_synth)

    p_val = sub.add_parser("validate", parents=[shared],
                           help="check a dataset or embedding file against the format")
    p_val.add_argument("file", help="file to validate")
    p_val.add_argument("--kind", choices=("auto", "dataset", "embeddings"), default="auto")
    p_val.set_defaults(func=cmd_validate)

    p_aug = sub.add_parser("augment", parents=[shared],
                           help="apply one augmentation to every sample of a dataset")
    p_aug.add_argument("--in", dest="input", required=True, help="input windowed-sample file")
    p_aug.add_argument("--out", required=True, help="output windowed-sample file")
    p_aug.add_argument("--method", required=True,
                       choices=tuple(m.value for m in Method))
    p_aug.add_argument("--sigma", type=float, default=0.1, help="noise std dev")
    p_aug.add_argument("--mu", type=float, default=0.0, help="noise mean")
    p_aug.add_argument("--f-t", type=float, default=1.0, help="temporal scaling factor")
    p_aug.add_argument("--f-i", type=float, default=1.0, help="intensity scaling factor")
    p_aug.add_argument("--plot-data", nargs="?", const="", default=None, metavar="FILE",
                       help="also write paired original/augmented series for the first "
                            "sample (default FILE: <out>.plot.csv)")
    p_aug.set_defaults(func=cmd_augment)

    p_sweep = sub.add_parser("sweep", parents=[shared],
                             help="run the evaluation sweep described by --config")
    p_sweep.add_argument("--out-dir", required=True, help="directory for report files")
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("report", parents=[shared],
                           help="re-render report tables from a grid.csv dump")
    p_rep.add_argument("--grid", required=True, help="grid.csv from a previous sweep")
    p_rep.add_argument("--out-dir", default=None,
                       help="directory for tables (default: alongside the grid)")
    p_rep.set_defaults(func=cmd_report)
    return parser


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        n_users=args.users,
        samples_per_user=args.samples_per_user,
        length=args.length,
        n_channels=args.channels,
        jitter_std=args.jitter_std,
        round_decimals=None if args.round_decimals < 0 else args.round_decimals,
        seed=args.seed if args.seed is not None else 0,
    )
    dataset = generate(cfg)
    write_dataset(dataset, args.out)
    print(f"wrote {len(dataset)} samples ({cfg.n_users} users x {cfg.samples_per_user} events, "
          f"{cfg.n_channels} channels x {cfg.length}) to {args.out}")
    return EXIT_OK


def _sniff_kind(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if fields[:3] == ["user_id", "event_index", "channel"]:
                return "dataset"
            if fields[:2] == ["user_id", "event_index"]:
                return "embeddings"
            break
    raise DataFormatError("unrecognized header; expected a dataset or embedding file", path, 1)


def cmd_validate(args) -> int:
    kind = _sniff_kind(args.file) if args.kind == "auto" else args.kind
    if kind == "dataset":
        dataset = load_dataset(args.file)
        counts = {u: len(dataset.samples_for(u)) for u in dataset.users}
        print(f"{args.file}: valid dataset file")
        print(f"  samples: {len(dataset)}  users: {len(dataset.users)}  "
              f"channels: {dataset.n_channels}  length: {dataset.length}  "
              f"sample_rate_hz: {dataset.sample_rate_hz:g}")
        print(f"  samples per user: min {min(counts.values())}, max {max(counts.values())}")
    else:
        table = load_embeddings(args.file)
        print(f"{args.file}: valid embedding file")
        print(f"  embeddings: {len(table)}  dimension: {table.dim}")
    return EXIT_OK


def cmd_augment(args) -> int:
    dataset = load_dataset(args.input)
    spec = AugmentationSpec(
        method=Method(args.method),
        mean=args.mu,
        sigma=args.sigma,
        time_factor=args.f_t,
        intensity_factor=args.f_i,
    )
    seed = args.seed if args.seed is not None else 0
    augmented = []
    for i, sample in enumerate(dataset.samples):
        rng = np.random.default_rng(derive_seed(seed, i, 0))
        augmented.append(
            GestureSample(
                user_id=sample.user_id,
                event_index=sample.event_index,
                signal=augment_once(sample.signal, spec, rng),
            )
        )
    out = Dataset(augmented)
    write_dataset(out, args.out)
    print(f"augmented {len(out)} samples with {args.method} -> {args.out}")

    if args.plot_data is not None:
        plot_path = args.plot_data or f"{args.out}.plot.csv"
        original = dataset.samples[0].signal
        warped = out.samples[0].signal
        with open(plot_path, "w", encoding="utf-8") as fh:
            fh.write("channel,index,original,augmented\n")
            for c in range(original.n_channels):
                before = original.values[c].tolist()
                after = warped.values[c].tolist()
                for i, (b, a) in enumerate(zip(before, after)):
                    fh.write(f"{c},{i},{b!r},{a!r}\n")
        print(f"plot data for sample {dataset.samples[0].key} -> {plot_path}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.config is None:
        raise ConfigError("sweep needs --config pointing at an experiment file")
    cfg = load_experiment_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    report = run_experiment(cfg)
    paths = write_report(report, args.out_dir)
    baseline = report.baseline()
    print(f"swept {len(report.cells)} cells over {report.metadata['n_eval_users']} users")
    print(f"baseline: kernel={baseline.kernel} C={baseline.C:g} "
          f"accuracy={100 * baseline.mean_accuracy:.2f}% "
          f"FAR={100 * baseline.mean_far:.2f}% FRR={100 * baseline.mean_frr:.2f}%")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = recompute_markers(read_grid_csv(args.grid))
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.grid).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    table1 = out_dir / "table_independent.txt"
    table1.write_text(render_independent_table(rows), encoding="utf-8")
    table2 = out_dir / "table_combined.txt"
    table2.write_text(render_combined_table(rows), encoding="utf-8")
    print(f"wrote {table1}")
    print(f"wrote {table2}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataFormatError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConvergenceError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
