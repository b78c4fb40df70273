"""``simulate`` command line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .harness import ExperimentConfig, ExperimentError, run_experiment


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simulate", description="Run a near-field beam training experiment.")
    p.add_argument("config", type=Path, help="experiment configuration (JSON)")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: config value, "
                   "then $AIRYBEAM_OUTPUT_DIR, then ./results)")
    p.add_argument("--seed", type=int, default=None, help="override the configured RNG seed")
    p.add_argument("--threads", type=int, default=1, help="FFT and search worker threads")
    p.add_argument("--quick", action="store_true", help="shrink every codebook axis 4x for smoke tests")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = ExperimentConfig.from_file(
            args.config,
            output_dir=args.out,
            rng_seed=args.seed,
            threads=args.threads,
            quick=args.quick or None,
        )
        run_experiment(cfg)
    except ExperimentError as exc:
        json.dump({"error": type(exc.__cause__ or exc).__name__, "message": str(exc), "context": exc.context},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1
    except Exception as exc:  # config/IO problems before the run starts
        json.dump({"error": type(exc).__name__, "message": str(exc), "context": {"config": str(args.config)}},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1
    print(os.path.join(str(cfg.output_dir), "manifest.json"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
