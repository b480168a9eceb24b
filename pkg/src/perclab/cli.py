"""Command-line entry point: ``perclab <kind> --config FILE [--seed N] [--workers K] [--out DIR]``.

Exit codes: 0 on success, 1 for a config error, 2 for a runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .harness import KINDS, ConfigError, load_config, run

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="perclab", description="Run a seeded percolation experiment and write CSV plus manifest.")
    ap.add_argument("kind", choices=KINDS, help="experiment kind")
    ap.add_argument("--config", required=True, help="JSON config (a manifest.json is accepted)")
    ap.add_argument("--seed", type=int, default=None, help="override the config's master seed")
    ap.add_argument("--workers", type=int, default=None, help="worker processes (default: $PERCLAB_WORKERS or 1)")
    ap.add_argument("--out", default="perclab-out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        if cfg.setdefault("kind", args.kind) != args.kind:
            raise ConfigError(f"config kind {cfg['kind']!r} does not match command {args.kind!r}")
        manifest = run(cfg, args.out, workers=args.workers, seed=args.seed)
    except ConfigError as exc:
        print(f"perclab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"perclab: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name in manifest.outputs:
        print(f"{args.out}/{name}")
    print(f"{args.out}/manifest.json")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
