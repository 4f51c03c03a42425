# file: dmtg/runner/cli.py

import argparse
import os
import sys
from typing import List, Optional

from config.experiment_config import ExperimentConfig, load_config
from config.project_config import CONFIG
from dmtg.errors import ConfigError, DmtgError
from dmtg.tasksuite import generate, save_suite

logger = CONFIG.get_logger("cli")

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2

DEFAULT_CONFIG = os.path.join("configs", "default.yaml")


def _parse_methods(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [m.strip() for m in text.split(",") if m.strip()]


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    seeds = [args.seed_override] if args.seed_override is not None else None
    methods = _parse_methods(getattr(args, "methods", None))
    return config.with_overrides(output_dir=args.out, seeds=seeds, methods=methods)


# ------------------------- Verbs -------------------------
def cmd_gen(args) -> int:
    config = _load(args)
    out_dir = config.output_dir
    for seed in config.seeds:
        path = os.path.join(out_dir, f"suite_seed{seed}.npz")
        save_suite(generate(config.planted_spec(seed)), path)
    logger.info(f"✅ {len(config.seeds)} suite(s) written to {out_dir}")
    return EXIT_OK


def cmd_run(args) -> int:
    from dmtg.runner.pipeline import run
    run(_load(args), workers=args.workers)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from dmtg.runner.pipeline import run
    args.methods = "oracle"
    run(_load(args), workers=args.workers)
    return EXIT_OK


def cmd_report(args) -> int:
    from dmtg.runner.report import report
    records_dir = args.records_dir or args.out or CONFIG.get_results_dir()
    result = report(records_dir, plot=args.plot)
    print(result.text)
    print()
    print(result.groups.to_string(index=False))
    return EXIT_OK


def cmd_check(args) -> int:
    from dmtg.runner.checks import run_checks
    results = run_checks()
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if not failed else EXIT_RUNTIME_ERROR


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "oracle": cmd_oracle, "report": cmd_report, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m dmtg",
        description="One-shot differentiable multi-task grouping experiments.\n\n"
                    "Available commands:\n"
                    "  gen     - Materialize the task suite of every seed as .npz\n"
                    "  run     - Execute the methods of a config over its seeds\n"
                    "  oracle  - Brute-force partition table only\n"
                    "  report  - Aggregate run records into comparison tables\n"
                    "  check   - Run the quick invariant checks",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument("command", choices=list(COMMANDS), help="Command to run")
    parser.add_argument("records_dir", nargs="?", default=None, help="Records directory (report only)")
    parser.add_argument("--config", default=DEFAULT_CONFIG, help=f"Experiment config YAML (default: {DEFAULT_CONFIG})")
    parser.add_argument("--out", default=None, help="Output directory, overrides output_dir")
    parser.add_argument("--workers", type=int, default=None, help="Parallel seed workers (default: DMTG_WORKERS or 1)")
    parser.add_argument("--seed-override", type=int, default=None, help="Run this single seed instead of the config's")
    parser.add_argument("--methods", default=None, help="Comma-separated subset of methods")
    parser.add_argument("--plot", action="store_true", help="Also save a NormGain bar chart (report only)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers is not None and args.workers < 1:
        logger.error("❌ --workers must be at least 1")
        return EXIT_CONFIG_ERROR
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"❌ Config error in '{e.field}': {e}")
        return EXIT_CONFIG_ERROR
    except DmtgError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_RUNTIME_ERROR
    except Exception as e:
        logger.exception(f"❌ Unexpected failure: {e}")
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
