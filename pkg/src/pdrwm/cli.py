"""Command line entry points.

Three commands: ``run`` executes one scenario from a YAML config file
and writes its CSV artifacts, ``verify-all`` runs the ten numbered
acceptance checks, ``list-scenarios`` prints the registry.  Exit codes:
0 on success, 1 when a scenario check or acceptance criterion fails,
2 on a configuration problem.  Setting the environment variable named
by ``PDRWM_OUTPUT_DIR`` redirects all scenario output.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, PDRWMError
from .experiments import OUTPUT_DIR_ENV, list_scenarios, load_config, run_scenario
from .verify import verify_all


def _cmd_run(config_path: str) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        key = f" (key: {exc.key})" if exc.key else ""
        print(f"config error{key}: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_scenario(config)
    except ConfigError as exc:
        key = f" (key: {exc.key})" if exc.key else ""
        print(f"config error{key}: {exc}", file=sys.stderr)
        return 2
    except PDRWMError as exc:
        print(f"scenario {config.scenario} failed: {exc}", file=sys.stderr)
        return 1

    print(f"scenario {result.scenario} (config={result.digest} seed={result.seed})")
    for path in result.files:
        print(f"  wrote {path}")
    for check in result.checks:
        mark = "PASS" if check.passed else "FAIL"
        print(f"  check {check.name}: {mark} ({check.detail})")
    return 0 if result.passed else 1


def _cmd_verify_all(seed: int, only: list[int] | None) -> int:
    results = verify_all(seed=seed, indices=only)
    failed = [r.index for r in results if not r.passed]
    total = sum(r.elapsed for r in results)
    print(
        f"{len(results) - len(failed)}/{len(results)} criteria passed "
        f"in {total:.1f}s"
        + (f"; failing: {', '.join(str(i) for i in failed)}" if failed else "")
    )
    return 1 if failed else 0


def _cmd_list_scenarios() -> int:
    for name, desc in list_scenarios():
        print(f"{name:<14} {desc}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pdrwm",
        description="Position-dependent random walk Metropolis: scenarios and checks.",
        epilog=f"Set {OUTPUT_DIR_ENV} to redirect scenario output directories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a YAML config file")
    p_run.add_argument("config", help="path to the scenario config")

    p_verify = sub.add_parser("verify-all", help="run the ten acceptance checks")
    p_verify.add_argument("--seed", type=int, default=0, help="seed for every check")
    p_verify.add_argument(
        "--only", type=int, action="append", metavar="N",
        help="restrict to criterion N (repeatable)",
    )

    sub.add_parser("list-scenarios", help="list registered scenarios")

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args.config)
    if args.command == "verify-all":
        return _cmd_verify_all(args.seed, args.only)
    return _cmd_list_scenarios()


if __name__ == "__main__":
    raise SystemExit(main())
