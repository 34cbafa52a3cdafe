"""Command-line front end: ``qkstars {prep,train,eval,curve,baseline,bench}``.

Exit codes: 0 success, 2 schema error, 3 validation error, 4 SVM
non-convergence (outputs are still written), 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as E
from .config import ExperimentConfig
from .errors import SchemaError, ValidationError

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_VALIDATION = 3
EXIT_CONVERGENCE = 4
EXIT_IO = 5

log = logging.getLogger("qkstars")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkstars", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON experiment config")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--workers", type=int, help="threads used for kernel matrices")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("prep", parents=[common], help="clean the catalogue and engineer features")
    sub.add_parser("train", parents=[common], help="train a kernel SVM and save the model")
    ev = sub.add_parser("eval", parents=[common], help="evaluate a saved model")
    ev.add_argument("--model", type=Path, help="model JSON (default: <out>/model.json)")
    sub.add_parser("curve", parents=[common], help="learning curve for quantum and RBF kernels")
    sub.add_parser("baseline", parents=[common], help="KNN and logistic-regression baselines")
    sub.add_parser("bench", parents=[common], help="Gram-matrix build time vs worker count")
    return parser


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig().validate()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out is not None:
        cfg.out = str(args.out)
    return cfg.validate()


def dispatch(args) -> int:
    cfg = load_config(args)
    cmd = args.command
    if cmd == "prep":
        result = E.run_prep(cfg)
    elif cmd == "train":
        result = E.run_train(cfg)
    elif cmd == "eval":
        result = E.run_eval(cfg, args.model or Path(cfg.out) / "model.json")
    elif cmd == "curve":
        result = E.run_curve(cfg)
    elif cmd == "baseline":
        result = E.run_baseline(cfg)
    else:
        result = E.run_bench(cfg)
    print(json.dumps(E._clean_json(result), indent=2, sort_keys=True))
    if cmd == "train" and not result.get("converged", True):
        return EXIT_CONVERGENCE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return dispatch(args)
    except SchemaError as exc:
        log.error("%s", exc)
        return EXIT_SCHEMA
    except ValidationError as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
