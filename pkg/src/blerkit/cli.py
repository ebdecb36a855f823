"""Command-line entry point: train / eval / sweep-loss / verify / grad-check.

All compute-bearing subcommands read a JSON config that is schema-validated
(unknown keys rejected) before anything touches the filesystem.  Exit codes:
0 success, 2 config error, 3 check failure, 4 I/O error.
"""

import argparse
import hashlib
import json
import os
import sys

import jsonschema
import numpy as np

from . import codes, losses, propositions
from .autodiff import finite_diff_check
from .decoder import DecoderParams
from .deweight import SnrGrid
from .montecarlo import mc_link_run, mc_rows, loss_sweep, write_csv
from .rng import derive_stream
from .training import TrainConfig, run_training

_NUM = {"type": "number"}
_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["code_path", "seed"],
    "properties": {
        "code_path": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "decoder": {
            "type": "object", "additionalProperties": False,
            "properties": {"iterations": _INT, "params_path": {"type": "string"}},
        },
        "train": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "pre_batches": {"type": "integer", "minimum": 0},
                "fine_batches": {"type": "integer", "minimum": 0},
                "batch_size": _INT, "learning_rate": _NUM,
                "epoch_length": _INT,
            },
        },
        "eval": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "snr_db": {"type": "array", "items": _NUM, "minItems": 1},
                "max_blocks": _INT, "target_block_errors": _INT,
                "uncoded": {"type": "boolean"},
            },
        },
        "snr_mode": {
            "type": "object", "additionalProperties": False,
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["point", "range", "deweight"]},
                "lo": _NUM, "hi": _NUM, "bins": _INT,
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "point": _NUM,
            },
        },
        "loss": {
            "type": "object", "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": list(losses.LOSS_NAMES)},
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "gamma": _NUM, "p": {"type": "number", "minimum": 1},
            },
        },
        "sweep": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "lo": _NUM, "hi": _NUM, "bins": _INT,
                "blocks_per_point": _INT, "reference_snr": _NUM,
                "losses": {"type": "array", "items": {"enum": list(losses.LOSS_NAMES)}},
            },
        },
    },
}


class ConfigError(Exception):
    pass


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc))
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA,
                            cls=jsonschema.validators.Draft202012Validator)
    except jsonschema.ValidationError as exc:
        raise ConfigError("config error at %s: %s" % (exc.json_path, exc.message))
    return raw


def config_hash(raw):
    # output_dir only says where results land, not what they are, so it is
    # excluded to keep the hash stable across output locations
    scrubbed = {k: v for k, v in raw.items() if k != "output_dir"}
    return hashlib.sha256(json.dumps(scrubbed, sort_keys=True).encode()).hexdigest()[:16]


def _resolve(raw, args):
    """Apply flag overrides and fill defaults; returns the effective config."""
    cfg = json.loads(json.dumps(raw))   # deep copy
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["output_dir"] = args.out
    cfg.setdefault("output_dir", ".")
    cfg.setdefault("decoder", {})
    cfg["decoder"].setdefault("iterations", 5)
    return cfg


def _train_config(cfg):
    train = cfg.get("train", {})
    mode = cfg.get("snr_mode", {"mode": "range"})
    loss = cfg.get("loss", {"kind": "product"})
    return TrainConfig(
        pre_batches=train.get("pre_batches", 300),
        fine_batches=train.get("fine_batches", 300),
        batch_size=train.get("batch_size", 200),
        learning_rate=train.get("learning_rate", 1e-3),
        epoch_length=train.get("epoch_length", 50),
        loss=loss.get("kind", "product"),
        loss_alpha=loss.get("alpha", 0.5),
        loss_gamma=loss.get("gamma"),
        loss_p=loss.get("p", 2.0),
        snr_mode=mode.get("mode", "range"),
        snr_lo=mode.get("lo", 1.0),
        snr_hi=mode.get("hi", 7.0),
        snr_bins=mode.get("bins", 7),
        snr_point=mode.get("point", 4.0),
        delta=mode.get("delta", 1e-6),
        iterations=cfg["decoder"]["iterations"],
        seed=cfg["seed"],
    )


def _load_params(cfg, code):
    path = cfg["decoder"].get("params_path")
    if path is None:
        return DecoderParams.identity(code, iterations=cfg["decoder"]["iterations"])
    try:
        return DecoderParams.load(path)
    except OSError as exc:
        raise OSError("cannot read decoder params %s: %s" % (path, exc)) from exc


def cmd_train(cfg, args):
    code = codes.load_alist(cfg["code_path"])
    tconf = _train_config(cfg)
    if args.dry_run:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    initial = _load_params(cfg, code) if cfg["decoder"].get("params_path") else None
    params, report = run_training(tconf, code, initial)
    os.makedirs(cfg["output_dir"], exist_ok=True)
    params.save(os.path.join(cfg["output_dir"], "params.json"))
    out = report.to_dict()
    # wall clock varies run to run; the written report must be reproducible
    out.pop("wall_clock_s", None)
    out["config_hash"] = config_hash(cfg)
    out["seed"] = cfg["seed"]
    with open(os.path.join(cfg["output_dir"], "train_report.json"), "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    print("wrote params.json and train_report.json to %s" % cfg["output_dir"])
    return 0


def cmd_eval(cfg, args):
    code = None if cfg.get("eval", {}).get("uncoded") else codes.load_alist(cfg["code_path"])
    params = _load_params(cfg, code) if code is not None else None
    if args.dry_run:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    ev = cfg.get("eval", {})
    snrs = ev.get("snr_db", [4.0])
    results = []
    for snr in snrs:
        results.append(mc_link_run(
            code, params, snr,
            max_blocks=ev.get("max_blocks", 100000),
            target_block_errors=ev.get("target_block_errors", 100),
            seed=cfg["seed"], workers=args.workers))
    os.makedirs(cfg["output_dir"], exist_ok=True)
    path = os.path.join(cfg["output_dir"], "eval.csv")
    write_csv(path, mc_rows(results), cfg["seed"], config_hash(cfg))
    summary = {"config_hash": config_hash(cfg), "results": [r.to_dict() for r in results]}
    with open(os.path.join(cfg["output_dir"], "eval.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print("wrote %s" % path)
    return 0


def cmd_sweep_loss(cfg, args):
    code = codes.load_alist(cfg["code_path"])
    params = _load_params(cfg, code)
    if args.dry_run:
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return 0
    sw = cfg.get("sweep", {})
    grid = SnrGrid(sw.get("lo", 0.0), sw.get("hi", 6.0), sw.get("bins", 7))
    names = sw.get("losses", list(losses.LOSS_NAMES))
    fns = {name: losses.make_loss(name) for name in names}
    rows = loss_sweep(code, params, fns, grid, sw.get("blocks_per_point", 20000),
                      sw.get("reference_snr", grid.values[0]), seed=cfg["seed"])
    csv_rows = []
    for r in rows:
        csv_rows.append((r["snr_db"], "loss_%s_mean" % r["loss"], r["mean_loss"], r["ci_half"]))
        csv_rows.append((r["snr_db"], "loss_%s_norm" % r["loss"], r["normalized_loss"], 0.0))
    os.makedirs(cfg["output_dir"], exist_ok=True)
    path = os.path.join(cfg["output_dir"], "loss_sweep.csv")
    write_csv(path, csv_rows, cfg["seed"], config_hash(cfg))
    print("wrote %s" % path)
    return 0


def cmd_verify(args):
    seed = args.seed if args.seed is not None else 12345
    report = propositions.verify_all(seed)
    for check in report["checks"]:
        print("%-34s %s  margin=%.3e" % (check["name"],
                                         "PASS" if check["passed"] else "FAIL",
                                         check["margin"]))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "verify_report.json"), "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return 0 if report["passed"] else 3


def cmd_grad_check(args, cfg=None):
    tol = args.tolerance if args.tolerance is not None else 1e-4
    seed = args.seed if args.seed is not None else 7
    if cfg is not None:
        test_codes = {os.path.basename(cfg["code_path"]): codes.load_alist(cfg["code_path"])}
    else:
        test_codes = {name: codes.bundled_code(name)
                      for name in ("hamming_7_4", "ldpc_96_48")}
    worst = 0.0
    flagged_total = 0
    failed = False
    for cname, code in test_codes.items():
        rng = derive_stream(seed, "gradcheck_" + cname)
        params = DecoderParams(rng.normal(-2.0, 0.5, size=3),
                               1.0 + 0.1 * rng.normal(size=code.num_edges))
        bits = rng.integers(0, 2, size=(1, code.k), dtype=np.uint8)
        cw = code.encode(bits)
        # a genuinely noisy point: near-saturated decodes put some losses in a
        # cancellation regime where finite differences cannot resolve anything
        llrs = (2.0 * cw - 1.0) * 1.0 + rng.normal(0, 1.5, size=(1, code.n))
        for name in losses.LOSS_NAMES:
            rep = finite_diff_check(code, params, losses.make_loss(name),
                                    llrs, bits)
            worst = max(worst, rep["max_rel_error"])
            flagged_total += rep["num_flagged"]
            ok = rep["max_rel_error"] <= tol
            failed = failed or not ok
            print("%-12s %-10s max_rel_err=%.3e flagged=%d %s"
                  % (cname, name, rep["max_rel_error"], rep["num_flagged"],
                     "PASS" if ok else "FAIL"))
    print("overall max relative error: %.3e (tolerance %.1e)" % (worst, tol))
    return 3 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="blerkit",
                                     description="LDPC decoder training and link evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("train", "eval", "sweep-loss"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--dry-run", action="store_true")
        p.add_argument("--out")
    pv = sub.add_parser("verify")
    pv.add_argument("--seed", type=int)
    pv.add_argument("--out")
    pg = sub.add_parser("grad-check")
    pg.add_argument("--config")
    pg.add_argument("--seed", type=int)
    pg.add_argument("--tolerance", type=float)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "grad-check":
            cfg = None
            if args.config:
                cfg = _resolve(load_config(args.config), argparse.Namespace(seed=None, out=None))
            return cmd_grad_check(args, cfg)
        cfg = _resolve(load_config(args.config), args)
        if args.command == "train":
            return cmd_train(cfg, args)
        if args.command == "eval":
            return cmd_eval(cfg, args)
        return cmd_sweep_loss(cfg, args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
