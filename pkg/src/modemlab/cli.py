"""Command-line front end.

Subcommands: constellation, codebook, train, evaluate, bench,
train-size-study. Options may come from a flat key=value config file
(--config) with explicit flags taking precedence. Exit codes: 0 ok,
2 config error, 3 capacity error, 4 training divergence, 5 IO error.
"""

import argparse
import csv
import os
import sys

import numpy as np

from . import codebook as cbk, constellation as gam, rng
from .datasets import generate_decode_dataset, generate_demod_dataset
from .detectors import (MLDetector, NeuralDetector,
                        build_candidates_from_codebook,
                        build_candidates_from_constellation)
from .errors import CapacityError, ConfigError, DivergenceError
from .evaluation import (DecodeLink, DemodLink, NoOpDetector, TimingRow,
                         ber_sweep, mac_count_pair, ml_candidate_count,
                         time_per_query, write_ber_csv, write_timing_csv)

PROFILES = {
    "full": {"hidden": (1024, 512, 256, 128), "per_index": 1 << 18,
              "per_index_test": 1 << 17, "epochs": 10},
    "desk": {"hidden": (128, 64), "per_index": 1 << 14,
             "per_index_test": 1 << 13, "epochs": 10},
}

CALIBRATION_NOTE = (
    "demod sigma1^2 = n1*P1/(k1*10^(EbN0dB/10)); "
    "decode sigma2^2 = n2*P2/(2*k2*10^(EbN0dB/10))"
)


def _read_config_file(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: bad config line {line!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(args, parser):
    """Fill argparse Namespace holes from the config file, then defaults."""
    file_vals = _read_config_file(args.config) if args.config else {}
    for action in parser._actions:
        name = action.dest
        if name in ("help", "config"):
            continue
        if getattr(args, name, None) is None:
            if name in file_vals:
                raw = file_vals[name]
                if action.type is not None:
                    raw = action.type(raw)
                setattr(args, name, raw)
            elif action.default is not None:
                setattr(args, name, action.default)
    return args


def _csv_ints(text):
    return tuple(int(v) for v in str(text).split(","))


def _csv_floats(text):
    return tuple(float(v) for v in str(text).split(","))


def _fingerprint(args, **extra):
    fp = {"generator": f"{rng.GENERATOR_NAME}/{rng.GENERATOR_VERSION}",
          "calibration": CALIBRATION_NOTE,
          "modemlab_threads": os.environ.get("MODEMLAB_THREADS", "1")}
    for key, val in sorted(vars(args).items()):
        if key in ("config", "func", "parser_ref") or val is None:
            continue
        fp[key] = val
    fp.update(extra)
    return fp


def _hidden(args):
    if args.hidden is not None:
        return _csv_ints(args.hidden)
    return PROFILES[args.profile]["hidden"]


def _per_index(args, split="train"):
    if split == "train" and args.per_index is not None:
        return int(args.per_index)
    prof = PROFILES[args.profile]
    return prof["per_index"] if split == "train" else prof["per_index_test"]


def _build_decode_codebook(k, seed, path=None):
    if path:
        cb = cbk.load_codebook(path)
        if cb.k != k:
            raise ConfigError(f"codebook {path} has k2={cb.k}, expected {k}")
        return cb
    return cbk.build_codebook(k, rate=0.5, power=1.0, seed=seed)


def _train_nn(args, task, k, snr_db, per_index, cb=None):
    hidden = _hidden(args)
    epochs = args.epochs if args.epochs is not None else PROFILES[args.profile]["epochs"]
    det = NeuralDetector(hidden=hidden, epochs=int(epochs),
                         batch_size=int(args.batch_size), lr=float(args.lr),
                         seed=int(args.seed), complex_input=False)
    if task == "demod":
        c = gam.build_constellation(k, power=1.0)
        ds = generate_demod_dataset(c, int(args.n1), snr_db, per_index,
                                    seed=int(args.seed), split="train")
    else:
        ds = generate_decode_dataset(cb, snr_db, per_index,
                                     seed=int(args.seed), split="train")
    # dataset features are already split to reals; after fitting, flip the
    # detector to consume raw channel outputs for the demod task
    det.fit(ds.features, ds.labels)
    det.complex_input = task == "demod"
    return det


def cmd_constellation(args):
    c = gam.build_constellation(int(args.k1), power=float(args.power))
    gam.write_constellation_csv(c, args.out)
    print(f"wrote {c.order}-point constellation to {args.out}")
    return 0


def cmd_codebook(args):
    cb = cbk.build_codebook(int(args.k2), rate=float(args.rate),
                            power=float(args.power), seed=int(args.seed))
    cbk.save_codebook(cb, args.out)
    print(f"wrote {1 << cb.k} x {cb.n} codebook to {args.out}")
    return 0


def cmd_train(args):
    task, k = args.task, int(args.k)
    snr_db = float(args.snr_db)
    per_index = _per_index(args)
    cb = None
    if task == "decode":
        cb = _build_decode_codebook(k, int(args.seed), args.codebook)
    det = _train_nn(args, task, k, snr_db, per_index, cb=cb)
    det.save(args.out, extra={"task": task, "k": k, "snr_db": snr_db,
                              "per_index": per_index,
                              "codebook_seed": None if cb is None else cb.seed})
    if args.loss_csv:
        with open(args.loss_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "mean_batch_loss"])
            for i, loss in enumerate(det.loss_history_, start=1):
                w.writerow([i, repr(loss)])
    if det.loss_history_:
        print(f"trained {task} k={k}: epoch loss "
              f"{det.loss_history_[0]:.5f} -> {det.loss_history_[-1]:.5f}")
    print(f"wrote model to {args.out}")
    return 0


def _make_link(args, task, k):
    if task == "demod":
        c = gam.build_constellation(k, power=1.0)
        return DemodLink(c, int(args.n1)), build_candidates_from_constellation(c, int(args.n1))
    cb = _build_decode_codebook(k, int(args.seed), args.codebook)
    return DecodeLink(cb), build_candidates_from_codebook(cb)


def cmd_evaluate(args):
    task, k = args.task, int(args.k)
    snrs = _csv_floats(args.snr_db)
    link, cands = _make_link(args, task, k)
    which = str(args.detectors).split(",")
    reports = []
    sweep_kw = dict(seed=int(args.seed), max_trials=int(args.max_trials),
                    min_trials=int(args.min_trials),
                    min_errors=int(args.min_errors))
    if "ml" in which:
        reports.append(ber_sweep(link, MLDetector(cands), snrs,
                                 detector_tag="ML", **sweep_kw))
    if "nn" in which:
        if not args.model:
            raise ConfigError("NN evaluation requires --model")
        det = NeuralDetector.load(args.model)
        _check_model(det, task, k, cands.n)
        reports.append(ber_sweep(link, det, snrs, detector_tag="NN", **sweep_kw))
    if not reports:
        raise ConfigError(f"no detectors selected from {args.detectors!r}")
    write_ber_csv(args.out, reports, _fingerprint(args, task=task, k=k))
    print(f"wrote {sum(len(r.rows) for r in reports)} BER rows to {args.out}")
    return 0


def _check_model(det, task, k, n):
    net = det.net_
    expected_in = 2 * n if task == "demod" else n
    if net.dims[-1] != k or net.dims[0] != expected_in:
        raise ConfigError(
            f"model dims {net.dims} do not match task={task} k={k}")
    if det.complex_input != (task == "demod"):
        raise ConfigError(f"model task tag does not match task={task}")


def cmd_bench(args):
    k_grid = _csv_ints(args.k_grid)
    reps = int(args.repetitions)
    hidden = _hidden(args)
    rows = []
    gen = rng.stream(int(args.seed), rng.ROLE_BENCH)
    for task in str(args.tasks).split(","):
        for k in k_grid:
            link, cands = _make_link(args, task, k)
            sigma2 = link.sigma2(10.0)
            _, Y = link.transmit(64, sigma2, int(args.seed), stream_index=k)
            queries = list(Y)
            ml = MLDetector(cands)
            rows.append(TimingRow(
                detector=f"ML-{task}", k=k,
                median_s=time_per_query(ml, queries, repetitions=reps),
                ml_candidates=ml_candidate_count(k)))
            det = NeuralDetector(hidden=hidden, epochs=0, seed=int(args.seed),
                                 complex_input=(task == "demod"))
            det.fit(Y[:2], link._labels[:2])  # untrained weights; timing only
            macs, _ = mac_count_pair(cands.n, hidden, k,
                                     complex_input=(task == "demod"))
            rows.append(TimingRow(
                detector=f"NN-{task}", k=k,
                median_s=time_per_query(det, queries, repetitions=reps),
                mac_count=macs))
        rows.append(TimingRow(
            detector=f"noop-{task}", k=0,
            median_s=time_per_query(NoOpDetector(), [np.zeros(4)],
                                    repetitions=reps)))
    write_timing_csv(args.out, rows, _fingerprint(args))
    print(f"wrote {len(rows)} timing rows to {args.out}")
    return 0


def cmd_train_size_study(args):
    task, k = "decode", int(args.k)
    snr_db = float(args.snr_db)
    sizes = _csv_ints(args.sizes)
    cb = _build_decode_codebook(k, int(args.seed), args.codebook)
    link = DecodeLink(cb)
    cands = build_candidates_from_codebook(cb)
    sweep_kw = dict(seed=int(args.seed), max_trials=int(args.max_trials),
                    min_trials=int(args.min_trials),
                    min_errors=int(args.min_errors))
    ml_report = ber_sweep(link, MLDetector(cands), [snr_db],
                          detector_tag="ML", **sweep_kw)
    lines = []
    for size in sizes:
        det = _train_nn(args, task, k, snr_db, size, cb=cb)
        rep = ber_sweep(link, det, [snr_db], detector_tag="NN", **sweep_kw)
        lines.append((size, rep.rows[0]))
    with open(args.out, "w") as fh:
        for key, val in sorted(_fingerprint(args, task=task, k=k).items()):
            fh.write(f"# {key}={val}\n")
        fh.write("task,detector,k,train_per_index,eb_n0_db,errors,bits,"
                 "ber,ci_lo,ci_hi\n")
        mr = ml_report.rows[0]
        fh.write(f"decode,ML,{k},,{snr_db!r},{mr['errors']},{mr['bits']},"
                 f"{mr['ber']!r},{mr['ci_lo']!r},{mr['ci_hi']!r}\n")
        for size, row in lines:
            fh.write(f"decode,NN,{k},{size},{snr_db!r},{row['errors']},"
                     f"{row['bits']},{row['ber']!r},{row['ci_lo']!r},"
                     f"{row['ci_hi']!r}\n")
    print(f"wrote training-size study to {args.out}")
    return 0


def _add_common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=0)


def _add_nn_opts(p):
    p.add_argument("--profile", choices=("full", "desk"), default="desk")
    p.add_argument("--hidden", help="comma list overriding the profile")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--per-index", type=int, help="training samples per label")


def _add_eval_opts(p):
    p.add_argument("--max-trials", type=int, default=200_000)
    p.add_argument("--min-trials", type=int, default=2_000)
    p.add_argument("--min-errors", type=int, default=100)


def build_parser():
    top = argparse.ArgumentParser(prog="modemlab", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constellation", help="export a disc-GAM constellation CSV")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_constellation, parser_ref=p)

    p = sub.add_parser("codebook", help="generate and save a Gaussian codebook")
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_codebook, parser_ref=p)

    p = sub.add_parser("train", help="train a neural demodulator/decoder")
    p.add_argument("--task", choices=("demod", "decode"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--n1", type=int, default=10)
    p.add_argument("--codebook", help="codebook file (decode task)")
    p.add_argument("--out", required=True)
    p.add_argument("--loss-csv")
    _add_common(p)
    _add_nn_opts(p)
    p.set_defaults(func=cmd_train, parser_ref=p)

    p = sub.add_parser("evaluate", help="measure BER over an Eb/N0 grid")
    p.add_argument("--task", choices=("demod", "decode"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--snr-db", required=True, help="comma list of dB values")
    p.add_argument("--n1", type=int, default=10)
    p.add_argument("--detectors", default="ml,nn")
    p.add_argument("--model", help="trained model file (for NN)")
    p.add_argument("--codebook")
    p.add_argument("--out", required=True)
    _add_common(p)
    _add_eval_opts(p)
    p.set_defaults(func=cmd_evaluate, parser_ref=p)

    p = sub.add_parser("bench", help="per-query timing across a k grid")
    p.add_argument("--tasks", default="demod,decode")
    p.add_argument("--k-grid", default="2,4,6,8")
    p.add_argument("--n1", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=101)
    p.add_argument("--codebook")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.add_argument("--profile", choices=("full", "desk"), default="desk")
    p.add_argument("--hidden")
    p.set_defaults(func=cmd_bench, parser_ref=p)

    p = sub.add_parser("train-size-study",
                       help="decode BER vs training-set size")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--sizes", required=True, help="comma list per-index sizes")
    p.add_argument("--n1", type=int, default=10)
    p.add_argument("--codebook")
    p.add_argument("--out", required=True)
    _add_common(p)
    _add_nn_opts(p)
    _add_eval_opts(p)
    p.set_defaults(func=cmd_train_size_study, parser_ref=p)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args, args.parser_ref)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except DivergenceError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
