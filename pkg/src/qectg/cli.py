"""Command-line front end: info, gen-data, train, eval, sweep."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, mlp, tiles
from .decoders import DistributedDecoder, GatedDecoder
from .lattice import build_lattice
from .tiles import make_tiles


def _add_mlp_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hidden", default="128,64", help="hidden layer sizes, comma separated")
    parser.add_argument("--lr", type=float, default=0.05, help="learning rate")
    parser.add_argument("--momentum", type=float, default=0.9)
    parser.add_argument("--batch", type=int, default=128, help="mini-batch size")
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--l2", type=float, default=0.0, help="L2 penalty")
    parser.add_argument("--seed", type=int, default=0, help="training seed")


def _parse_hidden(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _model_paths(prefix: str) -> dict[str, str]:
    return {
        "tables": f"{prefix}.tables.txt",
        "net4": f"{prefix}.net4.txt",
        "gate": f"{prefix}.gate.txt",
    }


def cmd_info(args) -> int:
    lat = build_lattice(args.d)
    t = make_tiles(lat)
    print(
        f"distance {lat.d}: {lat.data_count} data qubits, {lat.check_count} checks "
        f"({len(lat.z_check_ids)} Z, {len(lat.x_check_ids)} X), {len(t)} tiles"
    )
    print("id kind plaquette support")
    for c in lat.checks:
        qubits = " ".join(str(q) for q in sorted(c.support))
        print(f"{c.id:3d}  {c.kind}  ({c.plaquette[0]},{c.plaquette[1]})  {qubits}")
    print("logical X support:", " ".join(str(q) for q in sorted(lat.logical_x_support)))
    print("logical Z support:", " ".join(str(q) for q in sorted(lat.logical_z_support)))
    return 0


def cmd_gen_data(args) -> int:
    lat = build_lattice(args.d)
    ds = harness.generate_dataset(lat, args.p, args.n, args.seed)
    harness.save_dataset(ds, args.out)
    frac = ds.class_fractions()
    print(
        f"wrote {ds.n} records to {args.out} "
        f"(class fractions I={frac[0]:.3f} X={frac[1]:.3f} Z={frac[2]:.3f} Y={frac[3]:.3f})"
    )
    return 0


def _wrap_classifier(model, classes):
    clf = mlp.MlpClassifier(classes=classes)
    clf.classes_ = np.asarray(classes)
    clf.model_ = model
    return clf


def _load_trained(prefix: str, mode: str):
    """Reassemble a fitted decoder from its saved table and network files."""
    paths = _model_paths(prefix)
    tables = tiles.load_tables(paths["tables"])
    lat = build_lattice(tables.d)
    fm = tiles.TileFeatureMap(tables.d)
    fm.lattice_ = lat
    fm.tiles_ = make_tiles(lat)
    fm.tables_ = tables
    fm.n_features_out_ = 4 * len(fm.tiles_)
    cls = DistributedDecoder if mode == "distributed" else GatedDecoder
    dec = cls(distance=tables.d)
    dec.lattice_ = lat
    dec.feature_map_ = fm
    dec.net_ = _wrap_classifier(mlp.load_model(paths["net4"]), (0, 1, 2, 3))
    if mode == "gated":
        dec.gate_ = _wrap_classifier(mlp.load_model(paths["gate"]), (0, 1))
    return dec


def cmd_train(args) -> int:
    ds = harness.load_dataset(args.data)
    paths = _model_paths(args.out_prefix)
    common = dict(
        distance=ds.d,
        hidden_layer_sizes=_parse_hidden(args.hidden),
        learning_rate=args.lr,
        momentum=args.momentum,
        batch_size=args.batch,
        epochs=args.epochs,
        l2_penalty=args.l2,
        seed=args.seed,
    )
    cls = DistributedDecoder if args.mode == "distributed" else GatedDecoder
    dec = cls(**common).fit(ds.syndromes, ds.classes)
    tiles.save_tables(dec.feature_map_.tables_, paths["tables"])
    mlp.save_model(dec.net_.model_, paths["net4"])
    wrote = [paths["tables"], paths["net4"]]
    if args.mode == "gated":
        mlp.save_model(dec.gate_.model_, paths["gate"])
        wrote.append(paths["gate"])
        print(f"non-identity training fraction: {dec.hard_fraction_:.3f}")
    print(f"trained {args.mode} decoder on {ds.n} records (d={ds.d}, p={ds.p}, seed={ds.seed})")
    print(f"final training loss: {dec.net_.loss_trace_[-1]:.4f}")
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _resolve_decoder(kind: str, lat, models_prefix: str | None):
    if kind in ("simple", "mwpm"):
        return harness.make_decoder(kind, lat)
    if not models_prefix:
        raise SystemExit(f"decoder {kind!r} needs --models PREFIX")
    dec = _load_trained(models_prefix, kind)
    if dec.lattice_.d != lat.d:
        raise SystemExit(f"models were trained for d={dec.lattice_.d}, not d={lat.d}")
    return dec


def cmd_eval(args) -> int:
    lat = build_lattice(args.d)
    dec = _resolve_decoder(args.decoder, lat, args.models)
    res = harness.evaluate(dec, lat, args.p, args.trials, args.seed, args.workers)
    print(harness.CSV_HEADER)
    print(harness._csv_row(res))
    print(
        f"{res.decoder} d={res.d} p={res.p}: ler={res.ler:.6g} "
        f"[{res.ci_low:.6g}, {res.ci_high:.6g}] (99.9% CI, {res.trials} trials)"
    )
    return 0


def cmd_sweep(args) -> int:
    lat = build_lattice(args.d)
    kinds = [k.strip() for k in args.decoders.split(",") if k.strip()]
    grid = [float(v) for v in args.p_grid.split(",") if v.strip()]
    decoders = [_resolve_decoder(k, lat, args.models) for k in kinds]
    results = harness.sweep(decoders, lat, grid, args.trials, args.seed, args.csv,
                            workers=args.workers)
    print(f"wrote {len(results)} rows to {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qectg",
        description="Rotated surface code decoding workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print the check table for a distance")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("gen-data", help="sample a training dataset")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True, help="depolarizing rate")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", required=True, help="output path")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("train", help="fit decoder models from a dataset")
    p.add_argument("--mode", choices=("distributed", "gated"), required=True)
    p.add_argument("--data", required=True, help="dataset path")
    p.add_argument("--out-prefix", required=True, help="model file prefix")
    _add_mlp_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="Monte Carlo logical error rate")
    p.add_argument("--decoder", choices=harness.DECODER_KINDS, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--models", help="model file prefix for trained decoders")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker processes (default ${harness.WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="evaluate decoders over an error-rate grid")
    p.add_argument("--decoders", required=True, help="comma-separated kinds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p-grid", required=True, help="comma-separated error rates")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--models", help="model file prefix for trained decoders")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
