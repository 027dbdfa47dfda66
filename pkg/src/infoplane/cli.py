"""Command-line front end.

Subcommands::

    gen      write a synthetic dataset dump (blobs or the exact Markov
             chain case) and optionally a trained network
    conduct  forward a network over a dataset dump and write activations
             plus conductance records as a new dump
    plane    information-plane CSV from a dump
    ite      efficiency-profile CSV from a dump
    dpi      DPI violation report as JSON from a dump
    analyze  plane + ite + dpi in one pass

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.  All
diagnostics go to standard error; results go to files (or standard
output for ``dpi`` without ``--out``).  Every stochastic step is seeded
and defaults to seed 0, never wall-clock entropy.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .conductance import IGConfig, batch_conductance
from .dumps import export_csv, read_dump, write_dump
from .exceptions import ValidationError
from .information import BinningConfig, LabelSet, binned_mi, discrete_entropy, quantize
from .ite import ITEConfig, ite_profile
from .network import LayerTrace, NetworkSpec, build_network, forward_collect, load_network, save_network
from .plane import PlaneConfig, activation_plane, conductance_plane, dpi_check
from .synthetic import BlobsSpec, accuracy, circle_centers, gen_blobs, markov_dataset, mod2_floor2_case, train_sgd


def _log(message: str) -> None:
    print(message, file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract
    # reserves 2 for I/O problems, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        _log(f"{self.prog}: error: {message}")
        raise SystemExit(1)


def _parse_dims(text: str) -> tuple:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --net-dims {text!r}: {exc}")
    if len(dims) < 2:
        raise ValidationError("--net-dims needs at least input and output sizes")
    return dims


def _split_dump(dump_dir):
    """Load a dump and separate the index-0 input layer from real layers."""
    traces, records, labels, manifest = read_dump(dump_dir)
    inputs = [t for t in traces if t.layer_index == 0]
    layers = [t for t in traces if t.layer_index > 0]
    if not inputs:
        raise ValidationError(f"dump {dump_dir} has no index-0 input layer")
    return inputs[0].activations, layers, records, labels, manifest


def _cmd_gen(args) -> int:
    out = Path(args.out)
    if args.markov:
        if args.net_dims or args.train:
            raise ValidationError("--markov generates an exact chain; --net-dims/--train do not apply")
        case = mod2_floor2_case()
        x, stages, labels = markov_dataset(case, copies=args.copies)
        traces = [LayerTrace(layer_index=0, layer_name="input", activations=x)] + [
            LayerTrace(layer_index=i + 1, layer_name=f"stage{i + 1}", activations=s)
            for i, s in enumerate(stages)
        ]
        write_dump(out, labels, traces=traces, model_name="markov-mod2-floor2")
        _log(f"gen: wrote markov chain dump ({x.shape[0]} samples) to {out}")
        return 0

    spec = BlobsSpec(
        classes=args.classes,
        per_class=args.per_class,
        centers=circle_centers(args.classes, radius=args.radius),
        spread=args.spread,
        seed=args.seed,
    )
    x, labels = gen_blobs(spec)
    name = f"blobs-k{args.classes}-seed{args.seed}"
    write_dump(
        out,
        labels,
        traces=[LayerTrace(layer_index=0, layer_name="input", activations=x)],
        model_name=name,
    )
    _log(f"gen: wrote {x.shape[0]} blob samples to {out}")

    if args.net_dims:
        dims = _parse_dims(args.net_dims)
        if args.activations:
            acts = tuple(args.activations.split(","))
        else:
            acts = ("tanh",) * (len(dims) - 2) + ("softmax",)
        net = build_network(NetworkSpec(layer_dims=dims, activations=acts, seed=args.seed))
        if args.train:
            net = train_sgd(
                net, x, labels,
                epochs=args.epochs, lr=args.lr, batch_size=args.batch_size, seed=args.seed,
            )
            _log(f"gen: trained network, accuracy {accuracy(net, x, labels):.4f}")
        save_network(net, out / "net.json")
        _log(f"gen: wrote network to {out / 'net.json'}")
    elif args.train:
        raise ValidationError("--train needs --net-dims")
    return 0


def _cmd_conduct(args) -> int:
    net = load_network(args.net)
    x, _, _, labels, manifest = _split_dump(args.data)
    if x.shape[1] != net.input_dim:
        raise ValidationError(
            f"dump input has {x.shape[1]} features but the network expects {net.input_dim}"
        )
    if args.method == "integrated":
        if args.baseline == "zero":
            baseline = None
        else:
            raw = json.loads(Path(args.baseline).read_text(encoding="utf-8"))
            baseline = np.asarray(raw, dtype=np.float64)
        cfg = IGConfig(baseline=baseline, steps=args.ig_steps)
    else:
        cfg = None

    traces = forward_collect(net, x)
    records = [
        batch_conductance(net, layer, x, method=args.method, cfg=cfg)
        for layer in range(1, net.num_layers + 1)
    ]
    all_traces = [LayerTrace(layer_index=0, layer_name="input", activations=x)] + traces
    write_dump(args.out, labels, traces=all_traces, records=records, model_name=manifest.model_name)
    _log(f"conduct: wrote {len(traces)} activation and {len(records)} conductance layers to {args.out}")
    return 0


def _plane_config(args) -> PlaneConfig:
    return PlaneConfig(
        estimator=args.estimator,
        binning=BinningConfig(bins_per_dim=args.bins),
        ksg_k=args.k,
        knn_k=args.label_k,
        bootstrap=args.bootstrap,
        seed=args.seed,
    )


def _plane_rows(args, basis_list, cfg):
    x, layers, records, labels, _ = _split_dump(args.data)
    rows = []
    for basis in basis_list:
        if basis == "activation":
            if not layers:
                raise ValidationError("dump has no activation layers beyond the input")
            rows.extend(activation_plane(layers, x, labels, cfg))
        else:
            if not records:
                raise ValidationError("dump has no conductance layers")
            rows.extend(conductance_plane(records, x, labels, cfg))
    return rows


def _cmd_plane(args) -> int:
    bases = ["activation", "conductance"] if args.basis == "both" else [args.basis]
    rows = _plane_rows(args, bases, _plane_config(args))
    export_csv(rows, args.out, units=args.units)
    _log(f"plane: wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_ite(args) -> int:
    x, layers, _, labels, _ = _split_dump(args.data)
    if not layers:
        raise ValidationError("dump has no activation layers beyond the input")
    cfg = ITEConfig(
        alpha=args.alpha, beta=args.beta, gamma=args.gamma,
        binning=BinningConfig(bins_per_dim=args.bins),
        knn_k=args.label_k,
    )
    rows = ite_profile(layers, x, labels, cfg)
    export_csv(rows, args.out, units=args.units)
    _log(f"ite: wrote {len(rows)} rows to {args.out}")
    return 0


def _dpi_payload(data_dir, tolerance: float, bins: int, label_k: int = 10) -> dict:
    x, layers, records, labels, _ = _split_dump(data_dir)
    cfg = PlaneConfig(binning=BinningConfig(bins_per_dim=bins), knn_k=label_k, bootstrap=0)
    binning = cfg.binning
    prefix_x = discrete_entropy(quantize(x, binning)).value_nats
    prefix_y = binned_mi(x, labels, binning).value_nats

    reports = []
    for basis, rows in (
        ("activation", activation_plane(layers, x, labels, cfg) if layers else []),
        ("conductance", conductance_plane(records, x, labels, cfg) if records else []),
    ):
        if not rows:
            continue
        for axis, values, prefix in (
            ("x-side", [r.i_x for r in rows], prefix_x),
            ("y-side", [r.i_y for r in rows], prefix_y),
        ):
            report = dpi_check(values, prefix=prefix, tolerance=tolerance, basis=basis, axis=axis)
            chain = [{"layer": 0, "value_nats": prefix}] + [
                {"layer": r.layer_index, "value_nats": v} for r, v in zip(rows, values)
            ]
            reports.append(
                {
                    "basis": basis,
                    "axis": axis,
                    "chain": chain,
                    "violations": [
                        {"layer_l": v.layer_l, "layer_k": v.layer_k, "delta_nats": v.delta_nats}
                        for v in report.violations
                    ],
                }
            )
    if not reports:
        raise ValidationError("dump has no analyzable layers")
    return {"tolerance": tolerance, "reports": reports}


def _cmd_dpi(args) -> int:
    payload = _dpi_payload(args.data, args.tolerance, args.bins, args.label_k)
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _log(f"dpi: wrote report to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_analyze(args) -> int:
    out_dir = Path(args.out_dir if args.out_dir else args.data)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = _plane_config(args)

    x, layers, records, labels, _ = _split_dump(args.data)
    rows = []
    if layers:
        rows.extend(activation_plane(layers, x, labels, cfg))
    if records:
        rows.extend(conductance_plane(records, x, labels, cfg))
    if not rows:
        raise ValidationError("dump has no analyzable layers")
    export_csv(rows, out_dir / "plane.csv", units=args.units)
    _log(f"analyze: wrote {out_dir / 'plane.csv'}")

    if layers:
        ite_rows = ite_profile(layers, x, labels, ITEConfig(binning=cfg.binning, knn_k=cfg.knn_k))
        export_csv(ite_rows, out_dir / "ite.csv", units=args.units)
        _log(f"analyze: wrote {out_dir / 'ite.csv'}")

    payload = _dpi_payload(args.data, args.tolerance, args.bins, args.label_k)
    (out_dir / "dpi.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    _log(f"analyze: wrote {out_dir / 'dpi.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infoplane", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a synthetic dataset dump", parents=[])
    gen.add_argument("--out", required=True, help="output dump directory")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--classes", type=int, default=3)
    gen.add_argument("--per-class", type=int, default=100)
    gen.add_argument("--spread", type=float, default=1.0)
    gen.add_argument("--radius", type=float, default=4.0)
    gen.add_argument("--markov", action="store_true", help="exact mod-2/floor-2 chain instead of blobs")
    gen.add_argument("--copies", type=int, default=64, help="rows per markov support point")
    gen.add_argument("--net-dims", help="comma-separated layer sizes, e.g. 2,16,16,3")
    gen.add_argument("--activations", help="comma-separated activations per layer")
    gen.add_argument("--train", action="store_true", help="train the generated network")
    gen.add_argument("--epochs", type=int, default=200)
    gen.add_argument("--lr", type=float, default=0.1)
    gen.add_argument("--batch-size", type=int, default=32)
    gen.set_defaults(func=_cmd_gen)

    conduct = sub.add_parser("conduct", help="dump activations and conductances for a network")
    conduct.add_argument("--net", required=True, help="network JSON file")
    conduct.add_argument("--data", required=True, help="dataset dump directory")
    conduct.add_argument("--out", required=True, help="output dump directory")
    conduct.add_argument("--method", choices=["gradient", "integrated"], default="gradient")
    conduct.add_argument("--ig-steps", type=int, default=128)
    conduct.add_argument("--baseline", default="zero", help="'zero' or path to a JSON vector")
    conduct.set_defaults(func=_cmd_conduct)

    def common_estimator_flags(p):
        p.add_argument("--bins", type=int, default=16)
        p.add_argument("--label-k", type=int, default=10,
                       help="kNN neighbour count for the label posterior")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--units", choices=["nats", "bits"], default="nats")

    plane = sub.add_parser("plane", help="information-plane CSV")
    plane.add_argument("--data", required=True)
    plane.add_argument("--out", required=True)
    plane.add_argument("--basis", choices=["activation", "conductance", "both"], default="activation")
    plane.add_argument("--estimator", choices=["binning", "ksg", "kde", "gaussian"], default="binning")
    plane.add_argument("--k", type=int, default=5, help="KSG neighbour count")
    plane.add_argument("--bootstrap", type=int, default=20)
    common_estimator_flags(plane)
    plane.set_defaults(func=_cmd_plane)

    ite = sub.add_parser("ite", help="efficiency-profile CSV")
    ite.add_argument("--data", required=True)
    ite.add_argument("--out", required=True)
    ite.add_argument("--alpha", type=float, default=1.0 / 3.0)
    ite.add_argument("--beta", type=float, default=1.0 / 3.0)
    ite.add_argument("--gamma", type=float, default=1.0 / 3.0)
    common_estimator_flags(ite)
    ite.set_defaults(func=_cmd_ite)

    dpi = sub.add_parser("dpi", help="DPI violation report as JSON")
    dpi.add_argument("--data", required=True)
    dpi.add_argument("--out", help="output JSON path (default: standard output)")
    dpi.add_argument("--tolerance", type=float, default=0.02)
    dpi.add_argument("--bins", type=int, default=16)
    dpi.add_argument("--label-k", type=int, default=10,
                     help="kNN neighbour count for the label posterior")
    dpi.set_defaults(func=_cmd_dpi)

    analyze = sub.add_parser("analyze", help="plane + ite + dpi in one pass")
    analyze.add_argument("--data", required=True)
    analyze.add_argument("--out-dir", help="output directory (default: the dump directory)")
    analyze.add_argument("--estimator", choices=["binning", "ksg", "kde", "gaussian"], default="binning")
    analyze.add_argument("--k", type=int, default=5)
    analyze.add_argument("--bootstrap", type=int, default=20)
    analyze.add_argument("--tolerance", type=float, default=0.02)
    common_estimator_flags(analyze)
    analyze.set_defaults(func=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except ValidationError as exc:
        _log(f"error: {exc}")
        return 1
    except OSError as exc:
        _log(f"i/o error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
