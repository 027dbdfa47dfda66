"""Dump directory format and CSV emission.

A dump is one directory holding ``manifest.json`` plus one raw binary
file per layer.  Tensors are 32-bit little-endian floats, row-major
[N, d_l]; labels are 32-bit little-endian unsigned ints.  The manifest
records, in stable key order::

    version, model_name, num_samples, class_count, layers, labels_file

with each layer entry carrying name, index, dims, kind (activation or
conductance) and the relative file name.  Within each kind the layer
indices must be strictly increasing.  By convention index 0 with kind
``activation`` holds the raw input batch.

This format is the contract consumed by external exporters: anything
that writes a valid version-1 dump can be analysed by this package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conductance import ConductanceRecord
from .exceptions import (
    DumpCorruptionError,
    DumpFormatError,
    UnsupportedVersionError,
    ValidationError,
)
from .information import LabelSet
from .ite import ITERow
from .network import LayerTrace
from .plane import PlaneRow

LN2 = float(np.log(2.0))
MANIFEST_NAME = "manifest.json"
KINDS = ("activation", "conductance")
UNITS = ("nats", "bits")

PLANE_HEADER = "layer_index,layer_name,basis,i_x,i_y,std_i_x,std_i_y"
ITE_HEADER = "layer_index,entropy,compression,preservation,usefulness,efficiency"


@dataclass(frozen=True)
class LayerEntry:
    """One layer's file record inside a manifest."""

    name: str
    index: int
    dims: tuple
    kind: str
    file: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}")
        if len(self.dims) != 2 or any(int(d) < 0 for d in self.dims):
            raise ValidationError(f"dims must be [N, d], got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "index": self.index,
            "dims": list(self.dims),
            "kind": self.kind,
            "file": self.file,
        }


@dataclass(frozen=True)
class DumpManifest:
    """Validated description of a dump directory."""

    version: int
    model_name: str
    num_samples: int
    class_count: int
    layers: tuple
    labels_file: str

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValidationError("num_samples must be >= 1")
        if self.class_count < 1:
            raise ValidationError("class_count must be >= 1")
        if not self.layers:
            raise ValidationError("manifest lists no layers")
        for kind in KINDS:
            indices = [e.index for e in self.layers if e.kind == kind]
            if any(b <= a for a, b in zip(indices, indices[1:])):
                raise ValidationError(f"{kind} layer indices must be strictly increasing")
        for e in self.layers:
            if e.dims[0] != self.num_samples:
                raise ValidationError(
                    f"layer {e.name} row count {e.dims[0]} != num_samples {self.num_samples}"
                )

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "model_name": self.model_name,
            "num_samples": self.num_samples,
            "class_count": self.class_count,
            "layers": [e.to_dict() for e in self.layers],
            "labels_file": self.labels_file,
        }


def _write_tensor(path: Path, values: np.ndarray) -> None:
    path.write_bytes(np.ascontiguousarray(values, dtype="<f4").tobytes())


def write_dump(
    out_dir,
    labels: LabelSet,
    traces=None,
    records=None,
    model_name: str = "network",
) -> DumpManifest:
    """Write traces and/or conductance records plus labels as a dump.

    Existing files are overwritten.  Returns the manifest that was
    written.  Layer entries are ordered activations first, then
    conductances, each ascending by index.
    """
    traces = list(traces or [])
    records = list(records or [])
    if not traces and not records:
        raise ValidationError("nothing to write: no traces and no records")
    n = len(labels)
    for t in traces + records:
        mat = t.activations if isinstance(t, LayerTrace) else t.values
        if mat.shape[0] != n:
            raise ValidationError(
                f"layer index {t.layer_index} has {mat.shape[0]} rows but there are {n} labels"
            )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries = []
    for kind, items in (("activation", traces), ("conductance", records)):
        items = sorted(items, key=lambda t: t.layer_index)
        indices = [t.layer_index for t in items]
        if len(set(indices)) != len(indices):
            raise ValidationError(f"duplicate {kind} layer index in dump input")
        for item in items:
            if isinstance(item, LayerTrace):
                name, mat = item.layer_name, item.activations
            else:
                name, mat = f"fc{item.layer_index}", item.values
            fname = f"{kind}_{item.layer_index:03d}.bin"
            _write_tensor(out / fname, mat)
            entries.append(
                LayerEntry(name=name, index=item.layer_index, dims=mat.shape, kind=kind, file=fname)
            )

    labels_file = "labels.bin"
    (out / labels_file).write_bytes(np.ascontiguousarray(labels.labels, dtype="<u4").tobytes())

    manifest = DumpManifest(
        version=1,
        model_name=model_name,
        num_samples=n,
        class_count=labels.class_count,
        layers=tuple(entries),
        labels_file=labels_file,
    )
    text = json.dumps(manifest.to_dict(), indent=2) + "\n"
    (out / MANIFEST_NAME).write_text(text, encoding="utf-8")
    return manifest


def _parse_manifest(path: Path) -> DumpManifest:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DumpFormatError(f"{path} is not valid JSON: {exc}") from exc
    version = raw.get("version")
    if version != 1:
        raise UnsupportedVersionError(f"dump version {version!r} is not supported (expected 1)")
    try:
        layers = tuple(
            LayerEntry(
                name=e["name"], index=int(e["index"]), dims=tuple(e["dims"]),
                kind=e["kind"], file=e["file"],
            )
            for e in raw["layers"]
        )
        return DumpManifest(
            version=1,
            model_name=raw["model_name"],
            num_samples=int(raw["num_samples"]),
            class_count=int(raw["class_count"]),
            layers=layers,
            labels_file=raw["labels_file"],
        )
    except (KeyError, TypeError) as exc:
        raise DumpFormatError(f"{path} is missing required manifest fields: {exc}") from exc


def _read_tensor(path: Path, n: int, d: int) -> np.ndarray:
    data = path.read_bytes()
    expected = 4 * n * d
    if len(data) != expected:
        raise DumpCorruptionError(f"{path} holds {len(data)} bytes, expected {expected}")
    return np.frombuffer(data, dtype="<f4").astype(np.float64).reshape(n, d)


def read_dump(dump_dir):
    """Load a dump directory.

    Returns (traces, records, labels, manifest); tensors are widened to
    float64.  Conductance records carry method ``unspecified`` because
    the on-disk format does not record how they were computed.
    """
    root = Path(dump_dir)
    manifest = _parse_manifest(root / MANIFEST_NAME)

    labels_path = root / manifest.labels_file
    data = labels_path.read_bytes()
    if len(data) != 4 * manifest.num_samples:
        raise DumpCorruptionError(
            f"{labels_path} holds {len(data)} bytes, expected {4 * manifest.num_samples}"
        )
    labels = LabelSet(
        labels=np.frombuffer(data, dtype="<u4").astype(np.int64),
        class_count=manifest.class_count,
    )

    traces, records = [], []
    for entry in manifest.layers:
        mat = _read_tensor(root / entry.file, *entry.dims)
        if entry.kind == "activation":
            traces.append(LayerTrace(layer_index=entry.index, layer_name=entry.name, activations=mat))
        else:
            records.append(ConductanceRecord(layer_index=entry.index, method="unspecified", values=mat))
    return traces, records, labels, manifest


def _fmt(value: float, units: str) -> str:
    return f"{value / LN2 if units == 'bits' else value:.6f}"


def export_csv(rows, path, units: str = "nats") -> None:
    """Write plane or ITE rows as CSV with fixed headers and 6 decimals.

    In bits mode only nats-valued columns are divided by ln 2: the plane
    coordinates and their spreads, and the ITE entropy column.  The ITE
    ratio columns are dimensionless either way.
    """
    if units not in UNITS:
        raise ValidationError(f"units must be one of {UNITS}")
    rows = list(rows)
    if not rows:
        raise ValidationError("no rows to export")
    lines = []
    if isinstance(rows[0], PlaneRow):
        lines.append(PLANE_HEADER)
        for r in rows:
            lines.append(
                f"{r.layer_index},{r.layer_name},{r.basis},"
                f"{_fmt(r.i_x, units)},{_fmt(r.i_y, units)},"
                f"{_fmt(r.std_i_x, units)},{_fmt(r.std_i_y, units)}"
            )
    elif isinstance(rows[0], ITERow):
        lines.append(ITE_HEADER)
        for r in rows:
            lines.append(
                f"{r.layer_index},{_fmt(r.entropy_nats, units)},"
                f"{r.compression:.6f},{r.preservation:.6f},"
                f"{r.usefulness:.6f},{r.efficiency:.6f}"
            )
    else:
        raise ValidationError(f"cannot export rows of type {type(rows[0]).__name__}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
