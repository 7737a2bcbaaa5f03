"""Plain-text weight files.

Layout (version 1)::

    # shipnn-mlp 1
    layers <n_in> <n_hidden> <n_out>
    activation tanh linear
    [input_mean]
    <n_in values>
    [input_std]
    ...
    [W1]
    <n_hidden rows of n_in values>
    [b1]
    [W2]
    <n_out rows of n_hidden values>
    [b2]

Sections appear in exactly this order: input_mean, input_std, output_mean,
output_std, W1, b1, W2, b2. Values are written with ``repr`` so a
save/load round trip is exact. Lines starting with ``#`` after the header
are comments.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from shipnn.neurocontrol.mlp import MlpController

MAGIC = "# shipnn-mlp"
VERSION = 1
SECTIONS = ("input_mean", "input_std", "output_mean", "output_std", "W1", "b1", "W2", "b2")


class WeightFileError(ValueError):
    pass


def dumps(net: MlpController) -> str:
    n_in, n_hidden, n_out = net.sizes
    lines = [f"{MAGIC} {VERSION}", f"layers {n_in} {n_hidden} {n_out}", "activation tanh linear"]
    for name in SECTIONS:
        lines.append(f"[{name}]")
        arr = np.atleast_2d(getattr(net, name))
        for row in arr:
            lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def loads(text: str) -> MlpController:
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or not lines[0].startswith(MAGIC):
        raise WeightFileError("not a shipnn weight file (missing header)")
    try:
        version = int(lines[0][len(MAGIC):].strip())
    except ValueError as exc:
        raise WeightFileError(f"bad header line: {lines[0]!r}") from exc
    if version != VERSION:
        raise WeightFileError(f"unsupported weight file version {version}")
    body = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
    if len(body) < 2 or not body[0].startswith("layers "):
        raise WeightFileError("missing 'layers' line")
    try:
        n_in, n_hidden, n_out = (int(x) for x in body[0].split()[1:])
    except ValueError as exc:
        raise WeightFileError(f"bad layers line: {body[0]!r}") from exc
    if body[1] != "activation tanh linear":
        raise WeightFileError(f"unsupported activation line {body[1]!r}")
    shapes = {
        "input_mean": (n_in,),
        "input_std": (n_in,),
        "output_mean": (n_out,),
        "output_std": (n_out,),
        "W1": (n_hidden, n_in),
        "b1": (n_hidden,),
        "W2": (n_out, n_hidden),
        "b2": (n_out,),
    }
    arrays: dict[str, np.ndarray] = {}
    i = 2
    for name in SECTIONS:
        if i >= len(body) or body[i] != f"[{name}]":
            found = body[i] if i < len(body) else "end of file"
            raise WeightFileError(f"expected section [{name}], found {found!r}")
        i += 1
        shape = shapes[name]
        n_rows = shape[0] if len(shape) == 2 else 1
        rows = []
        for _ in range(n_rows):
            if i >= len(body) or body[i].startswith("["):
                raise WeightFileError(f"section [{name}] is short of rows")
            try:
                rows.append([float(x) for x in body[i].split()])
            except ValueError as exc:
                raise WeightFileError(f"non-numeric value in section [{name}]") from exc
            i += 1
        arr = np.array(rows, dtype=float).reshape(-1)
        if arr.size != int(np.prod(shape)):
            raise WeightFileError(f"section [{name}] has {arr.size} values, expected {int(np.prod(shape))}")
        arrays[name] = arr.reshape(shape)
    if i != len(body):
        raise WeightFileError(f"trailing content after [b2]: {body[i]!r}")
    try:
        return MlpController(**arrays)
    except ValueError as exc:
        raise WeightFileError(str(exc)) from exc


def save_weights(net: MlpController, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(dumps(net))
    os.replace(tmp, path)


def load_weights(path: str | Path) -> MlpController:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"weight file not found: {path}")
    return loads(path.read_text())
