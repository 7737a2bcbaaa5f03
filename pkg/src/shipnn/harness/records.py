"""CSV serialization of run records, datasets and tidy plot data.

Column names carry their units; angles are in degrees here and nowhere
else. Floats are written with ``repr`` so identical runs give identical
bytes.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path
from typing import Iterable

import numpy as np

from shipnn.harness.simulate import RunRecord

RECORD_COLUMNS = (
    "t_s",
    "x_m", "y_m", "psi_deg",
    "u_m_s", "v_m_s", "r_deg_s",
    "x_d_m", "y_d_m", "psi_d_deg",
    "x_d_dot_m_s", "y_d_dot_m_s", "psi_d_dot_deg_s",
    "heading_error_deg", "heading_rate_error_deg_s",
    "tau_x_n", "tau_y_n", "tau_n_nm",
    "f1_n", "f2_n", "f3_n", "f4_n",
    "saturated",
)

DATASET_COLUMNS = (
    "e_x_m", "e_y_m", "e_psi_rad", "e_psi_dot_rad_s", "u_m_s", "v_m_s", "r_rad_s",
    "tau_x_n", "tau_y_n", "tau_n_nm",
)


def _fmt(x) -> str:
    return repr(float(x))


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def _csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def record_to_csv(record: RunRecord) -> str:
    deg = np.degrees
    cols = [
        record.t,
        record.eta[:, 0], record.eta[:, 1], deg(record.eta[:, 2]),
        record.nu[:, 0], record.nu[:, 1], deg(record.nu[:, 2]),
        record.eta_d[:, 0], record.eta_d[:, 1], deg(record.eta_d[:, 2]),
        record.eta_d_dot[:, 0], record.eta_d_dot[:, 1], deg(record.eta_d_dot[:, 2]),
        record.heading_error_deg, record.heading_rate_error_deg_s,
        record.tau[:, 0], record.tau[:, 1], record.tau[:, 2],
        record.f[:, 0], record.f[:, 1], record.f[:, 2], record.f[:, 3],
    ]
    rows = (
        [*(_fmt(c[i]) for c in cols), int(record.saturated[i])] for i in range(len(record))
    )
    return _csv_text(RECORD_COLUMNS, rows)


def write_record(record: RunRecord, path: str | Path) -> Path:
    return atomic_write_text(path, record_to_csv(record))


def read_record(path: str | Path, name: str | None = None, f_max: float = 2.0) -> RunRecord:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        data = np.array([[float(x) for x in row] for row in reader], dtype=float).reshape(-1, len(RECORD_COLUMNS))
    col = {c: data[:, i] for i, c in enumerate(RECORD_COLUMNS)}
    rad = np.radians
    return RunRecord(
        name=name or path.stem,
        t=col["t_s"],
        eta=np.column_stack([col["x_m"], col["y_m"], rad(col["psi_deg"])]),
        nu=np.column_stack([col["u_m_s"], col["v_m_s"], rad(col["r_deg_s"])]),
        eta_d=np.column_stack([col["x_d_m"], col["y_d_m"], rad(col["psi_d_deg"])]),
        eta_d_dot=np.column_stack([col["x_d_dot_m_s"], col["y_d_dot_m_s"], rad(col["psi_d_dot_deg_s"])]),
        tau=np.column_stack([col["tau_x_n"], col["tau_y_n"], col["tau_n_nm"]]),
        f=np.column_stack([col[f"f{i}_n"] for i in range(1, 5)]),
        saturated=col["saturated"].astype(bool),
        f_max=f_max,
    )


def write_dataset(X: np.ndarray, Y: np.ndarray, path: str | Path) -> Path:
    rows = ([_fmt(v) for v in (*x, *y)] for x, y in zip(X, Y))
    return atomic_write_text(path, _csv_text(DATASET_COLUMNS, rows))


def read_dataset(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != DATASET_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        data = np.array([[float(x) for x in row] for row in reader], dtype=float).reshape(-1, len(DATASET_COLUMNS))
    return data[:, :7], data[:, 7:]


def write_loss_history(train_loss, val_loss, path: str | Path) -> Path:
    rows = ([i, _fmt(a), _fmt(b)] for i, (a, b) in enumerate(zip(train_loss, val_loss)))
    return atomic_write_text(path, _csv_text(("epoch", "train_mse_normalized", "val_mse_normalized"), rows))


def tidy_rows(path: str | Path, run: str | None = None):
    """Long-format rows (run, t_s, variable, value) from a run CSV."""
    path = Path(path)
    run = run or path.stem
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            t = row["t_s"]
            for key, value in row.items():
                if key != "t_s":
                    yield run, t, key, value


def write_tidy(paths: Iterable[str | Path], out: str | Path) -> Path:
    rows = (r for p in paths for r in tidy_rows(p))
    return atomic_write_text(out, _csv_text(("run", "t_s", "variable", "value"), rows))
