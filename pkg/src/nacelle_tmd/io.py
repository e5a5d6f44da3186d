"""Config-file parsing, motion CSV input and result CSV output.

Config documents accept two line styles, freely mixed::

    1000    TMD_X_M    - TMD mass        (FAST style: value, key, comment)
    TMD_X_K = 25000                      (plain assignment)

Blank lines, lines starting with ``#`` or ``!`` and ``---`` separator lines
are ignored.
"""

from __future__ import annotations

import csv
import io as _io
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, MotionError
from .frames import RotationError, as_rotation, euler_to_rotation
from .integrate import MotionSeries, SimResult
from .tmd_core import AXIS_KEYS, ControlMode, TmdAxisParams, TmdConfig

# Field name -> type, in input-file order.
TABLE1_KEYS: dict[str, type] = {
    "TMD_CMODE": int,
    "TMD_X_DOF": bool,
    "TMD_Y_DOF": bool,
    "TMD_X_DSP": float,
    "TMD_Y_DSP": float,
    "TMD_X_M": float,
    "TMD_X_K": float,
    "TMD_X_C": float,
    "TMD_Y_M": float,
    "TMD_Y_K": float,
    "TMD_Y_C": float,
    "TMD_X_DWSP": float,
    "TMD_X_UWSP": float,
    "TMD_X_K_SX": float,
    "TMD_X_C_SX": float,
    "TMD_Y_PLSP": float,
    "TMD_Y_NLSP": float,
    "TMD_Y_K_S": float,
    "TMD_Y_C_S": float,
    "TMD_P_X": float,
    "TMD_P_Y": float,
    "TMD_P_Z": float,
}
OPTIONAL_KEYS: dict[str, tuple[type, object]] = {"GRAVITY": (float, 9.81)}

MOTION_BASE_COLUMNS = ("time", "ax_P", "ay_P", "az_P", "wx", "wy", "wz", "alx", "aly", "alz")
ROTATION_COLUMNS = tuple(f"r{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3))
EULER_COLUMNS = ("theta", "phi", "psi")
RESULT_COLUMNS = ("time", "x", "xdot", "y", "ydot", "fx_G", "fy_G", "fz_G",
                  "mx_G", "my_G", "mz_G", "fstop_x", "fstop_y",
                  "fy_tmdx", "fz_tmdx", "fx_tmdy", "fz_tmdy")


@dataclass(frozen=True)
class ConfigEntry:
    key: str
    raw: str
    line: int


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "t", ".true."):
        return True
    if low in ("false", "f", ".false."):
        return False
    raise ValueError(raw)


def _parse_int(raw: str) -> int:
    v = float(raw)
    if not v.is_integer():
        raise ValueError(raw)
    return int(v)


def _convert(typ: type, raw: str):
    if typ is bool:
        return _parse_bool(raw)
    if typ is int:
        return _parse_int(raw)
    return float(raw)


_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TYPE_NAMES = {bool: "logical (True/False)", int: "integer", float: "real"}


def read_config_document(text: str) -> dict[str, ConfigEntry]:
    """Split a config document into raw key/value entries.

    Unknown keys and duplicates are reported with their line numbers.
    """
    known = set(TABLE1_KEYS) | set(OPTIONAL_KEYS)
    entries: dict[str, ConfigEntry] = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#!" or stripped.startswith("--"):
            continue
        lhs, eq, rhs = stripped.partition("=")
        if eq and _KEY_RE.fullmatch(lhs.strip()):
            key = lhs.strip()
            tokens = rhs.split()
            raw = tokens[0] if tokens else ""
        else:
            parts = stripped.split()
            if len(parts) < 2:
                errors.append(f"line {lineno}: cannot parse {stripped!r}")
                continue
            raw, key = parts[0], parts[1]
        if key not in known:
            # FAST input files carry headers and unrelated lines; only flag
            # things that look like TMD keys.
            if key.upper().startswith("TMD_") or key.upper() == "GRAVITY":
                errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in entries:
            errors.append(f"line {lineno}: duplicate key {key} "
                          f"(first defined on line {entries[key].line})")
            continue
        entries[key] = ConfigEntry(key, raw, lineno)
    if errors:
        raise ConfigError("; ".join(errors))
    return entries


def parse_config(text: str) -> TmdConfig:
    """Parse and validate a TMD input document."""
    entries = read_config_document(text)
    missing = [k for k in TABLE1_KEYS if k not in entries]
    if missing:
        raise ConfigError("missing required key(s): " + ", ".join(missing))

    values = {}
    errors = []
    for key, entry in entries.items():
        typ = TABLE1_KEYS[key] if key in TABLE1_KEYS else OPTIONAL_KEYS[key][0]
        try:
            values[key] = _convert(typ, entry.raw)
        except ValueError:
            errors.append(f"line {entry.line}: {key} expects {_TYPE_NAMES[typ]}, "
                          f"got {entry.raw!r}")
    if errors:
        raise ConfigError("; ".join(errors))
    for key, (_, default) in OPTIONAL_KEYS.items():
        values.setdefault(key, default)

    if values["TMD_CMODE"] not in (1, 2):
        raise ConfigError(f"line {entries['TMD_CMODE'].line}: TMD_CMODE must be 1 (passive) "
                          f"or 2 (active), got {values['TMD_CMODE']}")

    def axis(name: str) -> TmdAxisParams:
        return TmdAxisParams(**{field: values[key] for field, key in AXIS_KEYS[name].items()})

    cfg = TmdConfig(
        x_axis=axis("x"),
        y_axis=axis("y"),
        gravity=values["GRAVITY"],
        mount_P=(values["TMD_P_X"], values["TMD_P_Y"], values["TMD_P_Z"]),
        control_mode=ControlMode(values["TMD_CMODE"]),
    )
    problems = cfg.problems()
    if problems:
        # Attach the line of the first input key each message names.
        located = []
        for msg in problems:
            named = [k for k in _KEY_RE.findall(msg) if k in entries]
            where = f"line {entries[named[0]].line}: " if named else ""
            located.append(where + msg)
        raise ConfigError("invalid TMD configuration: " + "; ".join(located))
    return cfg


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "True" if v else "False"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def render_config(cfg: TmdConfig) -> str:
    """Render every input key in FAST style; ``parse_config`` inverts it."""
    values = {"TMD_CMODE": int(cfg.control_mode)}
    for name, axis in (("x", cfg.x_axis), ("y", cfg.y_axis)):
        for field, key in AXIS_KEYS[name].items():
            values[key] = getattr(axis, field)
    values["TMD_P_X"], values["TMD_P_Y"], values["TMD_P_Z"] = cfg.mount_P
    lines = ["---------------------- TMD INPUT FILE ----------------------"]
    for key in TABLE1_KEYS:
        lines.append(f"{_fmt(values[key]):>24}  {key}")
    lines.append(f"{_fmt(cfg.gravity):>24}  GRAVITY")
    return "\n".join(lines) + "\n"


def read_motion_csv(text: str) -> MotionSeries:
    """Parse a nacelle-motion CSV.

    Orientation comes from either the nine ``r11..r33`` columns (row-major
    R_NG) or the three ``theta, phi, psi`` columns, never both.
    """
    reader = csv.reader(_io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MotionError("motion CSV is empty (missing header)") from None
    cols = set(header)
    if len(cols) != len(header):
        raise MotionError("header: duplicate column names")
    has_r = cols.issuperset(ROTATION_COLUMNS)
    has_e = cols.issuperset(EULER_COLUMNS)
    partial_r = bool(cols & set(ROTATION_COLUMNS)) and not has_r
    partial_e = bool(cols & set(EULER_COLUMNS)) and not has_e
    if has_r and has_e:
        raise MotionError("header: both rotation-matrix and Euler-angle columns present; use one")
    if not (has_r or has_e) or partial_r or partial_e:
        raise MotionError("header: need either all of r11..r33 or all of theta, phi, psi")
    rot_cols = ROTATION_COLUMNS if has_r else EULER_COLUMNS
    expected = set(MOTION_BASE_COLUMNS) | set(rot_cols)
    if cols != expected:
        missing = sorted(expected - cols)
        extra = sorted(cols - expected)
        raise MotionError(f"header: column mismatch (missing {missing}, unexpected {extra})")
    idx = {name: header.index(name) for name in expected}

    t, acc, Rs, om, al = [], [], [], [], []
    # data rows are numbered from 1; the header is not counted
    for rowno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MotionError(f"row {rowno}: expected {len(header)} fields, got {len(row)}")
        vals = {}
        for name, j in idx.items():
            try:
                v = float(row[j])
            except ValueError:
                raise MotionError(f"row {rowno}, column {name!r}: not a number: {row[j]!r}") from None
            if not math.isfinite(v):
                raise MotionError(f"row {rowno}, column {name!r}: non-finite value")
            vals[name] = v
        if t and vals["time"] <= t[-1]:
            raise MotionError(f"row {rowno}: time {vals['time']:.9g} is not strictly "
                              f"increasing (previous {t[-1]:.9g})")
        if has_r:
            R = np.array([vals[c] for c in ROTATION_COLUMNS]).reshape(3, 3)
        else:
            R = euler_to_rotation(vals["theta"], vals["phi"], vals["psi"])
        try:
            R = as_rotation(R)
        except RotationError as exc:
            raise MotionError(f"row {rowno}: {exc}") from None
        t.append(vals["time"])
        acc.append([vals["ax_P"], vals["ay_P"], vals["az_P"]])
        Rs.append(R)
        om.append([vals["wx"], vals["wy"], vals["wz"]])
        al.append([vals["alx"], vals["aly"], vals["alz"]])
    if len(t) < 2:
        raise MotionError(f"motion CSV needs at least 2 data rows, got {len(t)}")
    return MotionSeries(np.array(t), np.array(acc), np.array(Rs), np.array(om), np.array(al))


def write_motion_csv(series: MotionSeries) -> str:
    """Serialize a motion series with the rotation-matrix columns."""
    header = ("time", "ax_P", "ay_P", "az_P", *ROTATION_COLUMNS,
              "wx", "wy", "wz", "alx", "aly", "alz")
    out = [",".join(header)]
    for i in range(len(series)):
        vals = [series.t[i], *series.accel_P[i], *series.R_NG[i].ravel(),
                *series.omega[i], *series.alpha[i]]
        out.append(",".join(repr(float(v)) for v in vals))
    return "\n".join(out) + "\n"


def _g9(v: float) -> str:
    s = f"{v:.9g}"
    return "0" if s == "-0" else s


def write_result_csv(result: SimResult) -> str:
    """Render a simulation result, 9 significant digits, one row per step."""
    table = np.column_stack([result.t, result.states, result.force_G, result.moment_G,
                             result.stop, result.constraints])
    lines = [",".join(RESULT_COLUMNS)]
    lines.extend(",".join(_g9(v) for v in row) for row in table.tolist())
    return "\n".join(lines) + "\n"


def read_result_csv(text: str) -> SimResult:
    """Inverse of :func:`write_result_csv` (metadata is not stored)."""
    reader = csv.reader(_io.StringIO(text))
    header = [h.strip() for h in next(reader)]
    if set(header) != set(RESULT_COLUMNS) or len(header) != len(RESULT_COLUMNS):
        raise MotionError("header: result CSV columns do not match the result schema")
    order = [header.index(c) for c in RESULT_COLUMNS]
    rows = []
    for rowno, row in enumerate(reader, start=1):
        if not row:
            continue
        try:
            rows.append([float(row[j]) for j in order])
        except (ValueError, IndexError):
            raise MotionError(f"row {rowno}: malformed result row") from None
    a = np.array(rows, dtype=float).reshape(-1, len(RESULT_COLUMNS))
    return SimResult(a[:, 0], a[:, 1:5], a[:, 5:8], a[:, 8:11], a[:, 11:13], a[:, 13:17])
