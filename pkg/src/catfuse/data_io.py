"""CSV ingestion, level dictionaries, and model persistence.

Categorical levels get dense 0-based codes in first-appearance order, so
encodings are deterministic and survive a save/load round trip.  Models
serialize to a fixed-key-order JSON document with every float printed at
17 significant digits, which makes serialize -> deserialize -> serialize
byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .design import Coefficients, Design

__all__ = [
    "ColumnSpec",
    "Dataset",
    "ModelFile",
    "read_csv",
    "read_raw_columns",
    "serialize_model",
    "deserialize_model",
]

FORMAT_VERSION = 1
_MISSING = {"", "NA", "N/A", "NaN", "nan", "NULL", "null"}


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # "categorical" | "continuous" | "response"


@dataclass
class Dataset:
    """Typed columns plus per-categorical level dictionaries."""

    columns: list[ColumnSpec]
    response: np.ndarray
    categorical_names: list[str]
    categorical_codes: list[np.ndarray]
    categorical_levels: list[list[str]]
    continuous_names: list[str]
    continuous: np.ndarray | None
    n_dropped: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.response)

    @property
    def response_name(self) -> str:
        return next(c.name for c in self.columns if c.kind == "response")

    def to_design(self, hierarchy=None) -> tuple[Design, np.ndarray]:
        design = Design(
            self.categorical_codes,
            n_levels=[len(lv) for lv in self.categorical_levels],
            continuous=self.continuous,
            labels=self.categorical_levels,
            hierarchy=hierarchy,
        )
        return design, self.response

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            names = (
                [self.response_name] + self.categorical_names + self.continuous_names
            )
            writer.writerow(names)
            for i in range(self.n):
                row = [_fmt_float(self.response[i])]
                for j in range(len(self.categorical_names)):
                    row.append(self.categorical_levels[j][self.categorical_codes[j][i]])
                for l in range(len(self.continuous_names)):
                    row.append(_fmt_float(self.continuous[i, l]))
                writer.writerow(row)


def _parse_float(s: str):
    try:
        return float(s)
    except ValueError:
        return None


def read_csv(
    path,
    response: str,
    categorical: list[str] | None = None,
    continuous: list[str] | None = None,
) -> Dataset:
    """Parse a headed CSV into typed columns.

    Hinted columns keep their hinted kind; the rest are continuous when
    every non-missing value parses as a number, else categorical.  Rows
    with missing values are dropped and counted.
    """
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [r for r in reader if any(cell.strip() for cell in r)]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if response not in header:
        raise ValueError(f"{path}: response column {response!r} not found")
    cat_hint = set(categorical or [])
    cont_hint = set(continuous or [])
    unknown = (cat_hint | cont_hint) - set(header)
    if unknown:
        raise ValueError(f"{path}: hinted columns not present: {sorted(unknown)}")

    ncol = len(header)
    rows = [r for r in rows if len(r) == ncol]
    keep = []
    n_dropped = 0
    for r in rows:
        if any(cell.strip() in _MISSING for cell in r):
            n_dropped += 1
        else:
            keep.append(r)
    if not keep:
        raise ValueError(f"{path}: all rows dropped (missing values)")
    cols = {name: [r[i] for r in keep] for i, name in enumerate(header)}

    kinds = {}
    for name in header:
        if name == response:
            kinds[name] = "response"
        elif name in cat_hint:
            kinds[name] = "categorical"
        elif name in cont_hint:
            kinds[name] = "continuous"
        else:
            numeric = all(_parse_float(v) is not None for v in cols[name])
            kinds[name] = "continuous" if numeric else "categorical"

    y = np.array([_parse_float(v) for v in cols[response]], dtype=float)
    if np.any(np.isnan(y)):
        raise ValueError(f"{path}: response contains non-numeric values")

    warnings = []
    cat_names, codes_list, levels_list = [], [], []
    cont_names, cont_cols = [], []
    for name in header:
        if kinds[name] == "response":
            continue
        vals = cols[name]
        if kinds[name] == "categorical":
            lookup: dict[str, int] = {}
            codes = np.empty(len(vals), dtype=np.int64)
            for i, v in enumerate(vals):
                codes[i] = lookup.setdefault(v, len(lookup))
            counts = np.bincount(codes, minlength=len(lookup))
            if np.any(counts == 1):
                singles = int(np.sum(counts == 1))
                warnings.append(
                    f"column {name!r}: {singles} level(s) with a single observation"
                )
            cat_names.append(name)
            codes_list.append(codes)
            levels_list.append(list(lookup))
        else:
            parsed = [_parse_float(v) for v in vals]
            if any(p is None for p in parsed):
                raise ValueError(
                    f"{path}: column {name!r} hinted continuous has non-numeric values"
                )
            cont_names.append(name)
            cont_cols.append(np.array(parsed, dtype=float))

    columns = [ColumnSpec(name, kinds[name]) for name in header]
    return Dataset(
        columns=columns,
        response=y,
        categorical_names=cat_names,
        categorical_codes=codes_list,
        categorical_levels=levels_list,
        continuous_names=cont_names,
        continuous=np.column_stack(cont_cols) if cont_cols else None,
        n_dropped=n_dropped,
        warnings=warnings,
    )


def read_raw_columns(path) -> dict:
    """Header-keyed string columns, no typing or row dropping."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        rows = [r for r in reader if any(cell.strip() for cell in r)]
    bad = [i for i, r in enumerate(rows) if len(r) != len(header)]
    if bad:
        raise ValueError(f"{path}: ragged rows at lines {bad[:5]}")
    return {name: [r[i] for r in rows] for i, name in enumerate(header)}


@dataclass
class ModelFile:
    """Everything needed to reload a fit and predict with it."""

    family: str
    gamma: float
    lam: float
    response_name: str
    categorical_names: list[str]
    categorical_levels: list[list[str]]
    continuous_names: list[str]
    continuous_center: np.ndarray | None
    coef: Coefficients
    clusters: list[np.ndarray]
    sweeps: int
    converged: bool
    objective: float

    def schema_fingerprint(self) -> str:
        payload = json.dumps(
            {
                "response": self.response_name,
                "categorical": [
                    [n, lv]
                    for n, lv in zip(self.categorical_names, self.categorical_levels)
                ],
                "continuous": self.continuous_names,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def encode(self, dataset_rows: dict) -> tuple[list, np.ndarray | None, list]:
        """Map raw string columns onto training codes.

        Returns per-variable code arrays (-1 for unseen labels), the raw
        continuous matrix, and per-row error records for malformed rows.
        """
        errors = []
        n = None
        codes = []
        for name, levels in zip(self.categorical_names, self.categorical_levels):
            if name not in dataset_rows:
                raise ValueError(f"missing categorical column {name!r}")
            vals = dataset_rows[name]
            n = len(vals) if n is None else n
            lookup = {lab: i for i, lab in enumerate(levels)}
            codes.append(np.array([lookup.get(v, -1) for v in vals], dtype=np.int64))
        cont = None
        if self.continuous_names:
            colarrs = []
            for name in self.continuous_names:
                if name not in dataset_rows:
                    raise ValueError(f"missing continuous column {name!r}")
                vals = dataset_rows[name]
                n = len(vals) if n is None else n
                parsed = np.empty(len(vals))
                for i, v in enumerate(vals):
                    f = _parse_float(v)
                    if f is None:
                        errors.append((i, f"column {name!r}: cannot parse {v!r}"))
                        f = np.nan
                    parsed[i] = f
                colarrs.append(parsed)
            cont = np.column_stack(colarrs)
        return codes, cont, errors


def _fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def _emit(obj, out: io.StringIO, indent: int) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        out.write("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.write(pad + "  " + json.dumps(k) + ": ")
            _emit(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(items) else "\n")
        out.write(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.write("[]")
            return
        out.write("[\n")
        for i, v in enumerate(obj):
            out.write(pad + "  ")
            _emit(v, out, indent + 1)
            out.write(",\n" if i + 1 < len(obj) else "\n")
        out.write(pad + "]")
    elif isinstance(obj, bool):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            raise ValueError("non-finite number in model document")
        out.write(_fmt_float(x))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif obj is None:
        out.write("null")
    else:
        raise TypeError(f"cannot serialize {type(obj)}")


def serialize_model(model: ModelFile) -> bytes:
    """Render the model as key-ordered JSON text (floats at 17 significant
    digits).  Any NaN or infinity in the fit is an error."""
    for t in model.coef.theta:
        if not np.all(np.isfinite(t)):
            raise ValueError("model coefficients contain non-finite values")
    if not np.all(np.isfinite(model.coef.beta)):
        raise ValueError("model coefficients contain non-finite values")
    doc = {
        "format_version": FORMAT_VERSION,
        "schema_fingerprint": model.schema_fingerprint(),
        "family": model.family,
        "gamma": model.gamma,
        "lambda": model.lam,
        "response": model.response_name,
        "intercept": model.coef.mu,
        "categorical": [
            {
                "name": name,
                "levels": levels,
                "coefficients": [float(v) for v in model.coef.theta[j]],
                "clusters": [int(c) for c in model.clusters[j]],
            }
            for j, (name, levels) in enumerate(
                zip(model.categorical_names, model.categorical_levels)
            )
        ],
        "continuous": [
            {"name": name, "coefficient": float(model.coef.beta[l])}
            for l, name in enumerate(model.continuous_names)
        ],
        "continuous_center": (
            [float(v) for v in model.continuous_center]
            if model.continuous_center is not None
            else None
        ),
        "metadata": {
            "sweeps": model.sweeps,
            "converged": model.converged,
            "objective": model.objective,
        },
    }
    out = io.StringIO()
    _emit(doc, out, 0)
    out.write("\n")
    return out.getvalue().encode()


def deserialize_model(data: bytes) -> ModelFile:
    doc = json.loads(data.decode())
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(
            f"unsupported model format version {doc.get('format_version')!r}"
        )
    cats = doc["categorical"]
    theta = [np.array(c["coefficients"], dtype=float) for c in cats]
    clusters = [np.array(c["clusters"], dtype=np.int64) for c in cats]
    conts = doc["continuous"]
    beta = np.array([c["coefficient"] for c in conts], dtype=float)
    center = doc["continuous_center"]
    model = ModelFile(
        family=doc["family"],
        gamma=float(doc["gamma"]),
        lam=float(doc["lambda"]),
        response_name=doc["response"],
        categorical_names=[c["name"] for c in cats],
        categorical_levels=[list(c["levels"]) for c in cats],
        continuous_names=[c["name"] for c in conts],
        continuous_center=np.array(center, dtype=float) if center is not None else None,
        coef=Coefficients(mu=float(doc["intercept"]), theta=theta, beta=beta),
        clusters=clusters,
        sweeps=int(doc["metadata"]["sweeps"]),
        converged=bool(doc["metadata"]["converged"]),
        objective=float(doc["metadata"]["objective"]),
    )
    if doc["schema_fingerprint"] != model.schema_fingerprint():
        raise ValueError("schema fingerprint mismatch")
    return model
