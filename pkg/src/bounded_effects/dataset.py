"""Two-period panel data with selection indicators.

A :class:`PanelDataset` stores its columns as read-only numpy arrays so that
estimators and bootstrap resampling can work on whole columns at once.
Missing outcomes are ``NaN`` internally; on disk they are empty CSV cells.
"""
from __future__ import annotations

import csv
import json
import math
import operator
import os
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    EmptySelection,
    InvalidConfig,
    InvariantViolation,
    MissingColumn,
    ParseError,
)

__all__ = [
    "Direction",
    "UnitRecord",
    "Tallies",
    "Violation",
    "PanelDataset",
    "DEFAULT_SCHEMA",
    "parse_directions",
    "load_schema",
    "load_csv",
    "write_csv",
    "validate",
    "observed_diffs",
]


class Direction(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def parse_directions(value) -> tuple[Direction, ...]:
    """Parse ``"negative,positive"`` (or a sequence) into directions."""
    if value is None:
        return ()
    if isinstance(value, (str, Direction)):
        items = [v for v in str(getattr(value, "value", value)).split(",")]
    else:
        items = list(value)
    out = []
    for item in items:
        text = str(getattr(item, "value", item)).strip().lower()
        try:
            out.append(Direction(text))
        except ValueError:
            raise InvalidConfig(f"unknown monotonicity direction: {item!r}") from None
    return tuple(out)


# rule names, in the order they are checked within a row
ABSORBING_STATE = "absorbing-state"
OUTCOME_PRESENCE = "outcome-presence"
PRODUCT_CONSISTENCY = "product-consistency"
MUTUAL_EXCLUSIVITY = "mutual-exclusivity"
EMPTY_GROUP = "empty-group"


@dataclass(frozen=True)
class UnitRecord:
    id: str
    group: int
    y1: Optional[float]
    y2: Optional[float]
    s1: int
    s2: int
    sources_t1: tuple[int, ...] = ()
    sources_t2: tuple[int, ...] = ()


@dataclass(frozen=True)
class Violation:
    row: int
    unit_id: str
    rule: str

    def __str__(self):
        return f"row {self.row} (id={self.unit_id}): {self.rule}"


@dataclass(frozen=True)
class Tallies:
    """Group-wise counts; index 0 is control, 1 is treated."""

    n: int
    n_group: tuple[int, int]
    sum_s1: tuple[int, int]
    sum_s2: tuple[int, int]
    sum_src_t1: np.ndarray  # shape (2, J)
    sum_src_t2: np.ndarray

    @property
    def n0(self):
        return self.n_group[0]

    @property
    def n1(self):
        return self.n_group[1]

    def mean_s(self, t: int, g: int) -> float:
        """E[S_t | G = g] as a sample mean."""
        total = self.sum_s1[g] if t == 1 else self.sum_s2[g]
        return total / self.n_group[g]

    def mean_source(self, j: int, t: int, g: int) -> float:
        """E[s^j_t | G = g] for zero-based source index ``j``."""
        sums = self.sum_src_t1 if t == 1 else self.sum_src_t2
        return float(sums[g, j]) / self.n_group[g]


def _pick(items: tuple, index: np.ndarray) -> tuple:
    if len(index) == 0:
        return ()
    if len(index) == 1:
        return (items[int(index[0])],)
    return operator.itemgetter(*index.tolist())(items)


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """Immutable columnar panel.

    ``src_t1`` and ``src_t2`` always have shape ``(n, J)``. When a file carries
    no source columns, ``J = 1`` and the single source equals the overall
    selection indicator (``explicit_sources`` is then False).
    """

    ids: tuple[str, ...]
    g: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    src_t1: np.ndarray
    src_t2: np.ndarray
    source_directions: tuple[Direction, ...] = ()
    explicit_sources: bool = False
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_arrays(
        cls,
        g,
        y1,
        y2,
        s1,
        s2,
        src_t1=None,
        src_t2=None,
        ids=None,
        source_directions=(),
        check=True,
    ) -> "PanelDataset":
        g = np.asarray(g, dtype=np.int8)
        s1 = np.asarray(s1, dtype=np.int8)
        s2 = np.asarray(s2, dtype=np.int8)
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        n = len(g)
        explicit = src_t1 is not None
        if explicit:
            src_t1 = np.asarray(src_t1, dtype=np.int8).reshape(n, -1)
            src_t2 = np.asarray(src_t2, dtype=np.int8).reshape(n, -1)
            if src_t1.shape != src_t2.shape:
                raise InvalidConfig("source arrays for t=1 and t=2 differ in shape")
        else:
            src_t1 = s1.reshape(n, 1)
            src_t2 = s2.reshape(n, 1)
        if ids is None:
            ids = tuple(str(i + 1) for i in range(n))
        else:
            ids = tuple(str(i) for i in ids)
        for arr in (y1, y2, s1, s2):
            if len(arr) != n:
                raise InvalidConfig("column lengths differ")
        ds = cls(
            ids=ids,
            g=_readonly(g),
            y1=_readonly(y1),
            y2=_readonly(y2),
            s1=_readonly(s1),
            s2=_readonly(s2),
            src_t1=_readonly(src_t1),
            src_t2=_readonly(src_t2),
            source_directions=parse_directions(source_directions),
            explicit_sources=explicit,
        )
        if check:
            problems = validate(ds)
            if problems:
                first = problems[0]
                raise InvariantViolation(first.row, first.rule)
        return ds

    @classmethod
    def from_units(cls, units: Iterable[UnitRecord], source_directions=(), check=True):
        units = list(units)
        nan = float("nan")
        explicit = any(u.sources_t1 for u in units)
        kwargs = {}
        if explicit:
            widths = {len(u.sources_t1) for u in units} | {len(u.sources_t2) for u in units}
            if len(widths) != 1:
                raise InvalidConfig("all units must carry the same number of sources")
            kwargs = dict(
                src_t1=[u.sources_t1 for u in units],
                src_t2=[u.sources_t2 for u in units],
            )
        return cls.from_arrays(
            g=[u.group for u in units],
            y1=[nan if u.y1 is None else u.y1 for u in units],
            y2=[nan if u.y2 is None else u.y2 for u in units],
            s1=[u.s1 for u in units],
            s2=[u.s2 for u in units],
            ids=[u.id for u in units],
            source_directions=source_directions,
            check=check,
            **kwargs,
        )

    def __len__(self):
        return len(self.g)

    @property
    def n_sources(self) -> int:
        return self.src_t1.shape[1]

    @property
    def units(self) -> list[UnitRecord]:
        out = []
        for i in range(len(self)):
            y1 = None if math.isnan(self.y1[i]) else float(self.y1[i])
            y2 = None if math.isnan(self.y2[i]) else float(self.y2[i])
            if self.explicit_sources:
                t1 = tuple(int(v) for v in self.src_t1[i])
                t2 = tuple(int(v) for v in self.src_t2[i])
            else:
                t1 = t2 = ()
            out.append(
                UnitRecord(self.ids[i], int(self.g[i]), y1, y2, int(self.s1[i]), int(self.s2[i]), t1, t2)
            )
        return out

    @cached_property
    def tallies(self) -> Tallies:
        n1 = int(self.g.sum())
        n0 = len(self) - n1
        treated = self.g == 1
        control = ~treated
        return Tallies(
            n=len(self),
            n_group=(n0, n1),
            sum_s1=(int(self.s1[control].sum()), int(self.s1[treated].sum())),
            sum_s2=(int(self.s2[control].sum()), int(self.s2[treated].sum())),
            sum_src_t1=np.stack([self.src_t1[control].sum(axis=0), self.src_t1[treated].sum(axis=0)]),
            sum_src_t2=np.stack([self.src_t2[control].sum(axis=0), self.src_t2[treated].sum(axis=0)]),
        )

    @property
    def n_observed(self) -> int:
        """Rows with both outcomes observed (the rows entering bound estimation)."""
        return int(self.s2.sum())

    def with_directions(self, directions) -> "PanelDataset":
        return PanelDataset(
            ids=self.ids, g=self.g, y1=self.y1, y2=self.y2, s1=self.s1, s2=self.s2,
            src_t1=self.src_t1, src_t2=self.src_t2,
            source_directions=parse_directions(directions),
            explicit_sources=self.explicit_sources,
        )

    def take(self, index) -> "PanelDataset":
        """Rows at ``index`` (with repetition), skipping re-validation."""
        index = np.asarray(index, dtype=np.intp)
        return PanelDataset(
            ids=_pick(self.ids, index),
            g=_readonly(self.g[index]),
            y1=_readonly(self.y1[index]),
            y2=_readonly(self.y2[index]),
            s1=_readonly(self.s1[index]),
            s2=_readonly(self.s2[index]),
            src_t1=_readonly(self.src_t1[index]),
            src_t2=_readonly(self.src_t2[index]),
            source_directions=self.source_directions,
            explicit_sources=self.explicit_sources,
        )

    def group_index(self, group: int) -> np.ndarray:
        return np.flatnonzero(self.g == group)


def _row_rules(ds: PanelDataset) -> list[tuple[str, np.ndarray]]:
    """Boolean masks of offending rows, one per rule, in check order."""
    s1, s2 = ds.s1.astype(bool), ds.s2.astype(bool)
    present1 = ~np.isnan(ds.y1)
    present2 = ~np.isnan(ds.y2)
    rules = [
        (ABSORBING_STATE, ~s1 & s2),
        (OUTCOME_PRESENCE, (present1 != s1) | (present2 != s2)),
    ]
    if ds.explicit_sources:
        J = ds.n_sources
        prod_bad = (ds.src_t1.prod(axis=1) != ds.s1) | (ds.src_t2.prod(axis=1) != ds.s2)
        excl_bad = (ds.src_t1.sum(axis=1) < J - 1) | (ds.src_t2.sum(axis=1) < J - 1)
        rules.append((PRODUCT_CONSISTENCY, prod_bad))
        rules.append((MUTUAL_EXCLUSIVITY, excl_bad))
    return rules


def validate(ds: PanelDataset) -> list[Violation]:
    """Every broken unit-level or dataset-level invariant.

    Rows are 1-based (row 0 is reserved for whole-file problems such as an
    empty treatment group). Reports are ordered by row, then by rule.
    """
    out = []
    for rule, mask in _row_rules(ds):
        for i in np.flatnonzero(mask):
            out.append((int(i) + 1, rule))
    order = {r: k for k, (r, _) in enumerate(_row_rules(ds))}
    out.sort(key=lambda item: (item[0], order[item[1]]))
    reports = [Violation(row, ds.ids[row - 1], rule) for row, rule in out]
    for group in (0, 1):
        if not np.any(ds.g == group):
            reports.insert(0, Violation(0, "", f"{EMPTY_GROUP}:{group}"))
    return reports


def observed_diffs(ds: PanelDataset, group: int) -> np.ndarray:
    """``y2 - y1`` for units of ``group`` with ``s2 = 1``, in row order."""
    if group not in (0, 1):
        raise ValueError("group must be 0 or 1")
    mask = (ds.g == group) & (ds.s2 == 1)
    if not mask.any():
        raise EmptySelection(f"no units with s2 = 1 in group {group}")
    return ds.y2[mask] - ds.y1[mask]


# ---------------------------------------------------------------- CSV I/O

DEFAULT_SCHEMA = {"id": "id", "g": "g", "y1": "y1", "y2": "y2", "s1": "s1", "s2": "s2"}
_SRC_RE = re.compile(r"^src(\d+)_t([12])$")


def load_schema(value) -> dict:
    """Column mapping from a dict, a JSON file path, or ``"g=treat,y1=w05"``.

    A ``sources`` entry, when present, is a list of ``[t1_column, t2_column]``
    pairs, one per selection source.
    """
    if value is None:
        return dict(DEFAULT_SCHEMA)
    if isinstance(value, dict):
        mapping = dict(value)
    elif os.path.exists(str(value)):
        with open(value, encoding="utf-8") as fh:
            mapping = json.load(fh)
    else:
        mapping = {}
        for part in str(value).split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise InvalidConfig(f"bad schema entry {part!r}; expected key=column")
            key, col = part.split("=", 1)
            mapping[key.strip()] = col.strip()
    unknown = set(mapping) - set(DEFAULT_SCHEMA) - {"sources"}
    if unknown:
        raise InvalidConfig(f"unknown schema keys: {sorted(unknown)}")
    schema = dict(DEFAULT_SCHEMA)
    schema.update(mapping)
    return schema


def _source_columns(header: Sequence[str], schema: dict) -> list[tuple[str, str]]:
    if "sources" in schema:
        return [tuple(pair) for pair in schema["sources"]]
    found = {}
    for name in header:
        m = _SRC_RE.match(name)
        if m:
            found.setdefault(int(m.group(1)), {})[int(m.group(2))] = name
    pairs = []
    for j in sorted(found):
        cols = found[j]
        if 1 not in cols or 2 not in cols:
            missing = f"src{j}_t{1 if 1 not in cols else 2}"
            raise MissingColumn(missing)
        pairs.append((cols[1], cols[2]))
    if pairs and sorted(found) != list(range(1, len(pairs) + 1)):
        raise InvalidConfig("source columns must be numbered 1..J without gaps")
    return pairs


def _parse_binary(text, row, column):
    text = text.strip()
    if text in ("0", "1"):
        return int(text)
    raise ParseError(row, column, f"expected 0 or 1, got {text!r}")


def _parse_outcome(text, row, column):
    text = text.strip()
    if text == "":
        return float("nan")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(row, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(row, column, f"non-finite value {text!r}")
    return value


def load_csv(path, schema=None, source_directions=(), strict=True) -> PanelDataset:
    """Read and validate a panel CSV.

    With ``strict=False`` invariant violations are kept in the returned
    dataset so that :func:`validate` can list all of them; parse errors
    always raise.
    """
    schema = load_schema(schema)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(0, "header", "empty file") from None
        header = [h.strip() for h in header]
        if not any(header):
            raise ParseError(0, "header", "blank header")
        rows = list(reader)

    required = [schema[k] for k in ("id", "g", "y1", "y2", "s1", "s2")]
    for col in required:
        if col not in header:
            raise MissingColumn(col)
    pairs = _source_columns(header, schema)
    for t1, t2 in pairs:
        for col in (t1, t2):
            if col not in header:
                raise MissingColumn(col)
    used = set(required) | {c for pair in pairs for c in pair}
    ignored = [h for h in header if h not in used]
    if ignored:
        warnings.warn(f"ignoring extra columns: {', '.join(ignored)}", stacklevel=2)

    pos = {name: k for k, name in enumerate(header)}
    ids, g, y1, y2, s1, s2, t1s, t2s = [], [], [], [], [], [], [], []
    for r, values in enumerate(rows, start=1):
        if not values or all(not v.strip() for v in values):
            continue
        if len(values) != len(header):
            raise ParseError(r, "*", f"expected {len(header)} fields, got {len(values)}")
        cell = lambda key: values[pos[schema[key]]]  # noqa: E731
        ids.append(cell("id").strip())
        g.append(_parse_binary(cell("g"), r, schema["g"]))
        s1.append(_parse_binary(cell("s1"), r, schema["s1"]))
        s2.append(_parse_binary(cell("s2"), r, schema["s2"]))
        y1.append(_parse_outcome(cell("y1"), r, schema["y1"]))
        y2.append(_parse_outcome(cell("y2"), r, schema["y2"]))
        t1s.append([_parse_binary(values[pos[a]], r, a) for a, _ in pairs])
        t2s.append([_parse_binary(values[pos[b]], r, b) for _, b in pairs])

    src = {}
    if pairs:
        src = dict(src_t1=np.array(t1s, dtype=np.int8), src_t2=np.array(t2s, dtype=np.int8))
    ds = PanelDataset.from_arrays(
        g=g, y1=y1, y2=y2, s1=s1, s2=s2, ids=ids,
        source_directions=source_directions, check=False, **src,
    )
    if strict:
        problems = validate(ds)
        if problems:
            first = problems[0]
            raise InvariantViolation(first.row, first.rule)
    return ds


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else repr(float(value))


def write_csv(ds: PanelDataset, path) -> None:
    """Write ``ds`` with the default column names (round-trips through load_csv)."""
    header = ["id", "g", "y1", "y2", "s1", "s2"]
    if ds.explicit_sources:
        for j in range(1, ds.n_sources + 1):
            header += [f"src{j}_t1", f"src{j}_t2"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(ds)):
            row = [ds.ids[i], int(ds.g[i]), _fmt(ds.y1[i]), _fmt(ds.y2[i]), int(ds.s1[i]), int(ds.s2[i])]
            if ds.explicit_sources:
                for j in range(ds.n_sources):
                    row += [int(ds.src_t1[i, j]), int(ds.src_t2[i, j])]
            w.writerow(row)
