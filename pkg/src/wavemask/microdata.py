"""Categorical microfile handling: extraction of count signals and rewrite.

A microfile is a table of opaque string cells (codes like "06010" keep their
leading zeros).  Counting respondents that match a vital-value combination,
split by the values of one parameter attribute, yields the quantity signal
the masking pipeline works on.  After masking, the file is rewritten by
reassigning the parameter value of randomly chosen surplus records so the
recount equals the masked signal exactly.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DataError, MaskingError


@dataclass(frozen=True)
class MicrofileTable:
    """Immutable table of string cells with a header of unique attribute names."""

    attributes: tuple[str, ...]
    records: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(str(a) for a in self.attributes))
        object.__setattr__(self, "records", tuple(tuple(str(c) for c in row) for row in self.records))
        if len(set(self.attributes)) != len(self.attributes):
            raise DataError("attribute names must be unique")
        width = len(self.attributes)
        for number, row in enumerate(self.records, start=1):
            if len(row) != width:
                raise DataError(f"record {number} has {len(row)} cells, expected {width}")

    def __len__(self) -> int:
        return len(self.records)

    def column_index(self, name: str) -> int:
        try:
            return self.attributes.index(name)
        except ValueError:
            raise ConfigurationError(f"unknown attribute {name!r}") from None


@dataclass(frozen=True)
class SelectionSpec:
    """Which records to count and how to split them.

    A record is eligible when every vital attribute carries the matching
    combination value; eligible records are then binned by the value of the
    parameter attribute, in the order given by parameter_values.
    """

    vital_attributes: tuple[str, ...]
    vital_combination: tuple[str, ...]
    parameter_attribute: str
    parameter_values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vital_attributes", tuple(str(a) for a in self.vital_attributes))
        object.__setattr__(self, "vital_combination", tuple(str(v) for v in self.vital_combination))
        object.__setattr__(self, "parameter_values", tuple(str(v) for v in self.parameter_values))
        if len(self.vital_attributes) != len(self.vital_combination):
            raise ConfigurationError(
                f"{len(self.vital_attributes)} vital attributes but "
                f"{len(self.vital_combination)} combination values"
            )
        if not self.vital_attributes:
            raise ConfigurationError("at least one vital attribute is required")
        if self.parameter_attribute in self.vital_attributes:
            raise ConfigurationError(f"parameter attribute {self.parameter_attribute!r} is also a vital attribute")
        if len(set(self.parameter_values)) != len(self.parameter_values):
            raise ConfigurationError("parameter values must be distinct")
        if len(self.parameter_values) < 2:
            raise ConfigurationError("need at least two parameter values")


class Move(NamedTuple):
    record: int
    old_value: str
    new_value: str


@dataclass(frozen=True)
class ModificationPlan:
    """Record-level rewrite instructions produced by plan_resynthesis.

    Carries the parameter attribute name so the plan can be applied to a
    table without re-supplying the selection.
    """

    parameter_attribute: str
    moves: tuple[Move, ...]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(Move(*m) for m in self.moves))
        seen = set()
        for move in self.moves:
            if move.record in seen:
                raise DataError(f"record {move.record} appears in more than one move")
            seen.add(move.record)


def load_csv(source, delimiter: str = ",", has_header: bool = True) -> MicrofileTable:
    """Read a delimited text file into a table, cells kept verbatim."""
    with open(source, encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle, delimiter=delimiter))
    if not rows:
        raise DataError(f"{source}: empty file")
    if has_header:
        attributes = tuple(rows[0])
        records = rows[1:]
    else:
        attributes = tuple(f"col_{i}" for i in range(1, len(rows[0]) + 1))
        records = rows
    width = len(attributes)
    for number, row in enumerate(records, start=2 if has_header else 1):
        if len(row) != width:
            raise DataError(f"{source}: row {number} has {len(row)} cells, expected {width}")
    return MicrofileTable(attributes=attributes, records=tuple(tuple(r) for r in records))


def write_csv(table: MicrofileTable, sink, delimiter: str = ",") -> None:
    """Write header plus records, RFC-style quoting, trailing newline."""
    with open(sink, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, delimiter=delimiter, lineterminator="\n")
        writer.writerow(table.attributes)
        writer.writerows(table.records)


def _vital_mask(table: MicrofileTable, spec: SelectionSpec) -> list[bool]:
    columns = [table.column_index(a) for a in spec.vital_attributes]
    return [
        all(row[c] == v for c, v in zip(columns, spec.vital_combination))
        for row in table.records
    ]


def extract_quantity_signal(table: MicrofileTable, spec: SelectionSpec) -> np.ndarray:
    """Count vital-matching records per parameter value, in listed order.

    Records whose parameter value is not listed are ignored.
    """
    param_col = table.column_index(spec.parameter_attribute)
    position = {value: i for i, value in enumerate(spec.parameter_values)}
    counts = np.zeros(len(spec.parameter_values), dtype=np.int64)
    for row, eligible in zip(table.records, _vital_mask(table, spec)):
        if eligible:
            slot = position.get(row[param_col])
            if slot is not None:
                counts[slot] += 1
    return counts


def plan_resynthesis(
    table: MicrofileTable,
    spec: SelectionSpec,
    q,
    q_tilde,
    seed: int = 0,
) -> ModificationPlan:
    """Decide which records change parameter value so the recount equals q_tilde.

    Surplus areas (q_i > q̃_i) give up records chosen uniformly at random
    (deterministically under the seed, areas visited in listed order);
    deficit areas receive them, matched greedily largest surplus to largest
    deficit with ties broken toward the lower index.
    """
    q = np.asarray(q, dtype=np.int64)
    q_tilde = np.asarray(q_tilde, dtype=np.int64)
    m = len(spec.parameter_values)
    if q.shape != (m,) or q_tilde.shape != (m,):
        raise DataError(f"count vectors must have length {m}")
    if q_tilde.min() < 0:
        raise DataError("masked counts must be non-negative")
    if q.sum() != q_tilde.sum():
        raise MaskingError(f"count totals differ: {q.sum()} vs {q_tilde.sum()}; no rewrite can reconcile them")

    param_col = table.column_index(spec.parameter_attribute)
    position = {value: i for i, value in enumerate(spec.parameter_values)}
    eligible: list[list[int]] = [[] for _ in range(m)]
    for index, (row, ok) in enumerate(zip(table.records, _vital_mask(table, spec))):
        if ok:
            slot = position.get(row[param_col])
            if slot is not None:
                eligible[slot].append(index)
    actual = np.array([len(rows) for rows in eligible], dtype=np.int64)
    if not np.array_equal(actual, q):
        raise DataError(f"supplied counts {q.tolist()} do not match the table recount {actual.tolist()}")

    rng = random.Random(seed)
    surplus = {i: int(q[i] - q_tilde[i]) for i in range(m) if q[i] > q_tilde[i]}
    deficit = {i: int(q_tilde[i] - q[i]) for i in range(m) if q_tilde[i] > q[i]}
    pools: dict[int, list[int]] = {}
    for area in sorted(surplus):
        pools[area] = rng.sample(eligible[area], surplus[area])

    moves: list[Move] = []
    while deficit:
        donor = max(surplus, key=lambda i: (surplus[i], -i))
        taker = max(deficit, key=lambda i: (deficit[i], -i))
        batch = min(surplus[donor], deficit[taker])
        for _ in range(batch):
            moves.append(Move(pools[donor].pop(0), spec.parameter_values[donor], spec.parameter_values[taker]))
        surplus[donor] -= batch
        deficit[taker] -= batch
        if surplus[donor] == 0:
            del surplus[donor]
        if deficit[taker] == 0:
            del deficit[taker]
    return ModificationPlan(parameter_attribute=spec.parameter_attribute, moves=tuple(moves), seed=seed)


def apply_plan(table: MicrofileTable, plan: ModificationPlan) -> MicrofileTable:
    """Rewrite the planned parameter cells; everything else is untouched."""
    param_col = table.column_index(plan.parameter_attribute)
    rows = [list(row) for row in table.records]
    for move in plan.moves:
        if not 0 <= move.record < len(rows):
            raise DataError(f"plan names record {move.record}, table has {len(rows)}")
        if rows[move.record][param_col] != move.old_value:
            raise DataError(
                f"record {move.record} holds {rows[move.record][param_col]!r}, "
                f"plan expected {move.old_value!r}; the plan is stale"
            )
        rows[move.record][param_col] = move.new_value
    return MicrofileTable(attributes=table.attributes, records=tuple(tuple(r) for r in rows))
