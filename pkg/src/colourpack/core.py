"""Exact data model for coloured bin packing.

Sizes are ``fractions.Fraction`` throughout; Python integers are unbounded,
so rational arithmetic can never wrap around.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

ONE = Fraction(1)
ZERO = Fraction(0)


class PreconditionError(ValueError):
    """An input violates an algorithm's stated assumption."""


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of nodes or configurations."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# rationals


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, a decimal string, an int or a Fraction exactly.

    Floats are refused: they have already lost the value they were meant to hold.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not sizes")
    if isinstance(value, Fraction):
        r = value
    elif isinstance(value, int):
        r = Fraction(value)
    elif isinstance(value, str):
        try:
            r = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    else:
        raise TypeError(f"cannot parse {type(value).__name__} as an exact rational")
    if r < 0:
        raise ValueError(f"negative rational {value!r}")
    return r


def format_rational(r: Fraction) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def ceil_fraction(r: Fraction) -> int:
    return -((-r.numerator) // r.denominator)


# ---------------------------------------------------------------------------
# items and instances


@dataclass(frozen=True)
class Item:
    id: int
    size: Fraction
    colour: int = 1

    def __post_init__(self):
        size = parse_rational(self.size)
        if not (ZERO < size <= ONE):
            raise PreconditionError(f"item {self.id}: size {size} outside (0, 1]")
        if self.colour < 1:
            raise PreconditionError(f"item {self.id}: colour {self.colour} < 1")
        object.__setattr__(self, "size", size)


def make_items(sizes, colour=1, start=0) -> list[Item]:
    """Convenience: items with consecutive ids; ``colour`` may be a sequence."""
    sizes = list(sizes)
    if isinstance(colour, int):
        colours = [colour] * len(sizes)
    else:
        colours = list(colour)
    return [Item(start + k, parse_rational(s), c) for k, (s, c) in enumerate(zip(sizes, colours))]


@dataclass(frozen=True)
class Instance:
    """Items in arrival order plus the colour count ``m``.

    ``meta`` holds values a generator knows by construction (e.g. OPT).
    """

    items: tuple[Item, ...]
    m: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        items = tuple(self.items)
        object.__setattr__(self, "items", items)
        if self.m < 1:
            raise PreconditionError("colour count m must be >= 1")
        seen = set()
        for it in items:
            if it.id in seen:
                raise PreconditionError(f"duplicate item id {it.id}")
            seen.add(it.id)
            if not 1 <= it.colour <= self.m:
                raise PreconditionError(f"item {it.id}: colour {it.colour} not in 1..{self.m}")

    def __len__(self):
        return len(self.items)

    def of_colour(self, c: int) -> list[Item]:
        return [it for it in self.items if it.colour == c]

    def colours_present(self) -> list[int]:
        return sorted({it.colour for it in self.items})

    def total_size(self) -> Fraction:
        return sum((it.size for it in self.items), ZERO)

    def digest(self) -> str:
        return multiset_digest(self.items)

    @classmethod
    def from_sizes(cls, sizes, colours=None, m=None, meta=None):
        items = make_items(sizes, colours if colours is not None else 1)
        if m is None:
            m = max((it.colour for it in items), default=1)
        return cls(tuple(items), m, dict(meta or {}))


def multiset_digest(items: Iterable[Item]) -> str:
    """Hash of the (size, colour) multiset; ids and order do not matter."""
    keys = sorted((it.size.numerator, it.size.denominator, it.colour) for it in items)
    h = hashlib.sha256(repr(keys).encode())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# bins and packings


@dataclass
class Region:
    capacity: Fraction
    colour: int | None = None
    used: Fraction = ZERO
    items: list[int] = field(default_factory=list)

    def fits(self, size) -> bool:
        return self.used + size <= self.capacity


PLAIN, LEVEL, ISOLATED = "plain", "level", "isolated"


@dataclass(eq=False)
class Bin:
    id: int
    contents: list[Item] = field(default_factory=list)
    kind: str = PLAIN
    level: int | None = None
    regions: list[Region] | None = None
    open: bool = True

    @property
    def fill(self) -> Fraction:
        return sum((it.size for it in self.contents), ZERO)

    @property
    def free(self) -> Fraction:
        return ONE - self.fill

    def fits(self, size) -> bool:
        return self.fill + size <= ONE

    def add(self, item: Item):
        self.contents.append(item)

    def colours(self) -> set[int]:
        return {it.colour for it in self.contents}

    def copy(self) -> "Bin":
        regions = None
        if self.regions is not None:
            regions = [Region(r.capacity, r.colour, r.used, list(r.items)) for r in self.regions]
        return Bin(self.id, list(self.contents), self.kind, self.level, regions, self.open)


@dataclass
class Packing:
    bins: list[Bin]
    algorithm: str = ""
    params: dict = field(default_factory=dict)

    @property
    def bin_count(self) -> int:
        """Bins holding at least one item."""
        return sum(1 for b in self.bins if b.contents)

    def items(self) -> list[Item]:
        return [it for b in self.bins for it in b.contents]

    def item_order(self) -> list[Item]:
        """Items in bin order, the replay order used by bounded best fit."""
        return self.items()

    def spans(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for b in self.bins:
            for c in b.colours():
                out[c] = out.get(c, 0) + 1
        return out

    def used_bins(self) -> list[Bin]:
        return [b for b in self.bins if b.contents]


class BinFactory:
    """Hands out bin ids in creation order."""

    def __init__(self, start=0):
        self.next_id = start

    def __call__(self, **kw) -> Bin:
        b = Bin(self.next_id, **kw)
        self.next_id += 1
        return b


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # capacity | missing | duplicate | unknown | mismatch | region
    bin_id: int | None
    item_id: int | None
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self):
        return bool(self.violations)

    def __len__(self):
        return len(self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def of_kind(self, kind) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]


def validate_packing(packing: Packing, instance: Instance) -> ValidationReport:
    """Report every feasibility problem; never raises on a bad packing."""
    report = ValidationReport()
    add = report.violations.append
    expected = {it.id: it for it in instance.items}
    seen: dict[int, int] = {}

    for b in packing.bins:
        fill = b.fill
        if fill > ONE:
            add(Violation("capacity", b.id, None, f"fill {format_rational(fill)} > 1"))
        for it in b.contents:
            if it.id in seen:
                add(Violation("duplicate", b.id, it.id, f"also in bin {seen[it.id]}"))
            else:
                seen[it.id] = b.id
            ref = expected.get(it.id)
            if ref is None:
                add(Violation("unknown", b.id, it.id))
            elif ref != it:
                add(Violation("mismatch", b.id, it.id, f"{it} differs from {ref}"))
        _check_regions(b, add)

    for iid in expected:
        if iid not in seen:
            add(Violation("missing", None, iid))
    return report


def _check_regions(b: Bin, add):
    if b.kind != LEVEL:
        if b.regions is not None:
            add(Violation("region", b.id, None, f"{b.kind} bin carries regions"))
        return
    if not b.regions:
        add(Violation("region", b.id, None, "level bin without regions"))
        return
    cap = b.regions[0].capacity
    if any(r.capacity != cap for r in b.regions) or cap * len(b.regions) != ONE:
        add(Violation("region", b.id, None, "regions do not split the bin evenly"))
    if b.level is None:
        add(Violation("region", b.id, None, "level bin without a level"))
    by_id = {it.id: it for it in b.contents}
    placed = []
    for k, r in enumerate(b.regions):
        sizes = []
        for iid in r.items:
            it = by_id.get(iid)
            if it is None:
                add(Violation("region", b.id, iid, f"region {k} lists an item not in the bin"))
                continue
            placed.append(iid)
            sizes.append(it.size)
            if it.colour != r.colour:
                add(Violation("region", b.id, iid, f"region {k} is not monochromatic"))
        used = sum(sizes, ZERO)
        if used != r.used:
            add(Violation("region", b.id, None, f"region {k} bookkeeping {r.used} != {used}"))
        if used > r.capacity:
            add(Violation("region", b.id, None, f"region {k} overfull"))
        if used > 0 and r.colour is None:
            add(Violation("region", b.id, None, f"region {k} used but uncoloured"))
    if sorted(placed) != sorted(by_id):
        add(Violation("region", b.id, None, "bin contents and region contents disagree"))


# ---------------------------------------------------------------------------
# metrics


def bins_spanned(packing: Packing, colour: int, m: int | None = None) -> int:
    if not isinstance(colour, int) or colour < 1 or (m is not None and colour > m):
        raise ValueError(f"unknown colour {colour!r}")
    return sum(1 for b in packing.bins if any(it.colour == colour for it in b.contents))


EXACT_ORACLE = "exact_oracle"
WEIGHT_LOWER_BOUND = "weight_lower_bound"


@dataclass(frozen=True)
class StretchReport:
    total_bins: int
    opt_bins: int
    per_colour_span: dict[int, int]
    per_colour_opt: dict[int, int]
    bin_stretch: Fraction
    colour_stretch: Fraction
    opt_source: str

    def colour_ratio(self, c) -> Fraction:
        return Fraction(self.per_colour_span.get(c, 0), max(self.per_colour_opt.get(c, 1), 1))


def weight_lower_bound(items) -> int:
    return ceil_fraction(sum((it.size for it in items), ZERO))


def compute_stretch(packing: Packing, instance: Instance, oracle=None) -> StretchReport:
    """Bin stretch P/OPT and colour stretch max_c P_c/OPT(I_c).

    Without an oracle the weight bound ceil(sum of sizes) stands in for OPT
    and the report says so. Denominators are clamped to at least 1.
    """
    colours = instance.colours_present()
    if oracle is not None:
        if oracle.instance_digest != instance.digest():
            raise ValueError("oracle result was computed for a different item multiset")
        opt = oracle.opt_bins
        per_opt = {c: oracle.per_colour_opt[c] for c in colours}
        source = EXACT_ORACLE
    else:
        opt = weight_lower_bound(instance.items)
        per_opt = {c: weight_lower_bound(instance.of_colour(c)) for c in colours}
        source = WEIGHT_LOWER_BOUND
    spans = {c: bins_spanned(packing, c) for c in colours}
    total = packing.bin_count
    bin_stretch = Fraction(total, max(opt, 1))
    colour_stretch = max((Fraction(spans[c], max(per_opt[c], 1)) for c in colours), default=Fraction(0))
    return StretchReport(total, opt, spans, per_opt, bin_stretch, colour_stretch, source)


# ---------------------------------------------------------------------------
# file formats


def instance_to_json(instance: Instance) -> dict:
    return {
        "m": instance.m,
        "items": [
            {"id": it.id, "size": format_rational(it.size), "colour": it.colour}
            for it in instance.items
        ],
        "meta": {k: _jsonable(v) for k, v in instance.meta.items()},
    }


def instance_from_json(data: dict) -> Instance:
    items = []
    for k, raw in enumerate(data["items"]):
        items.append(Item(int(raw.get("id", k)), parse_rational(str(raw["size"])), int(raw["colour"])))
    return Instance(tuple(items), int(data["m"]), dict(data.get("meta", {})))


def save_instance(instance: Instance, path):
    with open(path, "w") as fh:
        json.dump(instance_to_json(instance), fh, indent=1)
        fh.write("\n")


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_json(json.load(fh))


def packing_to_json(packing: Packing) -> dict:
    bins = []
    for b in packing.bins:
        entry = {"id": b.id, "kind": b.kind, "items": [it.id for it in b.contents]}
        if b.level is not None:
            entry["level"] = b.level
        if b.regions is not None:
            entry["regions"] = [
                {"capacity": format_rational(r.capacity), "colour": r.colour, "items": list(r.items)}
                for r in b.regions
            ]
        bins.append(entry)
    return {
        "algorithm": packing.algorithm,
        "params": {k: _jsonable(v) for k, v in packing.params.items()},
        "bins": bins,
    }


def packing_from_json(data: dict, instance: Instance) -> Packing:
    by_id = {it.id: it for it in instance.items}
    bins = []
    for entry in data["bins"]:
        contents = [by_id[i] for i in entry["items"]]
        regions = None
        if "regions" in entry:
            regions = []
            for r in entry["regions"]:
                used = sum((by_id[i].size for i in r["items"]), ZERO)
                regions.append(Region(parse_rational(r["capacity"]), r["colour"], used, list(r["items"])))
        bins.append(Bin(entry["id"], contents, entry.get("kind", PLAIN), entry.get("level"), regions, False))
    return Packing(bins, data.get("algorithm", ""), dict(data.get("params", {})))


def save_packing(packing: Packing, path):
    with open(path, "w") as fh:
        json.dump(packing_to_json(packing), fh, indent=1)
        fh.write("\n")


def load_packing(path, instance: Instance) -> Packing:
    with open(path) as fh:
        return packing_from_json(json.load(fh), instance)


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


REPORT_COLUMNS = [
    "instance", "algorithm", "params", "total_bins", "opt_bins", "opt_source",
    "bin_stretch", "max_colour_stretch", "error",
]


def report_row(instance_name, algorithm, params, report: StretchReport | None, error="") -> dict:
    row = dict.fromkeys(REPORT_COLUMNS, "")
    row.update(instance=instance_name, algorithm=algorithm,
               params=json.dumps({k: _jsonable(v) for k, v in sorted(params.items())}, sort_keys=True),
               error=error)
    if report is not None:
        row.update(total_bins=report.total_bins, opt_bins=report.opt_bins,
                   opt_source=report.opt_source,
                   bin_stretch=format_rational(report.bin_stretch),
                   max_colour_stretch=format_rational(report.colour_stretch))
    return row


def write_report(rows: Sequence[dict], fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue() if fh is None else ""
