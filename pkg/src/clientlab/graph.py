"""
Multiplex directed service graphs for surveyed villages.

A link points from the household that *receives* a service to the
individual that *provides* it. Each edge carries one of ten service
categories, grouped into economic, political and social spheres.
Reciprocation reported by a surveyed household ("I also provide
religious guidance to K") is stored as an edge with the roles swapped,
so the receiver of an edge may be an external provider.
"""

from __future__ import annotations

import csv
import enum
import io
import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class Sphere(str, enum.Enum):
    ECONOMIC = "economic"
    POLITICAL = "political"
    SOCIAL = "social"


class ServiceCategory(str, enum.Enum):
    """The ten surveyed services. ``welfare_access`` excludes MGNREGS work."""

    INPUT_PURCHASE = "input_purchase"
    LAND_TENANCY = "land_tenancy"
    OUTPUT_SALE = "output_sale"
    LABOUR = "labour"
    CREDIT = "credit"
    WELFARE_ACCESS = "welfare_access"
    POLITICAL_GUIDANCE = "political_guidance"
    EMPLOYMENT_DISPUTE = "employment_dispute"
    RELIGIOUS_GUIDANCE = "religious_guidance"
    FAMILY_DISPUTE = "family_dispute"

    @property
    def sphere(self) -> Sphere:
        return _SPHERE_OF[self]


_SPHERE_OF = {
    ServiceCategory.INPUT_PURCHASE: Sphere.ECONOMIC,
    ServiceCategory.LAND_TENANCY: Sphere.ECONOMIC,
    ServiceCategory.OUTPUT_SALE: Sphere.ECONOMIC,
    ServiceCategory.LABOUR: Sphere.ECONOMIC,
    ServiceCategory.CREDIT: Sphere.ECONOMIC,
    ServiceCategory.WELFARE_ACCESS: Sphere.POLITICAL,
    ServiceCategory.POLITICAL_GUIDANCE: Sphere.POLITICAL,
    ServiceCategory.EMPLOYMENT_DISPUTE: Sphere.POLITICAL,
    ServiceCategory.RELIGIOUS_GUIDANCE: Sphere.SOCIAL,
    ServiceCategory.FAMILY_DISPUTE: Sphere.SOCIAL,
}

CSV_COLUMNS = (
    "village_id",
    "receiver_id",
    "provider_id",
    "service",
    "receiver_sampled",
    "provider_sampled",
)


class NetworkParseError(ValueError):
    """Raised for malformed village CSV input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownEntityError(KeyError):
    pass


@dataclass(frozen=True, order=True)
class ServiceEdge:
    receiver: str
    provider: str
    category: ServiceCategory

    def __post_init__(self):
        if self.receiver == self.provider:
            raise ValueError(f"self-edge on {self.receiver!r}")
        if not isinstance(self.category, ServiceCategory):
            object.__setattr__(self, "category", ServiceCategory(self.category))


@dataclass(frozen=True)
class VillageNetwork:
    """
    Service graph of one village.

    Parameters
    ----------
    village_id : str
    sampled_households : frozenset of str
        Surveyed households; every edge is reported by one of them.
    external_providers : frozenset of str
        Named individuals outside the sample.
    edges : frozenset of ServiceEdge
    duplicate_count : int
        Repeated ``(receiver, provider, category)`` rows dropped at ingestion.
        Not part of equality.
    """

    village_id: str
    sampled_households: frozenset
    external_providers: frozenset
    edges: frozenset
    duplicate_count: int = field(default=0, compare=False)

    def __post_init__(self):
        for name in ("sampled_households", "external_providers", "edges"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        # adjacency caches; the dataclass is immutable so these never go stale
        received = defaultdict(lambda: defaultdict(set))
        provided = defaultdict(set)
        for edge in self.edges:
            received[edge.receiver][edge.provider].add(edge.category)
            provided[edge.provider].add(edge.receiver)
        object.__setattr__(self, "_received", received)
        object.__setattr__(self, "_provided", provided)

    @property
    def entities(self) -> frozenset:
        return self.sampled_households | self.external_providers

    def has_entity(self, entity: str) -> bool:
        return entity in self.sampled_households or entity in self.external_providers

    def received_from(self, receiver: str) -> dict:
        """Map provider -> set of categories ``receiver`` gets from it."""
        return self._received.get(receiver, {})

    def providers(self) -> set:
        return {edge.provider for edge in self.edges}


@dataclass(frozen=True)
class RelationSummary:
    household: str
    counterpart: str
    services_received: frozenset
    services_provided: frozenset

    @property
    def reciprocal(self) -> bool:
        return bool(self.services_received) and bool(self.services_provided)

    @property
    def d(self) -> int:
        """Unreciprocated links received from the counterpart."""
        return 0 if self.reciprocal else len(self.services_received)

    @property
    def w(self) -> int:
        """Distinct spheres among the services received."""
        return len({s.sphere for s in self.services_received})


def relation_between(net: VillageNetwork, household: str, counterpart: str) -> RelationSummary:
    if household not in net.sampled_households:
        raise UnknownEntityError(f"{household!r} is not a sampled household of {net.village_id}")
    if not net.has_entity(counterpart):
        raise UnknownEntityError(f"{counterpart!r} is not an entity of {net.village_id}")
    received = net.received_from(household).get(counterpart, ())
    provided = net.received_from(counterpart).get(household, ())
    return RelationSummary(household, counterpart, frozenset(received), frozenset(provided))


def counterparts(net: VillageNetwork, household: str) -> set:
    """Every entity ``household`` exchanges a service with, in either direction."""
    return set(net.received_from(household)) | net._provided.get(household, set())


@dataclass
class ValidationReport:
    village_id: str
    violations: list

    @property
    def clean(self) -> bool:
        return not self.violations


def validate_network(net: VillageNetwork) -> ValidationReport:
    violations = []
    for entity in sorted(net.sampled_households & net.external_providers):
        violations.append(f"entity {entity!r} is both sampled and external")
    for edge in sorted(net.edges):
        if edge.receiver == edge.provider:
            violations.append(f"self-edge on {edge.receiver!r} ({edge.category.value})")
        dangling = [x for x in (edge.receiver, edge.provider) if not net.has_entity(x)]
        for x in dangling:
            violations.append(
                f"edge ({edge.receiver}, {edge.provider}, {edge.category.value}): "
                f"endpoint {x!r} is in neither entity set"
            )
        if not dangling and not (
            edge.receiver in net.sampled_households or edge.provider in net.sampled_households
        ):
            violations.append(
                f"edge ({edge.receiver}, {edge.provider}, {edge.category.value}) "
                "is not reported by a sampled household"
            )
    return ValidationReport(net.village_id, violations)


def _parse_flag(value: str, column: str, line: int) -> bool:
    value = value.strip()
    if value not in ("0", "1"):
        raise NetworkParseError(f"{column} must be 0 or 1, got {value!r}", line)
    return value == "1"


def read_villages(source) -> dict:
    """
    Parse a village edge-list CSV into networks keyed by village id.

    ``source`` is a path or an open text stream.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_villages(fh)

    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or not any(h.strip() for h in header):
        raise NetworkParseError("empty file")
    header = [h.strip() for h in header]
    unknown = [h for h in header if h not in CSV_COLUMNS]
    if unknown:
        raise NetworkParseError(f"unknown column(s) {unknown}", 1)
    missing = [h for h in CSV_COLUMNS if h not in header]
    if missing:
        raise NetworkParseError(f"missing column(s) {missing}", 1)
    col = {name: header.index(name) for name in CSV_COLUMNS}

    status = defaultdict(dict)  # village -> entity -> (sampled, first line)
    edges = defaultdict(set)
    dups = defaultdict(int)
    order = []
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise NetworkParseError(f"expected {len(header)} fields, got {len(row)}", line)
        village = row[col["village_id"]].strip()
        receiver = row[col["receiver_id"]].strip()
        provider = row[col["provider_id"]].strip()
        if not village or not receiver or not provider:
            raise NetworkParseError("empty identifier", line)
        token = row[col["service"]].strip()
        try:
            category = ServiceCategory(token)
        except ValueError:
            raise NetworkParseError(f"bad service token {token!r}", line) from None
        if receiver == provider:
            raise NetworkParseError(f"self-edge on {receiver!r}", line)
        for entity, column in ((receiver, "receiver_sampled"), (provider, "provider_sampled")):
            flag = _parse_flag(row[col[column]], column, line)
            seen = status[village].get(entity)
            if seen is None:
                status[village][entity] = (flag, line)
            elif seen[0] != flag:
                raise NetworkParseError(
                    f"{entity!r} marked sampled={int(flag)} but sampled={int(seen[0])} on line {seen[1]}",
                    line,
                )
        if village not in edges:
            order.append(village)
        edge = ServiceEdge(receiver, provider, category)
        if edge in edges[village]:
            dups[village] += 1
        else:
            edges[village].add(edge)

    if not order:
        raise NetworkParseError("file has a header but no rows")

    networks = {}
    for village in order:
        flags = status[village]
        net = VillageNetwork(
            village_id=village,
            sampled_households=frozenset(e for e, (s, _) in flags.items() if s),
            external_providers=frozenset(e for e, (s, _) in flags.items() if not s),
            edges=frozenset(edges[village]),
            duplicate_count=dups[village],
        )
        for edge in net.edges:
            if edge.receiver not in net.sampled_households and edge.provider not in net.sampled_households:
                raise NetworkParseError(
                    f"edge ({edge.receiver}, {edge.provider}, {edge.category.value}) "
                    f"in village {village} has no sampled endpoint"
                )
        networks[village] = net
    return networks


def parse_village_file(path, village_id: str | None = None) -> VillageNetwork:
    """Read one village. ``village_id`` is required when the file holds several."""
    networks = read_villages(path)
    if village_id is None:
        if len(networks) > 1:
            raise NetworkParseError(
                f"file holds {len(networks)} villages; pass village_id (one of {sorted(networks)})"
            )
        return next(iter(networks.values()))
    try:
        return networks[village_id]
    except KeyError:
        raise UnknownEntityError(f"village {village_id!r} not in file") from None


def _rows(net: VillageNetwork):
    for edge in sorted(net.edges):
        yield (
            net.village_id,
            edge.receiver,
            edge.provider,
            edge.category.value,
            "1" if edge.receiver in net.sampled_households else "0",
            "1" if edge.provider in net.sampled_households else "0",
        )


def write_villages(networks: Iterable[VillageNetwork], target=None) -> str | None:
    """
    Serialize networks to the edge-list CSV schema, rows sorted.

    Entities without any edge cannot be represented in the edge list and
    are dropped. Returns the text when ``target`` is None.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for net in networks:
        writer.writerows(_rows(net))
    text = buf.getvalue()
    if target is None:
        return text
    Path(target).write_text(text, encoding="utf-8")
    return None
