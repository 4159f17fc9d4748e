"""
Household-level network indices and village clientelism measures.

For each sampled household X and counterpart K the relation is either
reciprocal (services flow both ways) or unreciprocated, in which case
``d_XK`` counts the services X receives from K and ``w_XK`` the spheres
they span. The concentration index sums ``d_XK**2`` over unreciprocated
counterparts; its weighted variant sums ``w_XK * d_XK**2``.

A provider serving unreciprocated links to at least 5% of a village's
sampled households is a patron; households receiving such a link from a
patron are its clients.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .graph import UnknownEntityError, VillageNetwork, counterparts, relation_between

PATRON_SHARE_DENOMINATOR = 20  # 5% == 1/20; kept integral so the ceiling is exact


class LinkClass(str, enum.Enum):
    NON_RECEIVER = "NonReceiver"
    RECIPROCAL_ONLY = "ReciprocalOnly"
    UNIDIRECTIONAL = "Unidirectional"


def _require_sampled(net: VillageNetwork, household: str):
    if household not in net.sampled_households:
        raise UnknownEntityError(f"{household!r} is not a sampled household of {net.village_id}")


def _relations(net: VillageNetwork, household: str):
    _require_sampled(net, household)
    return [relation_between(net, household, k) for k in sorted(counterparts(net, household))]


def classify_household(net: VillageNetwork, household: str) -> LinkClass:
    return _class_of(_relations(net, household))


def compute_degrees(net: VillageNetwork, household: str) -> tuple:
    """Return ``(degree_reciprocal, degree_unidirectional)``."""
    rels = _relations(net, household)
    reciprocal = sum(1 for r in rels if r.reciprocal)
    unidirectional = sum(1 for r in rels if r.d >= 1)
    return reciprocal, unidirectional


def concentration(net: VillageNetwork, household: str, weighted: bool = False) -> int:
    total = 0
    for r in _relations(net, household):
        if r.d:
            total += (r.w if weighted else 1) * r.d**2
    return total


def zscore_pool(values: Sequence[float]) -> np.ndarray:
    """
    Standardize with the population standard deviation.

    A constant pool (including a single value) maps to zeros.
    """
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("cannot standardize an empty pool")
    sd = x.std()
    if sd == 0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def patron_threshold(n_sampled: int) -> int:
    """Smallest client count that is at least 5% of ``n_sampled``."""
    return -(-n_sampled // PATRON_SHARE_DENOMINATOR)


@dataclass(frozen=True)
class PatronStats:
    id: str
    c: int  # distinct sampled clients
    n: int  # unreciprocated links provided to sampled households


@dataclass(frozen=True)
class PatronReport:
    village_id: str
    threshold_count: int
    patrons: tuple = ()

    @property
    def clientelism_score(self) -> int:
        return sum(p.c * p.n for p in self.patrons)

    @property
    def patron_ids(self) -> frozenset:
        return frozenset(p.id for p in self.patrons)

    def to_dict(self) -> dict:
        return {
            "village_id": self.village_id,
            "threshold_count": self.threshold_count,
            "patrons": [{"id": p.id, "c": p.c, "n": p.n} for p in self.patrons],
            "clientelism_score": self.clientelism_score,
        }


def provider_loads(net: VillageNetwork) -> dict:
    """Provider -> (distinct sampled clients, unreciprocated links) over sampled receivers."""
    clients = {}
    links = {}
    for x in net.sampled_households:
        for r in _relations(net, x):
            if r.d:
                clients[r.counterpart] = clients.get(r.counterpart, 0) + 1
                links[r.counterpart] = links.get(r.counterpart, 0) + r.d
    return {k: (clients[k], links[k]) for k in clients}


def detect_patrons(net: VillageNetwork) -> PatronReport:
    threshold = patron_threshold(len(net.sampled_households))
    patrons = tuple(
        PatronStats(k, c, n)
        for k, (c, n) in sorted(provider_loads(net).items())
        if c >= threshold
    )
    return PatronReport(net.village_id, threshold, patrons)


@dataclass(frozen=True)
class ClientStatus:
    household: str
    is_client: bool
    patron_ids: frozenset
    is_patron_household: bool


def classify_clients(net: VillageNetwork, report: PatronReport) -> dict:
    """Household -> ClientStatus for every sampled household of ``net``."""
    if report.village_id != net.village_id:
        raise ValueError(
            f"patron report is for village {report.village_id!r}, network is {net.village_id!r}"
        )
    strangers = [p for p in report.patron_ids if not net.has_entity(p)]
    if strangers:
        raise ValueError(f"patron(s) {sorted(strangers)} are not entities of {net.village_id}")
    out = {}
    for x in sorted(net.sampled_households):
        mine = frozenset(r.counterpart for r in _relations(net, x) if r.d and r.counterpart in report.patron_ids)
        out[x] = ClientStatus(x, bool(mine), mine, x in report.patron_ids)
    return out


@dataclass(frozen=True)
class HouseholdIndexRecord:
    village_id: str
    household: str
    link_class: LinkClass
    degree_reciprocal: int
    degree_unidirectional: int
    concentration_raw: int
    weighted_raw: int
    is_client: bool
    patron_ids: frozenset
    is_patron_household: bool
    concentration_z: float = math.nan
    weighted_z: float = math.nan


def _class_of(rels) -> LinkClass:
    received = [r for r in rels if r.services_received]
    if not received:
        return LinkClass.NON_RECEIVER
    if any(not r.reciprocal for r in received):
        return LinkClass.UNIDIRECTIONAL
    return LinkClass.RECIPROCAL_ONLY


def household_records(net: VillageNetwork) -> tuple:
    """
    Raw (un-standardized) records for one village, sorted by household id,
    together with the village PatronReport.
    """
    rels = {x: _relations(net, x) for x in sorted(net.sampled_households)}
    threshold = patron_threshold(len(rels))
    loads = {}
    for x, rs in rels.items():
        for r in rs:
            if r.d:
                c, n = loads.get(r.counterpart, (0, 0))
                loads[r.counterpart] = (c + 1, n + r.d)
    report = PatronReport(
        net.village_id,
        threshold,
        tuple(PatronStats(k, c, n) for k, (c, n) in sorted(loads.items()) if c >= threshold),
    )
    patrons = report.patron_ids
    records = []
    for x, rs in rels.items():
        mine = frozenset(r.counterpart for r in rs if r.d and r.counterpart in patrons)
        records.append(
            HouseholdIndexRecord(
                village_id=net.village_id,
                household=x,
                link_class=_class_of(rs),
                degree_reciprocal=sum(1 for r in rs if r.reciprocal),
                degree_unidirectional=sum(1 for r in rs if r.d),
                concentration_raw=sum(r.d**2 for r in rs),
                weighted_raw=sum(r.w * r.d**2 for r in rs),
                is_client=bool(mine),
                patron_ids=mine,
                is_patron_household=x in patrons,
            )
        )
    return records, report


def compute_indices(networks: Iterable[VillageNetwork]) -> tuple:
    """
    Index every sampled household of every village.

    Concentration z-scores are pooled over all households passed in.
    Returns ``(records, reports)`` where ``reports`` maps village id to its
    PatronReport.
    """
    records = []
    reports = {}
    for net in networks:
        recs, report = household_records(net)
        records.extend(recs)
        reports[net.village_id] = report
    if records:
        cz = zscore_pool([r.concentration_raw for r in records])
        wz = zscore_pool([r.weighted_raw for r in records])
        records = [
            replace(r, concentration_z=float(a), weighted_z=float(b))
            for r, a, b in zip(records, cz, wz)
        ]
    return records, reports


INDEX_COLUMNS = (
    "village_id",
    "household_id",
    "link_class",
    "degree_reciprocal",
    "degree_unidirectional",
    "concentration_raw",
    "concentration_z",
    "weighted_raw",
    "weighted_z",
    "is_client",
    "is_patron",
    "patron_ids",
)


def records_to_csv(records: Iterable[HouseholdIndexRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INDEX_COLUMNS)
    for r in records:
        writer.writerow(
            (
                r.village_id,
                r.household,
                r.link_class.value,
                r.degree_reciprocal,
                r.degree_unidirectional,
                r.concentration_raw,
                f"{r.concentration_z:.12g}",
                r.weighted_raw,
                f"{r.weighted_z:.12g}",
                int(r.is_client),
                int(r.is_patron_household),
                ";".join(sorted(r.patron_ids)),
            )
        )
    return buf.getvalue()


def reports_to_json(reports: dict) -> str:
    return json.dumps([reports[v].to_dict() for v in sorted(reports)], indent=2, sort_keys=True) + "\n"
