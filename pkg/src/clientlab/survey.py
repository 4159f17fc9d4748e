"""
Synthetic village surveys for sign-recovery experiments.

Each village's service network comes either from the clientelism
equilibrium (elite 0 as the single patron, drawn at a village-specific
admissible ``theta``) or from a random-graph generator. Peer ties are
layered on top so that every link class occurs. Network indices are then
computed exactly as for survey data, covariates are drawn from simple
families centred on the sample means of the household survey, and
participation is a linear probability in client status and controls.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import pandas as pd

from .game import GameParams, check_restrictions, construct_clientelism_equilibrium, equilibrium_to_network
from .graph import ServiceCategory, ServiceEdge, VillageNetwork
from .indices import LinkClass, compute_indices
from .regression import DAY_CAP, Dataset, build_model_suite, ols_cluster_fit, regression_sample

STATES = ("maharashtra", "odisha", "uttar_pradesh")
CASTES = ("sc_st_nt", "obc", "dominant", "muslim", "other")
CASTE_P = (0.341, 0.435, 0.148, 0.055, 0.021)
EDUCATION = ("secondary", "bachelors", "higher")
EDUCATION_P = (0.79, 0.161, 0.049)

PEER_SERVICES = (
    ServiceCategory.LABOUR,
    ServiceCategory.CREDIT,
    ServiceCategory.FAMILY_DISPUTE,
    ServiceCategory.RELIGIOUS_GUIDANCE,
    ServiceCategory.INPUT_PURCHASE,
)
ALL_SERVICES = tuple(ServiceCategory)


@dataclass(frozen=True)
class Effects:
    """
    Data-generating coefficients of the participation probability.

    Defaults keep the probability inside [0, 1] for nearly every household;
    the rare excursions are clipped.
    """

    client: float = 0.15
    base: float = 0.45
    village_sd: float = 0.07
    caste: dict = field(default_factory=lambda: {"obc": -0.02, "dominant": -0.06, "muslim": -0.08, "other": -0.03})
    education: dict = field(default_factory=lambda: {"bachelors": -0.04, "higher": -0.06})
    low_skilled: float = 0.01
    stable_occupation: float = -0.06
    remittance: float = -0.03
    land_acres: float = -0.004
    asset_index: float = -0.008
    political_member: float = 0.03
    mediates_disputes: float = -0.02
    visits_officials: float = 0.02
    days_mean: float = 28.0
    days_client: float = 5.0

    def __post_init__(self):
        if not 0 <= self.base <= 1:
            raise ValueError("base participation probability must lie in [0, 1]")
        if self.village_sd < 0 or self.days_mean <= 0:
            raise ValueError("village_sd must be >= 0 and days_mean > 0")


DEFAULT_GAME = GameParams(n=100, b=3, theta=Fraction(7, 10), c=Fraction(11, 10), R=100, e=Fraction(1, 10))
VILLAGE_THETAS = tuple(Fraction(t, 100) for t in (60, 65, 70, 75, 80))


def _hh(village: str, k) -> str:
    return f"{village}-H{int(k):03d}"


@functools.lru_cache(maxsize=64)
def _equilibrium_network(q: GameParams) -> VillageNetwork:
    profile, _ = construct_clientelism_equilibrium(q)
    return equilibrium_to_network(q, profile, "")


def _game_village(rng, village: str, p: GameParams) -> VillageNetwork:
    thetas = [t for t in VILLAGE_THETAS if check_restrictions(p.replace(theta=t)).passed]
    if not thetas:
        raise ValueError("no admissible village theta for the base game parameters")
    q = p.replace(theta=thetas[rng.integers(len(thetas))])
    net = _equilibrium_network(q)
    rename = {str(k): _hh(village, k) for k in q.agents}
    rename.update({str(l): f"{village}-E{l}" for l in (0, 1, 2)})
    edges = {ServiceEdge(rename[e.receiver], rename[e.provider], e.category) for e in net.edges}
    return VillageNetwork(
        village,
        frozenset(rename[k] for k in net.sampled_households),
        frozenset(rename[k] for k in net.external_providers),
        frozenset(edges),
    )


def _random_village(rng, village: str, households: int) -> VillageNetwork:
    """A handful of external lenders/landlords serving random households."""
    edges = set()
    externals = set()
    for j in range(rng.integers(1, 4)):
        prov = f"{village}-X{j}"
        externals.add(prov)
        served = rng.choice(households, size=rng.integers(2, max(3, households // 4)), replace=False)
        for h in served:
            for cat in rng.choice(len(ALL_SERVICES), size=rng.integers(1, 3), replace=False):
                edges.add(ServiceEdge(_hh(village, h + 3), prov, ALL_SERVICES[cat]))
    return VillageNetwork(
        village, frozenset(_hh(village, k) for k in range(3, households + 3)), frozenset(externals), frozenset(edges)
    )


def _add_peer_ties(rng, net: VillageNetwork, reciprocal_rate: float, one_way_rate: float) -> VillageNetwork:
    """Horizontal reciprocal pairs plus occasional one-way favours between sampled households."""
    hh = sorted(net.sampled_households)
    m = len(hh)
    edges = set(net.edges)
    for _ in range(rng.binomial(m, reciprocal_rate)):
        a, b = rng.choice(m, size=2, replace=False)
        s1, s2 = rng.choice(len(PEER_SERVICES), size=2)
        edges.add(ServiceEdge(hh[a], hh[b], PEER_SERVICES[s1]))
        edges.add(ServiceEdge(hh[b], hh[a], PEER_SERVICES[s2]))
    for _ in range(rng.binomial(m, one_way_rate)):
        a, b = rng.choice(m, size=2, replace=False)
        edges.add(ServiceEdge(hh[a], hh[b], PEER_SERVICES[rng.integers(len(PEER_SERVICES))]))
    return VillageNetwork(net.village_id, net.sampled_households, net.external_providers, frozenset(edges))


def _search_rank(household: str) -> int:
    return int(household.rsplit("-H", 1)[1]) - 2


@dataclass(frozen=True)
class SurveyDesign:
    """Everything in a synthetic survey except the outcomes."""

    frame: pd.DataFrame
    kinds: dict
    meta: dict


def simulate_design(
    params: GameParams | None = None,
    villages: int = 36,
    households: int = 100,
    seed: int = 0,
    network: str = "game",
    reciprocal_rate: float = 0.15,
    one_way_rate: float = 0.10,
) -> Dataset:
    """
    Draw networks, indices and covariates for a reproducible synthetic survey.

    Parameters
    ----------
    params : GameParams, optional
        Base game; ``n`` is overridden by ``households``. Only used when
        ``network == "game"``.
    villages, households : int
    seed : int
    network : {"game", "random"}
    reciprocal_rate, one_way_rate : float
        Expected peer ties per household.
    """
    if villages < 2:
        raise ValueError("need at least 2 villages")
    if households < 3:
        raise ValueError("need at least 3 households per village")
    if network not in ("game", "random"):
        raise ValueError(f"unknown network source {network!r}")
    base = (params or DEFAULT_GAME).replace(n=households)
    root = np.random.default_rng(seed)
    vrngs = root.spawn(villages)

    nets = []
    for v, rng in enumerate(vrngs):
        vid = f"V{v + 1:02d}"
        net = _game_village(rng, vid, base) if network == "game" else _random_village(rng, vid, households)
        nets.append(_add_peer_ties(rng, net, reciprocal_rate, one_way_rate))
    records, reports = compute_indices(nets)

    # patron attributes (models 7-9) and village characteristics
    patron_political, patron_business, village_rows = {}, {}, {}
    for v, (net, rng) in enumerate(zip(nets, vrngs)):
        for pat in reports[net.village_id].patrons:
            patron_political[pat.id] = bool(rng.random() < 0.8)
            patron_business[pat.id] = bool(rng.random() < 0.6)
        village_rows[net.village_id] = {
            "state": STATES[v % len(STATES)],
            "pradhan_caste": CASTES[rng.choice(len(CASTES), p=CASTE_P)],
            "distance_town": rng.uniform(2, 40),
            "irrigated_share": rng.uniform(0, 0.8),
            "rainfall_mm": rng.normal(1200, 300),
            "agri_share": rng.uniform(0.4, 0.9),
            "clientelism_score": float(reports[net.village_id].clientelism_score),
            "village_shock": float(np.clip(rng.normal(), -2.0, 2.0)),
        }

    rng = root  # household draws continue on the root stream, after the spawns
    n = len(records)
    frame = pd.DataFrame(
        {
            "village_id": [r.village_id for r in records],
            "household_id": [r.household for r in records],
            "link_class": [r.link_class.value for r in records],
            "degree_reciprocal": [r.degree_reciprocal for r in records],
            "degree_unidirectional": [r.degree_unidirectional for r in records],
            "concentration_raw": [r.concentration_raw for r in records],
            "concentration_z": [r.concentration_z for r in records],
            "weighted_raw": [r.weighted_raw for r in records],
            "weighted_z": [r.weighted_z for r in records],
            "client": [int(r.is_client) for r in records],
            "is_patron": [int(r.is_patron_household) for r in records],
        }
    )
    vinfo = pd.DataFrame.from_dict(village_rows, orient="index")
    for col in vinfo.columns:
        frame[col] = vinfo.loc[frame["village_id"], col].to_numpy()

    frame["linktype_reciprocal"] = (frame["link_class"] == LinkClass.RECIPROCAL_ONLY.value).astype(int)
    frame["linktype_unidirectional"] = (frame["link_class"] == LinkClass.UNIDIRECTIONAL.value).astype(int)
    frame["unidirectional_not_client"] = ((frame["degree_unidirectional"] > 0) & (frame["client"] == 0)).astype(int)
    pol = np.array([any(patron_political[p] for p in r.patron_ids) for r in records])
    bus = np.array([any(patron_business[p] for p in r.patron_ids) for r in records])
    client = frame["client"].to_numpy().astype(bool)
    frame["client_political_patron"] = (client & pol).astype(int)
    frame["client_nonpolitical_patron"] = (client & ~pol).astype(int)
    frame["client_business_patron"] = (client & bus).astype(int)
    frame["client_nonbusiness_patron"] = (client & ~bus).astype(int)

    # covariates; poorer (higher search cost) households own less
    rank = np.array([_search_rank(r.household) for r in records]) / households
    caste = np.array(CASTES)[rng.choice(len(CASTES), size=n, p=CASTE_P)]
    frame["caste"] = caste
    frame["education"] = np.array(EDUCATION)[rng.choice(len(EDUCATION), size=n, p=EDUCATION_P)]
    frame["low_skilled"] = np.minimum(rng.poisson(2.5, n), 8)
    frame["stable_occupation"] = (rng.random(n) < 0.18 - 0.12 * rank).astype(int)
    frame["remittance"] = (rng.random(n) < 0.22 - 0.1 * rank).astype(int)
    frame["land_acres"] = np.minimum(rng.gamma(0.313, 4.67, n) * (1.5 - rank), 15.0)
    frame["asset_index"] = rng.binomial(6, np.clip(0.36 - 0.12 * rank, 0, 1))
    frame["political_member"] = (rng.random(n) < 0.062).astype(int)
    frame["mediates_disputes"] = (rng.random(n) < 0.22).astype(int)
    frame["visits_officials"] = (rng.random(n) < 0.27).astype(int)
    same = (caste == frame["pradhan_caste"].to_numpy())
    frame["client_pradhan_same_caste"] = (client & same).astype(int)
    frame["client_pradhan_diff_caste"] = (client & ~same).astype(int)

    frame = frame.drop(columns=["pradhan_caste"])
    kinds = {c: "binary" for c in frame.columns}
    kinds.update(
        {
            "village_id": "id",
            "household_id": "id",
            "link_class": "categorical",
            "state": "categorical",
            "caste": "categorical",
            "education": "categorical",
            "degree_reciprocal": "count",
            "degree_unidirectional": "count",
            "concentration_raw": "count",
            "weighted_raw": "count",
            "low_skilled": "count",
            "asset_index": "count",
            "concentration_z": "continuous",
            "weighted_z": "continuous",
            "land_acres": "continuous",
            "distance_town": "continuous",
            "irrigated_share": "continuous",
            "rainfall_mm": "continuous",
            "agri_share": "continuous",
            "clientelism_score": "continuous",
            "village_shock": "continuous",
        }
    )
    meta = {
        "seed": seed,
        "villages": villages,
        "households": households,
        "network": network,
    }
    return SurveyDesign(frame, kinds, meta)


def draw_outcomes(design: SurveyDesign, effects: Effects | None = None) -> Dataset:
    """
    Add participation and days worked to ``design``.

    The outcome stream is seeded from the design seed alone, so two calls
    with different ``effects`` share their uniform draws.
    """
    e = effects or Effects()
    rng = np.random.default_rng([design.meta["seed"], 1])
    frame = design.frame.copy()
    n = len(frame)
    client = frame["client"].to_numpy()
    prob = (
        e.base
        + e.village_sd * frame["village_shock"].to_numpy()
        + e.client * client
        + frame["caste"].map(lambda c: e.caste.get(c, 0.0)).to_numpy()
        + frame["education"].map(lambda c: e.education.get(c, 0.0)).to_numpy()
        + e.low_skilled * frame["low_skilled"].to_numpy()
        + e.stable_occupation * frame["stable_occupation"].to_numpy()
        + e.remittance * frame["remittance"].to_numpy()
        + e.land_acres * frame["land_acres"].to_numpy()
        + e.asset_index * frame["asset_index"].to_numpy()
        + e.political_member * frame["political_member"].to_numpy()
        + e.mediates_disputes * frame["mediates_disputes"].to_numpy()
        + e.visits_officials * frame["visits_officials"].to_numpy()
    )
    clipped = int(((prob < 0) | (prob > 1)).sum())
    participation = (rng.random(n) < np.clip(prob, 0, 1)).astype(int)
    raw_days = participation * rng.gamma(2.0, (e.days_mean + e.days_client * client) / 2.0)
    frame["participation"] = participation
    frame["days_worked"] = np.minimum(raw_days, DAY_CAP)
    frame = frame.drop(columns=["village_shock"])
    kinds = {c: k for c, k in design.kinds.items() if c != "village_shock"}
    kinds.update(participation="binary", days_worked="continuous")
    meta = dict(
        design.meta,
        true_client_effect=e.client,
        clipped_probabilities=clipped,
        days_truncated=int((raw_days > DAY_CAP).sum()),
    )
    return Dataset(frame, kinds, meta)


def simulate_survey(
    params: GameParams | None = None,
    effects: Effects | None = None,
    villages: int = 36,
    households: int = 100,
    seed: int = 0,
    network: str = "game",
    reciprocal_rate: float = 0.15,
    one_way_rate: float = 0.10,
) -> Dataset:
    """Draw a full synthetic survey; ``effects.client`` is the true client effect."""
    design = simulate_design(params, villages, households, seed, network, reciprocal_rate, one_way_rate)
    return draw_outcomes(design, effects)


@dataclass(frozen=True)
class ClientEffectDraw:
    seed: int
    true_effect: float
    estimate: float
    se: float
    pvalue: float


def client_effect_monte_carlo(
    seeds,
    true_effects=(0.15, 0.0),
    model: str = "5",
    outcome: str = "participation",
    **design_kw,
) -> dict:
    """
    Fit one fixed-effects model per seed and true effect.

    Each seed's design (networks, covariates) is drawn once and shared by
    all ``true_effects``. Returns ``{effect: [ClientEffectDraw, ...]}`` in
    seed order.
    """
    spec = next(
        s for s in build_model_suite((outcome,), ("fe",)) if s.model == model
    )
    out = {t: [] for t in true_effects}
    for seed in seeds:
        design = simulate_design(seed=seed, **design_kw)
        for t in true_effects:
            data = regression_sample(draw_outcomes(design, Effects(client=t)), outcome)
            fit = ols_cluster_fit(data, spec)
            k = fit.names.index("client")
            out[t].append(
                ClientEffectDraw(seed, t, float(fit.params[k]), float(fit.bse[k]), float(fit.pvalues[k]))
            )
    return out
