"""
Two-period clientelism game: exact solver, SPNE verifier and brute-force oracle.

Elite 0 controls both resources r1 and r2, elites 1 and 2 one each. Poor
agents ``3 .. n+2`` have search costs ``1/n, 2/n, .., 1`` and access each
resource either on the market (cost ``s_k`` per resource per period) or
through a single personal link. Linking to elite 0 costs ``c``; links to 1
and 2 are free. An election held between the periods is a lottery where a
candidate wins with probability equal to its vote share. Elites deliver
``theta * b`` public work to their own clients; the non-native candidate
``N`` delivers ``b`` to everyone. A patron that loses withdraws consent,
so its clients pay the market for the second period.

All arithmetic is exact (:class:`fractions.Fraction`). Threshold sets such
as ``s_k >= b(1-theta)`` sit on the ``1/n`` grid, and binary floating point
misplaces agents at the boundary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import ServiceCategory, ServiceEdge, VillageNetwork

N = "N"
ELITES = (0, 1, 2)
CANDIDATES = (0, 1, 2, N)

# resource carried by each elite's link, as exported to the survey schema
R1 = ServiceCategory.CREDIT
R2 = ServiceCategory.WELFARE_ACCESS
ELITE_SERVICES = {0: (R1, R2), 1: (R1,), 2: (R2,)}


def exact(value) -> Fraction:
    """Convert to Fraction, reading floats as the decimal literal they print as."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite parameter {value}")
        return Fraction(repr(value))
    return Fraction(value)


class RestrictionError(ValueError):
    pass


class MalformedProfileError(ValueError):
    pass


@dataclass(frozen=True)
class GameParams:
    """
    Model primitives.

    ``n`` poor agents, per-capita public work ``b``, elite delivery
    efficiency ``theta``, link cost ``c`` for elite 0, office rent ``R`` and
    effort cost ``e`` per unit of delivered work.
    """

    n: int
    b: Fraction
    theta: Fraction
    c: Fraction
    R: Fraction
    e: Fraction

    def __post_init__(self):
        if int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("b", "theta", "c", "R", "e"):
            object.__setattr__(self, name, exact(getattr(self, name)))

    @property
    def gap(self) -> Fraction:
        """``b(1 - theta)``, the public work lost by electing an elite."""
        return self.b * (1 - self.theta)

    @property
    def theta_b(self) -> Fraction:
        return self.theta * self.b

    @property
    def agents(self) -> range:
        return range(3, self.n + 3)

    def search_cost(self, agent: int) -> Fraction:
        if agent not in self.agents:
            raise KeyError(f"agent {agent} is not a poor agent (3..{self.n + 2})")
        return Fraction(agent - 2, self.n)

    def replace(self, **changes) -> "GameParams":
        values = self.to_exact_dict()
        values.update(changes)
        return GameParams(**values)

    def to_exact_dict(self) -> dict:
        return {"n": self.n, "b": self.b, "theta": self.theta, "c": self.c, "R": self.R, "e": self.e}

    def to_dict(self) -> dict:
        return {k: (v if k == "n" else float(v)) for k, v in self.to_exact_dict().items()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "GameParams":
        missing = {"n", "b", "theta", "c", "R", "e"} - set(data)
        if missing:
            raise ValueError(f"missing parameter(s) {sorted(missing)}")
        return cls(**{k: data[k] for k in ("n", "b", "theta", "c", "R", "e")})


def search_costs(n: int) -> list:
    if n <= 0:
        raise ValueError("n must be positive")
    return [Fraction(i, n) for i in range(1, n + 1)]


# --------------------------------------------------------------------------
# parameter restrictions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Restriction:
    name: str
    holds: bool
    slack: Fraction  # > 0 (or >= 0 for weak conditions) when satisfied


@dataclass(frozen=True)
class RestrictionReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.checks)

    @property
    def failed(self) -> tuple:
        return tuple(r.name for r in self.checks if not r.holds)

    def __getitem__(self, name) -> Restriction:
        for r in self.checks:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {r.name: {"holds": r.holds, "slack": float(r.slack)} for r in self.checks}


def check_restrictions(p: GameParams) -> RestrictionReport:
    if not 0 < p.theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {p.theta}")
    x = p.gap
    a1 = p.b - 3
    a2_upper = min(2 * x, Fraction(2))
    a2 = min(p.c - 1, a2_upper - p.c)
    a3 = (min(Fraction(1), x) - max(p.c / 2, x / 2)) - Fraction(1, p.n)
    fn13 = p.R - 2 * p.n * p.e * p.theta_b
    return RestrictionReport(
        (
            Restriction("a1", a1 >= 0, a1),
            Restriction("a2", p.c > 1 and p.c < a2_upper, a2),
            Restriction("a3", a3 > 0, a3),
            Restriction("rent", fn13 >= 0, fn13),
        )
    )


def marginal_client_inequality(p: GameParams) -> bool:
    """
    Whether an extra supportive client always pays for elite ``l``:
    ``s[R - e m theta b] >= (s-1)[R - e (m-1) theta b]`` for all ``1 <= s, m <= n``.
    """
    tb = p.theta_b
    return all(
        s * (p.R - p.e * m * tb) >= (s - 1) * (p.R - p.e * (m - 1) * tb)
        for s in range(1, p.n + 1)
        for m in range(1, p.n + 1)
    )


# --------------------------------------------------------------------------
# threshold sets and closed-form payoffs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionSets:
    pi0: frozenset  # s_k >= b(1-theta)/2
    pi1: frozenset  # s_k >= b(1-theta)
    piU: frozenset  # the rest


def _first_at_or_above(p: GameParams, threshold: Fraction) -> int:
    """Lowest agent id whose search cost ``(k-2)/n`` is at least ``threshold``."""
    i = max(1, math.ceil(threshold * p.n))
    return i + 2


def partition_sets(p: GameParams) -> PartitionSets:
    agents = frozenset(p.agents)
    pi0 = frozenset(range(_first_at_or_above(p, p.gap / 2), p.n + 3))
    pi1 = frozenset(range(_first_at_or_above(p, p.gap), p.n + 3))
    return PartitionSets(pi0, pi1, agents - pi0)


def voting_threshold(p: GameParams, patron: int) -> Fraction:
    """Search cost at or above which a client weakly prefers voting for its patron."""
    if patron == 0:
        return p.gap / 2
    if patron in (1, 2):
        return p.gap
    raise ValueError(f"unknown elite {patron!r}")


def elite_expected_payoff(p: GameParams, votes: int, clients: int) -> Fraction:
    if not (0 <= votes <= p.n and 0 <= clients <= p.n):
        raise ValueError("votes and clients must lie in [0, n]")
    return Fraction(votes, p.n) * (p.R - p.e * clients * p.theta_b)


def _check_beliefs(p: GameParams, beliefs: Mapping) -> dict:
    probs = {k: exact(beliefs.get(k, 0)) for k in CANDIDATES}
    extra = set(beliefs) - set(CANDIDATES)
    if extra:
        raise ValueError(f"unknown candidate(s) {sorted(map(str, extra))}")
    if any(v < 0 for v in probs.values()) or sum(probs.values()) != 1:
        raise ValueError(f"win probabilities must be nonnegative and sum to 1, got {beliefs}")
    return probs


def poor_expected_payoff(
    p: GameParams, agent: int, link_choice, vote, beliefs: Mapping
) -> Fraction:
    """
    Lifetime payoff of a poor agent: public work received minus link and
    market costs over both periods. ``beliefs`` maps candidates to win
    probabilities and must already include the agent's own vote.
    """
    probs = _check_beliefs(p, beliefs)
    if vote not in CANDIDATES:
        raise ValueError(f"unknown vote {vote!r}")
    if link_choice not in (None, *ELITES):
        raise ValueError(f"unknown link choice {link_choice!r}")
    if probs[vote] < Fraction(1, p.n):
        raise ValueError(f"beliefs give {vote!r} less than the agent's own vote share 1/n")
    s = p.search_cost(agent)
    beta = probs[N]
    if link_choice is None:
        return -4 * s + beta * p.b
    alpha = probs[link_choice]
    if link_choice == 0:
        return alpha * p.theta_b + (1 - alpha) * (-2 * s) + beta * p.b - p.c
    return alpha * p.theta_b + (1 - alpha) * (-s) + beta * p.b - 2 * s


# --------------------------------------------------------------------------
# strategy profiles and outcomes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyProfile:
    """
    Consent sets per elite, each poor agent's link (elite id or None) and vote
    (elite id or ``"N"``).
    """

    consent: Mapping
    links: Mapping
    votes: Mapping

    def clients(self, elite: int) -> frozenset:
        return frozenset(k for k, l in self.links.items() if l == elite)

    def to_dict(self) -> dict:
        return {
            "consent": {str(l): sorted(self.consent.get(l, ())) for l in ELITES},
            "links": {str(k): self.links[k] for k in sorted(self.links)},
            "votes": {str(k): self.votes[k] for k in sorted(self.votes)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "StrategyProfile":
        def cand(v):
            return N if v == N else int(v)

        try:
            consent = {int(l): frozenset(int(k) for k in ks) for l, ks in data["consent"].items()}
            links = {int(k): (None if l is None else int(l)) for k, l in data["links"].items()}
            votes = {int(k): cand(v) for k, v in data["votes"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedProfileError(f"cannot read profile: {exc}") from None
        return cls(consent, links, votes)


def check_profile(p: GameParams, profile: StrategyProfile) -> None:
    agents = set(p.agents)
    if set(profile.links) != agents or set(profile.votes) != agents:
        raise MalformedProfileError(f"profile must assign a link and a vote to each of agents 3..{p.n + 2}")
    for l, ks in profile.consent.items():
        if l not in ELITES:
            raise MalformedProfileError(f"consent set for unknown elite {l!r}")
        if not set(ks) <= agents:
            raise MalformedProfileError(f"elite {l} consents to non-agents {sorted(set(ks) - agents)}")
    for k in sorted(agents):
        link, vote = profile.links[k], profile.votes[k]
        if link is not None:
            if link not in ELITES:
                raise MalformedProfileError(f"agent {k} links to unknown elite {link!r}")
            if k not in profile.consent.get(link, ()):
                raise MalformedProfileError(f"agent {k} links to elite {link} without its consent")
        if vote not in CANDIDATES:
            raise MalformedProfileError(f"agent {k} votes for unknown candidate {vote!r}")


def is_pruned(profile: StrategyProfile) -> bool:
    """Votes restricted to own patron or N, and N for the unlinked."""
    return all(
        v == N or v == profile.links[k] for k, v in profile.votes.items()
    )


@dataclass(frozen=True)
class EquilibriumOutcome:
    win_probabilities: dict
    clients: dict  # m_l per elite
    votes: dict  # s_l per elite
    expected_public_work: dict  # per poor agent
    payoffs: dict  # lifetime payoff per poor agent
    elite_payoffs: dict
    partition: PartitionSets

    def to_dict(self) -> dict:
        f = float
        return {
            "win_probabilities": {str(k): f(v) for k, v in self.win_probabilities.items()},
            "clients": {str(k): v for k, v in self.clients.items()},
            "votes": {str(k): v for k, v in self.votes.items()},
            "expected_public_work": {str(k): f(v) for k, v in sorted(self.expected_public_work.items())},
            "payoffs": {str(k): f(v) for k, v in sorted(self.payoffs.items())},
            "elite_payoffs": {str(k): f(v) for k, v in self.elite_payoffs.items()},
            "partition": {
                "pi0": sorted(self.partition.pi0),
                "pi1": sorted(self.partition.pi1),
                "piU": sorted(self.partition.piU),
            },
        }


def _tally(profile: StrategyProfile) -> dict:
    counts = dict.fromkeys(CANDIDATES, 0)
    for v in profile.votes.values():
        counts[v] += 1
    return counts


def evaluate_profile(p: GameParams, profile: StrategyProfile) -> EquilibriumOutcome:
    check_profile(p, profile)
    counts = _tally(profile)
    probs = {k: Fraction(v, p.n) for k, v in counts.items()}
    work = {}
    payoffs = {}
    for k in p.agents:
        link = profile.links[k]
        work[k] = probs[N] * p.b + (probs[link] * p.theta_b if link is not None else 0)
        payoffs[k] = poor_expected_payoff(p, k, link, profile.votes[k], probs)
    clients = {l: len(profile.clients(l)) for l in ELITES}
    votes = {l: counts[l] for l in ELITES}
    return EquilibriumOutcome(
        win_probabilities=probs,
        clients=clients,
        votes=votes,
        expected_public_work=work,
        payoffs=payoffs,
        elite_payoffs={l: elite_expected_payoff(p, votes[l], clients[l]) for l in ELITES},
        partition=partition_sets(p),
    )


def construct_clientelism_equilibrium(p: GameParams) -> tuple:
    """
    Build the equilibrium in which elite 0 serves every agent whose search
    cost is at least ``b(1-theta)/2`` and everyone else stays unlinked and
    votes N. Returns ``(profile, outcome)``.
    """
    report = check_restrictions(p)
    if not report.passed:
        raise RestrictionError(f"parameter restriction(s) fail: {', '.join(report.failed)}")
    sets = partition_sets(p)
    profile = StrategyProfile(
        consent={0: sets.pi0, 1: sets.pi1, 2: sets.pi1},
        links={k: (0 if k in sets.pi0 else None) for k in p.agents},
        votes={k: (0 if k in sets.pi0 else N) for k in p.agents},
    )
    return profile, evaluate_profile(p, profile)


# --------------------------------------------------------------------------
# deviation analysis
# --------------------------------------------------------------------------


class _Scaled:
    """
    Integer rescaling of all payoffs for one parameter point.

    Poor payoffs are multiplied by ``D * n**2`` and elite payoffs by
    ``E * n`` so every comparison is on Python ints.
    """

    def __init__(self, p: GameParams):
        n = p.n
        self.n = n
        d = math.lcm(p.b.denominator, p.theta_b.denominator, p.c.denominator)
        self.poor_scale = Fraction(d * n * n)
        self.B = d * n * p.b
        self.TB = d * n * p.theta_b
        self.C = d * n * n * p.c
        self.D = d
        for v in (self.B, self.TB, self.C):
            assert v.denominator == 1
        self.B, self.TB, self.C = int(self.B), int(self.TB), int(self.C)
        et = p.e * p.theta_b
        de = math.lcm(p.R.denominator, et.denominator)
        self.elite_scale = Fraction(de * n)
        self.RR = int(de * p.R)
        self.EE = int(de * et)

    def poor(self, i: int, link, counts) -> int:
        """Payoff of the agent with search cost ``i/n``; ``counts`` includes its vote."""
        n, si = self.n, self.D * i
        if link is None:
            return counts[N] * self.B - 4 * n * si
        cl = counts[link]
        if link == 0:
            return cl * self.TB + counts[N] * self.B - self.C - 2 * (n - cl) * si
        return cl * self.TB + counts[N] * self.B - 2 * n * si - (n - cl) * si

    def elite(self, votes: int, clients: int) -> int:
        return votes * (self.RR - clients * self.EE)


def _best_response(sc: _Scaled, i: int, offers, counts, order=CANDIDATES):
    """All maximizing (link, vote) pairs for agent ``i`` given others' vote counts."""
    best, arg = None, []
    for link in offers:
        for vote in order:
            counts[vote] += 1
            u = sc.poor(i, link, counts)
            counts[vote] -= 1
            if best is None or u > best:
                best, arg = u, [(link, vote)]
            elif u == best:
                arg.append((link, vote))
    return best, arg


def _offers(consent, k, extra=None, without=None):
    out = [l for l in ELITES if (k in consent.get(l, ()) or l == extra) and l != without]
    out.append(None)
    return out


def _deviations(p: GameParams, profile: StrategyProfile, sc: _Scaled):
    """
    Yield ``(stage, actor, kind, detail, scaled_gain, scale)`` for every
    unilateral deviation examined. Positive gain means the deviation pays.
    """
    links, votes, consent = profile.links, profile.votes, profile.consent
    counts = _tally(profile)
    agents = list(p.agents)

    # vote stage: each voter's alternatives, own link fixed
    for k in agents:
        i, link, vote = k - 2, links[k], votes[k]
        now = sc.poor(i, link, counts)
        counts[vote] -= 1
        for alt in CANDIDATES:
            if alt == vote:
                continue
            counts[alt] += 1
            gain = sc.poor(i, link, counts) - now
            counts[alt] -= 1
            yield "vote", k, "vote", (vote, alt), gain, sc.poor_scale
        counts[vote] += 1

    # link stage: switch link (or drop it) and re-optimize own vote
    for k in agents:
        i, link, vote = k - 2, links[k], votes[k]
        now = sc.poor(i, link, counts)
        counts[vote] -= 1
        for alt in _offers(consent, k):
            if alt == link:
                continue
            best, arg = _best_response(sc, i, [alt], counts)
            yield "link", k, "link", (link, vote, alt, arg[0][1]), best - now, sc.poor_scale
        counts[vote] += 1

    # consent stage: one elite grants or withdraws one consent; that agent re-optimizes
    m = {l: 0 for l in ELITES}
    for k in agents:
        if links[k] is not None:
            m[links[k]] += 1
    for l in ELITES:
        base = sc.elite(counts[l], m[l])
        for k in agents:
            link, vote = links[k], votes[k]
            granted = k in consent.get(l, ())
            if granted and link != l:
                continue  # withdrawing an unused consent changes nothing
            counts[vote] -= 1
            if granted:
                _, arg = _best_response(sc, k - 2, _offers(consent, k, without=l), counts)
                kind = "withdraw"
            else:
                _, arg = _best_response(sc, k - 2, _offers(consent, k, extra=l), counts)
                kind = "grant"
            counts[vote] += 1
            new_link, new_vote = (link, vote) if (link, vote) in arg else arg[0]
            s_new = counts[l] - (vote == l) + (new_vote == l)
            m_new = m[l] - (link == l) + (new_link == l)
            gain = sc.elite(s_new, m_new) - base
            yield "consent", l, kind, (k, new_link, new_vote), gain, sc.elite_scale


def _describe(stage, kind, detail) -> str:
    def name(x):
        return "none" if x is None else str(x)

    if kind == "vote":
        old, new = detail
        return f"vote {name(new)} instead of {name(old)}"
    if kind == "link":
        old, old_vote, new, new_vote = detail
        return f"link to {name(new)} (voting {name(new_vote)}) instead of {name(old)} (voting {name(old_vote)})"
    k, new_link, new_vote = detail
    verb = "withdraw consent from" if kind == "withdraw" else "grant consent to"
    return f"{verb} agent {k}, who then links to {name(new_link)} and votes {name(new_vote)}"


@dataclass(frozen=True)
class DeviationRecord:
    stage: str
    agent: object  # poor agent id, or elite id at the consent stage
    description: str
    gain: Fraction

    @property
    def passed(self) -> bool:
        return self.gain <= 0


@dataclass(frozen=True)
class DeviationReport:
    records: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def failures(self) -> tuple:
        return tuple(r for r in self.records if not r.passed)

    @property
    def max_gain(self) -> Fraction:
        return max((r.gain for r in self.records), default=Fraction(0))

    def by_agent(self) -> dict:
        """(stage, actor) -> whether every deviation of that actor fails to pay."""
        out = {}
        for r in self.records:
            key = (r.stage, r.agent)
            out[key] = out.get(key, True) and r.passed
        return out

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_gain": float(self.max_gain),
            "failures": [
                {
                    "stage": r.stage,
                    "agent": r.agent,
                    "deviation": r.description,
                    "gain": float(r.gain),
                    "gain_exact": str(r.gain),
                }
                for r in self.failures
            ],
            "checked": len(self.records),
        }


def verify_spne(p: GameParams, profile: StrategyProfile) -> DeviationReport:
    """
    Check a profile for profitable unilateral deviations at the vote, link
    and consent stages. Ties are equilibrium-consistent.
    """
    check_profile(p, profile)
    sc = _Scaled(p)
    records = tuple(
        DeviationRecord(stage, actor, _describe(stage, kind, detail), Fraction(gain) / scale)
        for stage, actor, kind, detail, gain, scale in _deviations(p, profile, sc)
    )
    return DeviationReport(records)


def _is_equilibrium(p: GameParams, profile: StrategyProfile, sc: _Scaled) -> bool:
    return all(gain <= 0 for *_, gain, _ in _deviations(p, profile, sc))


# --------------------------------------------------------------------------
# brute force
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class OutcomePartition:
    """Client set of each elite plus the vote tally ``(s_0, s_1, s_2, s_N)``."""

    clients: tuple
    tally: tuple

    @classmethod
    def of(cls, profile: StrategyProfile) -> "OutcomePartition":
        counts = _tally(profile)
        return cls(
            tuple(tuple(sorted(profile.clients(l))) for l in ELITES),
            tuple(counts[c] for c in CANDIDATES),
        )

    def to_dict(self) -> dict:
        return {
            "clients": {str(l): list(ks) for l, ks in zip(ELITES, self.clients)},
            "tally": dict(zip(map(str, CANDIDATES), self.tally)),
        }


@dataclass(frozen=True)
class BruteForceResult:
    partitions: frozenset
    equilibrium_profiles: int
    profiles_checked: int

    def to_dict(self) -> dict:
        return {
            "partitions": [q.to_dict() for q in sorted(self.partitions)],
            "equilibrium_profiles": self.equilibrium_profiles,
            "profiles_checked": self.profiles_checked,
        }


def _agent_options(k, consent, pruned: bool):
    opts = [(None, N)] if pruned else [(None, v) for v in CANDIDATES]
    for l in ELITES:
        if k in consent.get(l, ()):
            opts.extend([(l, l), (l, N)] if pruned else [(l, v) for v in CANDIDATES])
    return opts


def brute_force_equilibria(
    p: GameParams, max_n: int = 8, pruned: bool = True, consent: Mapping | None = None
) -> BruteForceResult:
    """
    Enumerate every (link, vote) profile of the poor with consent sets held
    at their equilibrium values and keep those with no profitable deviation.

    ``pruned`` restricts votes to own patron or N (and N for the unlinked).
    """
    if p.n > max_n:
        raise ValueError(f"n = {p.n} exceeds max_n = {max_n}")
    if consent is None:
        sets = partition_sets(p)
        consent = {0: sets.pi0, 1: sets.pi1, 2: sets.pi1}
    sc = _Scaled(p)
    agents = list(p.agents)
    options = [_agent_options(k, consent, pruned) for k in agents]
    found = set()
    hits = checked = 0
    for choice in itertools.product(*options):
        checked += 1
        profile = StrategyProfile(
            consent,
            {k: c[0] for k, c in zip(agents, choice)},
            {k: c[1] for k, c in zip(agents, choice)},
        )
        if _is_equilibrium(p, profile, sc):
            hits += 1
            found.add(OutcomePartition.of(profile))
    return BruteForceResult(frozenset(found), hits, checked)


# --------------------------------------------------------------------------
# benchmark without elections, comparative statics, network export
# --------------------------------------------------------------------------


def _replica_ids(elite: int, replicas: int) -> list:
    if replicas == 1:
        return [str(elite)]
    return [f"{elite}.{r}" for r in range(1, replicas + 1)]


@dataclass(frozen=True)
class BenchmarkOutcome:
    links: dict  # agent -> tuple of provider ids
    access_costs: dict  # agent -> lifetime market + link cost
    provider_clients: dict  # provider id -> number of clients
    network: VillageNetwork


def benchmark_access_costs(p: GameParams, agent: int, one_link_cap: bool) -> dict:
    """Lifetime access cost of each linking option when there is no election."""
    s = p.search_cost(agent)
    if one_link_cap:
        return {"none": 4 * s, "1": 2 * s, "2": 2 * s, "0": p.c}
    return {"none": 4 * s, "1+2": Fraction(0), "0": p.c}


def construct_benchmark(
    p: GameParams, replicas: int = 1, one_link_cap: bool = True, village_id: str = "benchmark"
) -> BenchmarkOutcome:
    """
    Links without elections: poor agents use the free single-resource
    elites (and their replicas), assigned round-robin.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    ones, twos = _replica_ids(1, replicas), _replica_ids(2, replicas)
    links, costs = {}, {}
    for idx, k in enumerate(p.agents):
        s = p.search_cost(k)
        if one_link_cap:
            pool = [x for pair in zip(ones, twos) for x in pair]
            links[k] = (pool[idx % len(pool)],)
            costs[k] = 2 * s
        else:
            links[k] = (ones[idx % replicas], twos[idx % replicas])
            costs[k] = Fraction(0)
    load = {}
    edges = []
    for k, providers in links.items():
        for prov in providers:
            load[prov] = load.get(prov, 0) + 1
            service = R1 if prov.split(".")[0] == "1" else R2
            edges.append(ServiceEdge(str(k), prov, service))
    net = VillageNetwork(
        village_id,
        frozenset(str(k) for k in p.agents),
        frozenset(load),
        frozenset(edges),
    )
    return BenchmarkOutcome(links, costs, load, net)


def equilibrium_to_network(p: GameParams, profile: StrategyProfile, village_id: str = "game") -> VillageNetwork:
    """Export links as survey edges: elite 0 supplies credit and welfare access."""
    edges = []
    for k in p.agents:
        l = profile.links[k]
        if l is not None:
            edges.extend(ServiceEdge(str(k), str(l), cat) for cat in ELITE_SERVICES[l])
    used = frozenset(e.provider for e in edges)
    return VillageNetwork(village_id, frozenset(str(k) for k in p.agents), used, frozenset(edges))


@dataclass(frozen=True)
class StaticsRow:
    params: GameParams
    passed: bool
    failed: tuple
    clients: int | None
    client_work: Fraction | None
    nonclient_work: Fraction | None

    @property
    def work_gap(self) -> Fraction | None:
        if self.client_work is None or self.nonclient_work is None:
            return None
        return self.client_work - self.nonclient_work

    def to_dict(self) -> dict:
        def f(x):
            return None if x is None else float(x)

        return {
            **self.params.to_dict(),
            "passed": self.passed,
            "failed": list(self.failed),
            "clients": self.clients,
            "client_work": f(self.client_work),
            "nonclient_work": f(self.nonclient_work),
            "work_gap": f(self.work_gap),
        }


SWEEPABLE = ("n", "b", "theta", "c", "R", "e")


def comparative_statics(p_base: GameParams, sweep: Mapping) -> list:
    """
    Client counts and the client/non-client work gap over a parameter grid.

    ``sweep`` maps parameter names to value lists; their Cartesian product
    is evaluated and rows come back sorted by the swept values.
    """
    names = [k for k in SWEEPABLE if k in sweep]
    unknown = set(sweep) - set(SWEEPABLE)
    if unknown:
        raise ValueError(f"cannot sweep {sorted(unknown)}")
    rows = []
    for values in itertools.product(*(sweep[k] for k in names)):
        q = p_base.replace(**dict(zip(names, values)))
        report = check_restrictions(q)
        if not report.passed:
            rows.append((values, StaticsRow(q, False, report.failed, None, None, None)))
            continue
        profile, out = construct_clientelism_equilibrium(q)
        sets = out.partition
        cw = min(out.expected_public_work[k] for k in sets.pi0)
        nw = max((out.expected_public_work[k] for k in sets.piU), default=None)
        rows.append((values, StaticsRow(q, True, (), len(sets.pi0), cw, nw)))
    rows.sort(key=lambda r: tuple(exact(v) for v in r[0]))
    return [r for _, r in rows]


def parameter_grid(
    ns: Iterable,
    thetas: Iterable,
    bs: Iterable,
    cs: Iterable,
    R=100,
    e=Fraction(1, 10),
) -> list:
    """All grid points satisfying every restriction, in deterministic order."""
    out = []
    for n, theta, b, c in itertools.product(ns, thetas, bs, cs):
        q = GameParams(n=n, b=b, theta=theta, c=c, R=R, e=e)
        if check_restrictions(q).passed:
            out.append(q)
    return out
