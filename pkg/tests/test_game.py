import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clientlab.game import (
    CANDIDATES,
    N,
    GameParams,
    MalformedProfileError,
    OutcomePartition,
    RestrictionError,
    StrategyProfile,
    benchmark_access_costs,
    brute_force_equilibria,
    check_restrictions,
    comparative_statics,
    construct_benchmark,
    construct_clientelism_equilibrium,
    elite_expected_payoff,
    equilibrium_to_network,
    evaluate_profile,
    is_pruned,
    marginal_client_inequality,
    parameter_grid,
    partition_sets,
    poor_expected_payoff,
    search_costs,
    verify_spne,
    voting_threshold,
)
from clientlab.indices import compute_indices, detect_patrons


def flipped(profile, agent, link=None, vote=None, keep_link=False):
    links = dict(profile.links)
    votes = dict(profile.votes)
    if not keep_link:
        links[agent] = link
    votes[agent] = vote
    return StrategyProfile(profile.consent, links, votes)


# -- primitives ------------------------------------------------------------


def test_search_costs():
    assert search_costs(4) == [F(1, 4), F(1, 2), F(3, 4), F(1)]
    assert search_costs(1) == [F(1)]
    with pytest.raises(ValueError):
        search_costs(0)


def test_agent_7_search_cost(pstar):
    assert pstar.search_cost(7) == F(1, 2)
    with pytest.raises(KeyError):
        pstar.search_cost(2)


def test_params_exact_and_round_trip(pstar):
    assert pstar.theta == F(7, 10) and pstar.c == F(11, 10)
    assert pstar.gap == F(9, 10)
    assert GameParams.from_dict(pstar.to_dict()) == pstar
    with pytest.raises(ValueError):
        GameParams.from_dict({"n": 3})


def test_restrictions_pstar(pstar):
    report = check_restrictions(pstar)
    assert report.passed
    assert report["a3"].slack == F(1, 4)


def test_a3_strict_boundary():
    report = check_restrictions(GameParams(20, 3, F(8, 10), F(11, 10), 100, F(1, 10)))
    assert report["a3"].slack == 0
    assert report.failed == ("a3",)


def test_a1_fails():
    assert "a1" in check_restrictions(GameParams(10, F(29, 10), F(7, 10), F(11, 10), 100, F(1, 10))).failed


def test_a2_and_rent_fail():
    assert "a2" in check_restrictions(GameParams(10, 3, F(7, 10), 1, 100, F(1, 10))).failed
    assert "rent" in check_restrictions(GameParams(10, 3, F(7, 10), F(11, 10), 4, F(1, 10))).failed


def test_partition_pstar(pstar):
    sets = partition_sets(pstar)
    assert sets.pi0 == set(range(7, 13))
    assert sets.pi1 == {11, 12}
    assert sets.piU == {3, 4, 5, 6}


def test_partition_extremes():
    assert partition_sets(GameParams(10, 5, F(1, 2), F(11, 10), 100, F(1, 10))).pi0 == frozenset()
    # at b(1-theta) == 2 the weak threshold still admits the agent with s = 1
    assert partition_sets(GameParams(10, 4, F(1, 2), F(11, 10), 100, F(1, 10))).pi0 == {12}
    near_one = GameParams(10, 3, F(999, 1000), F(11, 10), 100, F(1, 10))
    assert partition_sets(near_one).pi0 == set(near_one.agents)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.fractions(0, 3))
def test_partition_matches_threshold_definition(n, gap):
    b = F(3)
    theta = 1 - gap / b
    if not 0 < theta < 1:
        return
    p = GameParams(n, b, theta, F(11, 10), 100, F(1, 10))
    sets = partition_sets(p)
    assert sets.pi0 == {k for k in p.agents if p.search_cost(k) >= p.gap / 2}
    assert sets.pi1 == {k for k in p.agents if p.search_cost(k) >= p.gap}
    assert sets.piU == set(p.agents) - sets.pi0


def test_voting_thresholds(pstar):
    assert voting_threshold(pstar, 0) == F(45, 100)
    assert voting_threshold(pstar, 1) == voting_threshold(pstar, 2) == F(9, 10)
    with pytest.raises(ValueError):
        voting_threshold(pstar, 3)


def test_elite_payoff(pstar):
    assert elite_expected_payoff(pstar, 6, 6) == F(59244, 1000)
    assert elite_expected_payoff(pstar, 0, 4) == 0


def test_marginal_client_inequality(pstar):
    assert pstar.R >= 2 * pstar.n * pstar.e * pstar.theta_b
    assert marginal_client_inequality(pstar)


def test_poor_payoff_examples(pstar):
    linked = poor_expected_payoff(pstar, 7, 0, 0, {0: F(3, 5), N: F(2, 5)})
    assert linked == F(96, 100)
    unlinked = poor_expected_payoff(pstar, 7, None, N, {0: F(1, 2), N: F(1, 2)})
    assert unlinked == F(-1, 2)


def test_poor_payoff_linked_to_one_uses_plus_beta_b(pstar):
    # alpha' theta b - (1 - alpha') s + beta b - 2 s
    got = poor_expected_payoff(pstar, 11, 1, 1, {0: F(1, 2), 1: F(1, 10), N: F(2, 5)})
    s = F(9, 10)
    assert got == F(1, 10) * F(21, 10) - F(9, 10) * s + F(2, 5) * 3 - 2 * s


def test_poor_payoff_rejects_bad_beliefs(pstar):
    with pytest.raises(ValueError):
        poor_expected_payoff(pstar, 7, 0, 0, {0: F(1, 2), N: F(1, 3)})
    with pytest.raises(ValueError):
        poor_expected_payoff(pstar, 7, 0, 0, {0: F(-1, 2), N: F(3, 2)})
    with pytest.raises(ValueError):
        poor_expected_payoff(pstar, 7, 0, 0, {N: F(1)})  # own vote missing


# -- construction and verification ------------------------------------------


def test_construct_pstar(pstar):
    profile, out = construct_clientelism_equilibrium(pstar)
    assert profile.clients(0) == set(range(7, 13))
    assert out.win_probabilities == {0: F(3, 5), 1: 0, 2: 0, N: F(2, 5)}
    assert out.expected_public_work[7] == F(246, 100)
    assert out.expected_public_work[3] == F(6, 5)
    assert out.elite_payoffs[0] == F(59244, 1000)
    assert is_pruned(profile)


def test_construct_refuses_failed_restrictions():
    with pytest.raises(RestrictionError):
        construct_clientelism_equilibrium(GameParams(10, 4, F(1, 2), F(11, 10), 100, F(1, 10)))


def test_verify_pstar_passes(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    report = verify_spne(pstar, profile)
    assert report.passed and report.verdict == "pass"
    assert report.max_gain <= 0
    assert {r.stage for r in report.records} == {"vote", "link", "consent"}


def test_verify_vote_flip(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    report = verify_spne(pstar, flipped(profile, 7, vote=N, keep_link=True))
    assert report.verdict == "fail"
    vote = [r for r in report.failures if r.stage == "vote"]
    assert [(r.agent, r.gain) for r in vote] == [(7, F(1, 100))]
    s7 = pstar.search_cost(7)
    assert vote[0].gain == F(1, pstar.n) * (pstar.theta_b + 2 * s7 - pstar.b)
    assert "7" in json.dumps(report.to_dict())


def test_verify_relink_to_one(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    report = verify_spne(pstar, flipped(profile, 11, link=1, vote=1))
    link = [r for r in report.failures if r.stage == "link" and r.agent == 11]
    assert link and all(r.gain > 0 for r in link)


def test_verify_rejects_malformed(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    with pytest.raises(MalformedProfileError):
        verify_spne(pstar, flipped(profile, 3, link=0, vote=0))  # 3 has no consent from 0
    with pytest.raises(MalformedProfileError):
        verify_spne(pstar, StrategyProfile(profile.consent, {3: None}, {3: N}))


def test_profile_json_round_trip(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    doc = json.loads(json.dumps(profile.to_dict()))
    again = StrategyProfile.from_dict(doc)
    assert again.links == profile.links and again.votes == profile.votes
    assert {l: set(v) for l, v in again.consent.items()} == {l: set(v) for l, v in profile.consent.items()}
    with pytest.raises(MalformedProfileError):
        StrategyProfile.from_dict({"links": {}})


def test_vote_check_agrees_with_threshold(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    for k in sorted(profile.clients(0)):
        report = verify_spne(pstar, flipped(profile, k, vote=N, keep_link=True))
        restore = [r for r in report.records if r.stage == "vote" and r.agent == k and "vote 0" in r.description]
        assert len(restore) == 1
        s = pstar.search_cost(k)
        threshold = voting_threshold(pstar, 0)
        assert (restore[0].gain > 0) == (s > threshold)
        assert (restore[0].gain == 0) == (s == threshold)


# -- brute force -----------------------------------------------------------


def test_bruteforce_n6():
    p = GameParams(6, 3, F(7, 10), F(11, 10), 100, F(1, 10))
    result = brute_force_equilibria(p)
    assert len(result.partitions) == 1
    (part,) = result.partitions
    assert part.clients == ((5, 6, 7, 8), (), ())
    assert part.tally == (4, 0, 0, 2)
    profile, _ = construct_clientelism_equilibrium(p)
    assert part == OutcomePartition.of(profile)


def test_bruteforce_size_guard(pstar):
    with pytest.raises(ValueError):
        brute_force_equilibria(pstar, max_n=8)


def test_bruteforce_soundness_n5():
    p = GameParams(5, 3, F(7, 10), F(11, 10), 100, F(1, 10))
    sets = partition_sets(p)
    consent = {0: sets.pi0, 1: sets.pi1, 2: sets.pi1}
    import itertools

    from clientlab.game import _agent_options

    accepted = set()
    agents = list(p.agents)
    for choice in itertools.product(*(_agent_options(k, consent, True) for k in agents)):
        prof = StrategyProfile(consent, {k: c[0] for k, c in zip(agents, choice)}, {k: c[1] for k, c in zip(agents, choice)})
        if verify_spne(p, prof).passed:
            accepted.add(OutcomePartition.of(prof))
    assert accepted == brute_force_equilibria(p).partitions


@pytest.mark.parametrize("theta", [F(6, 10), F(7, 10), F(3, 4)])
@pytest.mark.parametrize("n", [3, 4])
def test_pruning_loses_nothing(n, theta):
    p = GameParams(n, 3, theta, F(11, 10), 100, F(1, 10))
    if not check_restrictions(p).passed:
        pytest.skip("inadmissible point")
    assert brute_force_equilibria(p).partitions == brute_force_equilibria(p, pruned=False).partitions


def test_multiplicity_below_six_sevenths_is_recorded():
    # b(1-theta) = 0.8 < 6/7; uniqueness is not claimed, only reported
    p = GameParams(6, 4, F(8, 10), F(11, 10), 100, F(1, 10))
    assert check_restrictions(p).passed and p.gap < F(6, 7)
    result = brute_force_equilibria(p)
    assert result.partitions
    assert result.profiles_checked > 0


# -- benchmark and network export ------------------------------------------


def test_equilibrium_export(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    net = equilibrium_to_network(pstar, profile)
    records, reports = compute_indices([net])
    report = reports[net.village_id]
    assert report.patron_ids == {"0"}
    assert report.clientelism_score == 72
    for r in records:
        if r.is_client:
            assert (r.concentration_raw, r.weighted_raw) == (4, 8)
        else:
            assert r.concentration_raw == 0
    assert {e.provider for e in net.edges} == {"0"}


def test_benchmark_capped(pstar):
    bench = construct_benchmark(pstar)
    assert all(len(v) == 1 for v in bench.links.values())
    records, _ = compute_indices([bench.network])
    assert {r.concentration_raw for r in records} == {1}
    assert not any("0" == x for v in bench.links.values() for x in v)


def test_benchmark_uncapped_replicas(pstar):
    bench = construct_benchmark(pstar, replicas=5, one_link_cap=False)
    assert set(bench.provider_clients.values()) == {2}
    records, _ = compute_indices([bench.network])
    assert {r.concentration_raw for r in records} == {2}


@pytest.mark.parametrize("replicas", [1, 2, 3, 4, 7])
@pytest.mark.parametrize("cap", [True, False])
def test_benchmark_provider_load(pstar, replicas, cap):
    bench = construct_benchmark(pstar, replicas=replicas, one_link_cap=cap)
    assert max(bench.provider_clients.values()) <= math.ceil(pstar.n / replicas)


def test_benchmark_zero_link_dominated_uncapped(pstar):
    for k in pstar.agents:
        costs = benchmark_access_costs(pstar, k, one_link_cap=False)
        assert costs["1+2"] < costs["0"]


def test_benchmark_rejects_bad_replicas(pstar):
    with pytest.raises(ValueError):
        construct_benchmark(pstar, replicas=0)


# -- comparative statics ---------------------------------------------------


def test_statics_in_b(pstar):
    rows = comparative_statics(pstar, {"b": [5, 3, 4]})
    assert [r.params.b for r in rows] == [3, 4, 5]
    assert [r.clients for r in rows] == [6, 5, 3]
    assert rows[0].work_gap == F(126, 100)


def test_statics_marks_excluded(pstar):
    rows = comparative_statics(pstar, {"b": [F(29, 10), 3]})
    assert rows[0].passed is False and rows[0].clients is None and "a1" in rows[0].failed
    with pytest.raises(ValueError):
        comparative_statics(pstar, {"zeta": [1]})


def test_statics_monotone_along_grid_lines():
    base = GameParams(12, 3, F(7, 10), F(11, 10), 100, F(1, 10))
    for theta in (F(6, 10), F(65, 100), F(7, 10)):
        rows = [r for r in comparative_statics(base.replace(theta=theta), {"b": [3, F(7, 2), 4, F(9, 2), 5]}) if r.passed]
        counts = [r.clients for r in rows]
        assert counts == sorted(counts, reverse=True)
    for b in (3, 4):
        rows = [r for r in comparative_statics(base.replace(b=b), {"theta": [F(t, 100) for t in range(55, 90, 5)]}) if r.passed]
        counts = [r.clients for r in rows]
        assert counts == sorted(counts)


def test_parameter_grid_deterministic():
    grid = parameter_grid(range(5, 9), [F(7, 10)], [3, 4], [F(11, 10)])
    assert grid == parameter_grid(range(5, 9), [F(7, 10)], [3, 4], [F(11, 10)])
    assert all(check_restrictions(p).passed for p in grid)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(5, 30),
    st.sampled_from([F(t, 100) for t in range(50, 91, 5)]),
    st.sampled_from([F(b, 2) for b in range(6, 41)]),
    st.sampled_from([F(c, 100) for c in range(105, 200, 10)]),
)
def test_construction_passes_where_admissible(n, theta, b, c):
    p = GameParams(n, b, theta, c, 100, F(1, 10))
    if not check_restrictions(p).passed:
        return
    profile, out = construct_clientelism_equilibrium(p)
    assert verify_spne(p, profile).passed
    sets = out.partition
    client_min = min(out.expected_public_work[k] for k in sets.pi0)
    others = [out.expected_public_work[k] for k in sets.piU]
    if others:
        assert client_min > max(others)
    assert sum(out.win_probabilities.values()) == 1
    assert set(CANDIDATES) == set(out.win_probabilities)


def test_evaluate_profile_everyone_votes_n(pstar):
    profile = StrategyProfile({0: frozenset(), 1: frozenset(), 2: frozenset()},
                              {k: None for k in pstar.agents}, {k: N for k in pstar.agents})
    out = evaluate_profile(pstar, profile)
    assert out.win_probabilities[N] == 1
    assert all(w == pstar.b for w in out.expected_public_work.values())


def test_detect_single_star_patron(pstar):
    profile, _ = construct_clientelism_equilibrium(pstar)
    assert len(detect_patrons(equilibrium_to_network(pstar, profile)).patrons) == 1
