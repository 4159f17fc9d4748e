# Solving and checking the election game at n=10, b=3, theta=0.7, c=1.1.

from fractions import Fraction

from clientlab.game import (
    N,
    GameParams,
    StrategyProfile,
    brute_force_equilibria,
    check_restrictions,
    comparative_statics,
    construct_benchmark,
    construct_clientelism_equilibrium,
    equilibrium_to_network,
    verify_spne,
)
from clientlab.indices import compute_indices

p = GameParams(n=10, b=3, theta=Fraction(7, 10), c=Fraction(11, 10), R=100, e=Fraction(1, 10))
print({r.name: (r.holds, str(r.slack)) for r in check_restrictions(p).checks})

profile, out = construct_clientelism_equilibrium(p)
print("clients of 0:", sorted(profile.clients(0)))
print("win probabilities:", {k: str(v) for k, v in out.win_probabilities.items()})
print("public work, client vs non-client:", out.expected_public_work[7], out.expected_public_work[3])

# every unilateral deviation is checked in exact arithmetic
print("verdict:", verify_spne(p, profile).verdict)

# agent 7 abstaining from its patron is caught at the vote stage
votes = {**profile.votes, 7: N}
bad = verify_spne(p, StrategyProfile(profile.consent, profile.links, votes))
for r in bad.failures:
    print(" ", r.stage, r.agent, r.description, r.gain)

# smaller village: enumerate every pruned profile
small = p.replace(n=6)
print("partitions at n=6:", [q.to_dict() for q in brute_force_equilibria(small).partitions])

# richer public goods shrink the client base
for row in comparative_statics(p, {"b": [3, 4, 5]}):
    print("b =", row.params.b, "clients:", row.clients, "work gap:", row.work_gap)

# star versus benchmark links
eq_records, _ = compute_indices([equilibrium_to_network(p, profile)])
bench_records, _ = compute_indices([construct_benchmark(p).network])
print("max concentration, equilibrium:", max(r.concentration_raw for r in eq_records),
      "benchmark:", max(r.concentration_raw for r in bench_records))
