# Household indices on a four-household village.
#
# A and B both borrow from the moneylender K. B returns the favour
# (religious guidance), A does not. C and D swap labour and credit.

import io

from clientlab.graph import read_villages, relation_between
from clientlab.indices import compute_indices, detect_patrons, records_to_csv

CSV = """village_id,receiver_id,provider_id,service,receiver_sampled,provider_sampled
V1,A,K,credit,1,0
V1,A,K,political_guidance,1,0
V1,B,K,credit,1,0
V1,K,B,religious_guidance,0,1
V1,C,D,labour,1,1
V1,D,C,credit,1,1
"""

net = read_villages(io.StringIO(CSV))["V1"]

# one relation per (household, counterpart); any reverse flow makes it reciprocal
for x in ("A", "B"):
    r = relation_between(net, x, "K")
    print(x, "<- K", sorted(s.value for s in r.services_received), "reciprocal:", r.reciprocal, "d:", r.d, "w:", r.w)

# K reaches the 5% bar (1 of 4 households), so A is its client
report = detect_patrons(net)
print("patrons:", [(p.id, p.c, p.n) for p in report.patrons], "score:", report.clientelism_score)

records, _ = compute_indices([net])
print(records_to_csv(records))
