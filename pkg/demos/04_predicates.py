"""Prove age >= 18 and residence inside a polygon without revealing either value."""

from zkcred.presentation import RequestedCredential, create_presentation, new_request, verify_presentation

from _common import ALICE, PERSON, Setup, parse_args, timed

args = parse_args(__doc__)
s = Setup(args.backend, args.keys)
s.issue(ALICE)
pos = lambda label: {"attr": PERSON.by_label(label).position}
adult = {"type": "expr", "expr": {"op": ">=", "args": [pos("age"), {"const": 18}]}, "expect": 1}
bavaria_box = [[8.97, 47.27], [13.84, 47.27], [13.84, 50.56], [8.97, 50.56]]
inside = {"type": "polygon", "x": pos("lon"), "y": pos("lat"), "vertices": bavaria_box, "expect": 1}

request = new_request([RequestedCredential(PERSON.hash, ())], predicates=[adult, inside],
                      trusted_issuers=[s.issuer.public])
vp = timed("present", create_presentation, s.wallet, request, backend=args.backend, keystore=s.keystore)
print("disclosed attributes:", vp.disclosures)
print("predicate outputs:", vp.output("pred0"), vp.output("pred1"))
print("valid:", verify_presentation(vp, request, s.policy, keystore=s.keystore).ok)
