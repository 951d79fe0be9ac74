"""A three-level delegation chain: ministry -> agency -> clerk -> holder."""

from zkcred.credential import AttributeDescriptor, Schema
from zkcred.presentation import RequestedCredential, new_request, present_chain, verify_presentation

from _common import ALICE, PERSON, Setup, new_key, parse_args, timed

args = parse_args(__doc__)
s = Setup(args.backend, args.keys)          # s.issuer plays the ministry
ROLE = Schema("role", [AttributeDescriptor(0, "role", "short-string")])
agency, clerk = new_key(), new_key()
s.issue(ALICE, issuer=clerk)
s.issue({"role": "clerk"}, issuer=agency, binding=clerk.public, delegatable=True, schema=ROLE)
s.issue({"role": "agency"}, issuer=s.issuer, binding=agency.public, delegatable=True, schema=ROLE)

request = new_request([RequestedCredential(PERSON.hash, (0,))], trusted_issuers=[s.issuer.public], chain=3)
vp = timed("present", present_chain, s.wallet, request, backend=args.backend, keystore=s.keystore)
print(f"circuit {vp.spec.name}; only the ministry key is public")
print("valid:", verify_presentation(vp, request, s.policy, keystore=s.keystore).ok)
