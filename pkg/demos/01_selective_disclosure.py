"""Issue a credential, reveal one attribute, verify, then revoke it.

The first run with the groth16 backend generates proving keys for the
scenario-I circuit (about 15 s on one core); later runs load them.
"""

from zkcred.presentation import PresentationError, RequestedCredential, create_presentation, new_request, \
    verify_presentation

from _common import ALICE, PERSON, Setup, parse_args, timed

args = parse_args(__doc__)
s = Setup(args.backend, args.keys)
cred = s.issue(ALICE)
print(f"issued credential, revocation id {cred.revocation_id}")

request = new_request([RequestedCredential(PERSON.hash, (PERSON.by_label("name").position,))],
                      trusted_issuers=[s.issuer.public])
vp = timed("present", create_presentation, s.wallet, request, backend=args.backend, keystore=s.keystore)
print(f"circuit {vp.spec.name}, proof {len(vp.proof)} bytes, disclosed:",
      {d.label: d.value for d in vp.disclosures})
report = timed("verify", verify_presentation, vp, request, s.policy, keystore=s.keystore)
print("valid:", report.ok)

s.registry.revoke(cred.revocation_id)
print("revoked; presenting again...")
try:
    create_presentation(s.wallet, request, backend=args.backend, keystore=s.keystore)
except PresentationError as e:
    print("refused:", e.code)
