"""A presentation only its designated verifier can read or be convinced by."""

from zkcred.encoding import AttributeValue
from zkcred.presentation import (DesignatedVerifier, PresentationError, RequestedCredential,
                                 designated_presentation, forge_presentation, new_request, open_envelope,
                                 verify_presentation)

from _common import ALICE, PERSON, Setup, new_key, parse_args, timed

args = parse_args(__doc__)
s = Setup(args.backend, args.keys)
s.issue(ALICE)
enc, sig = new_key(), new_key()
request = new_request([RequestedCredential(PERSON.hash, (0,))], trusted_issuers=[s.issuer.public],
                      designated_verifier=DesignatedVerifier(enc.public, sig.public))

envelope = timed("present", designated_presentation, s.wallet, request, backend=args.backend, keystore=s.keystore)
vp = open_envelope(envelope, enc)
print("verifier opens and accepts:", verify_presentation(vp, request, s.policy, keystore=s.keystore).ok)
try:
    open_envelope(envelope, new_key())
except PresentationError as e:
    print("anyone else:", e.code)

# the verifier can produce an equally valid presentation of anything,
# so showing one to a third party proves nothing
fake = forge_presentation(request, sig, {(0, 0): AttributeValue("short-string", "mallory")},
                          {s.ref: (s.registry.root, s.registry.depth)}, backend=args.backend, keystore=s.keystore)
print("forged by the verifier, accepted:", verify_presentation(fake, request, s.policy, keystore=s.keystore).ok,
      {d.cred: d.value for d in fake.disclosures})
