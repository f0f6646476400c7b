"""Validates CLI certificates and example specs against the shipped schemas."""
import json
import subprocess
import sys

import jsonschema

BIN = sys.argv[1] if len(sys.argv) > 1 else "target/release/densitylab"
SPEC = json.load(open("schemas/setspec.schema.json"))
CERT = json.load(open("schemas/certificate.schema.json"))

CASES = [
    ({"node": {"type": "poly", "coeffs": [0, 0, 1]}}, ["--moduli", "prime-squares", "--budget", "2500"]),
    ({"node": {"type": "perfect_powers"}}, ["--budget", "100"]),
    ({"node": {"type": "quadform", "a": 1, "b": 0, "c": 1}}, ["--budget", "1000"]),
    ({"node": {"type": "poly", "coeffs": [1, 0, 1]}}, ["--budget", "100"]),
    ({"node": {"type": "poly_prime_preimage", "coeffs": [1, 0, 1]}}, ["--budget", "100"]),
    ({"node": {"type": "chain", "prefix": [1, 2, 6, 24, 120]}}, []),
    ({"node": {"type": "digit_avoider", "base": 10, "pattern": [9]}}, ["--n", "3"]),
    ({"ambient": "Z", "node": {"type": "omega_exact", "k": 1}}, ["--n", "6"]),
    ({"node": {"type": "union", "of": [{"type": "ap", "a": 4, "h": 1},
                                       {"type": "affine", "a": 3, "h": 1, "inner": {"type": "finite", "values": [1, 2]}},
                                       {"type": "intersect_ap", "k": 5, "h": 0,
                                        "inner": {"type": "quadform", "a": 1, "b": 1, "c": 1}}]}},
     ["--moduli", "9,25"]),
]

# specs whose hits are search-bounded cannot be certified; schema only
SCHEMA_ONLY = [
    {"node": {"type": "omega_at_most", "k": 2}},
    {"ambient": "Z", "node": {"type": "factorial_shift"}},
]
for spec in SCHEMA_ONLY:
    jsonschema.validate(spec, SPEC)

for spec, extra in CASES:
    jsonschema.validate(spec, SPEC)
    out = subprocess.run([BIN, "certify", "--spec", json.dumps(spec), "--epsilon", "1", *extra],
                         capture_output=True, text=True, check=True)
    cert = json.loads(out.stdout)
    jsonschema.validate(cert, CERT)
    print(cert["criterion"], len(cert["records"]), "ok")
