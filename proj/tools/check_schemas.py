#!/usr/bin/env python3
"""Runs both hunts and the diophantine/fixed-point commands, then validates
every certificate and effective config against the shipped JSON schemas."""
import glob
import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def main():
    cli, schema_dir = sys.argv[1], sys.argv[2]
    cert_schema = json.load(open(os.path.join(schema_dir, "certificate.schema.json")))
    config_schema = json.load(open(os.path.join(schema_dir, "config.schema.json")))
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        runs = []
        for mech in ("thm1", "thm2"):
            out = os.path.join(tmp, mech)
            subprocess.run([cli, "hunt", "--mechanism", mech, "--out", out], check=True,
                           stdout=subprocess.DEVNULL)
            runs.append(out)
        certs = sorted(glob.glob(os.path.join(tmp, "*", "certificates", "cert_*.json")))
        if len(certs) < 6:
            print(f"expected 6 certificates, found {len(certs)}")
            failures += 1
        checks = [(p, cert_schema) for p in certs] + [(os.path.join(r, "config.json"), config_schema) for r in runs]
        for path, schema in checks:
            errs = list(jsonschema.Draft202012Validator(schema).iter_errors(json.load(open(path))))
            for e in errs:
                print(f"{os.path.relpath(path, tmp)}: {e.json_path}: {e.message[:200]}")
            failures += bool(errs)
            print(f"{os.path.relpath(path, tmp)}: {'ok' if not errs else 'INVALID'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
