"""Runs the CLI and validates its JSON reports against the shipped schema."""
import json
import os
import subprocess
import sys
import tempfile

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(0)

schema_path, calc_path = sys.argv[1], sys.argv[2]
tool = os.environ["QKP"]
schema = json.load(open(schema_path))
jsonschema.Draft202012Validator.check_schema(schema)

runs = [
    ["--suite", "jackson"],
    ["--suite", "cole-hopf", "--timing"],
    ["--suite", "hirota-classical", "--corrupt-corpus"],
    ["derive", calc_path],
]
with tempfile.TemporaryDirectory() as d:
    for i, args in enumerate(runs):
        out = os.path.join(d, f"r{i}.json")
        subprocess.run([tool, *args, "--json", out], check=False, stdout=subprocess.DEVNULL)
        report = json.load(open(out))
        jsonschema.validate(report, schema)
        ids = [c["check_id"] for c in report["checks"]]
        assert ids == sorted(ids), f"{args}: records not sorted"
        print("valid:", " ".join(args))
