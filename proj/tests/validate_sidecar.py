"""Runs the CLI on emitted data and validates the deconvolve sidecars against the shipped schema."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def run(cli, *args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"{' '.join(args)} exited {proc.returncode}: {proc.stderr}")


def main():
    cli, schema_path, data_dir = sys.argv[1:4]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    data = Path(data_dir)
    cases = [
        ("g2,f1,100,2", '{"form":"builtin","name":"g2"}', ["--sigma", "0.025"]),
        ("g3,f2,250,1", '{"form":"builtin","name":"g3"}', ["--estimate-sigma"]),
        ("g4,f3,100,0", '{"form":"builtin","name":"g4"}', ["--sigma", "0.002", "--C", "1.5", "--weights", "gm"]),
    ]
    for k, (cell, kernel, extra) in enumerate(cases):
        sample = data / f"schema_{k}.csv"
        out = data / f"schema_{k}_fhat.csv"
        run(cli, "simulate", "--cell", cell, "--seed", "3", "--emit-data", str(sample))
        run(cli, "deconvolve", "--input", str(sample), "--kernel", kernel, "--output", str(out), *extra)
        sidecar = json.loads(Path(str(out) + ".json").read_text())
        errors = sorted(validator.iter_errors(sidecar), key=str)
        for e in errors:
            print(f"{cell}: {e.json_path}: {e.message}")
        if errors:
            sys.exit(1)
        print(f"{cell}: sidecar valid")
    bad = {"n": 1}
    if validator.is_valid(bad):
        sys.exit("schema accepted an incomplete sidecar")


if __name__ == "__main__":
    main()
