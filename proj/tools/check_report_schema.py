#!/usr/bin/env python3
"""Validate `keel verify --json` output for every corpus module against the report schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema


def check(cli, schema, path):
    proc = subprocess.run([cli, "verify", "--json", str(path)], capture_output=True, text=True)
    if proc.returncode not in (0, 1, 2):
        return f"exit {proc.returncode}"
    try:
        report = json.loads(proc.stdout)
    except json.JSONDecodeError as e:
        return f"not JSON: {e}"
    try:
        jsonschema.validate(report, schema)
    except jsonschema.ValidationError as e:
        return f"schema: {e.message} at {list(e.absolute_path)}"
    t = report["totals"]
    if t["vcs"] != len(report["vcs"]) or t["proved"] + t["unprovable"] + t["timeout"] != t["vcs"]:
        return "totals disagree with vcs"
    expected = 0 if t["proved"] == t["vcs"] else 1
    if report["diagnostics"] and any(d["severity"] == "error" for d in report["diagnostics"]):
        expected = 2
    if proc.returncode != expected:
        return f"exit {proc.returncode}, expected {expected}"
    return None


def main():
    if len(sys.argv) != 4:
        sys.exit("usage: check_report_schema.py KEEL SCHEMA CORPUS_DIR")
    cli, schema_path, corpus = sys.argv[1:]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    failures = 0
    for path in sorted(pathlib.Path(corpus).glob("*.keel")):
        problem = check(cli, schema, path)
        print(f"{'FAIL' if problem else 'PASS'} {path.name}{': ' + problem if problem else ''}")
        failures += problem is not None
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
