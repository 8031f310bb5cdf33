#!/usr/bin/env python3
"""Run the corpus and validate every report against schema/report.schema.json."""
import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--mjrepair", required=True)
    ap.add_argument("--root", required=True, type=pathlib.Path)
    args = ap.parse_args()

    schema = json.loads((args.root / "schema" / "report.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    with tempfile.TemporaryDirectory() as out:
        subprocess.run([args.mjrepair, "corpus", "run", str(args.root / "fixtures" / "corpus"), "--out", out],
                       check=True, stdout=subprocess.DEVNULL)
        reports = sorted(pathlib.Path(out).glob("*.json"))
        bad = 0
        for path in reports:
            report = json.loads(path.read_text())
            errors = list(validator.iter_errors(report))
            for e in errors:
                print(f"{path.name}: {'/'.join(map(str, e.path))}: {e.message}")
            if report["tentative"] != len(report["decisions"]):
                errors.append("tentative")
                print(f"{path.name}: tentative does not match decisions")
            if report["valid"] != sum(d["verdict"] == "valid" for d in report["decisions"]):
                errors.append("valid")
                print(f"{path.name}: valid does not match verdicts")
            for d in report["decisions"]:
                if d["diff"] and not (pathlib.Path(out) / d["diff"]).is_file():
                    errors.append("diff")
                    print(f"{path.name}: missing {d['diff']}")
            bad += bool(errors)
    print(f"{len(reports)} reports, {bad} invalid")
    return 1 if bad or not reports else 0


if __name__ == "__main__":
    sys.exit(main())
