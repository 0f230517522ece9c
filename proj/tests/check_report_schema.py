"""Runs every plabs subcommand with --format json and validates the reports."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    exe, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0

    with tempfile.TemporaryDirectory() as tmp:
        def gen(name, *extra):
            path = str(Path(tmp) / f"{name}.json")
            subprocess.run([exe, "gen", "--example", name, "-o", path, *extra], check=True)
            return path

        cyc = gen("cyclic", "--s", "3", "--a", "0.65")
        kink = gen("one_d_kink")
        sch = gen("schueth")
        form = gen("random", "--n", "3", "--s", "4", "--seed", "5", "--target", "0.6")
        dot = str(Path(tmp) / "g.dot")

        runs = [
            (["validate", kink], 0),
            (["validate", cyc], 0),
            (["eval", kink, "--x", "0.25"], 0),
            (["eval", cyc, "--x", "1,1,1"], 0),
            (["diagnose", cyc], 0),
            (["diagnose", form], 0),
            (["diagnose", sch], 4),
            (["diagnose", sch, "--regularize"], 0),
            (["solve", cyc, "--method", "newton-cpl", "--z0", "1,1,-1"], 3),
            (["solve", cyc, "--method", "signed-ge"], 0),
            (["solve", cyc, "--method", "modulus"], 0),
            (["solve", form, "--method", "seidel"], 0),
            (["solve", form, "--method", "newton-opl"], 0),
            (["oracle", cyc], 0),
            (["oracle", form], 0),
            (["lcp", cyc], 0),
            (["graph", cyc, "--dot", dot], 0),
        ]
        for args, expected in runs:
            proc = subprocess.run([exe, *args, "--format", "json"], capture_output=True, text=True)
            label = " ".join(a if not a.startswith(tmp) else Path(a).name for a in args)
            if proc.returncode != expected:
                print(f"FAIL {label}: exit {proc.returncode}, expected {expected}\n{proc.stderr}")
                failures += 1
                continue
            try:
                report = json.loads(proc.stdout)
            except json.JSONDecodeError as e:
                print(f"FAIL {label}: not JSON ({e})")
                failures += 1
                continue
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            if errors or report.get("exit_code") != expected:
                for e in errors:
                    print(f"FAIL {label}: {list(e.path)}: {e.message}")
                if not errors:
                    print(f"FAIL {label}: exit_code field {report.get('exit_code')}")
                failures += 1
            else:
                print(f"ok   {label}")

    print(f"{len(runs) - failures} of {len(runs)} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
