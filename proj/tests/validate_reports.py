"""Runs small experiments through the CLI and validates the JSON outputs."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
report_schema = json.loads((schema_dir / "report.schema.json").read_text())
manifest_schema = json.loads((schema_dir / "manifest.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(report_schema)
jsonschema.Draft202012Validator.check_schema(manifest_schema)

with tempfile.TemporaryDirectory() as tmp:
    for n, radius in [(2, 60), (3, 14), (4, 6)]:
        out = pathlib.Path(tmp) / f"n{n}"
        subprocess.run([cli, "report", "--n", str(n), "--radius", str(radius), "--out", str(out)],
                       check=True, stdout=subprocess.DEVNULL)
        report = json.loads((out / "report.json").read_text())
        manifest = json.loads((out / "manifest.json").read_text())
        jsonschema.validate(report, report_schema, cls=jsonschema.Draft202012Validator)
        jsonschema.validate(manifest, manifest_schema, cls=jsonschema.Draft202012Validator)
        assert (report["ks_n2"] is None) == (n != 2)
        rows = (out / "records.csv").read_text().splitlines()
        assert len(rows) - 1 == manifest["counts"]["records"] == report["records"]
        print(f"n={n} R={radius}: report and manifest valid, {report['records']} records")
