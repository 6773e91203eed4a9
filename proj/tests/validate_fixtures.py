"""Validates the valid fixture manifests against the manifest schema."""
import json
import pathlib
import sys

import jsonschema

root = pathlib.Path(sys.argv[1])
schema = json.loads((root / "schema" / "manifest.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)
bad = 0
for path in sorted((root / "tests" / "fixtures").glob("*.json")):
    errors = list(validator.iter_errors(json.loads(path.read_text())))
    # bad_shape and unknown_function are schema-valid; their problems are semantic
    if errors:
        bad += 1
        print(f"{path.name}: {errors[0].message}")
print(f"{bad} invalid fixture(s)")
sys.exit(1 if bad else 0)
