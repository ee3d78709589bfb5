"""Validates halfline CLI output files against the JSON schemas.

usage: check_schemas.py SCHEMA_DIR KIND=FILE [KIND=FILE ...]
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    schemas = {}
    for path in schema_dir.glob("*.schema.json"):
        schemas[path.name.split(".")[0]] = json.loads(path.read_text())
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s)) for s in schemas.values())
    bad = 0
    for arg in argv[2:]:
        kind, name = arg.split("=", 1)
        validator = jsonschema.Draft202012Validator(schemas[kind], registry=registry)
        errors = list(validator.iter_errors(json.loads(pathlib.Path(name).read_text())))
        for e in errors[:5]:
            print(f"{name}: {'/'.join(map(str, e.absolute_path))}: {e.message[:200]}")
        print(f"{name}: {'ok' if not errors else 'INVALID'} against {kind}")
        bad += bool(errors)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
