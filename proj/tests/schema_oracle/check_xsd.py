"""Validate a corpus of serialized DrugInfo documents with the xmlschema package.

Usage: check_xsd.py <schema.xsd> <corpus-dir> [--expect-invalid FILE ...]

Exits non-zero if any document fails validation.
"""
import pathlib
import sys

import xmlschema


def main() -> int:
    schema = xmlschema.XMLSchema(sys.argv[1])
    docs = sorted(pathlib.Path(sys.argv[2]).glob("*.xml"))
    if not docs:
        print("no documents found", file=sys.stderr)
        return 1
    bad = 0
    for doc in docs:
        errors = list(schema.iter_errors(str(doc)))
        if errors:
            bad += 1
            print(f"{doc.name}: {errors[0].reason}", file=sys.stderr)
    # The schema must also reject a legacy-ordered document.
    legacy = (
        '<Drug><Description>d</Description><name>n</name>'
        '<Price>1.0000</Price><VendorName>v</VendorName></Drug>'
    )
    if schema.is_valid(legacy):
        print("schema accepted a misordered document", file=sys.stderr)
        bad += 1
    print(f"{len(docs) - bad}/{len(docs)} documents valid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
