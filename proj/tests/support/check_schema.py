#!/usr/bin/env python3
"""usage: check_schema.py SCHEMA DOCUMENT"""

import json
import sys

import jsonschema

with open(sys.argv[1]) as f:
    schema = json.load(f)
with open(sys.argv[2]) as f:
    doc = json.load(f)
jsonschema.validate(doc, schema)
print("ok")
