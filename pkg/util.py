#! /usr/bin/env python3

import io
import re
import os
import sys
import csv
import json

import numpy as np

from config import VERSION


def progress(*args):
    print(*args, file=sys.stderr, flush=True)


def print_phase(title):
    progress()
    progress('=' * 120)
    progress(title)
    progress('=' * 120)


def to_jsonable(value):
    """Convert numpy scalars/arrays and nested containers into plain JSON types."""

    if hasattr(value, 'to_json'):
        return to_jsonable(value.to_json())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dump_json(data):
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + '\n'


def write_text(text, out_path=None):
    if out_path is None:
        sys.stdout.write(text)
        return None
    folder = os.path.dirname(out_path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(out_path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    progress(f'Successfully wrote {out_path}')
    return out_path


def header_line(run_info):
    compact = json.dumps(to_jsonable(run_info), sort_keys=True, separators=(',', ':'))
    return f'# permalloc {VERSION} config={compact}'


def format_cell(value):
    value = to_jsonable(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return ''
    if isinstance(value, list):
        return json.dumps(value, separators=(',', ':'))
    return str(value)


def write_csv(rows, columns, run_info, out_path=None):
    """Write `rows` (dicts) as CSV with a configuration comment line first."""

    buffer = io.StringIO()
    buffer.write(header_line(run_info) + '\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        missing = [c for c in columns if c not in row]
        if missing:
            raise KeyError(f'Row is missing columns: {missing}')
        writer.writerow([format_cell(row[c]) for c in columns])

    return write_text(buffer.getvalue(), out_path)


def populate_template(template, data):
    """Replace every {{key}} placeholder; a key missing from the template or left over is an error."""

    for key, value in data.items():
        if key not in template:
            raise KeyError(f'Key {key} not found in template')
        template = template.replace(key, str(value))

    unmatched_vars = re.findall(r'\{\{.*?\}\}', template)
    if unmatched_vars:
        raise KeyError(f'Unmatched variables found in template: {unmatched_vars}')
    return template
