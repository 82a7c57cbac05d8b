#! /usr/bin/env python3

import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from config import VERSION
from util import dump_json, populate_template, write_csv, write_text


CRITERION_TEMPLATE = '''sign case: {{sign-case}}   N = {{size}}   d_max = {{d-max}}   d_min = {{d-min}}{{heuristic}}

{{table}}

max phi = {{max-phi}} at m1 = {{argmax}}
verdict: {{verdict}}
min side: {{min-side}}
'''


def run_info(command, options, seed=None):
    """The "run" object embedded in every output: nothing in it depends on the machine or the clock."""

    return {
        'command': command,
        'config': options,
        'version': VERSION,
        'seed': seed,
    }


def write_json_report(payload, info, out_path=None):
    data = dict(payload)
    data['run'] = info
    return write_text(dump_json(data), out_path)


def format_criterion_table(report):
    width = max(len(str(m1)) for m1 in report.m1_values)
    lines = [f'{"m1".rjust(width)} | phi(m1)', f'{"-" * width}-+-{"-" * 24}']
    for row in report.table_rows():
        lines.append(f'{str(row["m1"]).rjust(width)} | {row["phi"]!r}')

    if report.max_phi_min_side is None:
        min_side = 'undefined (degenerate gaps along sigma_-)'
    else:
        verdict = 'satisfied' if report.satisfied_min_side else 'not satisfied'
        min_side = f'max phi = {report.max_phi_min_side!r}, {verdict}'

    return populate_template(CRITERION_TEMPLATE, {
        '{{sign-case}}': report.sign_case,
        '{{size}}': report.s.size,
        '{{d-max}}': repr(report.d_max),
        '{{d-min}}': repr(report.d_min),
        '{{heuristic}}': '   (heuristic: m1 = 2 only)' if report.heuristic else '',
        '{{table}}': '\n'.join(lines),
        '{{max-phi}}': repr(report.max_phi),
        '{{argmax}}': report.argmax_m1,
        '{{verdict}}': 'satisfied (max phi <= 1)' if report.satisfied else 'not satisfied (max phi > 1)',
        '{{min-side}}': min_side,
    })


def write_trajectory_csv(trajectory, info, out_path=None):
    return write_csv(trajectory.csv_rows(), trajectory.csv_columns(), info, out_path)


def write_error_csv(trajectory, errors, info, out_path=None):
    """e^k = x(T_k) - x_per per period start, with its max-norm."""

    size = errors.shape[1]
    columns = ['k'] + [f'e{n}' for n in range(1, size + 1)] + ['max_abs']
    rows = []
    for k, e in enumerate(errors):
        row = {'k': k, 'max_abs': float(abs(e).max())}
        row.update({f'e{n}': float(e[n - 1]) for n in range(1, size + 1)})
        rows.append(row)
    return write_csv(rows, columns, info, out_path)
