#!/usr/bin/env python

import os
import json

#
# Optional configuration JSON file (every key has a default):
#
# {
#    "N_CAP": 12,
#    "MAX_WORKERS": 4,
#    "CHUNK_SIZE": 65536,
#    "TIE_TOLERANCE": 1e-12,
#    "SWEEP_BUDGET": 2000000000,
#    "OUTPUT_FOLDER": "./build",
#    "DEFAULT_DEPTH": 0.4,
#    "DEBUG_SKIP_EXACT": false
# }
#

VERSION = '1.0.0'

DEFAULTS = {
    'N_CAP': 12,
    'MAX_WORKERS': 1,
    'CHUNK_SIZE': 65536,
    'TIE_TOLERANCE': 1e-12,
    'SWEEP_BUDGET': 2_000_000_000,
    'OUTPUT_FOLDER': os.path.join(os.path.dirname(os.path.abspath(__file__)), 'build'),
    'DEFAULT_DEPTH': 0.4,
    'DEBUG_SKIP_EXACT': False,
}


class Config:

    def __init__(self, config_file_name=None):

        if config_file_name is None:
            config_file_name = os.environ.get('PERMALLOC_CONFIG', os.path.expanduser('~/.permalloc-config.json'))

        data = {}
        if os.path.exists(config_file_name):
            from util import progress
            progress(f'loading configuration from: {config_file_name}...')
            with open(config_file_name, 'r', encoding='utf-8') as f:
                data = json.load(f)

        unknown = sorted(set(data) - set(DEFAULTS))
        if unknown:
            raise ValueError(f'Unknown configuration keys in {config_file_name}: {unknown}')

        settings = dict(DEFAULTS)
        settings.update(data)

        # Largest N accepted by enumeration and exhaustive search
        self.N_CAP = int(settings['N_CAP'])

        # Process pool size for exhaustive search and sweeps
        self.MAX_WORKERS = int(settings['MAX_WORKERS'])

        # Permutations per numpy batch
        self.CHUNK_SIZE = int(settings['CHUNK_SIZE'])

        self.TIE_TOLERANCE = float(settings['TIE_TOLERANCE'])

        # Upper bound on the sum of N! over the exact solves of one sweep
        self.SWEEP_BUDGET = int(settings['SWEEP_BUDGET'])

        self.OUTPUT_FOLDER = settings['OUTPUT_FOLDER']

        self.DEFAULT_DEPTH = float(settings['DEFAULT_DEPTH'])

        # Debug flags
        self.DEBUG_SKIP_EXACT = bool(settings['DEBUG_SKIP_EXACT'])

        if self.N_CAP < 1 or self.MAX_WORKERS < 1 or self.CHUNK_SIZE < 1:
            raise ValueError('N_CAP, MAX_WORKERS and CHUNK_SIZE must be positive')


    def as_dict(self):
        return {key: getattr(self, key) for key in DEFAULTS}
