# -*- coding: utf-8 -*-
# Copyright (C) 2026 The hybridnoma authors.
#
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy of
# the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations under
# the License.
#

"""Converts between physical units and between in-memory results and the
plain-text file formats hybridnoma writes (codebooks, run CSVs, JSON summaries).
"""

import json
import math

import numpy as np
import pandas as pd

from hybridnoma.exceptions import SequenceError
from hybridnoma.seqlib import ChipSequence, Family

RUN_COLUMNS = ['episode', 'hsr', 'throughput_mbps', 'interference_dbm', 'reward',
               'ho_success', 'ho_rlf', 'ho_pingpong']

_NA = 'n/a'


def db_to_linear(db):
    """Convert a power ratio in dB to a linear ratio."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(linear):
    """Convert a linear power ratio to dB. Zero maps to -inf."""
    with np.errstate(divide='ignore'):
        return 10.0 * np.log10(np.asarray(linear, dtype=float))


def dbm_to_watts(dbm):
    """Convert dBm to watts."""
    return db_to_linear(np.asarray(dbm, dtype=float) - 30.0)


def watts_to_dbm(watts):
    """Convert watts to dBm."""
    return linear_to_db(watts) + 30.0


def kmh_to_ms(kmh):
    """Convert km/h to m/s."""
    return np.asarray(kmh, dtype=float) / 3.6


def _format_float(arg):
    """Formats a float value to be as short as possible.

    For example:

    format_float(40) -> "40"
    format_float(40.0) -> "40"
    format_float(40.1) -> "40.1"
    format_float(40.0010) -> "40.001"

    :param arg: The value.
    :type arg: float

    :rtype: string
    """
    return ("{}".format(round(float(arg), 6)).rstrip("0").rstrip("."))


def codebook_to_text(sequences, header=None):
    """Serializes a codebook to the plain-text codebook format.

    Optional ``# key=value`` provenance lines come first, sorted by key.
    Then one line per sequence: ``family length index chips``, the chips
    written as ``+``/``-`` characters.

    :param sequences: The sequences to export.
    :type sequences: list of :class:`hybridnoma.seqlib.ChipSequence`

    :param header: Provenance values such as the config hash.
    :type header: dict

    :rtype: string
    """
    lines = []
    for seq in sequences:
        chips = ''.join('+' if c > 0 else '-' for c in seq.chips)
        lines.append("{} {} {} {}".format(seq.family.value, seq.length, seq.index, chips))
    return _header_lines(header or {}) + '\n'.join(lines) + '\n'


def codebook_from_text(text):
    """Parses the plain-text codebook format back into sequences.

    :param text: Codebook file contents.
    :type text: string

    :raises SequenceError: on a malformed line.

    :rtype: list of :class:`hybridnoma.seqlib.ChipSequence`
    """
    sequences = []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith('#'):
            continue
        if len(parts) != 4:
            raise SequenceError("Malformed codebook line", line[:40])
        try:
            family, length, index = Family(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise SequenceError("Malformed codebook line", line[:40])
        chip_line = parts[3]
        if len(chip_line) != length or set(chip_line) - set('+-'):
            raise SequenceError("Malformed chip field", chip_line[:16])
        chips = np.array([1 if c == '+' else -1 for c in chip_line], dtype=np.int8)
        sequences.append(ChipSequence(chips, family, index))
    return sequences


def _header_lines(header):
    return ''.join("# {}={}\n".format(key, header[key]) for key in sorted(header))


def write_run_csv(path, rows, header):
    """Writes per-episode run metrics as CSV.

    The file starts with ``# key=value`` provenance lines (config hash, seed,
    policy), followed by the columns in :data:`RUN_COLUMNS`. An undefined
    handover success rate is written as ``n/a``.

    :param path: Output file.
    :type path: str or pathlib.Path

    :param rows: One mapping per episode with the :data:`RUN_COLUMNS` keys.
    :type rows: list of dict

    :param header: Provenance values, written sorted by key.
    :type header: dict
    """
    frame = pd.DataFrame(list(rows), columns=RUN_COLUMNS)
    with open(str(path), 'w', newline='') as f:
        f.write(_header_lines(header))
        frame.to_csv(f, index=False, float_format='%.6f', na_rep=_NA, lineterminator='\n')


def read_run_csv(path):
    """Reads a CSV written by :func:`write_run_csv`.

    :rtype: tuple of (pandas.DataFrame, dict)
    """
    header = {}
    with open(str(path)) as f:
        for line in f:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].strip().partition('=')
            header[key] = value
    frame = pd.read_csv(str(path), comment='#', na_values=[_NA])
    return frame, header


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def dumps_summary(summary):
    """Canonical JSON rendering used for every summary file.

    :rtype: string
    """
    return json.dumps(_jsonable(summary), indent=2, sort_keys=True) + '\n'


def write_summary_json(path, summary):
    """Writes a suite summary as canonical JSON."""
    with open(str(path), 'w') as f:
        f.write(dumps_summary(summary))


def meta_path(path):
    return str(path) + '.meta.json'


def write_meta(path, meta):
    """Writes the metadata sidecar ``<path>.meta.json`` next to a data file.

    Timestamps and timings go here so that the data file itself is a
    deterministic function of its inputs.
    """
    with open(meta_path(path), 'w') as f:
        f.write(dumps_summary(meta))
