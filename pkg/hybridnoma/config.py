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

"""Typed, flat scenario configuration.

Configuration files are YAML. Nested mappings are flattened into dotted keys
(``reward_weights: {qos: 1}`` is the same as ``reward_weights.qos: 1``), and an
``include:`` entry pulls in other files (or built-in presets such as
``preset:desk``) before the including file's own values are applied.
"""

import copy
import hashlib
import json
import logging
import math
import os

from collections.abc import Mapping

import yaml

from hybridnoma import deprecation
from hybridnoma.exceptions import ValidationError

logger = logging.getLogger(__name__)

_PRESET_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'presets')

DEFAULTS = {
    # topology and mobility
    'rings': 1,
    'isd_m': 500.0,
    'users_per_cell': 4,
    'max_users_per_cell': 8,
    'velocity_kmh_min': 3.0,
    'velocity_kmh_max': 120.0,
    'tick_ms': 100,
    'seed': 0,
    # radio
    'carrier_ghz': 3.5,
    'bandwidth_mhz': 100.0,
    'tx_power_dbm': 46.0,
    'noise_dbm': -104.0,
    'pathloss_exponent': 3.5,
    'reference_distance_m': 1.0,
    'rsrp_filter': 0.5,
    'qos_min_rate': 0.5,
    # handover
    'ttt_ticks': 3,
    'ho_margin_db': 3.0,
    'gamma_fail_db': -8.0,
    't_exec_ticks': 2,
    't_pingpong_ticks': 50,
    'ho_failure_epsilon': 0.1,
    # control
    'sequence.degree': 6,
    'action.sequences': 8,
    'action.power_profiles': 5,
    'baseline_profile': 2,
    'margin_min_db': 0.0,
    'margin_max_db': 6.0,
    'episode_ticks': 200,
    'control_scope_eval': 'all',
    'reward_weights.throughput': 1.0,
    'reward_weights.interference': 0.5,
    'reward_weights.ho_failure': 2.0,
    'reward_weights.qos': 0.5,
    'reward_weights.energy': 0.2,
    # learner
    'dqn.hidden': 64,
    'dqn.dropout': 0.1,
    'dqn.lr': 0.001,
    'dqn.gamma': 0.95,
    'dqn.batch_size': 32,
    'dqn.buffer_capacity': 50000,
    'dqn.warmup': 1000,
    'dqn.target_update': 1000,
    'dqn.target_update_unit': 'steps',
    'dqn.eps_start': 1.0,
    'dqn.eps_end': 0.05,
    'dqn.eps_decay_fraction': 0.4,
    'dqn.alpha_pri': 0.6,
    'dqn.beta_start': 0.4,
    'dqn.beta_end': 1.0,
    'dqn.eps_pri': 0.001,
    'dqn.huber_delta': 1.0,
    # experiment budgets
    'train_episodes': 500,
    'eval_episodes': 1,
    'eval_seeds': 30,
    'convergence.window': 50,
    'convergence.slope_tol': 10.0,
    'convergence.plateau_tol': 0.02,
}

RENAMED_KEYS = {
    'ho_margin': 'ho_margin_db',
    'tick': 'tick_ms',
    'target_update_episodes': 'dqn.target_update',
}

_CHOICES = {
    'rings': (1, 2),
    'dqn.target_update_unit': ('steps', 'episodes'),
    'control_scope_eval': ('tagged', 'all'),
    'sequence.degree': (5, 6, 7),
}

_POSITIVE = ('isd_m', 'users_per_cell', 'max_users_per_cell', 'tick_ms', 'ttt_ticks',
             'bandwidth_mhz', 'reference_distance_m', 'action.sequences',
             'action.power_profiles', 'episode_ticks', 'dqn.hidden', 'dqn.lr',
             'dqn.batch_size', 'dqn.buffer_capacity', 'dqn.target_update',
             't_exec_ticks', 'train_episodes', 'eval_episodes', 'eval_seeds',
             'convergence.window', 'dqn.huber_delta', 'dqn.eps_pri')

_UNIT_INTERVAL = ('rsrp_filter', 'dqn.eps_start', 'dqn.eps_end', 'dqn.eps_decay_fraction',
                  'dqn.alpha_pri', 'dqn.beta_start', 'dqn.beta_end', 'ho_failure_epsilon')


def _flatten(mapping, prefix=''):
    flat = {}
    for key, value in mapping.items():
        dotted = prefix + str(key)
        if isinstance(value, dict):
            flat.update(_flatten(value, dotted + '.'))
        else:
            flat[dotted] = value
    return flat


def _coerce(key, value):
    default = DEFAULTS[key]
    if isinstance(default, bool):
        return bool(value)
    if isinstance(default, int):
        if isinstance(value, float) and not value.is_integer():
            raise ValidationError("{} must be an integer, got {}".format(key, value))
        return int(value)
    if isinstance(default, float):
        value = float(value)
        if math.isnan(value):
            raise ValidationError("{} must not be NaN".format(key))
        return value
    return str(value)


def _validate(values):
    errors = []
    for key, choices in _CHOICES.items():
        if values[key] not in choices:
            errors.append("{} must be one of {}, got {}".format(key, choices, values[key]))
    for key in _POSITIVE:
        if not values[key] > 0:
            errors.append("{} must be positive, got {}".format(key, values[key]))
    for key in _UNIT_INTERVAL:
        if not 0.0 <= values[key] <= 1.0:
            errors.append("{} must lie in [0, 1], got {}".format(key, values[key]))
    if not 0.0 <= values['dqn.gamma'] < 1.0:
        errors.append("dqn.gamma must lie in [0, 1), got {}".format(values['dqn.gamma']))
    if not 0.0 <= values['dqn.dropout'] < 1.0:
        errors.append("dqn.dropout must lie in [0, 1), got {}".format(values['dqn.dropout']))
    if not 3.0 <= values['velocity_kmh_min'] <= values['velocity_kmh_max'] <= 120.0:
        errors.append("velocity band must satisfy 3 <= min <= max <= 120 km/h")
    if not 4 <= values['users_per_cell'] <= values['max_users_per_cell'] <= 8:
        errors.append("users per cell must satisfy 4 <= users_per_cell <= max_users_per_cell <= 8")
    if values['pathloss_exponent'] <= 2.0:
        errors.append("pathloss_exponent must exceed 2")
    if not values['margin_min_db'] <= values['ho_margin_db'] or \
            (math.isfinite(values['ho_margin_db']) and values['ho_margin_db'] > values['margin_max_db']):
        errors.append("ho_margin_db must lie in [margin_min_db, margin_max_db] or be +inf")
    if not 0 <= values['baseline_profile'] < values['action.power_profiles']:
        errors.append("baseline_profile must index one of the power profiles")
    if values['dqn.warmup'] < values['dqn.batch_size']:
        errors.append("dqn.warmup must be at least dqn.batch_size")
    if errors:
        raise ValidationError(errors)


class Config(Mapping):
    """Immutable, validated mapping of dotted configuration keys."""

    def __init__(self, values=None, **overrides):
        """
        :param values: Key/value pairs replacing the defaults. Nested
            mappings are flattened into dotted keys.
        :type values: dict

        :param overrides: Further replacements, with ``__`` standing for a dot
            (``reward_weights__qos=1.0``).

        :raises ValidationError: on unknown keys or out-of-range values.
        """
        merged = dict(DEFAULTS)
        updates = _flatten(values or {})
        updates.update({k.replace('__', '.'): v for k, v in overrides.items()})

        unknown = []
        for key, value in updates.items():
            if key in RENAMED_KEYS:
                deprecation.warning(key, RENAMED_KEYS[key])
                key = RENAMED_KEYS[key]
            if key not in DEFAULTS:
                unknown.append(key)
                continue
            merged[key] = _coerce(key, value)
        if unknown:
            raise ValidationError(["Unknown config key: {}".format(k) for k in sorted(unknown)])

        _validate(merged)
        self._values = merged

    def __getitem__(self, key):
        return self._values[key]

    def __iter__(self):
        return iter(sorted(self._values))

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return "Config(hash={})".format(self.hash())

    def section(self, prefix):
        """Returns the keys below ``prefix.`` with the prefix stripped.

        :rtype: dict
        """
        start = prefix + '.'
        return {k[len(start):]: v for k, v in self._values.items() if k.startswith(start)}

    def override(self, **pairs):
        """Returns a new Config with the given keys replaced.

        Keys use ``__`` in place of dots.

        :rtype: :class:`Config`
        """
        values = copy.deepcopy(self._values)
        values.update({k.replace('__', '.'): v for k, v in pairs.items()})
        return Config(values)

    def to_dict(self):
        """Plain dict copy, keys sorted.

        :rtype: dict
        """
        return {k: self._values[k] for k in sorted(self._values)}

    def hash(self):
        """First 16 hex digits of the SHA-256 of the canonical JSON dump.

        :rtype: string
        """
        canonical = json.dumps({k: repr(v) if isinstance(v, float) else v
                                for k, v in self.to_dict().items()},
                               sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf8')).hexdigest()[:16]

    @property
    def n_cells(self):
        return 7 if self['rings'] == 1 else 19


def _resolve(path, base_dir):
    if path.startswith('preset:'):
        return os.path.join(_PRESET_DIR, path[len('preset:'):] + '.yaml')
    if not os.path.isabs(path):
        return os.path.join(base_dir, path)
    return path


def _read_layers(path, seen):
    path = os.path.abspath(path)
    if path in seen:
        raise ValidationError("Config include cycle at {}".format(path))
    seen = seen | {path}
    if not os.path.exists(path):
        raise ValidationError("Config file not found: {}".format(path))
    with open(path) as f:
        document = yaml.safe_load(f) or {}
    if not isinstance(document, dict):
        raise ValidationError("Config file {} must contain a mapping".format(path))

    includes = document.pop('include', None) or []
    if isinstance(includes, str):
        includes = [includes]

    merged = {}
    for include in includes:
        merged.update(_read_layers(_resolve(include, os.path.dirname(path)), seen))
    merged.update(_flatten(document))
    return merged


def load_config(path=None, **overrides):
    """Loads a YAML configuration file, resolving includes.

    :param path: File path or ``preset:<name>``. None gives the defaults.
    :type path: string

    :param overrides: Per-key replacements applied last (``__`` for dots).

    :raises ValidationError: on missing files, include cycles, unknown keys
        or invalid values.

    :rtype: :class:`Config`
    """
    values = {}
    if path is not None:
        values = _read_layers(_resolve(path, os.getcwd()), frozenset())
        logger.debug("Loaded config layers from %s", path)
    values.update({k.replace('__', '.'): v for k, v in overrides.items()})
    return Config(values)
