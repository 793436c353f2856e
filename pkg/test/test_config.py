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

"""Tests for the config module."""

import math
import os
import warnings

from hybridnoma import config
from hybridnoma.config import Config, load_config
from hybridnoma.exceptions import ValidationError

import test as _test
from test_helper import DATA_DIR


class ConfigTest(_test.TestCase):

    def test_defaults(self):
        defaults = Config()

        self.assertEqual(1, defaults['rings'])
        self.assertEqual(7, defaults.n_cells)
        self.assertEqual(3, defaults['ttt_ticks'])
        self.assertEqual(-8.0, defaults['gamma_fail_db'])
        self.assertEqual('steps', defaults['dqn.target_update_unit'])
        self.assertEqual(50000, defaults['dqn.buffer_capacity'])
        self.assertEqual(len(config.DEFAULTS), len(defaults))

    def test_nested_and_dunder_keys(self):
        nested = Config({'reward_weights': {'qos': 1.5}})
        dunder = Config(reward_weights__qos=1.5)

        self.assertEqual(1.5, nested['reward_weights.qos'])
        self.assertEqual(nested.hash(), dunder.hash())

    def test_section(self):
        weights = self.config.section('reward_weights')

        self.assertEqual({'throughput', 'interference', 'ho_failure', 'qos', 'energy'}, set(weights))
        self.assertEqual(2.0, weights['ho_failure'])

    def test_coercion(self):
        cfg = Config({'users_per_cell': 5.0, 'isd_m': 400})

        self.assertIsInstance(cfg['users_per_cell'], int)
        self.assertIsInstance(cfg['isd_m'], float)

        with self.assertRaises(ValidationError):
            Config({'users_per_cell': 4.5})

    def test_validation(self):
        for bad in ({'rings': 3}, {'dqn.gamma': 1.0}, {'dqn.lr': 0.0}, {'users_per_cell': 9},
                    {'velocity_kmh_min': 1.0}, {'dqn.target_update_unit': 'ticks'},
                    {'baseline_profile': 5}, {'train_episodes': 0}, {'ho_margin_db': 7.0}):
            with self.assertRaises(ValidationError):
                Config(bad)

    def test_infinite_margin_allowed(self):
        cfg = Config({'ho_margin_db': float('inf')})

        self.assertTrue(math.isinf(cfg['ho_margin_db']))

    def test_unknown_key(self):
        with self.assertRaises(ValidationError) as cm:
            Config({'bogus_key': 1})

        self.assertIn('bogus_key', str(cm.exception))

    def test_override_returns_new(self):
        changed = self.config.override(ho_margin_db=5.0, reward_weights__qos=0.0)

        self.assertEqual(5.0, changed['ho_margin_db'])
        self.assertEqual(0.0, changed['reward_weights.qos'])
        self.assertEqual(3.0, self.config['ho_margin_db'])
        self.assertNotEqual(self.config.hash(), changed.hash())

    def test_hash_is_stable(self):
        self.assertEqual(Config(ho_margin_db=4.0).hash(), Config({'ho_margin_db': 4}).hash())
        self.assertEqual(16, len(Config().hash()))

    def test_load_with_include(self):
        cfg = load_config(os.path.join(DATA_DIR, 'child.yaml'))

        self.assertEqual(6, cfg['users_per_cell'])
        self.assertEqual(0.75, cfg['reward_weights.qos'])
        self.assertEqual('episodes', cfg['dqn.target_update_unit'])

    def test_load_overrides_win(self):
        cfg = load_config(os.path.join(DATA_DIR, 'child.yaml'), users_per_cell=7)

        self.assertEqual(7, cfg['users_per_cell'])

    def test_include_cycle(self):
        with self.assertRaises(ValidationError):
            load_config(os.path.join(DATA_DIR, 'cycle_a.yaml'))

    def test_unknown_key_in_file(self):
        with self.assertRaises(ValidationError):
            load_config(os.path.join(DATA_DIR, 'unknown.yaml'))

    def test_missing_file(self):
        with self.assertRaises(ValidationError):
            load_config(os.path.join(DATA_DIR, 'does_not_exist.yaml'))

    def test_renamed_key_in_file(self):
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            cfg = load_config(os.path.join(DATA_DIR, 'renamed.yaml'))

        self.assertEqual(4.0, cfg['ho_margin_db'])
        self.assertTrue(any(issubclass(x.category, DeprecationWarning) for x in w))

    def test_presets(self):
        desk = load_config('preset:desk')
        full = load_config('preset:full')

        self.assertEqual(7, desk.n_cells)
        self.assertEqual(30, desk['eval_seeds'])
        self.assertEqual(500, desk['train_episodes'])
        self.assertEqual(19, full.n_cells)
        self.assertEqual(10000, full['train_episodes'])
