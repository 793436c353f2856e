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

"""Tests for client module."""

import os

import hybridnoma
from hybridnoma import experiments
from hybridnoma import client as client_module
from hybridnoma.config import Config
from hybridnoma.dqn import QNetwork

import test as _test
from test_helper import DATA_DIR, SMALL_CONFIG


class ClientTest(_test.TestCase):

    def test_defaults(self):
        client = hybridnoma.Client()

        self.assertEqual(Config().hash(), client.config.hash())
        self.assertEqual(list(range(30)), client.seeds)
        self.assertEqual(1, client.jobs)

    def test_seed_override(self):
        client = hybridnoma.Client(Config(SMALL_CONFIG), seed=10)

        self.assertEqual(10, client.config['seed'])
        self.assertEqual([10, 11], client.seeds)

    def test_config_from_path(self):
        client = hybridnoma.Client(os.path.join(DATA_DIR, 'base.yaml'))

        self.assertIsInstance(client.config, Config)

    def test_preset(self):
        client = hybridnoma.Client('preset:desk')

        self.assertEqual(500, client.config['train_episodes'])

    def test_invalid_jobs(self):
        with self.assertRaises(ValueError):
            hybridnoma.Client(jobs=0)

    def test_injects_config_and_seeds(self):
        runs = self.client.run_scenario('GoldOnly')

        self.assertEqual([0, 1], [run.seed for run in runs])
        self.assertEqual(runs, experiments.run_scenario('GoldOnly', self.config, [0, 1]))

    def test_explicit_arguments_win(self):
        runs = self.client.run_scenario('GoldOnly', seeds=[5])

        self.assertEqual([5], [run.seed for run in runs])

    def test_overrides_apply_to_one_call(self):
        sweep = self.client.velocity_sweep('WalshOnly', [3], seeds=[0], overrides={'episode_ticks': 5})
        plain = self.client.velocity_sweep('WalshOnly', [3], seeds=[0])

        self.assertNotEqual(sweep[3][0].episodes[0].reward, plain[3][0].episodes[0].reward)
        self.assertEqual(20, self.client.config['episode_ticks'])

    def test_train_and_summarize(self):
        trained = self.client.train('HybridDqn', episodes=1)
        nets = {'DrlConventional': QNetwork([7, 16, 16, 120]), 'HybridDqn': trained.agent.net}
        results = self.client.compare_suite(nets=nets)
        summary = self.client.summarize_suite(results)

        self.assertEqual(1, len(trained.episodes))
        self.assertEqual(self.config.hash(), summary['config_hash'])
        self.assertEqual([0, 1], summary['seeds'])

    def test_wrapped_methods_keep_docs(self):
        self.assertEqual(experiments.run_scenario.__doc__, client_module.Client.run_scenario.__doc__)
