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

"""Tests for the cli module."""

import glob
import json
import os
import tempfile

import yaml

from hybridnoma import cli, convert, dqn
from hybridnoma.config import load_config

import test as _test
from test_helper import SMALL_CONFIG


class CliTest(_test.TestCase):

    def setUp(self):
        super(CliTest, self).setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.config_path = os.path.join(self.tmp.name, 'small.yaml')
        with open(self.config_path, 'w') as f:
            yaml.safe_dump(SMALL_CONFIG, f)

    def tearDown(self):
        self.tmp.cleanup()

    def _run(self, *argv, out='out'):
        out = os.path.join(self.tmp.name, out)
        return cli.main(['--config', self.config_path, '--out', out] + list(argv)), out

    def _read(self, path):
        with open(path, 'rb') as f:
            return f.read()

    def test_help(self):
        with self.assertRaises(SystemExit):
            cli._parser().parse_args(['--help'])
        self.assertEqual(0, cli.main(['--help']))

    def test_usage_errors(self):
        self.assertEqual(2, cli.main(['spam']))
        self.assertEqual(2, cli.main([]))
        self.assertEqual(2, cli.main(['--jobs', '0', 'seq', 'gen']))

    def test_seq_gen(self):
        code, out = self._run('seq', 'gen', '--family', 'gold', '--m', '5')
        path = os.path.join(out, 'codebook_gold_m5.txt')

        self.assertEqual(0, code)
        with open(path) as f:
            text = f.read()
        lines = text.splitlines()
        self.assertEqual(33, len([line for line in lines if not line.startswith('#')]))
        self.assertEqual(33, len(convert.codebook_from_text(text)))
        self.assertIn('# config_hash={}'.format(load_config(self.config_path).hash()), lines)
        self.assertIn('# seed=0', lines)
        self.assertTrue(os.path.exists(convert.meta_path(path)))

    def test_seq_gen_sized_codebook(self):
        code, out = self._run('seq', 'gen', '--family', 'hybrid', '--m', '5', '--size', '4')

        self.assertEqual(0, code)
        with open(os.path.join(out, 'codebook_hybrid_m5.txt')) as f:
            self.assertEqual(4, len(convert.codebook_from_text(f.read())))

    def test_seq_analyze(self):
        code, out = self._run('seq', 'analyze', '--family', 'kasami', '--m', '6')

        self.assertEqual(0, code)
        with open(os.path.join(out, 'analysis_kasami_m6.json')) as f:
            report = json.load(f)
        self.assertEqual(28, len(report['pairs']))
        self.assertIn('claim_holds', report['papr_claim'])

    def test_seq_analyze_without_gold_degree(self):
        code, out = self._run('seq', 'analyze', '--family', 'kasami', '--m', '8')

        self.assertEqual(0, code)
        with open(os.path.join(out, 'analysis_kasami_m8.json')) as f:
            report = json.load(f)
        self.assertEqual(28, len(report['pairs']))
        for pair in report['pairs']:
            self.assertLessEqual({int(v) for v in pair['values'].split()}, {-17, -1, 15})
        self.assertIsNone(report['correlation_claim'])
        self.assertIsNone(report['papr_claim'])

    def test_bad_degree(self):
        code, _ = self._run('seq', 'gen', '--family', 'gold', '--m', '9')

        self.assertEqual(1, code)

    def test_train_zero_episodes(self):
        code, _ = self._run('train', '--episodes', '0')

        self.assertEqual(1, code)

    def test_train_and_eval(self):
        code, out = self._run('train', '--policy', 'HybridDqn', '--episodes', '2')
        checkpoint = os.path.join(out, 'checkpoint_HybridDqn.npz')

        self.assertEqual(0, code)
        self.assertEqual([7, 16, 16, 120], dqn.load_checkpoint(checkpoint).sizes)
        frame, header = convert.read_run_csv(os.path.join(out, 'train_HybridDqn.csv'))
        self.assertEqual(2, len(frame))
        self.assertEqual('HybridDqn', header['policy'])

        code, out = self._run('eval', '--policy', 'HybridDqn', '--checkpoint', checkpoint, '--seeds', '2')
        self.assertEqual(0, code)
        frame, header = convert.read_run_csv(os.path.join(out, 'eval_HybridDqn.csv'))
        self.assertEqual(2, len(frame))
        self.assertEqual('0,1', header['seeds'])

    def test_eval_needs_checkpoint(self):
        code, _ = self._run('eval', '--policy', 'HybridDqn')

        self.assertEqual(1, code)

    def test_missing_checkpoint(self):
        code, _ = self._run('eval', '--policy', 'HybridDqn', '--checkpoint', os.path.join(self.tmp.name, 'none.npz'))

        self.assertEqual(1, code)

    def test_unknown_policy(self):
        code, _ = self._run('eval', '--policy', 'Spam')

        self.assertEqual(1, code)

    def test_reruns_are_byte_identical(self):
        first_code, first = self._run('eval', '--policy', 'GoldOnly', '--seeds', '2', out='first')
        second_code, second = self._run('eval', '--policy', 'GoldOnly', '--seeds', '2', out='second')

        self.assertEqual((0, 0), (first_code, second_code))
        self.assertEqual(self._read(os.path.join(first, 'eval_GoldOnly.csv')),
                         self._read(os.path.join(second, 'eval_GoldOnly.csv')))

    def test_seed_flag_changes_results(self):
        self._run('eval', '--policy', 'GoldOnly', '--seeds', '1', out='first')
        cli.main(['--config', self.config_path, '--out', os.path.join(self.tmp.name, 'second'), '--seed', '4',
                  'eval', '--policy', 'GoldOnly', '--seeds', '1'])

        self.assertNotEqual(self._read(os.path.join(self.tmp.name, 'first', 'eval_GoldOnly.csv')),
                            self._read(os.path.join(self.tmp.name, 'second', 'eval_GoldOnly.csv')))

    def test_compare_suite_and_stats(self):
        code, out = self._run('suite', 'compare', '--seeds', '2', '--episodes', '2')

        self.assertEqual(0, code)
        csvs = sorted(glob.glob(os.path.join(out, 'compare_*.csv')))
        self.assertEqual(6, len(csvs))
        with open(os.path.join(out, 'summary_compare.json')) as f:
            summary = json.load(f)
        self.assertNotIn('decision_ms', summary)
        self.assertEqual(['DrlConventional', 'HybridDqn'], sorted(summary['convergence']))
        with open(convert.meta_path(os.path.join(out, 'summary_compare.json'))) as f:
            self.assertIn('HybridDqn', json.load(f)['decision_ms'])

        code, stats_out = self._run('stats', '--metric', 'throughput_mbps', *csvs, out='stats')
        self.assertEqual(0, code)
        with open(os.path.join(stats_out, 'stats_throughput_mbps.json')) as f:
            result = json.load(f)
        self.assertEqual(5, result['anova']['df_between'])
        self.assertEqual(1, len(result['config_hashes']))

    def test_velocity_suite(self):
        code, out = self._run('suite', 'velocity', '--seeds', '1', '--speeds', '3', '120',
                              '--policies', 'GoldOnly')

        self.assertEqual(0, code)
        self.assertTrue(os.path.exists(os.path.join(out, 'velocity_GoldOnly_3kmh.csv')))
        self.assertTrue(os.path.exists(os.path.join(out, 'velocity_GoldOnly_120kmh.csv')))
        with open(os.path.join(out, 'summary_velocity.json')) as f:
            self.assertEqual(['120', '3'], sorted(json.load(f)['policies']['GoldOnly']))

    def test_stats_unknown_reference(self):
        self._run('eval', '--policy', 'GoldOnly', '--seeds', '2')
        code, _ = self._run('stats', os.path.join(self.tmp.name, 'out', 'eval_GoldOnly.csv'),
                            '--reference', 'Spam', out='stats')

        self.assertEqual(1, code)
