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

"""Tests for the stats module."""

import math
import warnings

import numpy as np
from scipy import special, stats as scipy_stats

from hybridnoma import stats
from hybridnoma.exceptions import ValidationError

import test as _test
from test_helper import ANOVA_F, ANOVA_HIGH, ANOVA_LOW, F_TAIL_POINT


class DistributionTest(_test.TestCase):

    def test_betainc_against_scipy(self):
        for a, b, x in ((0.5, 0.5, 0.3), (2.0, 3.0, 0.7), (5.0, 0.5, 0.95), (30.0, 2.0, 0.1)):
            self.assertAlmostEqual(special.betainc(a, b, x), stats.betainc(a, b, x), places=10)

        self.assertEqual(0.0, stats.betainc(2.0, 2.0, 0.0))
        self.assertEqual(1.0, stats.betainc(2.0, 2.0, 1.0))

        with self.assertRaises(ValidationError):
            stats.betainc(0.0, 1.0, 0.5)

    def test_f_tail_point(self):
        f, df1, df2, expected = F_TAIL_POINT

        self.assertAlmostEqual(expected, stats.f_sf(f, df1, df2), delta=1e-3)

    def test_f_sf_against_scipy(self):
        for f, df1, df2 in ((0.5, 2, 7), (19.2, 1, 6), (3.1, 9, 290), (312.7, 5, 594)):
            self.assertAlmostEqual(scipy_stats.f.sf(f, df1, df2), stats.f_sf(f, df1, df2), places=9)

        self.assertEqual(1.0, stats.f_sf(0.0, 1, 6))
        self.assertEqual(0.0, stats.f_sf(math.inf, 1, 6))

    def test_t_sf_against_scipy(self):
        for t, df in ((0.3, 4), (-1.7, 12.5), (2.5, 29), (8.0, 3)):
            self.assertAlmostEqual(scipy_stats.t.sf(t, df), stats.t_sf(t, df), places=9)

    def test_t_quantile(self):
        self.assertAlmostEqual(2.045229642, stats.t_quantile(0.975, 29), places=6)
        self.assertAlmostEqual(scipy_stats.t.ppf(0.995, 4), stats.t_quantile(0.995, 4), places=6)
        self.assertAlmostEqual(-stats.t_quantile(0.9, 7), stats.t_quantile(0.1, 7), places=9)
        self.assertEqual(0.0, stats.t_quantile(0.5, 3))

        with self.assertRaises(ValidationError):
            stats.t_quantile(1.0, 3)


class AnovaTest(_test.TestCase):

    def test_two_groups(self):
        result = stats.one_way_anova([ANOVA_LOW, ANOVA_HIGH])

        self.assertAlmostEqual(ANOVA_F, result.f)
        self.assertEqual((1, 6), (result.df_between, result.df_within))
        self.assertAlmostEqual(scipy_stats.f_oneway(ANOVA_LOW, ANOVA_HIGH).pvalue, result.p_value, places=9)
        self.assertEqual([2.5, 6.5], result.means)

    def test_matches_scipy_on_random_groups(self):
        groups = [self.rng.normal(loc, 1.0, size=30) for loc in (0.0, 0.2, 0.5, 0.1)]
        result = stats.one_way_anova(groups)
        expected = scipy_stats.f_oneway(*groups)

        self.assertAlmostEqual(expected.statistic, result.f, places=9)
        self.assertAlmostEqual(expected.pvalue, result.p_value, places=9)

    def test_shared_affine_map_leaves_result(self):
        groups = [self.rng.normal(loc, 2.0, size=12) for loc in (1.0, 1.5, 3.0)]
        result = stats.one_way_anova(groups)
        for scale, shift in ((3.5, -20.0), (0.01, 1e3), (1.0, 5.0)):
            moved = stats.one_way_anova([scale * g + shift for g in groups])

            self.assertAlmostEqual(result.f, moved.f, delta=1e-8 * result.f)
            self.assertAlmostEqual(result.p_value, moved.p_value, places=9)
            self.assertEqual((result.df_between, result.df_within), (moved.df_between, moved.df_within))

    def test_identical_groups(self):
        result = stats.one_way_anova([[3.0, 3.0, 3.0]] * 4)

        self.assertEqual(0.0, result.f)
        self.assertEqual(1.0, result.p_value)

    def test_zero_within_variance(self):
        result = stats.one_way_anova([[1.0, 1.0], [2.0, 2.0]])

        self.assertEqual(math.inf, result.f)
        self.assertEqual(0.0, result.p_value)

    def test_too_few_groups(self):
        with self.assertRaises(ValidationError):
            stats.one_way_anova([ANOVA_LOW])

        with self.assertRaises(ValidationError):
            stats.one_way_anova([ANOVA_LOW, [1.0]])

    def test_to_dict(self):
        result = stats.one_way_anova([ANOVA_LOW, ANOVA_HIGH]).to_dict()

        self.assertDictContainsSubset({'df_between': 1, 'df_within': 6}, result)
        self.assertAlmostEqual(ANOVA_F, result['F'])


class EffectSizeTest(_test.TestCase):

    def test_cohens_d(self):
        self.assertAlmostEqual(-2.0 * math.sqrt(2.0), stats.cohens_d([0.0, 2.0], [4.0, 6.0]))

    def test_antisymmetric(self):
        a = self.rng.normal(size=12)
        b = self.rng.normal(1.0, 2.0, size=9)

        self.assertAlmostEqual(-stats.cohens_d(a, b), stats.cohens_d(b, a))

    def test_zero_pooled_deviation(self):
        self.assertEqual(0.0, stats.cohens_d([1.0, 1.0], [1.0, 1.0]))

        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            d = stats.cohens_d([2.0, 2.0], [1.0, 1.0])

        self.assertEqual(math.inf, d)
        self.assertEqual(1, len(w))
        self.assertTrue(issubclass(w[0].category, RuntimeWarning))

    def test_welch_against_scipy(self):
        a = self.rng.normal(size=15)
        b = self.rng.normal(0.8, 3.0, size=11)
        result = stats.welch_t(a, b)
        expected = scipy_stats.ttest_ind(a, b, equal_var=False)

        self.assertAlmostEqual(expected.statistic, result.t, places=9)
        self.assertAlmostEqual(expected.pvalue, result.p_value, places=9)

    def test_format_p(self):
        self.assertEqual("p < 0.001", stats.format_p(1e-5))
        self.assertEqual("p = 0.03215", stats.format_p(0.032149))


class IntervalTest(_test.TestCase):

    def test_large_normal_sample(self):
        low, high = stats.confidence_interval(self.rng.standard_normal(10000), 0.95)

        self.assertAlmostEqual(0.0196, (high - low) / 2.0, delta=0.00196)
        self.assertLess(low, high)

    def test_width_shrinks_with_root_n(self):
        samples = self.rng.normal(5.0, 3.0, size=10000)
        low, high = stats.confidence_interval(samples[:2000])
        wide = high - low
        low, high = stats.confidence_interval(samples[2000:])

        self.assertAlmostEqual(0.5, (high - low) / wide, delta=0.05)

    def test_small_sample(self):
        low, high = stats.confidence_interval([1.0, 2.0, 3.0], 0.95)

        half = scipy_stats.t.ppf(0.975, 2) / math.sqrt(3.0)
        self.assertAlmostEqual(2.0 - half, low, places=6)
        self.assertAlmostEqual(2.0 + half, high, places=6)

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            stats.confidence_interval([1.0])

        with self.assertRaises(ValidationError):
            stats.confidence_interval([1.0, 2.0], 1.0)


class TableTest(_test.TestCase):

    def setUp(self):
        super(TableTest, self).setUp()
        self.samples = {'HybridDqn': [90.0, 92.0, 94.0], 'GoldOnly': [80.0, 82.0, 84.0],
                        'WalshOnly': [None, None, 70.0]}

    def test_summary_table(self):
        rows = {row['arm']: row for row in stats.summary_table(self.samples)}

        self.assertEqual(92.0, rows['HybridDqn']['mean'])
        self.assertEqual(2.0, rows['HybridDqn']['sd'])
        self.assertEqual(1, rows['WalshOnly']['n'])
        self.assertIsNone(rows['WalshOnly']['ci_low'])

    def test_pairwise_table(self):
        rows = {row['arm']: row for row in stats.pairwise_table(self.samples, 'HybridDqn')}

        self.assertEqual({'GoldOnly', 'WalshOnly'}, set(rows))
        self.assertAlmostEqual(5.0, rows['GoldOnly']['cohens_d'])
        self.assertIsNone(rows['WalshOnly']['cohens_d'])

    def test_render_table(self):
        text = stats.render_table(stats.summary_table(self.samples), ['arm', 'n', 'mean', 'sd'])
        lines = text.splitlines()

        self.assertEqual(5, len(lines))
        self.assertTrue(lines[0].startswith('arm'))
        self.assertIn('92.0000', lines[2])
        self.assertIn('n/a', lines[4])
        self.assertEqual('', stats.render_table([]))
