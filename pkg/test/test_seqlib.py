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

"""Tests for the seqlib module."""

import numpy as np

from hybridnoma import seqlib
from hybridnoma.exceptions import SequenceError
from hybridnoma.seqlib import ChipSequence, Family, LfsrSpec

import test as _test
from test_helper import GOLD5_CROSS_VALUES, KASAMI6_CROSS_VALUES


class MsequenceTest(_test.TestCase):

    def test_msequence_period_and_balance(self):
        for degree, taps in seqlib.PRIMITIVE_TAPS.items():
            seq = seqlib.generate_msequence(LfsrSpec(degree, taps))

            self.assertEqual(2 ** degree - 1, seq.length)
            # one more -1 (bit 1) than +1
            self.assertEqual(-1, int(seq.chips.sum()))

    def test_msequence_two_valued_autocorrelation(self):
        seq = seqlib.generate_msequence(LfsrSpec(5, (5, 2)))
        profile = seqlib.periodic_correlation(seq, seq)

        self.assertEqual(31, profile.values[0])
        self.assertEqual({-1}, set(profile.values[1:].tolist()))
        self.assertTrue(profile.is_auto)

    def test_rejects_non_primitive(self):
        # x^5 + x^4 + 1 factors over GF(2)
        with self.assertRaises(SequenceError):
            seqlib.generate_msequence(LfsrSpec(5, (5, 1)))

    def test_rejects_bad_specs(self):
        for spec in (LfsrSpec(11, (11, 2)), LfsrSpec(2, (2, 1)), LfsrSpec(5, (4, 2)),
                     LfsrSpec(5, (5, 2), seed=0), LfsrSpec(5, (5, 2), seed=32)):
            with self.assertRaises(SequenceError):
                seqlib.generate_msequence(spec)


class FamilyTest(_test.TestCase):

    def test_gold_family_m5(self):
        family = seqlib.generate_gold_family(5)

        self.assertEqual(33, len(family))
        self.assertTrue(all(s.length == 31 and s.family is Family.GOLD for s in family))
        self.assertEqual(list(range(33)), [s.index for s in family])

    def test_gold_three_valued_cross_correlation(self):
        family = seqlib.generate_gold_family(5)
        seen = set()
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                seen |= set(seqlib.periodic_correlation(family[i], family[j]).values.tolist())

        self.assertEqual(GOLD5_CROSS_VALUES, seen)
        self.assertEqual(9, seqlib.gold_bound(5))

    def test_gold_bound_other_degrees(self):
        for m in (6, 7):
            family = seqlib.generate_gold_family(m)
            bound = seqlib.gold_bound(m)
            for j in (1, 2, 7, 20):
                values = seqlib.periodic_correlation(family[0], family[j]).values
                self.assertLessEqual(int(np.max(np.abs(values))), bound)

    def test_gold_unsupported_degree(self):
        with self.assertRaises(SequenceError):
            seqlib.generate_gold_family(8)

    def test_walsh_orthogonal_at_zero_lag(self):
        for order in (4, 32, 64):
            rows = np.array([w.chips for w in seqlib.generate_walsh_family(order)], dtype=int)

            self.assertArrayAlmostEqual(order * np.eye(order), rows @ rows.T)

    def test_walsh_bad_order(self):
        for order in (2, 6, 512):
            with self.assertRaises(SequenceError):
                seqlib.generate_walsh_family(order)

    def test_kasami_small_set(self):
        family = seqlib.generate_kasami_small(6)

        self.assertEqual(8, len(family))
        self.assertTrue(all(s.length == 63 for s in family))
        seen = set()
        for i in range(len(family)):
            for j in range(i + 1, len(family)):
                seen |= set(seqlib.periodic_correlation(family[i], family[j]).values.tolist())
        self.assertTrue(seen <= KASAMI6_CROSS_VALUES)

    def test_kasami_degree_checks(self):
        for m in (5, 7, 10):
            with self.assertRaises(SequenceError):
                seqlib.generate_kasami_small(m)

    def test_chip_sequence_validation(self):
        with self.assertRaises(SequenceError):
            ChipSequence(np.array([1, 0, -1]), Family.GOLD)

        with self.assertRaises(SequenceError):
            ChipSequence(np.array([], dtype=int), Family.GOLD)

        with self.assertRaises(SequenceError):
            ChipSequence(np.ones(6), Family.WALSH)


class HybridTest(_test.TestCase):

    def setUp(self):
        super(HybridTest, self).setUp()
        self.gold = seqlib.generate_gold_family(5)
        self.walsh = seqlib.generate_walsh_family(32)

    def test_extend(self):
        g = self.gold[3]
        extended = seqlib.extend(g, 32)

        self.assertEqual(32, extended.length)
        self.assertEqual(g.chips[0], extended.chips[31])
        self.assertIs(g, seqlib.extend(g, 31))

        with self.assertRaises(SequenceError):
            seqlib.extend(g, 64)

    def test_make_hybrid(self):
        h = seqlib.make_hybrid(self.gold[2], self.walsh[5])

        self.assertEqual(32, h.length)
        self.assertIs(Family.HYBRID, h.family)
        self.assertEqual(2 * 32 + 5, h.index)
        self.assertArrayAlmostEqual(seqlib.extend(self.gold[2], 32).chips * self.walsh[5].chips, h.chips)

    def test_hybrid_with_walsh_row_zero_is_extended_gold(self):
        h = seqlib.make_hybrid(self.gold[4], self.walsh[0])

        self.assertArrayAlmostEqual(seqlib.extend(self.gold[4], 32).chips, h.chips)

    def test_make_hybrid_length_mismatch(self):
        with self.assertRaises(SequenceError):
            seqlib.make_hybrid(self.gold[0], seqlib.generate_walsh_family(64)[1])

    def test_claim_reports(self):
        report = seqlib.correlation_claim_report(self.gold[0], self.gold[1], self.walsh[1], self.walsh[2])

        self.assertEqual(32, report['length'])
        self.assertEqual(32, len(report['r_hybrid']))
        self.assertLessEqual(report['lags_equal'], 32)

        papr = seqlib.papr_claim_report(self.gold[0], self.walsh[1])
        self.assertIn('claim_holds', papr)
        self.assertGreaterEqual(papr['papr_hybrid'], 1.0)


class CorrelationTest(_test.TestCase):

    def test_fft_matches_direct(self):
        for _ in range(200):
            n = int(self.rng.integers(2, 257))
            a = ChipSequence(self.rng.choice([-1, 1], size=n), Family.MSEQ)
            b = ChipSequence(self.rng.choice([-1, 1], size=n), Family.MSEQ)

            fft = seqlib.periodic_correlation(a, b, method='fft').values
            direct = seqlib.periodic_correlation(a, b, method='direct').values
            self.assertTrue(np.array_equal(fft, direct))

    def test_length_mismatch(self):
        with self.assertRaises(SequenceError):
            seqlib.periodic_correlation(seqlib.generate_gold_family(5)[0], seqlib.generate_walsh_family(32)[0])

    def test_papr_of_constant_code_is_length(self):
        self.assertAlmostEqual(32.0, seqlib.measure_papr(seqlib.generate_walsh_family(32)[0]), places=9)

    def test_papr_at_least_one(self):
        for seq in seqlib.generate_gold_family(5)[:5]:
            self.assertGreaterEqual(seqlib.measure_papr(seq), 1.0)

    def test_rho2_matrix(self):
        gold = seqlib.generate_gold_family(5)[:6]
        rho2 = seqlib.rho2_matrix(gold)

        self.assertArrayAlmostEqual(np.ones(6), np.diag(rho2))
        self.assertArrayAlmostEqual(rho2, rho2.T)
        off = rho2[~np.eye(6, dtype=bool)]
        self.assertTrue(np.all(off <= (9.0 / 31) ** 2 + 1e-12))
        self.assertTrue(np.all(off > 0.0))

    def test_select_codebook(self):
        candidates = seqlib.generate_gold_family(5)
        chosen = seqlib.select_codebook(candidates, 8)

        self.assertEqual(8, len(chosen))
        self.assertEqual(candidates[0], chosen[0])
        self.assertEqual(8, len({s.index for s in chosen}))

        with self.assertRaises(SequenceError):
            seqlib.select_codebook(candidates, 40)

    def test_family_codebooks(self):
        expected = {'gold': 63, 'walsh': 64, 'kasami': 63, 'hybrid': 64, 'gold_extended': 64, 'walsh_only': 64}
        for family, length in expected.items():
            codebook = seqlib.family_codebook(family, 6, 8)

            self.assertEqual(8, len(codebook), family)
            self.assertTrue(all(s.length == length for s in codebook), family)

        with self.assertRaises(SequenceError):
            seqlib.family_codebook('spam', 6, 8)

        with self.assertRaises(SequenceError):
            seqlib.family_codebook('kasami', 6, 9)
