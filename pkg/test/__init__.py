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

import os
import sys
import unittest

import numpy as np

import hybridnoma
from hybridnoma.config import Config

# For relative imports to work in Python 3.6
sys.path.append(os.path.dirname(os.path.realpath(__file__)))

from test_helper import SMALL_CONFIG  # noqa: E402

SLOW = bool(os.environ.get('HYBRIDNOMA_SLOW'))


class TestCase(unittest.TestCase):

    def setUp(self):
        self.config = Config(SMALL_CONFIG)
        self.rng = np.random.default_rng(20260101)
        self.client = hybridnoma.Client(self.config, seeds=[0, 1])

    def assertArrayAlmostEqual(self, first, second, tol=1e-9, msg=None):
        """Element-wise comparison with an absolute tolerance."""
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        self.assertEqual(first.shape, second.shape, msg)
        self.assertTrue(np.allclose(first, second, rtol=0.0, atol=tol),
                        msg or "max deviation {}".format(np.max(np.abs(first - second))))

    def assertDictContainsSubset(self, a, b, **kwargs):
        """Replaces deprecated unittest.TestCase.assertDictContainsSubset"""
        c = dict([(k, b[k]) for k in a.keys() if k in b.keys()])
        self.assertEqual(a, c)
