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

"""
Core client functionality, common across all experiment operations.
"""

import functools
import inspect
import logging

from hybridnoma import config as config_module

logger = logging.getLogger(__name__)


class Client(object):
    """Runs experiments against one scenario configuration."""

    def __init__(self, config=None, seed=None, seeds=None, jobs=1):
        """
        :param config: A :class:`hybridnoma.config.Config`, a YAML path or a
            ``preset:<name>`` reference. None uses the defaults.
        :type config: Config or string

        :param seed: Overrides the configuration's ``seed`` key.
        :type seed: int

        :param seeds: Evaluation seeds. Defaults to ``eval_seeds`` consecutive
            seeds starting at the configuration seed.
        :type seeds: list of int

        :param jobs: Worker processes for multi-seed runs.
        :type jobs: int
        """
        if config is None or isinstance(config, str):
            config = config_module.load_config(config)
        if seed is not None:
            config = config.override(seed=seed)
        if jobs < 1:
            raise ValueError("jobs must be at least 1, got {}".format(jobs))
        self.config = config
        self.jobs = jobs
        self._seeds = list(seeds) if seeds is not None else None

    @property
    def seeds(self):
        if self._seeds is not None:
            return list(self._seeds)
        start = self.config['seed']
        return list(range(start, start + self.config['eval_seeds']))


from hybridnoma.experiments import ablation_suite
from hybridnoma.experiments import compare_suite
from hybridnoma.experiments import run_scenario
from hybridnoma.experiments import summarize_suite
from hybridnoma.experiments import train_agent
from hybridnoma.experiments import velocity_suite
from hybridnoma.experiments import velocity_sweep


def _make_api_method(func):
    """
    Provides a single entry point for every experiment method.

    The client's configuration, seeds and job count are passed to ``func``
    for whichever of ``config``, ``seeds`` and ``jobs`` it accepts and the
    caller left out. An ``overrides`` keyword (a dict of config keys) applies
    to that call only.
    """
    signature = inspect.signature(func)
    parameters = signature.parameters

    @functools.wraps(func)
    def wrapper(client, *args, **kwargs):
        overrides = kwargs.pop("overrides", None) or {}
        config = client.config.override(**{k.replace('.', '__'): v for k, v in overrides.items()})
        bound = signature.bind_partial(*args, **kwargs).arguments
        if 'config' in parameters and 'config' not in bound:
            kwargs['config'] = config
        if 'seeds' in parameters and 'seeds' not in bound:
            kwargs['seeds'] = client.seeds
        if 'jobs' in parameters and 'jobs' not in bound:
            kwargs['jobs'] = client.jobs
        return func(*args, **kwargs)

    return wrapper


Client.run_scenario = _make_api_method(run_scenario)
Client.train = _make_api_method(train_agent)
Client.velocity_sweep = _make_api_method(velocity_sweep)
Client.velocity_suite = _make_api_method(velocity_suite)
Client.ablation_suite = _make_api_method(ablation_suite)
Client.compare_suite = _make_api_method(compare_suite)
Client.summarize_suite = _make_api_method(summarize_suite)
