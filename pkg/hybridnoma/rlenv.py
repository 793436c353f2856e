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

"""Episodic reinforcement-learning environment over a :class:`Network` replica.

States are seven normalized features per controlled user, actions are the
flattened product (sequence, power profile, margin step), and the reward is
the weighted sum of five bounded terms.
"""

import functools
import logging
from dataclasses import dataclass

import numpy as np

from hybridnoma import netsim, seqlib
from hybridnoma.exceptions import EnvironmentDone, ValidationError

logger = logging.getLogger(__name__)

STATE_DIM = 7
MARGIN_STEPS = (-1, 0, 1)

# Clipping ranges for the state features.
SINR_RANGE_DB = (-20.0, 40.0)
RSRP_RANGE_DBM = (-120.0, -60.0)
INTERFERENCE_RANGE_DBM = (-110.0, -50.0)
MAX_SPEED_KMH = 120.0
MAX_GROUP = 8.0
MAX_MARGIN_DB = 6.0

REWARD_TERMS = ('throughput', 'interference', 'ho_failure', 'qos', 'energy')


@dataclass(frozen=True)
class EnvAction(object):
    sequence: int
    profile: int
    margin_step: int


@dataclass(frozen=True)
class RewardBreakdown(object):
    throughput: float
    interference: float
    ho_failure: float
    qos: float
    energy: float
    total: float


@functools.lru_cache(maxsize=16)
def _codebook(family, degree, size):
    codebook = seqlib.family_codebook(family, degree, size)
    return tuple(codebook), seqlib.rho2_matrix(codebook)


def action_space_size(sequences, profiles):
    """S * P * 3 flattened actions.

    :param sequences: Number of selectable sequences S.
    :type sequences: int

    :param profiles: Number of power profiles P.
    :type profiles: int

    :rtype: int
    """
    if sequences < 1 or profiles < 1:
        raise ValidationError("Action space needs at least one sequence and one profile")
    return sequences * profiles * len(MARGIN_STEPS)


def config_action_space_size(config, control_sequence=True, control_power=True):
    """Action-space size for a :class:`~hybridnoma.config.Config`.

    A policy that does not control the sequence (or the power profile)
    sees a single choice on that axis.

    :rtype: int
    """
    sequences = config['action.sequences'] if control_sequence else 1
    profiles = config['action.power_profiles'] if control_power else 1
    return action_space_size(sequences, profiles)


def encode_action(action, profiles):
    return (action.sequence * profiles + action.profile) * len(MARGIN_STEPS) + MARGIN_STEPS.index(action.margin_step)


def decode_action(action_id, sequences, profiles):
    """Inverse of :func:`encode_action`.

    :rtype: :class:`EnvAction`
    """
    size = action_space_size(sequences, profiles)
    if not 0 <= action_id < size:
        raise ValidationError("Action id {} outside [0, {})".format(action_id, size))
    rest, step = divmod(int(action_id), len(MARGIN_STEPS))
    sequence, profile = divmod(rest, profiles)
    return EnvAction(sequence, profile, MARGIN_STEPS[step])


def _unit(value, bounds):
    lo, hi = bounds
    return float(np.clip((value - lo) / (hi - lo), 0.0, 1.0))


def encode_state(report, user):
    """Seven features of one user, each clipped to [0, 1].

    :param report: Latest link report.
    :type report: :class:`hybridnoma.netsim.TickReport`

    :param user: The user.
    :type user: :class:`hybridnoma.netsim.UserState`

    :rtype: numpy.ndarray
    """
    uid = user.uid
    return np.array([
        _unit(report.sinr_db[uid], SINR_RANGE_DB),
        _unit(report.rsrp_serving_dbm[uid], RSRP_RANGE_DBM),
        min(user.speed_kmh / MAX_SPEED_KMH, 1.0),
        min(report.load[uid] / MAX_GROUP, 1.0),
        _unit(report.interference_dbm[uid], INTERFERENCE_RANGE_DBM),
        1.0 if report.qos_ok[uid] else 0.0,
        float(np.clip(user.margin_db / MAX_MARGIN_DB, 0.0, 1.0)),
    ])


def reward_terms(report, uid, failures):
    """Normalized reward terms of one user for one tick.

    Throughput is the group sum rate over ``group_size * 2`` bit/s/Hz and the
    energy proxy is the user's power factor beyond an equal share.

    :param failures: User ids with a failed handover finalized this tick.
    :type failures: set

    :rtype: dict
    """
    size = max(int(report.group_size[uid]), 1)
    return {
        'throughput': min(report.group_rate[uid] / (size * 2.0), 1.0),
        'interference': _unit(report.interference_dbm[uid], INTERFERENCE_RANGE_DBM),
        'ho_failure': 1.0 if uid in failures else 0.0,
        'qos': float(report.group_qos[uid]),
        'energy': max(float(report.alpha[uid]) - 1.0 / size, 0.0),
    }


def compute_reward(terms, weights):
    """Weighted sum; interference, failure and energy enter with a minus sign.

    :param terms: Output of :func:`reward_terms` (or the mean of several).
    :type terms: dict

    :param weights: Weight per term name.
    :type weights: dict

    :rtype: :class:`RewardBreakdown`
    """
    total = (weights['throughput'] * terms['throughput']
             - weights['interference'] * terms['interference']
             - weights['ho_failure'] * terms['ho_failure']
             + weights['qos'] * terms['qos']
             - weights['energy'] * terms['energy'])
    return RewardBreakdown(total=float(total), **{k: float(terms[k]) for k in REWARD_TERMS})


class NomaEnv(object):
    """Simulator wrapped as an episodic environment.

    With ``scope='tagged'`` the agent steers the fastest user and every other
    user keeps its attach-time sequence, the baseline profile and the
    configured margin. With ``scope='all'`` the same Q-function is applied to
    every user and a cell takes the profile most of its members chose.
    """

    def __init__(self, config, family='hybrid', assignment='greedy', control_sequence=True,
                 control_power=True, fixed_profile=None, scope='tagged'):
        if scope not in ('tagged', 'all'):
            raise ValidationError("scope must be 'tagged' or 'all', got {}".format(scope))
        if assignment not in ('greedy', 'round_robin'):
            raise ValidationError("assignment must be 'greedy' or 'round_robin', got {}".format(assignment))
        self.config = config
        self.family = family
        self.assignment = assignment
        self.control_sequence = control_sequence
        self.control_power = control_power
        self.fixed_profile = config['baseline_profile'] if fixed_profile is None else fixed_profile
        self.scope = scope
        self.weights = config.section('reward_weights')

        size = config['action.sequences']
        self.codebook, self.rho2 = _codebook(family, config['sequence.degree'], size)
        self.sequences = len(self.codebook) if control_sequence else 1
        self.profiles = config['action.power_profiles'] if control_power else 1
        self.n_actions = config_action_space_size(config, control_sequence, control_power)

        self.network = None
        self.tagged = None
        self.tick = 0
        self.done = True
        self._report = None

    def _assigner(self):
        if self.assignment == 'greedy':
            return netsim.greedy_assigner(self.rho2)
        return netsim.round_robin_assigner(len(self.codebook))

    def reset(self, seed):
        """Starts a new episode.

        :param seed: Replica seed; the same seed reproduces the same episode
            under the same actions.
        :type seed: int or numpy.random.SeedSequence

        :returns: States of the controlled users, shape (users, 7).
        :rtype: numpy.ndarray
        """
        self.network = netsim.Network(self.config, self.rho2, self._assigner(), seed)
        if not self.control_power:
            self.network.cell_profile = [self.fixed_profile] * len(self.network.grid)
        speeds = [u.speed_kmh for u in self.network.users]
        self.tagged = int(np.argmax(speeds))
        self.tick = 0
        self.done = False
        self._report = self.network.observe()
        return self.states()

    @property
    def controlled(self):
        if self.scope == 'tagged':
            return [self.tagged]
        return list(range(len(self.network.users)))

    def states(self):
        states = np.array([encode_state(self._report, self.network.users[uid]) for uid in self.controlled])
        assert np.all(np.isfinite(states)), "non-finite state"
        return states

    def _apply(self, actions):
        network = self.network
        chosen = {}
        for uid, action_id in zip(self.controlled, actions):
            action = decode_action(action_id, self.sequences, self.profiles)
            network.apply_control(uid, sequence=action.sequence if self.control_sequence else None,
                                  margin_step=action.margin_step)
            if self.control_power:
                chosen.setdefault(network.users[uid].serving, []).append(action.profile)
        for cell, profiles in chosen.items():
            network.cell_profile[cell] = int(np.argmax(np.bincount(profiles)))

    def step(self, actions=None):
        """Advances one tick.

        :param actions: One action id per controlled user (a bare int is
            accepted for a single user). None leaves every control untouched.
        :type actions: int or list of int

        :raises EnvironmentDone: after the episode's last tick.

        :returns: Next states, reward breakdown and the done flag.
        :rtype: tuple
        """
        if self.done:
            raise EnvironmentDone(self.tick)
        if actions is not None:
            self._apply(np.atleast_1d(actions))
        report = self.network.tick()
        self._report = report
        self.tick += 1

        failures = {r.user for r in report.finalized if r.outcome is not netsim.HandoverOutcome.SUCCESS}
        per_user = [reward_terms(report, uid, failures) for uid in self.controlled]
        terms = {k: float(np.mean([t[k] for t in per_user])) for k in REWARD_TERMS}
        reward = compute_reward(terms, self.weights)
        assert np.isfinite(reward.total), "non-finite reward"

        self.done = self.tick >= self.config['episode_ticks']
        if self.done:
            self.network.close()
        return self.states(), reward, self.done

    @property
    def report(self):
        return self._report
