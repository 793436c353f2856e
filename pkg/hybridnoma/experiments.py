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

"""Scenario runner: the six-arm policy comparison, the ablation study and
velocity sweeps, each evaluated over a list of replica seeds.
"""

import enum
import logging
import math
import time
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from hybridnoma import convert, dqn, rlenv, stats
from hybridnoma.config import Config
from hybridnoma.exceptions import UnknownPolicy, ValidationError
from hybridnoma.netsim import HandoverOutcome

logger = logging.getLogger(__name__)

# Stream tags keep training and evaluation episodes apart for the same seed.
_EVAL_STREAM = 0
_TRAIN_STREAM = 1

PolicyProfile = namedtuple('PolicyProfile', ['family', 'assignment', 'learned', 'control_sequence',
                                             'control_power', 'fixed_profile'])


class PolicySpec(enum.Enum):
    GOLD_ONLY = 'GoldOnly'
    WALSH_ONLY = 'WalshOnly'
    KASAMI_ONLY = 'KasamiOnly'
    HYBRID_NO_AI = 'HybridNoAI'
    DRL_CONVENTIONAL = 'DrlConventional'
    HYBRID_DQN = 'HybridDqn'
    NO_DQN_POWER = 'NoDqnPower'
    NO_DQN_SEQUENCE = 'NoDqnSequence'
    NO_GOLD = 'NoGold'
    NO_WALSH = 'NoWalsh'

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        for spec in cls:
            if spec.value.lower() == str(name).lower() or spec.name.lower() == str(name).lower():
                return spec
        raise UnknownPolicy(name)

    @property
    def profile(self):
        return _PROFILES[self]

    @property
    def learned(self):
        return self.profile.learned


_PROFILES = {
    PolicySpec.GOLD_ONLY: PolicyProfile('gold', 'round_robin', False, False, False, None),
    PolicySpec.WALSH_ONLY: PolicyProfile('walsh', 'round_robin', False, False, False, None),
    PolicySpec.KASAMI_ONLY: PolicyProfile('kasami', 'round_robin', False, False, False, None),
    PolicySpec.HYBRID_NO_AI: PolicyProfile('hybrid', 'greedy', False, False, False, None),
    PolicySpec.DRL_CONVENTIONAL: PolicyProfile('gold', 'round_robin', True, True, True, None),
    PolicySpec.HYBRID_DQN: PolicyProfile('hybrid', 'greedy', True, True, True, None),
    PolicySpec.NO_DQN_POWER: PolicyProfile('hybrid', 'greedy', True, True, False, 0),
    PolicySpec.NO_DQN_SEQUENCE: PolicyProfile('hybrid', 'greedy', True, False, True, None),
    PolicySpec.NO_GOLD: PolicyProfile('walsh_only', 'greedy', True, True, True, None),
    PolicySpec.NO_WALSH: PolicyProfile('gold_extended', 'greedy', True, True, True, None),
}

COMPARISON_ARMS = (PolicySpec.GOLD_ONLY, PolicySpec.WALSH_ONLY, PolicySpec.KASAMI_ONLY,
                   PolicySpec.HYBRID_NO_AI, PolicySpec.DRL_CONVENTIONAL, PolicySpec.HYBRID_DQN)

ABLATION_ARMS = (PolicySpec.HYBRID_DQN, PolicySpec.NO_DQN_POWER, PolicySpec.NO_DQN_SEQUENCE,
                 PolicySpec.NO_GOLD, PolicySpec.NO_WALSH)

SUMMARY_METRICS = ('hsr', 'throughput_mbps', 'interference_dbm', 'reward', 'qos_satisfaction',
                   'energy_efficiency')


def make_env(policy, config, scope='tagged'):
    """Environment configured for ``policy``.

    :rtype: :class:`hybridnoma.rlenv.NomaEnv`
    """
    p = PolicySpec.from_name(policy).profile
    return rlenv.NomaEnv(config, family=p.family, assignment=p.assignment,
                         control_sequence=p.control_sequence, control_power=p.control_power,
                         fixed_profile=p.fixed_profile, scope=scope)


@dataclass
class EpisodeMetrics(object):
    episode: int
    hsr: Optional[float]
    throughput_mbps: float
    interference_dbm: float
    reward: float
    ho_success: int
    ho_rlf: int
    ho_pingpong: int
    ho_blocked: int = 0
    qos_satisfaction: float = 0.0
    energy_efficiency: float = 0.0
    decision_ms: float = field(default=0.0, compare=False)

    @property
    def ho_attempts(self):
        return self.ho_success + self.ho_rlf + self.ho_pingpong

    def to_row(self):
        return {c: getattr(self, c) for c in convert.RUN_COLUMNS}


@dataclass
class RunMetrics(object):
    """Episode metrics of one policy on one replica seed."""

    policy: str
    seed: int
    episodes: list

    def mean(self, metric):
        """Mean over episodes; None when no episode defines the metric."""
        values = [getattr(e, metric) for e in self.episodes]
        values = [v for v in values if v is not None]
        return float(np.mean(values)) if values else None

    @property
    def hsr(self):
        return self.mean('hsr')

    def rows(self):
        return [e.to_row() for e in self.episodes]


def run_episode(env, seed, episode, net=None, agent=None, learn=False):
    """Plays one episode and collects its metrics.

    :param env: Environment, reset here.
    :type env: :class:`hybridnoma.rlenv.NomaEnv`

    :param seed: Replica seed for this episode.

    :param episode: Episode number written to the metrics.
    :type episode: int

    :param net: Greedy controller used when no agent is given. With neither,
        the policy runs open loop.
    :type net: :class:`hybridnoma.dqn.QNetwork`

    :param agent: Learner acting epsilon-greedily and storing transitions
        when ``learn`` is set.
    :type agent: :class:`hybridnoma.dqn.DqnAgent`

    :rtype: :class:`EpisodeMetrics`
    """
    states = env.reset(seed)
    throughput = []
    interference = []
    qos = []
    reward = 0.0
    decision = 0.0
    decisions = 0
    done = False
    while not done:
        started = time.perf_counter()
        if agent is not None:
            action = agent.act(states[0], explore=learn)
        elif net is not None:
            action = np.argmax(net.predict(states), axis=1)
        else:
            action = None
        if action is not None:
            decision += time.perf_counter() - started
            decisions += 1
        next_states, breakdown, done = env.step(action)
        if learn:
            agent.observe(states[0], int(action), breakdown.total, next_states[0], done)
        states = next_states
        report = env.report
        throughput.append(float(report.throughput_mbps.mean()))
        interference.append(float(convert.dbm_to_watts(report.interference_dbm).mean()))
        qos.append(float(report.qos_ok.mean()))
        reward += breakdown.total
    if learn:
        agent.end_episode()

    ledger = env.network.ledger
    counts = ledger.counts
    mean_throughput = float(np.mean(throughput))
    tx_watts = env.network.params.tx_power * len(env.network.grid)
    return EpisodeMetrics(
        episode=episode,
        hsr=ledger.success_rate(),
        throughput_mbps=mean_throughput,
        interference_dbm=float(convert.watts_to_dbm(np.mean(interference))),
        reward=float(reward),
        ho_success=counts[HandoverOutcome.SUCCESS],
        ho_rlf=counts[HandoverOutcome.RLF],
        ho_pingpong=counts[HandoverOutcome.PINGPONG],
        ho_blocked=sum(1 for r in ledger.records if r.blocked),
        qos_satisfaction=float(np.mean(qos)),
        energy_efficiency=mean_throughput * len(env.network.users) / tx_watts,
        decision_ms=1000.0 * decision / max(decisions, 1))


@dataclass
class TrainingResult(object):
    agent: dqn.DqnAgent
    episodes: list
    convergence: Optional[dqn.ConvergenceReport]

    @property
    def rewards(self):
        return [e.reward for e in self.episodes]


def train_agent(policy, config, seed=None, episodes=None):
    """Trains a DQN controller for a learned policy.

    The agent steers the tagged user. Training episodes draw their replicas
    from a stream disjoint from the evaluation seeds.

    :param policy: A learned policy.
    :type policy: :class:`PolicySpec` or string

    :param config: Scenario configuration.
    :type config: :class:`hybridnoma.config.Config`

    :param seed: Agent and replica seed, default ``config['seed']``.
    :type seed: int

    :param episodes: Training budget, default ``config['train_episodes']``.
    :type episodes: int

    :raises ValidationError: for fixed policies or a non-positive budget.

    :rtype: :class:`TrainingResult`
    """
    policy = PolicySpec.from_name(policy)
    if not policy.learned:
        raise ValidationError("{} is not a learned policy".format(policy.value))
    seed = config['seed'] if seed is None else seed
    episodes = config['train_episodes'] if episodes is None else episodes
    if episodes < 1:
        raise ValidationError("Training needs at least one episode, got {}".format(episodes))

    env = make_env(policy, config, scope='tagged')
    agent = dqn.DqnAgent.from_config(config, rlenv.STATE_DIM, env.n_actions, seed=seed)
    agent.schedule.episodes = episodes
    logger.info("Training %s: %d episodes, %d actions, reward weights %s",
                policy.value, episodes, env.n_actions, env.weights)
    history = []
    for e in range(episodes):
        metrics = run_episode(env, np.random.SeedSequence([seed, _TRAIN_STREAM, e]), e, agent=agent, learn=True)
        history.append(metrics)
        logger.info("%s episode %d: reward %.3f, hsr %s, epsilon %.3f", policy.value, e, metrics.reward,
                    'n/a' if metrics.hsr is None else '{:.1f}'.format(metrics.hsr),
                    agent.schedule.epsilon(agent.episodes))
    assert agent.net.is_finite(), "non-finite network parameters"

    window = config['convergence.window']
    report = None
    if episodes >= 2 * window:
        report = dqn.detect_convergence([m.reward for m in history], window,
                                        config['convergence.slope_tol'], config['convergence.plateau_tol'])
        logger.info("%s: %s", policy.value, report.describe())
    return TrainingResult(agent, history, report)


def evaluate(policy, config, seed, net=None):
    """Runs ``eval_episodes`` episodes of ``policy`` on one replica seed.

    Fixed policies never touch ``net``.

    :rtype: :class:`RunMetrics`
    """
    policy = PolicySpec.from_name(policy)
    scope = config['control_scope_eval'] if policy.learned else 'tagged'
    env = make_env(policy, config, scope=scope)
    controller = net if policy.learned else None
    episodes = [run_episode(env, np.random.SeedSequence([seed, _EVAL_STREAM, e]), e, net=controller)
                for e in range(config['eval_episodes'])]
    return RunMetrics(policy.value, seed, episodes)


def _evaluate_job(args):
    policy, values, seed, net = args
    return evaluate(policy, Config(values), seed, net)


def run_scenario(policy, config, seeds, net=None, jobs=1):
    """Evaluates ``policy`` on every seed.

    Learned policies without a network are trained first. With ``jobs > 1``
    seeds fan out to worker processes; results keep seed order.

    :param policy: Policy name or spec.

    :param config: Scenario configuration.
    :type config: :class:`hybridnoma.config.Config`

    :param seeds: Replica seeds.
    :type seeds: list of int

    :param net: Trained controller for learned policies.
    :type net: :class:`hybridnoma.dqn.QNetwork`

    :param jobs: Worker processes.
    :type jobs: int

    :raises UnknownPolicy: for unknown names.
    :raises ValidationError: on an empty seed list.

    :rtype: list of :class:`RunMetrics`
    """
    policy = PolicySpec.from_name(policy)
    seeds = list(seeds)
    if not seeds:
        raise ValidationError("run_scenario needs at least one seed")
    if policy.learned and net is None:
        net = train_agent(policy, config).agent.net
    jobs_args = [(policy.value, config.to_dict(), seed, net if policy.learned else None) for seed in seeds]
    logger.info("Evaluating %s on %d seeds", policy.value, len(seeds))
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(_evaluate_job, jobs_args))
    return [_evaluate_job(a) for a in jobs_args]


def velocity_sweep(policy, speeds, config, seeds, net=None, jobs=1):
    """run_scenario per speed with the velocity band pinned to that speed.

    A learned policy without a network is trained once on ``config``.

    :rtype: dict of speed to list of :class:`RunMetrics`
    """
    speeds = list(speeds)
    if not speeds:
        raise ValidationError("velocity_sweep needs at least one speed")
    policy = PolicySpec.from_name(policy)
    if policy.learned and net is None:
        net = train_agent(policy, config).agent.net
    return {speed: run_scenario(policy, config.override(velocity_kmh_min=speed, velocity_kmh_max=speed),
                                seeds, net=net, jobs=jobs)
            for speed in speeds}


def velocity_suite(policies, speeds, config, seeds, jobs=1):
    """:func:`velocity_sweep` for several policies.

    :rtype: dict of policy name to the sweep result
    """
    policies = [PolicySpec.from_name(p) for p in policies]
    if not policies:
        raise ValidationError("velocity_suite needs at least one policy")
    return {p.value: velocity_sweep(p, speeds, config, seeds, jobs=jobs) for p in policies}


def _suite(arms, config, seeds, jobs, nets, trainings):
    results = {}
    nets = dict(nets or {})
    for arm in arms:
        if arm.learned and arm.value not in nets:
            trained = train_agent(arm, config)
            nets[arm.value] = trained.agent.net
            if trainings is not None:
                trainings[arm.value] = trained
        results[arm.value] = run_scenario(arm, config, seeds, net=nets.get(arm.value), jobs=jobs)
    return results


def compare_suite(config, seeds, jobs=1, nets=None, trainings=None):
    """The six-arm comparison: three fixed families, hybrid codes without
    learning, DQN on Gold codes and the full system.

    :param nets: Pre-trained networks by policy name; missing ones are trained.
    :type nets: dict

    :param trainings: Receives the :class:`TrainingResult` of each arm
        trained here.
    :type trainings: dict

    :rtype: dict of policy name to list of :class:`RunMetrics`
    """
    return _suite(COMPARISON_ARMS, config, seeds, jobs, nets, trainings)


def ablation_suite(config, seeds, jobs=1, nets=None, trainings=None):
    """The full system and its four single-component ablations on the same seeds.

    :rtype: dict of policy name to list of :class:`RunMetrics`
    """
    return _suite(ABLATION_ARMS, config, seeds, jobs, nets, trainings)


def per_seed(results, metric):
    """Per-seed means of ``metric`` by policy."""
    return {name: [run.mean(metric) for run in runs] for name, runs in results.items()}


def ablation_table(results):
    """Rows of (variant, HSR, throughput, interference) means over seeds."""
    rows = []
    for name, runs in results.items():
        row = {'variant': name}
        for metric in ('hsr', 'throughput_mbps', 'interference_dbm'):
            values = [v for v in per_seed({name: runs}, metric)[name] if v is not None]
            row[metric] = float(np.mean(values)) if values else None
        rows.append(row)
    return rows


def summarize_suite(results, config, reference=PolicySpec.HYBRID_DQN.value, level=0.95):
    """Means, confidence intervals, ANOVA and pairwise effect sizes.

    Every statistic is computed over per-seed means. ANOVA is reported for a
    metric only when every arm has at least two defined values.

    :rtype: dict
    """
    summary = {'config_hash': config.hash(), 'level': level, 'arms': list(results),
               'seeds': [run.seed for run in next(iter(results.values()))],
               'metrics': {}, 'decision_ms': {}, 'ho_failure': {}}
    for metric in SUMMARY_METRICS:
        samples = per_seed(results, metric)
        entry = {'table': stats.summary_table(samples, level)}
        defined = {k: [v for v in vals if v is not None] for k, vals in samples.items()}
        if len(defined) >= 2 and all(len(v) >= 2 for v in defined.values()):
            entry['anova'] = stats.one_way_anova(list(defined.values())).to_dict()
        if reference in samples:
            entry['pairwise'] = stats.pairwise_table(samples, reference)
        summary['metrics'][metric] = entry
    epsilon = config['ho_failure_epsilon']
    for name, runs in results.items():
        summary['decision_ms'][name] = float(np.mean([e.decision_ms for run in runs for e in run.episodes]))
        failed = sum(e.ho_rlf + e.ho_pingpong for run in runs for e in run.episodes)
        attempts = sum(e.ho_attempts for run in runs for e in run.episodes)
        probability = failed / float(attempts) if attempts else None
        summary['ho_failure'][name] = {'probability': probability, 'epsilon': epsilon,
                                       'within_epsilon': None if probability is None else probability <= epsilon}
    return summary


def render_summary(summary):
    """Plain-text tables of a suite summary."""
    blocks = ["config {}".format(summary['config_hash'])]
    for metric, entry in summary['metrics'].items():
        blocks.append("\n[{}]".format(metric))
        blocks.append(stats.render_table(entry['table'], ['arm', 'n', 'mean', 'sd', 'ci_low', 'ci_high']))
        if 'anova' in entry:
            a = entry['anova']
            f = a['F']
            blocks.append("ANOVA F({}, {}) = {}, {}".format(
                a['df_between'], a['df_within'], 'inf' if math.isinf(f) else '{:.4g}'.format(f),
                stats.format_p(a['p_value'])))
        if entry.get('pairwise'):
            blocks.append("pairwise (Cohen's d, Welch t):")
            blocks.append(stats.render_table(entry['pairwise'],
                                             ['reference', 'arm', 'cohens_d', 'welch_t', 'p_value']))
    return '\n'.join(blocks) + '\n'
