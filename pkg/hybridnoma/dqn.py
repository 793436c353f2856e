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

"""Deep Q-learning on numpy: value network with hand-written backpropagation,
epsilon-greedy control, proportional prioritized replay on a sum-tree and a
periodically synchronized target network.
"""

import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from hybridnoma.exceptions import BufferUnderflow, CheckpointError, ValidationError

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1

Gradients = namedtuple('Gradients', ['weights', 'biases', 'loss', 'td'])
Batch = namedtuple('Batch', ['states', 'actions', 'rewards', 'next_states', 'dones'])


class QNetwork(object):
    """Fully connected ReLU network mapping a state to one Q-value per action."""

    def __init__(self, sizes, dropout=0.0, rng=None):
        """
        :param sizes: Layer widths ``[d_in, h1, ..., d_out]``.
        :type sizes: list of int

        :param dropout: Drop probability on hidden activations, training only.
        :type dropout: float

        :param rng: Initialization stream; He-normal weights, zero biases.
            None leaves every parameter at zero.
        :type rng: numpy.random.Generator
        """
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValidationError("Invalid layer sizes {}".format(sizes))
        if not 0.0 <= dropout < 1.0:
            raise ValidationError("dropout must lie in [0, 1)")
        self.sizes = [int(s) for s in sizes]
        self.dropout = float(dropout)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            if rng is None:
                self.weights.append(np.zeros((fan_in, fan_out)))
            else:
                self.weights.append(rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_actions(self):
        return self.sizes[-1]

    def predict(self, states):
        return forward(self, states)

    def fit(self, states, actions, targets, weights, lr, delta=1.0, rng=None):
        """One SGD step on the importance-weighted Huber loss.

        :returns: Loss and TD errors.
        :rtype: tuple
        """
        grads = backward(self, states, actions, targets, weights, delta=delta, rng=rng)
        sgd_update(self, grads, lr)
        return grads.loss, grads.td

    def copy(self):
        clone = QNetwork(self.sizes, self.dropout)
        clone.load_state(self)
        return clone

    def load_state(self, other):
        """Copies every parameter of ``other`` bit for bit."""
        if other.sizes != self.sizes:
            raise ValidationError("Layer sizes differ: {} vs {}".format(other.sizes, self.sizes))
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    def parameters(self):
        return self.weights + self.biases

    def checksum(self):
        return float(sum(np.sum(p, dtype=np.float64) for p in self.parameters()))

    def is_finite(self):
        return all(np.all(np.isfinite(p)) for p in self.parameters())


def _forward_cache(net, states, rng=None):
    x = np.atleast_2d(np.asarray(states, dtype=float))
    if x.shape[1] != net.sizes[0]:
        raise ValidationError("State dimension {} does not match network input {}".format(x.shape[1], net.sizes[0]))
    activations = [x]
    masks = []
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = activations[-1] @ w + b
        if i == last:
            activations.append(z)
            break
        h = np.maximum(z, 0.0)
        if rng is not None and net.dropout > 0.0:
            mask = (rng.uniform(size=h.shape) >= net.dropout) / (1.0 - net.dropout)
        else:
            mask = np.ones_like(h)
        masks.append(mask)
        activations.append(h * mask)
    return activations, masks


def forward(net, states, rng=None):
    """Q-values of a batch of states.

    :param states: Shape (d_in,) or (batch, d_in).

    :param rng: When given, dropout is active (training mode). Inference
        without it is deterministic.
    :type rng: numpy.random.Generator

    :raises ValidationError: on a state dimension mismatch.

    :rtype: numpy.ndarray of shape (batch, d_out)
    """
    return _forward_cache(net, states, rng)[0][-1]


def huber(x, delta=1.0):
    a = np.abs(x)
    return np.where(a <= delta, 0.5 * x ** 2, delta * (a - 0.5 * delta))


def backward(net, states, actions, targets, weights=None, delta=1.0, rng=None):
    """Gradients of the mean importance-weighted Huber TD loss.

    The loss is ``mean_i w_i * huber(Q(s_i, a_i) - y_i)``.

    :param states: Batch of states, shape (batch, d_in).

    :param actions: Action taken in each state.
    :type actions: array of int

    :param targets: Regression targets ``y``.
    :type targets: array of float

    :param weights: Importance weights, default all ones.
    :type weights: array of float

    :param delta: Huber threshold.
    :type delta: float

    :param rng: Enables dropout for this pass.

    :rtype: :class:`Gradients`
    """
    activations, masks = _forward_cache(net, states, rng)
    batch = activations[0].shape[0]
    if batch == 0:
        raise ValidationError("Empty batch")
    actions = np.asarray(actions, dtype=int)
    weights = np.ones(batch) if weights is None else np.asarray(weights, dtype=float)
    rows = np.arange(batch)

    td = activations[-1][rows, actions] - np.asarray(targets, dtype=float)
    loss = float(np.mean(weights * huber(td, delta)))
    upstream = np.zeros_like(activations[-1])
    upstream[rows, actions] = weights * np.clip(td, -delta, delta) / batch

    grad_w = [None] * len(net.weights)
    grad_b = [None] * len(net.biases)
    for i in range(len(net.weights) - 1, -1, -1):
        grad_w[i] = activations[i].T @ upstream
        grad_b[i] = upstream.sum(axis=0)
        if i > 0:
            upstream = (upstream @ net.weights[i].T) * masks[i - 1] * (activations[i] > 0.0)
    return Gradients(grad_w, grad_b, loss, td)


def sgd_update(net, grads, lr):
    for i in range(len(net.weights)):
        net.weights[i] -= lr * grads.weights[i]
        net.biases[i] -= lr * grads.biases[i]


def select_action(net, state, epsilon, rng):
    """Epsilon-greedy action; greedy ties go to the lowest index.

    :param epsilon: Exploration probability in [0, 1].
    :type epsilon: float

    :rtype: int
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError("epsilon must lie in [0, 1], got {}".format(epsilon))
    if epsilon > 0.0 and rng.uniform() < epsilon:
        return int(rng.integers(net.n_actions))
    return int(np.argmax(net.predict(state)[0]))


class TabularQ(object):
    """Lookup-table Q-function with the :class:`QNetwork` interface.

    States are vectors whose first component is the integer state index.
    """

    def __init__(self, n_states, n_actions):
        self.sizes = [1, n_states, n_actions]
        self.table = np.zeros((n_states, n_actions))

    @property
    def n_actions(self):
        return self.table.shape[1]

    def _index(self, states):
        return np.rint(np.atleast_2d(np.asarray(states, dtype=float))[:, 0]).astype(int)

    def predict(self, states):
        return self.table[self._index(states)].copy()

    def fit(self, states, actions, targets, weights, lr, delta=1.0, rng=None):
        td = np.empty(len(targets))
        for k, (s, a, y, w) in enumerate(zip(self._index(states), actions, targets, weights)):
            td[k] = self.table[s, a] - y
            self.table[s, a] -= lr * w * td[k]
        return float(np.mean(huber(td, delta))), td

    def copy(self):
        clone = TabularQ(*self.table.shape)
        clone.table = self.table.copy()
        return clone

    def load_state(self, other):
        self.table = other.table.copy()

    def checksum(self):
        return float(self.table.sum())


class SumTree(object):
    """Binary tree of priority sums over a fixed number of leaves.

    Stored as a 1-indexed heap: node i has children 2i and 2i+1, leaves sit
    at ``capacity + leaf``.
    """

    def __init__(self, capacity):
        if capacity < 1:
            raise ValidationError("SumTree capacity must be positive")
        self.size = int(capacity)
        self.capacity = 1 << max(int(capacity) - 1, 0).bit_length()
        self.nodes = np.zeros(2 * self.capacity)

    @property
    def total(self):
        return float(self.nodes[1])

    def get(self, leaf):
        return float(self.nodes[self.capacity + leaf])

    def update(self, leaf, priority):
        if not 0 <= leaf < self.size:
            raise IndexError("leaf {} outside [0, {})".format(leaf, self.size))
        if priority < 0.0 or not math.isfinite(priority):
            raise ValidationError("priority must be finite and non-negative, got {}".format(priority))
        node = self.capacity + leaf
        self.nodes[node] = priority
        node //= 2
        while node >= 1:
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1]
            node //= 2

    def find(self, value):
        """Leaf whose cumulative interval contains ``value``, in O(log capacity).

        :rtype: int
        """
        node = 1
        while node < self.capacity:
            left = 2 * node
            if value < self.nodes[left] or self.nodes[left + 1] <= 0.0:
                node = left
            else:
                value -= self.nodes[left]
                node = left + 1
        return min(node - self.capacity, self.size - 1)

    def prefix(self, leaf):
        """Sum of the priorities of leaves before ``leaf``."""
        return float(np.sum(self.nodes[self.capacity:self.capacity + leaf]))


@dataclass
class Transition(object):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool
    priority: float = field(default=1.0)


class PrioritizedReplay(object):
    """Ring buffer of transitions sampled in proportion to priority ** alpha."""

    def __init__(self, capacity, state_dim, alpha=0.6, eps_pri=1e-3):
        self.capacity = int(capacity)
        self.alpha = float(alpha)
        self.eps_pri = float(eps_pri)
        self.tree = SumTree(self.capacity)
        self.states = np.zeros((self.capacity, state_dim))
        self.next_states = np.zeros((self.capacity, state_dim))
        self.actions = np.zeros(self.capacity, dtype=int)
        self.rewards = np.zeros(self.capacity)
        self.dones = np.zeros(self.capacity, dtype=bool)
        self.priorities = np.zeros(self.capacity)
        self.max_priority = 1.0
        self.position = 0
        self.size = 0

    def __len__(self):
        return self.size

    def add(self, transition, priority=None):
        """Stores a transition, by default at the largest priority seen so far."""
        i = self.position
        self.states[i] = transition.state
        self.next_states[i] = transition.next_state
        self.actions[i] = transition.action
        self.rewards[i] = transition.reward
        self.dones[i] = transition.done
        p = max(self.max_priority if priority is None else float(priority), self.eps_pri)
        self.priorities[i] = p
        self.tree.update(i, p ** self.alpha)
        self.position = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def update_priorities(self, leaves, td_errors):
        for leaf, td in zip(leaves, td_errors):
            p = abs(float(td)) + self.eps_pri
            self.priorities[leaf] = p
            self.max_priority = max(self.max_priority, p)
            self.tree.update(int(leaf), p ** self.alpha)

    def batch(self, leaves):
        return Batch(self.states[leaves], self.actions[leaves], self.rewards[leaves],
                     self.next_states[leaves], self.dones[leaves])


def sample_batch(buffer, k, rng, beta=0.4):
    """Stratified proportional sample of ``k`` transitions.

    The total priority mass is cut into ``k`` equal strata and one leaf is
    drawn from each by tree descent. Importance weights
    ``(size * P(i)) ** -beta`` are normalized by their maximum.

    :param buffer: Replay memory.
    :type buffer: :class:`PrioritizedReplay`

    :param k: Batch size.
    :type k: int

    :param rng: Sampling stream.
    :type rng: numpy.random.Generator

    :param beta: Importance-sampling exponent.
    :type beta: float

    :raises BufferUnderflow: when fewer than ``k`` transitions are stored.

    :returns: Batch, importance weights and leaf indices.
    :rtype: tuple
    """
    if len(buffer) < k or k < 1:
        raise BufferUnderflow(len(buffer), k)
    total = buffer.tree.total
    segment = total / k
    values = (np.arange(k) + rng.uniform(size=k)) * segment
    leaves = np.array([buffer.tree.find(v) for v in values], dtype=int)
    probs = np.array([buffer.tree.get(leaf) for leaf in leaves]) / total
    weights = (len(buffer) * probs) ** (-beta)
    weights /= weights.max()
    return buffer.batch(leaves), weights, leaves


@dataclass
class TrainSchedule(object):
    lr: float = 0.001
    gamma: float = 0.95
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_fraction: float = 0.4
    target_update: int = 1000
    target_update_unit: str = 'steps'
    batch_size: int = 32
    warmup: int = 1000
    episodes: int = 500
    beta_start: float = 0.4
    beta_end: float = 1.0
    huber_delta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValidationError("gamma must lie in [0, 1)")
        if self.lr <= 0.0:
            raise ValidationError("learning rate must be positive")

    @classmethod
    def from_config(cls, config, episodes=None):
        d = config.section('dqn')
        return cls(lr=d['lr'], gamma=d['gamma'], eps_start=d['eps_start'], eps_end=d['eps_end'],
                   eps_decay_fraction=d['eps_decay_fraction'], target_update=d['target_update'],
                   target_update_unit=d['target_update_unit'], batch_size=d['batch_size'],
                   warmup=d['warmup'], episodes=config['train_episodes'] if episodes is None else episodes,
                   beta_start=d['beta_start'], beta_end=d['beta_end'], huber_delta=d['huber_delta'])

    def epsilon(self, episode):
        """Exponential decay from start to end over the first decay fraction of episodes."""
        horizon = max(self.eps_decay_fraction * self.episodes, 1.0)
        progress = min(episode / horizon, 1.0)
        if self.eps_end <= 0.0:
            return self.eps_start * (1.0 - progress)
        return self.eps_start * (self.eps_end / self.eps_start) ** progress

    def beta(self, episode):
        progress = min(episode / max(float(self.episodes), 1.0), 1.0)
        return self.beta_start + (self.beta_end - self.beta_start) * progress


def train_step(net, target_net, buffer, schedule, rng, step=0, beta=None):
    """One prioritized TD update of ``net``.

    Targets are ``r + gamma * max_a' Q_target(s', a')``, or ``r`` for
    terminal transitions. Sampled priorities become ``|TD| + eps_pri``.
    With step-based synchronization the target network is overwritten by
    ``net`` whenever ``step`` is a multiple of the update period.

    :returns: The batch loss.
    :rtype: float
    """
    beta = schedule.beta_start if beta is None else beta
    batch, weights, leaves = sample_batch(buffer, schedule.batch_size, rng, beta)
    bootstrap = target_net.predict(batch.next_states).max(axis=1)
    targets = batch.rewards + schedule.gamma * np.where(batch.dones, 0.0, bootstrap)
    loss, td = net.fit(batch.states, batch.actions, targets, weights, schedule.lr,
                       delta=schedule.huber_delta, rng=rng)
    buffer.update_priorities(leaves, td)
    if schedule.target_update_unit == 'steps' and step > 0 and step % schedule.target_update == 0:
        target_net.load_state(net)
    return loss


class DqnAgent(object):
    """Online and target networks, replay memory, schedule and counters."""

    def __init__(self, state_dim, n_actions, schedule, hidden=64, dropout=0.1, buffer_capacity=50000,
                 alpha_pri=0.6, eps_pri=1e-3, seed=0):
        self.rng = np.random.default_rng(seed)
        self.schedule = schedule
        self.net = QNetwork([state_dim, hidden, hidden, n_actions], dropout=dropout, rng=self.rng)
        self.target = self.net.copy()
        self.buffer = PrioritizedReplay(buffer_capacity, state_dim, alpha=alpha_pri, eps_pri=eps_pri)
        self.steps = 0
        self.episodes = 0
        self.losses = []

    @classmethod
    def from_config(cls, config, state_dim, n_actions, seed=0):
        d = config.section('dqn')
        return cls(state_dim, n_actions, TrainSchedule.from_config(config), hidden=d['hidden'],
                   dropout=d['dropout'], buffer_capacity=d['buffer_capacity'], alpha_pri=d['alpha_pri'],
                   eps_pri=d['eps_pri'], seed=seed)

    @property
    def n_actions(self):
        return self.net.n_actions

    def act(self, state, explore=True):
        epsilon = self.schedule.epsilon(self.episodes) if explore else 0.0
        return select_action(self.net, state, epsilon, self.rng)

    def greedy(self, states):
        """Greedy actions for a batch of states, lowest index on ties."""
        return np.argmax(self.net.predict(states), axis=1)

    def observe(self, state, action, reward, next_state, done):
        """Stores a transition and trains once the buffer is warm.

        :returns: The loss, or None during warm-up.
        """
        self.buffer.add(Transition(state, action, reward, next_state, done))
        if len(self.buffer) < self.schedule.warmup:
            return None
        self.steps += 1
        loss = train_step(self.net, self.target, self.buffer, self.schedule, self.rng,
                          step=self.steps, beta=self.schedule.beta(self.episodes))
        self.losses.append(loss)
        return loss

    def end_episode(self):
        self.episodes += 1
        if self.schedule.target_update_unit == 'episodes' and self.episodes % self.schedule.target_update == 0:
            self.target.load_state(self.net)


def save_checkpoint(net, path):
    """Writes layer sizes and every parameter array to a versioned ``.npz``.

    :param net: Network to store.
    :type net: :class:`QNetwork`

    :param path: Output file; written as given, no extension is appended.
    :type path: string
    """
    arrays = {'version': np.array(CHECKPOINT_VERSION), 'sizes': np.array(net.sizes),
              'dropout': np.array(net.dropout)}
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        arrays['w{}'.format(i)] = w
        arrays['b{}'.format(i)] = b
    with open(path, 'wb') as f:
        np.savez(f, **arrays)
    logger.info("Checkpoint written to %s (checksum %.6f)", path, net.checksum())


def load_checkpoint(path):
    """Reads a network written by :func:`save_checkpoint`.

    :raises CheckpointError: on unreadable files or version mismatch.

    :rtype: :class:`QNetwork`
    """
    try:
        with np.load(path) as data:
            version = int(data['version'])
            if version != CHECKPOINT_VERSION:
                raise CheckpointError(path, "version {} != {}".format(version, CHECKPOINT_VERSION))
            net = QNetwork([int(s) for s in data['sizes']], dropout=float(data['dropout']))
            for i in range(len(net.weights)):
                net.weights[i] = data['w{}'.format(i)].copy()
                net.biases[i] = data['b{}'.format(i)].copy()
    except (OSError, KeyError, ValueError) as e:
        raise CheckpointError(path, str(e))
    return net


def value_iteration(transitions, rewards, gamma, tol=1e-12, max_iter=100000):
    """Optimal Q-values of a finite MDP.

    :param transitions: P[s, a, s'].
    :type transitions: numpy.ndarray

    :param rewards: R[s, a].
    :type rewards: numpy.ndarray

    :param gamma: Discount in [0, 1).
    :type gamma: float

    :rtype: numpy.ndarray of shape (states, actions)
    """
    q = np.zeros_like(rewards, dtype=float)
    for _ in range(max_iter):
        updated = rewards + gamma * transitions @ q.max(axis=1)
        if np.max(np.abs(updated - q)) < tol:
            return updated
        q = updated
    return q


@dataclass
class ConvergenceReport(object):
    converged: bool
    episode: int
    learning_start: int
    window: int
    moving_average: np.ndarray
    plateau: float
    tolerance: float

    @property
    def phases(self):
        """Exploration, learning and convergence episode ranges (end exclusive)."""
        n = len(self.moving_average) + self.window - 1
        if not self.converged:
            return {'exploration': (0, self.learning_start), 'learning': (self.learning_start, n),
                    'convergence': None}
        return {'exploration': (0, self.learning_start), 'learning': (self.learning_start, self.episode),
                'convergence': (self.episode, n)}

    def describe(self):
        if not self.converged:
            return "not converged"
        return "converged at episode {}".format(self.episode)


def _tail_trend(tail, floor):
    # least-squares drift across the tail, and whether it stands out of the noise
    x = np.arange(len(tail), dtype=float)
    x -= x.mean()
    sxx = float((x ** 2).sum())
    slope = float((x * (tail - tail.mean())).sum()) / sxx
    resid = tail - tail.mean() - slope * x
    se = math.sqrt(float((resid ** 2).sum()) / (len(tail) - 2) / sxx)
    drift = abs(slope) * (len(tail) - 1)
    return drift > floor and abs(slope) > 3.0 * se


def detect_convergence(rewards, window=50, slope_tol=10.0, plateau_tol=0.02):
    """Locates the learning phases of a per-episode reward history.

    ``ma[e]`` is the mean reward of episodes ``e - window .. e - 1``. The
    plateau is the final moving average and the tolerance is
    ``max(plateau_tol * (max(ma) - min(ma)), 3 * sd_tail / sqrt(window))``,
    independent of the reward level. Convergence is the first ``e`` from
    which ``window`` consecutive averages stay within the tolerance of the
    plateau with a slope below ``slope_tol * tolerance / window`` per
    episode. A series whose last ``window`` rewards (three or more) still
    carry a significant linear trend has no plateau and never converges.
    Learning starts where the average first leaves the tolerance band
    around its initial value.

    :param rewards: One reward per episode.
    :type rewards: array of float

    :raises ValidationError: with fewer than ``2 * window`` episodes.

    :rtype: :class:`ConvergenceReport`
    """
    r = np.asarray(rewards, dtype=float)
    n = len(r)
    if window < 1 or n < 2 * window:
        raise ValidationError("Need at least {} episodes, got {}".format(2 * window, n))
    csum = np.concatenate([[0.0], np.cumsum(r)])
    # ma[j] belongs to episode e = j + window
    ma = (csum[window:] - csum[:-window]) / window
    plateau = ma[-1]
    # differences below rounding noise of the cumulative sums count as zero
    floor = 1e-9 * max(float(np.abs(ma).max()), 1.0)
    tolerance = max(plateau_tol * float(ma.max() - ma.min()),
                    3.0 * float(np.std(r[-window:])) / math.sqrt(window), floor)
    slope_limit = slope_tol * tolerance / window
    departed = np.nonzero(np.abs(ma - ma[0]) > tolerance)[0]

    if window >= 3 and _tail_trend(r[-window:], floor):
        start = int(departed[0]) + window if len(departed) else n
        return ConvergenceReport(False, -1, start, window, ma, plateau, tolerance)

    slope = np.zeros_like(ma)
    slope[1:] = np.abs(np.diff(ma))
    ok = (np.abs(ma - plateau) <= tolerance) & (slope <= slope_limit)

    run = 0
    for j in range(len(ok)):
        run = run + 1 if ok[j] else 0
        if run == window:
            episode = j - window + 1 + window
            start = int(departed[0]) + window if len(departed) and departed[0] + window < episode else episode
            return ConvergenceReport(True, episode, min(start, episode), window, ma, plateau, tolerance)
    start = int(departed[0]) + window if len(departed) else n
    return ConvergenceReport(False, -1, start, window, ma, plateau, tolerance)
