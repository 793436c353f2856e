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

"""Multi-cell network replica: hexagonal topology, random-waypoint mobility,
NOMA group membership, the A3 trigger with time-to-trigger, and handover
execution with exactly-once outcome accounting.
"""

import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from hybridnoma import convert, phy
from hybridnoma.exceptions import HandoverError, ValidationError

logger = logging.getLogger(__name__)

# Axial offsets of the six neighbours, walked in ring order.
_HEX_DIRECTIONS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@dataclass(frozen=True)
class Cell(object):
    cell_id: int
    x: float
    y: float
    q: int
    r: int


@dataclass(frozen=True)
class Bounds(object):
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def contains(self, point):
        return self.xmin <= point[0] <= self.xmax and self.ymin <= point[1] <= self.ymax

    def draw(self, rng):
        return np.array([rng.uniform(self.xmin, self.xmax), rng.uniform(self.ymin, self.ymax)])


@dataclass
class CellGrid(object):
    cells: list
    isd: float
    rings: int

    @property
    def positions(self):
        return np.array([[c.x, c.y] for c in self.cells])

    @property
    def bounds(self):
        pos = self.positions
        # circumradius of a cell
        half = self.isd / math.sqrt(3.0)
        return Bounds(pos[:, 0].min() - half, pos[:, 0].max() + half,
                      pos[:, 1].min() - half, pos[:, 1].max() + half)

    def __len__(self):
        return len(self.cells)


def build_grid(rings, isd):
    """Hexagonal layout: 7 cells for one ring, 19 for two.

    Axial coordinates (q, r) map to meters as
    ``x = isd (q + r / 2)``, ``y = isd (sqrt(3) / 2) r``, so adjacent centers
    are exactly ``isd`` apart.

    :param rings: 1 or 2.
    :type rings: int

    :param isd: Inter-site distance, meters.
    :type isd: float

    :raises ValidationError: for other ring counts.

    :rtype: :class:`CellGrid`
    """
    if rings not in (1, 2):
        raise ValidationError("rings must be 1 or 2, got {}".format(rings))
    axial = [(0, 0)]
    for radius in range(1, rings + 1):
        q, r = _HEX_DIRECTIONS[4][0] * radius, _HEX_DIRECTIONS[4][1] * radius
        for side in range(6):
            for _ in range(radius):
                axial.append((q, r))
                q += _HEX_DIRECTIONS[side][0]
                r += _HEX_DIRECTIONS[side][1]
    cells = [Cell(i, isd * (q + r / 2.0), isd * math.sqrt(3.0) / 2.0 * r, q, r)
             for i, (q, r) in enumerate(axial)]
    return CellGrid(cells=cells, isd=float(isd), rings=rings)


@dataclass
class HandoverInProgress(object):
    target: int
    started: int
    margin_db: float
    sinrs: list = field(default_factory=list)


@dataclass
class UserState(object):
    """Mobile user: kinematics, attachment and handover timers."""

    uid: int
    position: np.ndarray
    speed_kmh: float
    heading: float
    waypoint: np.ndarray
    serving: int
    sequence: int = 0
    alpha: float = 0.0
    qos_ok: bool = False
    margin_db: float = 3.0
    a3_target: Optional[int] = None
    a3_count: int = 0
    pending: Optional[HandoverInProgress] = None

    def __post_init__(self):
        if not 3.0 <= self.speed_kmh <= 120.0:
            raise ValidationError("User speed must lie in [3, 120] km/h, got {}".format(self.speed_kmh))


def step_mobility(user, dt, bounds, rng):
    """Random-waypoint step at the user's fixed speed.

    A user that reaches its waypoint stops there for the rest of the step
    and draws a new waypoint uniformly in ``bounds``.

    :param user: Current state.
    :type user: :class:`UserState`

    :param dt: Step length, seconds.
    :type dt: float

    :param bounds: Area the waypoints are drawn from.
    :type bounds: :class:`Bounds`

    :param rng: Mobility stream of the replica.
    :type rng: numpy.random.Generator

    :rtype: :class:`UserState`
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    step = float(convert.kmh_to_ms(user.speed_kmh)) * dt
    offset = user.waypoint - user.position
    remaining = float(np.hypot(offset[0], offset[1]))
    if remaining > step:
        position = user.position + step * np.array([math.cos(user.heading), math.sin(user.heading)])
        return replace(user, position=position)
    position = user.waypoint.copy()
    waypoint = bounds.draw(rng)
    delta = waypoint - position
    heading = math.atan2(delta[1], delta[0])
    return replace(user, position=position, waypoint=waypoint, heading=heading)


def a3_condition(rsrp_target, rsrp_serving, margin_db):
    """RSRP_target > RSRP_serving + margin."""
    return rsrp_target > rsrp_serving + margin_db


def evaluate_a3(user, rsrp_row, ttt_ticks, margin_db=None):
    """Advances the user's A3 time-to-trigger timer by one tick.

    The candidate is the strongest non-serving cell. The timer restarts when
    the condition fails or the candidate changes.

    :param user: Updated in place (``a3_target``, ``a3_count``).
    :type user: :class:`UserState`

    :param rsrp_row: This tick's RSRP from every cell, dBm.
    :type rsrp_row: array of float

    :param ttt_ticks: Consecutive ticks the condition must hold.
    :type ttt_ticks: int

    :param margin_db: Handover margin; defaults to the user's own.
    :type margin_db: float

    :returns: Target cell when the trigger fires, else None.
    :rtype: int or None
    """
    margin = user.margin_db if margin_db is None else margin_db
    masked = np.array(rsrp_row, dtype=float)
    masked[user.serving] = -np.inf
    target = int(np.argmax(masked))
    if not a3_condition(masked[target], rsrp_row[user.serving], margin):
        user.a3_target, user.a3_count = None, 0
        return None
    if user.a3_target == target:
        user.a3_count += 1
    else:
        user.a3_target, user.a3_count = target, 1
    if user.a3_count >= ttt_ticks:
        user.a3_target, user.a3_count = None, 0
        return target
    return None


class HandoverOutcome(enum.Enum):
    SUCCESS = 'success'
    RLF = 'rlf'
    PINGPONG = 'pingpong'


@dataclass
class HandoverRecord(object):
    tick: int
    user: int
    source: int
    target: int
    margin_db: float
    outcome: Optional[HandoverOutcome] = None
    completed: Optional[int] = None
    blocked: bool = False

    def finalize(self, outcome):
        assert self.outcome is None, "outcome already assigned"
        self.outcome = outcome


def execute_handover(user, target, sinr_window_db, tick, gamma_fail_db, ledger=None):
    """Resolves one handover attempt after its execution window.

    The attempt fails with radio-link failure when the SINR towards the
    target stayed below ``gamma_fail_db`` for the whole window. Otherwise
    it completes at ``tick``; with a ledger the outcome stays open until
    the ping-pong window has passed, without one it is a success.

    :param user: The user, still attached to its source cell.
    :type user: :class:`UserState`

    :param target: Target cell.
    :type target: int

    :param sinr_window_db: Target-link SINR for each execution tick.
    :type sinr_window_db: list of float

    :param tick: Tick at which the execution window closed.
    :type tick: int

    :param gamma_fail_db: RLF threshold.
    :type gamma_fail_db: float

    :param ledger: Receives the record for ping-pong tracking.
    :type ledger: :class:`HandoverLedger`

    :raises HandoverError: when ``target`` is the serving cell.

    :rtype: :class:`HandoverRecord`
    """
    if target == user.serving:
        raise HandoverError(user.serving, target)
    started = user.pending.started if user.pending is not None else tick
    margin = user.pending.margin_db if user.pending is not None else user.margin_db
    record = HandoverRecord(tick=started, user=user.uid, source=user.serving, target=target, margin_db=margin)
    if len(sinr_window_db) and all(s < gamma_fail_db for s in sinr_window_db):
        record.finalize(HandoverOutcome.RLF)
    else:
        record.completed = tick
        if ledger is None:
            record.finalize(HandoverOutcome.SUCCESS)
    if ledger is not None:
        ledger.submit(record)
    return record


class HandoverLedger(object):
    """Collects handover attempts and assigns each exactly one outcome.

    Completed handovers stay open for ``t_pingpong`` ticks; a return to the
    source cell within that window turns the earlier attempt into a
    ping-pong failure.
    """

    def __init__(self, t_pingpong):
        self.t_pingpong = t_pingpong
        self.records = []
        self.counts = Counter()
        self._open = {}
        self._fresh = []

    def _close(self, record, outcome):
        record.finalize(outcome)
        self.counts[outcome] += 1
        self._fresh.append(record)
        logger.debug("Handover user=%d %d->%d: %s", record.user, record.source, record.target, outcome.value)

    def submit(self, record):
        self.records.append(record)
        previous = self._open.pop(record.user, None)
        if record.outcome is not None:
            self.counts[record.outcome] += 1
            self._fresh.append(record)
            if previous is not None:
                self._open[record.user] = previous
            return
        if previous is not None:
            returned = (record.target == previous.source
                        and record.tick - previous.completed <= self.t_pingpong)
            self._close(previous, HandoverOutcome.PINGPONG if returned else HandoverOutcome.SUCCESS)
        self._open[record.user] = record

    def expire(self, tick):
        """Closes every open attempt whose ping-pong window has passed."""
        for uid in sorted(self._open):
            record = self._open[uid]
            if tick - record.completed > self.t_pingpong:
                del self._open[uid]
                self._close(record, HandoverOutcome.SUCCESS)

    def close(self):
        """Episode end: every open attempt becomes a success."""
        for uid in sorted(self._open):
            self._close(self._open[uid], HandoverOutcome.SUCCESS)
        self._open.clear()

    def drain(self):
        """Records finalized since the previous call."""
        fresh, self._fresh = self._fresh, []
        return fresh

    @property
    def attempts(self):
        return len(self.records)

    @property
    def successes(self):
        return self.counts[HandoverOutcome.SUCCESS]

    @property
    def failures(self):
        return self.counts[HandoverOutcome.RLF] + self.counts[HandoverOutcome.PINGPONG]

    def success_rate(self):
        """Successes over finalized attempts in percent, None without attempts."""
        finalized = sum(self.counts.values())
        if finalized == 0:
            return None
        return 100.0 * self.successes / finalized

    def failure_probability(self):
        finalized = sum(self.counts.values())
        return None if finalized == 0 else self.failures / float(finalized)


def rebalance_group(group, arriving, leaving, power_gains, max_size=8, min_size=4):
    """Applies membership changes to a cell's NOMA group.

    Departing users are removed, arrivals are admitted while the group has
    fewer than ``max_size`` members and blocked otherwise. Power factors are
    renormalized by their sum and re-sorted so that the first-decoded users
    hold the largest factors; the decode order is recomputed from
    ``power_gains``.

    Departures are never refused, so a group can shrink under ``min_size``;
    that is logged and the group is kept as is.

    :param group: Current group.
    :type group: :class:`hybridnoma.phy.NomaGroup`

    :param arriving: Users asking to join.
    :type arriving: list of int

    :param leaving: Users leaving.
    :type leaving: list of int

    :param power_gains: Effective channel gain per user id, for every member.
    :type power_gains: dict

    :param max_size: Admission limit.
    :type max_size: int

    :param min_size: Nominal lower group size.
    :type min_size: int

    :returns: The new group and the blocked user ids.
    :rtype: tuple of (:class:`hybridnoma.phy.NomaGroup`, list)
    """
    leaving = set(leaving)
    kept = [(uid, a) for uid, a in zip(group.user_ids, group.alphas) if uid not in leaving]
    members = [uid for uid, _ in kept]
    alphas = [a for _, a in kept]
    blocked = []
    for uid in arriving:
        if uid in members:
            continue
        if len(members) >= max_size:
            blocked.append(uid)
            continue
        members.append(uid)
        alphas.append(1.0 / (len(members)))
    if len(kept) < group.size and len(members) < min_size:
        logger.debug("Group shrank to %d members, under the nominal %d", len(members), min_size)
    if not members:
        return phy.NomaGroup([], np.zeros(0), group.p_total), blocked

    alphas = np.asarray(alphas, dtype=float)
    alphas = alphas / alphas.sum() if alphas.sum() > 0 else np.full(len(members), 1.0 / len(members))
    order = phy.sic_order(members, [power_gains[uid] for uid in members])
    new = phy.NomaGroup(order, np.sort(alphas)[::-1], group.p_total)
    new.validate()
    return new, blocked


def round_robin_assigner(codebook_size):
    """Fixed assignment: codes handed out in turn at attach."""
    state = {'next': 0}

    def assign(cell, in_use):
        index = state['next'] % codebook_size
        state['next'] += 1
        return index

    return assign


def greedy_assigner(rho2):
    """Attach-time assignment minimizing the worst rho^2 against the cell's codes."""

    def assign(cell, in_use):
        if not in_use:
            return 0
        worst = np.max(rho2[:, list(in_use)], axis=1)
        return int(np.argmin(worst))

    return assign


@dataclass
class TickReport(object):
    """Per-user quantities of one simulated tick, indexed by user id."""

    tick: int
    sinr_db: np.ndarray
    rsrp_serving_dbm: np.ndarray
    interference_dbm: np.ndarray
    rate: np.ndarray
    throughput_mbps: np.ndarray
    qos_ok: np.ndarray
    load: np.ndarray
    alpha: np.ndarray
    group_rate: np.ndarray
    group_size: np.ndarray
    group_qos: np.ndarray
    finalized: list
    budgets: dict = field(default_factory=dict)


class Network(object):
    """One deterministic simulation replica.

    Mobility, fading and placement draw from separate streams spawned from
    the replica seed, so two policies run on the same seed see the same
    user trajectories.
    """

    def __init__(self, config, codebook_rho2, assigner, seed):
        """
        :param config: Scenario configuration.
        :type config: :class:`hybridnoma.config.Config`

        :param codebook_rho2: rho^2 matrix of the policy's codebook.
        :type codebook_rho2: numpy.ndarray

        :param assigner: ``assign(cell, codes_in_use) -> code`` used at attach.
        :type assigner: callable

        :param seed: Replica seed (int or numpy SeedSequence).
        """
        self.config = config
        self.params = phy.ChannelParams.from_config(config)
        self.grid = build_grid(config['rings'], config['isd_m'])
        self.bounds = self.grid.bounds
        self.rho2 = np.asarray(codebook_rho2, dtype=float)
        self.n_codes = self.rho2.shape[0]
        self.assigner = assigner
        self.dt = config['tick_ms'] / 1000.0
        self.ledger = HandoverLedger(config['t_pingpong_ticks'])
        self.filter = phy.RsrpFilter(config['rsrp_filter'])
        self.profiles = {}

        sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        place, move, fade = sequence.spawn(3)
        self._place_rng = np.random.default_rng(place)
        self._move_rng = np.random.default_rng(move)
        self._fade_rng = np.random.default_rng(fade)

        n_cells = len(self.grid)
        self.cell_profile = [config['baseline_profile']] * n_cells
        self.groups = [phy.NomaGroup([], np.zeros(0), self.params.tx_power) for _ in range(n_cells)]
        self.users = []
        self.tick_count = 0
        self._place_users()
        self._pathloss = None
        self._fading = None
        self._measure()
        self.attach_all()

    # -- setup ------------------------------------------------------------

    def _place_users(self):
        cfg = self.config
        radius = self.grid.isd / math.sqrt(3.0)
        uid = 0
        for cell in self.grid.cells:
            for _ in range(cfg['users_per_cell']):
                r = radius * math.sqrt(self._place_rng.uniform())
                theta = self._place_rng.uniform(0.0, 2.0 * math.pi)
                position = np.array([cell.x + r * math.cos(theta), cell.y + r * math.sin(theta)])
                waypoint = self.bounds.draw(self._place_rng)
                delta = waypoint - position
                speed = self._place_rng.uniform(cfg['velocity_kmh_min'], cfg['velocity_kmh_max'])
                self.users.append(UserState(uid=uid, position=position, speed_kmh=speed,
                                            heading=math.atan2(delta[1], delta[0]), waypoint=waypoint,
                                            serving=cell.cell_id, margin_db=cfg['ho_margin_db']))
                uid += 1

    def _distances(self):
        positions = np.array([u.position for u in self.users])
        offsets = positions[:, None, :] - self.grid.positions[None, :, :]
        return np.hypot(offsets[..., 0], offsets[..., 1])

    def _measure(self):
        """Resamples fading and updates the filtered RSRP matrix."""
        self._pathloss = phy.pathloss(self._distances(), self.params)
        self._fading = phy.sample_fading(self._pathloss.shape, self._fade_rng)
        smoothed = self.filter.update(np.abs(self._fading) ** 2)
        self.rsrp = phy.rsrp_dbm(self._pathloss, smoothed, self.params.tx_power)

    def attach_all(self):
        """Initial attachment of every user to its placement cell."""
        for user in self.users:
            self._join(user, user.serving)

    # -- group membership ---------------------------------------------------

    def _power_gains(self, cell):
        return {u.uid: float(self._pathloss[u.uid, cell] * abs(self._fading[u.uid, cell]) ** 2)
                for u in self.users}

    def _join(self, user, cell):
        in_use = [self.users[uid].sequence for uid in self.groups[cell].user_ids]
        group, blocked = rebalance_group(self.groups[cell], [user.uid], [], self._power_gains(cell),
                                         self.config['max_users_per_cell'])
        if blocked:
            return False
        self.groups[cell] = group
        user.serving = cell
        user.sequence = self.assigner(cell, in_use)
        return True

    def _leave(self, user):
        cell = user.serving
        self.groups[cell], _ = rebalance_group(self.groups[cell], [], [user.uid], self._power_gains(cell),
                                               self.config['max_users_per_cell'])

    # -- control ------------------------------------------------------------

    def apply_control(self, uid, sequence=None, profile=None, margin_step=0):
        """Applies one user's control decision before the next tick."""
        user = self.users[uid]
        if sequence is not None:
            user.sequence = int(sequence) % self.n_codes
        if profile is not None:
            self.cell_profile[user.serving] = int(profile)
        if margin_step and math.isfinite(user.margin_db):
            lo, hi = self.config['margin_min_db'], self.config['margin_max_db']
            user.margin_db = float(min(max(user.margin_db + margin_step, lo), hi))

    # -- one tick -------------------------------------------------------------

    def _target_sinr_db(self, user, target, sequences, alphas, loading):
        signal = self._pathloss[user.uid, target] * abs(self._fading[user.uid, target]) ** 2 * self.params.tx_power
        inter = phy.effective_interference(self._pathloss[user.uid], target, user.sequence, self.rho2,
                                           sequences, alphas, self.params.tx_power, loading=loading)
        return float(convert.linear_to_db(signal / (inter + self.params.noise)))

    def _alphas_for(self, cell):
        group = self.groups[cell]
        if group.size == 0:
            return group
        count = self.config['action.power_profiles']
        key = (group.size, count)
        if key not in self.profiles:
            self.profiles[key] = phy.power_profiles(group.size, count)
        gains = self._power_gains_for(group.user_ids, cell)
        order = phy.sic_order(group.user_ids, gains)
        alphas = self.profiles[key][self.cell_profile[cell]]
        return phy.NomaGroup(order, alphas, self.params.tx_power)

    def _power_gains_for(self, uids, cell):
        return [float(self._pathloss[uid, cell] * abs(self._fading[uid, cell]) ** 2) for uid in uids]

    def tick(self):
        """Advances the replica by one tick.

        Order: mobility, fading and RSRP, handover execution and A3,
        group rates and interference, ping-pong expiry.

        :rtype: :class:`TickReport`
        """
        cfg = self.config
        self.tick_count += 1
        tick = self.tick_count
        self.users = [step_mobility(u, self.dt, self.bounds, self._move_rng) for u in self.users]
        self._measure()

        self.groups = [self._alphas_for(c) for c in range(len(self.grid))]
        sequences = [[self.users[uid].sequence for uid in g.user_ids] for g in self.groups]
        alphas = [g.alphas for g in self.groups]
        loading = phy.cell_loading(self.rho2, sequences, alphas)

        for user in self.users:
            if user.pending is not None:
                pending = user.pending
                pending.sinrs.append(self._target_sinr_db(user, pending.target, sequences, alphas, loading))
                if len(pending.sinrs) >= cfg['t_exec_ticks']:
                    self._complete_handover(user, tick)
                continue
            target = evaluate_a3(user, self.rsrp[user.uid], cfg['ttt_ticks'])
            if target is not None:
                user.pending = HandoverInProgress(target=target, started=tick, margin_db=user.margin_db)

        self.groups = [self._alphas_for(c) for c in range(len(self.grid))]
        report = self._link_report(tick)
        self.ledger.expire(tick)
        report.finalized = self.ledger.drain()
        return report

    def _complete_handover(self, user, tick):
        pending = user.pending
        if self.groups[pending.target].size >= self.config['max_users_per_cell']:
            # Admission blocked at the target counts as a failed attempt.
            record = HandoverRecord(tick=pending.started, user=user.uid, source=user.serving,
                                    target=pending.target, margin_db=pending.margin_db, blocked=True)
            record.finalize(HandoverOutcome.RLF)
            self.ledger.submit(record)
        else:
            record = execute_handover(user, pending.target, pending.sinrs, tick,
                                      self.config['gamma_fail_db'], ledger=self.ledger)
            if record.outcome is None:
                self._leave(user)
                self._join(user, pending.target)
        user.pending = None
        return record

    def _link_report(self, tick):
        cfg = self.config
        n = len(self.users)
        p = self.params.tx_power
        sequences = [[self.users[uid].sequence for uid in g.user_ids] for g in self.groups]
        alphas = [g.alphas for g in self.groups]
        loading = phy.cell_loading(self.rho2, sequences, alphas)

        sinr = np.zeros(n)
        rate = np.zeros(n)
        inter = np.zeros(n)
        alpha = np.zeros(n)
        load = np.zeros(n)
        group_rate = np.zeros(n)
        group_size = np.zeros(n, dtype=int)
        group_qos = np.zeros(n)
        budgets = {}
        floor = 1.0 / self.n_codes ** 2
        for cell, group in enumerate(self.groups):
            if group.size == 0:
                continue
            uids = group.user_ids
            seqs = np.array(sequences[cell])
            cell_inter = np.empty(group.size)
            for k, uid in enumerate(uids):
                cell_inter[k] = phy.effective_interference(self._pathloss[uid], cell, seqs[k], self.rho2, sequences,
                                                           alphas, p, loading=loading)
            if group.size > 1:
                pair = self.rho2[np.ix_(seqs, seqs)].copy()
                np.fill_diagonal(pair, 0.0)
                seq_gain = np.clip(pair.max(axis=1), floor, 1.0)
            else:
                seq_gain = np.ones(1)
            gains = self._power_gains_for(uids, cell)
            cell_sinr = phy.sic_sinr(group, gains, seq_gain, cell_inter, self.params.noise)
            cell_budgets = phy.link_budgets(group, gains, seq_gain, cell_inter, self.params.noise,
                                            self.rsrp[uids, cell])
            cell_rate = np.log2(1.0 + cell_sinr)
            ok = cell_rate >= cfg['qos_min_rate']
            for k, uid in enumerate(uids):
                sinr[uid] = cell_sinr[k]
                rate[uid] = cell_rate[k]
                inter[uid] = cell_inter[k]
                alpha[uid] = group.alphas[k]
                load[uid] = group.size
                group_rate[uid] = cell_rate.sum()
                group_size[uid] = group.size
                group_qos[uid] = ok.mean()
                budgets[uid] = cell_budgets[k]
                self.users[uid].alpha = float(group.alphas[k])
                self.users[uid].qos_ok = bool(ok[k])

        serving = np.array([u.serving for u in self.users])
        return TickReport(
            tick=tick,
            sinr_db=convert.linear_to_db(np.maximum(sinr, 1e-30)),
            rsrp_serving_dbm=self.rsrp[np.arange(n), serving],
            interference_dbm=convert.watts_to_dbm(np.maximum(inter, 1e-30)),
            rate=rate,
            throughput_mbps=phy.throughput_mbps(rate, self.params.bandwidth, load),
            qos_ok=np.array([u.qos_ok for u in self.users]),
            load=load,
            alpha=alpha,
            group_rate=group_rate,
            group_size=group_size,
            group_qos=group_qos,
            finalized=[],
            budgets=budgets)

    def observe(self):
        """Link report for the current state without advancing time."""
        return self._link_report(self.tick_count)

    def check_membership(self):
        """Every user sits in exactly one group, the one of its serving cell."""
        seen = Counter(uid for g in self.groups for uid in g.user_ids)
        assert all(seen[u.uid] == 1 for u in self.users), "user missing or double-counted"
        assert all(u.uid in self.groups[u.serving].user_ids for u in self.users), "serving cell mismatch"

    def close(self):
        self.ledger.close()
        return self.ledger.drain()
