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

"""Channel realization and NOMA link computations: pathloss with Rayleigh
fading, SIC rates, sequence-scaled inter-cell interference and filtered RSRP.

Powers are in watts unless a name ends in ``_db`` or ``_dbm``.
"""

import math
from dataclasses import dataclass

import numpy as np

from hybridnoma import convert
from hybridnoma.exceptions import PowerAllocationError

_SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class ChannelParams(object):
    """Constants of the composite pathloss + Rayleigh channel."""

    l0: float
    d0: float = 1.0
    beta: float = 3.5
    d_min: float = 1.0
    tx_power: float = 40.0
    noise: float = 3.981e-14
    bandwidth: float = 100e6

    @classmethod
    def from_config(cls, config):
        """Derives the constants from a :class:`hybridnoma.config.Config`.

        L0 is the free-space loss at the reference distance and carrier.
        """
        d0 = config['reference_distance_m']
        carrier = config['carrier_ghz'] * 1e9
        l0 = (_SPEED_OF_LIGHT / (4.0 * math.pi * carrier * d0)) ** 2
        return cls(l0=l0,
                   d0=d0,
                   beta=config['pathloss_exponent'],
                   tx_power=float(convert.dbm_to_watts(config['tx_power_dbm'])),
                   noise=float(convert.dbm_to_watts(config['noise_dbm'])),
                   bandwidth=config['bandwidth_mhz'] * 1e6)


@dataclass(frozen=True)
class ChannelState(object):
    """One link realization: h = sqrt(pathloss) * g."""

    distance: float
    fading: complex
    pathloss_linear: float

    @property
    def gain(self):
        return math.sqrt(self.pathloss_linear) * self.fading

    @property
    def power_gain(self):
        return self.pathloss_linear * abs(self.fading) ** 2


@dataclass
class NomaGroup(object):
    """Users sharing one cell's resource, listed in SIC decode order."""

    user_ids: list
    alphas: np.ndarray
    p_total: float

    def __post_init__(self):
        self.user_ids = list(self.user_ids)
        self.alphas = np.asarray(self.alphas, dtype=float)

    @property
    def size(self):
        return len(self.user_ids)

    def alpha_of(self, uid):
        return float(self.alphas[self.user_ids.index(uid)])

    def validate(self):
        """Raises PowerAllocationError unless the power factors lie on the simplex."""
        check_power(self.alphas)


@dataclass(frozen=True)
class LinkBudget(object):
    """One user's link: RSRP in dBm, SINR in dB, interference and noise in W."""

    rsrp: float
    sinr: float
    intra_interference: float
    inter_interference: float
    noise: float


def check_power(alphas, tol=1e-9):
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        return
    total = float(np.sum(alphas))
    if abs(total - 1.0) > tol or np.any(alphas < 0.0) or np.any(alphas > 1.0):
        raise PowerAllocationError(total, alphas)


def pathloss(distance, params):
    """L0 (d / d0) ** -beta with d clamped to d_min. Vectorized over ``distance``."""
    d = np.maximum(np.asarray(distance, dtype=float), params.d_min)
    return params.l0 * (d / params.d0) ** (-params.beta)


def sample_fading(shape, rng):
    """CN(0, 1) samples: real and imaginary parts each with variance 1/2."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def sample_channel(distance, params, rng):
    """Draws one composite channel realization.

    :param distance: Link distance in meters. Values below ``d_min`` are
        clamped.
    :type distance: float

    :param params: Channel constants.
    :type params: :class:`ChannelParams`

    :param rng: The run's seeded generator.
    :type rng: numpy.random.Generator

    :rtype: :class:`ChannelState`
    """
    d = max(float(distance), params.d_min)
    return ChannelState(distance=d,
                        fading=complex(sample_fading((), rng)),
                        pathloss_linear=float(pathloss(d, params)))


def power_profiles(n, count):
    """Preset power-factor vectors for a group of ``n`` users.

    Profile 0 is uniform; later profiles are geometric with ratios falling
    linearly to 0.4, so they grow more skewed toward the first-decoded
    (weakest) users. Every vector sums to 1 and is non-increasing.

    :rtype: numpy.ndarray of shape (count, n)
    """
    if n == 0:
        return np.zeros((count, 0))
    ratios = np.linspace(1.0, 0.4, count) if count > 1 else np.array([1.0])
    profiles = ratios[:, None] ** np.arange(n)[None, :]
    return profiles / profiles.sum(axis=1, keepdims=True)


def sic_order(user_ids, power_gains):
    """SIC decode order: weakest effective channel first, ties by user id.

    The last-decoded (strongest) user cancels every other signal in the group.

    :rtype: list
    """
    keyed = sorted(zip(power_gains, user_ids), key=lambda pair: (pair[0], pair[1]))
    return [uid for _, uid in keyed]


def _gains(channels):
    return np.array([c.power_gain if isinstance(c, ChannelState) else float(c) for c in channels])


def _intra(group, g, seq_gain, sic):
    alphas = group.alphas
    if sic:
        later = np.concatenate([np.cumsum(alphas[::-1])[::-1][1:], [0.0]])
    else:
        later = alphas.sum() - alphas
    return np.asarray(seq_gain, dtype=float) * g * later * group.p_total


def sic_sinr(group, channels, seq_gain, inter, noise, sic=True):
    """Linear SINR of every group member.

    User i sees the power of users decoded after it (``k > i``) as
    intra-group interference, scaled by ``seq_gain[i]``; without SIC every
    other member interferes.

    :rtype: numpy.ndarray
    """
    if group.size == 0:
        return np.zeros(0)
    group.validate()
    g = _gains(channels)
    intra = _intra(group, g, seq_gain, sic)
    return g * group.alphas * group.p_total / (intra + np.asarray(inter, dtype=float) + noise)


def link_budgets(group, channels, seq_gain, inter, noise, rsrp):
    """Per-member breakdown of the SIC link: RSRP, SINR and its interference terms.

    :param rsrp: Serving RSRP per member, dBm.
    :type rsrp: array of float

    :returns: One budget per member, in group order.
    :rtype: list of :class:`LinkBudget`
    """
    if group.size == 0:
        return []
    group.validate()
    g = _gains(channels)
    intra = _intra(group, g, seq_gain, True)
    inter = np.broadcast_to(np.asarray(inter, dtype=float), intra.shape)
    sinr = g * group.alphas * group.p_total / (intra + inter + noise)
    return [LinkBudget(rsrp=float(r), sinr=float(convert.linear_to_db(s)), intra_interference=float(a),
                       inter_interference=float(i), noise=float(noise))
            for r, s, a, i in zip(np.broadcast_to(rsrp, intra.shape), sinr, intra, inter)]


def sic_rate(group, channels, seq_gain, inter, noise):
    """Per-user spectral efficiency with successive interference cancellation.

    R_i = log2(1 + |h_i|^2 a_i P / (s_i sum_{k>i} |h_i|^2 a_k P + I_inter + noise))

    :param group: Members in decode order with their power factors.
    :type group: :class:`NomaGroup`

    :param channels: Serving-link realizations or power gains, in group order.
    :type channels: list of :class:`ChannelState` or floats

    :param seq_gain: Multiplier in (0, 1] on the intra-group residual per user,
        from the sequence cross-correlation.
    :type seq_gain: array of float

    :param inter: Inter-cell interference per user (or one value for all), W.
    :type inter: float or array

    :param noise: Noise power, W.
    :type noise: float

    :raises PowerAllocationError: if the power factors leave the simplex.

    :returns: Rates in bit/s/Hz, in group order.
    :rtype: numpy.ndarray
    """
    return np.log2(1.0 + sic_sinr(group, channels, seq_gain, inter, noise, sic=True))


def no_sic_rate(group, channels, seq_gain, inter, noise):
    """Reference evaluator that treats all other group members as interference."""
    return np.log2(1.0 + sic_sinr(group, channels, seq_gain, inter, noise, sic=False))


def cell_loading(rho2, cell_sequences, cell_alphas):
    """Per-cell, per-victim-code aggregate rho^2 weighting.

    Entry (l, s) is sum_k a_{l,k} rho2[s, seq_{l,k}]: the fraction of cell
    l's transmit power that leaks into a receiver despreading with code s.

    :rtype: numpy.ndarray of shape (n_cells, n_codes)
    """
    weights = np.zeros((len(cell_sequences), rho2.shape[0]))
    for cell, (seqs, alphas) in enumerate(zip(cell_sequences, cell_alphas)):
        if len(seqs):
            weights[cell] = rho2[:, np.asarray(seqs, dtype=int)] @ np.asarray(alphas, dtype=float)
    return weights


def effective_interference(pathloss_row, serving_cell, victim_seq, rho2, cell_sequences, cell_alphas, p_total,
                           loading=None):
    """Inter-cell interference at one receiver, scaled by code cross-correlation.

    Sum over cells l other than the serving cell of
    ``pathloss[l] * P * sum_k a_{l,k} rho2[victim_seq, seq_{l,k}]``.

    :param pathloss_row: Linear pathloss from every cell to the victim.
    :type pathloss_row: array of float

    :param serving_cell: Index of the victim's serving cell (or handover
        target); its own transmission is excluded.
    :type serving_cell: int

    :param victim_seq: Codebook index of the victim's sequence.
    :type victim_seq: int

    :param rho2: Codebook rho^2 matrix, see :func:`hybridnoma.seqlib.rho2_matrix`.
    :type rho2: numpy.ndarray

    :param cell_sequences: Codebook indices in use, per cell.
    :type cell_sequences: list of lists

    :param cell_alphas: Power factors matching ``cell_sequences``.
    :type cell_alphas: list of arrays

    :param p_total: Per-cell transmit power, W.
    :type p_total: float

    :param loading: Precomputed :func:`cell_loading` for the same arguments,
        to share across many receivers in one tick.
    :type loading: numpy.ndarray

    :rtype: float
    """
    if loading is None:
        loading = cell_loading(rho2, cell_sequences, cell_alphas)
    terms = np.asarray(pathloss_row, dtype=float) * loading[:, victim_seq] * p_total
    terms[serving_cell] = 0.0
    return float(np.sum(terms))


def rsrp_dbm(pathloss_linear, fading_power, p_ref):
    """10 log10(pathloss * smoothed |g|^2 * P_ref) + 30. Vectorized."""
    return convert.watts_to_dbm(np.asarray(pathloss_linear) * np.asarray(fading_power) * p_ref)


class RsrpFilter(object):
    """Exponential L3 filter on fading power: F = (1 - a) F + a M."""

    def __init__(self, coefficient=0.5):
        if not 0.0 < coefficient <= 1.0:
            raise ValueError("Filter coefficient must lie in (0, 1]")
        self.coefficient = coefficient
        self.state = None

    def update(self, sample):
        sample = np.asarray(sample, dtype=float)
        if self.state is None:
            self.state = sample.copy()
        else:
            self.state = (1.0 - self.coefficient) * self.state + self.coefficient * sample
        return self.state

    def reset(self):
        self.state = None


def sinr_db(sinr_linear):
    return convert.linear_to_db(sinr_linear)


def throughput_mbps(rate, bandwidth, users_in_cell):
    """Spectral efficiency times an equal share of the bandwidth, in Mbps."""
    return np.asarray(rate, dtype=float) * bandwidth / np.maximum(users_in_cell, 1) / 1e6
