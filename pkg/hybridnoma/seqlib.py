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

"""Spreading-sequence library: m-sequences, Gold, Walsh-Hadamard, small-set
Kasami and hybrid Gold-Walsh codes, with periodic correlation and PAPR.

Chips are ``int8`` arrays over {+1, -1}. LFSR bit 0 maps to chip +1 and bit 1
to chip -1.
"""

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import hadamard

from hybridnoma.exceptions import SequenceError

logger = logging.getLogger(__name__)

# Preferred pairs of feedback polynomials, as exponent sets (constant term implied).
PREFERRED_PAIRS = {
    5: ((5, 2), (5, 4, 3, 2)),
    6: ((6, 1), (6, 5, 2, 1)),
    7: ((7, 3), (7, 3, 2, 1)),
}

# One primitive polynomial per degree, used for single m-sequences and Kasami sets.
PRIMITIVE_TAPS = {
    3: (3, 2),
    4: (4, 3),
    5: (5, 2),
    6: (6, 1),
    7: (7, 3),
    8: (8, 4, 3, 2),
    9: (9, 4),
    10: (10, 3),
}


class Family(enum.Enum):
    MSEQ = 'mseq'
    GOLD = 'gold'
    WALSH = 'walsh'
    KASAMI = 'kasami'
    HYBRID = 'hybrid'


@dataclass(eq=False)
class ChipSequence(object):
    """A +/-1 spreading code with its family metadata."""

    chips: np.ndarray
    family: Family
    index: int = 0

    def __post_init__(self):
        chips = np.asarray(self.chips)
        if chips.ndim != 1 or chips.size == 0:
            raise SequenceError("Chip sequence must be a non-empty vector")
        if not np.all(np.abs(chips) == 1):
            raise SequenceError("Chips must be +1 or -1", self.family.value)
        if self.family is Family.WALSH and chips.size & (chips.size - 1):
            raise SequenceError("Walsh length must be a power of 2", chips.size)
        self.chips = chips.astype(np.int8)

    @property
    def length(self):
        return int(self.chips.size)

    def __eq__(self, other):
        return (isinstance(other, ChipSequence) and self.family is other.family
                and self.index == other.index and np.array_equal(self.chips, other.chips))

    def __repr__(self):
        return "ChipSequence({}, length={}, index={})".format(self.family.value, self.length, self.index)


@dataclass(frozen=True)
class LfsrSpec(object):
    """Fibonacci LFSR: degree, feedback exponents and nonzero seed state."""

    degree: int
    taps: tuple
    seed: int = 1


@dataclass
class CorrelationProfile(object):
    """Periodic correlation values indexed by lag."""

    values: np.ndarray
    is_auto: bool = False
    peak_offzero: int = field(init=False, default=0)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        self.values = values
        self.peak_offzero = int(np.max(np.abs(values[1:]))) if values.size > 1 else 0

    @property
    def length(self):
        return int(self.values.size)


def _to_chips(bits):
    return (1 - 2 * np.asarray(bits, dtype=np.int8)).astype(np.int8)


def _lfsr_bits(degree, taps, seed, count):
    """Runs the recurrence a[n] = XOR of a[n - t] for t in taps."""
    state = [(seed >> i) & 1 for i in range(degree)]
    bits = list(state)
    for n in range(degree, count):
        bit = 0
        for t in taps:
            bit ^= bits[n - t]
        bits.append(bit)
    return bits[:count]


def _lfsr_period(degree, taps, seed):
    """Number of steps until the register state first repeats the seed."""
    window = [(seed >> i) & 1 for i in range(degree)]
    start = tuple(window)
    for step in range(1, 2 ** degree + 1):
        bit = 0
        for t in taps:
            bit ^= window[degree - t]
        window = window[1:] + [bit]
        if tuple(window) == start:
            return step
    return None


def generate_msequence(spec):
    """Generates one period of the m-sequence of an LFSR spec.

    :param spec: Degree in [3, 10], feedback exponents (the degree itself must
        be among them) and a nonzero seed below ``2 ** degree``.
    :type spec: :class:`LfsrSpec`

    :raises SequenceError: if the seed or degree is invalid or the polynomial
        is not primitive (period shorter than ``2 ** degree - 1``).

    :rtype: :class:`ChipSequence`
    """
    m = spec.degree
    if not 3 <= m <= 10:
        raise SequenceError("Unsupported LFSR degree", m)
    taps = tuple(sorted(set(spec.taps), reverse=True))
    if not taps or taps[0] != m or taps[-1] < 1:
        raise SequenceError("Taps must include the degree and lie in [1, degree]", taps)
    if not 0 < spec.seed < 2 ** m:
        raise SequenceError("LFSR seed must be nonzero and fit the register", spec.seed)

    n = 2 ** m - 1
    period = _lfsr_period(m, taps, spec.seed)
    if period != n:
        logger.debug("Rejected LFSR taps %s: period %s", taps, period)
        raise SequenceError("Feedback polynomial is not primitive",
                            "period {} != {}".format(period, n))
    return ChipSequence(_to_chips(_lfsr_bits(m, taps, spec.seed, n)), Family.MSEQ, spec.seed)


def generate_gold_family(m):
    """Generates the Gold family of a supported degree.

    Index 0 and 1 are the preferred-pair m-sequences ``u`` and ``v``; index
    ``2 + k`` is ``u`` times ``v`` cyclically shifted by ``k`` chips.

    :param m: LFSR degree, one of 5, 6, 7.
    :type m: int

    :raises SequenceError: when no preferred pair is tabulated for ``m``.

    :rtype: list of :class:`ChipSequence`
    """
    if m not in PREFERRED_PAIRS:
        raise SequenceError("No preferred pair for degree", m)
    taps_u, taps_v = PREFERRED_PAIRS[m]
    u = generate_msequence(LfsrSpec(m, taps_u)).chips
    v = generate_msequence(LfsrSpec(m, taps_v)).chips
    family = [ChipSequence(u, Family.GOLD, 0), ChipSequence(v, Family.GOLD, 1)]
    for k in range(u.size):
        family.append(ChipSequence(u * np.roll(v, -k), Family.GOLD, 2 + k))
    logger.debug("Built Gold family m=%d: %d sequences of length %d", m, len(family), u.size)
    return family


def gold_bound(m):
    """t(m) = 2 ** floor((m + 2) / 2) + 1, the Gold cross-correlation bound."""
    return 2 ** ((m + 2) // 2) + 1


def generate_walsh_family(order):
    """Rows of the Sylvester Hadamard matrix of the given order.

    :param order: Power of 2 in [4, 256].
    :type order: int

    :raises SequenceError: for other orders.

    :rtype: list of :class:`ChipSequence`
    """
    if not isinstance(order, (int, np.integer)) or order < 4 or order > 256 or order & (order - 1):
        raise SequenceError("Walsh order must be a power of 2 in [4, 256]", order)
    matrix = hadamard(int(order), dtype=np.int8)
    return [ChipSequence(row, Family.WALSH, i) for i, row in enumerate(matrix)]


def generate_kasami_small(m):
    """Small Kasami set of ``2 ** (m / 2)`` sequences of length ``2 ** m - 1``.

    Index 0 is the m-sequence ``u``; index ``1 + k`` is ``u`` times the
    decimated sequence ``w[n] = u[q n]``, ``q = 2 ** (m / 2) + 1``, shifted by
    ``k`` chips.

    :param m: Even degree, 6 or 8.
    :type m: int

    :raises SequenceError: for odd or unsupported ``m``.

    :rtype: list of :class:`ChipSequence`
    """
    if m % 2:
        raise SequenceError("Small Kasami sets need an even degree", m)
    if m not in (6, 8):
        raise SequenceError("Unsupported Kasami degree", m)
    u = generate_msequence(LfsrSpec(m, PRIMITIVE_TAPS[m])).chips
    n = u.size
    q = 2 ** (m // 2) + 1
    w = u[(q * np.arange(n)) % n]
    family = [ChipSequence(u, Family.KASAMI, 0)]
    for k in range(2 ** (m // 2) - 1):
        family.append(ChipSequence(u * np.roll(w, -k), Family.KASAMI, 1 + k))
    return family


def extend(seq, length):
    """Extends a ``2 ** m - 1`` sequence by one chip of its periodic continuation.

    :raises SequenceError: unless ``length`` is the sequence length or one more.

    :rtype: :class:`ChipSequence`
    """
    if length == seq.length:
        return seq
    if length != seq.length + 1:
        raise SequenceError("Cannot reconcile lengths", "{} -> {}".format(seq.length, length))
    chips = np.concatenate([seq.chips, seq.chips[:1]])
    return ChipSequence(chips, seq.family, seq.index)


def make_hybrid(g, w, index=None):
    """Element-wise product H[n] = G[n] W[n] of a Gold and a Walsh code.

    A Gold code one chip shorter than the Walsh code is first extended by its
    chip at index 0.

    :param g: Gold (or any +/-1) sequence.
    :type g: :class:`ChipSequence`

    :param w: Walsh (or any +/-1) sequence.
    :type w: :class:`ChipSequence`

    :param index: Family-local index of the result. Defaults to
        ``g.index * w.length + w.index``.
    :type index: int

    :raises SequenceError: for irreconcilable lengths.

    :rtype: :class:`ChipSequence`
    """
    if w.length not in (g.length, g.length + 1):
        raise SequenceError("Cannot reconcile lengths", "{} vs {}".format(g.length, w.length))
    g = extend(g, w.length)
    if index is None:
        index = g.index * w.length + w.index
    return ChipSequence(g.chips * w.chips, Family.HYBRID, index)


def direct_correlation(a, b):
    """O(N^2) reference: values[tau] = sum_n a[n] b[(n + tau) mod N]."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return np.array([int(np.dot(a, np.roll(b, -tau))) for tau in range(a.size)], dtype=np.int64)


def fft_correlation(a, b):
    """O(N log N) periodic correlation, rounded to exact integers."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    raw = np.fft.ifft(np.conj(np.fft.fft(a)) * np.fft.fft(b)).real
    values = np.rint(raw)
    residual = np.max(np.abs(raw - values)) if raw.size else 0.0
    assert residual < 1e-6 * a.size, "FFT correlation residual {}".format(residual)
    return values.astype(np.int64)


def periodic_correlation(a, b, method='fft'):
    """Periodic correlation profile of two equal-length sequences.

    :param a: First sequence.
    :type a: :class:`ChipSequence`

    :param b: Second sequence. Passing ``a`` again gives the autocorrelation.
    :type b: :class:`ChipSequence`

    :param method: 'fft' (default) or 'direct'.
    :type method: string

    :raises SequenceError: on a length mismatch.

    :rtype: :class:`CorrelationProfile`
    """
    if a.length != b.length:
        raise SequenceError("Correlation needs equal lengths", "{} vs {}".format(a.length, b.length))
    if method == 'fft':
        values = fft_correlation(a.chips, b.chips)
    elif method == 'direct':
        values = direct_correlation(a.chips, b.chips)
    else:
        raise ValueError("Unknown correlation method: {}".format(method))
    return CorrelationProfile(values, is_auto=a is b or np.array_equal(a.chips, b.chips))


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def measure_papr(seq, oversample=4):
    """Peak-to-average power ratio after OFDM-style subcarrier mapping.

    Chips are placed on subcarriers (a ``2 ** m - 1`` code is first extended
    by one chip, other lengths are zero-padded to the next power of 2), the
    spectrum is zero-padded by ``oversample`` and inverse transformed.

    :param seq: The sequence.
    :type seq: :class:`ChipSequence`

    :param oversample: Oversampling factor of the time-domain signal.
    :type oversample: int

    :returns: max |x|^2 / mean |x|^2 as a linear ratio.
    :rtype: float
    """
    chips = seq.chips.astype(float)
    n = _next_pow2(chips.size)
    if n == chips.size + 1:
        chips = extend(seq, n).chips.astype(float)
    x = np.fft.ifft(chips, n=n * oversample)
    power = np.abs(x) ** 2
    return float(np.max(power) / np.mean(power))


def rho2_matrix(codebook):
    """Normalized squared off-zero cross-correlation peaks of a codebook.

    Entry (i, j) is ``(peak_offzero / N) ** 2`` of the pair; identical
    sequences (and the diagonal) are the worst case 1.

    :rtype: numpy.ndarray
    """
    size = len(codebook)
    rho2 = np.ones((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            profile = periodic_correlation(codebook[i], codebook[j])
            value = 1.0 if profile.is_auto else (profile.peak_offzero / float(codebook[i].length)) ** 2
            rho2[i, j] = rho2[j, i] = value
    return rho2


def select_codebook(candidates, size):
    """Greedy subset of ``size`` candidates keeping pairwise rho^2 low.

    Starts from the first candidate and repeatedly adds the candidate whose
    worst rho^2 against the chosen set is smallest (ties: lowest position).

    :rtype: list of :class:`ChipSequence`
    """
    if size > len(candidates):
        raise SequenceError("Codebook larger than candidate set", "{} > {}".format(size, len(candidates)))
    rho2 = rho2_matrix(candidates)
    chosen = [0]
    while len(chosen) < size:
        remaining = [i for i in range(len(candidates)) if i not in chosen]
        worst = [max(rho2[i, j] for j in chosen) for i in remaining]
        chosen.append(remaining[int(np.argmin(worst))])
    return [candidates[i] for i in chosen]


CODEBOOK_FAMILIES = ('gold', 'walsh', 'kasami', 'hybrid', 'gold_extended', 'walsh_only')


def family_codebook(family, degree, size):
    """The ``size``-sequence codebook a policy draws from.

    :param family: One of :data:`CODEBOOK_FAMILIES`. 'gold_extended' is the
        hybrid construction with Walsh row 0 (extended Gold codes);
        'walsh_only' is the hybrid construction with an all-ones Gold factor.
    :type family: string

    :param degree: LFSR degree m; Walsh codes use order ``2 ** m``. Kasami
        uses the nearest even degree at or above ``m``.
    :type degree: int

    :param size: Number of sequences.
    :type size: int

    :rtype: list of :class:`ChipSequence`
    """
    if family == 'gold':
        candidates = generate_gold_family(degree)
    elif family == 'walsh':
        candidates = generate_walsh_family(2 ** degree)
    elif family == 'kasami':
        candidates = generate_kasami_small(degree + degree % 2)
    elif family == 'gold_extended':
        order = 2 ** degree
        row0 = generate_walsh_family(order)[0]
        candidates = [make_hybrid(g, row0) for g in generate_gold_family(degree)]
    elif family == 'walsh_only':
        candidates = [ChipSequence(w.chips, Family.HYBRID, w.index)
                      for w in generate_walsh_family(2 ** degree)]
    elif family == 'hybrid':
        golds = generate_gold_family(degree)
        walsh = generate_walsh_family(2 ** degree)
        candidates = [make_hybrid(g, walsh[k % len(walsh)], index=k) for k, g in enumerate(golds)]
        candidates = select_codebook(candidates, min(len(candidates), max(size, 1)))
    else:
        raise SequenceError("Unknown codebook family", family)
    if size > len(candidates):
        raise SequenceError("Codebook larger than family", "{} > {}".format(size, len(candidates)))
    logger.info("Codebook %s m=%d: %d sequences of length %d", family, degree, size, candidates[0].length)
    return candidates[:size]


def correlation_claim_report(g_i, g_j, w_i, w_j):
    """Compares R_H(tau) with R_G(tau) R_W(tau) for two hybrid codes, per lag.

    The product identity does not hold for sums in general; this only
    reports both sides.

    :rtype: dict
    """
    h_i, h_j = make_hybrid(g_i, w_i), make_hybrid(g_j, w_j)
    length = h_i.length
    r_h = periodic_correlation(h_i, h_j).values
    r_g = periodic_correlation(extend(g_i, length), extend(g_j, length)).values
    r_w = periodic_correlation(w_i, w_j).values
    product = r_g * r_w
    report = {
        'length': length,
        'r_hybrid': r_h.tolist(),
        'r_gold_times_walsh': product.tolist(),
        'lags_equal': int(np.sum(r_h == product)),
        'peak_hybrid': int(np.max(np.abs(r_h[1:]))),
        'peak_gold': int(np.max(np.abs(r_g[1:]))),
        'peak_walsh': int(np.max(np.abs(r_w[1:]))),
    }
    logger.info("Correlation claim: identity holds at %d of %d lags; off-zero peaks H=%d G=%d W=%d",
                report['lags_equal'], length, report['peak_hybrid'], report['peak_gold'], report['peak_walsh'])
    return report


def papr_claim_report(g, w):
    """PAPR of a hybrid code against both parents.

    :rtype: dict
    """
    h = make_hybrid(g, w)
    report = {
        'papr_hybrid': measure_papr(h),
        'papr_gold': measure_papr(extend(g, h.length)),
        'papr_walsh': measure_papr(w),
    }
    report['claim_holds'] = report['papr_hybrid'] <= min(report['papr_gold'], report['papr_walsh'])
    logger.info("PAPR claim: hybrid %.3f, gold %.3f, walsh %.3f, holds=%s", report['papr_hybrid'],
                report['papr_gold'], report['papr_walsh'], report['claim_holds'])
    return report
