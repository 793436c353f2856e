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

"""One-way ANOVA, effect sizes, t-based confidence intervals and summary
tables. The incomplete beta function and the distribution tails it feeds
are computed here rather than imported.
"""

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from hybridnoma.exceptions import ValidationError

logger = logging.getLogger(__name__)

_EPS = 1e-15
_TINY = 1e-300


@dataclass
class AnovaResult(object):
    f: float
    df_between: int
    df_within: int
    p_value: float
    means: list
    variances: list

    def to_dict(self):
        return {'F': self.f, 'df_between': self.df_between, 'df_within': self.df_within,
                'p_value': self.p_value, 'means': list(self.means), 'variances': list(self.variances)}


def _betacf(a, b, x, max_iter=500):
    # Modified Lentz evaluation of the incomplete beta continued fraction.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = _TINY if abs(d) < _TINY else d
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    logger.warning("Incomplete beta continued fraction did not converge (a=%g, b=%g, x=%g)", a, b, x)
    return h


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b).

    :rtype: float
    """
    if a <= 0 or b <= 0:
        raise ValidationError("betainc needs positive shape parameters")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f, df1, df2):
    """P(F > f) for the F distribution with (df1, df2) degrees of freedom."""
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f))


def t_sf(t, df):
    """P(T > t) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))
    return tail if t >= 0 else 1.0 - tail


def t_quantile(p, df, tol=1e-10):
    """t such that P(T <= t) = p, by bisection on :func:`t_sf`.

    :rtype: float
    """
    if not 0.0 < p < 1.0:
        raise ValidationError("quantile level must lie in (0, 1), got {}".format(p))
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_quantile(1.0 - p, df, tol)
    lo, hi = 0.0, 1.0
    while t_sf(hi, df) > 1.0 - p:
        hi *= 2.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if t_sf(mid, df) > 1.0 - p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _samples(values, name='samples', minimum=2):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < minimum:
        raise ValidationError("{} needs at least {} values, got {}".format(name, minimum, arr.size))
    return arr


def one_way_anova(groups):
    """One-way analysis of variance across independent groups.

    ``F = MS_between / MS_within``; when both sums of squares vanish F is 0
    and p is 1, and a positive between-group sum with zero within-group
    variance gives F = inf, p = 0.

    :param groups: Two or more sample lists, each with at least 2 values.
    :type groups: list of lists

    :raises ValidationError: with fewer than two groups or undersized groups.

    :rtype: :class:`AnovaResult`
    """
    if len(groups) < 2:
        raise ValidationError("ANOVA needs at least two groups, got {}".format(len(groups)))
    arrays = [_samples(g, 'ANOVA group') for g in groups]
    total = sum(a.size for a in arrays)
    grand = sum(a.sum() for a in arrays) / total
    ss_between = sum(a.size * (a.mean() - grand) ** 2 for a in arrays)
    ss_within = sum(((a - a.mean()) ** 2).sum() for a in arrays)
    df_between = len(arrays) - 1
    df_within = total - len(arrays)
    # sums of squares below rounding noise count as zero
    noise = 1e-20 * max(sum((a ** 2).sum() for a in arrays), 1.0)
    if ss_between <= noise:
        f, p = 0.0, 1.0
    elif ss_within <= noise:
        f, p = math.inf, 0.0
    else:
        f = (ss_between / df_between) / (ss_within / df_within)
        p = f_sf(f, df_between, df_within)
    return AnovaResult(float(f), df_between, df_within, float(p),
                       [float(a.mean()) for a in arrays], [float(a.var(ddof=1)) for a in arrays])


def cohens_d(a, b):
    """(mean_a - mean_b) / pooled standard deviation.

    Zero pooled deviation gives 0 for equal means and a signed infinity,
    with a RuntimeWarning, otherwise.

    :rtype: float
    """
    a = _samples(a, 'cohens_d group')
    b = _samples(b, 'cohens_d group')
    diff = a.mean() - b.mean()
    pooled = math.sqrt(((a.size - 1) * a.var(ddof=1) + (b.size - 1) * b.var(ddof=1)) / (a.size + b.size - 2))
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0
        warnings.warn("Cohen's d is infinite: zero pooled standard deviation", RuntimeWarning, stacklevel=2)
        return math.copysign(math.inf, diff)
    return float(diff / pooled)


def confidence_interval(samples, level=0.95):
    """mean +/- t_{(1+level)/2, n-1} * sd / sqrt(n).

    :raises ValidationError: for fewer than 2 samples or level outside (0, 1).

    :rtype: tuple of float
    """
    x = _samples(samples)
    if not 0.0 < level < 1.0:
        raise ValidationError("confidence level must lie in (0, 1), got {}".format(level))
    mean = float(x.mean())
    half = t_quantile(0.5 + level / 2.0, x.size - 1) * float(x.std(ddof=1)) / math.sqrt(x.size)
    return mean - half, mean + half


@dataclass
class WelchResult(object):
    t: float
    df: float
    p_value: float


def welch_t(a, b):
    """Two-sided Welch t-test for unequal variances.

    :rtype: :class:`WelchResult`
    """
    a = _samples(a, 'welch group')
    b = _samples(b, 'welch group')
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    diff = a.mean() - b.mean()
    if va + vb == 0.0:
        return WelchResult(0.0 if diff == 0 else math.copysign(math.inf, diff), float(a.size + b.size - 2),
                           1.0 if diff == 0 else 0.0)
    t = diff / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    return WelchResult(float(t), float(df), float(min(2.0 * t_sf(abs(t), df), 1.0)))


def format_p(p):
    """Four significant figures; thresholds below 0.001."""
    if p < 0.001:
        return "p < 0.001"
    return "p = {:.4g}".format(p)


def summary_table(samples_by_arm, level=0.95):
    """Mean, standard deviation and confidence interval per arm.

    :param samples_by_arm: Arm name to per-seed values; None entries (an
        undefined HSR) are dropped.
    :type samples_by_arm: dict

    :rtype: list of dict
    """
    rows = []
    for arm, values in samples_by_arm.items():
        x = np.array([v for v in values if v is not None], dtype=float)
        row = {'arm': arm, 'n': int(x.size), 'mean': None, 'sd': None, 'ci_low': None, 'ci_high': None}
        if x.size:
            row['mean'] = float(x.mean())
        if x.size >= 2:
            row['sd'] = float(x.std(ddof=1))
            row['ci_low'], row['ci_high'] = confidence_interval(x, level)
        rows.append(row)
    return rows


def pairwise_table(samples_by_arm, reference):
    """Cohen's d and Welch t of every arm against ``reference``.

    :rtype: list of dict
    """
    ref = [v for v in samples_by_arm[reference] if v is not None]
    rows = []
    for arm, values in samples_by_arm.items():
        if arm == reference:
            continue
        x = [v for v in values if v is not None]
        if len(x) < 2 or len(ref) < 2:
            rows.append({'arm': arm, 'reference': reference, 'cohens_d': None, 'welch_t': None, 'p_value': None})
            continue
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', RuntimeWarning)
            d = cohens_d(ref, x)
        welch = welch_t(ref, x)
        rows.append({'arm': arm, 'reference': reference, 'cohens_d': d, 'welch_t': welch.t,
                     'p_value': welch.p_value})
    return rows


def _cell(value):
    if value is None:
        return 'n/a'
    if isinstance(value, float):
        return '{:.4f}'.format(value)
    return str(value)


def render_table(rows, columns=None):
    """Aligned plain-text rendering of a list of row dicts."""
    if not rows:
        return ''
    columns = columns or list(rows[0].keys())
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]
    lines = ['  '.join(c.ljust(w) for c, w in zip(columns, widths)).rstrip(),
             '  '.join('-' * w for w in widths)]
    lines += ['  '.join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    return '\n'.join(lines)
