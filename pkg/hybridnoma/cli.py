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

"""Command-line entry point, installed as ``hybridnoma``.

Every data file written here is a deterministic function of the command,
configuration and seeds; wall-clock information goes to a
``<file>.meta.json`` sidecar.
"""

import argparse
import datetime
import logging
import os
import sys
import time

import numpy as np

from hybridnoma import __version__, convert, dqn, experiments, seqlib, stats
from hybridnoma.config import load_config
from hybridnoma.exceptions import (BufferUnderflow, CheckpointError, EnvironmentDone, HandoverError,
                                   PowerAllocationError, SequenceError, UnknownPolicy, ValidationError)

logger = logging.getLogger(__name__)

PACKAGE_ERRORS = (ValidationError, SequenceError, PowerAllocationError, HandoverError, EnvironmentDone,
                  BufferUnderflow, UnknownPolicy, CheckpointError)

_RAW_FAMILIES = {
    'gold': seqlib.generate_gold_family,
    'walsh': lambda m: seqlib.generate_walsh_family(2 ** m),
    'kasami': seqlib.generate_kasami_small,
}


def _parser():
    parser = argparse.ArgumentParser(prog='hybridnoma', description="Hybrid-sequence NOMA handover simulator")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--seed', type=int, default=None, help="base seed (overrides the config)")
    parser.add_argument('--config', default=None, help="YAML config file or preset:<name>")
    parser.add_argument('--out', default='.', help="output directory")
    parser.add_argument('--jobs', type=int, default=1, help="worker processes for multi-seed runs")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    seq = commands.add_parser('seq', help="spreading-sequence codebooks")
    seq_commands = seq.add_subparsers(dest='action', metavar='action')
    seq_commands.required = True
    for name, text in (('gen', "export a codebook"), ('analyze', "correlation and PAPR reports")):
        sub = seq_commands.add_parser(name, help=text)
        sub.add_argument('--family', default='gold', choices=seqlib.CODEBOOK_FAMILIES)
        sub.add_argument('--m', type=int, default=5, help="LFSR degree")
        sub.add_argument('--size', type=int, default=None, help="codebook size (default: whole family)")

    train = commands.add_parser('train', help="train a DQN controller")
    train.add_argument('--policy', default='HybridDqn')
    train.add_argument('--episodes', type=int, default=None)

    evaluate = commands.add_parser('eval', help="evaluate a policy")
    evaluate.add_argument('--policy', required=True)
    evaluate.add_argument('--checkpoint', default=None, help="trained network for learned policies")
    evaluate.add_argument('--seeds', type=int, default=None, help="number of evaluation seeds")

    suite = commands.add_parser('suite', help="experiment batteries")
    suite_commands = suite.add_subparsers(dest='action', metavar='action')
    suite_commands.required = True
    for name, text in (('compare', "six-arm comparison"), ('ablation', "component ablations"),
                       ('velocity', "throughput and handovers against speed")):
        sub = suite_commands.add_parser(name, help=text)
        sub.add_argument('--seeds', type=int, default=None, help="number of evaluation seeds")
        sub.add_argument('--episodes', type=int, default=None, help="training episodes per learned arm")
        if name == 'velocity':
            sub.add_argument('--speeds', type=float, nargs='+', default=[3.0, 30.0, 60.0, 120.0])
            sub.add_argument('--policies', nargs='+', default=[p.value for p in experiments.COMPARISON_ARMS])

    stat = commands.add_parser('stats', help="statistics over existing run CSVs")
    stat.add_argument('inputs', nargs='+', help="run CSV files, one per arm")
    stat.add_argument('--metric', default='hsr', choices=convert.RUN_COLUMNS[1:])
    stat.add_argument('--reference', default=None, help="arm for pairwise tests (default: first input)")
    stat.add_argument('--level', type=float, default=0.95)
    return parser


def _config(args, **overrides):
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.seed is not None:
        overrides['seed'] = args.seed
    return load_config(args.config, **overrides)


def _seeds(config):
    return list(range(config['seed'], config['seed'] + config['eval_seeds']))


def _out(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _meta(path, args, started, **extra):
    meta = {'version': __version__, 'command': ' '.join(args.argv), 'created': datetime.datetime.now().isoformat(),
            'elapsed_s': time.time() - started}
    meta.update(extra)
    convert.write_meta(path, meta)


def _write_runs(path, runs, config, policy):
    rows = []
    per_seed = len(runs[0].episodes) if runs else 0
    for i, run in enumerate(runs):
        for row in run.rows():
            row['episode'] = i * per_seed + row['episode']
            rows.append(row)
    header = {'config_hash': config.hash(), 'policy': policy, 'seeds': ','.join(str(r.seed) for r in runs),
              'episodes_per_seed': per_seed}
    convert.write_run_csv(path, rows, header)


def cmd_seq(args):
    config = _config(args)
    if args.action == 'gen':
        if args.size is None and args.family in _RAW_FAMILIES:
            codebook = _RAW_FAMILIES[args.family](args.m)
        else:
            codebook = seqlib.family_codebook(args.family, args.m, args.size or config['action.sequences'])
        path = _out(args, 'codebook_{}_m{}.txt'.format(args.family, args.m))
        with open(path, 'w') as f:
            f.write(convert.codebook_to_text(codebook, {'config_hash': config.hash(), 'seed': config['seed'],
                                                        'family': args.family, 'm': args.m}))
        logger.info("Wrote %d sequences to %s", len(codebook), path)
        return [path]

    codebook = seqlib.family_codebook(args.family, args.m, args.size or config['action.sequences'])
    rows = []
    for i in range(len(codebook)):
        for j in range(i + 1, len(codebook)):
            profile = seqlib.periodic_correlation(codebook[i], codebook[j])
            rows.append({'i': i, 'j': j, 'peak_offzero': int(profile.peak_offzero),
                         'zero_lag': int(profile.values[0]),
                         'values': ' '.join(str(v) for v in sorted(set(profile.values.tolist())))})
    report = {
        'config_hash': config.hash(),
        'seed': config['seed'],
        'family': args.family,
        'm': args.m,
        'papr': [seqlib.measure_papr(s) for s in codebook],
        'correlation_claim': None,
        'papr_claim': None,
        'pairs': rows,
    }
    # the hybrid claims need a Gold family of the same degree
    if args.m in seqlib.PREFERRED_PAIRS:
        golds = seqlib.generate_gold_family(args.m)
        walsh = seqlib.generate_walsh_family(2 ** args.m)
        report['correlation_claim'] = seqlib.correlation_claim_report(golds[0], golds[1], walsh[1], walsh[2])
        report['papr_claim'] = seqlib.papr_claim_report(golds[0], walsh[1])
    else:
        logger.info("No Gold family for m=%d, skipping the hybrid claim reports", args.m)
    path = _out(args, 'analysis_{}_m{}.json'.format(args.family, args.m))
    convert.write_summary_json(path, report)
    return [path]


def cmd_train(args):
    config = _config(args, train_episodes=args.episodes)
    result = experiments.train_agent(args.policy, config)
    name = experiments.PolicySpec.from_name(args.policy).value
    checkpoint = _out(args, 'checkpoint_{}.npz'.format(name))
    dqn.save_checkpoint(result.agent.net, checkpoint)
    csv = _out(args, 'train_{}.csv'.format(name))
    convert.write_run_csv(csv, [e.to_row() for e in result.episodes],
                          {'config_hash': config.hash(), 'policy': name, 'seed': config['seed']})
    paths = [checkpoint, csv]
    if result.convergence is not None:
        c = result.convergence
        path = _out(args, 'convergence_{}.json'.format(name))
        convert.write_summary_json(path, {'config_hash': config.hash(), 'seed': config['seed'],
                                          'converged': c.converged, 'episode': c.episode,
                                          'learning_start': c.learning_start, 'window': c.window,
                                          'phases': c.phases, 'moving_average': c.moving_average.tolist()})
        paths.append(path)
    return paths


def cmd_eval(args):
    config = _config(args, eval_seeds=args.seeds)
    policy = experiments.PolicySpec.from_name(args.policy)
    net = None
    if policy.learned:
        if args.checkpoint is None:
            raise ValidationError("{} needs --checkpoint".format(policy.value))
        net = dqn.load_checkpoint(args.checkpoint)
    runs = experiments.run_scenario(policy, config, _seeds(config), net=net, jobs=args.jobs)
    path = _out(args, 'eval_{}.csv'.format(policy.value))
    _write_runs(path, runs, config, policy.value)
    return [path]


def cmd_suite(args):
    config = _config(args, eval_seeds=args.seeds, train_episodes=args.episodes)
    seeds = _seeds(config)
    if args.action == 'velocity':
        results = experiments.velocity_suite(args.policies, args.speeds, config, seeds, jobs=args.jobs)
        paths = []
        summary = {'config_hash': config.hash(), 'seeds': seeds, 'speeds': args.speeds, 'policies': {}}
        for name, sweep in results.items():
            summary['policies'][name] = {}
            for speed, runs in sweep.items():
                path = _out(args, 'velocity_{}_{}kmh.csv'.format(name, convert._format_float(speed)))
                _write_runs(path, runs, config, name)
                paths.append(path)
                summary['policies'][name][convert._format_float(speed)] = {
                    m: experiments.per_seed({name: runs}, m)[name] for m in experiments.SUMMARY_METRICS}
        path = _out(args, 'summary_velocity.json')
        convert.write_summary_json(path, summary)
        return paths + [path]

    run = experiments.compare_suite if args.action == 'compare' else experiments.ablation_suite
    trainings = {}
    results = run(config, seeds, jobs=args.jobs, trainings=trainings)
    paths = []
    for name, runs in results.items():
        path = _out(args, '{}_{}.csv'.format(args.action, name))
        _write_runs(path, runs, config, name)
        paths.append(path)
    summary = experiments.summarize_suite(results, config)
    latency = summary.pop('decision_ms')
    if args.action == 'ablation':
        summary['ablation_table'] = experiments.ablation_table(results)
    summary['convergence'] = {name: (t.convergence.describe() if t.convergence else 'too few episodes')
                              for name, t in sorted(trainings.items())}
    path = _out(args, 'summary_{}.json'.format(args.action))
    convert.write_summary_json(path, summary)
    text = _out(args, 'summary_{}.txt'.format(args.action))
    with open(text, 'w') as f:
        f.write(experiments.render_summary(summary))
    args.meta_extra[path] = {'decision_ms': latency}
    return paths + [path, text]


def cmd_stats(args):
    samples = {}
    hashes = set()
    for path in args.inputs:
        frame, header = convert.read_run_csv(path)
        arm = header.get('policy', os.path.splitext(os.path.basename(path))[0])
        hashes.add(header.get('config_hash'))
        per = int(header.get('episodes_per_seed', len(frame)) or 1)
        groups = np.arange(len(frame)) // per
        means = frame[args.metric].groupby(groups).mean()
        samples[arm] = [None if np.isnan(v) else float(v) for v in means]
    reference = args.reference or next(iter(samples))
    if reference not in samples:
        raise ValidationError("Reference arm {} not among the inputs".format(reference))
    defined = [[v for v in vals if v is not None] for vals in samples.values()]
    result = {'metric': args.metric, 'config_hashes': sorted(h for h in hashes if h),
              'table': stats.summary_table(samples, args.level),
              'pairwise': stats.pairwise_table(samples, reference)}
    if len(defined) >= 2 and all(len(v) >= 2 for v in defined):
        result['anova'] = stats.one_way_anova(defined).to_dict()
    path = _out(args, 'stats_{}.json'.format(args.metric))
    convert.write_summary_json(path, result)
    print(stats.render_table(result['table'], ['arm', 'n', 'mean', 'sd', 'ci_low', 'ci_high']))
    if 'anova' in result:
        a = result['anova']
        print("ANOVA F({}, {}) = {:.4g}, {}".format(a['df_between'], a['df_within'], a['F'],
                                                     stats.format_p(a['p_value'])))
    return [path]


_COMMANDS = {'seq': cmd_seq, 'train': cmd_train, 'eval': cmd_eval, 'suite': cmd_suite, 'stats': cmd_stats}


def main(argv=None):
    """Runs one command.

    :returns: 0 on success, 1 on a package error, 2 on a usage error.
    :rtype: int
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    args.argv = argv
    args.started = time.time()
    args.meta_extra = {}
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stdout)
    if args.jobs < 1:
        logger.error("--jobs must be at least 1")
        return 2
    try:
        paths = _COMMANDS[args.command](args)
    except PACKAGE_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 1
    except OSError as e:
        logger.error("I/O error: %s", e)
        return 1
    for path in paths:
        _meta(path, args, args.started, **args.meta_extra.get(path, {}))
        logger.info("Wrote %s", path)
    return 0


if __name__ == '__main__':
    sys.exit(main())
