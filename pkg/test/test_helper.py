# -*- coding: utf-8 -*-

import os

DATA_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), 'data')

# Small enough for a test to run full episodes in well under a second.
SMALL_CONFIG = {
    'rings': 1,
    'users_per_cell': 4,
    'episode_ticks': 20,
    'train_episodes': 3,
    'eval_episodes': 1,
    'eval_seeds': 2,
    'dqn': {
        'hidden': 16,
        'batch_size': 8,
        'warmup': 16,
        'buffer_capacity': 512,
        'target_update': 10,
    },
    'convergence': {'window': 1},
}

GOLD5_CROSS_VALUES = {-1, -9, 7}
KASAMI6_CROSS_VALUES = {-1, -9, 7}

REWARD_WEIGHTS = {
    'throughput': 1.0,
    'interference': 0.5,
    'ho_failure': 2.0,
    'qos': 0.5,
    'energy': 0.2,
}
ZERO_WEIGHTS = dict.fromkeys(REWARD_WEIGHTS, 0.0)

ANOVA_LOW = [1.0, 2.0, 3.0, 4.0]
ANOVA_HIGH = [5.0, 6.0, 7.0, 8.0]
ANOVA_F = 19.2

# P(F > 4.0) for (1, 10) degrees of freedom.
F_TAIL_POINT = (4.0, 1, 10, 0.073388)

# Two-state, two-action deterministic MDP: action 1 moves to the other state.
MDP_TRANSITIONS = [
    [[1.0, 0.0], [0.0, 1.0]],
    [[0.0, 1.0], [1.0, 0.0]],
]
MDP_REWARDS = [
    [0.0, 1.0],
    [2.0, 0.0],
]
MDP_GAMMA = 0.5
