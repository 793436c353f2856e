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
Defines exceptions that are thrown by hybridnoma.
"""


class ValidationError(Exception):
    """Something went wrong during configuration or argument validation"""

    def __init__(self, errors):
        if isinstance(errors, (list, tuple)):
            msg = '\n'.join(["{}".format(e) for e in errors])
        else:
            msg = "{}".format(errors)
        self.errors = errors
        Exception.__init__(self, msg)


class SequenceError(Exception):
    """A spreading sequence or its generator spec was rejected."""

    def __init__(self, reason, detail=None):
        self.reason = reason
        self.detail = detail

    def __str__(self):
        if self.detail is None:
            return str(self.reason)
        else:
            return "%s (%s)" % (self.reason, self.detail)


class PowerAllocationError(Exception):
    """Power factors left the simplex. This is a programming error."""

    def __init__(self, total, alphas=None):
        self.total = total
        self.alphas = alphas

    def __str__(self):
        return "Power factors sum to %.12g, expected 1" % self.total


class HandoverError(Exception):
    """A handover was requested towards the serving cell."""

    def __init__(self, source, target):
        self.source = source
        self.target = target

    def __str__(self):
        return "Handover target %s equals source %s" % (self.target, self.source)


class EnvironmentDone(Exception):
    """step() was called on an episode that has already ended."""

    def __init__(self, tick):
        self.tick = tick

    def __str__(self):
        return "Episode ended at tick %d; call reset() first" % self.tick


class BufferUnderflow(Exception):
    """The replay buffer holds fewer transitions than requested."""

    def __init__(self, size, k):
        self.size = size
        self.k = k

    def __str__(self):
        return "Cannot sample %d transitions from a buffer of %d" % (self.k, self.size)


class UnknownPolicy(Exception):
    """The requested policy name is not a known PolicySpec."""

    def __init__(self, name):
        self.name = name

    def __str__(self):
        return "Unknown policy: %s" % self.name


class CheckpointError(Exception):
    """A checkpoint file could not be read back."""

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason

    def __str__(self):
        return "%s (%s)" % (self.path, self.reason)
