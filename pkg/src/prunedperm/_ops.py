"""Deterministic operation counting for the benchmark harness.

Hot paths call :func:`tick`; it is a no-op unless a counter is active.
"""

from contextlib import contextmanager
from contextvars import ContextVar

_active = ContextVar("prunedperm_ops", default=None)


class OpCounter:
    def __init__(self):
        self.perm_evals = 0
        self.recursion_steps = 0

    @property
    def total(self):
        return self.perm_evals + self.recursion_steps

    def __repr__(self):
        return f"OpCounter(perm_evals={self.perm_evals}, recursion_steps={self.recursion_steps})"


def tick(evals=0, steps=0):
    c = _active.get()
    if c is not None:
        c.perm_evals += evals
        c.recursion_steps += steps


@contextmanager
def counting():
    """``with counting() as ops: ...`` collects every tick inside the block."""
    c = OpCounter()
    token = _active.set(c)
    try:
        yield c
    finally:
        _active.reset(token)
