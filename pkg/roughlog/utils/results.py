"""
The record returned by property checks.
"""
from collections import namedtuple

import numpy as np

from roughlog.utils.io import append_jsonl, to_jsonable

__all__ = ['CheckResult']


class CheckResult(namedtuple("CheckResult", "check params violation tolerance passed")):
    """
    Outcome of a property check.

    A failed property is data, not an error: ``passed`` is `False` and
    ``violation`` says by how much.

    Parameters
    ----------
    check : `str`
        Name of the check.
    params : `dict`
        The instance parameters worth recording (times, sizes, seeds...).
    violation : `float`
        The measured violation; the check passes when it is at most ``tolerance``.
    tolerance : `float`
    passed : `bool`
    """
    __slots__ = ()

    @classmethod
    def from_violation(cls, check, violation, tolerance, **params):
        violation = float(violation)
        return cls(check, params, violation, float(tolerance),
                   bool(np.isfinite(violation) and violation <= tolerance))

    def to_dict(self):
        return to_jsonable({"check": self.check, "params": self.params,
                            "violation": self.violation, "tolerance": self.tolerance,
                            "pass": self.passed})

    def write(self, path):
        """
        Append this result as a JSON line to ``path``.
        """
        append_jsonl(self.to_dict(), path)

    def __bool__(self):
        return self.passed

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"{self.check}: {status} (violation {self.violation:.3e}, tolerance {self.tolerance:.1e})"
