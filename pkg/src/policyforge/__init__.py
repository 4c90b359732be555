"""policyforge: learn, query, and explain cache replacement policies."""

from .policy import (
    NO_EVICT,
    Policy,
    PolicyError,
    accepts_trace,
    equivalent,
    find_counterexample,
    isomorphic,
    minimize,
    step,
    walk,
)
from .zoo import POLICY_KINDS, build_policy

__all__ = [
    "NO_EVICT",
    "Policy",
    "PolicyError",
    "POLICY_KINDS",
    "accepts_trace",
    "build_policy",
    "equivalent",
    "find_counterexample",
    "isomorphic",
    "minimize",
    "step",
    "walk",
]
