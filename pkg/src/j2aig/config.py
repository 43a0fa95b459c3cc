"""Run configuration shared by the transformation and proof stages."""

from dataclasses import dataclass
from typing import Optional


@dataclass
class ProveConfig:
    width: int = 32                 # bit width of int variables (two's complement)
    array_bound: int = 4            # size for unsized array parameters / MAXSIZE
    recursion_depth: int = 4        # frame count for recursive functions
    check_overflow: bool = False    # build the arithmetic-overflow output
    check_bounds: bool = False      # build the out-of-bounds output
    unroll_quantifiers: bool = False  # expand constant-range quantifiers inline
    abstract_muldiv: bool = False   # replace *, /, % by fresh inputs
    theta: Optional[int] = None     # termination bound; None -> heuristic
    max_frames: int = 64            # plain BMC depth
    induction_k: int = 1
    seed: int = 0                   # nondet stream seed for simulation utilities

    def __post_init__(self):
        if not (1 <= self.width <= 64):
            raise ValueError("width must be in [1, 64]")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.array_bound < 1:
            raise ValueError("array_bound must be >= 1")
        if self.recursion_depth < 1:
            raise ValueError("recursion_depth must be >= 1")
        if self.theta is not None and self.theta < 1:
            raise ValueError("theta must be >= 1")
