"""Reference interpreter for source programs and their one-loop form.

This is the oracle the rest of the pipeline is tested against.  All
arithmetic is width-w two's complement with wraparound, and the corner-case
behavior deliberately mirrors the circuit encoding:

* division by zero yields an all-ones quotient and the dividend as
  remainder (and raises when strict checks are on);
* out-of-range array reads return the last element, out-of-range writes are
  dropped;
* the untaken arm of a ternary is never evaluated, while both operands of
  `&&`/`||` always are.

Two engines are provided.  `run_labeled` steps a labeled program one
statement at a time following control successors (including `pc = e;` goto
assignments produced by function resolution), counting one step per
statement exactly like the one-loop form does.  `run_structural` evaluates
function calls by direct recursive execution and exists so transformed
programs can be checked against untransformed semantics.  `run_olp`
executes the one-loop form with parallel next-state assignment semantics.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import frontend as F
from .errors import (DepthExceeded, DivisionByZero, OutOfBounds,
                     StepLimitExceeded)


def wrap(v: int, width: int) -> int:
    """Reduce to signed two's complement at the given width."""
    m = 1 << width
    return ((v + (m >> 1)) % m) - (m >> 1)


def elem(name: str, j: int) -> str:
    return f"{name}[{j}]"


# ---------------------------------------------------------------------------
# nondeterministic input handling

def make_inputs(prog: F.Program, width: int, seed: int = 0,
                overrides: dict | None = None) -> dict:
    """Sample one value per nondeterministic source, keyed by variable name
    (array elements as name[j]).  Overrides pin specific values."""
    if not prog.nondet_vars:
        from .preprocess import analyze_nondet
        analyze_nondet(prog)
    rng = random.Random(seed)
    lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    inputs = {}
    for name in sorted(prog.nondet_vars):
        d = prog.decl(name)
        if d is None:
            continue
        if d.is_array:
            for j in range(d.size()):
                inputs[elem(name, j)] = rng.randint(lo, hi)
        else:
            inputs[name] = rng.randint(lo, hi)
    if overrides:
        for k, v in overrides.items():
            inputs[k] = wrap(v, width)
    return inputs


def initial_env(prog: F.Program, width: int, inputs: dict) -> dict:
    env = {}
    for d in prog.decls:
        if d.primary:
            continue
        if d.is_array:
            for j in range(d.size()):
                key = elem(d.name, j)
                v = inputs.get(key, 0) if d.name in prog.nondet_vars else 0
                env[key] = wrap(v, width)
        else:
            if d.name in prog.nondet_vars:
                v = inputs.get(d.name, 0)
            else:
                v = d.init_const if d.init_const is not None else 0
            env[d.name] = wrap(v, width)
    return env


# ---------------------------------------------------------------------------
# expression evaluation

@dataclass
class ErrFlags:
    overflow: bool = False
    oob: bool = False
    divzero: bool = False
    depth: bool = False

    def any(self) -> bool:
        return self.overflow or self.oob or self.divzero or self.depth


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Break(Exception):
    pass


@dataclass
class Machine:
    """Shared evaluation state for one run."""
    prog: F.Program
    width: int
    inputs: dict
    strict: bool = False          # raise on errors instead of mirroring
    max_steps: int = 10_000
    quant_cap: int = 1 << 16
    decls: dict = field(default_factory=dict)
    errs: ErrFlags = field(default_factory=ErrFlags)
    funcs: dict = field(default_factory=dict)
    depths: dict = field(default_factory=dict)   # live activations per function

    def __post_init__(self):
        self.funcs = {f.name: f for f in self.prog.funcs}
        if not self.decls:
            self.decls = {d.name: d for d in self.prog.decls}

    def decl(self, name) -> F.Declaration:
        return self.decls[name]

    # -- error mirroring

    def _oob_read(self, env, name, size, idx):
        self.errs.oob = True
        if self.strict:
            raise OutOfBounds(idx, size, name)
        return env[elem(name, size - 1)]

    # -- evaluation; frame is the active structural call frame or None

    def eval(self, e, env, frame=None):
        w = self.width
        if isinstance(e, F.Const):
            return wrap(e.value, w) if not e.is_bool else e.value
        if isinstance(e, F.Var):
            if frame is not None and e.name in frame:
                return frame[e.name]
            if e.name in env:
                return env[e.name]
            raise KeyError(f"unbound variable {e.name!r}")
        if isinstance(e, F.ArrayRef):
            name = e.name
            if frame is not None:
                name = frame.get("__alias__", {}).get(name, name)
            d = self.decl(name)
            idx = self.eval(e.index, env, frame)
            if e.index2 is not None:
                idx = wrap(idx * d.dims[1] + self.eval(e.index2, env, frame), w)
            size = d.size()
            if 0 <= idx < size:
                return env[elem(name, idx)]
            return self._oob_read(env, name, size, idx)
        if isinstance(e, F.Unary):
            v = self.eval(e.operand, env, frame)
            if e.op == "-":
                r = wrap(-v, w)
                if -v != r:
                    self.errs.overflow = True
                return r
            return 0 if v else 1
        if isinstance(e, F.Binary):
            if e.op in ("&&", "||", "->"):
                l = self.eval(e.left, env, frame)
                r = self.eval(e.right, env, frame)
                if e.op == "&&":
                    return 1 if (l and r) else 0
                if e.op == "||":
                    return 1 if (l or r) else 0
                return 1 if (not l or r) else 0
            l = self.eval(e.left, env, frame)
            r = self.eval(e.right, env, frame)
            if e.op == "+":
                v = l + r
            elif e.op == "-":
                v = l - r
            elif e.op == "*":
                v = l * r
            elif e.op in ("/", "%"):
                return self._divmod(l, r, e.op)
            elif e.op == "<":
                return 1 if l < r else 0
            elif e.op == "<=":
                return 1 if l <= r else 0
            elif e.op == ">":
                return 1 if l > r else 0
            elif e.op == ">=":
                return 1 if l >= r else 0
            elif e.op == "==":
                return 1 if l == r else 0
            elif e.op == "!=":
                return 1 if l != r else 0
            else:
                raise ValueError(f"unknown operator {e.op!r}")
            rv = wrap(v, w)
            if rv != v:
                self.errs.overflow = True
            return rv
        if isinstance(e, F.Cond):
            c = self.eval(e.cond, env, frame)
            return self.eval(e.then if c else e.other, env, frame)
        if isinstance(e, F.Quant):
            lo = self.eval(e.lo, env, frame)
            hi = self.eval(e.hi, env, frame)
            if hi - lo + 1 > self.quant_cap:
                raise StepLimitExceeded(self.quant_cap)
            acc = 1 if e.kind == "forall" else 0
            shadow_frame = dict(frame) if frame is not None else {}
            for k in range(lo, hi + 1):
                shadow_frame[e.var] = wrap(k, w)
                b = self.eval(e.body, env, shadow_frame)
                acc = (acc and b) if e.kind == "forall" else (acc or b)
                acc = 1 if acc else 0
                if (e.kind == "forall") != bool(acc):
                    break   # decided early, like the generated loop
            return acc
        if isinstance(e, F.Call):
            return self.call(e, env, frame)
        raise TypeError(f"not an expression: {e!r}")

    def _divmod(self, a, b, op):
        w = self.width
        if b == 0:
            self.errs.divzero = True
            if self.strict:
                raise DivisionByZero(f"{a} {op} 0")
            return wrap(-1, w) if op == "/" else a
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        r = a - q * b
        if op == "/":
            qq = wrap(q, w)
            if qq != q:
                self.errs.overflow = True
            return qq
        return wrap(r, w)

    # -- structural function execution (call-by-value scalars,
    #    call-by-reference arrays)

    def call(self, e: F.Call, env, caller_frame):
        f = self.funcs.get(e.name)
        if f is None:
            raise KeyError(f"call to unknown function {e.name!r}")
        frame = {"__alias__": {}}
        for p, arg in zip(f.params, e.args):
            if p.is_array:
                if not isinstance(arg, F.Var):
                    raise TypeError("array argument must be an array name")
                actual = arg.name
                if caller_frame is not None:
                    actual = caller_frame.get("__alias__", {}).get(actual, actual)
                frame["__alias__"][p.name] = actual
            else:
                frame[p.name] = self.eval(arg, env, caller_frame)
        for d in f.decls:
            if d.is_array:
                raise NotImplementedError("array locals in functions")
            frame[d.name] = wrap(d.init_const or 0, self.width)
        self.depths[f.name] = self.depths.get(f.name, 0) + 1
        try:
            if self.depths[f.name] > 1000:
                raise DepthExceeded(f"runaway recursion in {f.name!r}")
            self.exec_block(f.body, env, frame)
        except _Return as ret:
            return ret.value
        finally:
            self.depths[f.name] -= 1
        raise RuntimeError(f"function {f.name!r} finished without return")

    def exec_block(self, stmts, env, frame):
        for s in stmts:
            self.exec_stmt(s, env, frame)

    def exec_stmt(self, s, env, frame):
        self.max_steps -= 1
        if self.max_steps < 0:
            raise StepLimitExceeded(self.max_steps)
        if isinstance(s, F.Assign):
            v = self.eval(s.expr, env, frame)
            self.store(s.target, v, env, frame)
        elif isinstance(s, F.If):
            if self.eval(s.cond, env, frame):
                self.exec_block(s.then, env, frame)
            else:
                self.exec_block(s.els, env, frame)
        elif isinstance(s, F.While):
            while self.eval(s.cond, env, frame):
                try:
                    self.exec_block(s.body, env, frame)
                except _Break:
                    break
                self.max_steps -= 1
                if self.max_steps < 0:
                    raise StepLimitExceeded(self.max_steps)
        elif isinstance(s, F.Break):
            raise _Break()
        elif isinstance(s, F.Return):
            raise _Return(self.eval(s.expr, env, frame))
        elif isinstance(s, F.Pre):
            env["pre" + s.name] = self.eval(s.expr, env, frame)
        elif isinstance(s, F.Post):
            env["post" + s.name] = self.eval(s.expr, env, frame)
        else:
            raise TypeError(f"not a statement: {s!r}")

    def store(self, target, value, env, frame):
        if isinstance(target, F.Var):
            if frame is not None and target.name in frame:
                frame[target.name] = value
            else:
                env[target.name] = value
            return
        name = target.name
        if frame is not None:
            name = frame.get("__alias__", {}).get(name, name)
        d = self.decl(name)
        idx = self.eval(target.index, env, frame)
        if target.index2 is not None:
            idx = wrap(idx * d.dims[1] + self.eval(target.index2, env, frame),
                       self.width)
        size = d.size()
        if 0 <= idx < size:
            env[elem(name, idx)] = value
        else:
            self.errs.oob = True
            if self.strict:
                raise OutOfBounds(idx, size, name)


# ---------------------------------------------------------------------------
# running whole programs

@dataclass
class RunResult:
    env: dict
    trace: list          # rows: (pc_or_None, env snapshot) per step, step 0 first
    steps: int
    done_step: int       # first step index at which execution had finished
    errs: ErrFlags


def run_structural(prog: F.Program, inputs: dict, width: int,
                   max_steps: int = 10_000, strict: bool = False) -> RunResult:
    """Execute by direct AST walking: calls and quantifiers evaluate
    in place.  The oracle for untransformed programs."""
    m = Machine(prog, width, inputs, strict=strict, max_steps=max_steps)
    env = initial_env(prog, width, inputs)
    m.exec_block(prog.stmts, env, None)
    return RunResult(env, [], 0, 0, m.errs)


def run_labeled(prog: F.Program, inputs: dict, width: int,
                max_steps: int = 10_000, strict: bool = False) -> RunResult:
    """Execute one labeled statement per step following control successors.
    Handles `pc = e;` gotos from function resolution; calls remaining in
    expressions are evaluated structurally."""
    m = Machine(prog, width, inputs, strict=strict, max_steps=max_steps * 4)
    ctl = F.build_control(prog)
    env = initial_env(prog, width, inputs)
    pointer = ctl.first
    trace = [(pointer, dict(env))]
    steps = 0
    sp_bounds = {sp.name: sp.max_depth for sp in prog.stack_pointers}
    while pointer != ctl.done:
        if steps >= max_steps:
            raise StepLimitExceeded(max_steps)
        s = ctl.by_label.get(pointer)
        if s is None:
            raise KeyError(f"no statement with label {pointer}")
        if isinstance(s, F.Assign):
            if isinstance(s.target, F.Var) and s.target.name == "pc":
                pointer = m.eval(s.expr, env)
            else:
                v = m.eval(s.expr, env)
                m.store(s.target, v, env, None)
                pointer = ctl.next[s.label]
        elif isinstance(s, F.If):
            c = m.eval(s.cond, env)
            pointer = ctl.then_[s.label] if c else ctl.else_[s.label]
        elif isinstance(s, F.While):
            c = m.eval(s.cond, env)
            pointer = ctl.body[s.label] if c else ctl.next[s.label]
        elif isinstance(s, F.Break):
            pointer = ctl.next[s.label]
        elif isinstance(s, F.Pre):
            env["pre" + s.name] = m.eval(s.expr, env)
            pointer = ctl.next[s.label]
        elif isinstance(s, F.Post):
            env["post" + s.name] = m.eval(s.expr, env)
            pointer = ctl.next[s.label]
        else:
            raise TypeError(f"cannot step {s!r}")
        steps += 1
        for sp, bound in sp_bounds.items():
            if env.get(sp, 0) >= bound:
                m.errs.depth = True
                if strict:
                    raise DepthExceeded(f"{sp} reached {env[sp]}")
        trace.append((pointer, dict(env)))
    return RunResult(env, trace, steps, steps, m.errs)


def run_olp(olp, inputs: dict, width: int, max_steps: int = 10_000,
            strict: bool = False) -> RunResult:
    """Execute a one-loop program: the init list once in order, then the
    next list as simultaneous assignments per step until notdone is false."""
    prog = olp.source
    m = Machine(prog, width, inputs, strict=strict,
                max_steps=max_steps * max(4, len(olp.next_list)),
                decls={d.name: d for d in olp.decl_list})
    env = {}
    for d in olp.decl_list:
        if d.primary:
            src = olp.nondet_of[d.name]
            if d.is_array:
                for j in range(d.size()):
                    env[elem(d.name, j)] = wrap(inputs.get(elem(src, j), 0), width)
            else:
                env[d.name] = wrap(inputs.get(src, 0), width)
        else:
            if d.is_array:
                for j in range(d.size()):
                    env[elem(d.name, j)] = 0
            else:
                env[d.name] = 0
    for target, expr in olp.init_list:
        value = m.eval(expr, env)
        _olp_store(m, olp, target, value, env, env)
    trace = [(env.get("pc"), dict(env))]
    steps = 0
    done_step = 0 if env.get("pc") == olp.done else -1
    while env.get("notdone", 0):
        if steps >= max_steps:
            raise StepLimitExceeded(max_steps)
        snapshot = dict(env)
        for target, expr in olp.next_list:
            value = m.eval(expr, snapshot)
            _olp_store(m, olp, target, value, snapshot, env)
        steps += 1
        if done_step < 0 and env.get("pc") == olp.done:
            done_step = steps
        trace.append((env.get("pc"), dict(env)))
    return RunResult(env, trace, steps, done_step, m.errs)


def _olp_store(m: Machine, olp, target, value, read_env, write_env):
    if isinstance(target, F.Var):
        write_env[target.name] = value
        return
    d = m.decl(target.name)
    idx = m.eval(target.index, read_env)
    if 0 <= idx < d.size():
        write_env[elem(target.name, idx)] = value
    else:
        m.errs.oob = True
        if m.strict:
            raise OutOfBounds(idx, d.size(), target.name)
