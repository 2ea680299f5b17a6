"""Continuity checking: grammar shortcuts, normal form, and a bounded falsifier.

A formula outside both grammars is compared against its continuity
normal form.  Since the normal form always entails the formula, any
model separating the two shows the formula is not continuous; none
found means the two agree on every model up to the searched bound.
"""
from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .batch import MAX_EXHAUSTIVE_BITS, ModelBatch, all_codes, code_bits, decode_model
from .formula import Formula, FormulaError, actions, free_vars, is_positive_in
from .fragments import in_C, in_C0
from .games import model_check_via_game
from .kripke import KripkeModel, eval_at, evaluate, random_model
from .transforms import continuity_normal_form

DENSITIES = (0.1, 0.25, 0.5, 0.75, 0.9)
ISO_PRUNE_MAX_STATES = 3


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class SearchBudget:
    max_states: int = 3
    max_actions: int = 2
    max_props: int = 4
    samples: int = 500
    seed: int = 0
    time_limit: float | None = None

    def __post_init__(self):
        for name in ("max_states", "max_actions", "max_props"):
            if getattr(self, name) < 1:
                raise BudgetError(f"{name} must be at least 1")
        if self.samples < 0:
            raise BudgetError("samples must be non-negative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise BudgetError("time_limit must be positive")


def enumerate_models(acts, props, max_states: int, prune_isomorphic: bool = True):
    """All models with 1..max_states states over the signature, smallest code first.

    Isomorphic copies are skipped for up to three states.
    """
    acts, props = tuple(sorted(acts)), tuple(sorted(props))
    for n in range(1, max_states + 1):
        prune = prune_isomorphic and n <= ISO_PRUNE_MAX_STATES
        for c in all_codes(n, acts, props, prune):
            yield decode_model(int(c), n, acts, props)


def random_model_stream(acts, props, max_states: int, count: int, seed: int, min_states: int = 1):
    """Seeded sample of ``count`` models, sweeping edge densities."""
    rng = random.Random(seed)
    for k in range(count):
        n = rng.randint(min_states, max_states)
        yield random_model(rng, n, tuple(acts), tuple(props), DENSITIES[k % len(DENSITIES)])


@dataclass
class SearchResult:
    witness: tuple | None          # (model, state) or None
    exhaustive_bound: int          # all models with at most this many states were checked
    complete: bool                 # every size up to max_states was checked exhaustively
    samples_checked: int = 0
    models_checked: int = 0


def _signature(f1, f2, budget):
    acts = tuple(sorted(actions(f1) | actions(f2)))
    props = tuple(sorted(free_vars(f1) | free_vars(f2)))
    if len(acts) > budget.max_actions:
        raise BudgetError(f"formulas use {len(acts)} actions, budget allows {budget.max_actions}")
    if len(props) > budget.max_props:
        raise BudgetError(f"formulas use {len(props)} variables, budget allows {budget.max_props}")
    return acts, props


def _verified(M: KripkeModel, s, f1, f2) -> bool:
    a = eval_at(M, s, f1)
    b = eval_at(M, s, f2)
    ga = model_check_via_game(M, s, f1)
    gb = model_check_via_game(M, s, f2)
    if a != ga or b != gb:
        raise AssertionError("evaluation backends disagree on a witness")
    return a != b


def find_distinguishing_model(f1: Formula, f2: Formula, budget: SearchBudget | None = None) -> SearchResult:
    """Smallest model (in enumeration order) where ``f1`` and ``f2`` differ at some state."""
    budget = budget or SearchBudget()
    acts, props = _signature(f1, f2, budget)
    deadline = None if budget.time_limit is None else time.monotonic() + budget.time_limit
    bound = 0
    complete = True
    checked = 0
    for n in range(1, budget.max_states + 1):
        if code_bits(n, acts, props) > MAX_EXHAUSTIVE_BITS:
            complete = False
            break
        if deadline is not None and time.monotonic() > deadline:
            complete = False
            break
        codes = all_codes(n, acts, props, n <= ISO_PRUNE_MAX_STATES)
        for lo in range(0, len(codes), 1 << 16):
            chunk = codes[lo:lo + (1 << 16)]
            B = ModelBatch.from_codes(n, acts, props, chunk)
            diff = B.eval(f1) ^ B.eval(f2)
            checked += len(chunk)
            hits = np.nonzero(diff)[0]
            if len(hits):
                k = int(hits[0])
                M = B.model(k)
                d = int(diff[k])
                s = M.states[(d & -d).bit_length() - 1]
                if not _verified(M, s, f1, f2):
                    raise AssertionError("batch evaluator produced a spurious witness")
                return SearchResult((M, s), bound, False, 0, checked)
        bound = n
    # random tier: sizes not covered exhaustively, or a little beyond the bound
    lo_n = bound + 1
    hi_n = budget.max_states if not complete else budget.max_states + 3
    samples = 0
    if budget.samples and lo_n <= hi_n:
        for M in random_model_stream(acts, props, hi_n, budget.samples, budget.seed, lo_n):
            if deadline is not None and time.monotonic() > deadline:
                complete = False
                break
            m1 = M.mask(evaluate(M, f1))
            m2 = M.mask(evaluate(M, f2))
            samples += 1
            if m1 != m2:
                d = m1 ^ m2
                s = M.states[(d & -d).bit_length() - 1]
                if _verified(M, s, f1, f2):
                    return SearchResult((M, s), bound, complete, samples, checked + samples)
    return SearchResult(None, bound, complete, samples, checked + samples)


class VerdictKind(enum.Enum):
    IN_C0 = "InC0"
    IN_C1 = "InC1"
    EQUIVALENT_UP_TO_BOUND = "EquivalentToNormalFormUpToBound"
    NOT_CONTINUOUS = "NotContinuous"
    EXHAUSTED = "Exhausted"

    def __str__(self):
        return self.value


EXIT_CODES = {
    VerdictKind.IN_C0: 0,
    VerdictKind.IN_C1: 0,
    VerdictKind.EQUIVALENT_UP_TO_BOUND: 0,
    VerdictKind.NOT_CONTINUOUS: 1,
    VerdictKind.EXHAUSTED: 2,
}


@dataclass
class Verdict:
    kind: VerdictKind
    normal_form: Formula | None = None
    model: KripkeModel | None = None
    state: str | None = None
    bound: int | None = None
    budget: SearchBudget | None = None
    search: SearchResult | None = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    def to_dict(self) -> dict:
        from .kripke import dump_model
        from .syntax import to_text

        out = {"verdict": self.kind.value}
        if self.normal_form is not None:
            out["normal_form"] = to_text(self.normal_form)
        if self.bound is not None:
            out["bound"] = self.bound
        if self.model is not None:
            out["witness_state"] = self.state
            out["witness_model"] = dump_model(self.model)
        if self.search is not None:
            out["models_checked"] = self.search.models_checked
        return out


def check_continuity(f: Formula, x: str, budget: SearchBudget | None = None) -> Verdict:
    budget = budget or SearchBudget()
    if not is_positive_in(f, x):
        raise FormulaError(f"{x!r} must occur only positively")
    if in_C0(f, {x}):
        return Verdict(VerdictKind.IN_C0)
    if in_C(f, {x}):
        return Verdict(VerdictKind.IN_C1)
    nf = continuity_normal_form(f, x)
    res = find_distinguishing_model(f, nf, budget)
    if res.witness is not None:
        M, s = res.witness
        return Verdict(VerdictKind.NOT_CONTINUOUS, nf, M, s, res.exhaustive_bound, budget, res)
    kind = VerdictKind.EQUIVALENT_UP_TO_BOUND if res.complete else VerdictKind.EXHAUSTED
    return Verdict(kind, nf, bound=res.exhaustive_bound, budget=budget, search=res)


__all__ = [
    "BudgetError", "EXIT_CODES", "SearchBudget", "SearchResult", "Verdict",
    "VerdictKind", "check_continuity", "enumerate_models",
    "find_distinguishing_model", "random_model_stream",
]
