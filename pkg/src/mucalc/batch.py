"""Vectorised evaluation over many models with the same number of states.

A batch of ``B`` models on states ``0..n-1`` is stored as uint64 arrays:
successor masks ``succ[a][i]`` of shape ``(B,)`` and valuation masks
``val[p]``.  Every formula operation becomes a handful of numpy ops over
the whole batch, which is what makes exhaustive checks over all small
models affordable.

Models are encoded as integers: bit ``a*n*n + i*n + j`` is the edge
``i -> j`` of the ``a``-th action (sorted order), and bit
``A*n*n + p*n + i`` says the ``p``-th prop holds at ``i``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .formula import And, Box, Dia, Formula, Mu, NegVar, Nu, Or, Var, _Bot, _Top
from .kripke import EvaluationError, KripkeModel

U64 = np.uint64
MAX_EXHAUSTIVE_BITS = 24


@dataclass
class ModelBatch:
    n: int
    actions: tuple
    props: tuple
    succ: dict   # action -> list of n arrays (B,)
    val: dict    # prop -> array (B,)
    codes: np.ndarray | None = None

    @property
    def size(self) -> int:
        if self.codes is not None:
            return len(self.codes)
        for rows in self.succ.values():
            return len(rows[0]) if rows else 0
        for v in self.val.values():
            return len(v)
        return 0

    @property
    def full(self):
        return U64((1 << self.n) - 1)

    # -- construction ----------------------------------------------------

    @classmethod
    def from_codes(cls, n: int, actions, props, codes) -> ModelBatch:
        actions, props = tuple(sorted(actions)), tuple(sorted(props))
        codes = np.asarray(codes, dtype=U64)
        A = len(actions)
        one = U64(1)
        succ = {}
        for k, a in enumerate(actions):
            rows = []
            for i in range(n):
                row = np.zeros(len(codes), dtype=U64)
                for j in range(n):
                    bit = U64(k * n * n + i * n + j)
                    row |= ((codes >> bit) & one) << U64(j)
                rows.append(row)
            succ[a] = rows
        val = {}
        base = A * n * n
        for k, p in enumerate(props):
            m = np.zeros(len(codes), dtype=U64)
            for i in range(n):
                m |= ((codes >> U64(base + k * n + i)) & one) << U64(i)
            val[p] = m
        return cls(n, actions, props, succ, val, codes)

    @classmethod
    def from_models(cls, models, actions=None, props=None) -> ModelBatch:
        models = list(models)
        if not models:
            raise ValueError("empty batch")
        n = len(models[0].states)
        actions = tuple(sorted(actions if actions is not None else models[0].actions))
        props = tuple(sorted(props if props is not None else models[0].props))
        return cls.from_codes(n, actions, props, [encode_model(M, actions, props) for M in models])

    def model(self, k: int) -> KripkeModel:
        if self.codes is None:
            raise ValueError("batch was built without codes")
        return decode_model(int(self.codes[k]), self.n, self.actions, self.props)

    # -- evaluation ------------------------------------------------------

    def eval(self, f: Formula, env: dict | None = None) -> np.ndarray:
        """Denotation of ``f`` in each model, as an array of state bitmasks."""
        full = self.full
        B = self.size

        def lookup(n, env):
            if n in env:
                return env[n]
            if n in self.val:
                return self.val[n]
            raise EvaluationError(f"variable {n!r} has no value in the batch")

        def rows(a):
            if a not in self.succ:
                raise EvaluationError(f"action {a!r} is not declared in the batch")
            return self.succ[a]

        def go(g, env):
            match g:
                case Var(n):
                    return lookup(n, env)
                case NegVar(n):
                    return lookup(n, env) ^ full
                case _Top():
                    return np.full(B, full, dtype=U64)
                case _Bot():
                    return np.zeros(B, dtype=U64)
                case And(l, r):
                    return go(l, env) & go(r, env)
                case Or(l, r):
                    return go(l, env) | go(r, env)
                case Dia(a, b):
                    m = go(b, env)
                    out = np.zeros(B, dtype=U64)
                    for i, row in enumerate(rows(a)):
                        out |= ((row & m) != 0).astype(U64) << U64(i)
                    return out
                case Box(a, b):
                    m = go(b, env) ^ full
                    out = np.zeros(B, dtype=U64)
                    for i, row in enumerate(rows(a)):
                        out |= ((row & m) == 0).astype(U64) << U64(i)
                    return out
                case Mu(z, b) | Nu(z, b):
                    if isinstance(g, Mu):
                        cur = np.zeros(B, dtype=U64)
                    else:
                        cur = np.full(B, full, dtype=U64)
                    for _ in range(self.n + 2):
                        nxt = go(b, {**env, z: cur})
                        if np.array_equal(nxt, cur):
                            return cur
                        cur = nxt
                    raise EvaluationError(f"iteration for {z!r} does not stabilise")
            raise TypeError(g)

        return go(f, dict(env or {}))

    def approximants(self, f: Formula, x: str, env=None) -> list:
        """Iterates of ``f`` in ``x`` from empty until every model has stabilised."""
        env = dict(env or {})
        cur = np.zeros(self.size, dtype=U64)
        out = [cur]
        for _ in range(self.n + 2):
            nxt = self.eval(f, {**env, x: cur})
            out.append(nxt)
            if np.array_equal(nxt, cur):
                return out
            cur = nxt
        raise EvaluationError("approximants did not stabilise")


def code_bits(n: int, actions, props) -> int:
    return len(actions) * n * n + len(props) * n


def encode_model(M: KripkeModel, actions, props) -> int:
    n = len(M.states)
    idx = M.index
    code = 0
    for k, a in enumerate(actions):
        for s, t in M.relations.get(a, ()):
            code |= 1 << (k * n * n + idx[s] * n + idx[t])
    base = len(actions) * n * n
    for k, p in enumerate(props):
        for s in M.valuation.get(p, ()):
            code |= 1 << (base + k * n + idx[s])
    return code


def decode_model(code: int, n: int, actions, props) -> KripkeModel:
    states = tuple(f"s{i}" for i in range(n))
    rel = {}
    for k, a in enumerate(actions):
        rel[a] = frozenset((states[i], states[j]) for i in range(n) for j in range(n)
                           if code >> (k * n * n + i * n + j) & 1)
    base = len(actions) * n * n
    val = {p: frozenset(states[i] for i in range(n) if code >> (base + k * n + i) & 1)
           for k, p in enumerate(props)}
    return KripkeModel(states, rel, val)


def _permute_codes(codes: np.ndarray, n: int, A: int, P: int, perm) -> np.ndarray:
    out = np.zeros_like(codes)
    one = U64(1)
    for k in range(A):
        for i in range(n):
            for j in range(n):
                src = U64(k * n * n + i * n + j)
                dst = U64(k * n * n + perm[i] * n + perm[j])
                out |= ((codes >> src) & one) << dst
    base = A * n * n
    for k in range(P):
        for i in range(n):
            out |= ((codes >> U64(base + k * n + i)) & one) << U64(base + k * n + perm[i])
    return out


def all_codes(n: int, actions, props, prune_isomorphic: bool = False) -> np.ndarray:
    """Every model over the signature, in increasing code order.

    With ``prune_isomorphic`` only the least code of each isomorphism
    class is kept (its canonical labelling).
    """
    bits = code_bits(n, actions, props)
    if bits > MAX_EXHAUSTIVE_BITS:
        raise ValueError(f"{2 ** bits} models is too many to enumerate")
    codes = np.arange(1 << bits, dtype=U64)
    if prune_isomorphic and n > 1:
        keep = np.ones(len(codes), dtype=bool)
        for perm in itertools.permutations(range(n)):
            if perm == tuple(range(n)):
                continue
            keep &= codes <= _permute_codes(codes, n, len(actions), len(props), perm)
        codes = codes[keep]
    return codes


def all_models_batch(n: int, actions, props, prune_isomorphic: bool = False) -> ModelBatch:
    actions, props = tuple(sorted(actions)), tuple(sorted(props))
    return ModelBatch.from_codes(n, actions, props, all_codes(n, actions, props, prune_isomorphic))


__all__ = [
    "MAX_EXHAUSTIVE_BITS", "ModelBatch", "all_codes", "all_models_batch",
    "code_bits", "decode_model", "encode_model",
]
