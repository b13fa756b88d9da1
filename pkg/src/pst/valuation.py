"""Truth-value evaluation over algebra-valued and F-structure-valued models.

Modes:

* ``boolean`` / ``heyting`` - negation is the pseudo-complement x -> 0.
* ``comega``  - every negation occurrence is a non-deterministic choice
  from N_{value of the body}, with double negations forced below the
  unnegated value; choices at atoms are functional (one value per ground
  atom), choices at compound bodies are per-occurrence.
* ``n4``      - negation over compounds is defined structurally (De Morgan
  for meet/join, a & ~b for implications, cancellation for double
  negation); only negated atoms are non-deterministic choices.

Class quantifiers are truncated to an explicit scope of names; every
verdict records the rank bound and is rank-relative.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import FiniteHeytingAlgebra, check_refinable
from .errors import CapExceeded, PstError
from .fidel import FStructure, find_algebra_embedding
from .names import NameStore, enumerate_universe
from .syntax import (
    And,
    Bot,
    Eq,
    Exists,
    Forall,
    Formula,
    FuncApp,
    Imp,
    Mem,
    NameConst,
    Neg,
    NegOverQuantifier,
    Or,
    Pred,
    Term,
    Var,
    formula_to_text,
    free_vars,
    is_negation_free,
    is_restricted,
    substitute,
)

MODES = ("boolean", "heyting", "comega", "n4")
ASSIGNMENT_CAP = 50_000


class EvalError(PstError):
    pass


class UncoveredNegation(EvalError):
    def __init__(self, what: str):
        super().__init__(f"negation assignment does not cover {what}")
        self.what = what


class InvalidAssignment(EvalError):
    pass


class NotRestricted(EvalError):
    pass


class NotNegationFree(EvalError):
    pass


class NotRefinable(EvalError):
    pass


@dataclass(frozen=True)
class SetModel:
    """A name universe with an algebra (or F-structure) and a quantifier
    scope.  Immutable; evaluation state lives in EvalContext."""

    algebra: FiniteHeytingAlgebra
    structure: FStructure | None
    store: NameStore
    rank_bound: int
    mode: str
    scope: tuple[int, ...]
    bounded_opt: bool = False
    prop_values: Mapping[str, int] = field(default_factory=dict)

    def neg_options(self, value: int) -> tuple[int, ...]:
        if self.structure is None:
            return (self.algebra.imp_(value, self.algebra.bottom),)
        return self.structure.negs[value]

    def with_flags(self, bounded_opt: bool | None = None) -> "SetModel":
        return SetModel(
            self.algebra,
            self.structure,
            self.store,
            self.rank_bound,
            self.mode,
            self.scope,
            self.bounded_opt if bounded_opt is None else bounded_opt,
            self.prop_values,
        )


def make_model(
    structure: FStructure | FiniteHeytingAlgebra,
    store: NameStore,
    rank_bound: int,
    mode: str | None = None,
    scope: Sequence[int] | None = None,
    bounded_opt: bool = False,
    prop_values: Mapping[str, int] | None = None,
) -> SetModel:
    """Build a model; the scope defaults to all names of rank <= bound."""
    if isinstance(structure, FStructure):
        fs: FStructure | None = structure
        algebra = structure.algebra
        inferred = structure.kind
    else:
        fs = None
        algebra = structure
        inferred = "boolean" if structure.boolean_flag else "heyting"
    mode = mode or inferred
    if mode not in MODES:
        raise EvalError(f"unknown mode {mode!r}")
    if mode in ("comega", "n4"):
        if fs is None:
            raise EvalError(f"mode {mode!r} needs an F-structure")
        if fs.kind != mode:
            raise EvalError(f"structure kind {fs.kind!r} inconsistent with mode {mode!r}")
    if mode == "boolean" and not algebra.boolean_flag:
        raise EvalError("boolean mode over a non-Boolean algebra")
    if scope is None:
        scope = enumerate_universe(store, algebra, rank_bound)
    return SetModel(
        algebra,
        fs,
        store,
        rank_bound,
        mode,
        tuple(scope),
        bounded_opt,
        dict(prop_values or {}),
    )


# --- negation assignments ------------------------------------------------------

AtomKey = tuple
OccKey = tuple


@dataclass(frozen=True)
class Assignment:
    """A concrete resolution of the non-deterministic negation choices."""

    atoms: tuple[tuple[AtomKey, int], ...] = ()
    occs: tuple[tuple[OccKey, int], ...] = ()

    def atom(self, key: AtomKey) -> int | None:
        for k, v in self.atoms:
            if k == key:
                return v
        return None

    def occ(self, key: OccKey) -> int | None:
        for k, v in self.occs:
            if k == key:
                return v
        return None

    def fingerprint(self) -> str:
        if not self.atoms and not self.occs:
            return "none"
        blob = repr((tuple(sorted(self.atoms)), tuple(sorted(self.occs))))
        return hashlib.sha1(blob.encode()).hexdigest()[:12]


EMPTY_ASSIGNMENT = Assignment()


def _atom_key(node: Formula, env: Mapping[str, int]) -> AtomKey:
    if isinstance(node, Bot):
        return ("bot",)
    if isinstance(node, Eq):
        a = _resolve(node.left, env)
        b = _resolve(node.right, env)
        lo, hi = min(a, b), max(a, b)  # equality is symmetric by construction
        return ("eq", lo, hi)
    if isinstance(node, Mem):
        return ("mem", _resolve(node.left, env), _resolve(node.right, env))
    if isinstance(node, Pred):
        if node.args:
            raise EvalError("predicate atoms with arguments need a theta structure")
        return ("pred", node.sym)
    raise EvalError(f"not an atom: {node!r}")


def _resolve(t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, NameConst):
        return t.ref
    if isinstance(t, Var):
        if t.name not in env:
            raise EvalError(f"free variable {t.name!r} in a closed evaluation")
        return env[t.name]
    raise EvalError("function terms have no set-model interpretation")


_ATOMIC = (Bot, Mem, Eq, Pred)


# --- the evaluation context ------------------------------------------------------


class EvalContext:
    """Owns the memo tables for the mutual membership/equality recursion.

    The memoised values are negation-free, hence assignment-independent and
    safe to share across assignment enumeration.
    """

    def __init__(self, model: SetModel, use_memo: bool = True):
        self.model = model
        self.alg = model.algebra
        self.use_memo = use_memo
        self._eq: dict[tuple[int, int], int] = {}
        self._mem: dict[tuple[int, int], int] = {}

    # ||u ~ v|| -- symmetric by construction, memoised on the sorted pair
    def eval_eq(self, u: int, v: int) -> int:
        key = (u, v) if u <= v else (v, u)
        if self.use_memo and key in self._eq:
            return self._eq[key]
        alg = self.alg
        store = self.model.store
        total = alg.top
        for x, a in store.get(u).entries:
            total = alg.meet_(total, alg.imp_(a, self.eval_mem(x, v)))
        for y, b in store.get(v).entries:
            total = alg.meet_(total, alg.imp_(b, self.eval_mem(y, u)))
        if self.use_memo:
            self._eq[key] = total
        return total

    # ||u in v||
    def eval_mem(self, u: int, v: int) -> int:
        key = (u, v)
        if self.use_memo and key in self._mem:
            return self._mem[key]
        alg = self.alg
        store = self.model.store
        total = alg.bottom
        for x, a in store.get(v).entries:
            total = alg.join_(total, alg.meet_(a, self.eval_eq(x, u)))
        if self.use_memo:
            self._mem[key] = total
        return total

    def atom_value(self, key: AtomKey) -> int:
        if key[0] == "bot":
            return self.alg.bottom
        if key[0] == "eq":
            return self.eval_eq(key[1], key[2])
        if key[0] == "mem":
            return self.eval_mem(key[1], key[2])
        if key[0] == "pred":
            sym = key[1]
            if sym not in self.model.prop_values:
                raise EvalError(f"no value for propositional atom {sym!r}")
            return self.model.prop_values[sym]
        raise EvalError(f"bad atom key {key!r}")


# --- sentence evaluation ----------------------------------------------------------


def eval_sentence(
    phi: Formula,
    model: SetModel,
    assignment: Assignment = EMPTY_ASSIGNMENT,
    ctx: EvalContext | None = None,
) -> int:
    """Truth value of a closed formula under a concrete assignment."""
    ctx = ctx or EvalContext(model)
    return _eval(phi, {}, (), (), model, assignment, ctx)


def eval_instance(
    phi: Formula,
    bindings: Sequence[tuple[str, int]],
    model: SetModel,
    assignment: Assignment = EMPTY_ASSIGNMENT,
    ctx: EvalContext | None = None,
) -> int:
    """Evaluate an open formula with variables bound to names, using the
    same occurrence keys as evaluating it inside nested universal closures
    in the given binding order.  Assignments enumerated for that closure
    therefore cover these instances."""
    ctx = ctx or EvalContext(model)
    env = dict(bindings)
    trail = tuple(nid for _, nid in bindings)
    path = (0,) * len(bindings)
    return _eval(phi, env, trail, path, model, assignment, ctx)


def closure_assignments(
    phi: Formula,
    binding_vars: Sequence[str],
    model: SetModel,
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> list[Assignment]:
    """Assignments covering every scope instance of an open formula, keyed
    compatibly with ``eval_instance``."""
    closed: Formula = phi
    for var in reversed(binding_vars):
        closed = Forall(var, closed)
    return enumerate_assignments(closed, model, ctx, cap)


def _eval(
    node: Formula,
    env: dict[str, int],
    trail: tuple[int, ...],
    path: tuple[int, ...],
    model: SetModel,
    asg: Assignment,
    ctx: EvalContext,
) -> int:
    alg = model.algebra
    if isinstance(node, _ATOMIC):
        return ctx.atom_value(_atom_key(node, env))
    if isinstance(node, And):
        return alg.meet_(
            _eval(node.left, env, trail, path + (0,), model, asg, ctx),
            _eval(node.right, env, trail, path + (1,), model, asg, ctx),
        )
    if isinstance(node, Or):
        return alg.join_(
            _eval(node.left, env, trail, path + (0,), model, asg, ctx),
            _eval(node.right, env, trail, path + (1,), model, asg, ctx),
        )
    if isinstance(node, Imp):
        return alg.imp_(
            _eval(node.left, env, trail, path + (0,), model, asg, ctx),
            _eval(node.right, env, trail, path + (1,), model, asg, ctx),
        )
    if isinstance(node, Neg):
        return _eval_neg(node, env, trail, path, model, asg, ctx)
    if isinstance(node, (Forall, Exists)):
        bounded = _bounded_parts(node) if model.bounded_opt else None
        if bounded is not None:
            bound_term, body = bounded
            u = _resolve(bound_term, env)
            vals = []
            for child, a in model.store.get(u).entries:
                env2 = dict(env)
                env2[node.var] = child
                sub = _eval(body, env2, trail + (child,), path + (0, 1), model, asg, ctx)
                if isinstance(node, Forall):
                    vals.append(alg.imp_(a, sub))
                else:
                    vals.append(alg.meet_(a, sub))
            return alg.meet_all(vals) if isinstance(node, Forall) else alg.join_all(vals)
        vals = []
        for nid in model.scope:
            env2 = dict(env)
            env2[node.var] = nid
            vals.append(_eval(node.body, env2, trail + (nid,), path + (0,), model, asg, ctx))
        return alg.meet_all(vals) if isinstance(node, Forall) else alg.join_all(vals)
    raise EvalError(f"cannot evaluate {node!r}")


def _bounded_parts(node: Formula) -> tuple[Term, Formula] | None:
    """Match forall x . x in t -> body  /  exists x . x in t & body."""
    if isinstance(node, Forall) and isinstance(node.body, Imp):
        guard = node.body.left
        if (
            isinstance(guard, Mem)
            and guard.left == Var(node.var)
            and not _mentions_var(guard.right, node.var)
        ):
            return guard.right, node.body.right
    if isinstance(node, Exists) and isinstance(node.body, And):
        guard = node.body.left
        if (
            isinstance(guard, Mem)
            and guard.left == Var(node.var)
            and not _mentions_var(guard.right, node.var)
        ):
            return guard.right, node.body.right
    return None


def _mentions_var(t: Term, var: str) -> bool:
    if isinstance(t, Var):
        return t.name == var
    if isinstance(t, FuncApp):
        return any(_mentions_var(a, var) for a in t.args)
    return False


def _eval_neg(
    node: Neg,
    env: dict[str, int],
    trail: tuple[int, ...],
    path: tuple[int, ...],
    model: SetModel,
    asg: Assignment,
    ctx: EvalContext,
) -> int:
    alg = model.algebra
    body = node.body
    if model.mode in ("boolean", "heyting"):
        return alg.imp_(
            _eval(body, env, trail, path + (0,), model, asg, ctx), alg.bottom
        )
    if model.mode == "n4":
        if isinstance(body, And):
            return alg.join_(
                _eval_neg(Neg(body.left), env, trail, path, model, asg, ctx),
                _eval_neg(Neg(body.right), env, trail, path, model, asg, ctx),
            )
        if isinstance(body, Or):
            return alg.meet_(
                _eval_neg(Neg(body.left), env, trail, path, model, asg, ctx),
                _eval_neg(Neg(body.right), env, trail, path, model, asg, ctx),
            )
        if isinstance(body, Imp):
            return alg.meet_(
                _eval(body.left, env, trail, path, model, asg, ctx),
                _eval_neg(Neg(body.right), env, trail, path, model, asg, ctx),
            )
        if isinstance(body, Neg):
            return _eval(body.body, env, trail, path, model, asg, ctx)
        if isinstance(body, (Forall, Exists)):
            raise NegOverQuantifier(body)
        key = _atom_key(body, env)
        choice = asg.atom(key)
        if choice is None:
            raise UncoveredNegation(f"atom {key}")
        base = ctx.atom_value(key)
        if choice not in model.neg_options(base):
            raise InvalidAssignment(f"choice {choice} not in N_{base} for {key}")
        return choice
    # comega: every negation occurrence is a choice
    if isinstance(body, _ATOMIC):
        key = _atom_key(body, env)
        choice = asg.atom(key)
        if choice is None:
            raise UncoveredNegation(f"atom {key}")
        base = ctx.atom_value(key)
        if choice not in model.neg_options(base):
            raise InvalidAssignment(f"choice {choice} not in N_{base} for {key}")
        return choice
    occ_key = ("occ", path, trail)
    choice = asg.occ(occ_key)
    if choice is None:
        raise UncoveredNegation(f"occurrence at path {path}, bindings {trail}")
    base = _eval(body, env, trail, path + (0,), model, asg, ctx)
    if choice not in model.neg_options(base):
        raise InvalidAssignment(f"choice {choice} not in N_{base} at {path}")
    if isinstance(body, Neg):
        inner = _eval(body.body, env, trail, path + (0, 0), model, asg, ctx)
        if not model.algebra.le(choice, inner):
            raise InvalidAssignment(
                f"double negation value {choice} exceeds {inner} at {path}"
            )
    return choice


# --- assignment enumeration --------------------------------------------------------


def enumerate_assignments(
    phi: Formula,
    model: SetModel,
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> list[Assignment]:
    """All admissible negation assignments for a closed formula, in a
    deterministic order.  The same ground atom receives one value across
    the whole formula; comega compound occurrences are enumerated
    per-occurrence with the double-negation bound enforced."""
    ctx = ctx or EvalContext(model)
    if model.mode in ("boolean", "heyting"):
        return [EMPTY_ASSIGNMENT]
    atom_keys: list[AtomKey] = []
    _collect_atom_keys(phi, {}, model, atom_keys)
    atom_keys = sorted(set(atom_keys))
    option_lists = []
    for key in atom_keys:
        base = ctx.atom_value(key)
        option_lists.append([(key, c) for c in model.neg_options(base)])
    total = 1
    for opts in option_lists:
        total *= len(opts)
        if total > cap:
            raise CapExceeded(f"more than {cap} atom assignments")
    out: list[Assignment] = []
    for combo in itertools.product(*option_lists):
        atoms = tuple(combo)
        if model.mode == "n4":
            out.append(Assignment(atoms=atoms))
            continue
        base_asg = Assignment(atoms=atoms)
        for occs in _occ_space(phi, {}, (), (), model, base_asg, ctx, cap):
            out.append(Assignment(atoms=atoms, occs=tuple(sorted(occs.items()))))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} assignments")
    return out


def _collect_atom_keys(
    node: Formula,
    env: dict[str, int],
    model: SetModel,
    out: list[AtomKey],
) -> None:
    if isinstance(node, _ATOMIC):
        return
    if isinstance(node, (And, Or, Imp)):
        _collect_atom_keys(node.left, env, model, out)
        _collect_atom_keys(node.right, env, model, out)
        return
    if isinstance(node, (Forall, Exists)):
        for nid in model.scope:
            env2 = dict(env)
            env2[node.var] = nid
            _collect_atom_keys(node.body, env2, model, out)
        return
    if isinstance(node, Neg):
        body = node.body
        if isinstance(body, _ATOMIC):
            out.append(_atom_key(body, env))
            return
        if model.mode == "n4":
            if isinstance(body, And) or isinstance(body, Or):
                _collect_atom_keys(Neg(body.left), env, model, out)
                _collect_atom_keys(Neg(body.right), env, model, out)
                return
            if isinstance(body, Imp):
                _collect_atom_keys(body.left, env, model, out)
                _collect_atom_keys(Neg(body.right), env, model, out)
                return
            if isinstance(body, Neg):
                _collect_atom_keys(body.body, env, model, out)
                return
            raise NegOverQuantifier(body)
        # comega: the occurrence itself is enumerated later; atoms inside
        # the body still need functional choices when negated deeper.
        _collect_atom_keys(body, env, model, out)
        return
    raise EvalError(f"cannot analyse {node!r}")


def _occ_space(
    node: Formula,
    env: dict[str, int],
    trail: tuple[int, ...],
    path: tuple[int, ...],
    model: SetModel,
    base_asg: Assignment,
    ctx: EvalContext,
    cap: int,
) -> list[dict[OccKey, int]]:
    """comega only: all per-occurrence choice dictionaries for compound
    negations inside node, given fixed atom choices."""
    if isinstance(node, _ATOMIC):
        return [{}]
    if isinstance(node, (And, Or, Imp)):
        lefts = _occ_space(node.left, env, trail, path + (0,), model, base_asg, ctx, cap)
        rights = _occ_space(node.right, env, trail, path + (1,), model, base_asg, ctx, cap)
        out = []
        for dl in lefts:
            for dr in rights:
                merged = dict(dl)
                merged.update(dr)
                out.append(merged)
                if len(out) > cap:
                    raise CapExceeded(f"more than {cap} occurrence choices")
        return out
    if isinstance(node, (Forall, Exists)):
        spaces: list[dict[OccKey, int]] = [{}]
        for nid in model.scope:
            env2 = dict(env)
            env2[node.var] = nid
            subs = _occ_space(node.body, env2, trail + (nid,), path + (0,), model, base_asg, ctx, cap)
            merged_out = []
            for acc in spaces:
                for d in subs:
                    merged = dict(acc)
                    merged.update(d)
                    merged_out.append(merged)
                    if len(merged_out) > cap:
                        raise CapExceeded(f"more than {cap} occurrence choices")
            spaces = merged_out
        return spaces
    if isinstance(node, Neg):
        body = node.body
        if isinstance(body, _ATOMIC):
            return [{}]
        inner = _occ_space(body, env, trail, path + (0,), model, base_asg, ctx, cap)
        key = ("occ", path, trail)
        out = []
        for d in inner:
            asg = Assignment(atoms=base_asg.atoms, occs=tuple(sorted(d.items())))
            base = _eval(body, env, trail, path + (0,), model, asg, ctx)
            options = model.neg_options(base)
            if isinstance(body, Neg):
                limit = _eval(body.body, env, trail, path + (0, 0), model, asg, ctx)
                options = tuple(c for c in options if model.algebra.le(c, limit))
            for c in options:
                merged = dict(d)
                merged[key] = c
                out.append(merged)
                if len(out) > cap:
                    raise CapExceeded(f"more than {cap} occurrence choices")
        return out
    raise EvalError(f"cannot analyse {node!r}")


# --- verdicts -----------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    subject: str
    mode: str
    quantification: str | None
    rank_bound: int
    value_lo: int
    value_hi: int
    valid: bool
    n_assignments: int = 1
    witness: Assignment | None = None
    falsifier: Assignment | None = None
    notes: tuple[str, ...] = ()
    detail: tuple[str, ...] = ()

    def result_line(self) -> str:
        quant = self.quantification or "none"
        value = self.value_lo if quant == "all_assignments" else self.value_hi
        if quant == "some_assignment" and self.witness is not None:
            fp = self.witness.fingerprint()
        elif self.falsifier is not None:
            fp = self.falsifier.fingerprint()
        else:
            fp = "none"
        return (
            f"RESULT mode={self.mode} rank={self.rank_bound} quant={quant} "
            f"value={value} valid={'yes' if self.valid else 'no'} assignment={fp}"
        )


QUANTIFICATIONS = ("all_assignments", "some_assignment")


def check_valid(
    phi: Formula,
    model: SetModel,
    quantification: str = "all_assignments",
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> Verdict:
    """Rank-relative validity: the truth value must be top, quantified over
    negation assignments as requested."""
    if quantification not in QUANTIFICATIONS:
        raise EvalError(f"unknown quantification {quantification!r}")
    ctx = ctx or EvalContext(model)
    assignments = enumerate_assignments(phi, model, ctx, cap)
    alg = model.algebra
    lo, hi = alg.top, alg.bottom
    witness = falsifier = None
    for asg in assignments:
        v = eval_sentence(phi, model, asg, ctx)
        lo = alg.meet_(lo, v)
        hi = alg.join_(hi, v)
        if v == alg.top and witness is None:
            witness = asg
        if v != alg.top and falsifier is None:
            falsifier = asg
    valid = (falsifier is None) if quantification == "all_assignments" else (witness is not None)
    return Verdict(
        subject=formula_to_text(phi),
        mode=model.mode,
        quantification=quantification,
        rank_bound=model.rank_bound,
        value_lo=lo,
        value_hi=hi,
        valid=valid,
        n_assignments=len(assignments),
        witness=witness,
        falsifier=falsifier,
        notes=("rank-relative",),
    )


def check_leibniz(
    model: SetModel,
    formula_family: Sequence[tuple[str, Formula]],
    rank: int,
    quantification: str = "all_assignments",
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> Verdict:
    """Check ||u ~ v|| <= ||phi(u) -> phi(v)|| for every name pair of rank
    <= rank and every family member.

    Family members are (variable, formula) pairs with exactly that one
    free variable.  For formulas with negation the inequality is
    quantified over assignments per the requested mode; the first
    violating (u, v, phi, assignment) is reported.
    """
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    for var, phi in formula_family:
        if free_vars(phi) != {var}:
            raise EvalError(
                f"family member {formula_to_text(phi)} must have exactly one "
                f"free variable {var!r}"
            )
    names = [nid for nid in model.scope if model.store.get(nid).rank <= rank]
    lo = alg.top
    first_violation: tuple[str, ...] = ()
    valid = True
    for u in names:
        for v in names:
            eq_uv = ctx.eval_eq(u, v)
            for var, phi in formula_family:
                test = Imp(
                    substitute(phi, var, NameConst(u)),
                    substitute(phi, var, NameConst(v)),
                )
                assignments = enumerate_assignments(test, model, ctx, cap)
                ok_some = False
                for asg in assignments:
                    val = eval_sentence(test, model, asg, ctx)
                    holds = alg.le(eq_uv, val)
                    lo = alg.meet_(lo, alg.imp_(eq_uv, val))
                    if holds:
                        ok_some = True
                    elif quantification == "all_assignments":
                        if valid:
                            first_violation = (
                                f"u=#{u}",
                                f"v=#{v}",
                                f"phi={formula_to_text(phi)}",
                                f"assignment={asg.fingerprint()}",
                            )
                        valid = False
                if quantification == "some_assignment" and not ok_some:
                    if valid:
                        first_violation = (
                            f"u=#{u}",
                            f"v=#{v}",
                            f"phi={formula_to_text(phi)}",
                            "assignment=all-fail",
                        )
                    valid = False
    return Verdict(
        subject="leibniz",
        mode=model.mode,
        quantification=quantification,
        rank_bound=rank,
        value_lo=lo,
        value_hi=lo,
        valid=valid,
        notes=("rank-relative",),
        detail=first_violation,
    )


# --- theta structures (general predicate semantics) -----------------------------------


@dataclass(frozen=True)
class ThetaStructure:
    """An F-structure over a finite first-order domain: predicate tables
    into the algebra, function tables into the domain, and a table of
    chosen negation values for each atom."""

    fstructure: FStructure
    domain: tuple
    preds: Mapping[str, Mapping[tuple, int]]
    funcs: Mapping[str, Mapping[tuple, object]]
    neg_preds: Mapping[str, Mapping[tuple, int]]

    def __post_init__(self) -> None:
        for sym, table in self.neg_preds.items():
            if sym not in self.preds:
                raise EvalError(f"negation table for unknown predicate {sym!r}")
            for args, nv in table.items():
                base = self.preds[sym][args]
                if nv not in self.fstructure.negs[base]:
                    raise InvalidAssignment(
                        f"~{sym}{args} = {nv} not in N_{base}"
                    )

    @property
    def algebra(self) -> FiniteHeytingAlgebra:
        return self.fstructure.algebra


def eval_qn4(
    phi: Formula,
    theta: ThetaStructure,
    valuation: Mapping[str, object] | None = None,
) -> int:
    """Truth value over a theta structure; negation is pushed through
    compounds structurally and read from the negated-atom table at atoms."""
    v = dict(valuation or {})
    return _eval_theta(phi, theta, v, negated=False)


def _theta_term(t: Term, theta: ThetaStructure, v: Mapping[str, object]) -> object:
    if isinstance(t, Var):
        if t.name not in v:
            raise EvalError(f"unassigned variable {t.name!r}")
        return v[t.name]
    if isinstance(t, FuncApp):
        args = tuple(_theta_term(a, theta, v) for a in t.args)
        try:
            return theta.funcs[t.sym][args]
        except KeyError as exc:
            raise EvalError(f"no interpretation for {t.sym}{args}") from exc
    raise EvalError("name constants have no theta interpretation")


def _eval_theta(phi: Formula, theta: ThetaStructure, v: dict, negated: bool) -> int:
    alg = theta.algebra
    if isinstance(phi, Bot):
        if negated:
            raise UncoveredNegation("~bot has no clause")
        return alg.bottom
    if isinstance(phi, Pred):
        args = tuple(_theta_term(a, theta, v) for a in phi.args)
        table = theta.neg_preds if negated else theta.preds
        try:
            return table[phi.sym][args]
        except KeyError as exc:
            if negated:
                raise UncoveredNegation(f"~{phi.sym}{args}") from exc
            raise EvalError(f"no table for {phi.sym}{args}") from exc
    if isinstance(phi, (Mem, Eq)):
        raise EvalError("set atoms have no theta interpretation")
    if isinstance(phi, And):
        l = _eval_theta(phi.left, theta, v, negated)
        r = _eval_theta(phi.right, theta, v, negated)
        return alg.join_(l, r) if negated else alg.meet_(l, r)
    if isinstance(phi, Or):
        l = _eval_theta(phi.left, theta, v, negated)
        r = _eval_theta(phi.right, theta, v, negated)
        return alg.meet_(l, r) if negated else alg.join_(l, r)
    if isinstance(phi, Imp):
        if negated:
            return alg.meet_(
                _eval_theta(phi.left, theta, v, False),
                _eval_theta(phi.right, theta, v, True),
            )
        return alg.imp_(
            _eval_theta(phi.left, theta, v, False),
            _eval_theta(phi.right, theta, v, False),
        )
    if isinstance(phi, Neg):
        return _eval_theta(phi.body, theta, v, not negated)
    if isinstance(phi, (Forall, Exists)):
        if negated:
            raise NegOverQuantifier(phi)
        vals = []
        for a in theta.domain:
            v2 = dict(v)
            v2[phi.var] = a
            vals.append(_eval_theta(phi.body, theta, v2, False))
        return alg.meet_all(vals) if isinstance(phi, Forall) else alg.join_all(vals)
    raise EvalError(f"cannot evaluate {phi!r}")


def theta_true(phi: Formula, theta: ThetaStructure) -> bool:
    """True in the structure: top under every variable valuation."""
    vs = sorted(free_vars(phi))
    for combo in itertools.product(theta.domain, repeat=len(vs)):
        if eval_qn4(phi, theta, dict(zip(vs, combo))) != theta.algebra.top:
            return False
    return True


# --- subalgebra absoluteness -----------------------------------------------------------


def transport_name(
    nid: int,
    sub_store: NameStore,
    super_store: NameStore,
    embedding: Sequence[int],
    memo: dict[int, int] | None = None,
) -> int:
    """Copy a name across stores, mapping elements through the embedding."""
    memo = memo if memo is not None else {}
    if nid in memo:
        return memo[nid]
    entries = [
        (transport_name(c, sub_store, super_store, embedding, memo), embedding[e])
        for c, e in sub_store.get(nid).entries
    ]
    out = super_store.mk_name(entries)
    memo[nid] = out
    return out


def check_subalgebra_absolute(
    phi: Formula,
    sub_model: SetModel,
    super_model: SetModel,
    embedding: Sequence[int] | None = None,
    ctx_sub: EvalContext | None = None,
    ctx_super: EvalContext | None = None,
) -> Verdict:
    """Restricted negation-free sentences take the same value in a model
    over a subalgebra and in the ambient model (names transported along
    the embedding)."""
    if not is_negation_free(phi):
        raise NotNegationFree(formula_to_text(phi))
    if not is_restricted(phi):
        raise NotRestricted(formula_to_text(phi))
    if free_vars(phi):
        raise EvalError("absoluteness check needs a closed formula")
    if embedding is None:
        embedding = find_algebra_embedding(sub_model.algebra, super_model.algebra)
        if embedding is None:
            raise EvalError("no algebra embedding found")
    memo: dict[int, int] = {}

    def move(node: Formula) -> Formula:
        if isinstance(node, Mem):
            return Mem(_move_term(node.left), _move_term(node.right))
        if isinstance(node, Eq):
            return Eq(_move_term(node.left), _move_term(node.right))
        if isinstance(node, (And, Or, Imp)):
            return type(node)(move(node.left), move(node.right))
        if isinstance(node, (Forall, Exists)):
            return type(node)(node.var, move(node.body))
        if isinstance(node, Bot):
            return node
        raise EvalError(f"cannot transport {node!r}")

    def _move_term(t: Term) -> Term:
        if isinstance(t, NameConst):
            return NameConst(
                transport_name(t.ref, sub_model.store, super_model.store, embedding, memo)
            )
        return t

    sub_eval = sub_model.with_flags(bounded_opt=True)
    super_eval = super_model.with_flags(bounded_opt=True)
    v_sub = eval_sentence(phi, sub_eval, EMPTY_ASSIGNMENT, ctx_sub)
    v_super = eval_sentence(move(phi), super_eval, EMPTY_ASSIGNMENT, ctx_super)
    ok = embedding[v_sub] == v_super
    return Verdict(
        subject=f"absolute:{formula_to_text(phi)}",
        mode=super_model.mode,
        quantification=None,
        rank_bound=sub_model.rank_bound,
        value_lo=v_super,
        value_hi=v_super,
        valid=ok,
        notes=("rank-relative",),
        detail=() if ok else (f"sub={v_sub}", f"super={v_super}",),
    )


# --- maximum principle ------------------------------------------------------------------


# --- hat embedding laws -------------------------------------------------------------


def hf_meta_eval(phi: Formula, env: Mapping[str, object]) -> bool:
    """Meta-level truth of a restricted negation-free formula over actual
    hereditarily finite sets (variables bound to HFSet values)."""

    def walk(node: Formula, e: dict) -> bool:
        if isinstance(node, Bot):
            return False
        if isinstance(node, Mem):
            return _hf_of(node.left, e) in _hf_of(node.right, e).elems
        if isinstance(node, Eq):
            return _hf_of(node.left, e) == _hf_of(node.right, e)
        if isinstance(node, And):
            return walk(node.left, e) and walk(node.right, e)
        if isinstance(node, Or):
            return walk(node.left, e) or walk(node.right, e)
        if isinstance(node, Imp):
            return (not walk(node.left, e)) or walk(node.right, e)
        if isinstance(node, Forall):
            parts = _bounded_parts(node)
            if parts is None:
                raise NotRestricted(formula_to_text(node))
            bound, body = parts
            return all(
                walk(body, {**e, node.var: m}) for m in _hf_of(bound, e).elems
            )
        if isinstance(node, Exists):
            parts = _bounded_parts(node)
            if parts is None:
                raise NotRestricted(formula_to_text(node))
            bound, body = parts
            return any(
                walk(body, {**e, node.var: m}) for m in _hf_of(bound, e).elems
            )
        raise EvalError(f"meta evaluation cannot handle {node!r}")

    def _hf_of(t: Term, e: dict):
        if isinstance(t, Var):
            if t.name not in e:
                raise EvalError(f"unbound meta variable {t.name!r}")
            return e[t.name]
        raise EvalError("meta evaluation handles variables only")

    return walk(phi, dict(env))


def check_hat_lemma(
    model: SetModel,
    max_hf_rank: int = 3,
    ctx: EvalContext | None = None,
) -> Verdict:
    """Laws of the check-name embedding of hereditarily finite sets.

    (i)  ||u in hat(v)|| equals the join over x in v of ||u ~ hat(x)||,
         for every name u of rank <= 2;
    (ii) membership and equality of HF sets transfer exactly: u in v iff
         ||hat(u) in hat(v)|| = top, and u = v iff ||hat(u) ~ hat(v)|| = top;
    (iv) restricted negation-free instances hold of HF sets iff their hat
         images get value top.
    """
    from .names import all_hf_sets, hat_embed

    if model.mode not in ("boolean", "heyting"):
        raise EvalError("hat lemma checks run in boolean or heyting mode")
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    hf_sets = all_hf_sets(max_hf_rank)
    hats = {s: hat_embed(s, store, alg) for s in hf_sets}
    failures: list[str] = []

    names_r2 = enumerate_universe(store, alg, 2)
    for u in names_r2:
        for v in hf_sets:
            lhs = ctx.eval_mem(u, hats[v])
            rhs = alg.join_all(ctx.eval_eq(u, hats[x]) for x in v.elems)
            if lhs != rhs:
                failures.append(f"(i) u=#{u} v={v} lhs={lhs} rhs={rhs}")

    for u in hf_sets:
        for v in hf_sets:
            mem_meta = u in v.elems
            mem_model = ctx.eval_mem(hats[u], hats[v]) == alg.top
            if mem_meta != mem_model:
                failures.append(f"(ii-mem) {u} in {v}: meta={mem_meta} model={mem_model}")
            eq_meta = u == v
            eq_model = ctx.eval_eq(hats[u], hats[v]) == alg.top
            if eq_meta != eq_model:
                failures.append(f"(ii-eq) {u} = {v}: meta={eq_meta} model={eq_model}")

    small = [s for s in hf_sets if s.rank() <= 2]
    transfer = [
        ("x", "y", Mem(Var("x"), Var("y"))),
        ("x", "y", Eq(Var("x"), Var("y"))),
        ("x", "y", Forall("w", Imp(Mem(Var("w"), Var("x")), Mem(Var("w"), Var("y"))))),
        ("x", "y", Exists("w", And(Mem(Var("w"), Var("x")), Eq(Var("w"), Var("y"))))),
    ]
    eval_model = model.with_flags(bounded_opt=True)
    for vx, vy, template in transfer:
        for sx in small:
            for sy in small:
                meta = hf_meta_eval(template, {vx: sx, vy: sy})
                inst = substitute(
                    substitute(template, vx, NameConst(hats[sx])),
                    vy,
                    NameConst(hats[sy]),
                )
                val = eval_sentence(inst, eval_model, EMPTY_ASSIGNMENT, ctx)
                if meta != (val == alg.top):
                    failures.append(
                        f"(iv) {formula_to_text(template)} on {sx},{sy}: "
                        f"meta={meta} value={val}"
                    )

    return Verdict(
        subject="hat-lemma",
        mode=model.mode,
        quantification=None,
        rank_bound=model.rank_bound,
        value_lo=alg.top if not failures else alg.bottom,
        value_hi=alg.top if not failures else alg.bottom,
        valid=not failures,
        notes=("rank-relative",),
        detail=tuple(failures[:5]),
    )


def check_maximum_principle(
    model: SetModel,
    phi: Formula,
    var: str,
    ctx: EvalContext | None = None,
) -> Verdict:
    """If the existential closure holds with value top at this scope, hunt
    for a single scope name witnessing it pointwise."""
    if not is_negation_free(phi):
        raise NotNegationFree(formula_to_text(phi))
    if free_vars(phi) != {var}:
        raise EvalError("maximum principle needs exactly one free variable")
    if not check_refinable(model.algebra).refinable:
        raise NotRefinable("algebra failed the refinability search")
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    values = {
        nid: eval_sentence(substitute(phi, var, NameConst(nid)), model, EMPTY_ASSIGNMENT, ctx)
        for nid in model.scope
    }
    total = alg.join_all(values.values())
    if total != alg.top:
        return Verdict(
            subject=f"maximum:{formula_to_text(phi)}",
            mode=model.mode,
            quantification=None,
            rank_bound=model.rank_bound,
            value_lo=total,
            value_hi=total,
            valid=True,
            notes=("rank-relative", "existence hypothesis fails at this scope"),
        )
    for nid in model.scope:
        if values[nid] == alg.top:
            return Verdict(
                subject=f"maximum:{formula_to_text(phi)}",
                mode=model.mode,
                quantification=None,
                rank_bound=model.rank_bound,
                value_lo=alg.top,
                value_hi=alg.top,
                valid=True,
                notes=("rank-relative",),
                detail=(f"witness=#{nid}",),
            )
    return Verdict(
        subject=f"maximum:{formula_to_text(phi)}",
        mode=model.mode,
        quantification=None,
        rank_bound=model.rank_bound,
        value_lo=total,
        value_hi=total,
        valid=False,
        notes=("rank-relative", "scope exhausted without a pointwise witness"),
    )
