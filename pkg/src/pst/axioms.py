"""Rank-bounded validity checks for the set-theoretic axiom schemas.

Each check follows the explicit witness construction behind the axiom's
validity proof and verifies the resulting identities pointwise over the
model scope, rather than evaluating the raw prenex sentence; this mirrors
the proofs and avoids scope-explosion artifacts.  Every report is
rank-relative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import CapExceeded
from .names import all_hf_sets, enumerate_universe, hat_embed
from .syntax import (
    And,
    Exists,
    Forall,
    Formula,
    Imp,
    Mem,
    NameConst,
    Var,
    formula_to_text,
    free_vars,
    substitute,
)
from .valuation import (
    ASSIGNMENT_CAP,
    EMPTY_ASSIGNMENT,
    EvalContext,
    EvalError,
    SetModel,
    closure_assignments,
    eval_instance,
    eval_sentence,
    hf_meta_eval,
)

POWERSET_CAP = 4096


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    model_summary: str
    rank_bound: int
    witnesses: tuple[tuple[str, int], ...]
    value: int
    valid: bool
    quantification: str | None
    n_assignments: int
    notes: tuple[str, ...] = ()

    def result_line(self) -> str:
        quant = self.quantification or "none"
        return (
            f"RESULT axiom={self.axiom} rank={self.rank_bound} quant={quant} "
            f"value={self.value} valid={'yes' if self.valid else 'no'}"
        )


def _summary(model: SetModel) -> str:
    kind = model.structure.kind if model.structure is not None else "algebra"
    return f"{model.mode}/{kind} over {model.algebra.size} elements"


def _bicond(model: SetModel, a: int, b: int) -> int:
    alg = model.algebra
    return alg.meet_(alg.imp_(a, b), alg.imp_(b, a))


def _report(
    model: SetModel,
    axiom: str,
    value: int,
    valid: bool,
    quantification: str | None = None,
    witnesses: Sequence[tuple[str, int]] = (),
    n_assignments: int = 1,
    notes: Sequence[str] = (),
) -> AxiomReport:
    return AxiomReport(
        axiom=axiom,
        model_summary=_summary(model),
        rank_bound=model.rank_bound,
        witnesses=tuple(witnesses),
        value=value,
        valid=valid,
        quantification=quantification,
        n_assignments=n_assignments,
        notes=tuple(notes) + ("rank-relative",),
    )


def _targets(model: SetModel, u: int | None) -> list[int]:
    return list(model.scope) if u is None else [u]


# --- pairing -------------------------------------------------------------------


def check_pairing(
    model: SetModel,
    u: int | None = None,
    v: int | None = None,
    ctx: EvalContext | None = None,
) -> AxiomReport:
    """The two-element name {<u,1>, <v,1>} realises z in w <-> (z=u | z=v)."""
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    value = alg.top
    witnesses = []
    pairs = (
        [(u, v)]
        if u is not None and v is not None
        else list(itertools.product(model.scope, repeat=2))
    )
    for uu, vv in pairs:
        w = store.mk_name([(uu, alg.top), (vv, alg.top)])
        if len(witnesses) < 1:
            witnesses.append(("w", w))
        for z in model.scope:
            lhs = ctx.eval_mem(z, w)
            rhs = alg.join_(ctx.eval_eq(z, uu), ctx.eval_eq(z, vv))
            value = alg.meet_(value, _bicond(model, lhs, rhs))
    return _report(model, "pairing", value, value == alg.top, witnesses=witnesses)


# --- union ---------------------------------------------------------------------


def check_union(
    model: SetModel,
    u: int | None = None,
    ctx: EvalContext | None = None,
) -> AxiomReport:
    """The union name has dom(w) the union of child domains and
    w(x) = join over children v of u(v) ^ v(x); pointwise it matches
    'exists v in u (y in v)'."""
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    value = alg.top
    witnesses = []
    for uu in _targets(model, u):
        entries = store.get(uu).entries
        dom: dict[int, int] = {}
        for child, weight in entries:
            for x, vx in store.get(child).entries:
                contrib = alg.meet_(weight, vx)
                dom[x] = alg.join_(dom.get(x, alg.bottom), contrib)
        w = store.mk_name(sorted(dom.items()))
        if len(witnesses) < 1:
            witnesses.append(("w", w))
        for y in model.scope:
            lhs = ctx.eval_mem(y, w)
            rhs = eval_sentence(
                Exists(
                    "t",
                    And(Mem(Var("t"), NameConst(uu)), Mem(NameConst(y), Var("t"))),
                ),
                model,
                EMPTY_ASSIGNMENT,
                ctx,
            )
            value = alg.meet_(value, _bicond(model, lhs, rhs))
    return _report(model, "union", value, value == alg.top, witnesses=witnesses)


# --- separation -----------------------------------------------------------------


def check_separation(
    model: SetModel,
    phi: Formula,
    var: str,
    u: int | None = None,
    quantification: str = "all_assignments",
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> AxiomReport:
    """dom(w) = dom(u) with w(x) = ||x in u|| ^ ||phi(x)|| realises
    z in w <-> (z in u & phi(z)), per negation assignment."""
    if free_vars(phi) != {var}:
        raise EvalError("separation needs a one-free-variable formula")
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    assignments = closure_assignments(phi, (var,), model, ctx, cap)
    values = []
    witnesses = []
    for asg in assignments:
        val = alg.top
        for uu in _targets(model, u):
            entries = []
            for x, _ in store.get(uu).entries:
                phi_x = eval_instance(phi, ((var, x),), model, asg, ctx)
                entries.append((x, alg.meet_(ctx.eval_mem(x, uu), phi_x)))
            w = store.mk_name(entries)
            if not witnesses:
                witnesses.append(("w", w))
            for z in model.scope:
                lhs = ctx.eval_mem(z, w)
                phi_z = eval_instance(phi, ((var, z),), model, asg, ctx)
                rhs = alg.meet_(ctx.eval_mem(z, uu), phi_z)
                val = alg.meet_(val, _bicond(model, lhs, rhs))
        values.append(val)
    return _quantified_report(model, "separation", values, quantification, witnesses)


def _quantified_report(
    model: SetModel,
    axiom: str,
    values: Sequence[int],
    quantification: str,
    witnesses: Sequence[tuple[str, int]] = (),
    notes: Sequence[str] = (),
) -> AxiomReport:
    alg = model.algebra
    oks = [v == alg.top for v in values]
    valid = all(oks) if quantification == "all_assignments" else any(oks)
    agg = alg.meet_all(values) if quantification == "all_assignments" else alg.join_all(values)
    return _report(
        model,
        axiom,
        agg,
        valid,
        quantification=quantification,
        witnesses=witnesses,
        n_assignments=len(values),
        notes=notes,
    )


# --- powerset -------------------------------------------------------------------


def check_powerset(
    model: SetModel,
    u: int | None = None,
    ctx: EvalContext | None = None,
    cap: int = POWERSET_CAP,
) -> AxiomReport:
    """dom(w) enumerates every function dom(u) -> A with
    w(f) = ||forall y in f (y in u)||; the candidate a(z) = ||z in u|| ^
    ||z in v|| realises the converse inequality."""
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    value = alg.top
    witnesses = []
    notes = []
    for uu in _targets(model, u):
        dom_u = [c for c, _ in store.get(uu).entries]
        n_funcs = alg.size ** len(dom_u)
        if n_funcs > cap:
            raise CapExceeded(f"powerset would need {n_funcs} candidate functions")
        w_entries = []
        f_ids = set()
        for vals in itertools.product(range(alg.size), repeat=len(dom_u)):
            f = store.mk_name(list(zip(dom_u, vals)))
            f_ids.add(f)
            wf = alg.meet_all(
                alg.imp_(fv, ctx.eval_mem(z, uu)) for z, fv in store.get(f).entries
            )
            w_entries.append((f, wf))
        w = store.mk_name(w_entries)
        if not witnesses:
            witnesses.append(("w", w))
        for v in model.scope:
            bq = alg.meet_all(
                alg.imp_(vy, ctx.eval_mem(y, uu)) for y, vy in store.get(v).entries
            )
            lhs = ctx.eval_mem(v, w)
            a = store.mk_name(
                [
                    (z, alg.meet_(ctx.eval_mem(z, uu), ctx.eval_mem(z, v)))
                    for z in dom_u
                ]
            )
            if a not in f_ids:
                notes.append(f"candidate a for v=#{v} escaped dom(w)")
            value = alg.meet_(value, _bicond(model, lhs, bq))
    return _report(
        model, "powerset", value, value == alg.top, witnesses=witnesses, notes=notes
    )


# --- extensionality --------------------------------------------------------------


def check_extensionality(model: SetModel, ctx: EvalContext | None = None) -> AxiomReport:
    """forall z (z in x <-> z in y) stays below ||x = y|| for every pair."""
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    value = alg.top
    for x in model.scope:
        for y in model.scope:
            same = alg.meet_all(
                _bicond(model, ctx.eval_mem(z, x), ctx.eval_mem(z, y))
                for z in model.scope
            )
            value = alg.meet_(value, alg.imp_(same, ctx.eval_eq(x, y)))
    return _report(model, "extensionality", value, value == alg.top)


# --- empty set --------------------------------------------------------------------


def check_emptyset(model: SetModel, ctx: EvalContext | None = None) -> AxiomReport:
    """For every admissible value n' of ~(u = u) the one-entry name with
    range {n'} satisfies ||u in w|| = n'.

    In boolean/heyting mode the pseudo-complement forces the single choice
    n' = 0 and the witness is the empty-behaving name.
    """
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    choices = model.neg_options(alg.top)
    value = alg.top
    n = 0
    witnesses = []
    for uu in model.scope:
        for nprime in choices:
            w = store.mk_name([(uu, nprime)])
            if not witnesses:
                witnesses.append(("w", w))
            n += 1
            got = ctx.eval_mem(uu, w)
            value = alg.meet_(value, _bicond(model, got, nprime))
    return _report(
        model,
        "emptyset",
        value,
        value == alg.top,
        quantification="all_assignments",
        witnesses=witnesses,
        n_assignments=n,
        notes=("witness adapts to each admissible choice of ~(u = u)",),
    )


# --- collection -------------------------------------------------------------------


def check_collection(
    model: SetModel,
    phi: Formula,
    var_x: str,
    var_y: str,
    u: int | None = None,
    quantification: str = "all_assignments",
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> AxiomReport:
    """The name with domain the whole scope and constant value top bounds
    the unbounded existential: ||forall x in u exists y phi|| <=
    ||forall x in u exists y in v phi||.  The scope stands in for the
    ordinal-indexed level of the class argument."""
    if free_vars(phi) != {var_x, var_y}:
        raise EvalError("collection needs a two-free-variable formula")
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    v_name = store.mk_name([(nid, alg.top) for nid in model.scope])
    assignments = closure_assignments(phi, (var_x, var_y), model, ctx, cap)
    values = []
    for asg in assignments:
        val = alg.top
        for uu in _targets(model, u):
            lhs = alg.top
            rhs = alg.top
            for x, ux in store.get(uu).entries:
                ex_scope = alg.join_all(
                    eval_instance(phi, ((var_x, x), (var_y, y)), model, asg, ctx)
                    for y in model.scope
                )
                ex_v = alg.join_all(
                    alg.meet_(
                        vy,
                        eval_instance(phi, ((var_x, x), (var_y, y)), model, asg, ctx),
                    )
                    for y, vy in store.get(v_name).entries
                )
                lhs = alg.meet_(lhs, alg.imp_(ux, ex_scope))
                rhs = alg.meet_(rhs, alg.imp_(ux, ex_v))
            val = alg.meet_(val, alg.imp_(lhs, rhs))
        values.append(val)
    return _quantified_report(
        model,
        "collection",
        values,
        quantification,
        witnesses=[("v", v_name)],
        notes=("scope-wide constant-top witness stands in for the class level",),
    )


# --- induction --------------------------------------------------------------------


def check_induction(
    model: SetModel,
    phi: Formula,
    var: str,
    quantification: str = "all_assignments",
    ctx: EvalContext | None = None,
    cap: int = ASSIGNMENT_CAP,
) -> AxiomReport:
    """Evaluate forall x [(forall y in x phi(y)) -> phi(x)] -> forall x phi(x)
    at the model scope."""
    if free_vars(phi) != {var}:
        raise EvalError("induction needs a one-free-variable formula")
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    fresh_x = var
    fresh_y = var + "_y"
    while fresh_y in free_vars(phi):
        fresh_y += "_"
    phi_y = substitute(phi, var, Var(fresh_y))
    schema = Imp(
        Forall(
            fresh_x,
            Imp(
                Forall(fresh_y, Imp(Mem(Var(fresh_y), Var(fresh_x)), phi_y)),
                phi,
            ),
        ),
        Forall(fresh_x, phi),
    )
    from .valuation import enumerate_assignments

    assignments = enumerate_assignments(schema, model, ctx, cap)
    values = [eval_sentence(schema, model, asg, ctx) for asg in assignments]
    return _quantified_report(model, "induction", values, quantification)


# --- comprehension refutation --------------------------------------------------------


def check_comprehension_refuted(model: SetModel, ctx: EvalContext | None = None) -> AxiomReport:
    """||exists x forall y (y in x)|| is bottom when the member variable
    ranges one rank higher than the set variable; the stratified scope is
    the finite surrogate for the class quantifier."""
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    y_scope = enumerate_universe(model.store, alg, model.rank_bound + 1)
    value = alg.bottom
    for x in model.scope:
        inner = alg.meet_all(ctx.eval_mem(y, x) for y in y_scope)
        value = alg.join_(value, inner)
    notes = []
    if alg.top == alg.bottom:
        notes.append("degenerate one-element algebra: top equals bottom")
    return _report(
        model,
        "comprehension-refuted",
        value,
        value == alg.bottom,
        notes=tuple(notes)
        + (f"member scope rank {model.rank_bound + 1} strictly above set scope",),
    )


# --- infinity (reflection only) -------------------------------------------------------


def check_infinity_reflection(
    model: SetModel,
    max_hf_rank: int = 3,
    ctx: EvalContext | None = None,
) -> AxiomReport:
    """Transfer of restricted negation-free facts to check names.

    The infinity axiom itself needs an infinite witness and is out of desk
    scope; what is verified is that restricted negation-free instances hold
    of hereditarily finite sets exactly when their hat images get value top.
    """
    ctx = ctx or EvalContext(model)
    alg = model.algebra
    store = model.store
    hf_sets = all_hf_sets(max_hf_rank)
    hats = {s: hat_embed(s, store, alg) for s in hf_sets}
    templates = [
        ("x", "y", Mem(Var("x"), Var("y"))),
        ("x", "y", Forall("w", Imp(Mem(Var("w"), Var("x")), Mem(Var("w"), Var("y"))))),
        ("x", "y", Exists("w", And(Mem(Var("w"), Var("x")), Mem(Var("w"), Var("y"))))),
    ]
    small = [s for s in hf_sets if s.rank() <= 2]
    eval_model = model.with_flags(bounded_opt=True)
    mismatches = []
    n = 0
    for vx, vy, template in templates:
        for sx in small:
            for sy in small:
                n += 1
                meta = hf_meta_eval(template, {vx: sx, vy: sy})
                inst = substitute(
                    substitute(template, vx, NameConst(hats[sx])),
                    vy,
                    NameConst(hats[sy]),
                )
                val = eval_sentence(inst, eval_model, EMPTY_ASSIGNMENT, ctx)
                if meta != (val == alg.top):
                    mismatches.append(
                        f"{formula_to_text(template)} on {sx},{sy}: meta={meta} value={val}"
                    )
    value = alg.top if not mismatches else alg.bottom
    return _report(
        model,
        "infinity-reflection",
        value,
        not mismatches,
        n_assignments=n,
        notes=(
            "the infinity axiom itself needs an infinite witness; only the "
            "restricted-formula reflection is checked",
        )
        + tuple(mismatches[:3]),
    )


CHECKS = {
    "pairing": check_pairing,
    "union": check_union,
    "separation": check_separation,
    "powerset": check_powerset,
    "extensionality": check_extensionality,
    "emptyset": check_emptyset,
    "collection": check_collection,
    "induction": check_induction,
    "comprehension": check_comprehension_refuted,
    "infinity": check_infinity_reflection,
}
