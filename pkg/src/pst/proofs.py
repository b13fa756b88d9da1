"""Hilbert-style proof kernel with axiom-schema matching.

Systems: ``qn4`` (positive axioms, strong-negation axioms, quantifier
axioms, rules MP / R3 / R4), ``qn3`` (adds the explosion axiom) and
``qcw`` (positive axioms plus excluded middle and double negation
elimination for the non-deterministic negation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .algebra import enumerate_heyting
from .errors import CapExceeded, PstError
from .fidel import saturate
from .names import NameStore
from .syntax import (
    And,
    Derivation,
    Eq,
    Exists,
    Forall,
    Formula,
    FuncApp,
    Imp,
    Mem,
    Meta,
    Neg,
    Or,
    Pred,
    Term,
    Var,
    formula_to_text,
    free_for,
    free_vars,
    iff,
    substitute,
)
from .valuation import (
    EvalContext,
    ThetaStructure,
    enumerate_assignments,
    eval_qn4,
    eval_sentence,
    make_model,
)


class ProofError(PstError):
    pass


class NoMatch(ProofError):
    pass


class SideConditionViolated(ProofError):
    pass


_A = Meta("alpha")
_B = Meta("beta")
_C = Meta("gamma")


@dataclass(frozen=True)
class AxiomSchema:
    sid: str
    template: Formula | None  # None for the quantifier schemas A1/A2
    note: str = ""


_TEMPLATES: dict[str, Formula] = {
    "N1": Imp(_A, Imp(_B, _A)),
    "N2": Imp(Imp(_A, Imp(_B, _C)), Imp(Imp(_A, _B), Imp(_A, _C))),
    "N3": Imp(And(_A, _B), _B),
    "N4": Imp(And(_A, _B), _A),
    "N5": Imp(_A, Imp(_B, And(_A, _B))),
    "N6": Imp(_A, Or(_A, _B)),
    "N7": Imp(_B, Or(_A, _B)),
    "N8": Imp(Imp(_A, _C), Imp(Imp(_B, _C), Imp(Or(_A, _B), _C))),
    "N9": iff(Neg(Imp(_A, _B)), And(_A, Neg(_B))),
    "N10": iff(Neg(And(_A, _B)), Or(Neg(_A), Neg(_B))),
    "N11": iff(Neg(Or(_A, _B)), And(Neg(_A), Neg(_B))),
    # the weak and strong negation glyphs are unified, so the two double
    # negation axioms share one template and both ids are accepted
    "N12": iff(Neg(Neg(_A)), _A),
    "N13": iff(Neg(Neg(_A)), _A),
    "N14": Imp(Neg(_A), Imp(_A, _B)),
    "CW1": Or(_A, Neg(_A)),
    "CW2": Imp(Neg(Neg(_A)), _A),
}

SCHEMAS: dict[str, AxiomSchema] = {
    **{sid: AxiomSchema(sid, tpl) for sid, tpl in _TEMPLATES.items()},
    "A1": AxiomSchema("A1", None, "phi(x/t) -> exists x phi, t free for x"),
    "A2": AxiomSchema("A2", None, "forall x phi -> phi(x/t), t free for x"),
}

SYSTEMS: dict[str, tuple[str, ...]] = {
    "qn4": tuple(f"N{i}" for i in range(1, 14)) + ("A1", "A2"),
    "qn3": tuple(f"N{i}" for i in range(1, 15)) + ("A1", "A2"),
    "qcw": tuple(f"N{i}" for i in range(1, 9)) + ("CW1", "CW2", "A1", "A2"),
}


def _unify(template: Formula, phi: Formula, binds: dict[str, Formula]) -> bool:
    if isinstance(template, Meta):
        if template.name in binds:
            return binds[template.name] == phi
        binds[template.name] = phi
        return True
    if type(template) is not type(phi):
        return False
    if isinstance(template, (And, Or, Imp)):
        return _unify(template.left, phi.left, binds) and _unify(
            template.right, phi.right, binds
        )
    if isinstance(template, Neg):
        return _unify(template.body, phi.body, binds)
    return template == phi


class _Conflict(Exception):
    pass


def _anti_unify(pattern: Formula, inst: Formula, x: str) -> Term | None:
    """The term t with pattern[x := t] = inst, or None when x has no free
    occurrence (then pattern must equal inst).  Raises _Conflict otherwise."""
    slot: list[Term] = []

    def terms(p: Term, i: Term, live: bool) -> None:
        if live and isinstance(p, Var) and p.name == x:
            if slot and slot[0] != i:
                raise _Conflict
            if not slot:
                slot.append(i)
            return
        if type(p) is not type(i):
            raise _Conflict
        if isinstance(p, Var):
            if p.name != i.name:
                raise _Conflict
            return
        if isinstance(p, FuncApp):
            if p.sym != i.sym or len(p.args) != len(i.args):
                raise _Conflict
            for pa, ia in zip(p.args, i.args):
                terms(pa, ia, live)
            return
        if p != i:
            raise _Conflict

    def walk(p: Formula, i: Formula, live: bool) -> None:
        if type(p) is not type(i):
            raise _Conflict
        if isinstance(p, (Mem, Eq)):
            terms(p.left, i.left, live)
            terms(p.right, i.right, live)
            return
        if isinstance(p, Pred):
            if p.sym != i.sym or len(p.args) != len(i.args):
                raise _Conflict
            for pa, ia in zip(p.args, i.args):
                terms(pa, ia, live)
            return
        if isinstance(p, (And, Or, Imp)):
            walk(p.left, i.left, live)
            walk(p.right, i.right, live)
            return
        if isinstance(p, Neg):
            walk(p.body, i.body, live)
            return
        if isinstance(p, (Forall, Exists)):
            if p.var != i.var:
                raise _Conflict
            walk(p.body, i.body, live and p.var != x)
            return
        if p != i:
            raise _Conflict

    walk(pattern, inst, True)
    return slot[0] if slot else None


def match_schema(phi: Formula, schema: AxiomSchema | str) -> Mapping[str, object]:
    """Bindings instantiating the schema to phi.

    For the quantifier schemas the bindings carry the matrix formula, the
    bound variable and the witness term, and the freeness side condition is
    enforced.  Raises NoMatch / SideConditionViolated.
    """
    if isinstance(schema, str):
        try:
            schema = SCHEMAS[schema.upper()]
        except KeyError as exc:
            raise NoMatch(f"unknown schema {schema!r}") from exc
    if schema.template is not None:
        binds: dict[str, Formula] = {}
        if not _unify(schema.template, phi, binds):
            raise NoMatch(f"{formula_to_text(phi)} does not instantiate {schema.sid}")
        return binds
    if schema.sid == "A1":
        if not (isinstance(phi, Imp) and isinstance(phi.right, Exists)):
            raise NoMatch("A1 needs the shape phi(x/t) -> exists x phi")
        x = phi.right.var
        body = phi.right.body
        try:
            t = _anti_unify(body, phi.left, x)
        except _Conflict as exc:
            raise NoMatch("left side is not a substitution instance") from exc
        if t is None:
            t = Var(x)
        if not free_for(t, x, body):
            raise SideConditionViolated(f"term not free for {x!r}")
        if substitute(body, x, t) != phi.left:
            raise NoMatch("left side is not a substitution instance")
        return {"phi": body, "x": x, "t": t}
    if schema.sid == "A2":
        if not (isinstance(phi, Imp) and isinstance(phi.left, Forall)):
            raise NoMatch("A2 needs the shape forall x phi -> phi(x/t)")
        x = phi.left.var
        body = phi.left.body
        try:
            t = _anti_unify(body, phi.right, x)
        except _Conflict as exc:
            raise NoMatch("right side is not a substitution instance") from exc
        if t is None:
            t = Var(x)
        if not free_for(t, x, body):
            raise SideConditionViolated(f"term not free for {x!r}")
        if substitute(body, x, t) != phi.right:
            raise NoMatch("right side is not a substitution instance")
        return {"phi": body, "x": x, "t": t}
    raise NoMatch(f"unhandled schema {schema.sid}")


# --- derivation checking ------------------------------------------------------------


@dataclass(frozen=True)
class DerivationCheck:
    ok: bool
    line: int | None = None
    reason: str | None = None
    proven: Formula | None = None


def check_derivation(deriv: Derivation, system: str | None = None) -> DerivationCheck:
    """Verify every line against its justification; premises must be closed
    sentences.  The conclusion is the qed line's formula."""
    system = system or deriv.system
    if system not in SYSTEMS:
        return DerivationCheck(False, None, f"unknown system {system!r}")
    allowed = SYSTEMS[system]
    for k, prem in enumerate(deriv.premises, start=1):
        if free_vars(prem):
            return DerivationCheck(
                False, k, "open premise; close it universally first"
            )
    by_number: dict[int, Formula] = {}
    for line in deriv.lines:
        kind = line.just[0]
        if kind == "axiom":
            sid = line.just[1]
            if sid not in allowed:
                return DerivationCheck(
                    False, line.number, f"axiom {sid} not available in {system}"
                )
            try:
                match_schema(line.formula, sid)
            except SideConditionViolated as exc:
                return DerivationCheck(False, line.number, f"side condition: {exc}")
            except NoMatch:
                return DerivationCheck(
                    False, line.number, f"not an instance of {sid}"
                )
        elif kind == "premise":
            k = line.just[1]
            if not (1 <= k <= len(deriv.premises)):
                return DerivationCheck(False, line.number, f"no premise {k}")
            if deriv.premises[k - 1] != line.formula:
                return DerivationCheck(
                    False, line.number, f"formula differs from premise {k}"
                )
        elif kind == "mp":
            i, j = line.just[1], line.just[2]
            if i >= line.number or j >= line.number:
                return DerivationCheck(False, line.number, "forward reference")
            if i not in by_number or j not in by_number:
                return DerivationCheck(False, line.number, "reference to missing line")
            major = by_number[j]
            if not isinstance(major, Imp) or major.left != by_number[i] or major.right != line.formula:
                return DerivationCheck(
                    False, line.number, "conclusion is not modus ponens of cited lines"
                )
        elif kind in ("r3", "r4"):
            i = line.just[1]
            if i >= line.number:
                return DerivationCheck(False, line.number, "forward reference")
            if i not in by_number:
                return DerivationCheck(False, line.number, "reference to missing line")
            prem = by_number[i]
            if kind == "r3":
                shape = (
                    isinstance(line.formula, Imp)
                    and isinstance(line.formula.left, Exists)
                    and isinstance(prem, Imp)
                    and prem.left == line.formula.left.body
                    and prem.right == line.formula.right
                )
                if not shape:
                    return DerivationCheck(
                        False, line.number, "conclusion is not an R3 generalisation"
                    )
                x = line.formula.left.var
                if x in free_vars(line.formula.right):
                    return DerivationCheck(
                        False, line.number, f"R3 side condition: {x} free in consequent"
                    )
            else:
                shape = (
                    isinstance(line.formula, Imp)
                    and isinstance(line.formula.right, Forall)
                    and isinstance(prem, Imp)
                    and prem.left == line.formula.left
                    and prem.right == line.formula.right.body
                )
                if not shape:
                    return DerivationCheck(
                        False, line.number, "conclusion is not an R4 generalisation"
                    )
                x = line.formula.right.var
                if x in free_vars(line.formula.left):
                    return DerivationCheck(
                        False, line.number, f"R4 side condition: {x} free in antecedent"
                    )
        else:  # pragma: no cover - parser restricts kinds
            return DerivationCheck(False, line.number, f"unknown justification {kind}")
        by_number[line.number] = line.formula
    if deriv.qed not in by_number:
        return DerivationCheck(False, deriv.qed, "qed references a missing line")
    return DerivationCheck(True, None, None, by_number[deriv.qed])


# --- soundness audit -----------------------------------------------------------------


@dataclass(frozen=True)
class AuditFailure:
    schema: str
    instance: str
    algebra_size: int
    domain_size: int
    tables: str
    value: int


@dataclass(frozen=True)
class AuditReport:
    system: str
    max_algebra: int
    max_domain: int
    n_instances: int
    n_evaluations: int
    failures: tuple[AuditFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _propositional_instances(sid: str) -> Iterator[Formula]:
    tpl = SCHEMAS[sid].template
    assert tpl is not None
    metas = sorted(_meta_names(tpl))
    p, q, r = Pred("p", ()), Pred("q", ()), Pred("r", ())
    if len(metas) <= 1:
        pool: list[tuple[Formula, ...]] = [(p,), (Neg(p),), (And(p, q),), (Imp(p, q),)]
    elif len(metas) == 2:
        pool = [(p, q), (q, p), (p, Neg(q)), (Neg(p), q), (And(p, q), r), (p, p)]
    else:
        pool = [(p, q, r), (p, p, q), (Neg(p), q, r)]
    for combo in pool:
        binds = dict(zip(metas, combo))
        yield _instantiate(tpl, binds)


def _meta_names(tpl: Formula) -> set[str]:
    if isinstance(tpl, Meta):
        return {tpl.name}
    if isinstance(tpl, (And, Or, Imp)):
        return _meta_names(tpl.left) | _meta_names(tpl.right)
    if isinstance(tpl, Neg):
        return _meta_names(tpl.body)
    return set()


def _instantiate(tpl: Formula, binds: Mapping[str, Formula]) -> Formula:
    if isinstance(tpl, Meta):
        return binds[tpl.name]
    if isinstance(tpl, (And, Or, Imp)):
        return type(tpl)(_instantiate(tpl.left, binds), _instantiate(tpl.right, binds))
    if isinstance(tpl, Neg):
        return Neg(_instantiate(tpl.body, binds))
    return tpl


_QUANT_INSTANCES: dict[str, tuple[Formula, ...]] = {
    "A1": (
        Imp(Pred("P", (FuncApp("c", ()),)), Exists("x", Pred("P", (Var("x"),)))),
        Imp(
            And(Pred("P", (FuncApp("c", ()),)), Pred("q", ())),
            Exists("x", And(Pred("P", (Var("x"),)), Pred("q", ()))),
        ),
    ),
    "A2": (
        Imp(Forall("x", Pred("P", (Var("x"),))), Pred("P", (FuncApp("c", ()),))),
        Imp(
            Forall("x", Imp(Pred("P", (Var("x"),)), Pred("q", ()))),
            Imp(Pred("P", (FuncApp("c", ()),)), Pred("q", ())),
        ),
    ),
}


def _prop_atoms(phi: Formula) -> set[str]:
    if isinstance(phi, Pred) and not phi.args:
        return {phi.sym}
    if isinstance(phi, (And, Or, Imp)):
        return _prop_atoms(phi.left) | _prop_atoms(phi.right)
    if isinstance(phi, Neg):
        return _prop_atoms(phi.body)
    return set()


def audit_soundness(
    system: str,
    max_domain: int = 2,
    max_algebra: int = 4,
    eval_cap: int = 2_000_000,
) -> AuditReport:
    """Evaluate a generated family of axiom instances over every saturated
    structure within budget and every admissible negated-atom table,
    reporting any instance that misses the top value.

    Each system is audited under its own negation semantics: structural
    pushes with atom choices for qn4/qn3, per-occurrence choices for qcw.
    For qn4 none are expected; auditing qn3 over these (non-explosive)
    structures is expected to surface N14 countermodels, reported here the
    same way.
    """
    if system not in SYSTEMS:
        raise ProofError(f"unknown system {system!r}")
    logic = "comega" if system == "qcw" else "n4"
    failures: list[AuditFailure] = []
    n_inst = 0
    n_eval = 0
    algebras = list(enumerate_heyting(max_algebra))
    for sid in SYSTEMS[system]:
        schema = SCHEMAS[sid]
        if schema.template is not None:
            for inst in _propositional_instances(sid):
                n_inst += 1
                n_eval += _audit_propositional(
                    sid, inst, algebras, failures, eval_cap - n_eval, logic
                )
        else:
            for inst in _QUANT_INSTANCES[sid]:
                n_inst += 1
                n_eval += _audit_quantified(
                    sid, inst, algebras, max_domain, failures, eval_cap - n_eval
                )
    return AuditReport(
        system=system,
        max_algebra=max_algebra,
        max_domain=max_domain,
        n_instances=n_inst,
        n_evaluations=n_eval,
        failures=tuple(failures),
    )


def _audit_propositional(
    sid: str,
    inst: Formula,
    algebras,
    failures: list[AuditFailure],
    budget: int,
    logic: str = "n4",
) -> int:
    count = 0
    atoms = sorted(_prop_atoms(inst))
    for alg in algebras:
        fs = saturate(alg, logic)
        store = NameStore()
        for values in itertools.product(range(alg.size), repeat=len(atoms)):
            model = make_model(
                fs, store, 0, scope=(), prop_values=dict(zip(atoms, values))
            )
            ctx = EvalContext(model)
            for asg in enumerate_assignments(inst, model, ctx):
                count += 1
                if count > budget:
                    raise CapExceeded("audit evaluation budget exhausted")
                val = eval_sentence(inst, model, asg, ctx)
                if val != alg.top:
                    failures.append(
                        AuditFailure(
                            schema=sid,
                            instance=formula_to_text(inst),
                            algebra_size=alg.size,
                            domain_size=0,
                            tables=f"atoms={dict(zip(atoms, values))} "
                            f"negs={asg.fingerprint()}",
                            value=val,
                        )
                    )
    return count


def _collect_pred_arities(phi: Formula, preds: dict[str, int], funcs: dict[str, int]) -> None:
    if isinstance(phi, Pred):
        preds[phi.sym] = len(phi.args)
        for a in phi.args:
            _collect_term_funcs(a, funcs)
        return
    if isinstance(phi, (And, Or, Imp)):
        _collect_pred_arities(phi.left, preds, funcs)
        _collect_pred_arities(phi.right, preds, funcs)
        return
    if isinstance(phi, Neg):
        _collect_pred_arities(phi.body, preds, funcs)
        return
    if isinstance(phi, (Forall, Exists)):
        _collect_pred_arities(phi.body, preds, funcs)
        return


def _collect_term_funcs(t: Term, funcs: dict[str, int]) -> None:
    if isinstance(t, FuncApp):
        funcs[t.sym] = len(t.args)
        for a in t.args:
            _collect_term_funcs(a, funcs)


def _audit_quantified(
    sid: str,
    inst: Formula,
    algebras,
    max_domain: int,
    failures: list[AuditFailure],
    budget: int,
) -> int:
    count = 0
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    _collect_pred_arities(inst, preds, funcs)
    for alg in algebras:
        fs = saturate(alg, "n4")
        for dsize in range(1, max_domain + 1):
            domain = tuple(range(dsize))
            pred_tables = _all_tables(preds, domain, range(alg.size))
            func_tables = _all_tables(funcs, domain, domain)
            for ptab in pred_tables:
                for ftab in func_tables:
                    for ntab in _neg_tables(ptab, fs):
                        theta = ThetaStructure(fs, domain, ptab, ftab, ntab)
                        count += 1
                        if count > budget:
                            raise CapExceeded("audit evaluation budget exhausted")
                        vs = sorted(free_vars(inst))
                        for combo in itertools.product(domain, repeat=len(vs)):
                            val = eval_qn4(inst, theta, dict(zip(vs, combo)))
                            if val != alg.top:
                                failures.append(
                                    AuditFailure(
                                        schema=sid,
                                        instance=formula_to_text(inst),
                                        algebra_size=alg.size,
                                        domain_size=dsize,
                                        tables=repr(ptab),
                                        value=val,
                                    )
                                )
    return count


def _all_tables(symbols: Mapping[str, int], domain, codomain) -> list[dict]:
    """Every interpretation table for the given arities."""
    out: list[dict] = [{}]
    for sym, arity in sorted(symbols.items()):
        keys = list(itertools.product(domain, repeat=arity))
        new_out = []
        for base in out:
            for values in itertools.product(codomain, repeat=len(keys)):
                table = dict(base)
                table[sym] = dict(zip(keys, values))
                new_out.append(table)
        out = new_out
    return out


def _neg_tables(ptab: Mapping[str, Mapping[tuple, int]], fs) -> Iterator[dict]:
    """Every admissible negated-atom table over the predicate tables."""
    cells = [
        (sym, args, base)
        for sym, table in sorted(ptab.items())
        for args, base in sorted(table.items())
    ]
    option_lists = [fs.negs[base] for _, _, base in cells]
    for combo in itertools.product(*option_lists):
        out: dict[str, dict] = {sym: {} for sym, _, _ in cells}
        for (sym, args, _), val in zip(cells, combo):
            out[sym][args] = val
        yield out
