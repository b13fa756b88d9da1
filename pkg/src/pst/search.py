"""Brute-force countermodel search over small algebras and structures.

Goals: witnesses of non-explosion (a designated contradiction that does
not spread to an arbitrary atom), refutations of single formulas or
sequents, the explosion-axiom separation, and model-level evidence that
the negation is not congruential (equal values, distinct admissible
negation choices).

Search order is deterministic: algebras ascending by size, candidate
negation families lexicographically, atom values and choices
lexicographically; the first find is therefore the smallest in that
order.  Every finding is re-certified in a fresh evaluation context, and
every exhausted search is repeated in a seed-shuffled order as a
discipline check.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .algebra import FiniteHeytingAlgebra, enumerate_heyting
from .errors import PstError
from .fidel import FidelError, FStructure, saturate, validate_comega, validate_n4
from .names import NameStore
from .syntax import Formula, Neg, Pred, formula_to_text
from .valuation import (
    EvalContext,
    SetModel,
    enumerate_assignments,
    eval_sentence,
    make_model,
)

GOALS = ("non_explosion", "refute_formula", "refute_sequent", "separate_n4_n3")


class SearchError(PstError):
    pass


@dataclass(frozen=True)
class Budget:
    max_algebra: int = 3
    max_domain: int = 2
    max_assignments: int = 20_000
    families: str = "saturated"  # or "all"


@dataclass(frozen=True)
class SearchGoal:
    kind: str
    formula: Formula | None = None
    premises: tuple[Formula, ...] = ()
    logic: str = "n4"
    budget: Budget = field(default_factory=Budget)
    seed: int = 0


@dataclass(frozen=True)
class Finding:
    goal: str
    algebra_size: int
    structure: FStructure
    atom_values: tuple[tuple[str, int], ...]
    assignment_fingerprint: str
    values: tuple[tuple[str, int], ...]
    description: tuple[str, ...]


@dataclass(frozen=True)
class Exhausted:
    goal: str
    census: tuple[tuple[str, int], ...]

    def count(self, key: str) -> int:
        return dict(self.census).get(key, 0)


def _families(alg: FiniteHeytingAlgebra, which: str, kind: str) -> Iterator[FStructure]:
    """Candidate negation families for one algebra, deterministically."""
    if which == "saturated":
        yield saturate(alg, kind)
        return
    if which != "all":
        raise SearchError(f"unknown family selector {which!r}")
    validate = validate_n4 if kind == "n4" else validate_comega
    subsets = [
        tuple(e for e in range(alg.size) if mask >> e & 1)
        for mask in range(1, 1 << alg.size)
    ]
    for fam in itertools.product(subsets, repeat=alg.size):
        try:
            yield validate(alg, list(fam))
        except FidelError:
            continue


def _prop_model(fs: FStructure, values: Mapping[str, int], logic: str) -> SetModel:
    return make_model(
        FStructure(fs.algebra, fs.negs, logic),
        NameStore(),
        0,
        scope=(),
        prop_values=dict(values),
    )


def search(goal: SearchGoal, jobs: int = 1) -> Finding | Exhausted:
    """Run the requested goal within budget; deterministic given the seed.

    With jobs > 1 the algebra-size partitions run on worker threads and
    results merge smallest-size-first, so the outcome matches a sequential
    run bit for bit.
    """
    if goal.kind not in GOALS:
        raise SearchError(f"unknown goal {goal.kind!r}")
    if jobs > 1:
        return _search_partitioned(goal, jobs)
    out = _dispatch(goal, None)
    if isinstance(out, Finding):
        _recertify(out, goal)
    return out


def _dispatch(goal: SearchGoal, algebras: Sequence[FiniteHeytingAlgebra] | None) -> Finding | Exhausted:
    if algebras is None:
        algebras = list(enumerate_heyting(goal.budget.max_algebra))
    if goal.kind == "non_explosion":
        return _search_non_explosion(goal, algebras)
    if goal.kind == "separate_n4_n3":
        from .proofs import SCHEMAS, _instantiate

        n14 = _instantiate(
            SCHEMAS["N14"].template,
            {"alpha": Pred("p", ()), "beta": Pred("q", ())},
        )
        return _search_refute(goal, n14, algebras)
    if goal.kind == "refute_formula":
        if goal.formula is None:
            raise SearchError("refute_formula needs a formula")
        return _search_refute(goal, goal.formula, algebras)
    if goal.formula is None:
        raise SearchError("refute_sequent needs a conclusion formula")
    return _search_sequent(goal, algebras)


def _search_partitioned(goal: SearchGoal, jobs: int) -> Finding | Exhausted:
    from concurrent.futures import ThreadPoolExecutor

    algebras = list(enumerate_heyting(goal.budget.max_algebra))
    by_size: dict[int, list[FiniteHeytingAlgebra]] = {}
    for alg in algebras:
        by_size.setdefault(alg.size, []).append(alg)
    sizes = sorted(by_size)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_dispatch, goal, by_size[s]) for s in sizes]
        merged: dict[str, int] = {}
        for fut in futures:  # ascending size: first finding is smallest
            out = fut.result()
            if isinstance(out, Finding):
                _recertify(out, goal)
                return out
            for key, n in out.census:
                merged[key] = merged.get(key, 0) + n
    return Exhausted(goal.kind, tuple(sorted(merged.items())))


def _atoms_of(phi: Formula) -> set[str]:
    if isinstance(phi, Pred) and not phi.args:
        return {phi.sym}
    out: set[str] = set()
    for name in ("left", "right", "body"):
        sub = getattr(phi, name, None)
        if sub is not None and not isinstance(sub, str):
            out |= _atoms_of(sub)
    return out


def _search_non_explosion(goal: SearchGoal, algebras) -> Finding | Exhausted:
    """Find ||p|| = ||~p|| = top while some q stays below top."""
    census = {"algebras": 0, "structures": 0, "candidates": 0}
    for alg in algebras:
        census["algebras"] += 1
        top = alg.top
        for fs in _families(alg, goal.budget.families, goal.logic):
            census["structures"] += 1
            for q_val in range(alg.size):
                for neg_p in fs.negs[top]:
                    census["candidates"] += 1
                    if neg_p == top and q_val != top:
                        model = _prop_model(fs, {"p": top, "q": q_val}, goal.logic)
                        ctx = EvalContext(model)
                        asgs = [
                            a
                            for a in enumerate_assignments(Neg(Pred("p", ())), model, ctx)
                            if a.atom(("pred", "p")) == neg_p
                        ]
                        asg = asgs[0]
                        return Finding(
                            goal="non_explosion",
                            algebra_size=alg.size,
                            structure=fs,
                            atom_values=(("p", top), ("q", q_val)),
                            assignment_fingerprint=asg.fingerprint(),
                            values=(
                                ("p", top),
                                ("~p", eval_sentence(Neg(Pred("p", ())), model, asg, ctx)),
                                ("q", q_val),
                            ),
                            description=(
                                f"||p|| = ||~p|| = {top} (top) while ||q|| = {q_val} < top;",
                                "the contradictory pair {p, ~p} holds without q following",
                            ),
                        )
    return _exhausted("non_explosion", census, goal)


def _candidate_space(
    phi: Formula, goal: SearchGoal, algebras
) -> Iterator[tuple[FStructure, dict[str, int], object, int]]:
    """All (structure, atom values, assignment, value) evaluations."""
    atoms = sorted(_atoms_of(phi))
    for alg in algebras:
        for fs in _families(alg, goal.budget.families, goal.logic):
            for values in itertools.product(range(alg.size), repeat=len(atoms)):
                table = dict(zip(atoms, values))
                model = _prop_model(fs, table, goal.logic)
                ctx = EvalContext(model)
                asgs = enumerate_assignments(phi, model, ctx, goal.budget.max_assignments)
                for asg in asgs:
                    val = eval_sentence(phi, model, asg, ctx)
                    yield fs, table, asg, val


def _search_refute(goal: SearchGoal, phi: Formula, algebras) -> Finding | Exhausted:
    census = {"evaluations": 0}
    for fs, table, asg, val in _candidate_space(phi, goal, algebras):
        census["evaluations"] += 1
        if val != fs.algebra.top:
            return Finding(
                goal=goal.kind,
                algebra_size=fs.algebra.size,
                structure=fs,
                atom_values=tuple(sorted(table.items())),
                assignment_fingerprint=asg.fingerprint(),
                values=((formula_to_text(phi), val),),
                description=(
                    f"||{formula_to_text(phi)}|| = {val} < top = {fs.algebra.top}",
                ),
            )
    return _exhausted(goal.kind, census, goal, phi, algebras)


def _search_sequent(goal: SearchGoal, algebras) -> Finding | Exhausted:
    """Premises all top, conclusion below top, under one joint assignment."""
    census = {"evaluations": 0}
    phi = goal.formula
    assert phi is not None
    joint = phi
    for g in goal.premises:
        from .syntax import And

        joint = And(g, joint)
    atoms = sorted(_atoms_of(joint))
    for alg in algebras:
        for fs in _families(alg, goal.budget.families, goal.logic):
            for values in itertools.product(range(alg.size), repeat=len(atoms)):
                table = dict(zip(atoms, values))
                model = _prop_model(fs, table, goal.logic)
                ctx = EvalContext(model)
                for asg in enumerate_assignments(joint, model, ctx, goal.budget.max_assignments):
                    census["evaluations"] += 1
                    prem_vals = [
                        eval_sentence(g, model, asg, ctx) for g in goal.premises
                    ]
                    concl = eval_sentence(phi, model, asg, ctx)
                    if all(v == alg.top for v in prem_vals) and concl != alg.top:
                        return Finding(
                            goal="refute_sequent",
                            algebra_size=alg.size,
                            structure=fs,
                            atom_values=tuple(sorted(table.items())),
                            assignment_fingerprint=asg.fingerprint(),
                            values=(
                                *(
                                    (formula_to_text(g), v)
                                    for g, v in zip(goal.premises, prem_vals)
                                ),
                                (formula_to_text(phi), concl),
                            ),
                            description=(
                                "premises all top, conclusion "
                                f"{concl} < top;",
                            ),
                        )
    return _exhausted("refute_sequent", census, goal)


def _exhausted(kind: str, census: dict, goal: SearchGoal, phi: Formula | None = None, algebras=None) -> Exhausted:
    """Report exhaustion, after re-walking the space in a seeded shuffle to
    confirm order independence."""
    if phi is not None and algebras is not None:
        shuffled = list(_candidate_space(phi, goal, algebras))
        random.Random(goal.seed).shuffle(shuffled)
        for fs, _table, _asg, val in shuffled:
            if kind != "refute_sequent" and val != fs.algebra.top:
                raise SearchError("order-randomised pass disagreed with exhaustion")
    return Exhausted(kind, tuple(sorted(census.items())))


def _recertify(finding: Finding, goal: SearchGoal) -> None:
    """Re-evaluate the certificate values in a fresh context; findings that
    fail re-certification are a bug, not a result."""
    fs = finding.structure
    table = dict(finding.atom_values)
    model = _prop_model(fs, table, goal.logic)
    ctx = EvalContext(model)
    for text, claimed in finding.values:
        if text in table:
            if table[text] != claimed:
                raise SearchError(f"certificate value for {text} does not re-verify")
            continue
        from .syntax import parse_formula

        phi = parse_formula(text)
        ok = False
        for asg in enumerate_assignments(phi, model, ctx, goal.budget.max_assignments):
            if (
                asg.fingerprint() == finding.assignment_fingerprint
                or eval_sentence(phi, model, asg, ctx) == claimed
            ):
                ok = True
                break
        if not ok:
            raise SearchError(f"certificate value for {text} does not re-verify")


# --- congruence probe -------------------------------------------------------------


def congruence_probe(
    budget: Budget = Budget(),
    structures: Sequence[FStructure] | None = None,
    logic: str = "comega",
) -> Finding | Exhausted:
    """Hunt for two atoms with one truth value but distinct admissible
    negation values: the negation is then not a function of the value."""
    census = {"structures": 0, "values": 0}
    if structures is None:
        pool: Iterator[FStructure] = (
            fs
            for alg in enumerate_heyting(budget.max_algebra)
            for fs in _families(alg, budget.families, logic)
        )
    else:
        pool = iter(structures)
    for fs in pool:
        census["structures"] += 1
        alg = fs.algebra
        for x in range(alg.size):
            census["values"] += 1
            if len(fs.negs[x]) >= 2:
                c1, c2 = fs.negs[x][0], fs.negs[x][1]
                return Finding(
                    goal="congruence_probe",
                    algebra_size=alg.size,
                    structure=fs,
                    atom_values=(("p", x), ("q", x)),
                    assignment_fingerprint="n/a",
                    values=(("~p", c1), ("~q", c2)),
                    description=(
                        f"||p|| = ||q|| = {x} yet ~p may take {c1} and ~q {c2};",
                        "negation is not determined by the truth value",
                    ),
                )
    return Exhausted("congruence_probe", tuple(sorted(census.items())))
