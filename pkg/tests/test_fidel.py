import pytest

from pst.algebra import boolean_algebra, chain, enumerate_heyting, is_boolean
from pst.fidel import (
    ClauseIII,
    EmptyNegSet,
    FStructure,
    LemFails,
    format_fstructure_text,
    is_leibniz_comega,
    is_substructure,
    parse_fstructure_text,
    saturate,
    saturated_clause_iii_holds,
    validate_comega,
    validate_n4,
)


def test_saturate_frozen_families():
    assert saturate(chain(2)).negs == ((1,), (0, 1))
    assert saturate(chain(3)).negs == ((2,), (2,), (0, 1, 2))
    assert saturate(chain(1)).negs == ((0,),)


def test_validate_n4_two_element_saturated():
    fs = validate_n4(chain(2), [[1], [0, 1]])
    assert fs.kind == "n4"


def test_validate_n4_empty_set_rejected():
    with pytest.raises(EmptyNegSet) as exc:
        validate_n4(chain(2), [[1], []])
    assert exc.value.x == 1


def test_validate_n4_full_family_always_valid():
    # the everything-allowed family satisfies every closure clause trivially
    for alg in enumerate_heyting(4):
        fam = [list(range(alg.size))] * alg.size
        validate_n4(alg, fam)


def test_saturated_clause_iii_exactly_on_boolean_algebras():
    """Oracle-computed fact: the saturated family satisfies the implication
    closure clause iff the algebra is Boolean.  At y = 0 the clause forces
    x v (x -> 0) = top for every x."""
    for alg in enumerate_heyting(5):
        violation = saturated_clause_iii_holds(alg)
        if is_boolean(alg):
            assert violation is None
            validate_n4(alg, saturate(alg).negs)  # must not raise
        else:
            assert violation is not None
            with pytest.raises(ClauseIII):
                validate_n4(alg, saturate(alg).negs)


def test_saturated_three_chain_clause_iii_witness():
    # frozen witness: x = a (the middle), y = 0, y' = top
    assert saturated_clause_iii_holds(chain(3)) == (1, 0, 2)


def test_saturated_clauses_i_and_ii_always_hold():
    alg = chain(3)
    fs = saturate(alg)
    for x in range(alg.size):
        assert fs.negs[x]
        for xp in fs.negs[x]:
            assert x in fs.negs[xp]
            for y in range(alg.size):
                for yp in fs.negs[y]:
                    assert alg.join_(xp, yp) in fs.negs[alg.meet_(x, y)]
                    assert alg.meet_(xp, yp) in fs.negs[alg.join_(x, y)]


def test_validate_comega_saturated_three_chain():
    fs = validate_comega(chain(3), [[2], [2], [0, 1, 2]])
    assert fs.kind == "comega"


def test_validate_comega_lem_failure():
    with pytest.raises(LemFails) as exc:
        validate_comega(chain(3), [[2], [1], [0, 1, 2]])
    assert (exc.value.x, exc.value.xp) == (1, 1)


def test_validate_comega_trivial_algebra():
    fs = validate_comega(chain(1), [[0]])
    assert fs.negs == ((0,),)


def test_saturate_passes_comega_for_all_enumerated():
    for alg in enumerate_heyting(5):
        fs = saturate(alg, "comega")
        validate_comega(alg, fs.negs)
        assert is_leibniz_comega(fs)


def test_is_leibniz_comega_cases():
    assert is_leibniz_comega(saturate(chain(3), "comega"))
    # 0 missing from N_top
    fs = FStructure(chain(2), ((1,), (1,)), "comega")
    assert not is_leibniz_comega(fs)
    assert is_leibniz_comega(saturate(chain(1), "comega"))


# --- substructures -------------------------------------------------------------


def test_substructure_identity_and_saturation():
    sat = saturate(chain(3), "comega")
    assert is_substructure(sat, sat) is not None
    # any valid comega family sits inside its saturation: x' in N_x forces
    # x v x' = top, which is exactly saturated membership
    small = validate_comega(chain(3), [[2], [2], [0]])
    emb = is_substructure(small, saturate(chain(3), "comega"))
    assert emb == (0, 1, 2)


def test_substructure_fails_on_cardinality():
    assert is_substructure(saturate(chain(3)), saturate(chain(2))) is None


def test_n4_full_family_not_inside_saturation():
    """Oracle-computed counterexample: the full family over the 2-chain is a
    valid strong-negation structure but does not embed into the saturated
    one (0 is an admissible negation of 0 only in the full family)."""
    full = validate_n4(chain(2), [[0, 1], [0, 1]])
    assert is_substructure(full, saturate(chain(2))) is None


def test_substructure_kind_mismatch():
    assert is_substructure(saturate(chain(2), "n4"), saturate(chain(2), "comega")) is None


def test_substructure_respects_negation_families():
    # same algebra, smaller family into bigger family
    small = FStructure(chain(2), ((1,), (1,)), "n4")
    big = saturate(chain(2), "n4")
    assert is_substructure(small, big) == (0, 1)
    assert is_substructure(big, small) is None


# --- text format -----------------------------------------------------------------


def test_fstructure_round_trip():
    fs = saturate(chain(3), "comega")
    text = format_fstructure_text("sat3", fs)
    ident, back = parse_fstructure_text(text)
    assert ident == "sat3"
    assert back.kind == "comega"
    assert back.negs == fs.negs
    assert back.algebra.imp == fs.algebra.imp
