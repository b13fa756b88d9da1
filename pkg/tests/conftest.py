import pytest

from pst.algebra import boolean_algebra, chain, enumerate_heyting
from pst.fidel import saturate
from pst.names import NameStore
from pst.valuation import EvalContext, make_model


@pytest.fixture(scope="session")
def chain2():
    return chain(2)


@pytest.fixture(scope="session")
def chain3():
    return chain(3)


@pytest.fixture(scope="session")
def bool4():
    return boolean_algebra(2)


@pytest.fixture(scope="session")
def algebras_to_5():
    return list(enumerate_heyting(5))


@pytest.fixture()
def bool_model(chain2):
    store = NameStore()
    return make_model(chain2, store, 2)


@pytest.fixture()
def heyting3_model(chain3):
    store = NameStore()
    return make_model(chain3, store, 2, mode="heyting")


@pytest.fixture()
def comega3_model(chain3):
    store = NameStore()
    return make_model(saturate(chain3, "comega"), store, 2)


@pytest.fixture()
def n43_model(chain3):
    store = NameStore()
    return make_model(saturate(chain3, "n4"), store, 2)


@pytest.fixture()
def ctx(bool_model):
    return EvalContext(bool_model)
