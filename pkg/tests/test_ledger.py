import pytest
from hypothesis import given, strategies as st

from flowsearch.ledger import BudgetExhausted, CostLedger


def test_charge_and_breakdown():
    led = CostLedger()
    led.charge("find-eta", 4)
    led.charge("sampling", 8)
    led.charge("find-eta", 2)
    assert led.total == 14
    assert led.as_dict() == {"total": 14, "phases": {"find-eta": 6, "sampling": 8}}


def test_budget_refuses_without_charging():
    led = CostLedger(budget=10)
    led.charge("a", 7)
    with pytest.raises(BudgetExhausted):
        led.charge("a", 4)
    assert led.total == 7
    assert led.remaining() == 3


def test_negative_charge():
    with pytest.raises(ValueError):
        CostLedger().charge("a", -1)


@given(st.lists(st.tuples(st.sampled_from("abc"), st.integers(0, 1000))))
def test_monotone_and_additive(charges):
    led, total = CostLedger(), 0
    for phase, n in charges:
        before = led.total
        led.charge(phase, n)
        total += n
        assert led.total >= before
    assert led.total == total == sum(led.phases.values())
    other = CostLedger()
    other.merge(led)
    assert other.as_dict() == led.as_dict()
