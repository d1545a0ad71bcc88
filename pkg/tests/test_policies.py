import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsched.policies import (
    PolicyKind,
    QubitRecord,
    admit,
    select_for_pushout,
    select_for_service,
)
from qsched.syndromes import CondErrorProbs, SyndromeHistory, phase_flip_prob, success_prob

PER_ROUND = CondErrorProbs.from_flip_prob(phase_flip_prob(50.0, 0.003))


def rec(qid, t=0.0, n_plus=0, n_minus=0):
    return QubitRecord(id=qid, arrival_time=t, history=SyndromeHistory(n_plus, n_minus))


def buffer_of(*records):
    return {r.id: r for r in records}


records_strategy = st.lists(
    st.tuples(
        st.floats(min_value=0.0, max_value=10.0),
        st.integers(min_value=0, max_value=6),
        st.integers(min_value=0, max_value=6),
    ),
    min_size=1,
    max_size=8,
).map(lambda rows: [rec(i, t, a, b) for i, (t, a, b) in enumerate(rows)])


class TestSelectForService:
    def test_policy_names(self):
        assert PolicyKind.from_name("FQF") is PolicyKind.FQF
        assert PolicyKind.from_name("oqf") is PolicyKind.OQF
        with pytest.raises(ValueError):
            PolicyKind.from_name("lifo")

    def test_fqf_prefers_clean_history(self):
        buf = buffer_of(rec(1, n_plus=5, n_minus=0), rec(2, n_plus=3, n_minus=1))
        assert select_for_service(PolicyKind.FQF, buf.values(), PER_ROUND) == 1

    def test_yqf_picks_latest_arrival(self):
        buf = buffer_of(rec(1, t=0.0), rec(2, t=0.1))
        assert select_for_service(PolicyKind.YQF, buf.values(), PER_ROUND) == 2

    def test_oqf_picks_earliest_arrival(self):
        buf = buffer_of(rec(1, t=0.0), rec(2, t=0.1))
        assert select_for_service(PolicyKind.OQF, buf.values(), PER_ROUND) == 1

    def test_fqf_tie_breaks_by_lowest_id(self):
        buf = buffer_of(rec(3, n_minus=2), rec(1, n_minus=2), rec(2, n_minus=2))
        assert select_for_service(PolicyKind.FQF, buf.values(), PER_ROUND) == 1

    def test_empty_buffer_is_an_error(self):
        for policy in PolicyKind:
            with pytest.raises(ValueError):
                select_for_service(policy, [], PER_ROUND)

    @given(records_strategy)
    def test_fqf_invariant_under_monotone_transform(self, records):
        chosen = select_for_service(PolicyKind.FQF, records, PER_ROUND)
        # Reference argmax under a strictly monotone transform of the
        # success probability, same tie-break key.
        reference = min(
            records,
            key=lambda r: (-math.log(success_prob(r.history, PER_ROUND)), r.tiebreak),
        )
        assert chosen == reference.id

    @given(records_strategy)
    def test_selection_independent_of_iteration_order(self, records):
        for policy in PolicyKind:
            forward = select_for_service(policy, records, PER_ROUND)
            assert select_for_service(policy, list(reversed(records)), PER_ROUND) == forward

    def test_fqf_batch_choice_is_fewest_minuses(self):
        # Simultaneous batch, equal round counts: ordering reduces to the
        # minus count, remaining ties to the id key.
        batch = [rec(i, t=0.0, n_plus=4 - m, n_minus=m) for i, m in enumerate((2, 1, 3, 1))]
        chosen = select_for_service(PolicyKind.FQF, batch, PER_ROUND)
        assert chosen == min(batch, key=lambda r: (r.history.n_minus, r.id)).id == 1


class TestSelectForPushout:
    def test_timing_policies_evict_oldest(self):
        buf = buffer_of(rec(1, t=0.0), rec(2, t=0.1), rec(3, t=0.2))
        assert select_for_pushout(PolicyKind.YQF, buf.values(), PER_ROUND) == 1
        assert select_for_pushout(PolicyKind.OQF, buf.values(), PER_ROUND) == 1

    def test_fqf_evicts_highest_error_likelihood(self):
        buf = buffer_of(
            rec(1, n_plus=0, n_minus=3), rec(2, n_plus=2, n_minus=1), rec(3, n_plus=6, n_minus=0)
        )
        assert select_for_pushout(PolicyKind.FQF, buf.values(), PER_ROUND) == 1

    def test_fqf_tie_breaks_by_lowest_id(self):
        buf = buffer_of(rec(5, n_minus=1), rec(4, n_minus=1))
        assert select_for_pushout(PolicyKind.FQF, buf.values(), PER_ROUND) == 4

    @given(records_strategy)
    def test_oqf_and_yqf_agree_on_pushout(self, records):
        assert select_for_pushout(PolicyKind.OQF, records, PER_ROUND) == select_for_pushout(
            PolicyKind.YQF, records, PER_ROUND
        )


class TestAdmit:
    def test_admission_within_capacity(self):
        buf, evicted = admit({}, [rec(i) for i in range(5)], 5, PolicyKind.YQF, PER_ROUND)
        assert sorted(buf) == [0, 1, 2, 3, 4]
        assert evicted == []

    def test_yqf_full_buffer_evicts_oldest(self):
        residents = [rec(i, t=0.01 * i) for i in range(5)]
        buf, evicted = admit(
            buffer_of(*residents), [rec(10, t=1.0)], 5, PolicyKind.YQF, PER_ROUND
        )
        assert evicted == [0]
        assert 10 in buf and 0 not in buf and len(buf) == 5

    def test_fqf_batch_displaces_stale_residents(self):
        residents = [rec(i, t=0.0, n_minus=2) for i in range(4)]
        arrivals = [rec(i, t=0.5) for i in range(4, 8)]
        buf, evicted = admit(buffer_of(*residents), arrivals, 5, PolicyKind.FQF, PER_ROUND)
        assert evicted == [0, 1, 2]
        assert sorted(buf) == [3, 4, 5, 6, 7]

    def test_input_buffer_not_modified(self):
        original = buffer_of(rec(0), rec(1))
        admit(original, [rec(2)], 2, PolicyKind.OQF, PER_ROUND)
        assert sorted(original) == [0, 1]

    def test_infinite_capacity_never_evicts(self):
        buf, evicted = admit({}, [rec(i) for i in range(100)], None, PolicyKind.FQF, PER_ROUND)
        assert len(buf) == 100 and evicted == []

    def test_rejects_bad_capacity_and_duplicates(self):
        with pytest.raises(ValueError):
            admit({}, [rec(0)], 0, PolicyKind.OQF, PER_ROUND)
        with pytest.raises(ValueError):
            admit(buffer_of(rec(0)), [rec(0)], 5, PolicyKind.OQF, PER_ROUND)

    @given(
        st.lists(
            st.tuples(st.integers(min_value=0, max_value=6), st.integers(min_value=1, max_value=6)),
            min_size=1,
            max_size=6,
        ),
        st.integers(min_value=1, max_value=4),
    )
    def test_fresh_arrivals_survive_fqf_pushout(self, resident_histories, n_arrivals):
        # Every resident has at least one MINUS round, so fresh arrivals
        # (success probability exactly 1) can never rank lowest.
        residents = [rec(i, t=0.0, n_plus=a, n_minus=b) for i, (a, b) in enumerate(resident_histories)]
        arrivals = [rec(100 + j, t=1.0) for j in range(n_arrivals)]
        capacity = max(1, len(residents) + n_arrivals - 2, n_arrivals)
        buf, evicted = admit(buffer_of(*residents), arrivals, capacity, PolicyKind.FQF, PER_ROUND)
        assert all(e < 100 for e in evicted)
        assert all(a.id in buf for a in arrivals)

    def test_records_validate(self):
        with pytest.raises(ValueError):
            QubitRecord(id=0, arrival_time=1.0, last_ec_time=0.5)
        r = QubitRecord(id=7, arrival_time=2.0)
        assert r.last_ec_time == 2.0 and r.tiebreak == 7
