"""Scheme model: demand enumeration, verification, sharing, permutation."""

import random
from fractions import Fraction

import pytest

from d2dcache.catalog import CornerPointId
from d2dcache.errors import ConfigurationError, ResourceBudgetError
from d2dcache.field import GF2, FieldMatrix
from d2dcache.model import (
    LinearScheme,
    ModelKind,
    SenderSignal,
    enumerate_demands,
    permute_scheme,
    requesters_of,
    senders_of,
    unit_row,
)
from d2dcache.sharing import memory_share, symmetrize
from d2dcache.verify import decodes_demand, verify

from conftest import cached_2rr1s, cached_kuser, cached_traditional


# ---------------------------------------------------------------------------
# demand enumeration
# ---------------------------------------------------------------------------

def test_demand_counts():
    assert len(enumerate_demands(ModelKind.TWO_RR_ONE_S, 2, 3, 1)) == 12
    assert len(enumerate_demands(ModelKind.TRADITIONAL_D2D, 2, 3, 0)) == 8
    assert len(enumerate_demands(ModelKind.K_USER_S_SENDERS, 3, 4, 2)) == 54
    assert len(enumerate_demands(ModelKind.REQUEST_RANDOM, 2, 3)) == 27


def test_demand_order_and_patterns():
    demands = enumerate_demands(ModelKind.TWO_RR_ONE_S, 2, 3, 1)
    assert demands == sorted(demands)
    assert all(d.count(0) == 1 for d in demands)
    assert demands[0] == (0, 1, 1)


def test_senders_and_requesters():
    assert senders_of(ModelKind.TWO_RR_ONE_S, (0, 2, 1)) == (1,)
    assert senders_of(ModelKind.TRADITIONAL_D2D, (1, 2, 1)) == (1, 2, 3)
    assert senders_of(ModelKind.K_USER_S_SENDERS, (1, 0, 2, 0)) == (2, 4)
    assert senders_of(ModelKind.REQUEST_RANDOM, (1, 1, 1)) == (1, 2, 3)
    assert senders_of(ModelKind.REQUEST_RANDOM, (0, 0, 0)) == (1, 2, 3)
    assert requesters_of((0, 2, 1)) == (2, 3)


def test_inconsistent_parameters_rejected():
    with pytest.raises(ConfigurationError):
        enumerate_demands(ModelKind.TWO_RR_ONE_S, 2, 4, 1)
    with pytest.raises(ConfigurationError):
        enumerate_demands(ModelKind.K_USER_S_SENDERS, 2, 3, 2)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_full_cache_scheme_verifies_at_rate_zero():
    scheme = cached_2rr1s(CornerPointId.FULL, 3)
    report = verify(scheme)
    assert report.passed
    assert report.worst_case_rate == 0
    assert report.memory == (3, 3, 3)
    assert all(e.decodable for e in report.demands)


def test_report_flags_missing_demand():
    scheme = cached_2rr1s(CornerPointId.MDS_HALF, 2)
    delivery = dict(scheme.delivery)
    delivery.pop((0, 1, 1))
    broken = LinearScheme(scheme.model, scheme.N, scheme.K, scheme.s, scheme.L,
                          scheme.field, scheme.placement, delivery)
    report = verify(broken)
    assert not report.demand_coverage
    assert not report.passed


def test_report_insertion_order_irrelevant():
    scheme = cached_2rr1s(CornerPointId.MAN_TWO_THIRDS, 2)
    reversed_delivery = dict(reversed(list(scheme.delivery.items())))
    shuffled = LinearScheme(scheme.model, scheme.N, scheme.K, scheme.s, scheme.L,
                            scheme.field, scheme.placement, reversed_delivery)
    assert verify(shuffled) == verify(scheme)


def test_redundant_placement_row_fails_full_rank():
    N, L = 2, 1
    rows = [unit_row(N, L, 1, 1), unit_row(N, L, 2, 1), unit_row(N, L, 1, 1)]
    P = FieldMatrix.from_rows(GF2, rows)
    placement = (P, P, P)
    delivery = {
        d: {k: SenderSignal(FieldMatrix.empty(GF2, 3)) for k in senders_of(ModelKind.TWO_RR_ONE_S, d)}
        for d in enumerate_demands(ModelKind.TWO_RR_ONE_S, N, 3, 1)
    }
    scheme = LinearScheme(ModelKind.TWO_RR_ONE_S, N, 3, 1, L, GF2, placement, delivery)
    report = verify(scheme)
    assert report.placement_full_rank is False
    assert not report.passed


def test_pairwise_recovery_feasibility_bound(catalog_2rr1s):
    # two caches must jointly span everything, so 2 * min memory >= N
    for label, scheme in catalog_2rr1s():
        report = verify(scheme, check_decodability=False)
        assert 2 * min(report.memory) >= scheme.N, label


def _decodes_by_exhaustive_enumeration(scheme, demand, user):
    """Information-theoretic oracle: observations must pin down the file.

    Enumerates every assignment of the N*L GF(2) symbols; the user decodes
    iff any two assignments producing the same cache content and received
    signals agree on the requested file's symbols.
    """
    import itertools
    n_sym = scheme.symbol_count
    P = scheme.placement_matrix(user)
    signal_rows = [row for mat in scheme.transmitted_rows(demand).values() for row in mat.rows]
    file_id = demand[user - 1]
    lo = (file_id - 1) * scheme.L
    hi = lo + scheme.L
    seen = {}
    for w in itertools.product((0, 1), repeat=n_sym):
        obs = tuple(
            sum(a * b for a, b in zip(row, w)) % 2
            for row in list(P.rows) + signal_rows
        )
        wanted = w[lo:hi]
        if obs in seen and seen[obs] != wanted:
            return False
        seen[obs] = wanted
    return True


def test_verifier_agrees_with_information_theoretic_oracle():
    rng = random.Random(123)
    N, L = 2, 2
    demands = enumerate_demands(ModelKind.TWO_RR_ONE_S, N, 3, 1)
    agree_false = agree_true = 0
    for _ in range(10):
        placement = tuple(
            FieldMatrix.from_rows(
                GF2, [[rng.randrange(2) for _ in range(N * L)] for _ in range(rng.randint(2, 3))]
            )
            for _ in range(3)
        )
        delivery = {}
        for d in demands:
            sender = senders_of(ModelKind.TWO_RR_ONE_S, d)[0]
            width = placement[sender - 1].nrows
            delivery[d] = {
                sender: SenderSignal(FieldMatrix.from_rows(
                    GF2, [[rng.randrange(2) for _ in range(width)] for _ in range(2)]
                ))
            }
        scheme = LinearScheme(ModelKind.TWO_RR_ONE_S, N, 3, 1, L, GF2, placement, delivery)
        report = verify(scheme)
        verdicts = {e.demand: (e.decodable, e.failed_users) for e in report.demands}
        for d in rng.sample(demands, 4):
            decodable, failed = verdicts[d]
            for user in requesters_of(d):
                expected = _decodes_by_exhaustive_enumeration(scheme, d, user)
                got = user not in failed
                assert got == expected, (d, user)
                if expected:
                    agree_true += 1
                else:
                    agree_false += 1
    assert agree_true and agree_false  # both verdicts exercised


def test_deleting_rows_never_helps_decoding():
    rng = random.Random(7)
    N, L = 2, 2
    demands = enumerate_demands(ModelKind.TWO_RR_ONE_S, N, 3, 1)
    for _ in range(12):
        placement = tuple(
            FieldMatrix.from_rows(
                GF2, [[rng.randrange(2) for _ in range(N * L)] for _ in range(3)]
            )
            for _ in range(3)
        )
        delivery = {}
        for d in demands:
            sender = senders_of(ModelKind.TWO_RR_ONE_S, d)[0]
            delivery[d] = {
                sender: SenderSignal(FieldMatrix.from_rows(
                    GF2, [[rng.randrange(2) for _ in range(3)] for _ in range(2)]
                ))
            }
        scheme = LinearScheme(ModelKind.TWO_RR_ONE_S, N, 3, 1, L, GF2, placement, delivery)
        d = rng.choice(demands)
        sender = senders_of(ModelKind.TWO_RR_ONE_S, d)[0]
        full_ok = decodes_demand(scheme, d, requesters_of(d))
        sig = scheme.delivery[d][sender]
        for drop in range(sig.matrix.nrows):
            rows = [r for i, r in enumerate(sig.matrix.rows) if i != drop]
            reduced = {sender: SenderSignal(FieldMatrix.from_rows(GF2, rows, ncols=3))}
            thin = dict(scheme.delivery)
            thin[d] = reduced
            thinner = LinearScheme(ModelKind.TWO_RR_ONE_S, N, 3, 1, L, GF2, placement, thin)
            assert not (decodes_demand(thinner, d, requesters_of(d)) and not full_ok)


# ---------------------------------------------------------------------------
# memory sharing
# ---------------------------------------------------------------------------

def test_alpha_one_reproduces_first_scheme():
    a = cached_2rr1s(CornerPointId.HALF_RATE, 2)
    b = cached_2rr1s(CornerPointId.MAN_TWO_THIRDS, 2)
    mix = memory_share(a, b, Fraction(1))
    ra, rm = verify(a), verify(mix)
    assert rm.memory == ra.memory
    assert rm.rate_table() == ra.rate_table()
    assert rm.passed


def test_half_mix_of_coded_and_uncoded_corners():
    a = cached_2rr1s(CornerPointId.MDS_HALF, 4)
    b = cached_2rr1s(CornerPointId.MAN_TWO_THIRDS, 4)
    report = verify(memory_share(a, b, Fraction(1, 2)), check_decodability=False)
    assert report.memory == (Fraction(7, 3),) * 3
    assert report.worst_case_rate == Fraction(2, 3)


def test_half_mix_verifies_and_hits_expected_point():
    a = cached_2rr1s(CornerPointId.HALF_RATE, 2)
    b = cached_2rr1s(CornerPointId.MAN_TWO_THIRDS, 2)
    report = verify(memory_share(a, b, Fraction(1, 2)))
    assert report.passed
    assert report.memory == (Fraction(5, 4),) * 3
    assert report.worst_case_rate == Fraction(5, 12)


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 3), Fraction(2, 5)])
def test_share_rate_law_exact_per_demand(alpha):
    a = cached_2rr1s(CornerPointId.MDS_HALF, 2)
    b = cached_2rr1s(CornerPointId.HALF_RATE, 2)
    mix = verify(memory_share(a, b, alpha), check_decodability=False)
    ra, rb = verify(a, check_decodability=False), verify(b, check_decodability=False)
    for d in enumerate_demands(ModelKind.TWO_RR_ONE_S, 2, 3, 1):
        assert mix.rate_of(d) == alpha * ra.rate_of(d) + (1 - alpha) * rb.rate_of(d)


def test_share_rejects_mismatched_inputs():
    a = cached_2rr1s(CornerPointId.MDS_HALF, 2)
    b = cached_2rr1s(CornerPointId.MDS_HALF, 3)
    with pytest.raises(ConfigurationError):
        memory_share(a, b, Fraction(1, 2))
    with pytest.raises(ConfigurationError):
        memory_share(a, cached_traditional(), Fraction(1, 2))


# ---------------------------------------------------------------------------
# permutation
# ---------------------------------------------------------------------------

def test_identity_permutation_is_noop():
    scheme = cached_2rr1s(CornerPointId.N2_SEVEN_EIGHTHS, 2)
    assert permute_scheme(scheme, (1, 2, 3), (1, 2)) == scheme


def test_user_cycle_preserves_rates_and_decodability():
    scheme = cached_2rr1s(CornerPointId.N2_SEVEN_EIGHTHS, 2)
    cycled = permute_scheme(scheme, (2, 3, 1), (1, 2))
    base, rot = verify(scheme), verify(cycled)
    assert rot.passed
    assert sorted(e.rate for e in base.demands) == sorted(e.rate for e in rot.demands)


def test_permutation_maps_verdicts_through_demand_map():
    scheme = cached_2rr1s(CornerPointId.HALF_RATE, 3)
    up, fp = (3, 1, 2), (2, 3, 1)
    permuted = permute_scheme(scheme, up, fp)
    base, moved = verify(scheme), verify(permuted)
    from d2dcache.model import apply_demand_perm
    moved_rates = moved.rate_table()
    for entry in base.demands:
        image = apply_demand_perm(entry.demand, up, fp)
        assert moved_rates[image] == entry.rate


def test_file_transposition_fixes_file_symmetric_placement():
    scheme = cached_2rr1s(CornerPointId.MDS_HALF, 3)
    swapped = permute_scheme(scheme, (1, 2, 3), (2, 1, 3))
    for k in range(1, 4):
        assert swapped.placement_matrix(k).row_set() == scheme.placement_matrix(k).row_set()


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------

def test_symmetrize_of_rate_uniform_scheme_is_rate_uniform():
    base = cached_2rr1s(CornerPointId.MDS_HALF, 2)
    sym = symmetrize(base)
    report = verify(sym, check_decodability=False)
    assert set(e.rate for e in report.demands) == {Fraction(1)}


def test_symmetrize_seven_eighths_keeps_worst_case():
    base = cached_2rr1s(CornerPointId.N2_SEVEN_EIGHTHS, 2)
    sym = symmetrize(base)
    assert verify(sym, check_decodability=False).worst_case_rate == Fraction(7, 8)


@pytest.mark.parametrize("point,N", [
    (CornerPointId.MDS_HALF, 2),
    (CornerPointId.MAN_TWO_THIRDS, 2),
    (CornerPointId.N2_SEVEN_EIGHTHS, 2),
    (CornerPointId.HALF_RATE, 3),
])
def test_lazy_accounting_matches_explicit_blocks(point, N):
    base = cached_2rr1s(point, N)
    sym = symmetrize(base)
    explicit = sym.to_explicit()
    lazy_report = verify(sym, check_decodability=False)
    full_report = verify(explicit)
    assert full_report.passed
    assert lazy_report.memory == full_report.memory
    assert lazy_report.rate_table() == full_report.rate_table()
    demands = enumerate_demands(base.model, base.N, base.K, base.s)
    for d in demands[:4]:
        assert sym.delivery_row_counts(d) == {
            k: sig.row_count for k, sig in explicit.delivery[d].items()
        }


@pytest.mark.parametrize("point,N,K,s", [
    (CornerPointId.KU_MDS, 3, 4, 1),
    (CornerPointId.KU_MAN, 2, 3, 1),
])
def test_lazy_accounting_matches_explicit_for_kuser(point, N, K, s):
    base = cached_kuser(point, N, K, s)
    sym = symmetrize(base)
    explicit = sym.to_explicit()
    lazy_report = verify(sym, check_decodability=False)
    full_report = verify(explicit, check_decodability=False)
    assert lazy_report.rate_table() == full_report.rate_table()
    assert lazy_report.memory == full_report.memory
    for d in list(explicit.delivery)[:3]:
        assert sym.delivery_row_counts(d) == {
            k: sig.row_count for k, sig in explicit.delivery[d].items()
        }


def test_symmetrize_budget_guard():
    base = cached_2rr1s(CornerPointId.HALF_RATE, 8)
    with pytest.raises(ResourceBudgetError):
        symmetrize(base)
    with pytest.raises(ResourceBudgetError):
        symmetrize(cached_2rr1s(CornerPointId.MDS_HALF, 2), budget=10)


def test_symmetrized_transmissions_decode(catalog_2rr1s):
    base = cached_2rr1s(CornerPointId.MAN_TWO_THIRDS, 2)
    sym = symmetrize(base)
    report = verify(sym)
    assert report.passed
    assert report.worst_case_rate == Fraction(1, 3)


def test_symmetrized_kuser_scheme_decodes():
    base = cached_kuser(CornerPointId.KU_MDS, 2, 3, 1)
    report = verify(symmetrize(base))
    assert report.passed
    assert report.memory == (1, 1, 1)
    assert report.worst_case_rate == 1
