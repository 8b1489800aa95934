import pytest

from d2dcache.catalog import (
    CornerPointId,
    build_2rr1s_scheme,
    build_kuser_scheme,
    build_traditional_scheme,
)

TWO_RR_POINTS = (
    CornerPointId.FULL,
    CornerPointId.MDS_HALF,
    CornerPointId.MAN_TWO_THIRDS,
    CornerPointId.HALF_RATE,
)

KUSER_CASES = ((2, 3, 1), (4, 5, 2), (3, 4, 1), (4, 6, 3))

_cache = {}


def cached_2rr1s(point, N):
    key = ("2rr1s", point, N)
    if key not in _cache:
        _cache[key] = build_2rr1s_scheme(point, N)
    return _cache[key]


def cached_traditional():
    key = ("trad",)
    if key not in _cache:
        _cache[key] = build_traditional_scheme(CornerPointId.TRAD_CODED_ONE_ONE, 2)
    return _cache[key]


def cached_kuser(point, N, K, s):
    key = ("kuser", point, N, K, s)
    if key not in _cache:
        _cache[key] = build_kuser_scheme(point, N, K, s)
    return _cache[key]


def all_2rr1s_schemes(Ns=range(2, 9)):
    """(label, scheme) for every catalog design in the one-sender model."""
    out = []
    for N in Ns:
        for point in TWO_RR_POINTS:
            out.append((f"{point.value}/N={N}", cached_2rr1s(point, N)))
        if N == 2:
            out.append((f"n2-7-8/N=2", cached_2rr1s(CornerPointId.N2_SEVEN_EIGHTHS, 2)))
    return out


@pytest.fixture(scope="session")
def catalog_2rr1s():
    return all_2rr1s_schemes


@pytest.fixture(scope="session")
def trad_scheme():
    return cached_traditional()
