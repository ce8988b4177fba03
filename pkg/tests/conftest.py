import pytest

from designforge import InMemoryQuadratureCache, build, plan


@pytest.fixture(scope="session")
def quad_cache():
    """One quadrature cache for the whole session; solves are reused."""
    return InMemoryQuadratureCache()


@pytest.fixture(scope="session")
def built(quad_cache):
    """Memoized builder: built(n, t) -> (Design, BuildReport)."""
    memo = {}

    def factory(n, t):
        if (n, t) not in memo:
            memo[n, t] = build(plan(n, t), cache_obj=quad_cache)
        return memo[n, t]

    return factory
