import pytest

from dframes.errors import CapacityError
from dframes.presentation import is_stable
from dframes.search import (
    SearchConfig, evaluate_instance, exhaustive_instances, meet_semilattices, presentations,
    random_instances, random_semilattice, run_search,
)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(samples=0)
    with pytest.raises(ValueError):
        SearchConfig(mode="greedy")
    with pytest.raises(CapacityError):
        SearchConfig(max_b=4)
    assert SearchConfig(max_b=6, mode="random").max_b == 6


def test_semilattice_catalogue():
    # up to isomorphism: sizes 1, 2, 3 are chains only; size 4 adds the diamond
    sizes = [s.size for s in meet_semilattices(4)]
    assert sizes == [1, 2, 3, 4, 4]


def test_presentation_catalogue():
    cat = {s.size: presentations(s) for s in meet_semilattices(2)}
    assert len(cat[1]) == 2 and len(cat[2]) == 6
    for ps in cat.values():
        assert all(is_stable(p) for p in ps)
        assert len({p.covers for p in ps}) == len(ps)


def test_exhaustive_instance_count():
    assert sum(1 for _ in exhaustive_instances(1, 1)) == 4 * 4


def test_random_semilattices_are_meet_closed(rng):
    for _ in range(50):
        s, sets = random_semilattice(rng, 5)
        assert sets[-1] == max(sets)
        for i, a in enumerate(sets):
            for j, b in enumerate(sets):
                assert sets[s.meet[i][j]] == a & b


def test_evaluate_instance_has_no_violations():
    cfg = SearchConfig(max_b=4, mode="random", samples=50, seed=7)
    for inst in random_instances(cfg):
        r = evaluate_instance(inst)
        assert not r.violations, r


def test_exhaustive_small_search():
    result = run_search(SearchConfig(max_b=2, max_rel=1))
    # 2 one-element and 6 two-element presentations; (1 + cells)^2 relation pairs
    assert result.checked == 2 * 2 * 2 ** 2 + 2 * (2 * 6) * 3 ** 2 + 6 * 6 * 5 ** 2
    assert result.ok and not result.findings


def test_seeded_search_is_deterministic():
    cfg = SearchConfig(max_b=4, mode="random", samples=40, seed=3)
    a, b = run_search(cfg), run_search(cfg)
    assert a.render() == b.render()
    assert a.as_dict() == b.as_dict()


def test_workers_do_not_change_results():
    cfg = SearchConfig(max_b=3, mode="random", samples=30, seed=5)
    par = SearchConfig(max_b=3, mode="random", samples=30, seed=5, workers=2)
    assert run_search(cfg).render().split("\n")[1:] == run_search(par).render().split("\n")[1:]
