"""Form search: hit correctness, path agreement, budget contract."""

import pytest

from mto1.cyclotomic import CycloForm, brute_verdict_star
from mto1.galois import Poly, build_field
from mto1.search import (BudgetError, _search_generic, _search_prime_numpy,
                         admissible_r_values, search_forms)


def test_search_small_all_hits_verified():
    spec = build_field(13)
    hits = search_forms(spec, 4, 2, 3)
    assert hits
    for hit in hits:
        assert hit["verified"]
        form = CycloForm(spec, hit["r"], 4, Poly.from_string(spec, hit["h"]))
        assert brute_verdict_star(form, 3)


def test_search_completeness_against_plain_enumeration():
    # every (r, h) the search reports, and nothing else, is m-to-1
    spec = build_field(7)
    hits = search_forms(spec, 2, 2, 2)
    hit_set = {(h["r"], h["h"]) for h in hits}
    brute = set()
    for c1 in range(7):
        for c2 in range(7):
            h = Poly(spec, (1, c1, c2))
            try:
                for r in range(1, 7):
                    form = CycloForm(spec, r, 2, h)
                    if brute_verdict_star(form, 2):
                        brute.add((r, str(h)))
            except Exception:
                continue
    assert hit_set == brute


def test_numpy_and_generic_paths_agree():
    spec = build_field(13)
    rs = admissible_r_values(13, 4, 3)
    a = sorted(_search_generic(spec, 4, 2, 3, rs))
    b = sorted(_search_prime_numpy(spec, 4, 2, 3, rs))
    assert a == b


def test_search_extension_field_generic_path():
    spec = build_field(2, 4)
    hits = search_forms(spec, 5, 1, 3)
    for hit in hits:
        assert hit["verified"]


def test_search_budget():
    spec = build_field(29)
    with pytest.raises(BudgetError):
        search_forms(spec, 4, 5, 12, budget=100)


def test_search_m_out_of_reduction_range_is_empty():
    # m too large for every (m1, ell) pair: no admissible r at all
    assert admissible_r_values(13, 12, 5) == []
    assert search_forms(build_field(13), 12, 1, 5) == []


@pytest.mark.slow
def test_search_f29_finds_paper_h():
    spec = build_field(29)
    hits = search_forms(spec, 4, 5, 12)
    assert {"r": 2, "h": "1,0,0,15,1,1", "m": 12, "m1": 2,
            "verified": True} in hits
    assert all(h["verified"] for h in hits)
