"""Construction pipelines: exact counts, explicit builds, insert contracts."""

from __future__ import annotations

import itertools
import random

import pytest

from cdckit.constructions import ConstructionPlan, build_blocks, build_linkage, \
    build_multiblocks, build_multilevel_insert, build_parallel_blocks, parse_plan, \
    plan_to_text, run_plan, special_form_vector
from cdckit.counting import mrd_size
from cdckit.errors import EnumerationLimitExceeded, HypothesisViolated, MissingSubcode
from cdckit.gf import gf
from cdckit.matrices import Matrix
from cdckit.rankcodes import enumerate_code, gabidulin_mrd
from cdckit.registry import BaseBoundRegistry
from cdckit.subspaces import cdc_to_text, identifying_vector, insertion_predicate, \
    verify_min_distance

REG = BaseBoundRegistry()
# the one non-analytic input the 15-coordinate worked value consumes
REG.add(2, 10, 4, 5, 1178824, "prior best known")


def _plan(family, q, n, d, k, **params):
    return ConstructionPlan(family, q, n, d, k, params)


def test_plan_text_round_trip(tmp_path):
    plan = _plan("multiblocks", 2, 12, 4, 6, n1=6, a1=4, b1=1, b2=1, t1=4, t2=2)
    text = plan_to_text(plan)
    back = parse_plan(text)
    assert back == plan
    with pytest.raises(HypothesisViolated):
        parse_plan("family = nonsense\nq = 2\nn = 4\nd = 2\nk = 2\n")


def test_linkage_counts_match_published():
    out = build_linkage(_plan("linkage", 2, 12, 4, 6, n1=6), REG)
    assert out.total == 1212418496
    out = build_linkage(_plan("linkage", 2, 15, 4, 5, n1=5), REG)
    assert out.total == 1252447538240


def test_linkage_rank_cap_degenerate():
    # d = 2k forces rank(M1) <= 0, so the second part is just |C2|
    out = build_linkage(_plan("linkage", 2, 8, 4, 2, n1=4), REG)
    assert out.component_counts["C2_part"] == REG.get(2, 4, 4, 2)


def test_linkage_explicit_desk():
    out = build_linkage(_plan("linkage", 2, 8, 4, 4, n1=4), REG, explicit=True)
    assert out.total == len(out.cdc) == 4622
    assert out.component_counts == {"C1_part": 4096, "C2_part": 526}


def test_blocks_desk_instance():
    out = build_blocks(_plan("blocks", 2, 8, 4, 4, n1=4, a1=2, b1=1, b2=1), REG)
    assert out.total == len(out.cdc) == 1024
    report = verify_min_distance(out.cdc)
    assert report.min_found >= 4
    # cross-coset pairs with equal off-diagonal blocks intersect in dim <= k - d/2
    rng = random.Random(3)
    words = out.cdc.codewords
    for _ in range(100):
        a, b = rng.sample(words, 2)
        dim_meet = (a.k + b.k - subspace_distance_stub(a, b)) // 2
        assert dim_meet <= 4 - 2


def subspace_distance_stub(a, b):
    from cdckit.subspaces import subspace_distance

    return subspace_distance(a, b)


def test_blocks_single_family_when_b_equals_half_d():
    out = build_blocks(_plan("blocks", 2, 8, 4, 4, n1=4, a1=2, b1=2, b2=2), REG)
    assert out.component_counts["s"] == 1
    assert out.total == mrd_size(2, 2, 2, 2) ** 4


def test_blocks_hypothesis_rejection():
    with pytest.raises(HypothesisViolated):
        build_blocks(_plan("blocks", 2, 8, 4, 4, n1=4, a1=1, b1=1, b2=1), REG)


def test_multiblocks_counts_match_published():
    plan = _plan("multiblocks", 2, 12, 4, 6, n1=6, a1=4, b1=1, b2=1, t1=4, t2=2)
    base = build_linkage(plan, REG)
    out = build_multiblocks(plan, base, REG)
    assert out.component_counts["B"] == 2154496
    assert out.total == 1214572992


def test_multiblocks_forced_zero_block():
    # rank cap a2 - d/2 = 0 leaves only the zero matrix
    caps = list(enumerate_code(gabidulin_mrd(2, 2, 2, 2), rank_cap=0))
    assert caps == [Matrix.zero(gf(2), 2, 2)]


def test_multiblocks_desk_explicit():
    plan = _plan("multiblocks", 2, 8, 4, 4, n1=4, a1=2, b1=1, b2=1, t1=2, t2=2)
    insert = build_multiblocks(plan, None, REG, explicit=True)
    assert insert.total == 64 == len(insert.cdc)
    assert all(insertion_predicate(w, 4, 4, 4) for w in insert.cdc)
    combined = run_plan(plan, REG, explicit=True)
    assert combined.total == 4686 == len(combined.cdc)


def test_parallel_blocks_counts_match_published():
    plan = _plan("parallel_blocks", 2, 16, 6, 8, n1=8, a1=4, b1=2, b2=1,
                 t1=4, t2=4, c1=3, c2=2)
    prior = build_multiblocks(plan, build_linkage(plan, REG), REG)
    assert prior.total == 282927684884928
    out = build_parallel_blocks(plan, prior, REG)
    assert out.component_counts["E"] == 2776
    assert out.total == 282927684887704


def test_parallel_blocks_product_form():
    from cdckit.counting import bounded_rank_size

    # c1 + c2 above k - d/2 is rejected
    plan = _plan("parallel_blocks", 2, 8, 4, 4, n1=4, a1=2, b1=2, b2=2,
                 t1=2, t2=2, c1=2, c2=2)
    with pytest.raises(HypothesisViolated):
        build_parallel_blocks(plan, None, REG)
    # b_i = d/2 on both sides gives the full product form
    plan2 = _plan("parallel_blocks", 2, 12, 4, 6, n1=6, a1=3, b1=2, b2=2,
                  t1=3, t2=3, c1=2, c2=2)
    out = build_parallel_blocks(plan2, None, REG)
    expect = (bounded_rank_size(2, 3, 3, 2, 2) ** 2
              * REG.get(2, 3, 4, 3) * REG.get(2, 3, 4, 3))
    assert out.component_counts["E"] == expect == 2500


def test_parallel_blocks_desk_explicit():
    plan = _plan("parallel_blocks", 2, 8, 4, 4, n1=4, a1=2, b1=1, b2=1,
                 t1=2, t2=2, c1=1, c2=1)
    insert = build_parallel_blocks(plan, None, REG, explicit=True)
    assert insert.total == len(insert.cdc) == 10
    assert all(insertion_predicate(w, 4, 4, 4) for w in insert.cdc)
    combined = run_plan(plan, REG, explicit=True)
    assert combined.total == len(combined.cdc) == 4696


def test_special_form_vector_examples():
    assert special_form_vector(6, 6, 4, 2, 0).bits == tuple(
        int(c) for c in "111100110000")
    assert special_form_vector(6, 6, 2, 4, 0).bits == tuple(
        int(c) for c in "110000111100")
    assert special_form_vector(7, 7, 3, 4, 3).bits == tuple(
        int(c) for c in "00011101111000")
    with pytest.raises(HypothesisViolated):
        special_form_vector(4, 6, 3, 2, 2)


def test_multilevel_case1_counts_match_published():
    plan = _plan("multilevel_I", 2, 12, 4, 6, n1=6, u1=4, u2=2, c1=1, c2=1)
    base = build_linkage(plan, REG)
    out = build_multilevel_insert(plan, base, REG)
    assert out.component_counts["L_1"] == 2154496
    assert out.component_counts["L_2"] == 4096
    assert out.total == 1214577088


def test_multilevel_case2_counts_match_published():
    plan = _plan("multilevel_II", 2, 14, 6, 7, n1=7, u1=3, u2=4, b1=2, b2=1)
    base = build_linkage(plan, REG)
    out = build_multilevel_insert(plan, base, REG)
    assert out.component_counts["L_1"] == 4096
    assert out.component_counts["L_2"] == 16
    assert out.total == 34532242136


def test_multilevel_single_vector_reduces_to_plain_lift():
    plan = _plan("multilevel_II", 2, 14, 6, 7, n1=7, u1=3, u2=4, b1=2, b2=1, lam=1)
    out = build_multilevel_insert(plan, None, REG)
    assert out.total == out.component_counts["L_1"] == 4096


def test_multilevel_desk_explicit():
    plan = _plan("multilevel_II", 2, 8, 4, 4, n1=4, u1=2, u2=2, b1=1, b2=1)
    insert = build_multilevel_insert(plan, None, REG, explicit=True)
    assert insert.total == len(insert.cdc) == 68
    assert all(insertion_predicate(w, 4, 4, 4) for w in insert.cdc)
    vecs = {identifying_vector(w).bits for w in insert.cdc}
    assert vecs == {tuple(int(c) for c in "11001100"),
                    tuple(int(c) for c in "00111100")}
    combined = run_plan(plan, REG, explicit=True)
    assert combined.total == len(combined.cdc) == 4690


def test_multilevel_hypothesis_rejection():
    plan = _plan("multilevel_I", 2, 12, 4, 6, n1=6, u1=3, u2=3, c1=1, c2=1)
    with pytest.raises(HypothesisViolated):
        build_multilevel_insert(plan, None, REG)  # u1 < d


def test_explicit_cutoff(monkeypatch):
    monkeypatch.setenv("CDCKIT_EXPLICIT_CUTOFF", "100")
    plan = _plan("blocks", 2, 8, 4, 4, n1=4, a1=2, b1=1, b2=1)
    with pytest.raises(EnumerationLimitExceeded):
        build_blocks(plan, REG)


def test_missing_subcode_for_nontrivial_base():
    # an explicit spread would be needed; only its count is known
    plan = _plan("parallel_blocks", 2, 12, 4, 4, n1=6, a1=2, b1=1, b2=1,
                 t1=2, t2=2, c1=1, c2=1)
    with pytest.raises(MissingSubcode):
        build_parallel_blocks(plan, None, REG, explicit=True)


def test_subcode_from_file(tmp_path):
    small = build_linkage(_plan("linkage", 2, 8, 4, 4, n1=4), REG, explicit=True)
    path = tmp_path / "c1.cdc"
    path.write_text(cdc_to_text(small.cdc))
    plan = ConstructionPlan("linkage", 2, 12, 4, 4, {"n1": 8},
                            files={"C1": str(path)})
    out = build_linkage(plan, REG)
    assert out.component_counts["C1_part"] == 4622 * mrd_size(2, 4, 4, 2)
    # a file whose parameters disagree with the requested sub-code slot
    bad = ConstructionPlan("linkage", 2, 13, 4, 4, {"n1": 4},
                           files={"C2": str(path)})
    with pytest.raises(MissingSubcode):
        build_linkage(bad, REG)


def test_no_duplicates_across_components():
    # the combined desk builds construct CDCs with strict duplicate detection
    for family, params in (
        ("multiblocks", dict(n1=4, a1=2, b1=1, b2=1, t1=2, t2=2)),
        ("multilevel_II", dict(n1=4, u1=2, u2=2, b1=1, b2=1)),
        ("parallel_blocks", dict(n1=4, a1=2, b1=1, b2=1, t1=2, t2=2, c1=1, c2=1)),
    ):
        out = run_plan(_plan(family, 2, 8, 4, 4, **params), REG, explicit=True)
        assert len({w.key() for w in out.cdc}) == out.total


def test_case1_insert_members_satisfy_insert_predicate():
    # sample the real 2154496-member insert stream of the (12,4,6) record
    import itertools as _it

    from cdckit.rankcodes import FerrersShape, fdrm_subcode_union
    from cdckit.subspaces import IdentifyingVector, lift_special_form, \
        special_form_bits

    sh = FerrersShape(6, 6, 4, 2, 0, 2)
    vec = IdentifyingVector(special_form_bits(6, 6, 4, 2, 0))
    code = fdrm_subcode_union(2, sh, 1, 1, rank3_cap=2)
    for m in _it.islice(code, 200):
        w = lift_special_form(vec, m, sh)
        assert insertion_predicate(w, 6, 6, 4)
        assert identifying_vector(w).bits == vec.bits
