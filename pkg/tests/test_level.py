import random

import pytest

from oracles import order_sl
from wedgekit.engine import order
from wedgekit.exterior import compound, distance, index_sets, wedge_transvection
from wedgekit.level import (
    HalfDimensionError,
    LevelUndecided,
    Net,
    OvergroupInstance,
    admissible_nets,
    check_admissible,
    compute_level,
    congruence_member,
    generate_EwedgeE,
    level_sets,
    normalizer_evidence,
    parse_net,
    sandwich_check,
    wedge_E_generators,
)
from wedgekit.linalg import Matrix, Transvection, det_division_free, transvection_matrix
from wedgekit.ring import ideal_normalize, integers_mod, prime_field

F2, F3, Z4, Z8 = prime_field(2), prime_field(3), integers_mod(4), integers_mod(8)

computed_levels: list[tuple[Net, int, int]] = []


def level_of(inst, method="chain"):
    net = compute_level(inst, method)
    computed_levels.append((net, inst.n, inst.m))
    return net


def brute_level(inst):
    """A_d from every pair at distance d, by direct sifting of every ξ."""
    chain = inst.chain
    sets = index_sets(inst.n, inst.m)
    out = {}
    for a, I in enumerate(sets):
        for b, J in enumerate(sets):
            if a != b:
                xs = {xi for xi in range(inst.ring.modulus)
                      if chain.contains(wedge_transvection(inst.ring, inst.n, inst.m, I, J, xi))}
                out.setdefault(distance(I, J), []).append(xs)
    return out


def test_wedge_E_generators():
    for ring in (F2, Z4):
        gens = wedge_E_generators(4, 2, ring)
        assert len(gens) == 12
        assert all(g.rows == 6 and det_division_free(g) == 1 for g in gens)
    with pytest.raises(ValueError):
        wedge_E_generators(4, 4, F2)
    with pytest.raises(ValueError):
        wedge_E_generators(4, 1, F2)


def test_parse_net():
    net = parse_net("(2),(0)", Z4, 2)
    assert net.generators() == [2, 0] and str(net) == "(2),(0)"
    assert parse_net("3, 4", Z4).generators() == [1, 0]
    with pytest.raises(ValueError):
        parse_net("(2)", Z4, 2)


def test_level_examples():
    assert level_of(OvergroupInstance.wedge_E(4, 2, F2)).generators() == [0, 0]
    full = [transvection_matrix(Z4, Transvection(6, a, b, 1)) for a in range(6) for b in range(6) if a != b]
    gl = OvergroupInstance(4, 2, Z4, wedge_E_generators(4, 2, Z4) + full + [Matrix.diagonal(Z4, [3, 1, 1, 1, 1, 1])])
    assert level_of(gl).generators() == [1, 1]


def test_distance_one_adjunction():
    inst = OvergroupInstance.wedge_E(4, 2, Z4).adjoin(wedge_transvection(Z4, 4, 2, (1, 2), (1, 3), 2))
    net = level_of(inst)
    assert ideal_normalize(Z4, 2) <= net[1] and net[1] <= net[0]
    # oracle: every pair at every distance sifted directly
    for d, sets in brute_level(inst).items():
        assert all(xs == net[d].elements() for xs in sets)
    assert net.generators() == [2, 2]


def test_check_admissible_examples():
    ok, _ = check_admissible(parse_net("(2),(0)", Z4), 4, 2)
    assert ok
    ok, violations = check_admissible(parse_net("(0),(2)", Z4), 4, 2)
    assert not ok and any("A_0 >= A_1" in v for v in violations)
    for m in (2, 3, 4):
        assert check_admissible(Net((ideal_normalize(Z4, 1),) * m), 2 * m + 1, m)[0]
    # n >= 3m forces equal ideals
    ok, violations = check_admissible(parse_net("(1),(2)", Z4), 6, 2)
    assert not ok and any("A_0 <= A_1" in v for v in violations)


def test_admissible_nets_Z4():
    assert [n.generators() for n in admissible_nets(4, 2, Z4)] == [[0, 0], [1, 1], [1, 2], [2, 0], [2, 2]]


def test_generate_EwedgeE_examples():
    base = order(OvergroupInstance.wedge_E(4, 2, F2).chain)
    assert order(generate_EwedgeE(4, 2, F2, parse_net("0,0", F2)).chain) == base
    assert order(generate_EwedgeE(4, 2, F2, parse_net("1,1", F2)).chain) == order_sl(6, 2)
    with pytest.raises(ValueError, match="inadmissible"):
        generate_EwedgeE(4, 2, Z4, parse_net("0,2", Z4))


@pytest.mark.parametrize("spec", ["(0),(0)", "(1),(1)", "(1),(2)", "(2),(0)", "(2),(2)"])
def test_roundtrip_Z4(spec):
    net = parse_net(spec, Z4)
    inst = generate_EwedgeE(4, 2, Z4, net)
    assert level_of(inst) == net


@pytest.mark.slow
@pytest.mark.parametrize("net", admissible_nets(4, 2, Z8), ids=str)
def test_roundtrip_Z8(net):
    assert level_of(generate_EwedgeE(4, 2, Z8, net)) == net


def test_monotone_under_adjunction():
    rng = random.Random(4)
    sets = index_sets(4, 2)
    inst = OvergroupInstance.wedge_E(4, 2, Z4)
    previous = level_of(inst)
    for _ in range(3):
        I, J = rng.sample(sets, 2)
        inst = inst.adjoin(wedge_transvection(Z4, 4, 2, I, J, 2))
        net = level_of(inst)
        assert all(previous[d] <= net[d] for d in range(2))
        previous = net


def test_closure_matches_chain_on_fields():
    base = OvergroupInstance.wedge_E(6, 2, F2)
    cases = [base, base.adjoin(wedge_transvection(F2, 6, 2, (1, 2), (3, 4), 1))]
    assert level_of(cases[0], "closure") == level_of(cases[0], "chain")
    assert level_of(cases[1], "closure").generators() == [1, 1]


def test_closure_agrees_or_abstains_over_Z4():
    for net in admissible_nets(4, 2, Z4):
        inst = generate_EwedgeE(4, 2, Z4, net)
        try:
            assert compute_level(inst, "closure") == net
        except LevelUndecided:
            pass


def test_closure_needs_wedge_generators():
    inst = OvergroupInstance(4, 2, F2, [Matrix.identity(F2, 6)])
    with pytest.raises(ValueError):
        level_sets(inst, "closure")


def test_congruence_examples():
    rng = random.Random(0)
    A0 = ideal_normalize(Z4, 0)
    while True:
        h = Matrix(Z4, 5, 5, [rng.randrange(4) for _ in range(25)])
        if h.is_invertible():
            break
    assert congruence_member(compound(h, 2), A0, 5, 2)
    A = ideal_normalize(Z4, 2)
    assert congruence_member(wedge_transvection(Z4, 5, 2, (1, 2), (1, 3), 2), A, 5, 2)
    assert not congruence_member(wedge_transvection(Z4, 5, 2, (1, 2), (1, 3), 1), A, 5, 2)
    assert congruence_member(Matrix.identity(Z4, 10), ideal_normalize(Z4, 1), 5, 2)


def test_congruence_half_dimension():
    g = Matrix.identity(Z4, 6)
    with pytest.raises(HalfDimensionError):
        congruence_member(g, ideal_normalize(Z4, 2), 4, 2)
    assert congruence_member(g, ideal_normalize(Z4, 2), 4, 2, allow_half=True)


@pytest.mark.parametrize("n, m, ring, a", [(4, 2, F2, 0), (4, 2, Z4, 2), (5, 2, F2, 0)], ids=str)
def test_normalizer_evidence(n, m, ring, a):
    report = normalizer_evidence(n, m, ring, ideal_normalize(ring, a), samples=20, seed=1, allow_half=n == 2 * m)
    assert report.ok, report.counterexamples
    assert report.positives == 20 and report.negatives == 20


def test_normalizer_needs_override_in_half_dimension():
    with pytest.raises(HalfDimensionError):
        normalizer_evidence(4, 2, F2, ideal_normalize(F2, 0), samples=1)


def test_transvection_does_not_normalize():
    inst = OvergroupInstance.wedge_E(4, 2, F2)
    t = wedge_transvection(F2, 4, 2, (1, 2), (1, 3), 1)
    tinv = wedge_transvection(F2, 4, 2, (1, 2), (1, 3), 1)
    assert not all(inst.chain.contains(t @ s @ tinv) for s in inst.generators)
    assert not congruence_member(t, ideal_normalize(F2, 0), 4, 2, allow_half=True)


def test_sandwich_examples():
    inst = generate_EwedgeE(4, 2, Z4, parse_net("(2),(0)", Z4))
    r = sandwich_check(inst)
    assert r.lower and r.upper and r.admissible
    rng = random.Random(0)
    while True:
        g = Matrix(Z4, 6, 6, [rng.randrange(4) for _ in range(36)])
        if g.is_invertible():
            break
    t = wedge_transvection(Z4, 4, 2, (1, 2), (3, 4), 2)
    conj = OvergroupInstance.wedge_E(4, 2, Z4).adjoin(g @ t @ g.inverse())
    r = sandwich_check(conj)
    computed_levels.append((r.net, 4, 2))
    assert r.lower and r.upper
    assert r.to_json()["upper_kind"] == "heuristic upper bound"


def test_sandwich_flags_non_member():
    net = parse_net("(2),(2)", Z4)
    inst = generate_EwedgeE(4, 2, Z4, net)
    rng = random.Random(3)
    while True:
        h = Matrix(Z4, 6, 6, [rng.randrange(4) for _ in range(36)])
        if h.is_invertible() and not congruence_member(h, net[0], 4, 2, allow_half=True):
            break
    r = sandwich_check(inst.adjoin(h), net)
    assert not r.upper


def test_sandwich_n_ge_3m_is_not_heuristic():
    inst = OvergroupInstance.wedge_E(6, 2, F2)
    r = sandwich_check(inst, method="closure")
    assert r.lower and r.upper and r.to_json()["upper_kind"] == "congruence"


def test_every_computed_level_is_admissible():
    if not computed_levels:
        pytest.skip("no level computed in this session")
    for net, n, m in computed_levels:
        assert check_admissible(net, n, m)[0], (net, n, m)
