import math

import pytest

from skalab.entropy import JointDistribution, exact_profile
from skalab.gf2 import BitVec, FieldConfigError, mul_int
from skalab.profiles import cond, is_polymatroid
from skalab.rng import SeedStream
from skalab.sources import (
    CorrelatedInstance,
    CorrelationModel,
    analytic_profile,
    enumerate_candidates,
    enumerate_instances,
    hamming_ball,
    is_consistent,
    line_through,
    parse_model_spec,
    sample,
)


# ---------------------------------------------------------
# model specs and validation
# ---------------------------------------------------------

def test_parse_model_specs():
    m = parse_model_spec("line-point:n=16")
    assert m.kind == "line_point" and m.n == 16 and m.parties == 2
    m = parse_model_spec("hamming:n=31,t=2")
    assert m.kind == "hamming_pair" and (m.n, m.t) == (31, 2)
    assert parse_model_spec("triple:n=16").parties == 3
    assert parse_model_spec("identical:n=16").input_len == 16
    assert parse_model_spec("hamming:n=8").t == 0  # t defaults to zero errors
    for spec in ("nope:n=4", "hamming:t=1", "line-point:n=16,z=1", "line-point"):
        with pytest.raises(ValueError):
            parse_model_spec(spec)


def test_spec_string_roundtrip():
    for text in ("line-point:n=16", "hamming:n=31,t=2", "triple:n=4", "identical:n=9"):
        assert parse_model_spec(text).spec_string() == text


def test_model_validation():
    with pytest.raises(ValueError):
        CorrelationModel("hamming_pair", 8, 4)  # t >= n/2
    with pytest.raises(ValueError):
        CorrelationModel("line_point", 1)
    with pytest.raises(FieldConfigError):
        CorrelationModel("line_point", 70)
    CorrelationModel("hamming_pair", 70, 3)  # no field needed


# ---------------------------------------------------------
# sampling satisfies the model constraint
# ---------------------------------------------------------

def test_sample_line_point_incidence():
    model = parse_model_spec("line-point:n=8")
    for i in range(50):
        inst = sample(model, SeedStream("lp", i))
        (x, y) = inst.inputs
        a, b = x.v & 0xFF, x.v >> 8
        c, d = y.v & 0xFF, y.v >> 8
        assert d == mul_int(a, c, 8) ^ b
        assert is_consistent(model, inst.inputs)


def test_sample_identical():
    inst = sample(parse_model_spec("identical:n=16"), SeedStream("id"))
    assert inst.inputs[0] == inst.inputs[1]


def test_sample_hamming_distance_exact():
    model = parse_model_spec("hamming:n=8,t=1")
    for i in range(50):
        inst = sample(model, SeedStream("ham", i))
        assert (inst.inputs[0].v ^ inst.inputs[1].v).bit_count() == 1
    model3 = parse_model_spec("hamming:n=16,t=3")
    seen = set()
    for i in range(100):
        inst = sample(model3, SeedStream("ham3", i))
        e = inst.inputs[0].v ^ inst.inputs[1].v
        assert e.bit_count() == 3
        seen.add(e)
    assert len(seen) > 50  # errors spread over many position sets


def test_sample_triple_collinear_distinct():
    model = parse_model_spec("triple:n=8")
    for i in range(30):
        inst = sample(model, SeedStream("tri", i))
        assert is_consistent(model, inst.inputs)
        assert len({p.v for p in inst.inputs}) == 3
        a, b = line_through(inst.inputs[0], inst.inputs[1], 8)
        c3, d3 = inst.inputs[2].v & 0xFF, inst.inputs[2].v >> 8
        assert d3 == mul_int(a, c3, 8) ^ b


def test_instance_rejects_inconsistent_inputs():
    model = parse_model_spec("identical:n=4")
    with pytest.raises(ValueError):
        CorrelatedInstance(model, (BitVec(4, 1), BitVec(4, 2)), analytic_profile(model))


# ---------------------------------------------------------
# analytic profiles (paper values)
# ---------------------------------------------------------

def test_analytic_profile_line_point_16():
    p = analytic_profile(parse_model_spec("line-point:n=16"))
    assert (p.c({1}), p.c({2}), p.c({1, 2})) == (32, 32, 48)


def test_analytic_profile_triple_16():
    p = analytic_profile(parse_model_spec("triple:n=16"))
    assert p.c({1}) == 32
    assert p.c({1, 2}) == p.c({1, 3}) == p.c({2, 3}) == 64
    assert p.c({1, 2, 3}) == 80


def test_analytic_profile_hamming():
    p = analytic_profile(parse_model_spec("hamming:n=8,t=1"))
    assert p.c({1, 2}) == 8 + 3  # ceil(log2 C(8,1)) = 3
    p = analytic_profile(parse_model_spec("identical:n=16"))
    assert p.c({1, 2}) == 16


def test_analytic_profiles_are_polymatroids():
    for spec in ("line-point:n=4", "hamming:n=16,t=3", "triple:n=4", "identical:n=8"):
        assert is_polymatroid(analytic_profile(parse_model_spec(spec)))


# ---------------------------------------------------------
# candidate enumeration
# ---------------------------------------------------------

def test_candidates_hamming_ball_size():
    model = parse_model_spec("hamming:n=8,t=1")
    inst = sample(model, SeedStream("cball"))
    cands = enumerate_candidates(model, 2, inst.inputs[1])
    assert len(cands) == 9  # ball of radius 1: 1 + n


def test_candidates_identical_singleton():
    model = parse_model_spec("identical:n=8")
    inst = sample(model, SeedStream("cid"))
    cands = enumerate_candidates(model, 2, inst.inputs[1])
    assert len(cands) == 1 and list(cands)[0] == inst.inputs[0]


def test_candidates_line_point_all_incident():
    model = parse_model_spec("line-point:n=4")
    inst = sample(model, SeedStream("clp"))
    x, y = inst.inputs
    c, d = y.v & 0xF, y.v >> 4
    cands = list(enumerate_candidates(model, 2, y))
    assert len(cands) == 16
    slopes = []
    for cand in cands:
        a, b = cand.v & 0xF, cand.v >> 4
        assert d == mul_int(a, c, 4) ^ b  # every candidate passes through y
        slopes.append(a)
    assert slopes == list(range(16))  # lexicographic slope order


def test_candidates_alice_side_points_on_line():
    model = parse_model_spec("line-point:n=4")
    inst = sample(model, SeedStream("clpa"))
    x, _y = inst.inputs
    a, b = x.v & 0xF, x.v >> 4
    cands = list(enumerate_candidates(model, 1, x))
    assert len(cands) == 16
    for cand in cands:
        c, d = cand.v & 0xF, cand.v >> 4
        assert d == mul_int(a, c, 4) ^ b


def test_true_input_always_in_candidates():
    for spec, observer in (
        ("line-point:n=6", 2),
        ("hamming:n=10,t=2", 2),
        ("identical:n=7", 2),
        ("line-point:n=6", 1),
    ):
        model = parse_model_spec(spec)
        for i in range(20):
            inst = sample(model, SeedStream("sound", spec, observer, i))
            hidden = inst.inputs[2 - observer]  # the other party's input
            cands = enumerate_candidates(model, observer, inst.inputs[observer - 1])
            assert hidden in cands


def test_candidate_count_matches_conditional_complexity():
    # log2 |candidates| ~ C(x|y) within one bit
    for spec in ("line-point:n=5", "identical:n=9", "hamming:n=8,t=1", "hamming:n=12,t=2"):
        model = parse_model_spec(spec)
        inst = sample(model, SeedStream("count", spec))
        cands = enumerate_candidates(model, 2, inst.inputs[1])
        k = cond(analytic_profile(model), {1}, {2})
        if model.kind == "identical_pair":
            assert len(cands) == 1 and k == 0
        else:
            assert abs(cands.log2_size() - float(k)) <= 1.0


def test_triple_needs_joint_decoder():
    model = parse_model_spec("triple:n=4")
    inst = sample(model, SeedStream("tj"))
    with pytest.raises(ValueError):
        enumerate_candidates(model, 1, inst.inputs[0])


def test_hamming_ball_order():
    ball = hamming_ball(4, 2)
    assert ball[0] == 0
    assert ball[1:5] == [1, 2, 4, 8]  # weight 1 in lex order
    assert len(ball) == 1 + 4 + 6


# ---------------------------------------------------------
# exhaustive enumeration vs analytic profile
# ---------------------------------------------------------

def test_enumerate_instances_counts():
    assert sum(1 for _ in enumerate_instances(parse_model_spec("line-point:n=2"))) == 64
    assert sum(1 for _ in enumerate_instances(parse_model_spec("line-point:n=3"))) == 512
    assert sum(1 for _ in enumerate_instances(parse_model_spec("identical:n=4"))) == 16
    assert (
        sum(1 for _ in enumerate_instances(parse_model_spec("hamming:n=5,t=1"))) == 160
    )
    # triple at n=2: 16 lines x 4*3*2 ordered distinct abscissas
    assert sum(1 for _ in enumerate_instances(parse_model_spec("triple:n=2"))) == 16 * 24


def test_exact_profile_matches_analytic_small_n():
    for spec in ("line-point:n=2", "line-point:n=3", "identical:n=3"):
        model = parse_model_spec(spec)
        dist = JointDistribution.uniform(model.parties, enumerate_instances(model))
        got = exact_profile(dist)
        want = analytic_profile(model)
        for s in got.values:
            assert got.c(s) == want.c(s)  # uniform models: exact equality


def test_exact_profile_matches_analytic_hamming():
    model = parse_model_spec("hamming:n=5,t=1")
    dist = JointDistribution.uniform(2, enumerate_instances(model))
    got = exact_profile(dist)
    # C(x) and C(y) exact; the joint is n + log2(5) vs the analytic ceiling
    assert got.c({1}) == 5 and got.c({2}) == 5
    assert abs(float(got.c({1, 2})) - (5 + math.log2(5))) < 1e-9
    want = analytic_profile(model)
    assert float(want.c({1, 2})) - float(got.c({1, 2})) <= 1.0


def test_collinear_triple_exact_profile_n2():
    model = parse_model_spec("triple:n=2")
    dist = JointDistribution.uniform(3, enumerate_instances(model))
    got = exact_profile(dist)
    want = analytic_profile(model)
    # Distinctness of the points costs log2 terms against the analytic 4n /
    # 5n idealization: a pair is the line plus an ordered distinct pair of
    # abscissas, the full tuple the line plus an ordered distinct triple.
    assert abs(float(got.c({1, 2})) - (4 + math.log2(4 * 3))) < 1e-9
    assert abs(float(got.c({1, 2, 3})) - (4 + math.log2(4 * 3 * 2))) < 1e-9
    # the gap against the idealized profile is exactly the distinctness cost
    assert abs(
        (float(want.c({1, 2, 3})) - float(got.c({1, 2, 3}))) - (6 - math.log2(24))
    ) < 1e-9
    for s in got.values:
        assert float(got.c(s)) <= float(want.c(s))
