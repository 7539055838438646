import json

import pytest

from popre.channel import bitflip, erasure
from popre.recover import (
    EnumerationOverflow,
    PrefixSet,
    RecoveryResult,
    enumerate_heavy_hitters,
    recover_distribution,
    size_limit,
)
from popre.samples import BatchSampler, PopulationSampler, SamplesExhausted


def run(strings, probs, model, eps, seed=0):
    sampler = PopulationSampler(strings, probs, model, seed=seed)
    return recover_distribution(sampler, model, len(strings[0]), eps)


def check_history(history, eps):
    for stage, prefixes in enumerate(history, start=1):
        assert prefixes.stage == stage
        assert len(prefixes) <= size_limit(eps)


def test_enumerate_noiseless():
    model = bitflip(1.0)
    s = PopulationSampler(["000", "111"], [0.5, 0.5], model, seed=0)
    final, history = enumerate_heavy_hitters(s, model, 3, 0.1)
    assert set(final) == {"000", "111"}
    check_history(history, 0.1)


@pytest.mark.parametrize("model", [bitflip(0.5), erasure(0.5), bitflip(0.8)])
def test_enumerate_point_mass(model):
    s = PopulationSampler(["000000"], [1.0], model, seed=4)
    final, history = enumerate_heavy_hitters(s, model, 6, 0.2)
    assert set(final) == {"000000"}
    check_history(history, 0.2)


def test_enumerate_three_strings_noiseless():
    model = bitflip(1.0)
    strings = ["1100", "0110", "0011"]
    s = PopulationSampler(strings, [0.5, 0.3, 0.2], model, seed=1)
    final, history = enumerate_heavy_hitters(s, model, 4, 0.25)
    assert set(final) == set(strings)
    # every prefix of a survivor was present at its stage
    for x in final:
        for i, stage in enumerate(history, start=1):
            assert x[:i] in stage
    res = recover_distribution(PopulationSampler(strings, [0.5, 0.3, 0.2], model, seed=1),
                               model, 4, 0.25)
    assert set(res.as_dict()) == {"1100", "0110"}


def test_recover_noiseless_uniform_pair():
    res = run(["000", "111"], [0.5, 0.5], bitflip(1.0), 0.1)
    got = res.as_dict()
    assert set(got) == {"000", "111"}
    assert all(abs(p - 0.5) <= 0.1 for p in got.values())


def test_recover_bitflip_point_mass():
    res = run(["10101"], [1.0], bitflip(0.7), 0.2, seed=2)
    assert list(res.as_dict()) == ["10101"]
    assert abs(res.entries[0][1] - 1.0) <= 0.4


def test_recover_uniform_eight_is_empty():
    res = run([format(i, "03b") for i in range(8)], [1 / 8] * 8, bitflip(1.0), 0.3)
    assert res.entries == ()


def test_result_invariants_and_refilter():
    res = run(["0000", "0111", "1011"], [0.45, 0.35, 0.2], bitflip(0.85), 0.15, seed=3)
    assert len(res.entries) <= size_limit(res.eps) // 2
    assert all(p >= res.eps and 0 <= p <= 1 for _, p in res.entries)
    previous = set(res.as_dict())
    for eps in (0.2, 0.3, 0.4, 0.45):
        kept = set(res.refilter(eps).as_dict())
        assert kept <= previous
        previous = kept


def test_json_round_trip():
    res = RecoveryResult((("0101", 0.31), ("1111", 0.5)), 0.1)
    data = json.loads(res.to_json())
    assert data == {"eps": 0.1, "entries": [{"x": "0101", "p": 0.31}, {"x": "1111", "p": 0.5}]}
    assert RecoveryResult.from_dict(data).entries == res.entries


def test_prefix_set_validation():
    with pytest.raises(ValueError):
        PrefixSet(("01", "01"), 2)
    with pytest.raises(ValueError):
        PrefixSet(("01", "1"), 2)


def test_overflow_raised_on_bad_estimator(monkeypatch):
    import numpy as np
    from popre import recover

    # a broken estimator that calls every prefix heavy
    monkeypatch.setattr(recover, "estimate_candidates",
                        lambda sampler, model, cands, *a, **k: (np.ones(len(cands)), 0))
    model = bitflip(1.0)
    s = PopulationSampler(["000000"], [1.0], model, seed=0)
    with pytest.raises(EnumerationOverflow) as info:
        enumerate_heavy_hitters(s, model, 6, 0.4)
    assert info.value.limit == size_limit(0.4) == 10
    assert info.value.stage == 4 and info.value.size == 16


def test_finite_batch_exhausts():
    model = bitflip(0.9)
    batch = PopulationSampler(["000"], [1.0], model, seed=0)(100)
    with pytest.raises(SamplesExhausted):
        recover_distribution(BatchSampler(batch), model, 3, 0.2)


@pytest.mark.parametrize("eps", [0.0, 0.5, -1.0])
def test_eps_range(eps):
    model = bitflip(1.0)
    with pytest.raises(ValueError):
        recover_distribution(PopulationSampler(["0"], [1.0], model), model, 1, eps)


def test_chunking_does_not_change_results():
    model = erasure(0.7)
    strings = ["00110", "11100"]
    a = recover_distribution(PopulationSampler(strings, [0.6, 0.4], model, seed=8), model, 5, 0.2)
    b = recover_distribution(PopulationSampler(strings, [0.6, 0.4], model, seed=8), model, 5, 0.2,
                             chunk=997)
    assert a.candidates == b.candidates
