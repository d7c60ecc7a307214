import math

from tierbayes.rng import (
    Stream,
    cell_stream,
    fnv1a64,
    mix64,
    splitmix64_next,
)


def test_splitmix64_reference_vectors():
    # Published outputs of Vigna's splitmix64.c for seed 0.
    expected = [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
        0xF88BB8A8724C81EC,
    ]
    state = 0
    outs = []
    for _ in range(4):
        state, value = splitmix64_next(state)
        outs.append(value)
    assert outs == expected


def test_fnv1a64_reference_vectors():
    assert fnv1a64("") == 0xCBF29CE484222325
    assert fnv1a64("a") == 0xAF63DC4C8601EC8C


def test_mix64_sensitivity_and_determinism():
    base = mix64(1, 2, 3)
    assert base == mix64(1, 2, 3)
    assert base != mix64(1, 2, 4)
    assert base != mix64(3, 2, 1)  # order matters
    assert 0 <= base < 2**64


def test_uniform_range_and_determinism():
    s1 = Stream(12345)
    s2 = Stream(12345)
    draws = [s1.uniform() for _ in range(1000)]
    assert draws == [s2.uniform() for _ in range(1000)]
    assert all(0.0 <= u < 1.0 for u in draws)


def test_normal_moments():
    stream = Stream(987654321)
    draws = [stream.normal() for _ in range(20000)]
    mean = sum(draws) / len(draws)
    var = sum((d - mean) ** 2 for d in draws) / (len(draws) - 1)
    assert abs(mean) < 0.03
    assert abs(var - 1.0) < 0.05
    assert all(math.isfinite(d) for d in draws)


def test_cell_streams_are_independent():
    # Same (purpose, name, index) => same stream; any coordinate change
    # produces a different draw sequence.
    a = cell_stream(7, 1, "coffee", 3).uniform()
    assert a == cell_stream(7, 1, "coffee", 3).uniform()
    assert a != cell_stream(7, 1, "coffee", 4).uniform()
    assert a != cell_stream(7, 1, "tea", 3).uniform()
    assert a != cell_stream(7, 2, "coffee", 3).uniform()
    assert a != cell_stream(8, 1, "coffee", 3).uniform()
