import io

import numpy as np
import pytest

from _oracles import channel_entry, channel_matrix
from popre.channel import (
    NoiseKind,
    NoiseModel,
    apply_noise,
    apply_noise_batch,
    bitflip,
    build_channel_matrix,
    erasure,
    push_forward,
    read_channel_csv,
)


def test_erasure_n1_rows():
    a = build_channel_matrix(erasure(0.5), 1).a
    np.testing.assert_allclose(a, [[1, 0], [0.5, 0.5]])


def test_bitflip_n1_rows():
    a = build_channel_matrix(bitflip(0.5), 1).a
    np.testing.assert_allclose(a, [[0.75, 0.25], [0.25, 0.75]])


@pytest.mark.parametrize("n", [1, 5, 17])
def test_noiseless_is_identity(n):
    np.testing.assert_array_equal(build_channel_matrix(bitflip(1.0), n).a, np.eye(n + 1))
    np.testing.assert_array_equal(build_channel_matrix(erasure(1.0), n).a, np.eye(n + 1))


@pytest.mark.parametrize("kind", ["bitflip", "erasure"])
@pytest.mark.parametrize("nu", [0.15, 0.5, 0.85])
def test_rows_match_counting_formula(kind, nu):
    n = 9
    got = build_channel_matrix(NoiseModel(kind, nu), n).a
    np.testing.assert_allclose(got, channel_matrix(kind, nu, n), rtol=1e-12, atol=1e-15)


def test_exact_mode_matches_counting_formula():
    model = bitflip(0.375)
    a = build_channel_matrix(model, 6, exact=True).a
    for i in range(7):
        for j in range(7):
            assert a[i, j] == channel_entry("bitflip", 0.375, 6, i, j)


@pytest.mark.parametrize("kind", ["bitflip", "erasure"])
def test_structure_up_to_64(kind):
    for nu in (0.1, 0.4, 0.9):
        for n in (8, 31, 64):
            a = build_channel_matrix(NoiseModel(kind, nu), n).a
            assert np.all(a >= 0)
            np.testing.assert_allclose(a.sum(axis=1), 1.0, atol=1e-10)
            if kind == "erasure":
                assert np.all(np.triu(a, 1) == 0)
            else:
                np.testing.assert_allclose(a, a[::-1, ::-1], atol=1e-10)


@pytest.mark.parametrize("nu", [0.0, -0.1, 1.5, float("nan")])
def test_invalid_nu_rejected(nu):
    with pytest.raises(ValueError):
        NoiseModel(NoiseKind.BITFLIP, nu)


@pytest.mark.parametrize("n", [0, 129])
def test_length_guard(n):
    with pytest.raises(ValueError):
        build_channel_matrix(bitflip(0.5), n)


def test_length_guard_env_override(monkeypatch):
    monkeypatch.setenv("POPRE_MAX_N", "130")
    assert build_channel_matrix(erasure(0.5), 130).a.shape == (131, 131)


def test_noiseless_apply_noise():
    rng = np.random.default_rng(0)
    assert apply_noise(erasure(1.0), "0110", rng) == "0110"
    assert apply_noise(bitflip(1.0), "0110", rng) == "0110"


def test_erasure_fraction(monkeypatch):
    monkeypatch.setenv("POPRE_MAX_N", "10000")
    out = apply_noise(erasure(0.5), "0" * 10000, np.random.default_rng(7))
    assert abs(out.count("?") / 10000 - 0.5) <= 0.02
    assert set(out) <= {"0", "?"}


def test_bitflip_never_erases(monkeypatch):
    monkeypatch.setenv("POPRE_MAX_N", "1000")
    out = apply_noise(bitflip(0.2), "01" * 500, np.random.default_rng(3))
    assert set(out) <= {"0", "1"}


def test_apply_noise_deterministic():
    a = apply_noise(bitflip(0.3), "0101100", np.random.default_rng(11))
    b = apply_noise(bitflip(0.3), "0101100", np.random.default_rng(11))
    assert a == b


@pytest.mark.parametrize("kind", ["bitflip", "erasure"])
def test_empirical_histogram_matches_row(kind):
    n, i = 12, 5
    model = NoiseModel(kind, 0.6)
    x = np.array([1] * i + [0] * (n - i), dtype=np.uint8)
    noisy = apply_noise_batch(model, np.tile(x, (100_000, 1)), np.random.default_rng(5))
    weights = (noisy == 1).sum(axis=1)
    hist = np.bincount(weights, minlength=n + 1) / weights.size
    row = build_channel_matrix(model, n).a[i]
    assert 0.5 * np.abs(hist - row).sum() <= 0.02


def test_push_forward_examples():
    ch = build_channel_matrix(erasure(0.5), 1)
    np.testing.assert_allclose(push_forward([1, 0], ch), [1, 0])
    np.testing.assert_allclose(push_forward([0, 1], ch), [0.5, 0.5])
    np.testing.assert_allclose(push_forward([0.5, 0.5], build_channel_matrix(bitflip(0.5), 1)),
                               [0.5, 0.5])


def test_push_forward_preserves_mass():
    rng = np.random.default_rng(2)
    for model in (bitflip(0.3), erasure(0.3)):
        ch = build_channel_matrix(model, 40)
        p = rng.dirichlet(np.ones(41))
        q = push_forward(p, ch)
        assert np.all(q >= 0)
        assert abs(q.sum() - 1.0) <= 1e-10


def test_push_forward_dimension_mismatch():
    with pytest.raises(ValueError):
        push_forward([0.5, 0.5, 0.0], build_channel_matrix(bitflip(0.5), 1))


def test_csv_round_trip():
    ch = build_channel_matrix(bitflip(0.3), 4)
    text = ch.to_csv()
    assert text.splitlines()[0] == "n,model,nu"
    back = read_channel_csv(io.StringIO(text))
    assert back.n == 4 and back.model == ch.model
    np.testing.assert_array_equal(back.a, ch.a)
