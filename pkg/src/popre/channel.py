"""Noise channels on binary strings and their weight-transition matrices.

After symmetrization a distribution over {0,1}^n is a probability vector
``p`` over Hamming weights 0..n, and the noisy weight distribution is the
row-vector product ``q = p @ A``.  Row ``i`` of ``A`` is the coefficient
vector of the channel's generating polynomial for a weight-``i`` input.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._config import max_n

ERASED = 2
_SYMBOLS = "01?"


class NoiseKind(str, enum.Enum):
    BITFLIP = "bitflip"
    ERASURE = "erasure"


@dataclass(frozen=True)
class NoiseModel:
    """Product noise with correlation (bit-flip) or retention (erasure) ``nu``.

    ``nu = 1`` is accepted as an explicit noiseless channel.
    """

    kind: NoiseKind
    nu: float

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        nu = float(self.nu)
        if not (0.0 < nu <= 1.0):
            raise ValueError(f"nu must lie in (0, 1], got {self.nu!r}")
        object.__setattr__(self, "nu", nu)

    @property
    def noiseless(self):
        return self.nu == 1.0

    @property
    def flip_probability(self):
        return (1.0 - self.nu) / 2.0 if self.kind is NoiseKind.BITFLIP else 0.0

    @property
    def erase_probability(self):
        return 1.0 - self.nu if self.kind is NoiseKind.ERASURE else 0.0

    def __str__(self):
        return f"{self.kind.value}(nu={self.nu!r})"


def bitflip(nu):
    return NoiseModel(NoiseKind.BITFLIP, nu)


def erasure(nu):
    return NoiseModel(NoiseKind.ERASURE, nu)


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Row-stochastic ``(n+1) x (n+1)`` weight-transition matrix."""

    a: np.ndarray
    model: NoiseModel
    n: int

    @property
    def exact(self):
        return self.a.dtype == object

    def to_csv(self):
        buf = io.StringIO()
        write_channel_csv(self, buf)
        return buf.getvalue()


def check_length(n):
    limit = max_n()
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"n must be an integer, got {n!r}")
    if not (1 <= n <= limit):
        raise ValueError(f"n must satisfy 1 <= n <= {limit}, got {n}")
    return int(n)


def _row_factors(model, one):
    nu = model.nu
    if model.kind is NoiseKind.ERASURE:
        return [one - nu, nu], None
    half = one / 2
    up = [half * (one - nu), half * (one + nu)]
    stay = [half * (one + nu), half * (one - nu)]
    return up, stay


def _conv(u, v):
    out = [u[0] * 0] * (len(u) + len(v) - 1)
    for i, x in enumerate(u):
        for j, y in enumerate(v):
            out[i + j] += x * y
    return out


def _powers(factor, count, one):
    out = [[one]]
    for _ in range(count):
        out.append(_conv(out[-1], factor))
    return out


def build_channel_matrix(model, n, exact=False):
    """Transition matrix whose rows are the channel generating polynomials.

    Bit-flip row ``i`` expands
    ``((1-nu)/2 + (1+nu)/2 z)^i ((1+nu)/2 + (1-nu)/2 z)^(n-i)``; erasure row
    ``i`` expands ``((1-nu) + nu z)^i`` (count of visible ones).  All factors
    have nonnegative coefficients, so iterated convolution is accurate.
    ``exact=True`` (n <= 40) returns a matrix of :class:`fractions.Fraction`
    built from the exact binary value of ``nu``.
    """
    if not isinstance(model, NoiseModel):
        raise TypeError(f"expected a NoiseModel, got {type(model).__name__}")
    n = check_length(n)
    if exact:
        if n > 40:
            raise ValueError("exact mode is limited to n <= 40")
        one = Fraction(1)
        nu = Fraction(model.nu)
        a = np.empty((n + 1, n + 1), dtype=object)
        a[:] = Fraction(0)
        rows = _exact_rows(model.kind, nu, n, one)
        for i, row in enumerate(rows):
            a[i, : len(row)] = row
        return ChannelMatrix(a, model, n)

    up, stay = _row_factors(model, 1.0)
    a = np.zeros((n + 1, n + 1))
    up_pows = [np.ones(1)]
    for _ in range(n):
        up_pows.append(np.convolve(up_pows[-1], up))
    if stay is None:
        for i in range(n + 1):
            a[i, : i + 1] = up_pows[i]
    else:
        stay_pows = [np.ones(1)]
        for _ in range(n):
            stay_pows.append(np.convolve(stay_pows[-1], stay))
        for i in range(n + 1):
            a[i] = np.convolve(up_pows[i], stay_pows[n - i])
    a.setflags(write=False)
    return ChannelMatrix(a, model, n)


def _exact_rows(kind, nu, n, one):
    if kind is NoiseKind.ERASURE:
        return _powers([one - nu, nu], n, one)
    half = one / 2
    up = _powers([half * (one - nu), half * (one + nu)], n, one)
    stay = _powers([half * (one + nu), half * (one - nu)], n, one)
    return [_conv(up[i], stay[n - i]) for i in range(n + 1)]


def parse_bits(x):
    """``'0110'`` or a 0/1 sequence -> uint8 array."""
    if isinstance(x, str):
        if any(ch not in "01" for ch in x):
            raise ValueError(f"not a bit string: {x!r}")
        arr = np.frombuffer(x.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(x, dtype=np.uint8)
        if arr.ndim != 1 or np.any(arr > 1):
            raise ValueError("bit strings must be 1-d sequences over {0,1}")
    if not (1 <= arr.size <= max_n()):
        raise ValueError(f"bit string length {arr.size} outside 1..{max_n()}")
    return arr.astype(np.uint8)


def format_symbols(arr):
    """uint8 symbols (0, 1, ERASED) -> string over ``01?``."""
    return "".join(_SYMBOLS[int(v)] for v in np.asarray(arr).ravel())


def apply_noise_batch(model, xs, rng):
    """Noise every row of an ``(m, n)`` 0/1 array; erased entries become ERASED."""
    xs = np.asarray(xs, dtype=np.uint8)
    if model.kind is NoiseKind.BITFLIP:
        flips = rng.random(xs.shape) < model.flip_probability
        return xs ^ flips.astype(np.uint8)
    gone = rng.random(xs.shape) < model.erase_probability
    return np.where(gone, np.uint8(ERASED), xs).astype(np.uint8)


def apply_noise(model, x, rng):
    """One noisy copy of ``x`` as a string over ``01?``."""
    bits = parse_bits(x)
    return format_symbols(apply_noise_batch(model, bits[None, :], rng)[0])


def push_forward(p, channel):
    """Row-vector product ``p @ A``."""
    a = channel.a
    if a.dtype == object:
        p = np.asarray(p, dtype=object)
    else:
        p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.shape[0] != a.shape[0]:
        raise ValueError(f"weight vector of length {p.shape} does not match n+1 = {a.shape[0]}")
    if a.dtype != object:
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("p must be a probability vector")
    return p @ a


def _fmt(x):
    return format(float(x), ".17g")


def write_channel_csv(channel, fh):
    fh.write("n,model,nu\n")
    fh.write(f"{channel.n},{channel.model.kind.value},{_fmt(channel.model.nu)}\n")
    for row in channel.a:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_channel_csv(fh):
    lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "n,model,nu":
        raise ValueError("missing 'n,model,nu' header")
    n_s, kind, nu_s = lines[1].split(",")
    model = NoiseModel(NoiseKind(kind), float(nu_s))
    n = int(n_s)
    a = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    if a.shape != (n + 1, n + 1):
        raise ValueError(f"expected {(n + 1, n + 1)} matrix, got {a.shape}")
    return ChannelMatrix(a, model, n)


def alias_table(weights):
    """Vose alias table ``(prob, alias)`` for sampling index ``k`` with
    probability proportional to ``weights[k]``."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("alias weights must be a nonnegative, nonzero vector")
    k = w.size
    scaled = w * (k / w.sum())
    prob = np.ones(k)
    alias = np.arange(k, dtype=np.int64)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        (small if scaled[g] < 1.0 else large).append(g)
    return prob, alias


def noise_mask_table(model):
    """Alias table over 8-position noise masks (bit set = flipped or erased)."""
    p = model.flip_probability if model.kind is NoiseKind.BITFLIP else model.erase_probability
    pop = np.array([bin(v).count("1") for v in range(256)])
    weights = p ** pop * (1.0 - p) ** (8 - pop)
    return alias_table(weights)
