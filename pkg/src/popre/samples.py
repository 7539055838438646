"""Noisy sample batches, sample files, and population samplers.

Samples are stored bit-packed: position ``k`` of a string lives in bit
``k % 64`` of word ``k // 64``.  ``vis`` marks the positions that survived
erasure (all ones under bit-flip noise).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import ERASED, NoiseKind, NoiseModel, alias_table, noise_mask_table, parse_bits


class SampleFileError(ValueError):
    """Malformed sample or distribution file; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


def n_words(n):
    return (n + 63) // 64


def pack_rows(symbols, n):
    """``(m, n)`` uint8 symbols -> packed ``(bits, vis)`` word arrays."""
    symbols = np.asarray(symbols, dtype=np.uint8)
    m = symbols.shape[0]
    W = n_words(n)
    bits = np.zeros((m, W), dtype=np.uint64)
    vis = np.zeros((m, W), dtype=np.uint64)
    one = (symbols == 1).astype(np.uint64)
    seen = (symbols != ERASED).astype(np.uint64)
    for k in range(n):
        wd, sh = divmod(k, 64)
        bits[:, wd] |= one[:, k] << np.uint64(sh)
        vis[:, wd] |= seen[:, k] << np.uint64(sh)
    return bits, vis


def unpack_rows(bits, vis, n):
    m = bits.shape[0]
    out = np.empty((m, n), dtype=np.uint8)
    for k in range(n):
        wd, sh = divmod(k, 64)
        b = ((bits[:, wd] >> np.uint64(sh)) & np.uint64(1)).astype(np.uint8)
        v = ((vis[:, wd] >> np.uint64(sh)) & np.uint64(1)).astype(bool)
        out[:, k] = np.where(v, b, ERASED)
    return out


def pack_string(x):
    bits = parse_bits(x)
    packed, _ = pack_rows(bits[None, :], bits.size)
    return packed[0]


def unpack_string(word_row, n):
    vis = np.full_like(word_row, np.uint64(0xFFFFFFFFFFFFFFFF))
    return "".join(str(v) for v in unpack_rows(word_row[None, :], vis[None, :], n)[0])


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """i.i.d. noisy samples of length ``n`` drawn through ``model``."""

    bits: np.ndarray
    vis: np.ndarray
    model: NoiseModel
    n: int

    def __post_init__(self):
        W = n_words(self.n)
        if self.bits.shape != self.vis.shape or self.bits.ndim != 2 or self.bits.shape[1] != W:
            raise ValueError("packed sample arrays have inconsistent shapes")
        if self.model.kind is NoiseKind.BITFLIP:
            full = _kernels.prefix_masks(self.n, W)
            if np.any(self.vis != full):
                raise ValueError("erased positions are only allowed under erasure noise")

    def __len__(self):
        return self.bits.shape[0]

    @classmethod
    def from_symbols(cls, symbols, model):
        symbols = np.asarray(symbols, dtype=np.uint8)
        if symbols.ndim != 2:
            raise ValueError("expected an (m, n) symbol array")
        bits, vis = pack_rows(symbols, symbols.shape[1])
        return cls(bits, vis, model, symbols.shape[1])

    @classmethod
    def from_strings(cls, lines, model):
        lines = list(lines)
        if not lines:
            raise ValueError("no samples")
        n = len(lines[0])
        table = np.full(256, 255, dtype=np.uint8)
        table[ord("0")], table[ord("1")], table[ord("?")] = 0, 1, ERASED
        symbols = np.empty((len(lines), n), dtype=np.uint8)
        for i, ln in enumerate(lines):
            if len(ln) != n:
                raise ValueError(f"sample {i} has length {len(ln)}, expected {n}")
            symbols[i] = table[np.frombuffer(ln.encode("ascii"), dtype=np.uint8)]
        if np.any(symbols == 255):
            raise ValueError("samples must be over '0', '1', '?'")
        return cls.from_symbols(symbols, model)

    def symbols(self):
        return unpack_rows(self.bits, self.vis, self.n)

    def to_strings(self):
        lut = np.frombuffer(b"01?", dtype=np.uint8)
        sym = lut[self.symbols()]
        return [row.tobytes().decode("ascii") for row in sym]

    def head(self, length):
        """The same samples restricted to their first ``length`` positions."""
        W = n_words(length)
        pref = _kernels.prefix_masks(length, W)
        return SampleBatch(
            np.ascontiguousarray(self.bits[:, :W] & pref),
            np.ascontiguousarray(self.vis[:, :W] & pref),
            self.model,
            length,
        )

    def split(self, parts):
        """``parts`` disjoint sub-batches of equal size (remainder dropped)."""
        size = len(self) // parts
        return [
            SampleBatch(self.bits[k * size:(k + 1) * size], self.vis[k * size:(k + 1) * size],
                        self.model, self.n)
            for k in range(parts)
        ]


def write_sample_file(batch, fh):
    fh.write(f"# model={batch.model.kind.value} nu={batch.model.nu!r} n={batch.n}\n")
    for line in batch.to_strings():
        fh.write(line + "\n")


def read_sample_file(fh):
    """Parse a sample file; raises :class:`SampleFileError` with a line number."""
    header = fh.readline()
    if not header.startswith("#"):
        raise SampleFileError("expected header '# model=<bitflip|erasure> nu=<float> n=<int>'", 1)
    fields = {}
    for tok in header[1:].split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise SampleFileError(f"malformed header token {tok!r}", 1)
        fields[key] = value
    try:
        model = NoiseModel(NoiseKind(fields["model"]), float(fields["nu"]))
        n = int(fields["n"])
    except (KeyError, ValueError) as exc:
        raise SampleFileError(f"bad header: {exc}", 1) from None
    allowed = "01?" if model.kind is NoiseKind.ERASURE else "01"
    lines = []
    for lineno, raw in enumerate(fh, start=2):
        ln = raw.strip()
        if not ln:
            continue
        if len(ln) != n:
            raise SampleFileError(f"sample has length {len(ln)}, expected n={n}", lineno)
        bad = set(ln) - set(allowed)
        if bad:
            raise SampleFileError(f"unexpected symbol(s) {''.join(sorted(bad))!r} for {model.kind.value}", lineno)
        lines.append(ln)
    if not lines:
        raise SampleFileError("file contains no samples")
    return SampleBatch.from_strings(lines, model)


def read_distribution(fh):
    """``{"n": ..., "entries": [{"x": "0101", "p": 0.3}, ...]}`` -> (n, strings, probs)."""
    try:
        doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SampleFileError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    try:
        entries = doc["entries"]
        xs = [str(e["x"]) for e in entries]
        ps = np.array([float(e["p"]) for e in entries])
    except (KeyError, TypeError, ValueError) as exc:
        raise SampleFileError(f"malformed distribution: {exc}") from None
    if not xs:
        raise SampleFileError("distribution has no entries")
    n = int(doc.get("n", len(xs[0])))
    if any(len(x) != n for x in xs):
        raise SampleFileError(f"all strings must have length n={n}")
    if np.any(ps < 0) or ps.sum() <= 0:
        raise SampleFileError("probabilities must be nonnegative with positive total")
    return n, xs, ps / ps.sum()


class PopulationSampler:
    """Sample source for a finite-support distribution pushed through a noise model.

    Calls ``sampler(m)`` return a fresh :class:`SampleBatch`; the stream is a
    deterministic function of ``seed`` and the running sample count.
    """

    def __init__(self, strings, probs, model, seed=0):
        probs = np.asarray(probs, dtype=float)
        if len(strings) != probs.size:
            raise ValueError("strings and probabilities differ in length")
        self.n = len(strings[0])
        self.model = model
        self.support = np.ascontiguousarray(np.stack([pack_string(x) for x in strings]))
        self.pick_prob, self.pick_alias = alias_table(probs)
        self.mask_prob, self.mask_alias = noise_mask_table(model)
        seq = np.random.SeedSequence(seed)
        self.key = int(seq.generate_state(1, dtype=np.uint64)[0])
        self.drawn = 0

    def __call__(self, m):
        bits, vis = _kernels.sample_population(
            self.support, self.pick_prob, self.pick_alias, self.mask_prob,
            self.mask_alias, self.n, self.model.kind is NoiseKind.ERASURE,
            np.uint64(self.key), np.uint64(self.drawn), int(m),
        )
        self.drawn += int(m)
        return SampleBatch(bits, vis, self.model, self.n)


class SamplesExhausted(RuntimeError):
    pass


class BatchSampler:
    """Sample source that hands out consecutive slices of a fixed batch."""

    def __init__(self, batch):
        self.batch = batch
        self.model = batch.model
        self.n = batch.n
        self.drawn = 0

    def __call__(self, m):
        if self.drawn + m > len(self.batch):
            raise SamplesExhausted(
                f"sample source exhausted: requested {m} more samples, "
                f"{len(self.batch) - self.drawn} remain"
            )
        sl = slice(self.drawn, self.drawn + m)
        self.drawn += m
        return SampleBatch(self.batch.bits[sl], self.batch.vis[sl], self.model, self.n)
