"""Polar code construction (erasure-channel reliability recursion) and encoding.

Bit order is natural (no bit-reversal permutation) throughout; the encoder and
decoder in this package agree on that convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np


def is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def bec_reliabilities(n: int, z0: float) -> np.ndarray:
    """Erasure-probability proxy for each synthesized bit channel.

    One halving step maps a channel with parameter z to a degraded channel
    2z - z^2 and an upgraded channel z^2; the degraded branch lands on the
    lower index.  Smaller values mean more reliable channels.
    """
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    if not 0.0 < z0 < 1.0:
        raise ValueError(f"z0 must lie in (0, 1), got {z0}")
    z = np.array([z0], dtype=np.float64)
    for _ in range(n.bit_length() - 1):
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def _select_info_set(reliabilities: np.ndarray, k: int) -> np.ndarray:
    """Indexes of the k smallest reliability values, ties toward lower index."""
    order = np.argsort(reliabilities, kind="stable")
    return np.sort(order[:k])


@dataclass(frozen=True, eq=False)
class PolarCode:
    """A polar code: block length, information set and channel reliabilities.

    ``frozen_values`` holds one bit per frozen position, aligned with
    ``frozen_set`` in ascending index order (all zeros by default).
    ``reliabilities`` may be None for codes loaded from a code file, which
    records only the frozen set.
    """

    n: int
    k: int
    info_set: tuple[int, ...]
    frozen_set: tuple[int, ...]
    reliabilities: np.ndarray | None
    frozen_values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise ValueError(f"n must be a power of two, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must lie in 1..{self.n}, got {self.k}")
        if len(self.info_set) != self.k:
            raise ValueError("info_set size does not match k")
        if sorted(self.info_set + self.frozen_set) != list(range(self.n)):
            raise ValueError("info_set and frozen_set must partition 0..n-1")
        if self.frozen_values is None:
            object.__setattr__(
                self, "frozen_values", np.zeros(self.n - self.k, dtype=np.uint8)
            )
        if len(self.frozen_values) != self.n - self.k:
            raise ValueError("frozen_values must hold one bit per frozen index")

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def info_indices(self) -> np.ndarray:
        return np.array(self.info_set, dtype=np.intp)

    @cached_property
    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        mask[self.info_indices] = False
        return mask

    @cached_property
    def u_template(self) -> np.ndarray:
        """Length-n uncoded vector with frozen values placed, zeros elsewhere."""
        u = np.zeros(self.n, dtype=np.uint8)
        u[np.array(self.frozen_set, dtype=np.intp)] = self.frozen_values
        return u


def construct(n: int, k: int, z0: float = 0.5) -> PolarCode:
    """Build a polar code by the erasure-channel reliability recursion.

    The information set is the k indexes with smallest reliability value,
    ties broken toward the smaller index.
    """
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}, got {k}")
    z = bec_reliabilities(n, z0)
    info = _select_info_set(z, k)
    frozen = np.setdiff1d(np.arange(n), info)
    return PolarCode(
        n=n,
        k=k,
        info_set=tuple(int(i) for i in info),
        frozen_set=tuple(int(i) for i in frozen),
        reliabilities=z,
    )


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """Apply the GF(2) kernel transform along the last axis (natural order).

    Self-inverse: applying it twice returns the input.
    """
    arr = np.array(bits, dtype=np.uint8, copy=True)
    n = arr.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"block length must be a power of two, got {n}")
    lead = arr.shape[:-1]
    for t in range(n.bit_length() - 1):
        view = arr.reshape(*lead, n >> (t + 1), 2, 1 << t)
        view[..., 0, :] ^= view[..., 1, :]
    return arr


def encode(code: PolarCode, info_bits) -> np.ndarray:
    """Encode k information bits into an n-bit codeword."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.shape != (code.k,):
        raise ValueError(f"expected {code.k} information bits, got {info_bits.shape}")
    u = code.u_template.copy()
    u[code.info_indices] = info_bits
    return polar_transform(u)


def encode_batch(code: PolarCode, info_bits: np.ndarray) -> np.ndarray:
    """Encode a (frames, k) block of information bits into (frames, n) codewords."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.ndim != 2 or info_bits.shape[1] != code.k:
        raise ValueError(f"expected shape (frames, {code.k}), got {info_bits.shape}")
    u = np.broadcast_to(code.u_template, (info_bits.shape[0], code.n)).copy()
    u[:, code.info_indices] = info_bits
    return polar_transform(u)


def write_code_file(code: PolarCode, path) -> None:
    """Write the code definition: line 1 "n k", then one frozen index per line."""
    lines = [f"{code.n} {code.k}"]
    lines += [str(i) for i in sorted(code.frozen_set)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_code_file(path) -> PolarCode:
    """Read a code definition written by :func:`write_code_file`.

    Reliabilities are not stored in the file, so the returned code carries
    ``reliabilities=None``.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty code file: {path}")
    n, k = (int(tok) for tok in lines[0].split())
    frozen = [int(ln) for ln in lines[1:]]
    if len(frozen) != n - k:
        raise ValueError(f"code file lists {len(frozen)} frozen indexes, expected {n - k}")
    if frozen != sorted(frozen):
        raise ValueError("frozen indexes must be ascending")
    info = tuple(sorted(set(range(n)) - set(frozen)))
    return PolarCode(n=n, k=k, info_set=info, frozen_set=tuple(frozen), reliabilities=None)
