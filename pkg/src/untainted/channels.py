"""Binary-input memoryless symmetric channels in the LLR domain.

LLR sign convention: positive favors bit 0. An LLR of exactly 0 carries no
information; it is used both for erasures and for punctured symbols.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

# Saturating LLR magnitude shared with the decoder. tanh(CLAMP/2) rounds to
# exactly 1.0 in double precision, so a clamped message passes through a
# check node unattenuated, and 200 iterations of sums stay far from overflow.
CLAMP = 1000.0

SNR_MODES = ("ebn0", "ebn0-mother", "esn0")


@dataclass(frozen=True)
class ChannelModel:
    """One of ``bec``, ``bsc``, ``awgn`` or ``degenerate``.

    ``param`` is the erasure probability, the crossover probability or the
    noise standard deviation; it is unused for the degenerate channel.
    ``label`` keeps the user-facing value (e.g. an SNR in dB) for reports.
    """

    kind: str
    param: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.kind in ("bec", "bsc"):
            if not 0.0 <= self.param <= 1.0:
                raise ValueError(f"{self.kind} parameter must be in [0,1], got {self.param}")
        elif self.kind == "awgn":
            if not self.param > 0:
                raise ValueError(f"awgn sigma must be > 0, got {self.param}")
        elif self.kind != "degenerate":
            raise ValueError(f"unknown channel {self.kind!r}")
        if not self.label:
            object.__setattr__(self, "label", "" if self.kind == "degenerate" else repr(self.param))

    @classmethod
    def bec(cls, alpha: float) -> "ChannelModel":
        return cls("bec", float(alpha))

    @classmethod
    def bsc(cls, eps: float) -> "ChannelModel":
        return cls("bsc", float(eps))

    @classmethod
    def awgn(cls, sigma: float, label: str = "") -> "ChannelModel":
        return cls("awgn", float(sigma), label)

    @classmethod
    def degenerate(cls) -> "ChannelModel":
        return cls("degenerate")

    @property
    def bsc_llr(self) -> float:
        eps = self.param
        if eps <= 0.0 or eps >= 1.0:
            return CLAMP if eps <= 0.0 else -CLAMP
        return float(np.clip(math.log((1.0 - eps) / eps), -CLAMP, CLAMP))

    def sample(self, bits, rng: np.random.Generator, clamp: float = CLAMP) -> np.ndarray:
        """LLRs observed for the transmitted ``bits`` (any array shape)."""
        bits = np.asarray(bits)
        sign = 1.0 - 2.0 * bits
        if self.kind == "degenerate":
            return np.zeros(bits.shape)
        if self.kind == "bec":
            erased = rng.random(bits.shape) < self.param
            return np.where(erased, 0.0, sign * clamp)
        if self.kind == "bsc":
            flip = rng.random(bits.shape) < self.param
            mag = min(abs(self.bsc_llr), clamp)
            return np.where(flip, -sign, sign) * mag
        s2 = self.param ** 2
        y = sign + self.param * rng.standard_normal(bits.shape)
        return np.clip(2.0 * y / s2, -clamp, clamp)

    def sample_zero(self, shape, rng: np.random.Generator, clamp: float = CLAMP) -> np.ndarray:
        """LLRs for the all-zero word, cheaper than :meth:`sample`."""
        if self.kind == "degenerate":
            return np.zeros(shape)
        if self.kind == "bec":
            return np.where(rng.random(shape) < self.param, 0.0, clamp)
        if self.kind == "bsc":
            mag = min(abs(self.bsc_llr), clamp)
            return np.where(rng.random(shape) < self.param, -mag, mag)
        s2 = self.param ** 2
        return np.clip((2.0 / s2) * (1.0 + self.param * rng.standard_normal(shape)), -clamp, clamp)

    def spec(self) -> str:
        if self.kind == "degenerate":
            return "degenerate"
        return f"{self.kind}:{self.label}"


def sample_llr(ch: ChannelModel, bit: int, rng: np.random.Generator) -> float:
    return float(ch.sample(np.asarray(bit), rng))


def snr_to_sigma(snr_db: float, rate: float, mode: str = "ebn0") -> float:
    """Noise std for unit-energy BPSK.

    ``ebn0`` uses Eb/N0 with the given rate, sigma^2 = 1/(2 R 10^(snr/10));
    ``esn0`` ignores the rate. The caller decides which rate to pass.
    """
    if mode not in SNR_MODES:
        raise ValueError(f"unknown SNR mode {mode!r}")
    if mode == "esn0":
        rate = 1.0
    if not rate > 0:
        raise ValueError("rate must be positive")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0)))


_SPEC = re.compile(r"^\s*(bec|bsc|awgn)\s*:\s*([-+0-9.eE]+)\s*(db)?\s*$", re.IGNORECASE)


def parse_channel(text: str, rate: float | None = None, mode: str = "ebn0") -> ChannelModel:
    """Parse ``bec:0.05``, ``bsc:0.07``, ``awgn:1.2dB`` or ``degenerate``.

    ``awgn`` with a ``dB`` suffix needs ``rate`` to turn the SNR into a
    noise level; without the suffix the number is sigma itself.
    """
    if text.strip().lower() == "degenerate":
        return ChannelModel.degenerate()
    mt = _SPEC.match(text)
    if not mt:
        raise ValueError(f"bad channel spec {text!r}")
    kind, num, db = mt.group(1).lower(), float(mt.group(2)), mt.group(3)
    if kind == "awgn":
        if db:
            if rate is None:
                raise ValueError("awgn SNR in dB needs a code rate")
            return ChannelModel.awgn(snr_to_sigma(num, rate, mode), label=f"{num:g}dB")
        return ChannelModel.awgn(num, label=f"{num:g}")
    if db:
        raise ValueError(f"dB suffix only valid for awgn: {text!r}")
    return ChannelModel(kind, num, label=mt.group(2))


def parse_sweep(text: str) -> list[str]:
    """Split a comma/space separated list of channel specs.

    ``kind:start:stop:step`` expands to an inclusive range, e.g.
    ``bec:0.30:0.40:0.05`` or ``awgn:1:2:0.5dB``.
    """
    out = []
    for tok in re.split(r"[,\s]+", text.strip()):
        if not tok:
            continue
        parts = tok.split(":")
        if len(parts) == 4:
            kind, a, b, step = parts
            suffix = ""
            if step.lower().endswith("db"):
                suffix, step = "dB", step[:-2]
            a, b, step = float(a), float(b), float(step)
            if step <= 0:
                raise ValueError(f"bad sweep step in {tok!r}")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            out += [f"{kind}:{round(a + i * step, 10):g}{suffix}" for i in range(count)]
        else:
            out.append(tok)
    if not out:
        raise ValueError("empty channel sweep")
    return out
