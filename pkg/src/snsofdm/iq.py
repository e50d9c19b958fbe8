"""Binary IQ capture files.

Layout (little-endian), 32-byte header followed by the payload::

    offset  size  field
    0       4     magic  b"SNIQ"
    4       2     version (uint16, currently 1)
    6       2     layout tag (uint16, 1 = interleaved I,Q float32)
    8       8     sample rate in Hz (float64)
    16      8     center frequency in Hz (float64)
    24      8     sample count (uint64)
    32      ...   I0 Q0 I1 Q1 ... as float32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"SNIQ"
VERSION = 1
LAYOUT_CF32 = 1
HEADER = struct.Struct("<4sHHddQ")


class IqFormatError(ValueError):
    code = "iq-format"


class BadMagicError(IqFormatError):
    code = "bad-magic"


class UnsupportedVersionError(IqFormatError):
    code = "unsupported-version"


class PayloadLengthError(IqFormatError):
    code = "payload-length-mismatch"


@dataclass(frozen=True, eq=False)
class IqCapture:
    samples: np.ndarray
    sample_rate: float
    center_freq: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.ascontiguousarray(self.samples, dtype=np.complex64))

    @property
    def sample_count(self) -> int:
        return int(self.samples.size)


def to_bytes(capture: IqCapture) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, LAYOUT_CF32, capture.sample_rate, capture.center_freq, capture.sample_count)
    return header + capture.samples.astype("<c8").tobytes()


def from_bytes(data: bytes) -> IqCapture:
    if len(data) < HEADER.size:
        raise PayloadLengthError(f"truncated header: {len(data)} of {HEADER.size} bytes")
    magic, version, layout, rate, center, count = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")
    if layout != LAYOUT_CF32:
        raise UnsupportedVersionError(f"unsupported layout tag {layout}")
    payload = memoryview(data)[HEADER.size:]
    expected = 2 * 4 * count
    if len(payload) != expected:
        raise PayloadLengthError(f"payload length mismatch: header says {expected} bytes, found {len(payload)}")
    samples = np.frombuffer(payload, dtype="<c8").astype(np.complex64)
    return IqCapture(samples, rate, center)


def write_iq(path, capture: IqCapture) -> None:
    Path(path).write_bytes(to_bytes(capture))


def read_iq(path) -> IqCapture:
    return from_bytes(Path(path).read_bytes())
