import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from snsofdm.iq import (
    HEADER,
    BadMagicError,
    IqCapture,
    PayloadLengthError,
    UnsupportedVersionError,
    from_bytes,
    read_iq,
    to_bytes,
    write_iq,
)


@pytest.fixture
def capture():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    return IqCapture(x, 125e6, 77e9)


class TestRoundTrip:
    def test_file_round_trip_is_bit_identical(self, capture, tmp_path):
        path = tmp_path / "c.iq"
        write_iq(path, capture)
        back = read_iq(path)
        assert back.samples.dtype == np.complex64
        assert back.samples.tobytes() == capture.samples.tobytes()
        assert (back.sample_rate, back.center_freq) == (125e6, 77e9)
        assert path.stat().st_size == HEADER.size + 8 * 1000

    def test_header_layout(self, capture):
        data = to_bytes(capture)
        assert data[:4] == b"SNIQ"
        assert int.from_bytes(data[4:6], "little") == 1
        assert int.from_bytes(data[6:8], "little") == 1
        assert int.from_bytes(data[24:32], "little") == 1000
        np.testing.assert_array_equal(np.frombuffer(data[32:40], "<f4"), [capture.samples[0].real, capture.samples[0].imag])

    @settings(max_examples=30)
    @given(st.lists(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e30), max_size=50))
    def test_bytes_round_trip(self, values):
        cap = IqCapture(np.array(values, dtype=complex), 1e6)
        assert from_bytes(to_bytes(cap)).samples.tobytes() == cap.samples.tobytes()

    def test_empty(self):
        assert from_bytes(to_bytes(IqCapture(np.zeros(0), 1.0))).sample_count == 0


class TestErrors:
    def test_truncated_payload(self, capture):
        with pytest.raises(PayloadLengthError, match="payload length mismatch"):
            from_bytes(to_bytes(capture)[:-3])

    def test_truncated_header(self):
        with pytest.raises(PayloadLengthError):
            from_bytes(b"SNIQ\x01")

    def test_bad_magic(self, capture):
        data = bytearray(to_bytes(capture))
        data[:4] = b"ABCD"
        with pytest.raises(BadMagicError):
            from_bytes(bytes(data))

    def test_version(self, capture):
        data = bytearray(to_bytes(capture))
        data[4] = 2
        with pytest.raises(UnsupportedVersionError):
            from_bytes(bytes(data))

    def test_distinct_codes(self):
        codes = {BadMagicError.code, UnsupportedVersionError.code, PayloadLengthError.code}
        assert len(codes) == 3
