import socket
import threading
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painmon import errors
from painmon.realtime import RingBuffer, SocketSource, stream_synthetic_over_socket
from painmon.realtime import wire


class TestRingBuffer:
    def test_overwrite_keeps_latest(self):
        buf = RingBuffer(1, 4)
        buf.push(np.array([[1.0, 2.0, 3.0]]))
        buf.push(np.array([[4.0, 5.0, 6.0]]))
        window, partial = buf.snapshot()
        np.testing.assert_array_equal(window[0], [3, 4, 5, 6])
        assert not partial

    def test_exact_capacity(self):
        buf = RingBuffer(2, 5)
        chunk = np.arange(10, dtype=float).reshape(2, 5)
        buf.push(chunk)
        window, partial = buf.snapshot()
        np.testing.assert_array_equal(window, chunk)
        assert not partial

    def test_partial_zero_padded_front(self):
        buf = RingBuffer(1, 6)
        buf.push(np.array([[7.0, 8.0]]))
        window, partial = buf.snapshot()
        assert partial
        np.testing.assert_array_equal(window[0], [0, 0, 0, 0, 7, 8])

    def test_channel_mismatch(self):
        buf = RingBuffer(3, 10)
        with pytest.raises(errors.ChannelMismatch):
            buf.push(np.zeros((2, 4)))

    def test_oversized_chunk_keeps_tail(self):
        buf = RingBuffer(1, 3)
        buf.push(np.arange(10, dtype=float)[None, :])
        window, _ = buf.snapshot()
        np.testing.assert_array_equal(window[0], [7, 8, 9])

    @given(st.lists(st.integers(min_value=1, max_value=9), min_size=1,
                    max_size=12))
    @settings(max_examples=40, deadline=None)
    def test_matches_flat_concatenation(self, sizes):
        capacity = 8
        buf = RingBuffer(1, capacity)
        flat = []
        counter = 0.0
        for k in sizes:
            chunk = np.arange(counter, counter + k)[None, :]
            counter += k
            flat.extend(chunk[0].tolist())
            buf.push(chunk)
        window, partial = buf.snapshot()
        expected = ([0.0] * max(0, capacity - len(flat)) + flat)[-capacity:]
        np.testing.assert_array_equal(window[0], expected)
        assert partial == (len(flat) < capacity)


class TestWireCodec:
    def test_hello_round_trip(self):
        frame = wire.encode_hello(["C3", "C4", "Cz"], 128.0)
        decoded = wire.decode_frame(frame[4:])
        assert decoded.channel_names == ["C3", "C4", "Cz"]
        assert decoded.rate_hz == 128.0

    def test_chunk_round_trip(self):
        samples = np.arange(12, dtype=float).reshape(3, 4)
        frame = wire.encode_chunk(777, samples)
        decoded = wire.decode_frame(frame[4:], n_channels=3)
        assert decoded.first_sample == 777
        np.testing.assert_array_equal(decoded.samples, samples)

    def test_bye(self):
        assert isinstance(wire.decode_frame(wire.encode_bye()[4:]), wire.Bye)

    def test_chunk_before_hello(self):
        frame = wire.encode_chunk(0, np.zeros((2, 2)))
        with pytest.raises(errors.CorruptPayload):
            wire.decode_frame(frame[4:], n_channels=None)

    def test_bad_magic(self):
        with pytest.raises(errors.CorruptPayload):
            wire.decode_frame(b"NOPE\x01\x01")


class TestSocketTransport:
    def test_synthetic_producer_to_socket_source(self):
        source = SocketSource("127.0.0.1", 0)
        received = []
        hello_seen = {}

        def on_hello(rate, names):
            hello_seen["rate"] = rate
            hello_seen["names"] = names

        source.start(lambda chunk: received.append(chunk), on_hello=on_hello)
        producer = threading.Thread(
            target=stream_synthetic_over_socket,
            args=("127.0.0.1", source.port, 0.5),
            kwargs={"rate_hz": 128.0, "seed": 1, "realtime": False},
            daemon=True)
        producer.start()
        producer.join(timeout=10)
        deadline = time.time() + 5
        while not source.finished and time.time() < deadline:
            time.sleep(0.02)
        source.stop()
        assert hello_seen["rate"] == 128.0
        assert len(hello_seen["names"]) == 14
        total = sum(c.shape[1] for c in received)
        assert total == 64                      # 0.5 s at 128 Hz
