"""One-second circular sample buffer.

Single writer, snapshot-on-read consumers. A snapshot always returns
exactly ``capacity`` samples per channel, oldest first; before the buffer
first fills, the front is zero-padded and the snapshot is flagged partial.
The writer never blocks: old samples are overwritten on overflow. A short
lock protects the copy; neither side holds it across any real work.
"""
from __future__ import annotations

import threading

import numpy as np

from ..errors import ChannelMismatch


class RingBuffer:
    def __init__(self, n_channels: int, capacity: int):
        if capacity <= 0 or n_channels <= 0:
            raise ValueError("capacity and channel count must be positive")
        self.n_channels = n_channels
        self.capacity = capacity
        self._data = np.zeros((n_channels, capacity))
        self._write_pos = 0
        self.total_written = 0
        self._lock = threading.Lock()

    def push(self, chunk: np.ndarray) -> None:
        chunk = np.atleast_2d(np.asarray(chunk, dtype=np.float64))
        if chunk.shape[0] != self.n_channels:
            raise ChannelMismatch(
                f"chunk has {chunk.shape[0]} channels, buffer {self.n_channels}")
        k = chunk.shape[1]
        if k == 0:
            return
        with self._lock:
            if k >= self.capacity:
                self._data[:, :] = chunk[:, -self.capacity:]
                self._write_pos = 0
            else:
                end = self._write_pos + k
                if end <= self.capacity:
                    self._data[:, self._write_pos:end] = chunk
                else:
                    first = self.capacity - self._write_pos
                    self._data[:, self._write_pos:] = chunk[:, :first]
                    self._data[:, :end - self.capacity] = chunk[:, first:]
                self._write_pos = end % self.capacity
            self.total_written += k

    def snapshot(self) -> tuple[np.ndarray, bool]:
        """(window, partial): the most recent ``capacity`` samples,
        oldest-first; ``partial`` until the buffer has filled once."""
        with self._lock:
            out = np.concatenate(
                [self._data[:, self._write_pos:], self._data[:, :self._write_pos]],
                axis=1)
            partial = self.total_written < self.capacity
            if partial:
                # Anything older than what was written is padding; zero it.
                valid = self.total_written
                out[:, :self.capacity - valid] = 0.0
        return out, partial
