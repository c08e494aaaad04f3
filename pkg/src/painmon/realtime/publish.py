"""Publish side of the runtime: line-delimited JSON over a local TCP
socket, with WebSocket framing offered on the same port for browser
subscribers.

A subscriber that opens the connection with an HTTP ``GET`` + Upgrade
request gets an RFC6455 handshake and text frames; anything else is
treated as a raw socket receiving newline-delimited JSON. Both kinds may
send control messages (``set_threshold``, ``set_sustain``, ``pause``,
``resume``); controls land in a mailbox the serving loop drains at tick
boundaries, and applied settings are echoed to every subscriber.

Each subscriber owns a bounded queue; when it falls behind, the oldest
messages are dropped and replaced with a gap notice. The publishing loop
is never back-pressured.
"""
from __future__ import annotations

import base64
import hashlib
import json
import logging
import queue
import socket
import struct
import threading

log = logging.getLogger(__name__)

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
QUEUE_LIMIT = 256


def _ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def ws_encode_text(payload: bytes) -> bytes:
    header = b"\x81"
    n = len(payload)
    if n < 126:
        header += bytes([n])
    elif n < 65536:
        header += bytes([126]) + struct.pack(">H", n)
    else:
        header += bytes([127]) + struct.pack(">Q", n)
    return header + payload


class _WsReader:
    """Incremental decoder for client-to-server (masked) frames."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.buf = b""

    def _need(self, n: int) -> bool:
        while len(self.buf) < n:
            chunk = self.sock.recv(4096)
            if not chunk:
                return False
            self.buf += chunk
        return True

    def next_message(self) -> tuple[int, bytes] | None:
        """Returns (opcode, payload) or None on EOF/close."""
        while True:
            if not self._need(2):
                return None
            b0, b1 = self.buf[0], self.buf[1]
            opcode = b0 & 0x0F
            masked = bool(b1 & 0x80)
            length = b1 & 0x7F
            pos = 2
            if length == 126:
                if not self._need(pos + 2):
                    return None
                (length,) = struct.unpack(">H", self.buf[pos:pos + 2])
                pos += 2
            elif length == 127:
                if not self._need(pos + 8):
                    return None
                (length,) = struct.unpack(">Q", self.buf[pos:pos + 8])
                pos += 8
            mask = b""
            if masked:
                if not self._need(pos + 4):
                    return None
                mask = self.buf[pos:pos + 4]
                pos += 4
            if not self._need(pos + length):
                return None
            payload = self.buf[pos:pos + length]
            self.buf = self.buf[pos + length:]
            if masked:
                payload = bytes(c ^ mask[i % 4] for i, c in enumerate(payload))
            if opcode == 0x8:
                return None
            if opcode == 0x9:          # ping -> pong
                try:
                    self.sock.sendall(b"\x8a" + bytes([len(payload)]) + payload)
                except OSError:
                    return None
                continue
            if opcode in (0x1, 0x2):
                return opcode, payload
            # continuation/pong and friends: skip


class _Subscriber:
    def __init__(self, sock: socket.socket, is_ws: bool, name: str):
        self.sock = sock
        self.is_ws = is_ws
        self.name = name
        self.queue: queue.Queue = queue.Queue()
        self.alive = True
        self.dropped = 0
        self._lock = threading.Lock()

    def offer(self, line: bytes) -> None:
        with self._lock:
            if self.queue.qsize() >= QUEUE_LIMIT:
                try:
                    self.queue.get_nowait()
                    self.dropped += 1
                except queue.Empty:
                    pass
                gap = json.dumps({"type": "gap", "dropped": self.dropped}).encode()
                self.queue.put_nowait(gap)
            self.queue.put_nowait(line)


class PublishServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._server.bind((host, port))
        self._server.listen(16)
        self.host, self.port = self._server.getsockname()
        self.controls: queue.Queue = queue.Queue()
        self._subscribers: list[_Subscriber] = []
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._accept_thread = threading.Thread(target=self._accept_loop,
                                               daemon=True, name="publish-accept")
        self._accept_thread.start()

    @property
    def n_subscribers(self) -> int:
        with self._lock:
            return len(self._subscribers)

    def _accept_loop(self) -> None:
        self._server.settimeout(0.25)
        while not self._stop.is_set():
            try:
                sock, addr = self._server.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            threading.Thread(target=self._handshake, args=(sock, addr),
                             daemon=True).start()

    def _handshake(self, sock: socket.socket, addr) -> None:
        # WebSocket clients speak first (HTTP GET); raw subscribers may
        # stay silent, so a short peek decides the mode.
        sock.settimeout(0.25)
        head = b""
        try:
            head = sock.recv(1, socket.MSG_PEEK)
        except socket.timeout:
            pass
        except OSError:
            sock.close()
            return
        is_ws = head == b"G"
        name = f"{addr[0]}:{addr[1]}"
        if is_ws:
            try:
                sock.settimeout(2.0)
                request = b""
                while b"\r\n\r\n" not in request:
                    chunk = sock.recv(4096)
                    if not chunk:
                        sock.close()
                        return
                    request += chunk
                key = ""
                for line in request.decode("latin-1").split("\r\n"):
                    if line.lower().startswith("sec-websocket-key:"):
                        key = line.split(":", 1)[1].strip()
                if not key:
                    sock.close()
                    return
                response = (
                    "HTTP/1.1 101 Switching Protocols\r\n"
                    "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                    f"Sec-WebSocket-Accept: {_ws_accept_key(key)}\r\n\r\n")
                sock.sendall(response.encode("ascii"))
            except OSError:
                sock.close()
                return
        sock.settimeout(None)
        sub = _Subscriber(sock, is_ws, name)
        with self._lock:
            self._subscribers.append(sub)
        log.info("subscriber %s connected (%s)", name, "ws" if is_ws else "raw")
        threading.Thread(target=self._sender, args=(sub,), daemon=True).start()
        threading.Thread(target=self._receiver, args=(sub,), daemon=True).start()

    def _sender(self, sub: _Subscriber) -> None:
        try:
            while sub.alive and not self._stop.is_set():
                try:
                    line = sub.queue.get(timeout=0.25)
                except queue.Empty:
                    continue
                if sub.is_ws:
                    sub.sock.sendall(ws_encode_text(line))
                else:
                    sub.sock.sendall(line + b"\n")
        except OSError:
            pass
        finally:
            self._drop(sub)

    def _receiver(self, sub: _Subscriber) -> None:
        try:
            if sub.is_ws:
                reader = _WsReader(sub.sock)
                while sub.alive:
                    msg = reader.next_message()
                    if msg is None:
                        break
                    self._handle_control(msg[1])
            else:
                buf = b""
                while sub.alive:
                    chunk = sub.sock.recv(4096)
                    if not chunk:
                        break
                    buf += chunk
                    while b"\n" in buf:
                        line, buf = buf.split(b"\n", 1)
                        if line.strip():
                            self._handle_control(line)
        except OSError:
            pass
        finally:
            self._drop(sub)

    def _handle_control(self, raw: bytes) -> None:
        try:
            msg = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            log.warning("ignoring malformed control message")
            return
        if isinstance(msg, dict) and msg.get("type") in (
                "set_threshold", "set_sustain", "pause", "resume"):
            self.controls.put(msg)
        else:
            log.warning("ignoring unknown control %r", msg)

    def _drop(self, sub: _Subscriber) -> None:
        if not sub.alive:
            return
        sub.alive = False
        try:
            sub.sock.close()
        except OSError:
            pass
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def publish(self, message: dict) -> None:
        line = json.dumps(message, separators=(",", ":")).encode("utf-8")
        with self._lock:
            subs = list(self._subscribers)
        for sub in subs:
            sub.offer(line)

    def drain_controls(self) -> list[dict]:
        out = []
        while True:
            try:
                out.append(self.controls.get_nowait())
            except queue.Empty:
                return out

    def close(self) -> None:
        self._stop.set()
        with self._lock:
            subs = list(self._subscribers)
        for sub in subs:
            self._drop(sub)
        self._server.close()
