"""Vendor-neutral HTTP screening service.

The listener accepts concurrently; screenings execute on a fixed-size worker
pool fed by a FIFO queue, so at most ``workers`` model calls run at once and
nobody starves. Request log entries (no raw text) go to an append-only JSONL
file through a single serialized appender and survive restarts.
"""

import hashlib
import json
import os
import queue
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .errors import BiaslensError, ConfigError, SizeLimitError
from .screener import DEFAULT_MAX_BYTES, ScreenEngine

REQUEST_TIMEOUT_S = 300.0


@dataclass
class GatewayConfig:
    checkpoint_path: str
    vocab_path: str
    host: str = "127.0.0.1"
    port: int = 8080
    workers: int = 8
    threshold: float = 0.5
    log_path: str = "screen-requests.jsonl"
    max_body_bytes: int = DEFAULT_MAX_BYTES + (64 << 10)  # 1 MiB text plus JSON overhead
    cors: bool = True


class RequestLogStore:
    """Append-only JSONL log with in-memory aggregates, replayed at startup."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        self.entries = []
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self.entries.append(json.loads(line))
        self._fh = open(path, "a", encoding="utf-8") if path else None

    def append(self, entry: dict) -> None:
        with self._lock:
            self.entries.append(entry)
            if self._fh is not None:
                self._fh.write(json.dumps(entry, sort_keys=True) + "\n")
                self._fh.flush()

    def aggregate(self) -> dict:
        with self._lock:
            entries = list(self.entries)
        ok = [e for e in entries if e.get("status") == 200]
        per_class = {}
        for e in ok:
            for name, n in e.get("per_class", {}).items():
                per_class[name] = per_class.get(name, 0) + n
        latencies = [e["latency_ms"] for e in ok if "latency_ms" in e]
        percentiles = {}
        if latencies:
            percentiles = {
                "p50": round(float(np.percentile(latencies, 50)), 3),
                "p90": round(float(np.percentile(latencies, 90)), 3),
                "p99": round(float(np.percentile(latencies, 99)), 3),
            }
        by_status = {}
        for e in entries:
            key = str(e.get("status"))
            by_status[key] = by_status.get(key, 0) + 1
        return {
            "total": len(ok),
            "by_status": by_status,
            "finding_counts": per_class,
            "latency_ms": percentiles,
        }

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None


class _Job:
    __slots__ = ("text", "threshold", "done", "result", "error")

    def __init__(self, text, threshold):
        self.text = text
        self.threshold = threshold
        self.done = threading.Event()
        self.result = None
        self.error = None


class WorkerPool:
    """Fixed-size pool over a FIFO queue; at most ``size`` screenings run at once."""

    def __init__(self, engine_getter, size: int):
        self.size = size
        self._queue = queue.Queue()
        self._engine_getter = engine_getter
        self._threads = [
            threading.Thread(target=self._run, name=f"screen-worker-{i}", daemon=True)
            for i in range(size)
        ]
        for t in self._threads:
            t.start()

    def _run(self):
        while True:
            job = self._queue.get()
            if job is None:
                return
            try:
                engine = self._engine_getter()
                job.result = engine.screen_text(job.text, threshold=job.threshold)
            except BaseException as exc:  # propagated to the waiting handler
                job.error = exc
            finally:
                job.done.set()

    def submit(self, text, threshold):
        job = _Job(text, threshold)
        self._queue.put(job)
        if not job.done.wait(REQUEST_TIMEOUT_S):
            raise TimeoutError("screening did not finish in time")
        if job.error is not None:
            raise job.error
        return job.result

    def stop(self):
        for _ in self._threads:
            self._queue.put(None)
        for t in self._threads:
            t.join(timeout=5)


class _Listener(ThreadingHTTPServer):
    daemon_threads = True
    # the default backlog of 5 drops SYNs under bursts of concurrent clients,
    # which surfaces as multi-second TCP retransmit stalls
    request_queue_size = 256


class GatewayServer:
    """Binds immediately; loads the checkpoint on a background thread and
    reports "loading" (screen -> 503) until the engine is warm."""

    def __init__(self, config: GatewayConfig, engine: ScreenEngine = None):
        self.config = config
        self.started_at = time.time()
        self.log_store = RequestLogStore(config.log_path)
        self._engine = engine
        self._ready = threading.Event()
        if engine is not None:
            self._ready.set()
        self.pool = WorkerPool(self._get_engine, config.workers)
        handler = _make_handler(self)
        self.httpd = _Listener((config.host, config.port), handler)
        self.port = self.httpd.server_address[1]
        self._serve_thread = None
        self._load_thread = None

    def _get_engine(self) -> ScreenEngine:
        return self._engine

    @property
    def ready(self) -> bool:
        return self._ready.is_set()

    def _load(self):
        engine = ScreenEngine.from_checkpoint(
            self.config.checkpoint_path, self.config.vocab_path,
            threshold=self.config.threshold)
        engine.screen_text("Warm up. The compiler and caches settle here.")
        self._engine = engine
        self._ready.set()

    def start(self):
        if self._engine is None:
            self._load_thread = threading.Thread(target=self._load, daemon=True)
            self._load_thread.start()
        self._serve_thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._serve_thread.start()
        return self

    def wait_ready(self, timeout=None) -> bool:
        return self._ready.wait(timeout)

    def serve_forever(self):
        self.start()
        self._serve_thread.join()

    def shutdown(self):
        self.httpd.shutdown()
        self.httpd.server_close()
        self.pool.stop()
        self.log_store.close()


def _make_handler(server: GatewayServer):
    cors = server.config.cors

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet; the JSONL log is the record
            pass

        def _send(self, status: int, payload, raw: bytes = None):
            body = raw if raw is not None else json.dumps(payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            # one request per connection keeps the thread count bounded by the
            # number of in-flight requests rather than idle keep-alives
            self.send_header("Connection", "close")
            self.close_connection = True
            if cors:
                self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            if cors:
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            if self.path == "/v1/health":
                engine = server._get_engine()
                self._send(200, {
                    "status": "ready" if server.ready else "loading",
                    "checkpoint_id": engine.checkpoint_id if engine else None,
                    "uptime_seconds": round(time.time() - server.started_at, 3),
                    "parallelism": server.config.workers,
                })
            elif self.path == "/v1/stats":
                self._send(200, server.log_store.aggregate())
            else:
                self._send(404, {"error": f"unknown path {self.path}"})

        def do_POST(self):
            if self.path != "/v1/screen":
                self._send(404, {"error": f"unknown path {self.path}"})
                return
            started = time.perf_counter()
            length = self.headers.get("Content-Length")
            if length is None:
                self._send(411, {"error": "Content-Length required"})
                return
            length = int(length)
            if length > server.config.max_body_bytes:
                # drain (bounded) so the client finishes writing before the error lands
                remaining = min(length, 32 << 20)
                while remaining > 0:
                    chunk = self.rfile.read(min(remaining, 1 << 16))
                    if not chunk:
                        break
                    remaining -= len(chunk)
                self.close_connection = True
                self._send(413, {"error": "request body exceeds the configured limit"})
                self._log(413, None, None, started)
                return
            body = self.rfile.read(length)
            try:
                payload = json.loads(body)
                if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
                    raise ValueError("body must be a JSON object with a string 'text'")
            except (json.JSONDecodeError, UnicodeDecodeError, ValueError) as exc:
                self._send(400, {"error": f"malformed request: {exc}"})
                self._log(400, None, None, started)
                return
            threshold = payload.get("threshold")
            if threshold is not None:
                if not isinstance(threshold, (int, float)) or not 0.0 <= float(threshold) <= 1.0:
                    self._send(422, {"error": "threshold must be a number in [0, 1]"})
                    self._log(422, payload.get("text"), None, started)
                    return
                threshold = float(threshold)
            self._client_tag = payload.get("client_tag")
            if not server.ready:
                self._send(503, {"error": "model is still loading"})
                self._log(503, payload["text"], None, started)
                return
            try:
                result = server.pool.submit(payload["text"], threshold)
            except SizeLimitError as exc:
                self._send(413, {"error": str(exc)})
                self._log(413, payload["text"], None, started)
                return
            except ConfigError as exc:
                self._send(422, {"error": str(exc)})
                self._log(422, payload["text"], None, started)
                return
            except BiaslensError as exc:
                self._send(500, {"error": str(exc)})
                self._log(500, payload["text"], None, started)
                return
            self._send(200, None, raw=result.to_json().encode())
            self._log(200, payload["text"], result, started)

        def _log(self, status, text, result, started):
            entry = {
                "ts": round(time.time(), 3),
                "status": status,
                "latency_ms": round((time.perf_counter() - started) * 1000.0, 3),
            }
            tag = getattr(self, "_client_tag", None)
            if isinstance(tag, str) and tag:
                entry["client_tag"] = tag[:64]
            if text is not None:
                entry["request_digest"] = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
            if result is not None:
                per_class = {}
                for f in result.findings:
                    per_class[f.label] = per_class.get(f.label, 0) + 1
                entry["findings"] = len(result.findings)
                entry["per_class"] = per_class
            server.log_store.append(entry)

    return Handler
