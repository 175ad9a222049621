"""JSON-over-HTTP sampler client and an in-process mock server.

Request body::

    {"dimension": n, "linear": [...], "quadratic": [[i, j, v], ...], "offset": o, "reads": r}

Response body::

    {"samples": [{"bits": [0, 1, ...], "energy": e, "count": k}, ...]}
"""

from __future__ import annotations

import json
import socket
import threading
import time
import urllib.error
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

from ..polynomial import QuboProblem
from ..qubo_io import qubo_from_dict, qubo_to_dict
from .exhaustive import exhaustive_solve
from .sampleset import Sample, SampleSet

ENERGY_RTOL = 1e-6


class RemoteSamplerError(RuntimeError):
    pass


class RemoteTransportError(RemoteSamplerError):
    pass


class RemoteTimeoutError(RemoteSamplerError):
    pass


class MalformedResponseError(RemoteSamplerError):
    pass


class EnergyMismatchError(RemoteSamplerError):
    pass


def build_request(q: QuboProblem, reads: int) -> dict:
    body = qubo_to_dict(q)
    body.pop("variable_names")
    body["reads"] = int(reads)
    return body


def parse_response(q: QuboProblem, payload: bytes | str) -> SampleSet:
    """Validate a response body and re-check every reported energy against ``q``."""
    try:
        data = json.loads(payload)
        raw = data["samples"]
        if not isinstance(raw, list):
            raise TypeError("'samples' is not a list")
        parsed = []
        for s in raw:
            bits = tuple(int(b) for b in s["bits"])
            energy, count = float(s["energy"]), int(s.get("count", 1))
            if len(bits) != q.dimension or any(b not in (0, 1) for b in bits) or count < 1:
                raise ValueError(f"invalid sample {s!r}")
            parsed.append((bits, energy, count))
    except (ValueError, TypeError, KeyError) as exc:
        raise MalformedResponseError(f"malformed sampler response: {exc}") from exc
    records = []
    for bits, reported, count in parsed:
        local = q.energy(bits)
        if abs(local - reported) > ENERGY_RTOL * max(1.0, abs(local)):
            raise EnergyMismatchError(f"reported energy {reported!r} but local evaluation gives {local!r} for {bits}")
        records.append(Sample(bits, local, count))
    return SampleSet.from_records(records)


def remote_sample(endpoint: str, q: QuboProblem, reads: int = 100, timeout: float = 30.0) -> SampleSet:
    """POST ``q`` to ``endpoint`` and return the validated samples.

    Raises:
        RemoteTimeoutError: no complete response within ``timeout`` seconds.
        RemoteTransportError: connection or HTTP-level failure.
        MalformedResponseError: body is not a valid sample document.
        EnergyMismatchError: a reported energy disagrees with local evaluation.
    """
    body = json.dumps(build_request(q, reads)).encode()
    req = urllib.request.Request(endpoint, data=body, headers={"Content-Type": "application/json"}, method="POST")
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            payload = resp.read()
    except (socket.timeout, TimeoutError) as exc:
        raise RemoteTimeoutError(f"no response from {endpoint} within {timeout}s") from exc
    except urllib.error.HTTPError as exc:
        raise RemoteTransportError(f"{endpoint} answered HTTP {exc.code}") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, (socket.timeout, TimeoutError)):
            raise RemoteTimeoutError(f"no response from {endpoint} within {timeout}s") from exc
        raise RemoteTransportError(f"cannot reach {endpoint}: {exc.reason}") from exc
    except OSError as exc:
        raise RemoteTransportError(f"transport failure talking to {endpoint}: {exc}") from exc
    return parse_response(q, payload).relabel(solver="remote", endpoint=endpoint, reads=reads)


class RemoteSampler:
    def __init__(self, endpoint: str, reads: int = 100, timeout: float = 30.0):
        self.endpoint = endpoint
        self.reads = reads
        self.timeout = timeout

    def sample(self, q: QuboProblem) -> SampleSet:
        return remote_sample(self.endpoint, q, self.reads, self.timeout)


class MockSamplerServer:
    """Local HTTP endpoint answering sample requests, with fault injection.

    Args:
        solver: maps a QUBO to a :class:`SampleSet`; defaults to exhaustive search.
        latency: seconds to sleep before answering.
        corrupt_energy: add this amount to every reported energy.
        malformed: answer with a body that is not a sample document.

    Use as a context manager; :attr:`url` is the endpoint.
    """

    def __init__(
        self,
        solver: Callable[[QuboProblem], SampleSet] | None = None,
        latency: float = 0.0,
        corrupt_energy: float = 0.0,
        malformed: bool = False,
    ):
        self.solver = solver or (lambda q: exhaustive_solve(q))
        self.latency = latency
        self.corrupt_energy = corrupt_energy
        self.malformed = malformed
        self.requests: list[dict] = []
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def _handler(self):
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                request = json.loads(self.rfile.read(length))
                mock.requests.append(request)
                if mock.latency:
                    time.sleep(mock.latency)
                if mock.malformed:
                    body = b'{"samples": "nope"}'
                else:
                    result = mock.solver(qubo_from_dict({**request, "variable_names": None}))
                    body = json.dumps(
                        {
                            "samples": [
                                {"bits": list(r.bits), "energy": r.energy + mock.corrupt_energy, "count": r.count}
                                for r in result
                            ]
                        }
                    ).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                try:
                    self.wfile.write(body)
                except (BrokenPipeError, ConnectionResetError):
                    pass

            def log_message(self, *args):
                pass

        return Handler

    def start(self) -> MockSamplerServer:
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), self._handler())
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/sample"

    def __enter__(self) -> MockSamplerServer:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
