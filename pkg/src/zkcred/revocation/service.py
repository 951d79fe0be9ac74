"""Registry service: JSON wire protocol, HTTP server, and clients.

    GET  /registry/{id}/root              -> {root, version, depth}
    GET  /registry/{id}/deltas?since=v    -> {deltas: [StatusDelta...]}
    GET  /registry/{id}/nodes?maxLevel=k  -> {version, nodes: {level: [hex...]}}
    POST /registry/{id}/status            -> {version, root}

Status updates are signed by the issuer with EdDSA over the Poseidon hash
of {registry, version, changes}; including the target version prevents an
old signed update from being replayed.
"""

import json
import threading
import urllib.error
import urllib.parse
import urllib.request
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, Optional

from ..arith.babyjub import Point
from ..arith.eddsa import InvalidKeyError, Signature, SigningKeyPair, eddsa_sign, eddsa_verify
from ..arith.field import from_hex, to_hex
from ..credential.schema import document_hash
from .registry import RegistryError, RevocationRegistry, StatusDelta
from .store import RegistryStore


def status_message(registry_id: str, version: int, changes) -> int:
    doc = {"registry": registry_id, "version": version,
           "changes": [{"id": int(rid), "status": st} for rid, st in changes]}
    return document_hash(doc)


def sign_status_update(issuer: SigningKeyPair, registry_id: str, version: int, changes) -> dict:
    sig = eddsa_sign(issuer, status_message(registry_id, version, changes))
    return {"version": version, "changes": [{"id": int(r), "status": s} for r, s in changes],
            "signature": sig.to_json()}


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status, self.code = status, code


class RegistryService:
    def __init__(self):
        self.registries: Dict[str, RevocationRegistry] = {}
        self.stores: Dict[str, RegistryStore] = {}
        self.issuers: Dict[str, Point] = {}

    def add(self, reg: RevocationRegistry, issuer_pk: Point, store: Optional[RegistryStore] = None):
        self.registries[reg.registry_id] = reg
        self.issuers[reg.registry_id] = issuer_pk
        if store is not None:
            self.stores[reg.registry_id] = store

    def _get(self, rid: str) -> RevocationRegistry:
        try:
            return self.registries[rid]
        except KeyError:
            raise ServiceError(404, "UNKNOWN_REGISTRY", f"no registry {rid!r}") from None

    def handle(self, method: str, path: str, query: Dict[str, str], body=None):
        """Dispatch one request; returns (http status, JSON document)."""
        try:
            parts = [p for p in path.split("/") if p]
            if len(parts) != 3 or parts[0] != "registry":
                raise ServiceError(404, "NOT_FOUND", path)
            reg = self._get(parts[1])
            action = parts[2]
            if method == "GET" and action == "root":
                return 200, reg.root_json()
            if method == "GET" and action == "deltas":
                since = int(query.get("since", 0))
                try:
                    deltas = reg.deltas_since(since)
                except RegistryError as e:
                    raise ServiceError(400, "BAD_VERSION", str(e)) from None
                return 200, {"deltas": [d.to_json() for d in deltas]}
            if method == "GET" and action == "nodes":
                level = int(query.get("maxLevel", reg.depth))
                try:
                    with reg._lock:
                        version = reg.version
                        nodes = reg.upper_nodes(level)
                except RegistryError as e:
                    raise ServiceError(400, "BAD_LEVEL", str(e)) from None
                return 200, {"version": version, "depth": reg.depth,
                             "nodes": {str(lv): [to_hex(v) for _, v in sorted(row.items())]
                                       for lv, row in nodes.items()}}
            if method == "POST" and action == "status":
                return 200, self._post_status(reg, body or {})
            raise ServiceError(405, "BAD_METHOD", f"{method} {path}")
        except ServiceError as e:
            return e.status, {"error": {"code": e.code, "message": str(e)}}
        except (ValueError, KeyError, TypeError) as e:
            return 400, {"error": {"code": "BAD_REQUEST", "message": str(e)}}

    def _post_status(self, reg: RevocationRegistry, body: dict) -> dict:
        changes = [(int(c["id"]), c["status"]) for c in body["changes"]]
        sig = Signature.from_json(body["signature"])
        with reg._lock:
            version = int(body["version"])
            if version != reg.version + 1:
                raise ServiceError(409, "STALE_UPDATE", f"expected version {reg.version + 1}")
            msg = status_message(reg.registry_id, version, changes)
            try:
                ok = eddsa_verify(self.issuers[reg.registry_id], msg, sig)
            except InvalidKeyError:
                ok = False
            if not ok:
                raise ServiceError(403, "BAD_SIGNATURE", "status update not signed by the registry issuer")
            try:
                delta = reg.set_statuses(changes, body.get("timestamp"))
            except RegistryError as e:
                raise ServiceError(400, "BAD_CHANGE", str(e)) from None
            store = self.stores.get(reg.registry_id)
            if store is not None:
                store.append(reg, delta)
        return {"version": delta.version, "root": to_hex(delta.root)}


class _Handler(BaseHTTPRequestHandler):
    service: RegistryService = None

    def _reply(self, status, doc):
        data = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _dispatch(self, method):
        url = urllib.parse.urlsplit(self.path)
        query = dict(urllib.parse.parse_qsl(url.query))
        body = None
        if method == "POST":
            length = int(self.headers.get("Content-Length", 0))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                return self._reply(400, {"error": {"code": "BAD_JSON", "message": "body is not JSON"}})
        self._reply(*self.service.handle(method, url.path, query, body))

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def log_message(self, fmt, *args):
        pass


def make_server(service: RegistryService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve_in_thread(service: RegistryService, host: str = "127.0.0.1", port: int = 0):
    server = make_server(service, host, port)
    t = threading.Thread(target=server.serve_forever, daemon=True)
    t.start()
    return server


class RegistryClientError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class RegistryClient:
    """Client over any transport with a `request(method, path, query, body)` call."""

    def __init__(self, transport):
        self.transport = transport

    @classmethod
    def http(cls, base_url: str) -> "RegistryClient":
        return cls(HttpTransport(base_url))

    @classmethod
    def local(cls, service: RegistryService) -> "RegistryClient":
        return cls(LocalTransport(service))

    def _call(self, method, path, query=None, body=None):
        status, doc = self.transport.request(method, path, query or {}, body)
        if status != 200:
            err = doc.get("error", {})
            raise RegistryClientError(err.get("code", "HTTP_ERROR"), err.get("message", str(status)))
        return doc

    def root(self, rid: str) -> dict:
        d = self._call("GET", f"/registry/{rid}/root")
        return {"root": from_hex(d["root"]), "version": d["version"], "depth": d["depth"]}

    def deltas(self, rid: str, since: int):
        d = self._call("GET", f"/registry/{rid}/deltas", {"since": str(since)})
        return [StatusDelta.from_json(x) for x in d["deltas"]]

    def nodes(self, rid: str, max_level: int):
        d = self._call("GET", f"/registry/{rid}/nodes", {"maxLevel": str(max_level)})
        nodes = {int(lv): {i: from_hex(h) for i, h in enumerate(row)} for lv, row in d["nodes"].items()}
        return d["version"], nodes

    def post_status(self, rid: str, issuer: SigningKeyPair, changes, version: Optional[int] = None,
                    timestamp: Optional[int] = None) -> dict:
        if version is None:
            version = self.root(rid)["version"] + 1
        body = sign_status_update(issuer, rid, version, changes)
        if timestamp is not None:
            body["timestamp"] = timestamp
        return self._call("POST", f"/registry/{rid}/status", body=body)


class LocalTransport:
    def __init__(self, service: RegistryService):
        self.service = service

    def request(self, method, path, query, body):
        # round-trip through JSON so local and HTTP behave the same
        body = json.loads(json.dumps(body)) if body is not None else None
        status, doc = self.service.handle(method, path, query, body)
        return status, json.loads(json.dumps(doc))


class HttpTransport:
    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base = base_url.rstrip("/")
        self.timeout = timeout

    def request(self, method, path, query, body):
        url = self.base + path
        if query:
            url += "?" + urllib.parse.urlencode(query)
        data = json.dumps(body).encode() if body is not None else None
        req = urllib.request.Request(url, data=data, method=method,
                                     headers={"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return resp.status, json.loads(resp.read())
        except urllib.error.HTTPError as e:
            return e.code, json.loads(e.read() or b"{}")


def sync_client_state(client: RegistryClient, rid: str, state):
    """Pull deltas and, for subtree clients, the upper nodes; returns the state."""
    state.apply_deltas(client.deltas(rid, state.version))
    if state.subtree is not None:
        version, nodes = client.nodes(rid, state.subtree[0])
        if version != state.version:
            # a write landed between the two requests; catch up once more
            state.apply_deltas(client.deltas(rid, state.version))
            version, nodes = client.nodes(rid, state.subtree[0])
        state.load_upper(nodes, version)
    return state
