"""Password enrollment and verification on per-user BSB networks.

Each user gets a network trained on the single encoded secret. Only the
weights, bias and a SHA-256 digest of the encoded secret are kept. For a
single pattern ``W = lr * (x x^T - I)`` reveals ``x`` up to sign, so the
store must be protected like a password file; it is not a hash.

Verification encodes the candidate, recalls it, saturates the final state
by sign (exact zeros to +1), and accepts iff the digest of that state equals
the enrolled digest and the candidate is within ``tolerance`` bits of it.
The default tolerance 0 accepts only the exact secret.
"""
from dataclasses import dataclass, field
import struct

import numpy as np

from . import codec
from .analyzer import pattern_digest
from .core import BsbParams, recall, saturate
from .errors import DivergenceError, DuplicateUserError, EncodingError, StoreCorruptError
from .store import (
    DIGEST_SIZE,
    HEADER,
    KIND_STORE,
    Reader,
    TrainedNetwork,
    atomic_write,
    pack_network,
    read_bytes,
    unpack_network,
    unwrap,
    wrap,
)
from .training import TrainingConfig, train

__all__ = ["UserRecord", "CredentialStore", "Verdict", "encode_secret", "enroll", "verify",
           "save_store", "load_store", "DEFAULT_TEXT_WIDTH"]

DEFAULT_TEXT_WIDTH = 128
TEXT, IMAGE = "text", "image"
_KIND_CODES = {TEXT: 0, IMAGE: 1}


@dataclass(eq=False)
class UserRecord:
    username: str
    network: TrainedNetwork
    digest: bytes
    kind: str = TEXT
    width: int = DEFAULT_TEXT_WIDTH
    threshold: int = 128

    def __eq__(self, other):
        if not isinstance(other, UserRecord):
            return NotImplemented
        return (self.username, self.digest, self.kind, self.width, self.threshold) == (
            other.username, other.digest, other.kind, other.width, other.threshold
        ) and self.network == other.network


@dataclass
class CredentialStore:
    records: dict = field(default_factory=dict)

    def __contains__(self, username):
        return username in self.records

    def __len__(self):
        return len(self.records)

    def __eq__(self, other):
        if not isinstance(other, CredentialStore):
            return NotImplemented
        return list(self.records) == list(other.records) and all(
            self.records[k] == other.records[k] for k in self.records
        )


@dataclass
class Verdict:
    accepted: bool
    reason: str  # accept | unknown_user | encoding | unconverged | mismatch | tolerance
    hamming: int = -1
    converged: bool = False
    iterations: int = 0

    def __bool__(self):
        return self.accepted


def encode_secret(secret, kind=TEXT, width=DEFAULT_TEXT_WIDTH, threshold=128):
    """Bipolar vector for a text password or an :class:`~bsbnet.codec.RgbImage`."""
    if kind == TEXT:
        if not isinstance(secret, str):
            raise EncodingError("text secrets must be str")
        return codec.text_to_bipolar(secret, width)
    if kind == IMAGE:
        if not isinstance(secret, codec.RgbImage):
            secret = codec.read_image(secret)
        return codec.image_to_bipolar(secret, threshold)
    raise ValueError(f"unknown secret kind {kind!r}")


def enroll(store, username, secret, kind=TEXT, width=DEFAULT_TEXT_WIDTH, threshold=128,
           training=None, params=None):
    if username in store:
        raise DuplicateUserError(f"user {username!r} is already enrolled")
    if not username or len(username.encode("utf-8")) > 0xFFFF:
        raise ValueError("username must be non-empty and at most 65535 UTF-8 bytes")
    training = training or TrainingConfig()
    params = params or BsbParams()
    x = encode_secret(secret, kind, width, threshold)
    digest = pattern_digest(x)
    net = TrainedNetwork(train([x], training), params, training, (digest,))
    record = UserRecord(username, net, digest, kind, x.size, threshold)
    store.records[username] = record
    return record


def verify(store, username, candidate, tolerance=0):
    record = store.records.get(username)
    if record is None:
        return Verdict(False, "unknown_user")
    try:
        x = encode_secret(candidate, record.kind, record.width, record.threshold)
    except (EncodingError, ValueError):
        return Verdict(False, "encoding")
    if x.size != record.network.d:
        return Verdict(False, "encoding")
    net = record.network
    try:
        trace = recall(x, net.weights, net.params)
    except DivergenceError:
        return Verdict(False, "unconverged")
    final = saturate(trace.final_state)
    hamming = int(np.count_nonzero(final != x))
    common = dict(hamming=hamming, converged=trace.converged, iterations=trace.iterations_used)
    if not trace.converged:
        return Verdict(False, "unconverged", **common)
    if pattern_digest(final) != record.digest:
        return Verdict(False, "mismatch", **common)
    if hamming > tolerance:
        return Verdict(False, "tolerance", **common)
    return Verdict(True, "accept", **common)


def save_store(store, path):
    parts = [struct.pack("<I", len(store.records))]
    for rec in store.records.values():
        name = rec.username.encode("utf-8")
        parts.append(struct.pack("<H", len(name)) + name)
        parts.append(struct.pack("<BIH", _KIND_CODES[rec.kind], rec.width, rec.threshold))
        parts.append(rec.digest)
        parts.append(pack_network(rec.network))
    atomic_write(path, wrap(KIND_STORE, b"".join(parts)))


def load_store(path):
    reader = Reader(unwrap(read_bytes(path), KIND_STORE), HEADER.size)
    (n,) = reader.unpack(struct.Struct("<I"), "user count")
    kinds = {v: k for k, v in _KIND_CODES.items()}
    store = CredentialStore()
    for _ in range(n):
        (name_len,) = reader.unpack(struct.Struct("<H"), "username length")
        try:
            name = bytes(reader.take(name_len, "username")).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise StoreCorruptError("username is not valid UTF-8") from exc
        kind_code, width, threshold = reader.unpack(struct.Struct("<BIH"), "encoding metadata")
        if kind_code not in kinds:
            raise StoreCorruptError(f"unknown secret kind code {kind_code}")
        digest = bytes(reader.take(DIGEST_SIZE, "digest"))
        net = unpack_network(reader)
        if name in store.records:
            raise StoreCorruptError(f"duplicate user {name!r}")
        store.records[name] = UserRecord(name, net, digest, kinds[kind_code], width, threshold)
    if reader.pos != len(reader.buf):
        raise StoreCorruptError("unexpected bytes after last record")
    return store
