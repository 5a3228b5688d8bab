"""``BSB1`` binary files for trained networks and credential stores.

All integers and floats are little-endian; floats are IEEE-754 float64.

Header (20 bytes)::

    0   4  magic            b"BSB1"
    4   2  format version   u16 (currently 1)
    6   1  content kind     b"N" network file, b"S" credential store
    7   1  reserved         0
    8   8  payload length   u64
    16  4  payload CRC-32   u32 (zlib.crc32)

Network block::

    u32 d
    f64 gamma, f64 eta, f64 theta, u32 max_iters, f64 convergence_tol
    f64 lr, u8 zero_diagonal, u8 symmetric_mask, f64 connectivity, u64 mask_seed
    u32 n_digests, then n_digests x 32-byte SHA-256 pattern digests
    d*d f64 W (row-major), d f64 b

Network payload is one network block. Store payload is ``u32 n_users``
followed per user by::

    u16 name length, UTF-8 name, u8 kind (0 text, 1 image),
    u32 encoded dimension, u16 threshold, 32-byte enrolled digest,
    network block

Files are written to a temporary sibling and renamed into place.
"""
from dataclasses import dataclass, field
import os
import struct
import tempfile
import zlib

import numpy as np

from .core import BsbParams, WeightMatrix
from .errors import (
    PartialWriteError,
    StoreCorruptError,
    StoreFormatError,
    StoreVersionError,
)
from .training import TrainingConfig

MAGIC = b"BSB1"
FORMAT_VERSION = 1
KIND_NETWORK = b"N"
KIND_STORE = b"S"
HEADER = struct.Struct("<4sHccQI")
_PARAMS = struct.Struct("<dddId")
_TRAIN = struct.Struct("<dBBdQ")
DIGEST_SIZE = 32


@dataclass(eq=False)
class TrainedNetwork:
    weights: WeightMatrix
    params: BsbParams = field(default_factory=BsbParams)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    digests: tuple = ()
    version: int = FORMAT_VERSION

    @property
    def d(self):
        return self.weights.d

    def __eq__(self, other):
        if not isinstance(other, TrainedNetwork):
            return NotImplemented
        return (
            self.weights == other.weights
            and self.params == other.params
            and self.training == other.training
            and tuple(self.digests) == tuple(other.digests)
        )


def pack_network(net):
    d = net.d
    p, t = net.params, net.training
    parts = [
        struct.pack("<I", d),
        _PARAMS.pack(p.gamma, p.eta, p.theta, int(p.max_iters), p.convergence_tol),
        _TRAIN.pack(t.lr, int(t.zero_diagonal), int(t.symmetric_mask), t.connectivity,
                    int(t.mask_seed) & ((1 << 64) - 1)),
        struct.pack("<I", len(net.digests)),
    ]
    for dg in net.digests:
        if len(dg) != DIGEST_SIZE:
            raise ValueError("pattern digests must be 32 bytes")
        parts.append(bytes(dg))
    parts.append(net.weights.w.astype("<f8").tobytes())
    parts.append(net.weights.b.astype("<f8").tobytes())
    return b"".join(parts)


class Reader:
    def __init__(self, buf, base=0):
        self.buf = buf
        self.pos = 0
        self.base = base

    def take(self, n, what):
        if self.pos + n > len(self.buf):
            raise StoreCorruptError(
                f"payload ends inside {what} (offset {self.base + self.pos}, need {n} bytes)"
            )
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, st, what):
        return st.unpack(self.take(st.size, what))


def unpack_network(reader):
    (d,) = reader.unpack(struct.Struct("<I"), "dimension")
    if d < 1:
        raise StoreCorruptError("network dimension is zero")
    gamma, eta, theta, max_iters, tol = reader.unpack(_PARAMS, "recall parameters")
    lr, zd, sym, conn, seed = reader.unpack(_TRAIN, "training config")
    (n_dig,) = reader.unpack(struct.Struct("<I"), "digest count")
    digests = tuple(bytes(reader.take(DIGEST_SIZE, "digest")) for _ in range(n_dig))
    w = np.frombuffer(reader.take(8 * d * d, "weight matrix"), dtype="<f8").reshape(d, d)
    b = np.frombuffer(reader.take(8 * d, "bias"), dtype="<f8")
    try:
        params = BsbParams(gamma, eta, theta, max_iters, tol)
        training = TrainingConfig(lr, bool(zd), conn, seed, bool(sym))
    except ValueError as exc:
        raise StoreCorruptError(f"invalid stored configuration: {exc}") from exc
    return TrainedNetwork(WeightMatrix(w.astype(np.float64), b.astype(np.float64)), params, training, digests)


def wrap(kind, payload):
    header = HEADER.pack(MAGIC, FORMAT_VERSION, kind, b"\0", len(payload), zlib.crc32(payload))
    return header + payload


def unwrap(data, expected_kind):
    if len(data) < 4 or data[:4] != MAGIC:
        raise StoreFormatError(f"bad magic {bytes(data[:4])!r}; expected {MAGIC!r}")
    if len(data) < HEADER.size:
        raise StoreCorruptError(f"file truncated inside the {HEADER.size}-byte header")
    _, version, kind, _, length, crc = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise StoreVersionError(f"format version {version} is not supported (expected {FORMAT_VERSION})")
    if kind != expected_kind:
        names = {KIND_NETWORK: "network", KIND_STORE: "credential store"}
        raise StoreFormatError(
            f"file holds a {names.get(kind, repr(kind))}, expected a {names[expected_kind]}"
        )
    payload = data[HEADER.size :]
    if len(payload) < length:
        raise StoreCorruptError(f"file truncated: payload has {len(payload)} of {length} bytes")
    if len(payload) > length:
        raise StoreCorruptError(f"{len(payload) - length} trailing bytes after payload")
    if zlib.crc32(payload) != crc:
        raise StoreCorruptError("checksum mismatch")
    return payload


def atomic_write(path, data):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".bsb-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise PartialWriteError(f"could not write {path}: {exc}") from exc


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def save_network(net, path):
    atomic_write(path, wrap(KIND_NETWORK, pack_network(net)))


def load_network(path):
    reader = Reader(unwrap(read_bytes(path), KIND_NETWORK), HEADER.size)
    net = unpack_network(reader)
    if reader.pos != len(reader.buf):
        raise StoreCorruptError("unexpected bytes after network block")
    return net
