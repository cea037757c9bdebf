"""Efficiently updatable network evaluation (inference only).

Feature set: for each perspective, (own king square, non-king piece, square)
with squares oriented so that each side sees itself moving up the board.
That gives 64 * 10 * 64 = 40960 binary inputs per perspective.

Weight file (little-endian)::

    b"DMND" | u32 version | u32 dims[4] = (features, L1, L2, L3)
    i16 ft_bias[L1]        i16 ft_weights[features][L1]
    i32 h1_bias[L2]        i8  h1_weights[L2][2*L1]
    i32 h2_bias[L3]        i8  h2_weights[L3][L2]
    i32 out_bias[1]        i8  out_weights[L3]
    u64 checksum  (blake2b-64 of every preceding byte)

Fixed point: accumulators are int16; clipped-ReLU clamps to [0, 127]; each
hidden layer's int32 sum is shifted right by ``HIDDEN_SHIFT`` before clamping;
the output is divided by ``OUTPUT_SCALE`` to give centipawns.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from ..board.position import KING, WHITE, Move, Position, make_move
from .score import MAX_CP, Score

MAGIC = b"DMND"
VERSION = 1
NUM_FEATURES = 64 * 640
HIDDEN_SHIFT = 6
OUTPUT_SCALE = 16
CRELU_MAX = 127


class NnueFormatError(ValueError):
    pass


class BadMagicError(NnueFormatError):
    pass


class BadVersionError(NnueFormatError):
    pass


class BadSizeError(NnueFormatError):
    pass


class BadChecksumError(NnueFormatError):
    pass


@dataclass(frozen=True, eq=False)
class NnueNetwork:
    ft_bias: np.ndarray  # int16 [L1]
    ft_weights: np.ndarray  # int16 [features, L1]
    h1_bias: np.ndarray  # int32 [L2]
    h1_weights: np.ndarray  # int8 [L2, 2*L1]
    h2_bias: np.ndarray  # int32 [L3]
    h2_weights: np.ndarray  # int8 [L3, L2]
    out_bias: np.ndarray  # int32 [1]
    out_weights: np.ndarray  # int8 [L3]

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (
            self.ft_weights.shape[0],
            self.ft_weights.shape[1],
            self.h1_weights.shape[0],
            self.h2_weights.shape[0],
        )


@dataclass(eq=False)
class NnueAccumulator:
    """Per-perspective first-layer sums, row 0 = White, row 1 = Black."""

    values: np.ndarray  # int16 [2, L1]

    def copy(self) -> "NnueAccumulator":
        return NnueAccumulator(self.values.copy())

    def __eq__(self, other) -> bool:
        return isinstance(other, NnueAccumulator) and np.array_equal(self.values, other.values)


def _layout(dims):
    n, l1, l2, l3 = dims
    return [
        ("ft_bias", "<i2", (l1,)),
        ("ft_weights", "<i2", (n, l1)),
        ("h1_bias", "<i4", (l2,)),
        ("h1_weights", "i1", (l2, 2 * l1)),
        ("h2_bias", "<i4", (l3,)),
        ("h2_weights", "i1", (l3, l2)),
        ("out_bias", "<i4", (1,)),
        ("out_weights", "i1", (l3,)),
    ]


_HEADER = struct.Struct("<4sI4I")


def _checksum(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def save_nnue(net: NnueNetwork) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, *net.dims)]
    for name, dtype, shape in _layout(net.dims):
        arr = getattr(net, name)
        if arr.shape != shape:
            raise NnueFormatError(f"{name} has shape {arr.shape}, expected {shape}")
        parts.append(np.ascontiguousarray(arr, dtype=dtype).tobytes())
    payload = b"".join(parts)
    return payload + struct.pack("<Q", _checksum(payload))


def load_nnue(data: bytes) -> NnueNetwork:
    if len(data) < _HEADER.size:
        raise BadSizeError(f"file has {len(data)} bytes, shorter than the header")
    magic, version, *dims = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}")
    if dims[0] != NUM_FEATURES or min(dims) <= 0:
        raise BadSizeError(f"unsupported dimensions {dims}")
    layout = _layout(dims)
    expected = _HEADER.size + sum(np.dtype(dt).itemsize * int(np.prod(sh)) for _, dt, sh in layout) + 8
    if len(data) != expected:
        raise BadSizeError(f"file has {len(data)} bytes, dimensions {dims} need {expected}")
    (stored,) = struct.unpack_from("<Q", data, expected - 8)
    if stored != _checksum(data[: expected - 8]):
        raise BadChecksumError("checksum mismatch")
    arrays = {}
    offset = _HEADER.size
    for name, dtype, shape in layout:
        count = int(np.prod(shape))
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=offset).reshape(shape)
        arrays[name] = arr.astype(np.dtype(dtype).newbyteorder("="))
        offset += arr.nbytes
    return NnueNetwork(**arrays)


def random_network(seed: int, l1: int = 256, l2: int = 32, l3: int = 32) -> NnueNetwork:
    """Seeded random weights small enough that int16 sums never wrap."""
    rng = np.random.default_rng(seed)
    return NnueNetwork(
        ft_bias=rng.integers(-64, 65, size=l1, dtype=np.int16),
        ft_weights=rng.integers(-32, 33, size=(NUM_FEATURES, l1), dtype=np.int16),
        h1_bias=rng.integers(-512, 513, size=l2, dtype=np.int32),
        h1_weights=rng.integers(-16, 17, size=(l2, 2 * l1), dtype=np.int8),
        h2_bias=rng.integers(-512, 513, size=l3, dtype=np.int32),
        h2_weights=rng.integers(-32, 33, size=(l3, l2), dtype=np.int8),
        out_bias=rng.integers(-256, 257, size=1, dtype=np.int32),
        out_weights=rng.integers(-64, 65, size=l3, dtype=np.int8),
    )


def zero_network(l1: int = 256, l2: int = 32, l3: int = 32) -> NnueNetwork:
    return NnueNetwork(
        ft_bias=np.zeros(l1, np.int16),
        ft_weights=np.zeros((NUM_FEATURES, l1), np.int16),
        h1_bias=np.zeros(l2, np.int32),
        h1_weights=np.zeros((l2, 2 * l1), np.int8),
        h2_bias=np.zeros(l3, np.int32),
        h2_weights=np.zeros((l3, l2), np.int8),
        out_bias=np.zeros(1, np.int32),
        out_weights=np.zeros(l3, np.int8),
    )


# -- features ----------------------------------------------------------------


def feature_index(perspective: int, king_sq: int, piece_color: int, kind: int, sq: int) -> int:
    """Index of the (own king, piece, square) feature for ``perspective``."""
    if perspective != WHITE:
        king_sq ^= 56
        sq ^= 56
    piece_index = (kind - 1) * 2 + (0 if piece_color == perspective else 1)
    return king_sq * 640 + piece_index * 64 + sq


def active_features(pos: Position, perspective: int) -> list[int]:
    ksq = pos.king_square(perspective)
    out = []
    for sq, code in enumerate(pos.board):
        if code and code & 7 != KING:
            out.append(feature_index(perspective, ksq, code >> 3, code & 7, sq))
    return out


def _sum_columns(net: NnueNetwork, features) -> np.ndarray:
    acc = net.ft_bias.copy()
    if features:
        acc += net.ft_weights[features].sum(axis=0, dtype=np.int16)
    return acc


def nnue_refresh(pos: Position, net: NnueNetwork) -> NnueAccumulator:
    values = np.stack([_sum_columns(net, active_features(pos, c)) for c in (0, 1)])
    return NnueAccumulator(values)


def feature_changes(pos: Position, m: Move):
    """Feature columns a move touches.

    Returns ``(refresh, removed, added)`` where ``refresh[c]`` says perspective
    c must be rebuilt (its king moved) and ``removed[c]`` / ``added[c]`` list
    the column indices to subtract / add otherwise.
    """
    fr, to, promo = m
    code = pos.board[fr]
    us, kind = code >> 3, code & 7
    changes = []  # (color, kind, square, +1/-1)
    if kind != KING:
        changes.append((us, kind, fr, -1))
        changes.append((us, promo or kind, to, +1))
    captured = pos.board[to]
    if captured:
        changes.append((captured >> 3, captured & 7, to, -1))
    elif kind == 1 and to == pos.ep:
        cs = to - 8 if us == WHITE else to + 8
        changes.append((us ^ 1, 1, cs, -1))
    if kind == KING and abs(to - fr) == 2:
        rf, rt = (fr + 3, fr + 1) if to > fr else (fr - 4, fr - 1)
        changes.append((us, 4, rf, -1))
        changes.append((us, 4, rt, +1))
    refresh = [kind == KING and us == c for c in (0, 1)]
    removed: list[list[int]] = [[], []]
    added: list[list[int]] = [[], []]
    for c in (0, 1):
        if refresh[c]:
            continue
        ksq = pos.king_square(c)
        for color, k, sq, sign in changes:
            idx = feature_index(c, ksq, color, k, sq)
            (added if sign > 0 else removed)[c].append(idx)
    return refresh, removed, added


def nnue_apply(acc: NnueAccumulator, pos: Position, m: Move, net: NnueNetwork) -> NnueAccumulator:
    refresh, removed, added = feature_changes(pos, m)
    values = acc.values.copy()
    after = None
    w = net.ft_weights
    for c in (0, 1):
        if refresh[c]:
            if after is None:
                after = make_move(pos, m)
            values[c] = _sum_columns(net, active_features(after, c))
            continue
        row = values[c]
        for idx in removed[c]:
            row -= w[idx]
        for idx in added[c]:
            row += w[idx]
    return NnueAccumulator(values)


# -- inference ---------------------------------------------------------------


def nnue_forward(acc: NnueAccumulator, net: NnueNetwork, stm: int) -> int:
    """Raw integer output for the given side to move."""
    x = np.concatenate([acc.values[stm], acc.values[stm ^ 1]]).astype(np.int64)
    np.clip(x, 0, CRELU_MAX, out=x)
    h = net.h1_weights.astype(np.int64) @ x + net.h1_bias
    h = np.clip(h >> HIDDEN_SHIFT, 0, CRELU_MAX)
    h = net.h2_weights.astype(np.int64) @ h + net.h2_bias
    h = np.clip(h >> HIDDEN_SHIFT, 0, CRELU_MAX)
    return int(net.out_weights.astype(np.int64) @ h + int(net.out_bias[0]))


def nnue_evaluate(acc: NnueAccumulator, net: NnueNetwork, stm: int) -> Score:
    """Centipawns for ``stm``.

    The network sees its inputs ordered (side to move, opponent); swapping
    ``stm`` swaps the halves and reruns the layers. No sign flip is applied:
    the output is always read as the side to move's advantage.
    """
    out = nnue_forward(acc, net, stm)
    cp = out // OUTPUT_SCALE if out >= 0 else -((-out) // OUTPUT_SCALE)
    return Score.cp(max(-MAX_CP + 1, min(MAX_CP - 1, cp)))


class NnueEvaluator:
    """Leaf evaluator that refreshes an accumulator per call."""

    def __init__(self, net: NnueNetwork):
        self.net = net

    def __call__(self, pos: Position) -> int:
        return nnue_evaluate(nnue_refresh(pos, self.net), self.net, pos.stm).value
