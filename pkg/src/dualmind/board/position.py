"""Position representation, legal move generation and move application.

Positions are immutable values. Moves are generated with pin and check
masks so that every emitted move is legal without a make/test step; only en
passant captures get a full king-safety recheck.
"""

from __future__ import annotations

import enum
import random
from typing import NamedTuple, Optional

from .bitboards import (
    BETWEEN,
    BISHOP_RAYS,
    FULL,
    KING_ATTACKS,
    KNIGHT_ATTACKS,
    LINE,
    NOT_FILE_A,
    NOT_FILE_H,
    PAWN_ATTACKS,
    RANK_3,
    RANK_6,
    ROOK_RAYS,
    bishop_attacks,
    lsb,
    rook_attacks,
)

WHITE, BLACK = 0, 1
PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6
PROMOTION_KINDS = (KNIGHT, BISHOP, ROOK, QUEEN)

WHITE_OO, WHITE_OOO, BLACK_OO, BLACK_OOO = 1, 2, 4, 8

PIECE_LETTERS = " PNBRQK"
FILES = "abcdefgh"

# Seed for the Zobrist key generator. Changing it changes every stored hash.
ZOBRIST_SEED = 0x5EED_D0A1


def piece_code(color: int, kind: int) -> int:
    return kind | (color << 3)


def square_name(sq: int) -> str:
    return FILES[sq & 7] + str((sq >> 3) + 1)


def parse_square(text: str) -> int:
    if len(text) != 2 or text[0] not in FILES or text[1] not in "12345678":
        raise ValueError(f"bad square {text!r}")
    return FILES.index(text[0]) + 8 * (int(text[1]) - 1)


class Piece(NamedTuple):
    color: int
    kind: int

    def symbol(self) -> str:
        s = PIECE_LETTERS[self.kind]
        return s if self.color == WHITE else s.lower()

    @classmethod
    def from_symbol(cls, ch: str) -> "Piece":
        kind = PIECE_LETTERS.find(ch.upper())
        if kind <= 0:
            raise ValueError(f"bad piece symbol {ch!r}")
        return cls(WHITE if ch.isupper() else BLACK, kind)


class Move(NamedTuple):
    """A from/to/promotion triple. ``promotion`` is 0 for non-promotions."""

    from_sq: int
    to_sq: int
    promotion: int = 0

    def uci(self) -> str:
        s = square_name(self.from_sq) + square_name(self.to_sq)
        if self.promotion:
            s += PIECE_LETTERS[self.promotion].lower()
        return s

    @classmethod
    def from_uci(cls, text: str) -> "Move":
        if len(text) not in (4, 5):
            raise ValueError(f"bad UCI move {text!r}")
        promo = 0
        if len(text) == 5:
            promo = PIECE_LETTERS.find(text[4].upper())
            if promo not in PROMOTION_KINDS:
                raise ValueError(f"bad promotion in {text!r}")
        frm, to = parse_square(text[:2]), parse_square(text[2:4])
        if frm == to:
            raise ValueError(f"null move {text!r}")
        return cls(frm, to, promo)

    def __str__(self) -> str:
        return self.uci()


class GameResult(enum.Enum):
    ONGOING = "ongoing"
    WHITE_MATES = "white-mates"
    BLACK_MATES = "black-mates"
    STALEMATE = "stalemate"
    DRAW_BY_RULE = "draw-by-rule"


class IllegalMoveError(ValueError):
    pass


def _zobrist_tables():
    rng = random.Random(ZOBRIST_SEED)
    pieces = [[0] * 64 for _ in range(16)]
    for color in (WHITE, BLACK):
        for kind in range(PAWN, KING + 1):
            pieces[piece_code(color, kind)] = [rng.getrandbits(64) for _ in range(64)]
    side = rng.getrandbits(64)
    castle_bits = [rng.getrandbits(64) for _ in range(4)]
    castling = []
    for rights in range(16):
        k = 0
        for i in range(4):
            if rights >> i & 1:
                k ^= castle_bits[i]
        castling.append(k)
    ep = [rng.getrandbits(64) for _ in range(8)]
    return pieces, side, castling, ep


Z_PIECE, Z_SIDE, Z_CASTLE, Z_EP = _zobrist_tables()

# Rights that survive a move touching a square (king or rook home squares).
CASTLE_MASK = [15] * 64
CASTLE_MASK[4] = 15 ^ (WHITE_OO | WHITE_OOO)
CASTLE_MASK[7] = 15 ^ WHITE_OO
CASTLE_MASK[0] = 15 ^ WHITE_OOO
CASTLE_MASK[60] = 15 ^ (BLACK_OO | BLACK_OOO)
CASTLE_MASK[63] = 15 ^ BLACK_OO
CASTLE_MASK[56] = 15 ^ BLACK_OOO

_new_tuple = tuple.__new__


class Position:
    """Complete chess game state.

    ``bb`` holds one bitboard per piece code (``kind | color << 3``), ``occ``
    the per-color occupancy and ``board`` a 64-entry mailbox of piece codes
    (0 = empty). ``ep`` is -1 unless an en passant capture is pseudo-legal.
    Treat instances as read-only.
    """

    __slots__ = ("bb", "occ", "board", "stm", "castling", "ep", "halfmove", "fullmove", "key")

    def __init__(
        self,
        placement: dict[int, Piece],
        stm: int = WHITE,
        castling: int = 0,
        ep: int = -1,
        halfmove: int = 0,
        fullmove: int = 1,
    ):
        self.bb = [0] * 16
        self.occ = [0, 0]
        self.board = [0] * 64
        for sq, piece in placement.items():
            code = piece_code(piece.color, piece.kind)
            self.board[sq] = code
            self.bb[code] |= 1 << sq
            self.occ[piece.color] |= 1 << sq
        self.stm = stm
        self.castling = castling
        self.ep = ep
        self.halfmove = halfmove
        self.fullmove = fullmove
        self.key = compute_key(self)

    # -- queries -----------------------------------------------------------

    def piece_at(self, sq: int) -> Optional[Piece]:
        code = self.board[sq]
        if not code:
            return None
        return Piece(code >> 3, code & 7)

    def pieces(self, color: int, kind: int) -> int:
        return self.bb[piece_code(color, kind)]

    def king_square(self, color: int) -> int:
        return lsb(self.bb[piece_code(color, KING)])

    def placement(self) -> dict[int, Piece]:
        return {sq: Piece(c >> 3, c & 7) for sq, c in enumerate(self.board) if c}

    def is_check(self) -> bool:
        return in_check(self)

    def fen(self) -> str:
        return to_fen(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Position):
            return NotImplemented
        return (
            self.board == other.board
            and self.stm == other.stm
            and self.castling == other.castling
            and self.ep == other.ep
            and self.halfmove == other.halfmove
            and self.fullmove == other.fullmove
        )

    def __hash__(self) -> int:
        return hash((self.key, self.halfmove, self.fullmove))

    def __repr__(self) -> str:
        return f"Position({to_fen(self)!r})"


def compute_key(pos: Position) -> int:
    """Zobrist hash computed from scratch."""
    key = 0
    for sq, code in enumerate(pos.board):
        if code:
            key ^= Z_PIECE[code][sq]
    if pos.stm == BLACK:
        key ^= Z_SIDE
    key ^= Z_CASTLE[pos.castling]
    if pos.ep >= 0:
        key ^= Z_EP[pos.ep & 7]
    return key


def _raw(bb, occ, board, stm, castling, ep, halfmove, fullmove, key) -> Position:
    p = object.__new__(Position)
    p.bb = bb
    p.occ = occ
    p.board = board
    p.stm = stm
    p.castling = castling
    p.ep = ep
    p.halfmove = halfmove
    p.fullmove = fullmove
    p.key = key
    return p


# -- attack queries ----------------------------------------------------------


def is_attacked(pos: Position, sq: int, by: int, occ: Optional[int] = None) -> bool:
    bb = pos.bb
    if occ is None:
        occ = pos.occ[0] | pos.occ[1]
    base = by << 3
    if KNIGHT_ATTACKS[sq] & bb[base | KNIGHT]:
        return True
    if PAWN_ATTACKS[by ^ 1][sq] & bb[base | PAWN]:
        return True
    if KING_ATTACKS[sq] & bb[base | KING]:
        return True
    q = bb[base | QUEEN]
    if bishop_attacks(sq, occ) & (bb[base | BISHOP] | q):
        return True
    return bool(rook_attacks(sq, occ) & (bb[base | ROOK] | q))


def attackers(pos: Position, sq: int, by: int, occ: Optional[int] = None) -> int:
    bb = pos.bb
    if occ is None:
        occ = pos.occ[0] | pos.occ[1]
    base = by << 3
    q = bb[base | QUEEN]
    return (
        (KNIGHT_ATTACKS[sq] & bb[base | KNIGHT])
        | (PAWN_ATTACKS[by ^ 1][sq] & bb[base | PAWN])
        | (KING_ATTACKS[sq] & bb[base | KING])
        | (bishop_attacks(sq, occ) & (bb[base | BISHOP] | q))
        | (rook_attacks(sq, occ) & (bb[base | ROOK] | q))
    )


def in_check(pos: Position) -> bool:
    us = pos.stm
    return is_attacked(pos, lsb(pos.bb[(us << 3) | KING]), us ^ 1)


# -- move generation ---------------------------------------------------------


def generate_moves(pos: Position) -> list[Move]:
    """All legal moves in generation order (unsorted)."""
    bb = pos.bb
    us = pos.stm
    them = us ^ 1
    ub = us << 3
    tb = them << 3
    own = pos.occ[us]
    opp = pos.occ[them]
    occ = own | opp
    ksq = lsb(bb[ub | KING])
    moves: list[Move] = []
    append = moves.append
    new = _new_tuple

    tq = bb[tb | QUEEN]
    t_rq = bb[tb | ROOK] | tq
    t_bq = bb[tb | BISHOP] | tq
    t_n = bb[tb | KNIGHT]
    t_p = bb[tb | PAWN]
    t_k = bb[tb | KING]
    checkers = (
        (KNIGHT_ATTACKS[ksq] & t_n)
        | (PAWN_ATTACKS[us][ksq] & t_p)
        | (bishop_attacks(ksq, occ) & t_bq)
        | (rook_attacks(ksq, occ) & t_rq)
    )

    # King steps: test the destination with the king lifted off the board.
    occ_nok = occ ^ (1 << ksq)
    pawn_att_us = PAWN_ATTACKS[us]
    targets = KING_ATTACKS[ksq] & ~own
    while targets:
        low = targets & -targets
        to = low.bit_length() - 1
        targets ^= low
        if (
            (KNIGHT_ATTACKS[to] & t_n)
            or (pawn_att_us[to] & t_p)
            or (KING_ATTACKS[to] & t_k)
            or (bishop_attacks(to, occ_nok) & t_bq)
            or (rook_attacks(to, occ_nok) & t_rq)
        ):
            continue
        append(new(Move, (ksq, to, 0)))

    if checkers & (checkers - 1):
        return moves

    if checkers:
        target = BETWEEN[ksq][lsb(checkers)] | checkers
    else:
        target = FULL
        rights = pos.castling
        if rights:
            if us == WHITE:
                if rights & WHITE_OO and not occ & 0x60:
                    if not is_attacked(pos, 5, them, occ) and not is_attacked(pos, 6, them, occ):
                        append(new(Move, (4, 6, 0)))
                if rights & WHITE_OOO and not occ & 0x0E:
                    if not is_attacked(pos, 3, them, occ) and not is_attacked(pos, 2, them, occ):
                        append(new(Move, (4, 2, 0)))
            else:
                if rights & BLACK_OO and not occ & (0x60 << 56):
                    if not is_attacked(pos, 61, them, occ) and not is_attacked(pos, 62, them, occ):
                        append(new(Move, (60, 62, 0)))
                if rights & BLACK_OOO and not occ & (0x0E << 56):
                    if not is_attacked(pos, 59, them, occ) and not is_attacked(pos, 58, them, occ):
                        append(new(Move, (60, 58, 0)))

    # Absolute pins.
    pinned = 0
    pin_line = {}
    snipers = (ROOK_RAYS[ksq] & t_rq) | (BISHOP_RAYS[ksq] & t_bq)
    while snipers:
        low = snipers & -snipers
        s = low.bit_length() - 1
        snipers ^= low
        blockers = BETWEEN[ksq][s] & occ
        if blockers and not blockers & (blockers - 1) and blockers & own:
            pinned |= blockers
            pin_line[blockers.bit_length() - 1] = LINE[ksq][s]

    mask = ~own & target

    pieces = bb[ub | KNIGHT] & ~pinned
    while pieces:
        low = pieces & -pieces
        fr = low.bit_length() - 1
        pieces ^= low
        t = KNIGHT_ATTACKS[fr] & mask
        while t:
            lt = t & -t
            append(new(Move, (fr, lt.bit_length() - 1, 0)))
            t ^= lt

    q = bb[ub | QUEEN]
    for kind_bb, diag, orth in ((bb[ub | BISHOP], True, False), (bb[ub | ROOK], False, True), (q, True, True)):
        pieces = kind_bb
        while pieces:
            low = pieces & -pieces
            fr = low.bit_length() - 1
            pieces ^= low
            t = 0
            if diag:
                t = bishop_attacks(fr, occ)
            if orth:
                t |= rook_attacks(fr, occ)
            t &= mask
            if low & pinned:
                t &= pin_line[fr]
            while t:
                lt = t & -t
                append(new(Move, (fr, lt.bit_length() - 1, 0)))
                t ^= lt

    _pawn_moves(pos, moves, us, occ, opp, target, pinned, pin_line)

    ep = pos.ep
    if ep >= 0:
        cap_sq = ep - 8 if us == WHITE else ep + 8
        froms = PAWN_ATTACKS[them][ep] & bb[ub | PAWN]
        while froms:
            low = froms & -froms
            fr = low.bit_length() - 1
            froms ^= low
            occ2 = (occ ^ low ^ (1 << cap_sq)) | (1 << ep)
            if (
                (KNIGHT_ATTACKS[ksq] & t_n)
                or (pawn_att_us[ksq] & (t_p ^ (1 << cap_sq)))
                or (bishop_attacks(ksq, occ2) & t_bq)
                or (rook_attacks(ksq, occ2) & t_rq)
            ):
                continue
            append(new(Move, (fr, ep, 0)))
    return moves


def _pawn_moves(pos, moves, us, occ, opp, target, pinned, pin_line):
    append = moves.append
    new = _new_tuple
    pawns = pos.bb[(us << 3) | PAWN]
    free = pawns & ~pinned
    empty = ~occ & FULL
    if us == WHITE:
        single = (free << 8) & empty
        double = ((single & RANK_3) << 8) & empty & target
        single &= target
        capl = ((free & NOT_FILE_A) << 7) & opp & target
        capr = ((free & NOT_FILE_H) << 9) & opp & target
        step, promo_lo, promo_hi = 8, 56, 64
        dl, dr = 7, 9
    else:
        single = (free >> 8) & empty
        double = ((single & RANK_6) >> 8) & empty & target
        single &= target
        capl = ((free & NOT_FILE_A) >> 9) & opp & target
        capr = ((free & NOT_FILE_H) >> 7) & opp & target
        step, promo_lo, promo_hi = -8, 0, 8
        dl, dr = -9, -7

    for bbm, delta in ((single, step), (capl, dl), (capr, dr)):
        while bbm:
            low = bbm & -bbm
            to = low.bit_length() - 1
            bbm ^= low
            fr = to - delta
            if promo_lo <= to < promo_hi:
                for pk in PROMOTION_KINDS:
                    append(new(Move, (fr, to, pk)))
            else:
                append(new(Move, (fr, to, 0)))
    while double:
        low = double & -double
        to = low.bit_length() - 1
        double ^= low
        append(new(Move, (to - 2 * step, to, 0)))

    stuck = pawns & pinned
    while stuck:
        low = stuck & -stuck
        fr = low.bit_length() - 1
        stuck ^= low
        allowed = pin_line[fr] & target
        to = fr + step
        dests = 0
        if empty >> to & 1:
            dests |= 1 << to
            if (us == WHITE and fr >> 3 == 1) or (us == BLACK and fr >> 3 == 6):
                if empty >> (to + step) & 1:
                    dests |= 1 << (to + step)
        dests |= PAWN_ATTACKS[us][fr] & opp
        dests &= allowed
        while dests:
            lt = dests & -dests
            to = lt.bit_length() - 1
            dests ^= lt
            if promo_lo <= to < promo_hi:
                for pk in PROMOTION_KINDS:
                    append(new(Move, (fr, to, pk)))
            else:
                append(new(Move, (fr, to, 0)))


def legal_moves(pos: Position) -> list[Move]:
    """Legal moves sorted by (from, to, promotion)."""
    moves = generate_moves(pos)
    moves.sort()
    return moves


def is_capture(pos: Position, m: Move) -> bool:
    return bool(pos.board[m.to_sq]) or (m.to_sq == pos.ep and pos.board[m.from_sq] & 7 == PAWN)


# -- move application --------------------------------------------------------


def make_move(pos: Position, m: Move) -> Position:
    """Apply a move known to be legal; no validation."""
    fr, to, promo = m
    board = pos.board[:]
    bb = pos.bb[:]
    occ = pos.occ[:]
    us = pos.stm
    them = us ^ 1
    pc = board[fr]
    cap = board[to]
    key = pos.key ^ Z_SIDE
    if pos.ep >= 0:
        key ^= Z_EP[pos.ep & 7]
    fbit = 1 << fr
    tbit = 1 << to
    halfmove = pos.halfmove + 1
    if cap:
        bb[cap] ^= tbit
        occ[them] ^= tbit
        key ^= Z_PIECE[cap][to]
        halfmove = 0
    bb[pc] ^= fbit | tbit
    occ[us] ^= fbit | tbit
    board[fr] = 0
    board[to] = pc
    zp = Z_PIECE[pc]
    key ^= zp[fr] ^ zp[to]
    new_ep = -1
    kind = pc & 7
    if kind == PAWN:
        halfmove = 0
        if to == pos.ep:
            cs = to - 8 if us == WHITE else to + 8
            cpc = board[cs]
            board[cs] = 0
            bb[cpc] ^= 1 << cs
            occ[them] ^= 1 << cs
            key ^= Z_PIECE[cpc][cs]
        elif to - fr == 16 or fr - to == 16:
            ep_sq = (fr + to) >> 1
            if PAWN_ATTACKS[us][ep_sq] & bb[(them << 3) | PAWN]:
                new_ep = ep_sq
                key ^= Z_EP[ep_sq & 7]
        elif promo:
            npc = promo | (us << 3)
            bb[pc] ^= tbit
            bb[npc] ^= tbit
            board[to] = npc
            key ^= zp[to] ^ Z_PIECE[npc][to]
    elif kind == KING and (to - fr == 2 or fr - to == 2):
        if to > fr:
            rf, rt = fr + 3, fr + 1
        else:
            rf, rt = fr - 4, fr - 1
        rpc = board[rf]
        board[rf] = 0
        board[rt] = rpc
        rbits = (1 << rf) | (1 << rt)
        bb[rpc] ^= rbits
        occ[us] ^= rbits
        key ^= Z_PIECE[rpc][rf] ^ Z_PIECE[rpc][rt]
    castling = pos.castling
    if castling:
        nc = castling & CASTLE_MASK[fr] & CASTLE_MASK[to]
        if nc != castling:
            key ^= Z_CASTLE[castling] ^ Z_CASTLE[nc]
            castling = nc
    return _raw(bb, occ, board, them, castling, new_ep, halfmove, pos.fullmove + us, key)


def apply_move(pos: Position, m: Move) -> Position:
    """Apply ``m`` after checking it is legal in ``pos``."""
    if m not in generate_moves(pos):
        raise IllegalMoveError(f"illegal move {m.uci()} in {to_fen(pos)}")
    return make_move(pos, m)


# -- game end ----------------------------------------------------------------


def insufficient_material(pos: Position) -> bool:
    bb = pos.bb
    heavy = 0
    for color in (WHITE, BLACK):
        base = color << 3
        heavy |= bb[base | PAWN] | bb[base | ROOK] | bb[base | QUEEN]
    if heavy:
        return False
    minors = sum((bb[(c << 3) | k]).bit_count() for c in (WHITE, BLACK) for k in (KNIGHT, BISHOP))
    return minors <= 1


def game_result(pos: Position, history: tuple[int, ...] | list[int] = ()) -> GameResult:
    """Result of ``pos``; ``history`` holds the keys of earlier positions in the game."""
    if not generate_moves(pos):
        if in_check(pos):
            return GameResult.BLACK_MATES if pos.stm == WHITE else GameResult.WHITE_MATES
        return GameResult.STALEMATE
    if pos.halfmove >= 100 or insufficient_material(pos):
        return GameResult.DRAW_BY_RULE
    if history and list(history).count(pos.key) >= 2:
        return GameResult.DRAW_BY_RULE
    return GameResult.ONGOING


def color_flip(pos: Position) -> Position:
    """Mirror the board vertically and swap colors, including side to move."""
    placement = {sq ^ 56: Piece(p.color ^ 1, p.kind) for sq, p in pos.placement().items()}
    c = pos.castling
    castling = ((c & 3) << 2) | ((c >> 2) & 3)
    ep = pos.ep ^ 56 if pos.ep >= 0 else -1
    return Position(placement, pos.stm ^ 1, castling, ep, pos.halfmove, pos.fullmove)


# -- FEN -------------------------------------------------------------------


class FenError(ValueError):
    """Malformed or illegal FEN; ``reason`` names the failed check."""

    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason


STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


def _parse_placement(field: str) -> dict[int, Piece]:
    rows = field.split("/")
    if len(rows) != 8:
        raise FenError("placement", f"expected 8 ranks, got {len(rows)}")
    placement = {}
    for i, row in enumerate(rows):
        rank = 7 - i
        f = 0
        for ch in row:
            if ch.isdigit():
                if ch in "09":
                    raise FenError("placement", f"bad empty count {ch!r}")
                f += int(ch)
            else:
                try:
                    piece = Piece.from_symbol(ch)
                except ValueError:
                    raise FenError("placement", f"bad piece {ch!r}") from None
                if f > 7:
                    raise FenError("placement", f"rank {rank + 1} overflows")
                placement[rank * 8 + f] = piece
                f += 1
        if f != 8:
            raise FenError("placement", f"rank {rank + 1} has {f} files")
    return placement


def _validate_material(placement: dict[int, Piece]) -> None:
    for color, name in ((WHITE, "white"), (BLACK, "black")):
        mine = [(sq, p) for sq, p in placement.items() if p.color == color]
        kings = sum(1 for _, p in mine if p.kind == KING)
        if kings != 1:
            raise FenError("king-count", f"{name} has {kings} kings")
        pawns = [sq for sq, p in mine if p.kind == PAWN]
        if len(pawns) > 8:
            raise FenError("piece-count", f"{name} has {len(pawns)} pawns")
        if len(mine) > 16:
            raise FenError("piece-count", f"{name} has {len(mine)} pieces")
        if any(sq < 8 or sq >= 56 for sq in pawns):
            raise FenError("pawn-rank", f"{name} pawn on first or last rank")


def parse_fen(text: str) -> Position:
    fields = text.split()
    if len(fields) != 6:
        raise FenError("field-count", f"expected 6 fields, got {len(fields)}")
    return _position_from_fields(fields[:4], fields[4], fields[5])


def _position_from_fields(fields, halfmove_text="0", fullmove_text="1") -> Position:
    placement = _parse_placement(fields[0])
    _validate_material(placement)
    if fields[1] not in ("w", "b"):
        raise FenError("side-to-move", f"bad side {fields[1]!r}")
    stm = WHITE if fields[1] == "w" else BLACK

    castling = 0
    if fields[2] != "-":
        for ch in fields[2]:
            bit = {"K": WHITE_OO, "Q": WHITE_OOO, "k": BLACK_OO, "q": BLACK_OOO}.get(ch)
            if bit is None or castling & bit:
                raise FenError("castling", f"bad castling field {fields[2]!r}")
            castling |= bit
    # Drop rights whose king or rook is not on its home square.
    for bit, ksq, rsq, color in (
        (WHITE_OO, 4, 7, WHITE),
        (WHITE_OOO, 4, 0, WHITE),
        (BLACK_OO, 60, 63, BLACK),
        (BLACK_OOO, 60, 56, BLACK),
    ):
        if castling & bit and (
            placement.get(ksq) != Piece(color, KING) or placement.get(rsq) != Piece(color, ROOK)
        ):
            castling &= ~bit

    ep = -1
    if fields[3] != "-":
        try:
            ep = parse_square(fields[3])
        except ValueError:
            raise FenError("en-passant", f"bad square {fields[3]!r}") from None
        if (stm == WHITE and ep >> 3 != 5) or (stm == BLACK and ep >> 3 != 2):
            raise FenError("en-passant", f"square {fields[3]} on wrong rank")
        pusher = ep - 8 if stm == WHITE else ep + 8
        if placement.get(pusher) != Piece(stm ^ 1, PAWN) or ep in placement:
            raise FenError("en-passant", f"no double-pushed pawn for {fields[3]}")

    try:
        halfmove = int(halfmove_text)
        fullmove = int(fullmove_text)
    except ValueError:
        raise FenError("clocks", f"bad clocks {halfmove_text!r} {fullmove_text!r}") from None
    if not 0 <= halfmove <= 150:
        raise FenError("clocks", f"halfmove clock {halfmove} out of range")
    if fullmove < 1:
        raise FenError("clocks", f"fullmove number {fullmove} < 1")

    pos = Position(placement, stm, castling, -1, halfmove, fullmove)
    if is_attacked(pos, pos.king_square(stm ^ 1), stm):
        raise FenError("opponent-in-check", "side not to move is in check")
    if ep >= 0 and PAWN_ATTACKS[stm ^ 1][ep] & pos.bb[piece_code(stm, PAWN)]:
        pos = Position(placement, stm, castling, ep, halfmove, fullmove)
    return pos


def to_fen(pos: Position, clocks: bool = True) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row = ""
        empty = 0
        for f in range(8):
            code = pos.board[rank * 8 + f]
            if not code:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            ch = PIECE_LETTERS[code & 7]
            row += ch if code >> 3 == WHITE else ch.lower()
        if empty:
            row += str(empty)
        rows.append(row)
    rights = "".join(ch for bit, ch in ((1, "K"), (2, "Q"), (4, "k"), (8, "q")) if pos.castling & bit)
    parts = [
        "/".join(rows),
        "w" if pos.stm == WHITE else "b",
        rights or "-",
        square_name(pos.ep) if pos.ep >= 0 else "-",
    ]
    if clocks:
        parts += [str(pos.halfmove), str(pos.fullmove)]
    return " ".join(parts)


def start_position() -> Position:
    return parse_fen(STARTING_FEN)
