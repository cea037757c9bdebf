"""SAN, UCI long algebraic and EPD text formats."""

from __future__ import annotations

import re
import shlex

from .position import (
    KING,
    PAWN,
    PIECE_LETTERS,
    FenError,
    IllegalMoveError,
    Move,
    Position,
    _position_from_fields,
    generate_moves,
    in_check,
    is_capture,
    make_move,
    square_name,
    to_fen,
)


class SanError(ValueError):
    pass


class AmbiguousMoveError(SanError):
    pass


class EpdError(ValueError):
    pass


def san(pos: Position, m: Move, moves: list[Move] | None = None) -> str:
    """Standard algebraic notation for a legal move, with +/# suffix."""
    if moves is None:
        moves = generate_moves(pos)
    code = pos.board[m.from_sq]
    kind = code & 7
    if kind == KING and abs(m.to_sq - m.from_sq) == 2:
        text = "O-O" if m.to_sq > m.from_sq else "O-O-O"
    elif kind == PAWN:
        text = ""
        if is_capture(pos, m):
            text = square_name(m.from_sq)[0] + "x"
        text += square_name(m.to_sq)
        if m.promotion:
            text += "=" + PIECE_LETTERS[m.promotion]
    else:
        text = PIECE_LETTERS[kind]
        rivals = [
            o.from_sq
            for o in moves
            if o.to_sq == m.to_sq and o.from_sq != m.from_sq and pos.board[o.from_sq] == code
        ]
        if rivals:
            same_file = any((r & 7) == (m.from_sq & 7) for r in rivals)
            same_rank = any((r >> 3) == (m.from_sq >> 3) for r in rivals)
            name = square_name(m.from_sq)
            if not same_file:
                text += name[0]
            elif not same_rank:
                text += name[1]
            else:
                text += name
        if is_capture(pos, m):
            text += "x"
        text += square_name(m.to_sq)
    after = make_move(pos, m)
    if in_check(after):
        text += "#" if not generate_moves(after) else "+"
    return text


_SAN_RE = re.compile(
    r"^(?P<piece>[NBRQK])?(?P<file>[a-h])?(?P<rank>[1-8])?(?P<capture>x)?"
    r"(?P<to>[a-h][1-8])(?:=?(?P<promo>[NBRQ]))?(?P<suffix>[+#])?$"
)
_CASTLE_RE = re.compile(r"^(?P<side>O-O-O|O-O|0-0-0|0-0)(?P<suffix>[+#])?$")


def parse_san(pos: Position, text: str) -> Move:
    """Resolve a SAN token to the unique matching legal move.

    Move annotations (``!``, ``?``) are ignored. A ``+`` or ``#`` suffix must
    agree with the resulting position.
    """
    token = text.strip().rstrip("!?")
    moves = generate_moves(pos)
    castle = _CASTLE_RE.match(token)
    if castle:
        long_side = castle["side"] in ("O-O-O", "0-0-0")
        ksq = pos.king_square(pos.stm)
        to = ksq - 2 if long_side else ksq + 2
        candidates = [m for m in moves if m.from_sq == ksq and m.to_sq == to]
        suffix = castle["suffix"]
    else:
        mt = _SAN_RE.match(token)
        if not mt:
            raise SanError(f"unparseable SAN {text!r}")
        kind = PIECE_LETTERS.index(mt["piece"]) if mt["piece"] else PAWN
        to_name = mt["to"]
        promo = PIECE_LETTERS.index(mt["promo"]) if mt["promo"] else 0
        candidates = []
        for m in moves:
            if pos.board[m.from_sq] & 7 != kind or square_name(m.to_sq) != to_name:
                continue
            if m.promotion != promo:
                continue
            name = square_name(m.from_sq)
            if mt["file"] and name[0] != mt["file"]:
                continue
            if mt["rank"] and name[1] != mt["rank"]:
                continue
            if kind == KING and abs(m.to_sq - m.from_sq) == 2:
                continue
            if mt["capture"] and not is_capture(pos, m):
                continue
            # A bare pawn move like "e4" never means a capture.
            if kind == PAWN and not mt["file"] and is_capture(pos, m):
                continue
            candidates.append(m)
        suffix = mt["suffix"]
    if not candidates:
        raise SanError(f"no legal move matches {text!r} in {to_fen(pos)}")
    if len(candidates) > 1:
        raise AmbiguousMoveError(f"{text!r} is ambiguous in {to_fen(pos)}")
    m = candidates[0]
    if suffix:
        after = make_move(pos, m)
        checking = in_check(after)
        mate = checking and not generate_moves(after)
        if suffix == "+" and not checking:
            raise SanError(f"{text!r} claims check but {m.uci()} does not give check")
        if suffix == "#" and not mate:
            raise SanError(f"{text!r} claims mate but {m.uci()} does not mate")
    return m


def parse_uci_move(pos: Position, text: str) -> Move:
    m = Move.from_uci(text.strip())
    if m not in generate_moves(pos):
        raise IllegalMoveError(f"illegal move {text} in {to_fen(pos)}")
    return m


_MOVE_NUMBER = re.compile(r"^\d+\.+")
_RESULTS = {"1-0", "0-1", "1/2-1/2", "*"}


def parse_line(pos: Position, text: str) -> list[Move]:
    """Parse a SAN move sequence such as ``"1.Nf6+ Kg7 2.Nh5+"`` from ``pos``."""
    moves = []
    for raw in text.split():
        token = _MOVE_NUMBER.sub("", raw)
        if not token or token in _RESULTS:
            continue
        m = parse_san(pos, token)
        moves.append(m)
        pos = make_move(pos, m)
    return moves


def san_line(pos: Position, moves: list[Move]) -> str:
    """Render moves as numbered SAN, e.g. ``"1.Nf6+ Kg7 2.Nh5+"``."""
    parts = []
    for i, m in enumerate(moves):
        text = san(pos, m)
        if pos.stm == 0:
            text = f"{pos.fullmove}.{text}"
        elif i == 0:
            text = f"{pos.fullmove}...{text}"
        parts.append(text)
        pos = make_move(pos, m)
    return " ".join(parts)


# -- EPD ---------------------------------------------------------------------

_OPCODE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]{0,14}$")


def _split_operations(text: str) -> list[str]:
    ops = []
    buf = []
    quoted = False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == ";" and not quoted:
            ops.append("".join(buf).strip())
            buf = []
            continue
        buf.append(ch)
    if quoted:
        raise EpdError("unterminated string operand")
    if "".join(buf).strip():
        raise EpdError(f"operation not terminated by ';': {''.join(buf).strip()!r}")
    return ops


def parse_epd(line: str) -> tuple[Position, dict]:
    """Parse an EPD record into a position and its operations.

    ``bm`` becomes a list of moves, ``dm`` an int, ``id`` a string, ``hmvc`` and
    ``fmvn`` set the clocks; any other opcode keeps its raw operand text.
    """
    parts = line.strip().split(None, 4)
    if len(parts) < 4:
        raise EpdError(f"expected 4 position fields, got {len(parts)}")
    rest = parts[4] if len(parts) == 5 else ""
    ops: dict = {}
    raw_ops = []
    for op in _split_operations(rest):
        if not op:
            raise EpdError("empty operation")
        name, _, operand = op.partition(" ")
        if not _OPCODE_RE.match(name):
            raise EpdError(f"bad opcode {name!r}")
        if name in ops or name in dict(raw_ops):
            raise EpdError(f"duplicate opcode {name!r}")
        raw_ops.append((name, operand.strip()))
    clocks = dict(raw_ops)
    try:
        pos = _position_from_fields(parts[:4], clocks.get("hmvc", "0"), clocks.get("fmvn", "1"))
    except FenError as exc:
        raise EpdError(f"bad position: {exc}") from exc
    for name, operand in raw_ops:
        if name in ("bm", "am"):
            if not operand:
                raise EpdError(f"{name} needs at least one move")
            try:
                ops[name] = [parse_san(pos, tok) for tok in operand.split()]
            except SanError as exc:
                raise EpdError(f"{name}: {exc}") from exc
        elif name == "dm":
            try:
                ops[name] = int(operand)
            except ValueError:
                raise EpdError(f"dm operand {operand!r} is not an integer") from None
        elif name == "id":
            try:
                tokens = shlex.split(operand)
            except ValueError as exc:
                raise EpdError(f"bad id operand {operand!r}") from exc
            if len(tokens) != 1:
                raise EpdError(f"id takes one string operand, got {operand!r}")
            ops[name] = tokens[0]
        elif name in ("hmvc", "fmvn"):
            continue
        else:
            ops[name] = operand
    return pos, ops


def to_epd(pos: Position, ops: dict) -> str:
    fields = [to_fen(pos, clocks=False)]
    for name, value in ops.items():
        if name in ("bm", "am"):
            operand = " ".join(san(pos, m) for m in value)
        elif name == "id":
            operand = f'"{value}"'
        else:
            operand = str(value)
        fields.append(f"{name} {operand};")
    return " ".join(fields)
