"""Chess rules core: positions, move generation, notation."""

from .notation import (
    AmbiguousMoveError,
    EpdError,
    SanError,
    parse_epd,
    parse_line,
    parse_san,
    parse_uci_move,
    san,
    san_line,
    to_epd,
)
from .perft import divide, perft
from .position import (
    BISHOP,
    BLACK,
    KING,
    KNIGHT,
    PAWN,
    QUEEN,
    ROOK,
    STARTING_FEN,
    WHITE,
    FenError,
    GameResult,
    IllegalMoveError,
    Move,
    Piece,
    Position,
    apply_move,
    color_flip,
    compute_key,
    game_result,
    generate_moves,
    in_check,
    insufficient_material,
    is_attacked,
    is_capture,
    legal_moves,
    make_move,
    parse_fen,
    parse_square,
    square_name,
    start_position,
    to_fen,
)

# Studied positions used across the package.
PLASKETT_FEN = "8/3P3k/n2K3p/2p3n1/1b4N1/2p1p1P1/8/3B4 w - - 0 1"
PLASKETT_H8_FEN = "7n/3P3k/n2K3p/2p5/1b4N1/2p1p1P1/8/3B4 w - - 0 1"
PLASKETT_E5_FEN = "8/3P3k/n2K3p/2p1n3/1b4N1/2p1p1P1/8/3B4 w - - 0 1"

# The mating line against the flawed original, with Black's 4...Nf7+ choice.
PLASKETT_MATE_LINE = (
    "1.Nf6+ Kg7 2.Nh5+ Kg6 3.Bc2+! Kxh5 4.d8=Q Nf7+ 5.Ke6 Nxd8+ 6.Kf5 e2 "
    "7.Be4 e1=N! 8.Bd5! c2 9.Bc4 c1=N! 10.Bb5 Nc7 11.Ba4! Ne2 12.Bd1 Nf3 "
    "13.Bxe2 Nce6 14.Bxf3#"
)
