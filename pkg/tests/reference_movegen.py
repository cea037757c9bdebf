"""Independent 0x88 mailbox move generator used as a test oracle.

Shares no code with the package: it parses FEN itself, generates
pseudo-legal moves by ray walking and filters them by checking whether the
mover's king is attacked after the move.
"""

from __future__ import annotations

KNIGHT = (33, 31, 18, 14, -33, -31, -18, -14)
KING = (1, -1, 16, -16, 17, 15, -17, -15)
ROOK = (1, -1, 16, -16)
BISHOP = (17, 15, -17, -15)


def sq88(name: str) -> int:
    return (int(name[1]) - 1) * 16 + "abcdefgh".index(name[0])


def name88(s: int) -> str:
    return "abcdefgh"[s & 7] + str((s >> 4) + 1)


class Board:
    def __init__(self, fen: str):
        parts = fen.split()
        self.sq = [None] * 128
        rank = 7
        file = 0
        for ch in parts[0]:
            if ch == "/":
                rank -= 1
                file = 0
            elif ch.isdigit():
                file += int(ch)
            else:
                self.sq[rank * 16 + file] = ch
                file += 1
        self.white = parts[1] == "w"
        self.castle = "" if parts[2] == "-" else parts[2]
        self.ep = None if parts[3] == "-" else sq88(parts[3])

    def copy(self) -> "Board":
        b = Board.__new__(Board)
        b.sq = self.sq[:]
        b.white = self.white
        b.castle = self.castle
        b.ep = self.ep
        return b

    @staticmethod
    def is_white(p: str) -> bool:
        return p.isupper()

    def attacked(self, s: int, by_white: bool) -> bool:
        sq = self.sq
        pawn = "P" if by_white else "p"
        for d in ((-15, -17) if by_white else (15, 17)):
            t = s + d
            if not t & 0x88 and sq[t] == pawn:
                return True
        for dirs, pieces, slide in (
            (KNIGHT, "N", False),
            (KING, "K", False),
            (ROOK, "RQ", True),
            (BISHOP, "BQ", True),
        ):
            wanted = pieces if by_white else pieces.lower()
            for d in dirs:
                t = s + d
                while not t & 0x88:
                    p = sq[t]
                    if p is not None:
                        if p in wanted:
                            return True
                        break
                    if not slide:
                        break
                    t += d
        return False

    def king(self, white: bool) -> int:
        k = "K" if white else "k"
        for s in range(128):
            if not s & 0x88 and self.sq[s] == k:
                return s
        raise ValueError("no king")

    def pseudo(self):
        out = []
        sq = self.sq
        w = self.white
        for s in range(128):
            if s & 0x88:
                continue
            p = sq[s]
            if p is None or self.is_white(p) != w:
                continue
            kind = p.upper()
            if kind == "P":
                fwd = 16 if w else -16
                start = 1 if w else 6
                last = 7 if w else 0
                t = s + fwd
                if not t & 0x88 and sq[t] is None:
                    self._pawn_add(out, s, t, last)
                    t2 = t + fwd
                    if (s >> 4) == start and sq[t2] is None:
                        out.append((s, t2, ""))
                for d in (fwd + 1, fwd - 1):
                    t = s + d
                    if t & 0x88:
                        continue
                    q = sq[t]
                    if q is not None and self.is_white(q) != w:
                        self._pawn_add(out, s, t, last)
                    elif t == self.ep:
                        out.append((s, t, ""))
                continue
            dirs, slide = {
                "N": (KNIGHT, False),
                "K": (KING, False),
                "R": (ROOK, True),
                "B": (BISHOP, True),
                "Q": (ROOK + BISHOP, True),
            }[kind]
            for d in dirs:
                t = s + d
                while not t & 0x88:
                    q = sq[t]
                    if q is not None and self.is_white(q) == w:
                        break
                    out.append((s, t, ""))
                    if q is not None or not slide:
                        break
                    t += d
            if kind == "K":
                self._castles(out, s)
        return out

    def _pawn_add(self, out, s, t, last):
        if (t >> 4) == last:
            for pr in "qrbn":
                out.append((s, t, pr))
        else:
            out.append((s, t, ""))

    def _castles(self, out, s):
        w = self.white
        home = sq88("e1") if w else sq88("e8")
        if s != home or self.attacked(s, not w):
            return
        rook = "R" if w else "r"
        for flag, empty, through, rsq, to in (
            ("K", (1, 2), (1, 2), 3, 2),
            ("Q", (-1, -2, -3), (-1, -2), -4, -2),
        ):
            f = flag if w else flag.lower()
            if f not in self.castle or self.sq[s + rsq] != rook:
                continue
            if any(self.sq[s + e] is not None for e in empty):
                continue
            if any(self.attacked(s + e, not w) for e in through):
                continue
            out.append((s, s + to, ""))

    def play(self, m) -> "Board":
        s, t, pr = m
        b = self.copy()
        sq = b.sq
        p = sq[s]
        kind = p.upper()
        w = self.white
        if kind == "P" and t == self.ep:
            sq[t + (-16 if w else 16)] = None
        sq[t] = (pr.upper() if w else pr) if pr else p
        sq[s] = None
        if kind == "K" and abs(t - s) == 2:
            if t > s:
                sq[s + 1], sq[s + 3] = sq[s + 3], None
            else:
                sq[s - 1], sq[s - 4] = sq[s - 4], None
        b.ep = (s + t) // 2 if kind == "P" and abs(t - s) == 32 else None
        lost = set()
        for corner, flags in ((sq88("a1"), "Q"), (sq88("h1"), "K"), (sq88("a8"), "q"), (sq88("h8"), "k")):
            if s == corner or t == corner:
                lost.add(flags)
        if p == "K":
            lost |= {"K", "Q"}
        if p == "k":
            lost |= {"k", "q"}
        b.castle = "".join(c for c in b.castle if c not in lost)
        b.white = not w
        return b

    def legal(self):
        out = []
        for m in self.pseudo():
            nb = self.play(m)
            if not nb.attacked(nb.king(self.white), not self.white):
                out.append(m)
        return out

    def legal_uci(self) -> list[str]:
        return sorted(name88(s) + name88(t) + pr for s, t, pr in self.legal())


def perft(b: Board, depth: int) -> int:
    if depth == 0:
        return 1
    moves = b.legal()
    if depth == 1:
        return len(moves)
    return sum(perft(b.play(m), depth - 1) for m in moves)


def reference_perft(fen: str, depth: int) -> int:
    return perft(Board(fen), depth)


def reference_moves(fen: str) -> list[str]:
    return Board(fen).legal_uci()
