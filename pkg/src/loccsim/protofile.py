"""Line-oriented protocol files.

One directive per line, ``#`` starts a comment.  A document declares the
register (one ``state`` line, then any number of ``attach`` lines extending
it with fresh sites), the steps, and finally the success target:

    state w 0.4 0.4 0.2 0 parties A B C
    attach epr parties B C
    step measure party C site 3 basis Z accept 0
    step cnot party B control 2 target 4
    step measure party B site 4 basis Z accept *
    target ghz-lu sites 1 2 5

Sites are numbered in order of declaration starting from 1.  Numeric fields
accept fractions (``1/3``) and are parsed exactly before float conversion.
Structural problems raise ParseError (line, column); a document that parses
but violates ownership, normalization, or arity raises SemanticError (line).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    ConstraintViolation,
    DegenerateState,
    ParseError,
    SemanticError,
)
from .protocol import CNOT, Measure, Protocol, Step, Target, Teleport, Unitary
from .states import PureState, Register, epr, ghz, ghz_class, tensor, w_family

# family name -> (numeric parameter count, site count)
_FAMILIES = {"w": (4, 3), "ghz": (0, 3), "epr": (0, 2), "ghzclass": (5, 3)}


def _tokenize(line: str) -> list[tuple[str, int]]:
    """(token, 1-based column) pairs; comments already stripped."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


class _Cursor:
    """Token stream for one line with positioned errors."""

    def __init__(self, tokens: list[tuple[str, int]], line_no: int):
        self.tokens = tokens
        self.line_no = line_no
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.tokens)

    def fail(self, message: str, col: int | None = None) -> "ParseError":
        if col is None:
            col = self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
        return ParseError(message, line=self.line_no, column=col)

    def take(self, what: str) -> tuple[str, int]:
        if self.done():
            raise self.fail(f"expected {what}, line ended")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def keyword(self, word: str) -> None:
        tok, col = self.take(f"keyword {word!r}")
        if tok != word:
            raise ParseError(f"expected {word!r}, got {tok!r}", line=self.line_no, column=col)

    def number(self, what: str) -> float:
        tok, col = self.take(what)
        try:
            return float(Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise ParseError(
                f"bad number {tok!r} for {what}", line=self.line_no, column=col
            ) from None

    def site(self, what: str) -> int:
        tok, col = self.take(what)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(
                f"bad site label {tok!r} for {what}", line=self.line_no, column=col
            ) from None

    def end(self) -> None:
        if not self.done():
            tok, col = self.tokens[self.pos]
            raise ParseError(f"unexpected trailing token {tok!r}", line=self.line_no, column=col)


def _parse_state_clause(cur: _Cursor) -> tuple[str, list[float], list[str]]:
    kind, col = cur.take("state family")
    if kind not in _FAMILIES:
        raise ParseError(
            f"unknown state family {kind!r} (choose from {sorted(_FAMILIES)})",
            line=cur.line_no,
            column=col,
        )
    n_params, n_sites = _FAMILIES[kind]
    params = [cur.number(f"{kind} parameter {i + 1}") for i in range(n_params)]
    cur.keyword("parties")
    parties = [cur.take(f"party label {i + 1}")[0] for i in range(n_sites)]
    cur.end()
    return kind, params, parties


def _family_state(kind: str, params: list[float], reg: Register, line_no: int) -> PureState:
    try:
        if kind == "w":
            return w_family(*params, reg)
        if kind == "ghz":
            return ghz(reg)
        if kind == "epr":
            return epr(reg)
        return ghz_class(*params, reg)
    except (ConstraintViolation, DegenerateState) as exc:
        raise SemanticError(str(exc), line=line_no) from exc


def _build_state(
    kind: str, params: list[float], parties: list[str], first_site: int, line_no: int
) -> PureState:
    n_sites = _FAMILIES[kind][1]
    reg = Register(tuple(range(first_site, first_site + n_sites)), tuple(parties))
    return _family_state(kind, params, reg, line_no)


def parse_protocol_file(text: str, name: str = "protocol-file") -> tuple[PureState, Protocol]:
    """Parse a protocol document into its input state and protocol."""
    state: PureState | None = None
    steps: list[Step] = []
    target: Target | None = None
    steps_started = False
    # ownership and liveness mirror of the step sequence
    owner: dict[int, str] = {}
    live: list[int] = []

    def semantic(msg: str, line_no: int) -> SemanticError:
        return SemanticError(msg, line=line_no)

    def known_party(p: str, line_no: int) -> None:
        if p not in set(owner.values()):
            raise semantic(f"unknown party {p!r}", line_no)

    def live_site(n: int, what: str, line_no: int) -> None:
        if n not in owner:
            raise semantic(f"{what} {n} was never declared", line_no)
        if n not in live:
            raise semantic(f"{what} {n} is no longer available", line_no)

    def owned(n: int, p: str, line_no: int) -> None:
        if owner[n] != p:
            raise semantic(f"site {n} is held by {owner[n]!r}, not {p!r}", line_no)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokenize(line)
        if not tokens:
            continue
        if target is not None:
            raise ParseError("directives after target", line=line_no, column=tokens[0][1])
        cur = _Cursor(tokens, line_no)
        directive, col = cur.take("directive")

        if directive == "state":
            if state is not None:
                raise ParseError(
                    "state already declared (use attach to extend)", line=line_no, column=col
                )
            kind, params, parties = _parse_state_clause(cur)
            state = _build_state(kind, params, parties, 1, line_no)

        elif directive == "attach":
            if state is None:
                raise ParseError("attach before state", line=line_no, column=col)
            if steps_started:
                raise ParseError("attach must precede steps", line=line_no, column=col)
            kind, params, parties = _parse_state_clause(cur)
            part = _build_state(kind, params, parties, state.n_sites + 1, line_no)
            state = tensor(state, part)

        elif directive == "step":
            if state is None:
                raise ParseError("step before state", line=line_no, column=col)
            if not steps_started:
                owner = dict(zip(state.register.sites, state.register.parties))
                live = list(state.register.sites)
                steps_started = True
            kind, kcol = cur.take("step kind")
            if kind == "measure":
                cur.keyword("party")
                party = cur.take("party label")[0]
                cur.keyword("site")
                site = cur.site("measured site")
                cur.keyword("basis")
                basis, bcol = cur.take("basis name")
                if basis not in ("Z", "X"):
                    raise ParseError(
                        f"basis must be Z or X, got {basis!r}", line=line_no, column=bcol
                    )
                accept = "*"
                if not cur.done():
                    cur.keyword("accept")
                    accept, acol = cur.take("accept token")
                    if accept not in ("0", "1", "*"):
                        raise ParseError(
                            f"accept must be 0, 1 or *, got {accept!r}",
                            line=line_no,
                            column=acol,
                        )
                cur.end()
                known_party(party, line_no)
                live_site(site, "site", line_no)
                owned(site, party, line_no)
                steps.append(Measure(party, site, basis, accept))
                live.remove(site)
            elif kind == "cnot":
                cur.keyword("party")
                party = cur.take("party label")[0]
                cur.keyword("control")
                control = cur.site("control site")
                cur.keyword("target")
                tgt = cur.site("target site")
                cur.end()
                known_party(party, line_no)
                live_site(control, "control site", line_no)
                live_site(tgt, "target site", line_no)
                if control == tgt:
                    raise semantic("control and target must differ", line_no)
                owned(control, party, line_no)
                owned(tgt, party, line_no)
                steps.append(Unitary(party, (control, tgt), CNOT))
            elif kind == "teleport":
                cur.keyword("source")
                source = cur.site("source site")
                cur.keyword("via")
                near = cur.site("near pair site")
                far = cur.site("far pair site")
                cur.end()
                for x, what in ((source, "source site"), (near, "pair site"), (far, "pair site")):
                    live_site(x, what, line_no)
                if len({source, near, far}) != 3:
                    raise semantic("teleport sites must be distinct", line_no)
                if owner[source] != owner[near]:
                    raise semantic(
                        f"source is held by {owner[source]!r} but the near pair site "
                        f"by {owner[near]!r}",
                        line_no,
                    )
                steps.append(Teleport(source, near, far))
                live.remove(source)
                live.remove(near)
            else:
                raise ParseError(
                    f"unknown step kind {kind!r} (measure, cnot or teleport)",
                    line=line_no,
                    column=kcol,
                )

        elif directive == "target":
            if state is None:
                raise ParseError("target before state", line=line_no, column=col)
            if not steps_started:
                owner = dict(zip(state.register.sites, state.register.parties))
                live = list(state.register.sites)
                steps_started = True
            mode, mcol = cur.take("target mode")
            if mode == "ghz-lu":
                cur.keyword("sites")
                trio = tuple(cur.site(f"target site {i + 1}") for i in range(3))
                cur.end()
                if len(set(trio)) != 3:
                    raise semantic("ghz-lu target sites must be distinct", line_no)
                for x in trio:
                    live_site(x, "target site", line_no)
                target = Target("ghz-lu", sites=trio)
            elif mode == "exact":
                kind, params, parties = _parse_state_clause(cur)
                survivors = tuple(x for x in state.register.sites if x in live)
                n_sites = _FAMILIES[kind][1]
                if len(survivors) != n_sites:
                    raise semantic(
                        f"exact {kind} target needs {n_sites} sites but the steps "
                        f"leave {len(survivors)}",
                        line_no,
                    )
                got = tuple(owner[x] for x in survivors)
                if got != tuple(parties):
                    raise semantic(
                        f"target parties {tuple(parties)} do not match the surviving "
                        f"register {got}",
                        line_no,
                    )
                final = _family_state(kind, params, Register(survivors, got), line_no)
                target = Target("exact", state=final)
            else:
                raise ParseError(
                    f"unknown target mode {mode!r} (ghz-lu or exact)",
                    line=line_no,
                    column=mcol,
                )

        else:
            raise ParseError(f"unknown directive {directive!r}", line=line_no, column=col)

    if state is None:
        raise ParseError("missing state")
    if target is None:
        raise ParseError("missing target")
    return state, Protocol(tuple(steps), target, name=name)
