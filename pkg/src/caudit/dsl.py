"""Text formats: the model file DSL and the proposition grammar.

Model files::

    # comment
    domain Bit { 0 1 }
    background X : Bit
    dist {                      # or `dist knowledge { ... }`
      X=0 : 1/2
      X=1 : 1/2
    }
    endog Xh : Bit = id(X)
    endog O : Bit = table(Xh) { 0 -> 1  1 -> 0 }
    endog C : Bit = const(0)
    frame { sensitive: X  others: A  randomness: R  output: O }
    dbframe { rows: D1 D2  randomness: R  output: O  bot: value }

Propositions: ``V=v``, ``V!=v``, ``true``, ``false``, ``!``, ``&``, ``|`` and
parentheses, with ``!`` binding tightest and ``|`` loosest.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from caudit.errors import ParseError
from caudit.frames import BOT_IS_VALUE, BOT_MEANS_REMOVED, AnalysisFrame, DatabaseFrame
from caudit.prop import FALSE, TRUE, Proposition, conj, disj, eq, ne, Not
from caudit.scm import (
    BACKGROUND,
    ENDOGENOUS,
    KNOWLEDGE,
    POPULATION,
    BackgroundDist,
    CausalModel,
    Domain,
    ProbCausalModel,
    StructuralEquation,
    Variable,
    validate_model,
)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<ne>!=)
  | (?P<punct>[{}():=,!&|])
  | (?P<word>[^\s{}():=,!&|#]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token("punct" if kind in ("punct", "arrow", "ne") else kind, tok, line, pos - line_start + 1))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Stream:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def ahead(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.peek.kind == "punct" and self.peek.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.peek.text or 'end of input'!r}")
        return self.next()

    def word(self, what: str = "a name") -> Token:
        if self.peek.kind != "word":
            self.error(f"expected {what}, found {self.peek.text or 'end of input'!r}")
        return self.next()


# -- propositions ------------------------------------------------------------


def parse_proposition(text: str) -> Proposition:
    s = _Stream(text)
    p = _prop_or(s)
    if s.peek.kind != "eof":
        s.error(f"unexpected {s.peek.text!r}")
    return p


def _prop_or(s: _Stream) -> Proposition:
    parts = [_prop_and(s)]
    while s.at("|"):
        s.next()
        parts.append(_prop_and(s))
    return disj(*parts)


def _prop_and(s: _Stream) -> Proposition:
    parts = [_prop_not(s)]
    while s.at("&"):
        s.next()
        parts.append(_prop_not(s))
    return conj(*parts)


def _prop_not(s: _Stream) -> Proposition:
    if s.at("!"):
        s.next()
        return Not(_prop_not(s))
    if s.at("("):
        s.next()
        p = _prop_or(s)
        s.expect(")")
        return p
    name = s.word("a proposition")
    if s.at("="):
        s.next()
        return eq(name.text, s.word("a value").text)
    if s.at("!="):
        s.next()
        return ne(name.text, s.word("a value").text)
    if name.text in ("true", "false"):
        return TRUE if name.text == "true" else FALSE
    s.error(f"expected '=' or '!=' after {name.text!r}")


# -- model files -------------------------------------------------------------


@dataclass(frozen=True)
class FrameSpec:
    kind: str  # "frame" or "dbframe"
    sensitive: str | None = None
    others: tuple[str, ...] = ()
    rows: tuple[str, ...] = ()
    randomness: str | None = None
    output: str = "O"
    bot: str = BOT_IS_VALUE


@dataclass(frozen=True)
class ModelDocument:
    pm: ProbCausalModel
    frame_spec: FrameSpec | None

    def frame(self) -> AnalysisFrame | DatabaseFrame:
        spec = self.frame_spec
        if spec is None:
            raise ParseError("model file has no frame or dbframe block")
        if spec.kind == "frame":
            return AnalysisFrame.from_model(self.pm, spec.sensitive, spec.others, spec.randomness, spec.output)
        return DatabaseFrame.from_model(self.pm, spec.rows, spec.randomness, spec.output, spec.bot)


def parse_rational(text: str, tok: Token | None = None) -> Fraction:
    if not re.fullmatch(r"\d+(/\d+)?", text):
        raise ParseError(f"expected a rational p/q or integer, found {text!r}",
                         tok.line if tok else None, tok.col if tok else None)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}", tok.line if tok else None,
                         tok.col if tok else None) from None


class _ModelParser:
    def __init__(self, text: str):
        self.s = _Stream(text)
        self.domains: dict[str, Domain] = {}
        self.variables: list[Variable] = []
        self.equations: dict[str, StructuralEquation] = {}
        self.pending: list[tuple[Token, str, tuple, list, list]] = []
        self.dist_points: list[tuple[Token, dict[str, str], Fraction]] | None = None
        self.dist_kind = POPULATION
        self.frame: FrameSpec | None = None
        self.seen: dict[str, Token] = {}

    def parse(self) -> ModelDocument:
        s = self.s
        while s.peek.kind != "eof":
            kw = s.word("a declaration")
            handler = {"domain": self._domain, "background": self._background, "endog": self._endog,
                       "dist": self._dist, "frame": self._frame, "dbframe": self._dbframe}.get(kw.text)
            if handler is None:
                s.error(f"unknown declaration {kw.text!r}", kw)
            handler(kw)
        return self._build()

    def _domain_ref(self) -> Domain:
        t = self.s.word("a domain name")
        if t.text not in self.domains:
            self.s.error(f"unknown domain {t.text!r}", t)
        return self.domains[t.text]

    def _new_var(self, t: Token, role: str, dom: Domain):
        if t.text in self.seen:
            self.s.error(f"variable {t.text!r} declared twice", t)
        self.seen[t.text] = t
        self.variables.append(Variable(t.text, role, dom))

    def _domain(self, kw):
        s = self.s
        name = s.word("a domain name")
        if name.text in self.domains:
            s.error(f"domain {name.text!r} declared twice", name)
        s.expect("{")
        values = []
        while not s.at("}"):
            t = s.word("a value")
            if t.text in values:
                s.error(f"value {t.text!r} repeated in domain {name.text!r}", t)
            values.append(t.text)
        s.expect("}")
        if not values:
            s.error(f"domain {name.text!r} is empty", name)
        self.domains[name.text] = Domain(name.text, tuple(values))

    def _background(self, kw):
        t = self.s.word("a variable name")
        self.s.expect(":")
        self._new_var(t, BACKGROUND, self._domain_ref())

    def _endog(self, kw):
        s = self.s
        t = s.word("a variable name")
        s.expect(":")
        dom = self._domain_ref()
        self._new_var(t, ENDOGENOUS, dom)
        s.expect("=")
        form = s.word("table, id or const")
        s.expect("(")
        if form.text == "id":
            src = s.word("a variable name")
            s.expect(")")
            self.pending.append((t, "id", (src.text,), [], []))
        elif form.text == "const":
            val = s.word("a value")
            s.expect(")")
            self.equations[t.text] = StructuralEquation.constant(t.text, val.text)
        elif form.text == "table":
            parents = []
            while not s.at(")"):
                parents.append(s.word("a parent name").text)
                if s.at(","):
                    s.next()
            s.expect(")")
            s.expect("{")
            rows = []
            while not s.at("}"):
                start = s.peek
                key = []
                while not s.at("->"):
                    key.append(s.word("a parent value or '->'").text)
                s.expect("->")
                out = s.word("an output value").text
                if len(key) != len(parents):
                    s.error(f"row has {len(key)} values for {len(parents)} parents", start)
                rows.append((start, tuple(key), out))
            s.expect("}")
            self.pending.append((t, "table", tuple(parents), rows, []))
        else:
            s.error(f"expected table, id or const, found {form.text!r}", form)

    def _dist(self, kw):
        s = self.s
        if self.dist_points is not None:
            s.error("dist declared twice", kw)
        if s.peek.kind == "word":
            k = s.next()
            if k.text not in (KNOWLEDGE, POPULATION):
                s.error(f"unknown distribution kind {k.text!r}", k)
            self.dist_kind = k.text
        s.expect("{")
        points = []
        while not s.at("}"):
            start = s.peek
            assignment: dict[str, str] = {}
            while not s.at(":"):
                var = s.word("VAR=value or ':'")
                s.expect("=")
                val = s.word("a value")
                if var.text in assignment:
                    s.error(f"{var.text!r} assigned twice in one support point", var)
                assignment[var.text] = val.text
            s.expect(":")
            pt = s.word("a probability")
            points.append((start, assignment, parse_rational(pt.text, pt)))
        s.expect("}")
        self.dist_points = points

    def _frame_block(self, kw, keys: dict[str, bool]) -> dict[str, list[str]]:
        """Parse ``{ key: names ... }``; ``keys`` maps allowed keys to whether they take a list."""
        s = self.s
        if self.frame is not None:
            s.error("only one frame or dbframe block is allowed", kw)
        s.expect("{")
        got: dict[str, list[str]] = {}
        while not s.at("}"):
            k = s.word("a frame key")
            if k.text not in keys:
                s.error(f"unknown frame key {k.text!r}", k)
            if k.text in got:
                s.error(f"frame key {k.text!r} repeated", k)
            s.expect(":")
            vals = []
            while s.peek.kind == "word" and not (s.ahead().kind == "punct" and s.ahead().text == ":"):
                vals.append(s.next().text)
            if not keys[k.text] and len(vals) != 1:
                s.error(f"frame key {k.text!r} takes exactly one name", k)
            got[k.text] = vals
        s.expect("}")
        return got

    def _frame(self, kw):
        got = self._frame_block(kw, {"sensitive": False, "others": True, "randomness": False, "output": False})
        if "sensitive" not in got:
            self.s.error("frame needs a sensitive: entry", kw)
        self.frame = FrameSpec("frame", sensitive=got["sensitive"][0], others=tuple(got.get("others", [])),
                               randomness=got["randomness"][0] if "randomness" in got else None,
                               output=got["output"][0] if "output" in got else "O")

    def _dbframe(self, kw):
        got = self._frame_block(kw, {"rows": True, "randomness": False, "output": False, "bot": False})
        if not got.get("rows"):
            self.s.error("dbframe needs a rows: entry", kw)
        bot = got["bot"][0] if "bot" in got else BOT_IS_VALUE
        if bot not in (BOT_IS_VALUE, BOT_MEANS_REMOVED):
            self.s.error(f"bot must be {BOT_IS_VALUE} or {BOT_MEANS_REMOVED}, found {bot!r}", kw)
        self.frame = FrameSpec("dbframe", rows=tuple(got["rows"]),
                               randomness=got["randomness"][0] if "randomness" in got else None,
                               output=got["output"][0] if "output" in got else "O", bot=bot)

    def _build(self) -> ModelDocument:
        doms = {v.id: v.domain for v in self.variables}
        for t, form, parents, rows, _ in self.pending:
            for p in parents:
                if p not in doms:
                    raise ParseError(f"unknown variable {p!r} in equation for {t.text!r}", t.line, t.col)
            if form == "id":
                self.equations[t.text] = StructuralEquation.identity(t.text, parents[0], doms[parents[0]])
                continue
            table = {}
            for start, key, out in rows:
                if key in table:
                    raise ParseError(f"row {' '.join(key)} repeated in table for {t.text!r}", start.line, start.col)
                table[key] = out
            self.equations[t.text] = StructuralEquation(t.text, parents, table)
        model = validate_model(CausalModel(tuple(self.variables), self.equations))
        if self.dist_points is None:
            raise ParseError("model file has no dist block")
        bg = model.background
        for start, assignment, _ in self.dist_points:
            if set(assignment) != set(bg):
                raise ParseError(f"support point must assign exactly {list(bg)}", start.line, start.col)
        dist = BackgroundDist.from_points([(a, p) for _, a, p in self.dist_points], bg, self.dist_kind)
        return ModelDocument(ProbCausalModel(model, dist), self.frame)


def parse_document(text: str) -> ModelDocument:
    return _ModelParser(text).parse()


def parse_model(text: str) -> AnalysisFrame | DatabaseFrame:
    """Parse a model file that declares a frame or dbframe."""
    return parse_document(text).frame()


def load(path) -> ModelDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


# -- printing ----------------------------------------------------------------


def _frac(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _equation_text(m: CausalModel, vid: str) -> str:
    e = m.equations[vid]
    if e.is_constant():
        return f"const({e.table[()]})"
    if len(e.parents) == 1 and e.is_identity_on(e.parents[0]) and m.domain(vid) == m.domain(e.parents[0]):
        return f"id({e.parents[0]})"
    lines = [f"table({', '.join(e.parents)}) {{"]
    for key in itertools.product(*(m.domain(p).values for p in e.parents)):
        lines.append(f"  {' '.join(key)} -> {e.table[key]}".rstrip() if key else f"  -> {e.table[key]}")
    lines.append("}")
    return "\n".join(lines)


def print_model(pm: ProbCausalModel, frame: AnalysisFrame | DatabaseFrame | FrameSpec | None = None) -> str:
    """Normal form: domains in first-use order, variables in declaration order, then dist, then frame."""
    m = pm.model
    out = []
    seen = []
    for v in m.variables:
        if v.domain.name not in seen:
            seen.append(v.domain.name)
            out.append(f"domain {v.domain.name} {{ {' '.join(v.domain.values)} }}")
    out.append("")
    for v in m.variables:
        if v.role == BACKGROUND:
            out.append(f"background {v.id} : {v.domain.name}")
        else:
            out.append(f"endog {v.id} : {v.domain.name} = {_equation_text(m, v.id)}")
    out.append("")
    kind = " knowledge" if pm.dist.kind == KNOWLEDGE else ""
    out.append(f"dist{kind} {{")
    for assignment, p in pm.dist.items():
        out.append("  " + " ".join(f"{k}={v}" for k, v in assignment.items()) + f" : {_frac(p)}")
    out.append("}")
    spec = frame_spec_of(frame) if frame is not None and not isinstance(frame, FrameSpec) else frame
    if spec is not None:
        out.append("")
        out.append(_frame_text(spec))
    return "\n".join(out) + "\n"


def frame_spec_of(f: AnalysisFrame | DatabaseFrame) -> FrameSpec:
    if isinstance(f, AnalysisFrame):
        return FrameSpec("frame", sensitive=f.sensitive_bg, others=f.other_bg, randomness=f.randomness,
                         output=f.output)
    return FrameSpec("dbframe", rows=f.rows_bg, randomness=f.randomness, output=f.output, bot=f.bot_mode)


def _frame_text(spec: FrameSpec) -> str:
    if spec.kind == "frame":
        parts = [f"sensitive: {spec.sensitive}"]
        if spec.others:
            parts.append(f"others: {' '.join(spec.others)}")
    else:
        parts = [f"rows: {' '.join(spec.rows)}"]
    if spec.randomness:
        parts.append(f"randomness: {spec.randomness}")
    parts.append(f"output: {spec.output}")
    if spec.kind == "dbframe":
        parts.append(f"bot: {spec.bot}")
    return f"{spec.kind} {{ {'  '.join(parts)} }}"


def print_document(doc: ModelDocument) -> str:
    return print_model(doc.pm, doc.frame_spec)
