"""Sorted term and formula language for the reasoning engine.

Terms are variables, constants, or function applications; every term
carries its sort.  Formulas are s-expression-shaped: atoms, the boolean
connectives, sorted quantifiers, and modal applications (knows,
believes, desires, intends, perceives, obligated).  The obligated
operator always carries a situation term; three-argument surface forms
are normalized by the parser.

A Signature owns the sort hierarchy and the declared symbols.  The
built-in sorts, the event-calculus symbols, and the defined predicates
Prevents/Block are pre-declared in every signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union


class SortError(Exception):
    """A term or formula violates the sort discipline."""


# ---------------------------------------------------------------------------
# Sorts

AGENT = "Agent"
MOMENT = "Moment"
ACTION_TYPE = "ActionType"
ACTION = "Action"
EVENT = "Event"
FLUENT = "Fluent"
BOOLEAN = "Boolean"
GOAL = "Goal"
SITUATION = "Situation"

# sort name -> direct supersorts
BUILTIN_SORTS: dict[str, tuple[str, ...]] = {
    AGENT: (),
    MOMENT: (),
    ACTION_TYPE: (),
    EVENT: (),
    ACTION: (EVENT,),
    FLUENT: (),
    BOOLEAN: (),
    GOAL: (EVENT, FLUENT),
    SITUATION: (),
}

SIGMA_DEFAULT = "sigma_default"


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True, slots=True)
class Const:
    name: str
    sort: str


@dataclass(frozen=True, slots=True)
class App:
    fn: str
    args: tuple["Term", ...]
    sort: str


Term = Union[Var, Const, App]


def moment(n: int) -> Const:
    """Moment literals are non-negative integer constants."""
    if n < 0:
        raise SortError(f"moments are non-negative, got {n}")
    return Const(str(n), MOMENT)


def is_moment_literal(t: Term) -> bool:
    return isinstance(t, Const) and t.sort == MOMENT and t.name.isdigit()


def moment_value(t: Term) -> int:
    if not is_moment_literal(t):
        raise SortError(f"not a moment literal: {print_term(t)}")
    return int(t.name)


# ---------------------------------------------------------------------------
# Formulas

KNOWS = "knows"
BELIEVES = "believes"
DESIRES = "desires"
INTENDS = "intends"
PERCEIVES = "perceives"
OBLIGATED = "obligated"

MODAL_OPS = (KNOWS, BELIEVES, DESIRES, INTENDS, PERCEIVES, OBLIGATED)
EPISTEMIC_OPS = (KNOWS, BELIEVES)

CONNECTIVES = ("not", "and", "or", "implies", "iff")
QUANTIFIERS = ("forall", "exists")
RESERVED_WORDS = frozenset(CONNECTIVES + QUANTIFIERS + MODAL_OPS)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("And requires at least two parts; use conj()")


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 2:
            raise ValueError("Or requires at least two parts; use disj()")


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Modal:
    """Modal application.  situation is present iff op == obligated."""

    op: str
    agent: Term
    time: Term
    body: "Formula"
    situation: Optional[Term] = None

    def __post_init__(self) -> None:
        if self.op not in MODAL_OPS:
            raise ValueError(f"unknown modal operator {self.op!r}")
        if (self.situation is not None) != (self.op == OBLIGATED):
            raise ValueError("situation term is for obligated only, and required there")


Formula = Union[Atom, Not, And, Or, Implies, Iff, Forall, Exists, Modal]

FALSUM = Atom("false")


def conj(parts: list[Formula] | tuple[Formula, ...]) -> Formula:
    """N-ary conjunction; singletons collapse to the formula itself."""
    parts = tuple(parts)
    if not parts:
        raise ValueError("empty conjunction")
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disj(parts: list[Formula] | tuple[Formula, ...]) -> Formula:
    parts = tuple(parts)
    if not parts:
        raise ValueError("empty disjunction")
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def obligated(agent: Term, time: Term, situation: Term, body: Formula) -> Modal:
    return Modal(OBLIGATED, agent, time, body, situation)


# ---------------------------------------------------------------------------
# Printing (canonical text form)


def print_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    inner = " ".join(print_term(a) for a in t.args)
    return f"({t.fn} {inner})" if inner else f"({t.fn})"


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f"({f.pred})"
        return f"({f.pred} {' '.join(print_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"(not {print_formula(f.body)})"
    if isinstance(f, And):
        return f"(and {' '.join(print_formula(p) for p in f.parts)})"
    if isinstance(f, Or):
        return f"(or {' '.join(print_formula(p) for p in f.parts)})"
    if isinstance(f, Implies):
        return f"(implies {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Iff):
        return f"(iff {print_formula(f.left)} {print_formula(f.right)})"
    if isinstance(f, Forall):
        return f"(forall {f.var.name} : {f.var.sort} {print_formula(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var.name} : {f.var.sort} {print_formula(f.body)})"
    if isinstance(f, Modal):
        head = f"({f.op} {print_term(f.agent)} {print_term(f.time)}"
        if f.op == OBLIGATED:
            head += f" {print_term(f.situation)}"
        return f"{head} {print_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Traversal


def term_vars(t: Term, acc: list[Var]) -> None:
    if isinstance(t, Var):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, App):
        for a in t.args:
            term_vars(a, acc)


def formula_terms(f: Formula) -> Iterator[Term]:
    """Top-level terms of f, in left-to-right order (not recursive into terms)."""
    if isinstance(f, Atom):
        yield from f.args
    elif isinstance(f, Not):
        yield from formula_terms(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from formula_terms(p)
    elif isinstance(f, (Implies, Iff)):
        yield from formula_terms(f.left)
        yield from formula_terms(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from formula_terms(f.body)
    elif isinstance(f, Modal):
        yield f.agent
        yield f.time
        if f.situation is not None:
            yield f.situation
        yield from formula_terms(f.body)


def free_vars(f: Formula) -> tuple[Var, ...]:
    """Free variables in first-occurrence order."""

    out: list[Var] = []

    def walk(g: Formula, bound: frozenset[Var]) -> None:
        if isinstance(g, Atom):
            acc: list[Var] = []
            for t in g.args:
                term_vars(t, acc)
            for v in acc:
                if v not in bound and v not in out:
                    out.append(v)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p, bound)
        elif isinstance(g, (Implies, Iff)):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body, bound | {g.var})
        elif isinstance(g, Modal):
            acc = []
            term_vars(g.agent, acc)
            term_vars(g.time, acc)
            if g.situation is not None:
                term_vars(g.situation, acc)
            for v in acc:
                if v not in bound and v not in out:
                    out.append(v)
            walk(g.body, bound)

    walk(f, frozenset())
    return tuple(out)


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas including f itself, pre-order."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from subformulas(p)
    elif isinstance(f, (Implies, Iff)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Forall, Exists, Modal)):
        yield from subformulas(f.body)


def maximal_modal_subformulas(f: Formula) -> list[Formula]:
    """Outermost modal subformulas in left-to-right order, no descent inside."""

    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if isinstance(g, Modal):
            out.append(g)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p)
        elif isinstance(g, (Implies, Iff)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body)

    walk(f)
    return out


def constants_in_term(t: Term, acc: list[Const]) -> None:
    if isinstance(t, Const):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, App):
        for a in t.args:
            constants_in_term(a, acc)


def constants_in_formula(f: Formula) -> list[Const]:
    acc: list[Const] = []
    for g in subformulas(f):
        if isinstance(g, Atom):
            for t in g.args:
                constants_in_term(t, acc)
        elif isinstance(g, Modal):
            constants_in_term(g.agent, acc)
            constants_in_term(g.time, acc)
            if g.situation is not None:
                constants_in_term(g.situation, acc)
    return acc


# ---------------------------------------------------------------------------
# Substitution and alpha-equivalence


def substitute_term(t: Term, mapping: Mapping[Var, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, App):
        return App(t.fn, tuple(substitute_term(a, mapping) for a in t.args), t.sort)
    return t


def _names_in_term(t: Term, acc: set[str]) -> None:
    if isinstance(t, (Var, Const)):
        acc.add(t.name)
    else:
        for a in t.args:
            _names_in_term(a, acc)


def substitute(
    f: Formula,
    mapping: Mapping[Var, Term],
    sig: Optional["Signature"] = None,
) -> Formula:
    """Capture-avoiding substitution of free variables.

    Each replacement term's sort must widen to the variable's sort
    (exact match when no signature is supplied).
    """
    for v, t in mapping.items():
        ok = sig.widens(t.sort, v.sort) if sig is not None else t.sort == v.sort
        if not ok:
            raise SortError(
                f"cannot bind {v.name} : {v.sort} to {print_term(t)} : {t.sort}"
            )

    # names occurring in replacement terms; bound vars clashing get renamed
    taken: set[str] = set()
    for t in mapping.values():
        _names_in_term(t, taken)

    def fresh(name: str, avoid: set[str]) -> str:
        cand = name
        while cand in avoid:
            cand += "'"
        return cand

    def walk(g: Formula, m: dict[Var, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(substitute_term(t, m) for t in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body, m))
        if isinstance(g, And):
            return And(tuple(walk(p, m) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p, m) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left, m), walk(g.right, m))
        if isinstance(g, Iff):
            return Iff(walk(g.left, m), walk(g.right, m))
        if isinstance(g, (Forall, Exists)):
            v = g.var
            inner = {k: t for k, t in m.items() if k != v}
            if not inner:
                return g
            if v.name in taken:
                # rename the binder away from capture
                body_names = {w.name for w in free_vars(g.body)}
                nv = Var(fresh(v.name, taken | body_names), v.sort)
                body = walk(g.body, {v: nv})
                body = walk(body, inner)
                return type(g)(nv, body)
            return type(g)(v, walk(g.body, inner))
        if isinstance(g, Modal):
            return Modal(
                g.op,
                substitute_term(g.agent, m),
                substitute_term(g.time, m),
                walk(g.body, m),
                None if g.situation is None else substitute_term(g.situation, m),
            )
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, dict(mapping))


def alpha_normal(f: Formula) -> Formula:
    """Rename bound variables to b0, b1, ... in binder order."""

    counter = [0]

    def walk(g: Formula, ren: dict[Var, Term]) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(substitute_term(t, ren) for t in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body, ren))
        if isinstance(g, And):
            return And(tuple(walk(p, ren) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p, ren) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left, ren), walk(g.right, ren))
        if isinstance(g, Iff):
            return Iff(walk(g.left, ren), walk(g.right, ren))
        if isinstance(g, (Forall, Exists)):
            nv = Var(f"b{counter[0]}", g.var.sort)
            counter[0] += 1
            inner = dict(ren)
            inner[g.var] = nv
            return type(g)(nv, walk(g.body, inner))
        if isinstance(g, Modal):
            return Modal(
                g.op,
                substitute_term(g.agent, ren),
                substitute_term(g.time, ren),
                walk(g.body, ren),
                None if g.situation is None else substitute_term(g.situation, ren),
            )
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, {})


def canonical_key(f: Formula) -> str:
    """Alpha-equivalence key: canonical print of the alpha-normal form."""
    return print_formula(alpha_normal(f))


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return alpha_normal(f) == alpha_normal(g)


# ---------------------------------------------------------------------------
# Signature


@dataclass
class Signature:
    """Declared sorts, constants, functions, and predicates.

    The built-in sorts and the event-calculus symbols are always
    present.  Moment literals (non-negative integers) never need
    declaration.
    """

    sorts: dict[str, tuple[str, ...]] = field(default_factory=dict)
    constants: dict[str, str] = field(default_factory=dict)
    functions: dict[str, tuple[tuple[str, ...], str]] = field(default_factory=dict)
    predicates: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, parents in BUILTIN_SORTS.items():
            self.sorts.setdefault(name, parents)
        self.constants.setdefault(SIGMA_DEFAULT, SITUATION)
        self.functions.setdefault("action", ((AGENT, ACTION_TYPE), ACTION))
        for name, argsorts in (
            ("holds", (FLUENT, MOMENT)),
            ("happens", (EVENT, MOMENT)),
            ("prior", (MOMENT, MOMENT)),
            ("initiates", (EVENT, FLUENT, MOMENT)),
            ("terminates", (EVENT, FLUENT, MOMENT)),
            ("Prevents", (AGENT, AGENT, GOAL, ACTION_TYPE, MOMENT)),
            ("Block", (AGENT, AGENT, GOAL, ACTION_TYPE, MOMENT)),
            ("innocent", (AGENT,)),
            ("false", ()),
        ):
            self.predicates.setdefault(name, argsorts)

    # -- declarations ------------------------------------------------------

    def declare_sort(self, name: str, parents: tuple[str, ...] = ()) -> None:
        if name in self.sorts:
            raise SortError(f"sort {name} already declared")
        for p in parents:
            if p not in self.sorts:
                raise SortError(f"unknown parent sort {p} for {name}")
        self.sorts[name] = parents

    def declare_constant(self, name: str, sort: str) -> None:
        self._check_symbol(name)
        if sort not in self.sorts:
            raise SortError(f"unknown sort {sort} for constant {name}")
        self.constants[name] = sort

    def declare_function(self, name: str, argsorts: tuple[str, ...], result: str) -> None:
        self._check_symbol(name)
        for s in argsorts + (result,):
            if s not in self.sorts:
                raise SortError(f"unknown sort {s} in function {name}")
        self.functions[name] = (argsorts, result)

    def declare_predicate(self, name: str, argsorts: tuple[str, ...]) -> None:
        self._check_symbol(name)
        for s in argsorts:
            if s not in self.sorts:
                raise SortError(f"unknown sort {s} in predicate {name}")
        self.predicates[name] = argsorts

    def _check_symbol(self, name: str) -> None:
        if name in RESERVED_WORDS:
            raise SortError(f"{name} is a reserved word")
        if name in self.constants or name in self.functions or name in self.predicates:
            raise SortError(f"symbol {name} already declared")

    # -- lookups -----------------------------------------------------------

    def widens(self, sub: str, sup: str) -> bool:
        """True when sort sub is sup or a transitive subsort of it."""
        if sub == sup:
            return True
        seen = set()
        stack = list(self.sorts.get(sub, ()))
        while stack:
            s = stack.pop()
            if s == sup:
                return True
            if s not in seen:
                seen.add(s)
                stack.extend(self.sorts.get(s, ()))
        return False

    def constant(self, name: str) -> Const:
        if name.isdigit():
            return Const(name, MOMENT)
        if name not in self.constants:
            raise SortError(f"unknown constant {name}")
        return Const(name, self.constants[name])

    def constants_of_sort(self, sort: str) -> list[Const]:
        """Declared constants whose sort widens to the given sort, name order."""
        out = [
            Const(n, s)
            for n, s in sorted(self.constants.items())
            if self.widens(s, sort)
        ]
        return out

    # -- validation --------------------------------------------------------

    def check_term(self, t: Term) -> None:
        if isinstance(t, Const):
            if is_moment_literal(t):
                return
            declared = self.constants.get(t.name)
            if declared is None:
                # fresh internal constants (witnesses) are permitted as long
                # as their sort exists
                if t.sort not in self.sorts:
                    raise SortError(f"unknown sort {t.sort} on constant {t.name}")
                return
            if declared != t.sort:
                raise SortError(
                    f"constant {t.name} declared {declared}, used as {t.sort}"
                )
        elif isinstance(t, Var):
            if t.sort not in self.sorts:
                raise SortError(f"unknown sort {t.sort} on variable {t.name}")
        elif isinstance(t, App):
            if t.fn not in self.functions:
                raise SortError(f"unknown function {t.fn}")
            argsorts, result = self.functions[t.fn]
            if len(argsorts) != len(t.args):
                raise SortError(
                    f"function {t.fn} takes {len(argsorts)} arguments, got {len(t.args)}"
                )
            if result != t.sort:
                raise SortError(f"function {t.fn} returns {result}, used as {t.sort}")
            for a, s in zip(t.args, argsorts):
                self.check_term(a)
                if not self.widens(a.sort, s):
                    raise SortError(
                        f"argument {print_term(a)} : {a.sort} does not widen to {s} in {t.fn}"
                    )

    def check_formula(self, f: Formula) -> None:
        """Raise SortError when f is not well-sorted against this signature."""
        if isinstance(f, Atom):
            if f.pred == "=":
                if len(f.args) != 2:
                    raise SortError("= takes exactly two arguments")
                for a in f.args:
                    self.check_term(a)
                l, r = f.args
                if not (self.widens(l.sort, r.sort) or self.widens(r.sort, l.sort)):
                    raise SortError(
                        f"incomparable sorts in equality: {l.sort} vs {r.sort}"
                    )
                return
            if f.pred not in self.predicates:
                raise SortError(f"unknown predicate {f.pred}")
            argsorts = self.predicates[f.pred]
            if len(argsorts) != len(f.args):
                raise SortError(
                    f"predicate {f.pred} takes {len(argsorts)} arguments, got {len(f.args)}"
                )
            for a, s in zip(f.args, argsorts):
                self.check_term(a)
                if not self.widens(a.sort, s):
                    raise SortError(
                        f"argument {print_term(a)} : {a.sort} does not widen to {s} in {f.pred}"
                    )
        elif isinstance(f, Not):
            self.check_formula(f.body)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                self.check_formula(p)
        elif isinstance(f, (Implies, Iff)):
            self.check_formula(f.left)
            self.check_formula(f.right)
        elif isinstance(f, (Forall, Exists)):
            if f.var.sort not in self.sorts:
                raise SortError(f"unknown sort {f.var.sort} on binder {f.var.name}")
            self.check_formula(f.body)
        elif isinstance(f, Modal):
            self.check_term(f.agent)
            if not self.widens(f.agent.sort, AGENT):
                raise SortError(f"{f.op} needs an Agent first argument")
            self.check_term(f.time)
            if not self.widens(f.time.sort, MOMENT):
                raise SortError(f"{f.op} needs a Moment second argument")
            if f.situation is not None:
                self.check_term(f.situation)
            self.check_formula(f.body)
        else:
            raise TypeError(f"not a formula: {f!r}")
