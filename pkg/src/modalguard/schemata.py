"""Modal inference schemata and the expansion fixpoint.

Four schema families over the epistemic operators:

  S1  knows(a,t,p) derives p                      (veridicality)
  S2  knows(a,t,p) derives believes(a,t,p)
  S3  M(a,t,(implies p q)) and M(a,t,p) derive M(a,t,q)  for M in {knows, believes}
  S4  M(a,t,(and p1 .. pn)) derives each M(a,t,pi), and the n premises
      M(a,t,pi) derive M(a,t,(and p1 .. pn)) when that conjunction is a
      join target (a conjunction-bodied modal subformula occurring in the
      problem; unrestricted joining would not terminate)

Desire, intention, perception, and obligation formulas are inert facts.
Expansion is a least fixpoint truncated at a derivation depth: an
assumption sits at depth 0 and a derived formula at one more than its
deepest premise.  Formulas are identified up to alpha-equivalence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .syntax import (
    And,
    BELIEVES,
    EPISTEMIC_OPS,
    Formula,
    Implies,
    KNOWS,
    Modal,
    canonical_key,
    maximal_modal_subformulas,
    print_term,
    subformulas,
)

RULE_ASSUMPTION = "assumption"
RULE_S1 = "S1"
RULE_S2 = "S2"
RULE_S3 = "S3"
RULE_S4_SPLIT = "S4-split"
RULE_S4_JOIN = "S4-join"


@dataclass(frozen=True)
class Derivation:
    formula: Formula
    rule: str
    premises: tuple[str, ...]  # canonical keys of premise formulas
    depth: int


class Expansion:
    """Result of expand_modal: formulas keyed by alpha-equivalence."""

    def __init__(self) -> None:
        self.records: dict[str, Derivation] = {}

    def __contains__(self, f: Formula) -> bool:
        return canonical_key(f) in self.records

    def formulas(self) -> list[Formula]:
        return [d.formula for d in self.records.values()]

    def derived(self) -> list[Formula]:
        return [d.formula for d in self.records.values() if d.rule != RULE_ASSUMPTION]

    def chain(self, f: Formula) -> list[Derivation]:
        """Derivations needed to reach f, premises before conclusions."""
        key = canonical_key(f)
        if key not in self.records:
            raise KeyError(f"formula not in expansion: {key}")
        out: list[Derivation] = []
        seen: set[str] = set()

        def visit(k: str) -> None:
            if k in seen:
                return
            seen.add(k)
            rec = self.records[k]
            for p in rec.premises:
                visit(p)
            out.append(rec)

        visit(key)
        return out


def harvest_join_targets(formulas: Iterable[Formula]) -> list[Modal]:
    """Conjunction-bodied epistemic subformulas anywhere in the given set."""
    out: list[Modal] = []
    seen: set[str] = set()
    for f in formulas:
        for g in subformulas(f):
            if (
                isinstance(g, Modal)
                and g.op in EPISTEMIC_OPS
                and isinstance(g.body, And)
            ):
                k = canonical_key(g)
                if k not in seen:
                    seen.add(k)
                    out.append(g)
    return out


def _modal_key(m: Modal) -> tuple[str, str, str]:
    return (m.op, print_term(m.agent), print_term(m.time))


def expand_modal(
    assumptions: Sequence[Formula],
    depth: int,
    join_targets: Optional[Sequence[Modal]] = None,
) -> Expansion:
    """Close the assumption set under S1-S4 up to the given depth."""
    exp = Expansion()
    if join_targets is None:
        join_targets = harvest_join_targets(assumptions)

    # join target bookkeeping: target key -> (target, list of part keys)
    targets: dict[str, tuple[Modal, tuple[str, ...]]] = {}
    for tgt in join_targets:
        parts = tuple(
            canonical_key(Modal(tgt.op, tgt.agent, tgt.time, p)) for p in tgt.body.parts
        )
        targets.setdefault(canonical_key(tgt), (tgt, parts))

    # index: (op, agent, time) -> {body key -> formula key} for S3 lookups
    by_context: dict[tuple[str, str, str], dict[str, str]] = {}
    queue: deque[str] = deque()

    def add(f: Formula, rule: str, premises: tuple[str, ...], d: int) -> None:
        key = canonical_key(f)
        if key in exp.records or d > depth:
            return
        exp.records[key] = Derivation(f, rule, premises, d)
        queue.append(key)

    for a in assumptions:
        add(a, RULE_ASSUMPTION, (), 0)

    while queue:
        key = queue.popleft()
        rec = exp.records[key]
        f = rec.formula
        if not isinstance(f, Modal):
            continue
        d = rec.depth
        if f.op == KNOWS:
            add(f.body, RULE_S1, (key,), d + 1)
            add(Modal(BELIEVES, f.agent, f.time, f.body), RULE_S2, (key,), d + 1)
        if f.op in EPISTEMIC_OPS:
            ctx = _modal_key(f)
            peers = by_context.setdefault(ctx, {})
            body_key = canonical_key(f.body)
            if body_key not in peers:
                peers[body_key] = key

            # S3 with f as the implication premise
            if isinstance(f.body, Implies):
                ante = canonical_key(f.body.left)
                if ante in peers:
                    other = peers[ante]
                    add(
                        Modal(f.op, f.agent, f.time, f.body.right),
                        RULE_S3,
                        (key, other),
                        max(d, exp.records[other].depth) + 1,
                    )
            # S3 with f as the antecedent premise
            for bk, fk in list(peers.items()):
                peer = exp.records[fk].formula
                if isinstance(peer.body, Implies):
                    if canonical_key(peer.body.left) == body_key:
                        add(
                            Modal(f.op, f.agent, f.time, peer.body.right),
                            RULE_S3,
                            (fk, key),
                            max(d, exp.records[fk].depth) + 1,
                        )
            # S4 split
            if isinstance(f.body, And):
                for p in f.body.parts:
                    add(Modal(f.op, f.agent, f.time, p), RULE_S4_SPLIT, (key,), d + 1)
            # S4 join toward targets
            for tkey, (tgt, part_keys) in targets.items():
                if tkey in exp.records:
                    continue
                if _modal_key(tgt) != ctx:
                    continue
                if key not in part_keys:
                    continue
                if all(pk in exp.records for pk in part_keys):
                    add(
                        tgt,
                        RULE_S4_JOIN,
                        part_keys,
                        max(exp.records[pk].depth for pk in part_keys) + 1,
                    )
    return exp
