"""Shared machinery for the test suite.

Two independent cross-checks live here so several test modules can use
them:

* a seeded random discourse generator biased toward resolvable inputs
  (zeros need antecedents, so most entities are hearer-old and the first
  utterance is mostly overt), used for engine/oracle equivalence and
  property sweeps;

* an invariant walker that re-derives, from first principles and the
  oracle's naive helpers, everything a finished hypothesis claims:
  center uniqueness, Cf composition and ordering, the backward-center
  constraint, the pronoun rule, zero-topic soundness, score arithmetic
  and beam ordering.  It returns human-readable failure strings instead
  of asserting so callers can aggregate across many discourses.
"""

from __future__ import annotations

import random
from typing import List, Optional

from centering import engine, oracle
from centering.engine import EngineConfig, ResolveResult
from centering.model import (
    Argument,
    Discourse,
    Entity,
    GrammaticalRole,
    Hypothesis,
    Marking,
    Realization,
    SalienceRole,
    SortalConstraint,
    Transition,
    Utterance,
    VerbFrame,
)

ROLE_ORDER = [
    GrammaticalRole.SUBJ,
    GrammaticalRole.OBJ2,
    GrammaticalRole.OBJ,
    GrammaticalRole.OTHER,
]


# --------------------------------------------------------------------------
# Random discourse generation


def random_discourse(rng: random.Random) -> Discourse:
    """A small random discourse, biased toward resolvable readings.

    The bias keeps the equivalence sweep informative: most entities are
    hearer-old (zeros need recoverable antecedents), overt fillers of
    animate-only slots are drawn from the animate entities, zeros prefer
    the subject slot (an object zero that picks up an old entity forces
    the pronoun rule to reject the reading when the center is overt),
    and the discourse-initial utterance is mostly overt.  Unresolvable
    discourses still occur in around a third of draws, which keeps the
    error-path agreement between engine and oracle under test.
    """
    n_entities = rng.randint(2, 3) if rng.random() < 0.25 else 3
    entities = tuple(
        Entity(
            f"e{i}",
            animate=rng.random() < 0.75,
            hearer_old=rng.random() < 0.95,
            definite=rng.random() < 0.9,
        )
        for i in range(n_entities)
    )
    ids = [e.id for e in entities]
    animate_ids = [e.id for e in entities if e.animate]

    utterances = []
    for k in range(rng.randint(2, 4)):
        subcat = tuple(r for r in ROLE_ORDER if rng.random() < 0.6)[:3]
        if not subcat:
            subcat = (GrammaticalRole.SUBJ,)
        sortal = {r: SortalConstraint.ANIMATE for r in subcat if rng.random() < 0.15}
        empathy = rng.choice(subcat) if rng.random() < 0.25 else None
        frame = VerbFrame(f"v{k}", subcat, sortal, empathy)

        args = []
        zeros = 0
        used: set[str] = set()
        for role in subcat:
            if k == 0:
                zero_rate = 0.1
            elif role is GrammaticalRole.SUBJ:
                zero_rate = 0.6
            else:
                zero_rate = 0.3
            if zeros < 2 and rng.random() < zero_rate:
                args.append(Argument(role, Marking.NONE, Realization.zero()))
                zeros += 1
            else:
                base = animate_ids if role in sortal else ids
                pool = [i for i in base if i not in used] or base or ids
                eid = rng.choice(pool)
                used.add(eid)
                args.append(Argument(role, Marking.NONE, Realization.overt(eid)))
        overt_slots = [i for i, a in enumerate(args) if not a.realization.is_zero]
        if overt_slots and rng.random() < 0.25:
            i = rng.choice(overt_slots)
            args[i] = Argument(args[i].role, Marking.WA, args[i].realization)
        others = tuple(
            eid for eid in ids if rng.random() < 0.1 and eid not in used
        )
        utterances.append(Utterance(k + 1, frame, tuple(args), others, f"u{k + 1}"))
    return Discourse(entities, tuple(utterances))


# --------------------------------------------------------------------------
# Independent transition truth table


def expected_transition(
    prev_cb: Optional[str], cb: str, cp: str
) -> Transition:
    """The four-way transition split, written out plainly."""
    carried = prev_cb is None or prev_cb == cb
    if carried and cb == cp:
        return Transition.CONTINUE
    if carried:
        return Transition.RETAIN
    if cb == cp:
        return Transition.SMOOTH_SHIFT
    return Transition.ROUGH_SHIFT


# --------------------------------------------------------------------------
# Invariant walker


def _check_step_composition(
    discourse: Discourse, hyp: Hypothesis, k: int, label: str, failures: List[str]
) -> None:
    """Structural facts about one step: assignment shape, Cf contents."""
    step = hyp.steps[k]
    utt = discourse.utterances[k]

    if tuple(step.assignment) != utt.frame.subcat:
        failures.append(f"{label}: assignment keys differ from subcat")
        return
    for arg in utt.args:
        if not arg.realization.is_zero:
            if step.assignment[arg.role] != arg.realization.entity_id:
                failures.append(f"{label}: overt slot {arg.role.name} rebound")

    values = list(step.assignment.values())
    if len(set(values)) != len(values):
        failures.append(f"{label}: two slots bound to one entity")
    for role, constraint in utt.frame.sortal.items():
        if constraint is SortalConstraint.ANIMATE:
            if not discourse.entity(step.assignment[role]).animate:
                failures.append(f"{label}: sortal violation at {role.name}")

    # Constraint 2: the Cf is exactly the bound entities, most salient
    # first, and an instantiated Cb appears in it.
    if set(step.state.cf_ids) != set(values):
        failures.append(f"{label}: Cf differs from bound entities")
    ranks = [tier.rank for _, tier in step.state.cf]
    if ranks != sorted(ranks):
        failures.append(f"{label}: Cf out of salience order")
    expected_cf = oracle._cf_list(
        utt,
        step.assignment,
        step.state.cb.entity_id if step.zta_applied else None,
    )
    got_cf = tuple((eid, tier.name.lower()) for eid, tier in step.state.cf)
    if got_cf != expected_cf:
        failures.append(f"{label}: Cf ranking {got_cf} != recomputed {expected_cf}")
    if not step.zta_applied and any(
        tier is SalienceRole.ZERO_TOPIC for _, tier in step.state.cf
    ):
        failures.append(f"{label}: zero-topic tier without the ZTA flag")


def _prev_cb_decided_here(
    discourse: Discourse, hyp: Hypothesis, k: int
) -> bool:
    """Was step k's Cb fixed at step k itself (not written back later)?

    Classified steps always decide their own Cb.  An initial step decides
    it only when a wa topic instantiates it; any other instantiated
    initial/reset Cb must have been unified from the following step.
    """
    step = hyp.steps[k]
    if step.transition is not None:
        return True
    if k == 0:
        return discourse.utterances[0].wa_argument is not None
    return False


def _check_centers(
    discourse: Discourse, hyp: Hypothesis, k: int, label: str, failures: List[str]
) -> None:
    """Constraints 1 and 3, the transition label, and Rule 1 at step k."""
    step = hyp.steps[k]
    utt = discourse.utterances[k]

    if k == 0:
        if step.transition is not None:
            failures.append(f"{label}: discourse-initial step classified")
        return

    prev = hyp.steps[k - 1]
    realized = set(step.assignment.values())
    prev_cf = list(prev.state.cf_ids)

    if step.transition is None:
        # Documented reset: nothing from the previous Cf is realized and
        # the center starts over uninstantiated (unless the next step
        # instantiated it retroactively, which _check_unification covers).
        if set(prev_cf) & realized:
            failures.append(f"{label}: reset despite a shared Cf entity")
        return

    cb = step.state.cb.entity_id
    if cb is None:
        failures.append(f"{label}: classified step with uninstantiated Cb")
        return

    # Constraint 3: the Cb comes from the previous Cf and is realized.
    if cb not in prev_cf or cb not in realized:
        failures.append(f"{label}: Cb {cb} outside previous Cf or unrealized")
        return
    if _prev_cb_decided_here(discourse, hyp, k - 1) and prev.state.cb.is_instantiated:
        forced = next(eid for eid in prev_cf if eid in realized)
        if cb != forced:
            failures.append(
                f"{label}: Cb {cb} not the highest realized previous center {forced}"
            )

    # The recorded transition must match the independent truth table.
    # A previous step whose Cb was written back started uninstantiated,
    # but then its final Cb equals this step's, so the carried-over test
    # gives the same answer either way.
    want = expected_transition(prev.state.cb.entity_id, cb, step.state.cp)
    if step.transition is not want:
        failures.append(
            f"{label}: transition {step.transition.name}, expected {want.name}"
        )

    # Rule 1: if any zero picks up a previous-Cf entity, the slot that
    # realizes the Cb must itself be a zero.
    zero_realizes_old = any(
        a.realization.is_zero and step.assignment[a.role] in set(prev_cf)
        for a in utt.args
    )
    if zero_realizes_old:
        cb_arg = next(a for a in utt.args if step.assignment[a.role] == cb)
        if not cb_arg.realization.is_zero:
            failures.append(f"{label}: Rule 1 violated (overt Cb, pronominalized Cf)")

    if step.zta_applied:
        _check_zta(discourse, hyp, k, label, failures)


def _check_zta(
    discourse: Discourse, hyp: Hypothesis, k: int, label: str, failures: List[str]
) -> None:
    """Zero-topic soundness: continuation, slot, and necessity."""
    step = hyp.steps[k]
    prev = hyp.steps[k - 1]
    utt = discourse.utterances[k]
    cb = step.state.cb.entity_id

    if not prev.state.cb.is_instantiated or prev.state.cb.entity_id != cb:
        failures.append(f"{label}: zero topic does not continue the previous Cb")
        return
    head, head_tier = step.state.cf[0]
    if head != cb or head_tier is not SalienceRole.ZERO_TOPIC:
        failures.append(f"{label}: zero topic does not head the Cf")
    if step.transition is not Transition.CONTINUE:
        failures.append(f"{label}: ZTA step classified {step.transition}")
    slot = next((a for a in utt.args if step.assignment[a.role] == cb), None)
    if slot is None or not slot.realization.is_zero:
        failures.append(f"{label}: zero topic bound at an overt slot")
    elif slot.role not in (GrammaticalRole.SUBJ, GrammaticalRole.OBJ2):
        failures.append(f"{label}: zero topic from a low slot {slot.role.name}")

    # Necessity: re-derive the parent's plain candidates with the naive
    # enumerator; none may already be a CONTINUE.
    prev_cf_sig = tuple(
        (eid, tier.name.lower()) for eid, tier in prev.state.cf
    )
    plain = oracle._parent_candidates(
        discourse, utt, prev_cf_sig, prev.state.cb.entity_id,
        EngineConfig(zta_enabled=False, strict_validation=False),
    )
    if any(sig[4] == "continue" for sig, _cost in plain):
        failures.append(f"{label}: ZTA fired although a plain CONTINUE existed")


def _check_unification(
    discourse: Discourse, hyp: Hypothesis, k: int, label: str, failures: List[str]
) -> None:
    """An instantiated initial/reset Cb must come from wa or write-back."""
    step = hyp.steps[k]
    if step.transition is not None or not step.state.cb.is_instantiated:
        return
    if k == 0 and discourse.utterances[0].wa_argument is not None:
        wa = discourse.utterances[0].wa_argument
        if step.state.cb.entity_id != wa.realization.entity_id:
            failures.append(f"{label}: initial Cb differs from the wa topic")
        return
    if k + 1 >= len(hyp.steps):
        failures.append(f"{label}: unexplained instantiated Cb on a final reset")
        return
    follower = hyp.steps[k + 1]
    if follower.state.cb.entity_id != step.state.cb.entity_id:
        failures.append(f"{label}: written-back Cb differs from the next step's")
    if step.state.cb.entity_id not in set(step.assignment.values()):
        failures.append(f"{label}: written-back Cb not realized in this step")


def hypothesis_invariant_failures(
    discourse: Discourse, config: EngineConfig, result: ResolveResult
) -> List[str]:
    """Every invariant violation in a finished resolution, as strings."""
    failures: List[str] = []

    if len(result.hypotheses) > config.beam_width:
        failures.append("beam width exceeded")
    entity_index = discourse.entity_index()
    keys = [engine.hypothesis_sort_key(h, entity_index) for h in result.hypotheses]
    if keys != sorted(keys):
        failures.append("beam not sorted by score/recency/content")

    for h_i, hyp in enumerate(result.hypotheses):
        if len(hyp.steps) != len(discourse.utterances):
            failures.append(f"hyp{h_i}: step count differs from utterance count")
            continue
        if hyp.score != sum(s.transition_cost for s in hyp.steps):
            failures.append(f"hyp{h_i}: score differs from summed transition costs")
        for k in range(len(hyp.steps)):
            label = f"hyp{h_i} u{hyp.steps[k].utterance_index}"
            if hyp.steps[k].utterance_index != k + 1:
                failures.append(f"{label}: utterance index out of sequence")
            _check_step_composition(discourse, hyp, k, label, failures)
            _check_centers(discourse, hyp, k, label, failures)
            _check_unification(discourse, hyp, k, label, failures)
    return failures


# --------------------------------------------------------------------------
# StepResult replay


def step_result_failures(discourse: Discourse, config: EngineConfig) -> List[str]:
    """Replay resolution one step at a time and check each StepResult.

    For every beam state and every following utterance: children are
    ranked by non-decreasing transition ordinal, each child extends its
    parent by exactly one step (older steps untouched, the parent's last
    step at most re-instantiated), and either every child binds its zeros
    inside the parent Cf or none does (the out-of-Cf fallback is last
    resort, so the two kinds never mix).
    """
    failures: List[str] = []
    utterances = discourse.utterances

    for k in range(1, len(utterances)):
        prefix = Discourse(discourse.entities, utterances[:k])
        try:
            beam = engine.resolve(prefix, config).hypotheses
        except engine.UnresolvableError:
            return failures
        for parent in beam:
            res = engine.step(parent, utterances[k], discourse, config)
            ordinals = [
                -1 if child.last.transition is None else child.last.transition.ordinal
                for child in res.ranked
            ]
            if ordinals != sorted(ordinals):
                failures.append(
                    f"u{k + 1}: StepResult not ordered by transition ordinal"
                )
            prev_cf = set(parent.last.state.cf_ids)
            zero_roles = [
                a.role for a in utterances[k].args if a.realization.is_zero
            ]
            purities = {
                all(child.last.assignment[r] in prev_cf for r in zero_roles)
                for child in res.ranked
            }
            if len(purities) > 1:
                failures.append(f"u{k + 1}: in-Cf and out-of-Cf children mixed")
            for child in res.ranked:
                if child.steps[: k - 1] != parent.steps[: k - 1]:
                    failures.append(f"u{k + 1}: child rewrote settled steps")
                old, new = parent.steps[k - 1], child.steps[k - 1]
                if new != old:
                    rewritten_ok = (
                        not old.state.cb.is_instantiated
                        and new.state.cb.is_instantiated
                        and new.state.cb.entity_id == child.last.state.cb.entity_id
                        and new.assignment == old.assignment
                        and new.state.cf == old.state.cf
                        and new.transition == old.transition
                    )
                    if not rewritten_ok:
                        failures.append(
                            f"u{k + 1}: parent's last step changed beyond unification"
                        )
    return failures
