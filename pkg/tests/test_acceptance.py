"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed at the end of the run.
"""

import itertools
import random
import time
from pathlib import Path

from oracles import (
    AB,
    bounded_models,
    finite_instance,
    finite_models,
    image_disagreements,
    planted_instance,
    preimage_disagreements,
    random_concat,
    random_equations,
    random_regex,
    random_replaceall,
    random_transducer,
)
from rcpsolve.automata import Alphabet, Nfa, accepts, compile_regex, intersect, is_empty
from rcpsolve.benchgen import BioSpec, PcpSpec, gen_bio, gen_pcp
from rcpsolve.calculus import BWD, FWD, Sequent, apply_bwd, apply_fwd, tree_shape, validate_proof
from rcpsolve.functions import Reverse, backward_preimage, evaluate, forward_image, is_forwardable
from rcpsolve.frontend import load
from rcpsolve.ordering import is_chain_free, is_straight_line, try_marking
from rcpsolve.search import Budgets, solve, solve_fair, solve_ordered, solve_priority, verify_model

INSTANCES = Path(__file__).resolve().parent.parent / "instances"
SQUARE_SHAPE = (("fwd", (("bwd", "close"), ("bwd", "close"))),)
ALPHA = Alphabet.custom(AB)


def _load(name: str):
    return load((INSTANCES / name).read_text())


def test_square_example(report):
    root, _ = _load("square.smt2")
    problems = []
    for strategy in ("auto", "ordered", "fair", "priority"):
        t0 = time.monotonic()
        r = solve(root, Budgets(wall_time=5), strategy)
        dt = time.monotonic() - t0
        if r.verdict != "unsat":
            problems.append(f"{strategy}: {r.verdict}")
            continue
        if dt >= 1.0:
            problems.append(f"{strategy}: {dt:.2f}s")
        if tree_shape(r.proof) != SQUARE_SHAPE:
            problems.append(f"{strategy}: shape {tree_shape(r.proof)}")
        diag = validate_proof(r.proof, bound=6)
        if not diag:
            problems.append(f"{strategy}: replay {diag.message}")
    report(1, not problems, "square example unsat under all strategies, exact shape, replay ok" if not problems else "; ".join(problems))
    assert not problems


def _bounded_set(a: Nfa, max_len: int, chars: str) -> set[str]:
    out = set()
    for n in range(max_len + 1):
        for t in itertools.product(chars, repeat=n):
            w = "".join(t)
            if accepts(a, w):
                out.add(w)
    return out


def test_single_domino_pcp(report):
    root, _ = _load("pcp1.smt2")
    chars, bound = "012", 8
    want_y = {"10" * k for k in range(1, bound // 2 + 1)}
    want_z = {"01" * k for k in range(1, bound // 2 + 1)}
    problems = []
    for strategy in ("auto", "fair", "priority"):
        t0 = time.monotonic()
        r = solve(root, Budgets(wall_time=5), strategy)
        dt = time.monotonic() - t0
        if r.verdict != "unsat" or dt >= 1.0:
            problems.append(f"{strategy}: {r.verdict} in {dt:.2f}s")
            continue
        seen_y = seen_z = False
        for node in r.proof.nodes:
            if node.sequent is None or node.bottom:
                continue
            s = node.sequent
            seen_y = seen_y or _bounded_set(s.constraint("y"), bound, chars) == want_y
            seen_z = seen_z or _bounded_set(s.constraint("z"), bound, chars) == want_z
        if not (seen_y and seen_z):
            problems.append(f"{strategy}: derived constraints not found (y {seen_y}, z {seen_z})")
        if not validate_proof(r.proof, bound=6):
            problems.append(f"{strategy}: replay failed")
    report(2, not problems, "single domino unsat, y in (10)+ and z in (01)+ derived" if not problems else "; ".join(problems))
    assert not problems


def test_pcp_corpus(report):
    definite = contradictions = unverified = 0
    for seed in range(100):
        inst = gen_pcp(PcpSpec(num_dominos=3, word_len=3, seed=seed))
        root, _ = load(inst.text)
        r = solve(root, Budgets(wall_time=10))
        if r.verdict != "unknown":
            definite += 1
        if r.verdict == "unsat" and inst.verdict == "sat":
            contradictions += 1
        if r.verdict == "sat" and not (r.verified and verify_model(root, r.model)):
            unverified += 1
    ok = definite >= 70 and contradictions == 0 and unverified == 0
    report(3, ok, f"PCP[3,3]: {definite}/100 definite at 10s, {contradictions} contradictions, {unverified} unverified models")
    assert ok


def test_bio_corpus(report):
    correct = straight = 0
    slowest = 0.0
    for want_sat in (True, False):
        for seed in range(20):
            inst = gen_bio(BioSpec(dna_len=200, pattern_len=15, num_replace=4, want_sat=want_sat, seed=seed))
            root, _ = load(inst.text)
            straight += is_straight_line(root.equations)
            t0 = time.monotonic()
            r = solve(root, Budgets(wall_time=60))
            dt = time.monotonic() - t0
            slowest = max(slowest, dt)
            good = r.verdict == inst.verdict and dt <= 60
            if r.verdict == "sat":
                good = good and r.verified and verify_model(root, r.model)
            correct += good
    ok = correct == 40 and straight == 40
    report(4, ok, f"bio: {correct}/40 correct, {straight}/40 straight-line, slowest {slowest:.2f}s")
    assert ok


def test_marking_iff_chain_free(report):
    discrepancies = 0
    counts = {True: 0, False: 0}
    for seed in range(1000):
        rng = random.Random(seed)
        eqs = random_equations(rng, rng.randint(2, 5), rng.randint(1, 4), kinds=("concat", "transducer", "replaceall"))
        orderable = try_marking(eqs) is not None
        counts[orderable] += 1
        if orderable != is_chain_free(eqs):
            discrepancies += 1
    ok = discrepancies == 0
    report(5, ok, f"1000 instances ({counts[True]} orderable, {counts[False]} not): {discrepancies} discrepancies")
    assert ok


def _function_case(kind: str, rng: random.Random, for_image: bool):
    nondecreasing = for_image and rng.random() < 0.5
    if kind == "concat":
        f = random_concat(rng, ["x", "y"], AB, repeats=not for_image)
    elif kind == "replaceall":
        f = random_replaceall(rng, AB, nondecreasing)
    elif kind == "transducer":
        f = random_transducer(rng, AB, rng.randint(1, 3), nondecreasing)
    else:
        f = Reverse()
    return f


def test_image_preimage_oracles(report):
    failures = {}
    for kind in ("concat", "replaceall", "transducer", "reverse"):
        bad = 0
        for seed in range(200):
            rng = random.Random(seed * 7 + len(kind))
            f = _function_case(kind, rng, for_image=True)
            args = [compile_regex(random_regex(rng, 3), ALPHA) for _ in range(f.arity)]
            if is_forwardable(f) and image_disagreements(f, args, forward_image(f, args, ALPHA), max_len=5):
                bad += 1
            g = _function_case(kind, rng, for_image=False)
            out = compile_regex(random_regex(rng, 3, complement=True), ALPHA)
            if preimage_disagreements(g, out, backward_preimage(g, out, ALPHA), max_len=5):
                bad += 1
        failures[kind] = bad
    ok = not any(failures.values())
    report(6, ok, "200 image + 200 preimage cases per kind, words up to length 5: " + ", ".join(f"{k} {v} failures" for k, v in failures.items()))
    assert ok


def _orderable_instance(rng: random.Random):
    while True:
        nv = rng.randint(2, 4)
        eqs = random_equations(rng, nv, rng.randint(1, 3), kinds=("concat", "transducer", "replaceall"))
        flow = try_marking(eqs)
        if flow is None:
            continue
        names = sorted({v for e in eqs for v in e.variables})
        cons = {v: compile_regex(random_regex(rng, 2), ALPHA) for v in names if rng.random() < 0.6}
        return Sequent.build(cons, eqs, ALPHA, names), flow


def _extend(step, e, parent: Sequent, child: Sequent, m: dict[str, str]):
    """Turn a model of the child (without the processed equation) into a
    candidate model of the parent (with it)."""
    m = dict(m)
    if step.dir == BWD:
        m[e.lhs] = evaluate(e.rhs, [m[v] for v in e.rhs_vars])
        return m
    rel = backward_preimage(e.rhs, Nfa.literal(m[e.lhs]), ALPHA)
    for branch in rel.branches:
        picks = [is_empty(intersect(lang, child.constraint(v))) for v, lang in zip(e.rhs_vars, branch)]
        if all(p is not None for p in picks):
            m.update(zip(e.rhs_vars, picks))
            return m
    return None


def _sequent_models(s: Sequent, eqs, max_total: int):
    return bounded_models(list(s.variables), lambda v, w: accepts(s.constraint(v), w), eqs, max_total)


def test_equisatisfiability(report):
    failures = steps = 0
    for seed in range(200):
        rng = random.Random(1000 + seed)
        root, flow = _orderable_instance(rng)
        remaining = list(root.equations)
        frontier = [root]
        for step in flow:
            e = root.eq(step.eq)
            after = [x for x in remaining if x.id != step.eq]
            nxt = []
            for parent in frontier:
                steps += 1
                if step.dir == FWD:
                    children = [apply_fwd(parent, step.eq)[0]]
                else:
                    children = [c for c, _ in apply_bwd(parent, step.eq)]
                # every bounded model of the parent survives in some child
                for m in _sequent_models(parent, remaining, 6):
                    if not any(all(accepts(c.constraint(v), m[v]) for v in c.variables) for c in children):
                        failures += 1
                        break
                # every bounded model of a child extends to the parent
                for c in children:
                    for m in _sequent_models(c, after, 6):
                        ext = _extend(step, e, parent, c, m)
                        if ext is None or not all(accepts(parent.constraint(v), ext[v]) for v in parent.variables) or not all(x.holds(ext) for x in remaining):
                            failures += 1
                            break
                nxt.extend(children)
            frontier = nxt
            remaining = after
    ok = failures == 0
    report(7, ok, f"200 orderable instances, {steps} flow steps, bounded models up to total length 6: {failures} failures")
    assert ok


def test_lower_bound_formula(report):
    root, _ = _load("lowerbound.smt2")
    verdicts = {}
    for name, solver in (("fair", solve_fair), ("priority", solve_priority)):
        verdicts[name] = solver(root, Budgets()).verdict
    ok = all(v == "unknown" for v in verdicts.values())
    report(8, ok, "xyxy=yxyx formula: " + ", ".join(f"{k} {v}" for k, v in verdicts.items()))
    assert ok


def test_sanitization(report):
    root, _ = _load("sanitization.smt2")
    flow = try_marking(root.equations)
    straight = is_straight_line(root.equations)
    verdict = solve_ordered(root, flow, Budgets(wall_time=60)).verdict if flow else "not orderable"
    ok = flow is not None and not straight and verdict == "unsat"
    report(9, ok, f"sanitization: orderable {flow is not None}, straight-line {straight}, ordered verdict {verdict}")
    assert ok


def test_soundness_fuzz(report):
    strategies = ("auto", "fair", "priority")
    planted_unsat = planted_unverified = 0
    unsat_proofs: list = []
    for seed in range(500):
        rng = random.Random(seed)
        eqs, model = planted_instance(rng, steps=rng.randint(1, 4))
        cons = {}
        for v, w in model.items():
            if rng.random() < 0.6:
                cons[v] = compile_regex(random_regex(rng, 2), ALPHA)
                if not accepts(cons[v], w):
                    cons[v] = Nfa.from_words([w]) if rng.random() < 0.5 else None
            if cons.get(v) is None:
                cons.pop(v, None)
        root = Sequent.build(cons, eqs, ALPHA, sorted(model))
        assert verify_model(root, model)
        r = solve(root, Budgets(wall_time=2, max_model_total_len=8), strategies[seed % 3])
        if r.verdict == "unsat":
            planted_unsat += 1
        if r.verdict == "sat" and not verify_model(root, r.model):
            planted_unverified += 1
    found = unsat_sat = 0
    seed = 0
    while found < 200:
        rng = random.Random(10_000 + seed)
        seed += 1
        eqs, langs = finite_instance(rng)
        if finite_models(eqs, langs):
            continue
        found += 1
        root = Sequent.build({v: Nfa.from_words(ws) for v, ws in langs.items()}, eqs, ALPHA)
        r = solve(root, Budgets(wall_time=2), strategies[found % 3])
        if r.verdict == "sat":
            unsat_sat += 1
        if r.verdict == "unsat":
            unsat_proofs.append(r.proof)
    bad_replays = sum(1 for p in unsat_proofs if not validate_proof(p, bound=6))
    ok = planted_unsat == 0 and planted_unverified == 0 and unsat_sat == 0 and bad_replays == 0
    report(
        10,
        ok,
        f"500 planted: {planted_unsat} unsat, {planted_unverified} bad models; 200 exhaustively unsat: {unsat_sat} sat, "
        f"{len(unsat_proofs)} proofs, {bad_replays} failed replays",
    )
    assert ok
