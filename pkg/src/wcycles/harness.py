"""Seeded random instances and the property harness run by ``wcycles harness``."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .graphs import LETTERS, GraphMorphism, SignedEdge, euler_characteristic, fold, rose, subdivided_rose
from .stacking import (
    construct_stacking,
    count_open_arcs,
    is_good,
    pullback_stacking,
    validate_stacking,
)
from .pullback import pullback
from .theorems import OneRelatorComplex, npi_check, verify_main_theorem, wcycles_check
from .words import Loop, format_word, free_reduce, image_subgraph, is_primitive, loop_from_word, parse_word


def random_reduced_word(rng: random.Random, rank: int, length: int) -> list[SignedEdge]:
    """Freely reduced word of exactly ``length`` letters."""
    out: list[SignedEdge] = []
    while len(out) < length:
        se = SignedEdge(LETTERS[rng.randrange(rank)], rng.choice((1, -1)))
        if out and se == out[-1].inverse():
            continue
        out.append(se)
    return out


def random_primitive_word(rng: random.Random, rank: int, max_len: int) -> str:
    """Cyclically reduced, primitive word; drawn by rejection."""
    while True:
        word = random_reduced_word(rng, rank, rng.randint(1, max_len))
        if len(word) > 1 and word[0] == word[-1].inverse():
            continue
        if is_primitive(word):
            return format_word(word)


@dataclass(frozen=True, eq=False)
class Instance:
    index: int
    rank: int
    word: str
    gens: tuple
    parts: int  # petal subdivision of the base, 1 = plain rose
    rho: GraphMorphism
    loop: Loop


def _subdivide_path(word: str, parts: int) -> list[SignedEdge]:
    out = []
    for c, s in parse_word(word):
        steps = [SignedEdge((c, j), 1) for j in range(parts)]
        out.extend(steps if s > 0 else [se.inverse() for se in reversed(steps)])
    return out


def random_instance(seed, index: int, max_word_len: int = 20, max_gen_len: int = 12, max_gens: int = 4) -> Instance:
    """Deterministic function of ``(seed, index, bounds)``."""
    rng = random.Random(f"{seed}:{index}")
    rank = rng.randint(2, 4)
    word = random_primitive_word(rng, rank, max_word_len)
    gens = []
    for _ in range(rng.randint(1, max_gens)):
        gens.append(format_word(random_reduced_word(rng, rank, rng.randint(1, max_gen_len))))
    # seed the subgroup with powers or conjugates of the relator often
    # enough that the pullback has circles to look at
    roll = rng.random()
    if roll < 0.3:
        gens[0] = word * rng.randint(1, 3)
    elif roll < 0.5:
        u = format_word(random_reduced_word(rng, rank, rng.randint(1, 3)))
        inv = format_word(SignedEdge(se.edge, -se.sign) for se in reversed(_letters(u)))
        gens[0] = format_word(free_reduce(_letters(u + word + inv)))
    elif roll < 0.6:
        gens = list(LETTERS[:rank])
    gens = [g for g in gens if g] or [LETTERS[0]]
    parts = rng.choice((2, 3)) if rng.random() < 0.1 else 1
    if parts == 1:
        base = rose(rank)
        rho = fold(base, gens, absolute=True)
        loop = loop_from_word(base, word)
    else:
        base = subdivided_rose(rank, parts)
        rho = fold(base, [_subdivide_path(g, parts) for g in gens], absolute=True)
        loop = loop_from_word(base, _subdivide_path(word, parts))
    return Instance(index, rank, word, tuple(gens), parts, rho, loop)


def _letters(text: str) -> list[SignedEdge]:
    return [SignedEdge(c, s) for c, s in parse_word(text)]


def check_instance(inst: Instance) -> dict[str, bool]:
    """Run every verifier and stacking invariant on one instance."""
    results = {}
    results["main_theorem"] = verify_main_theorem(inst.rho, inst.loop).passed
    results["wcycles"] = wcycles_check(inst.rho, inst.loop).passed

    s, trace = construct_stacking(inst.loop)
    image, _ = image_subgraph(inst.loop)
    neg_chi = -euler_characteristic(image)
    results["stacking"] = (
        not validate_stacking(s)
        and is_good(s)
        and trace.depth <= len(inst.loop)
        and count_open_arcs(s, "above") == neg_chi == count_open_arcs(s, "below")
    )
    p = pullback(inst.rho, inst.loop)
    s2 = pullback_stacking(s, inst.rho, p)
    results["pullback_stacking"] = not validate_stacking(s2) and is_good(s2)

    y = OneRelatorComplex.from_lifts(inst.rho, inst.loop)
    results["npi"] = npi_check(y).passed
    return results


def run_harness(seed, n: int, max_word_len: int = 20, max_gen_len: int = 12, max_gens: int = 4) -> tuple[str, bool]:
    """Return ``(summary text, all passed)``; the text depends only on the arguments."""
    if n < 1:
        raise ValueError("n must be at least 1")
    passed: Counter = Counter()
    failures = []
    for i in range(n):
        inst = random_instance(seed, i, max_word_len, max_gen_len, max_gens)
        for name, ok in check_instance(inst).items():
            passed[name] += ok
            if not ok:
                failures.append(f"  FAIL {name}: instance {i} word={inst.word} gens={list(inst.gens)} parts={inst.parts}")
    names = ["main_theorem", "wcycles", "stacking", "pullback_stacking", "npi"]
    lines = [f"harness seed={seed} n={n} max_word_len={max_word_len} max_gen_len={max_gen_len} max_gens={max_gens}"]
    lines += [f"{name:18s} {passed[name]}/{n}" for name in names]
    lines += failures
    all_ok = all(passed[name] == n for name in names)
    lines.append("PASS" if all_ok else "FAIL")
    return "\n".join(lines) + "\n", all_ok
