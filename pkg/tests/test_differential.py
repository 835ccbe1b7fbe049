"""Compiled execution against the reference evaluator.

Each generated program runs twice: once compiled and interpreted on the
stack machine, once by direct recursion over the revised tree.  The two
routes share no evaluation code, so agreement on every output is strong
evidence that both are right.
"""

import pytest

import checks
import progen
from pl0plus.pvm import reference_eval

SEEDS = range(1000, 1020)


@pytest.mark.parametrize("seed", SEEDS)
def test_both_routes_agree(seed):
    artifacts = checks.seeded(seed)
    expected = reference_eval(artifacts.revised, artifacts.inputs)
    exit_code, outputs = checks.run_vm(artifacts.program, artifacts.inputs)
    assert exit_code == 0
    assert outputs == expected
    assert outputs, "un programa generado siempre escribe algo"


@pytest.mark.parametrize("seed", SEEDS)
def test_generated_programs_exercise_the_language(seed):
    assert progen.GUARANTEED <= checks.seeded(seed).features


def test_generator_covers_every_relation():
    seen = set()
    for seed in SEEDS:
        seen |= checks.seeded(seed).features
    assert {"rel" + rel for rel in progen.RELATIONS} <= seen
