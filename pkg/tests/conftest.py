"""
Shared group fixtures, all generated from permutations
"""

import json

import pytest

from mackey.group_core import group_from_generators

GENERATORS = {
    "C2": (2, [[1, 0]]),
    "C3": (3, [[1, 2, 0]]),
    "C4": (4, [[1, 2, 3, 0]]),
    "V4": (4, [[1, 0, 2, 3], [0, 1, 3, 2]]),
    "S3": (3, [[1, 0, 2], [1, 2, 0]]),
    "D4": (4, [[1, 2, 3, 0], [0, 3, 2, 1]]),
    "Q8": (8, [[2, 3, 1, 0, 6, 7, 5, 4], [4, 5, 7, 6, 1, 0, 2, 3]]),
    "A4": (4, [[1, 2, 0, 3], [1, 0, 3, 2]]),
    "D6": (6, [[1, 2, 3, 4, 5, 0], [0, 5, 4, 3, 2, 1]]),
    "S4": (4, [[1, 0, 2, 3], [1, 2, 3, 0]]),
}


def make_group(name):
    degree, gens = GENERATORS[name]
    return group_from_generators(degree, gens)


@pytest.fixture
def trivial_group():
    return group_from_generators(1, [])


@pytest.fixture
def c2():
    return make_group("C2")


@pytest.fixture
def c3():
    return make_group("C3")


@pytest.fixture
def c4():
    return make_group("C4")


@pytest.fixture
def v4():
    return make_group("V4")


@pytest.fixture
def s3():
    return make_group("S3")


@pytest.fixture
def d4():
    return make_group("D4")


@pytest.fixture
def q8():
    return make_group("Q8")


@pytest.fixture
def a4():
    return make_group("A4")


@pytest.fixture
def d6():
    return make_group("D6")


@pytest.fixture
def s4():
    return make_group("S4")


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)
