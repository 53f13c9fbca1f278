import hashlib
import random
from fractions import Fraction
from typing import List, Sequence

from retifica.core.forms import BiForm

__all__ = ["derive_seed", "rng_for", "random_rational", "random_biform", "random_point", "random_combination"]


def derive_seed(seed: int, *labels) -> int:
    """Independent, reproducible sub-seed for a labelled sub-task."""
    text = "/".join([str(seed)] + [str(label) for label in labels])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def rng_for(seed: int, *labels) -> random.Random:
    return random.Random(derive_seed(seed, *labels))


def random_rational(rng: random.Random, height: int = 20, nonzero: bool = False) -> Fraction:
    while True:
        value = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if value or not nonzero:
            return value


def random_point(rng: random.Random, n: int, height: int = 20) -> List[Fraction]:
    while True:
        point = [random_rational(rng, height) for _ in range(n)]
        if any(point):
            return point


def random_biform(rng: random.Random, a: int, b: int, height: int = 20) -> BiForm:
    while True:
        f = BiForm.combination(
            BiForm.basis(a, b), [random_rational(rng, height) for _ in range((a + 1) * (b + 1))]
        )
        if f:
            return f


def random_combination(rng: random.Random, forms: Sequence, height: int = 20):
    coeffs = [random_rational(rng, height) for _ in forms]
    while not any(coeffs):
        coeffs = [random_rational(rng, height) for _ in forms]
    acc = None
    for f, c in zip(forms, coeffs):
        term = f.scale(c)
        acc = term if acc is None else acc + term
    return acc
