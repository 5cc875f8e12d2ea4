import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_vector(rng, dim):
    return (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / np.sqrt(2)


def random_covariance(rng, dim, low=1.0, high=3.0):
    """Random Hermitian matrix with spectrum inside [low, high]."""
    from weylscale import OperatorSpec

    gaussian = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(gaussian)
    values = rng.uniform(low, high, dim)
    return OperatorSpec.from_matrix(q @ np.diag(values).astype(complex) @ q.conj().T)


def random_word(rng, dim, max_generators=3):
    from weylscale import WeylWord

    word = WeylWord(dim)
    for _ in range(int(rng.integers(1, max_generators + 1))):
        coeff = complex(rng.standard_normal() + 1j * rng.standard_normal())
        word = word + WeylWord.generator(random_vector(rng, dim), coeff)
    return word


def words_close(u, v, tol, vector_tol=1e-9):
    """Word comparison matching generator vectors up to rounding noise.

    Unlike key-exact word_distance this tolerates generators whose vectors
    land one ulp apart across a canonicalization grid boundary.
    """
    if len(u) != len(v):
        return False
    remaining = list(v.items())
    for vec, coeff in u.items():
        for index, (other_vec, other_coeff) in enumerate(remaining):
            if (
                np.linalg.norm(vec - other_vec) <= vector_tol
                and abs(coeff - other_coeff) <= tol
            ):
                remaining.pop(index)
                break
        else:
            return False
    return True
