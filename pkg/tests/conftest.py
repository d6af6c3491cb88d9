import numpy as np
import pytest

from reqfuse.corpus import PairLabel, Requirement, RequirementPair, build_dataset


def make_blobs(n: int = 200, margin: float = 2.0, seed: int = 7):
    """Two well-separated 2-d point clouds; the gap between classes is >= margin."""
    rng = np.random.default_rng(seed)
    half = n // 2
    radius = 1.5
    centers = np.array([[0.0, 0.0], [2 * radius + margin + 2.0, 2 * radius + margin + 2.0]])
    X, y = [], []
    for c, center in enumerate(centers):
        angles = rng.uniform(0, 2 * np.pi, half)
        radii = radius * np.sqrt(rng.uniform(0, 1, half))
        pts = center + np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        X.append(pts)
        y.extend([f"class{c}"] * half)
    return np.concatenate(X), np.array(y)


@pytest.fixture(scope="session")
def blobs():
    return make_blobs()


def tiny_pairs(n_conflict: int = 3, n_neutral: int = 6):
    pairs = []
    for i in range(n_conflict + n_neutral):
        label = PairLabel.CONFLICT if i < n_conflict else PairLabel.NEUTRAL
        pairs.append(
            RequirementPair(
                pair_id=f"p{i}",
                left=Requirement(f"l{i}", f"the system shall do thing {i}"),
                right=Requirement(f"r{i}", f"the platform must handle item {i}"),
                label=label,
            )
        )
    return build_dataset("tiny", pairs)


@pytest.fixture
def tiny_dataset():
    return tiny_pairs()
