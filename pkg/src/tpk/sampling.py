"""Seeded generation of random unitaries, subspaces and projector pairs."""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidSpec
from .linalg import SubspaceBasis
from .subspaces import Projector

__all__ = [
    "PairSpec",
    "haar_unitary",
    "random_subspace",
    "generate_pair",
    "random_pair_specs",
    "child_seeds",
    "as_generator",
]


def as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_seeds(seed, count):
    """Independent per-trial seeds spawned from one master seed."""
    return [int(s.generate_state(1, np.uint64)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(dim, seed=None):
    """Haar-distributed unitary: QR of a complex Gaussian with the phases of R's diagonal removed."""
    rng = as_generator(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_subspace(dim, rank, seed=None):
    """Uniformly distributed ``rank``-dimensional subspace of C^dim."""
    rng = as_generator(seed)
    if rank == 0:
        return SubspaceBasis.empty(dim)
    q, _ = np.linalg.qr(_ginibre(rng, dim, rank))
    return SubspaceBasis(q)


@dataclass(frozen=True)
class PairSpec:
    dim: int
    rank_p: int
    rank_q: int
    shared_rank: int = 0
    seed: int = 0

    def validate(self):
        if self.dim < 1:
            raise InvalidSpec("dim must be positive")
        if not 0 <= self.shared_rank <= min(self.rank_p, self.rank_q) <= max(self.rank_p, self.rank_q) <= self.dim:
            raise InvalidSpec(f"need 0 <= shared_rank <= rank_p, rank_q <= dim; got {self}")
        # beyond this two generic subspaces are forced to meet outside the planted block
        if self.rank_p + self.rank_q - self.shared_rank > self.dim:
            raise InvalidSpec(
                f"rank_p + rank_q - shared_rank = {self.rank_p + self.rank_q - self.shared_rank} "
                f"exceeds dim = {self.dim}"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")

    def to_dict(self):
        return asdict(self)


def generate_pair(spec):
    """Projector pair whose range intersection is exactly a planted block.

    A Haar unitary supplies the shared block and the orthogonal complement it
    leaves; each projector adds an independent uniformly random subspace of
    that complement.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    d, s = spec.dim, spec.shared_rank
    w = haar_unitary(d, rng)
    shared, rest = w[:, :s], w[:, s:]
    extra_p = rest @ random_subspace(d - s, spec.rank_p - s, rng).basis
    extra_q = rest @ random_subspace(d - s, spec.rank_q - s, rng).basis
    bp = np.hstack([shared, extra_p])
    bq = np.hstack([shared, extra_q])
    return (
        Projector.from_matrix(bp @ bp.conj().T, tol=1e-12),
        Projector.from_matrix(bq @ bq.conj().T, tol=1e-12),
    )


def random_pair_specs(dim, trials, seed, shared_ranks=(0, 1, 3)):
    """``trials`` valid PairSpecs in ``dim``, cycling through ``shared_ranks``.

    Shared ranks that do not fit in ``dim`` are skipped. Ranks are uniform
    over the admissible range and each spec gets its own spawned seed.
    """
    shared = [s for s in shared_ranks if s <= dim] or [0]
    seeds = child_seeds(seed, trials)
    specs = []
    for k, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        s = shared[k % len(shared)]
        rank_p = int(rng.integers(s, dim + 1))
        rank_q = int(rng.integers(s, dim - rank_p + s + 1))
        specs.append(PairSpec(dim, rank_p, rank_q, s, child))
    return specs
