"""Construction and bookkeeping of the linear systems the solvers consume.

A `LinearSystem` always carries a row-normalized matrix (every row has unit
Euclidean norm), the matching right-hand side, and optionally a reference
solution with its residual vector. Synthetic systems come from `generate`;
arbitrary (A, b) pairs go through `normalize_rows` first.

Randomness is reproducible by construction: all draws come from a seeded
PCG64 stream, Gaussian variates use Box-Muller over uniforms, and distinct
index samples use a partial Fisher-Yates shuffle. Equal specs (seed
included) produce bitwise-equal systems.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg

ROW_NORM_TOL = 1e-12
REFERENCE_RESIDUAL_TOL = 1e-10

GENERATOR_KINDS = ("gaussian-noise", "spiky-noise", "correlated", "pure-noise")


class DegenerateRowError(ValueError):
    """A matrix row is (numerically) zero and cannot be normalized."""

    def __init__(self, row_index: int):
        self.row_index = row_index
        super().__init__(f"row {row_index} has norm below {ROW_NORM_TOL}; cannot normalize")


# --------------------------------------------------------------------------
# seeded randomness


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.uint64(seed))


def normal_draws(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal variates via Box-Muller over uniform draws."""
    if size == 0:
        return np.zeros(0)
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # in (0, 1], keeps the log finite
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([radius * np.cos(2.0 * np.pi * u2), radius * np.sin(2.0 * np.pi * u2)])
    return z[:size]


def sample_distinct(rng: np.random.Generator, population: int, count: int) -> np.ndarray:
    """`count` distinct indices from 0..population-1 by partial Fisher-Yates."""
    if count > population:
        raise ValueError(f"cannot sample {count} distinct indices from {population}")
    pool = np.arange(population)
    for i in range(count):
        j = i + int(rng.integers(population - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:count]


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a synthetic system.

    kind selects the construction:
      gaussian-noise  A_ij ~ N(0, 1/n),                b = A 1 + eps
      spiky-noise     A_ij ~ N(0, 1/n),                b = A 1 + spike_magnitude on spike_count random rows
      correlated      A_ij ~ N(row_mean, row_std^2),   b = A 1 + eps
      pure-noise      A_ij ~ N(0, 1/n),                b = eps
    with eps_i ~ N(0, noise_std^2), all pre-normalization. The generated
    system is row-normalized and carries the least-squares solution of the
    normalized system as its reference.
    """

    kind: str
    m: int = 2000
    n: int = 50
    noise_std: float = 1.0
    spike_count: int = 0
    spike_magnitude: float = 0.0
    row_mean: float = 1.0
    row_std: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {GENERATOR_KINDS}")
        if not (self.m > self.n >= 1):
            raise ValueError(f"generator requires m > n >= 1, got m={self.m}, n={self.n}")
        if self.spike_count > self.m or self.spike_count < 0:
            raise ValueError(f"spike_count must be in [0, m], got {self.spike_count}")
        if self.noise_std < 0 or self.row_std < 0:
            raise ValueError("noise_std and row_std must be nonnegative")


@dataclass(frozen=True)
class LinearSystem:
    """A row-normalized overdetermined system, optionally with a reference solution.

    Invariants checked at construction: unit row norms (within 1e-12),
    m >= n, finite entries, and when a reference is present the stored
    error vector equals A @ reference - b componentwise (within 1e-10).
    Arrays are locked read-only; systems are safe to share across runs.
    """

    a: np.ndarray
    b: np.ndarray
    reference: np.ndarray | None = None
    error_vec: np.ndarray | None = None

    def __post_init__(self):
        a = linalg.as_matrix(self.a)
        b = linalg.as_vector(self.b)
        m, n = a.shape
        if m < n:
            raise ValueError(f"system must be overdetermined (m >= n), got {m} x {n}")
        if b.shape[0] != m:
            raise ValueError(f"rhs length {b.shape[0]} does not match {m} rows")
        row_norms = np.sqrt((a * a).sum(axis=1))
        bad = np.abs(row_norms - 1.0).max()
        if bad > ROW_NORM_TOL:
            raise ValueError(f"rows must have unit norm within {ROW_NORM_TOL}, worst deviation {bad:.3e}")
        if self.reference is not None:
            ref = linalg.as_vector(self.reference)
            if ref.shape[0] != n:
                raise ValueError(f"reference length {ref.shape[0]} does not match {n} columns")
            if self.error_vec is None:
                raise ValueError("a system with a reference solution must carry its error vector")
            err = linalg.as_vector(self.error_vec)
            if err.shape[0] != m:
                raise ValueError(f"error vector length {err.shape[0]} does not match {m} rows")
            drift = np.abs(a @ ref - b - err).max()
            if drift > REFERENCE_RESIDUAL_TOL:
                raise ValueError(f"error_vec disagrees with A @ reference - b by {drift:.3e}")
        elif self.error_vec is not None:
            raise ValueError("error_vec requires a reference solution")
        for arr in (a, b, self.reference, self.error_vec):
            if arr is not None:
                arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    def residual(self, x) -> np.ndarray:
        """A @ x - b."""
        return linalg.matvec(self.a, x) - self.b

    def error_inf(self) -> float:
        """Sup norm of the reference residual; requires a reference solution."""
        if self.error_vec is None:
            raise ValueError("system has no reference solution / error vector")
        return linalg.norm_inf(self.error_vec)


# --------------------------------------------------------------------------
# construction


def normalize_rows(A, b) -> tuple[np.ndarray, np.ndarray]:
    """Scale each equation so its matrix row has unit Euclidean norm.

    Dividing row i and b_i by ||a_i|| preserves the solution set of every
    equation. Raises DegenerateRowError (with the row index) if a row norm
    falls below 1e-12.
    """
    A = linalg.as_matrix(A)
    b = linalg.as_vector(b)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match {A.shape[0]} rows")
    norms = np.sqrt((A * A).sum(axis=1))
    small = np.nonzero(norms < ROW_NORM_TOL)[0]
    if small.size:
        raise DegenerateRowError(int(small[0]))
    return A / norms[:, None], b / norms


def build_unnormalized(spec: GeneratorSpec) -> tuple[np.ndarray, np.ndarray]:
    """The raw (A, b) pair of a generator spec, before row normalization.

    Draw order is fixed (matrix entries row-major, then rhs noise or spike
    indices) so that equal seeds give bitwise-equal systems.
    """
    rng = make_rng(spec.seed)
    m, n = spec.m, spec.n
    if spec.kind == "correlated":
        A = spec.row_mean + spec.row_std * normal_draws(rng, m * n).reshape(m, n)
    else:
        A = normal_draws(rng, m * n).reshape(m, n) / np.sqrt(n)
    if spec.kind == "pure-noise":
        b = spec.noise_std * normal_draws(rng, m)
    elif spec.kind == "spiky-noise":
        b = A @ np.ones(n)
        spikes = sample_distinct(rng, m, spec.spike_count)
        b[spikes] += spec.spike_magnitude
    else:  # gaussian-noise and correlated share b = A 1 + eps
        b = A @ np.ones(n) + spec.noise_std * normal_draws(rng, m)
    return A, b


def generate(spec: GeneratorSpec) -> LinearSystem:
    """Build, normalize, and annotate a synthetic system.

    The reference solution is the least-squares solution of the normalized
    system, and error_vec its residual there.
    """
    A, b = build_unnormalized(spec)
    An, bn = normalize_rows(A, b)
    reference = linalg.least_squares(An, bn)
    return LinearSystem(An, bn, reference, An @ reference - bn)


def from_unnormalized(A, b, with_reference: bool = True) -> LinearSystem:
    """Normalize a user-supplied (A, b) and attach its least-squares reference."""
    An, bn = normalize_rows(A, b)
    if not with_reference:
        return LinearSystem(An, bn)
    reference = linalg.least_squares(An, bn)
    return LinearSystem(An, bn, reference, An @ reference - bn)


# --------------------------------------------------------------------------
# plain-text serialization (used by the CLI to cache prepared systems)


def save_system(path, sys: LinearSystem) -> None:
    """Write `m n hasReference`, then one `row... b` line per equation,
    then the reference vector on one line when present. Floats use %.17g
    so the round trip is exact."""
    lines = [f"{sys.m} {sys.n} {1 if sys.reference is not None else 0}"]
    for i in range(sys.m):
        entries = [f"{v:.17g}" for v in sys.a[i]]
        entries.append(f"{sys.b[i]:.17g}")
        lines.append(" ".join(entries))
    if sys.reference is not None:
        lines.append(" ".join(f"{v:.17g}" for v in sys.reference))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_system(path) -> LinearSystem:
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 3:
        raise ValueError(f"{path}: truncated system file")
    m, n, has_ref = int(tokens[0]), int(tokens[1]), int(tokens[2])
    need = 3 + m * (n + 1) + (n if has_ref else 0)
    if len(tokens) != need:
        raise ValueError(f"{path}: expected {need} tokens, found {len(tokens)}")
    body = np.array([float(t) for t in tokens[3:3 + m * (n + 1)]]).reshape(m, n + 1)
    A, b = body[:, :n], body[:, n]
    if not has_ref:
        return LinearSystem(A, b)
    ref = np.array([float(t) for t in tokens[3 + m * (n + 1):]])
    return LinearSystem(A, b, ref, A @ ref - b)
