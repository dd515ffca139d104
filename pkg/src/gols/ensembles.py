"""Seeded random problem instances: coefficient-matrix and sparse-signal ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import InvalidDimension, as_matrix, as_vector

GAUSSIAN = "gaussian"
BERNOULLI = "bernoulli"
MATRIX_KINDS = (GAUSSIAN, BERNOULLI)

GAUSSIAN_UNIT = "gaussian-unit"
RADEMACHER = "rademacher"
SIGNAL_DISTS = (GAUSSIAN_UNIT, RADEMACHER)

# Fixed sub-stream ids of a problem seed.  Every random draw in this module
# comes from one of these four streams, so a problem is reproducible from
# its single 64-bit seed alone.
STREAM_MATRIX = 0
STREAM_SUPPORT = 1
STREAM_NONZEROS = 2
STREAM_NOISE = 3


def substream(seed: int, stream_id: int) -> np.random.Generator:
    """Counter-based generator for one fixed sub-stream of ``seed``.

    The split rule is ``SeedSequence(entropy=seed, spawn_key=(stream_id,))``
    feeding a Philox engine; distinct stream ids give statistically
    independent streams of the same seed.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class MatrixEnsemble:
    """Coefficient-matrix distribution: i.i.d. N(0, 1/n) or uniform +-1/sqrt(n).

    ``normalize_columns`` additionally rescales every column to exact unit
    l2 norm (off by default: the raw variance-1/n draw already has unit
    expected column norm).
    """

    kind: str
    n: int
    m: int
    normalize_columns: bool = False

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"matrix kind must be one of {MATRIX_KINDS}")
        if self.n < 1 or self.m < 1:
            raise InvalidDimension("matrix ensemble needs n >= 1 and m >= 1")


@dataclass(frozen=True)
class SignalEnsemble:
    """Sparse-signal distribution: k non-zeros, N(0,1) or uniform {+1,-1}."""

    dist: str
    m: int
    k: int

    def __post_init__(self):
        if self.dist not in SIGNAL_DISTS:
            raise ValueError(f"signal dist must be one of {SIGNAL_DISTS}")
        if not 1 <= self.k <= self.m:
            raise InvalidDimension("signal ensemble needs 1 <= k <= m")


@dataclass
class SparseProblem:
    """One generated instance of ``y = A x + e`` with known ground truth."""

    A: np.ndarray
    x_true: np.ndarray
    support_true: tuple[int, ...]
    y: np.ndarray
    noise_sigma: float
    seed: int
    matrix_kind: str = GAUSSIAN
    signal_dist: str = GAUSSIAN_UNIT

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def k(self) -> int:
        return len(self.support_true)


def gen_matrix(e: MatrixEnsemble, seed: int) -> np.ndarray:
    """Draw an n x m coefficient matrix from the ensemble, deterministically in seed."""
    rng = substream(seed, STREAM_MATRIX)
    scale = 1.0 / np.sqrt(e.n)
    if e.kind == GAUSSIAN:
        A = rng.normal(0.0, scale, size=(e.n, e.m))
    else:
        A = (2.0 * rng.integers(0, 2, size=(e.n, e.m)) - 1.0) * scale
    if e.normalize_columns:
        A = A / np.linalg.norm(A, axis=0)
    return A


def gen_signal(e: SignalEnsemble, seed: int):
    """Draw a k-sparse signal; returns ``(x, support)`` with ``support`` sorted.

    The support is a uniformly random k-subset of ``{0..m-1}`` and the
    non-zero values are i.i.d. from the configured distribution, each from
    its own sub-stream of ``seed``.
    """
    support = np.sort(substream(seed, STREAM_SUPPORT).choice(e.m, size=e.k, replace=False))
    rng = substream(seed, STREAM_NONZEROS)
    if e.dist == GAUSSIAN_UNIT:
        values = rng.standard_normal(e.k)
    else:
        values = (2.0 * rng.integers(0, 2, size=e.k) - 1.0).astype(np.float64)
    x = np.zeros(e.m)
    x[support] = values
    return x, tuple(int(i) for i in support)


def make_problem(me: MatrixEnsemble, se: SignalEnsemble, noise_sigma: float,
                 seed: int) -> SparseProblem:
    """Assemble a full instance ``y = A x + e`` from the two ensembles.

    Sub-seeds for the matrix, the support, the non-zero values, and the
    noise come from the fixed sub-streams 0..3 of ``seed`` (see
    ``substream``).  With ``noise_sigma == 0`` the noise vector is exactly
    zero and ``y == A @ x`` to construction arithmetic.
    """
    if me.m != se.m:
        raise InvalidDimension(f"matrix has {me.m} columns but signal has length {se.m}")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    A = gen_matrix(me, seed)
    x, support = gen_signal(se, seed)
    y = A @ x
    if noise_sigma > 0:
        y = y + noise_sigma * substream(seed, STREAM_NOISE).standard_normal(me.n)
    return SparseProblem(
        A=A,
        x_true=x,
        support_true=support,
        y=y,
        noise_sigma=float(noise_sigma),
        seed=int(seed),
        matrix_kind=me.kind,
        signal_dist=se.dist,
    )


# Textual fixture format: a tagged header line, one key=value header row,
# then row-major A, x_true, and y with 17 significant digits (lossless for
# float64 round trips).
_FIXTURE_TAG = "gols-problem-v1"


def _fmt_row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def save_problem(problem: SparseProblem, path) -> None:
    """Write a problem to the textual fixture format (lossless round trip)."""
    lines = [_FIXTURE_TAG]
    lines.append(
        f"n={problem.n} m={problem.m} k={problem.k} "
        f"matrix={problem.matrix_kind} signal={problem.signal_dist} "
        f"seed={problem.seed} noise_sigma={format(problem.noise_sigma, '.17g')}"
    )
    lines.extend(_fmt_row(row) for row in problem.A)
    lines.append(_fmt_row(problem.x_true))
    lines.append(_fmt_row(problem.y))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_problem(path) -> SparseProblem:
    """Read a problem back from the fixture format written by ``save_problem``."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != _FIXTURE_TAG:
        raise ValueError(f"not a {_FIXTURE_TAG} fixture: {path}")
    header = dict(item.split("=", 1) for item in lines[1].split())
    n, m, k = int(header["n"]), int(header["m"]), int(header["k"])
    if len(lines) != 2 + n + 2:
        raise ValueError(f"fixture has {len(lines)} lines, expected {2 + n + 2}")
    A = as_matrix([[float(v) for v in lines[2 + i].split()] for i in range(n)], rows=n)
    if A.shape[1] != m:
        raise ValueError(f"fixture matrix has {A.shape[1]} columns, header says {m}")
    x_true = as_vector([float(v) for v in lines[2 + n].split()], length=m)
    y = as_vector([float(v) for v in lines[3 + n].split()], length=n)
    support = tuple(int(i) for i in np.nonzero(x_true)[0])
    if len(support) != k:
        raise ValueError(f"fixture signal has {len(support)} non-zeros, header says {k}")
    return SparseProblem(
        A=A,
        x_true=x_true,
        support_true=support,
        y=y,
        noise_sigma=float(header["noise_sigma"]),
        seed=int(header["seed"]),
        matrix_kind=header["matrix"],
        signal_dist=header["signal"],
    )
