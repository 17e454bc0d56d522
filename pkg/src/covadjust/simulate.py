"""Multivariate-normal data generation from a target covariance matrix.

Rows are drawn as ``Z @ L.T`` with ``L`` the Cholesky factor of the target
covariance and ``Z`` independent standard normals. Means are zero.

The bit stream comes from numpy's PCG64 (a 64-bit permuted congruential
generator); normal variates are produced by the Marsaglia polar method on
top of its uniforms, so results are reproducible for a given seed.
"""

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, DegenerateColumn
from .linalg import as_symmetric, cholesky

UINT64_MASK = (1 << 64) - 1

PRESETS = {
    "COV1": ((2.00, 0.65, 0.65), (0.65, 0.60, 0.00), (0.65, 0.00, 0.60)),
    "COV2": ((2.00, 0.65, 0.65), (0.65, 0.60, 0.25), (0.65, 0.25, 0.60)),
}
PRESET_NAMES = ("Y", "X1", "X2")


@dataclass(frozen=True)
class CovarianceSpec:
    """Population covariance among named variables; the first is the outcome."""

    variable_names: tuple
    matrix: np.ndarray

    def __post_init__(self):
        names = tuple(self.variable_names)
        mat = as_symmetric(self.matrix)
        if len(set(names)) != len(names) or any(not nm for nm in names):
            raise ConfigError(f"variable names must be unique and nonempty: {names}")
        if mat.shape[0] != len(names):
            raise ConfigError(
                f"{len(names)} names for a {mat.shape[0]}x{mat.shape[0]} matrix"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "variable_names", names)
        object.__setattr__(self, "matrix", mat)
        cholesky(mat)  # NotPositiveDefinite for an invalid spec

    @property
    def dim(self):
        return len(self.variable_names)

    @property
    def outcome(self):
        return self.variable_names[0]

    def to_dict(self):
        return {"names": list(self.variable_names), "covariance": self.matrix.tolist()}


@dataclass(frozen=True)
class SimulationConfig:
    spec: CovarianceSpec
    n: int
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if not 0 <= int(self.seed) <= UINT64_MASK:
            raise ConfigError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")


def make_rng(seed):
    """PCG64-backed generator for a 64-bit seed (wrapped modulo 2**64)."""
    return np.random.Generator(np.random.PCG64(int(seed) & UINT64_MASK))


def polar_normals(rng, size):
    """`size` standard normal variates via the Marsaglia polar method."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        # acceptance rate is pi/4, each accepted pair yields two variates
        need = size - filled
        pairs = int(need / 2 / 0.785) + 8
        u = rng.uniform(-1.0, 1.0, size=(pairs, 2))
        s = u[:, 0] ** 2 + u[:, 1] ** 2
        ok = (s > 0.0) & (s < 1.0)
        u, s = u[ok], s[ok]
        factor = np.sqrt(-2.0 * np.log(s) / s)
        z = (u * factor[:, None]).ravel()
        take = min(need, z.size)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def draw_mvn(spec, n, rng):
    """`(n, dim)` array of zero-mean normal draws with covariance ``spec.matrix``."""
    L = cholesky(spec.matrix)
    z = polar_normals(rng, n * spec.dim).reshape(n, spec.dim)
    return z @ L.T


def generate_mvn(cfg):
    """Simulate a Dataset according to `cfg` (deterministic in ``cfg.seed``)."""
    rows = draw_mvn(cfg.spec, cfg.n, make_rng(cfg.seed))
    return Dataset(cfg.spec.variable_names, rows)


def preset_scenario(name):
    """The two reference scenarios: ``COV1`` (uncorrelated regressors) and ``COV2``."""
    key = str(name).upper()
    if key not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return CovarianceSpec(PRESET_NAMES, np.array(PRESETS[key]))


def orthogonalize_columns(d, targets, rtol=1e-10):
    """Center `targets` and make them exactly pairwise orthogonal in-sample.

    Columns are processed in the given order; each is residualized on the
    already-processed ones (modified Gram-Schmidt, two passes). Columns not
    listed are returned untouched.
    """
    targets = list(targets)
    d.require(*targets)
    if len(set(targets)) != len(targets):
        raise DegenerateColumn(f"duplicate target columns: {targets}")
    if d.n <= len(targets):
        raise DegenerateColumn(
            f"need more rows ({d.n}) than orthogonalized columns ({len(targets)})"
        )
    done = []
    replaced = {}
    for name in targets:
        x = d.column(name) - d.column(name).mean()
        scale = np.linalg.norm(x)
        for _ in range(2):
            for q in done:
                x = x - (q @ x) / (q @ q) * q
        if scale == 0.0 or np.linalg.norm(x) <= rtol * scale:
            raise DegenerateColumn(
                f"column {name!r} is constant or collinear with {[t for t in targets if t in replaced]}"
            )
        done.append(x)
        replaced[name] = x
    return d.with_columns(replaced)
