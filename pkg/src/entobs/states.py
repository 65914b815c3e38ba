"""Density matrices: the six structured families and the eight initial states."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidWeights, NotHermitian, NotPositive, PositivityViolation, TraceNotOne
from .linalg import as_matrix, dagger, eigvalsh_batch

STATE_TOL = 1e-12
WEIGHT_SLACK = 1e-12
POSITIVITY_SLACK = 1e-14


@dataclass(frozen=True)
class DensityMatrix:
    """A validated two-qubit state. Build through :func:`validate_density_matrix`."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def validate_density_matrix(m, tol: float = STATE_TOL) -> DensityMatrix:
    if isinstance(m, DensityMatrix):
        m = m.matrix
    m = as_matrix(m)
    defect = np.max(np.abs(m - dagger(m)))
    if defect > tol:
        raise NotHermitian(f"max |rho - rho^dagger| = {defect:.3e} exceeds {tol:g}")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"trace is {tr!r}, expected 1")
    lam = eigvalsh_batch(m[None], check=False)[0]
    if lam[0] < -tol:
        raise NotPositive(f"smallest eigenvalue {lam[0]:.3e} is below -{tol:g}")
    return DensityMatrix(m)


def projector(ket) -> DensityMatrix:
    ket = np.asarray(ket, dtype=np.complex128)
    return validate_density_matrix(np.outer(ket, np.conj(ket)))


# -- the six families -------------------------------------------------------

# weight parameters, populated diagonal slots, coherence slot (upper), and the
# slot of the population outside the coherent 2x2 block (None for 1 and 2)
FAMILY_WEIGHTS = {1: ("a",), 2: ("b",), 3: ("c", "d"), 4: ("a", "b"), 5: ("c", "d"), 6: ("b", "d")}
FAMILY_SUPPORT = {1: (0, 3), 2: (1, 2), 3: (1, 2, 3), 4: (0, 1, 2), 5: (0, 2, 3), 6: (0, 1, 3)}
FAMILY_SLOT = {1: (0, 3), 2: (1, 2), 3: (1, 2), 4: (1, 2), 5: (0, 3), 6: (0, 3)}
FAMILY_SPECTATOR = {1: None, 2: None, 3: 3, 4: 0, 5: 2, 6: 1}
# where each weight parameter sits on the diagonal
_WEIGHT_SLOT = {1: {"a": 0}, 2: {"b": 1}, 3: {"c": 2, "d": 3}, 4: {"a": 0, "b": 1},
                5: {"c": 2, "d": 3}, 6: {"b": 1, "d": 3}}


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of family ``rho_family``; weights the family does not use stay 0."""

    family: int
    v: float = 0.0
    alpha: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def weights(self) -> dict:
        return {k: getattr(self, k) for k in FAMILY_WEIGHTS[self.family]}

    def diagonal(self) -> np.ndarray:
        diag = np.zeros(4)
        free = list(FAMILY_SUPPORT[self.family])
        for name, slot in _WEIGHT_SLOT[self.family].items():
            diag[slot] = getattr(self, name)
            free.remove(slot)
        (rest,) = free
        diag[rest] = 1.0 - sum(self.weights().values())
        return diag

    @property
    def spectator(self) -> float:
        """Population outside the coherent block (0 for families 1 and 2)."""
        slot = FAMILY_SPECTATOR[self.family]
        return 0.0 if slot is None else float(self.diagonal()[slot])


def check_params(p: FamilyParams) -> None:
    if p.family not in FAMILY_WEIGHTS:
        raise InvalidWeights(f"family must be 1..6, got {p.family!r}")
    vals = [p.v, p.alpha, p.a, p.b, p.c, p.d]
    if not all(np.isfinite(x) for x in vals):
        raise InvalidWeights("family parameters must be finite")
    used = FAMILY_WEIGHTS[p.family]
    for name in "abcd":
        if name not in used and getattr(p, name) != 0.0:
            raise InvalidWeights(f"family {p.family} has no weight {name!r}")
    for name in used:
        w = getattr(p, name)
        if not 0.0 <= w <= 1.0:
            raise InvalidWeights(f"weight {name}={w!r} outside [0, 1]")
    diag = p.diagonal()
    if np.any(diag < -WEIGHT_SLACK) or np.any(diag > 1.0 + WEIGHT_SLACK):
        raise InvalidWeights(f"diagonal {diag.tolist()} has entries outside [0, 1]")
    if p.v < 0.0:
        raise InvalidWeights(f"v must be non-negative (absorb its sign into alpha), got {p.v!r}")
    i, j = FAMILY_SLOT[p.family]
    bound = max(diag[i], 0.0) * max(diag[j], 0.0)
    if p.v * p.v > bound + POSITIVITY_SLACK:
        raise PositivityViolation(f"v^2 = {p.v * p.v:.6g} exceeds the block bound {bound:.6g}")


def family_matrix(p: FamilyParams) -> np.ndarray:
    m = np.diag(p.diagonal()).astype(np.complex128)
    i, j = FAMILY_SLOT[p.family]
    m[i, j] = np.exp(-1j * p.alpha) * p.v
    m[j, i] = np.exp(1j * p.alpha) * p.v
    return m


def build_family(p: FamilyParams) -> DensityMatrix:
    check_params(p)
    return DensityMatrix(family_matrix(p))


def pattern_residual(m, family: int) -> float:
    """Largest magnitude among the entries ``family`` requires to vanish."""
    m = m.matrix if isinstance(m, DensityMatrix) else np.asarray(m)
    res = np.max(np.abs(m[..., _zero_mask(family)]), axis=-1)
    return float(res) if m.ndim == 2 else res


def _zero_mask(family: int) -> np.ndarray:
    keep = np.zeros((4, 4), dtype=bool)
    for k in FAMILY_SUPPORT[family]:
        keep[k, k] = True
    i, j = FAMILY_SLOT[family]
    keep[i, j] = keep[j, i] = True
    return ~keep


def extract_params(m, family: int, tol: float = STATE_TOL) -> FamilyParams:
    """Read family parameters off a matrix (no validation)."""
    m = m.matrix if isinstance(m, DensityMatrix) else np.asarray(m)
    i, j = FAMILY_SLOT[family]
    coh = m[i, j]
    v = float(abs(coh))
    alpha = float(-np.angle(coh)) if v > tol else 0.0
    weights = {k: float(m[slot, slot].real) for k, slot in _WEIGHT_SLOT[family].items()}
    return FamilyParams(family, v=v, alpha=alpha, **weights)


def classify_family(rho, tol: float = STATE_TOL) -> dict:
    """All families whose zero pattern ``rho`` matches, with extracted parameters."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return {f: extract_params(m, f, tol) for f in FAMILY_WEIGHTS if pattern_residual(m, f) <= tol}


def random_family_params(family: int, rng: np.random.Generator) -> FamilyParams:
    """Seeded draw of a valid parameter set for ``family``."""
    support = FAMILY_SUPPORT[family]
    pops = rng.dirichlet(np.ones(len(support)))
    diag = np.zeros(4)
    diag[list(support)] = pops
    i, j = FAMILY_SLOT[family]
    v = float(rng.uniform(0.0, 1.0) * np.sqrt(diag[i] * diag[j]))
    alpha = float(rng.uniform(0.0, 2.0 * np.pi))
    weights = {k: float(diag[slot]) for k, slot in _WEIGHT_SLOT[family].items()}
    return FamilyParams(family, v=v, alpha=alpha, **weights)


# -- initial states ---------------------------------------------------------


class PureKind(str, Enum):
    PSI = "Psi"
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"


@dataclass(frozen=True)
class PureInitialState:
    kind: PureKind
    theta: float
    alpha: float | None = None

    def __post_init__(self):
        kind = PureKind(self.kind)
        object.__setattr__(self, "kind", kind)
        fixed = {PureKind.PHI_PLUS: 0.0, PureKind.PHI_MINUS: np.pi}.get(kind)
        if fixed is None:
            object.__setattr__(self, "alpha", 0.0 if self.alpha is None else float(self.alpha))
        else:
            if self.alpha is not None and not np.isclose(np.exp(1j * self.alpha), np.exp(1j * fixed)):
                raise ValueError(f"{kind.value} fixes alpha = {fixed}")
            object.__setattr__(self, "alpha", fixed)

    def ket(self) -> np.ndarray:
        st, ct = np.sin(self.theta), np.cos(self.theta)
        ket = np.zeros(4, dtype=np.complex128)
        if self.kind is PureKind.PSI:
            ket[0], ket[3] = st, np.exp(-1j * self.alpha) * ct
        else:
            ket[1] = st
            ket[2] = ct if self.kind is PureKind.PHI_PLUS else -ct
        return ket


def pure_initial(state: PureInitialState) -> DensityMatrix:
    ket = state.ket()
    return DensityMatrix(np.outer(ket, np.conj(ket)))


@dataclass(frozen=True)
class MixedInitialState:
    kind: int
    theta: float

    def __post_init__(self):
        if self.kind not in range(1, 7):
            raise ValueError(f"mixed initial state kind must be 1..6, got {self.kind!r}")


# basis slots carrying sin^2 and cos^2 weights
_MIXED_SLOTS = {1: (0, 3), 2: (1, 2), 3: (2, 3), 4: (1, 3), 5: (0, 2), 6: (0, 1)}


def mixed_initial(state: MixedInitialState) -> DensityMatrix:
    """Diagonal initial mixture; kind 6 is the Hermitian reading sin^2|00><00| + cos^2|01><01|."""
    i, j = _MIXED_SLOTS[state.kind]
    diag = np.zeros(4)
    diag[i] = np.sin(state.theta) ** 2
    diag[j] = np.cos(state.theta) ** 2
    return DensityMatrix(np.diag(diag).astype(np.complex128))


def printed_mixed_6(theta: float) -> np.ndarray:
    """The kind-6 mixture in its as-printed form: sin^2|01><00| + cos^2|01><01| (not Hermitian)."""
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 0] = np.sin(theta) ** 2
    m[1, 1] = np.cos(theta) ** 2
    return m
