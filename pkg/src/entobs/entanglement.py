"""Negativity: the partial-transpose oracle and the closed-form relations.

Every formula comes in two variants. ``AS_PRINTED`` evaluates the
expressions literally as printed; ``CORRECTED`` is the version that agrees
with the oracle ``N = sum |negative eigenvalues of rho^T2|``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .linalg import eigvalsh_batch
from .spin import expectations, s, total_spin_squared, total_spin_z
from .states import DensityMatrix, FamilyParams, build_family

RADICAND_SLACK = 1e-12
OBS_SLACK = 1e-9


class Variant(str, Enum):
    AS_PRINTED = "as_printed"
    CORRECTED = "corrected"


# -- oracle -----------------------------------------------------------------


def _raw(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit: ((a,b),(c,d)) -> ((a,d),(c,b)). Works on stacks."""
    m = _raw(rho)
    lead = m.shape[:-2]
    t = m.reshape(lead + (2, 2, 2, 2))
    return np.swapaxes(t, -3, -1).reshape(lead + (4, 4))


def negativity_batch(rhos) -> np.ndarray:
    """Oracle negativity of every state in a stack ``(..., 4, 4)``."""
    m = _raw(rhos)
    lead = m.shape[:-2]
    pt = partial_transpose(m).reshape((-1, 4, 4))
    lam = eigvalsh_batch(pt, check=False)
    # "+ 0.0" turns a signed -0.0 into 0.0
    return (np.maximum(-lam, 0.0).sum(axis=1) + 0.0).reshape(lead)


def negativity_oracle(rho) -> float:
    return float(negativity_batch(_raw(rho)[None])[0])


# -- observables ------------------------------------------------------------


@dataclass(frozen=True)
class ObservableVector:
    """Expectation values <s11>, <s12>, <S_z>, <S^2>."""

    s11: float
    s12: float
    sz: float
    s2: float

    def __post_init__(self):
        vals = (self.s11, self.s12, self.sz, self.s2)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("observable values must be finite")
        if not -1.0 - OBS_SLACK <= self.sz <= 1.0 + OBS_SLACK:
            raise ValueError(f"<S_z> = {self.sz!r} outside [-1, 1]")
        if not -OBS_SLACK <= self.s2 <= 2.0 + OBS_SLACK:
            raise ValueError(f"<S^2> = {self.s2!r} outside [0, 2]")

    @classmethod
    def of(cls, rho) -> "ObservableVector":
        return cls(*(float(x) for x in observable_arrays(_raw(rho))))


def observable_arrays(rhos):
    """``(s11, s12, sz, s2)`` expectation arrays for a stack of states."""
    m = _raw(rhos)
    return (expectations(s(1, 1), m), expectations(s(1, 2), m),
            expectations(total_spin_z(), m), expectations(total_spin_squared(), m))


# -- formulas -----------------------------------------------------------------


def _sqrt(x, strict: bool, what: str):
    x = np.asarray(x, dtype=float)
    bad = x < -RADICAND_SLACK
    if np.any(bad):
        if strict:
            worst = float(np.min(x))
            raise DomainError(f"{what}: negative radicand {worst:.6g}")
        x = np.where(bad, np.nan, x)
    return np.sqrt(np.where(x < 0.0, 0.0, x))


_PRINTED_WEIGHT = {3: "d", 4: "a", 5: "c", 6: "b"}


def family_negativity(p: FamilyParams, variant=Variant.CORRECTED) -> float:
    """Closed-form negativity of a family member."""
    variant = Variant(variant)
    if p.family in (1, 2):
        return abs(p.v)
    if variant is Variant.AS_PRINTED:
        x = getattr(p, _PRINTED_WEIGHT[p.family])
        return float(np.sqrt(x * x + p.v * p.v) - x)
    x = p.spectator
    return float(0.5 * (np.sqrt(x * x + 4.0 * p.v * p.v) - x))


def observable_formula(family: int, s11, s12, sz, s2, variant=Variant.CORRECTED):
    """Vectorised observable relation for ``family``; see :func:`observable_negativity`."""
    variant = Variant(variant)
    coh2 = np.asarray(s11) ** 2 + np.asarray(s12) ** 2
    if family in (1, 2):
        return 0.5 * np.sqrt(coh2)
    if family in (3, 4):
        x = -np.asarray(sz) if family == 3 else np.asarray(sz)
    elif family in (5, 6):
        x = 2.0 - np.asarray(s2)
    else:
        raise ValueError(f"family must be 1..6, got {family!r}")
    root = 0.5 * np.sqrt(coh2 + x * x)
    if variant is Variant.CORRECTED:
        return root - 0.5 * x
    # printed: the half multiplies only the root
    return root - x


def observable_negativity(family: int, obs: ObservableVector, variant=Variant.CORRECTED) -> float:
    """Negativity from spin-tensor expectation values.

    The corrected relation is ``(sqrt(<s11>^2 + <s12>^2 + X^2) - X) / 2`` with
    ``X = 0`` (families 1, 2), ``-<S_z>`` (3), ``<S_z>`` (4) and
    ``2 - <S^2>`` (5, 6).
    """
    return float(observable_formula(family, obs.s11, obs.s12, obs.sz, obs.s2, variant))


class ScenarioKind(str, Enum):
    PSI = "Psi"
    PHI = "Phi"
    M1 = "M1"
    M2 = "M2"
    M34 = "M34"
    M56 = "M56"
    M3456_H2X = "M3456_H2x"


# family whose corrected observable relation a mixed scenario lands in
SCENARIO_FAMILY = {ScenarioKind.PSI: 1, ScenarioKind.PHI: 2, ScenarioKind.M1: 1, ScenarioKind.M2: 2,
                   ScenarioKind.M34: 3, ScenarioKind.M56: 4, ScenarioKind.M3456_H2X: 5}


def sz_complements(rhos):
    """``(<1 - S_z>, <1 + S_z>)`` read from populations, exact near |00> and |11>."""
    p = np.diagonal(_raw(rhos), axis1=-2, axis2=-1).real
    return p[..., 1] + p[..., 2] + 2.0 * p[..., 3], 2.0 * p[..., 0] + p[..., 1] + p[..., 2]


def scenario_formula(kind, s11, s12, sz, s2, sz0=None, variant=Variant.CORRECTED, strict=True,
                     complements=None):
    """Vectorised scenario negativity. With ``strict=False`` domain errors become NaN.

    ``complements`` optionally supplies ``(<1 - S_z>, <1 + S_z>)`` measured
    directly (see :func:`sz_complements`); the Psi relation then avoids the
    cancellation in ``1 - <S_z>^2`` close to product states.
    """
    kind = ScenarioKind(kind)
    variant = Variant(variant)
    sz = np.asarray(sz, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    label = f"{kind.value}/{variant.value}"
    if kind is ScenarioKind.M1:
        if sz0 is None:
            raise ValueError("M1 needs the time-zero <S_z>")
        return 0.5 * _sqrt(np.asarray(sz0) ** 2 - sz ** 2, strict, label)
    if kind in (ScenarioKind.PHI, ScenarioKind.M2):
        return 0.5 * _sqrt((s2 - 1.0) ** 2, strict, label)
    if kind is ScenarioKind.PSI:
        lo, hi = complements if complements is not None else (1.0 - sz, 1.0 + sz)
        rad = lo if variant is Variant.AS_PRINTED else lo * hi
        return 0.5 * _sqrt(rad, strict, label)
    if variant is Variant.CORRECTED:
        return observable_formula(SCENARIO_FAMILY[kind], s11, s12, sz, s2, Variant.CORRECTED)
    if kind is ScenarioKind.M34:
        return _sqrt(sz ** 2 + (s2 + sz - 1.0) ** 2, strict, label) + sz
    if kind is ScenarioKind.M56:
        return _sqrt(sz ** 2 + (s2 - sz - 1.0) ** 2, strict, label) - sz
    return _sqrt((2.0 - s2) ** 2 + (s2 - 1.0) ** 2 - sz ** 2, strict, label) + s2 - 2.0


def scenario_negativity(kind, obs: ObservableVector, obs0: ObservableVector | None = None,
                        variant=Variant.CORRECTED) -> float:
    """Negativity formulas attached to the pure and mixed initial-state scenarios.

    Raises :class:`~entobs.errors.DomainError` on a negative radicand.
    """
    sz0 = None if obs0 is None else obs0.sz
    return float(scenario_formula(kind, obs.s11, obs.s12, obs.sz, obs.s2, sz0, variant, strict=True))


# -- discrepancies ------------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyRecord:
    context: str
    printed_value: float
    corrected_value: float
    oracle_value: float
    abs_deviation_printed: float

    @property
    def abs_deviation_corrected(self) -> float:
        return abs(self.corrected_value - self.oracle_value)


@dataclass(frozen=True)
class ScenarioPoint:
    """A state evaluated against a scenario formula (``rho0`` needed for M1)."""

    kind: ScenarioKind
    rho: object
    rho0: object = None


def _record(context, printed, corrected, oracle) -> DiscrepancyRecord:
    return DiscrepancyRecord(context, float(printed), float(corrected), float(oracle),
                             float(abs(printed - oracle)))


def discrepancy(context: str, point, relation: str = "closed_form") -> DiscrepancyRecord:
    """Evaluate both formula variants and the oracle at one point.

    ``point`` is a :class:`FamilyParams` (``relation`` picks the closed form or
    the observable relation) or a :class:`ScenarioPoint`. A printed formula that
    hits a negative radicand is recorded as NaN.
    """
    if isinstance(point, FamilyParams):
        rho = build_family(point)
        oracle = negativity_oracle(rho)
        if relation == "closed_form":
            return _record(context, family_negativity(point, Variant.AS_PRINTED),
                           family_negativity(point, Variant.CORRECTED), oracle)
        if relation == "observable":
            obs = ObservableVector.of(rho)
            return _record(context, observable_negativity(point.family, obs, Variant.AS_PRINTED),
                           observable_negativity(point.family, obs, Variant.CORRECTED), oracle)
        raise ValueError(f"unknown relation {relation!r}")
    if isinstance(point, ScenarioPoint):
        obs = ObservableVector.of(point.rho)
        obs0 = None if point.rho0 is None else ObservableVector.of(point.rho0)
        oracle = negativity_oracle(point.rho)
        try:
            printed = scenario_negativity(point.kind, obs, obs0, Variant.AS_PRINTED)
        except DomainError:
            printed = float("nan")
        return _record(context, printed, scenario_negativity(point.kind, obs, obs0, Variant.CORRECTED),
                       oracle)
    raise TypeError(f"unsupported point type {type(point).__name__}")
