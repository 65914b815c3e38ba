"""Spin-tensor operators, total-spin observables and two-qubit Hamiltonians.

Basis ordering is |00>, |01>, |10>, |11> throughout.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Mapping

import numpy as np

from .errors import MissingParameter, NonRealExpectation, NotFinite, NotHermitian
from .linalg import SIGMA, as_matrix, is_hermitian, kron

IMAG_TOL = 1e-12
FORM_TOL = 1e-12


@dataclass(frozen=True)
class Observable:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if not is_hermitian(m, 1e-12):
            raise NotHermitian(f"observable {self.label!r} is not Hermitian")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def _pauli_index(k) -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= int(k) <= 3:
        raise ValueError(f"Pauli index must be 0, 1, 2 or 3, got {k!r}")
    return int(k)


@lru_cache(maxsize=None)
def _spin_tensor(mu: int, nu: int) -> Observable:
    return Observable(kron(SIGMA[mu], SIGMA[nu]), f"s_{{{mu}{nu}}}")


def spin_tensor(mu, nu) -> Observable:
    """``s_{mu nu} = sigma_mu (x) sigma_nu``."""
    return _spin_tensor(_pauli_index(mu), _pauli_index(nu))


def s(mu, nu) -> np.ndarray:
    """Shorthand for the raw matrix of :func:`spin_tensor`."""
    return spin_tensor(mu, nu).matrix


def total_spin(i) -> Observable:
    i = _pauli_index(i)
    if i == 0:
        raise ValueError("total spin component index must be 1, 2 or 3")
    return Observable(0.5 * (s(i, 0) + s(0, i)), "S_" + "xyz"[i - 1])


@lru_cache(maxsize=None)
def total_spin_z() -> Observable:
    return total_spin(3)


@lru_cache(maxsize=None)
def total_spin_squared() -> Observable:
    comps = [total_spin(i).matrix for i in (1, 2, 3)]
    return Observable(sum(c @ c for c in comps), "S^2")


def expectation(o, rho) -> float:
    """Real expectation value ``Tr(O rho)``.

    ``o`` may be an :class:`Observable` or a raw matrix, ``rho`` a
    :class:`~entobs.states.DensityMatrix` or a raw matrix.
    """
    om = o.matrix if isinstance(o, Observable) else np.asarray(o)
    rm = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho)
    val = np.einsum("ij,ji->", om, rm)
    if abs(val.imag) > IMAG_TOL:
        raise NonRealExpectation(f"Tr(O rho) has imaginary part {val.imag:.3e}")
    return float(val.real)


def expectations(o, rhos) -> np.ndarray:
    """Vectorised :func:`expectation` over a stack ``(..., 4, 4)`` of states."""
    om = o.matrix if isinstance(o, Observable) else np.asarray(o)
    vals = np.einsum("ij,...ji->...", om, rhos)
    worst = np.max(np.abs(vals.imag), initial=0.0)
    if worst > IMAG_TOL:
        raise NonRealExpectation(f"Tr(O rho) has imaginary part {worst:.3e}")
    return vals.real


# -- Hamiltonians -----------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianCoefficients:
    """Real table ``h[mu, nu]`` of ``H = sum h_{mu nu} s_{mu nu}``."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.shape != (4, 4):
            raise ValueError(f"coefficient table must be 4x4, got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise NotFinite("coefficient table has non-finite entries")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)

    @classmethod
    def from_entries(cls, **entries: float) -> "HamiltonianCoefficients":
        """Build from keyword entries such as ``h30=1.0, h12=0.5``."""
        h = np.zeros((4, 4))
        for key, val in entries.items():
            if len(key) != 3 or key[0] != "h" or key[1] not in "0123" or key[2] not in "0123":
                raise ValueError(f"bad coefficient name {key!r}")
            h[int(key[1]), int(key[2])] = val
        return cls(h)


def hamiltonian_from_coefficients(c: HamiltonianCoefficients) -> Observable:
    h = c.h if isinstance(c, HamiltonianCoefficients) else HamiltonianCoefficients(c).h
    mat = np.zeros((4, 4), dtype=np.complex128)
    for mu in range(4):
        for nu in range(4):
            if h[mu, nu] != 0.0:
                mat += h[mu, nu] * s(mu, nu)
    return Observable(mat, "H")


class Form(str, Enum):
    H1 = "H1"
    H2 = "H2"
    H11 = "H11"
    H12 = "H12"
    H21 = "H21"
    H22 = "H22"


FORM_PARAMS = {
    Form.H1: ("h30", "h03", "f1", "g1", "h33"),
    Form.H2: ("h30", "h03", "f2", "g2", "h33"),
    Form.H11: ("omega1", "g1", "h1"),
    Form.H12: ("omega2", "f1", "h1"),
    Form.H21: ("omega2", "g2", "h2"),
    Form.H22: ("omega2", "f2", "h2"),
}
PARAM_ALIASES = {"ω1": "omega1", "ω2": "omega2", "w1": "omega1", "w2": "omega2"}


@dataclass(frozen=True)
class NamedHamiltonian:
    form: Form
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "form", Form(self.form))
        params = {PARAM_ALIASES.get(k, k): float(v) for k, v in dict(self.params).items()}
        object.__setattr__(self, "params", params)

    def get(self, name: str) -> float:
        if name not in self.params:
            raise MissingParameter(name, self.form.value)
        val = self.params[name]
        if not np.isfinite(val):
            raise NotFinite(f"parameter {name!r} is not finite")
        return val

    def required(self) -> dict:
        return {k: self.get(k) for k in FORM_PARAMS[self.form]}


def named_hamiltonian(form, params: Mapping[str, float] | None = None) -> Observable:
    """Build one of the named Hamiltonians directly from spin-tensor sums."""
    nh = form if isinstance(form, NamedHamiltonian) else NamedHamiltonian(form, params or {})
    p = nh.required()
    f = nh.form
    if f is Form.H1:
        mat = (p["h30"] * s(3, 0) + p["h03"] * s(0, 3) + p["f1"] * (s(1, 2) - s(2, 1))
               + p["g1"] * (s(1, 1) + s(2, 2)) + p["h33"] * s(3, 3))
    elif f is Form.H2:
        mat = (p["h30"] * s(3, 0) + p["h03"] * s(0, 3) + p["f2"] * (s(1, 2) + s(2, 1))
               + p["g2"] * (s(1, 1) - s(2, 2)) + p["h33"] * s(3, 3))
    elif f is Form.H11:
        mat = (0.5 * p["omega1"] * (s(3, 0) + s(0, 3)) + p["g1"] * (s(1, 1) + s(2, 2))
               + p["h1"] * s(3, 3))
    elif f is Form.H12:
        mat = (0.5 * p["omega2"] * (s(3, 0) + s(0, 3)) + p["f1"] * (s(1, 2) - s(2, 1))
               + p["h1"] * s(3, 3))
    elif f is Form.H21:
        mat = (0.5 * p["omega2"] * (s(3, 0) - s(0, 3)) + p["g2"] * (s(1, 1) - s(2, 2))
               + p["h2"] * s(3, 3))
    else:
        mat = (0.5 * p["omega2"] * (s(3, 0) - s(0, 3)) + p["f2"] * (s(1, 2) + s(2, 1))
               + p["h2"] * s(3, 3))
    return Observable(mat, f"H[{f.value}]")


def named_coefficients(form, params: Mapping[str, float] | None = None) -> HamiltonianCoefficients:
    """Coefficient table equivalent to :func:`named_hamiltonian`."""
    nh = form if isinstance(form, NamedHamiltonian) else NamedHamiltonian(form, params or {})
    p = nh.required()
    h = np.zeros((4, 4))
    f = nh.form
    if f in (Form.H1, Form.H2):
        h[3, 0], h[0, 3], h[3, 3] = p["h30"], p["h03"], p["h33"]
    elif f in (Form.H11, Form.H12):
        w = p["omega1"] if f is Form.H11 else p["omega2"]
        h[3, 0] = h[0, 3] = 0.5 * w
        h[3, 3] = p["h1"]
    else:
        h[3, 0], h[0, 3] = 0.5 * p["omega2"], -0.5 * p["omega2"]
        h[3, 3] = p["h2"]
    if f in (Form.H1, Form.H11):
        h[1, 1] = h[2, 2] = p["g1"]
    if f in (Form.H1, Form.H12):
        h[1, 2], h[2, 1] = p["f1"], -p["f1"]
    if f in (Form.H2, Form.H21):
        h[1, 1], h[2, 2] = p["g2"], -p["g2"]
    if f in (Form.H2, Form.H22):
        h[1, 2] = h[2, 1] = p["f2"]
    return HamiltonianCoefficients(h)


_FREE_ENTRIES = {(0, 0), (3, 0), (0, 3), (3, 3), (1, 1), (2, 2), (1, 2), (2, 1)}


def matches_form(c: HamiltonianCoefficients, form) -> bool:
    """True iff ``c`` has the H[1] or H[2] coefficient pattern (to 1e-12).

    ``h00`` is tolerated: a global energy offset changes no state.
    """
    form = Form(form)
    if form not in (Form.H1, Form.H2):
        raise ValueError("matches_form accepts only H1 or H2")
    h = c.h if isinstance(c, HamiltonianCoefficients) else np.asarray(c, dtype=float)
    for mu in range(4):
        for nu in range(4):
            if (mu, nu) not in _FREE_ENTRIES and abs(h[mu, nu]) > FORM_TOL:
                return False
    sgn = 1.0 if form is Form.H1 else -1.0
    return bool(abs(h[1, 2] + sgn * h[2, 1]) <= FORM_TOL and abs(h[1, 1] - sgn * h[2, 2]) <= FORM_TOL)


def random_form_coefficients(form, rng: np.random.Generator, symmetric: bool = False,
                             scale: float = 1.0) -> HamiltonianCoefficients:
    """Seeded random H[1]/H[2] table; ``symmetric`` forces ``h03 == h30``."""
    form = Form(form)
    draw = lambda: float(rng.uniform(-scale, scale))
    if form is Form.H1:
        p = dict(h30=draw(), h03=draw(), f1=draw(), g1=draw(), h33=draw())
    elif form is Form.H2:
        p = dict(h30=draw(), h03=draw(), f2=draw(), g2=draw(), h33=draw())
    else:
        raise ValueError("random_form_coefficients accepts only H1 or H2")
    if symmetric:
        p["h03"] = p["h30"]
    h = named_coefficients(form, p).h.copy()
    h[0, 0] = draw()
    return HamiltonianCoefficients(h)
