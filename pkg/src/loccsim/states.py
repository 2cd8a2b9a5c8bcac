"""Pure states on labeled qubit registers, reduced densities, and Schmidt data.

Conventions used throughout the package:

* a register is an ordered list of integer site labels, each owned by one party;
* the first site in register order is the most significant bit of the
  amplitude index, so ``|b1 b2 ... bn>`` sits at index ``sum(b_i << (n-i))``;
* states are stored as unit-norm complex vectors of length ``2**n``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConstraintViolation,
    DegenerateState,
    EmptySubset,
    LabelCollision,
    RegisterMismatch,
    WrongArity,
)

NORM_TOL = 1e-9
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-10


@dataclass(frozen=True)
class Register:
    """Ordered qubit sites with a party label per site."""

    sites: tuple[int, ...]
    parties: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "parties", tuple(str(p) for p in self.parties))
        if len(self.sites) == 0:
            raise ConstraintViolation("register needs at least one site")
        if len(self.sites) != len(self.parties):
            raise ConstraintViolation("one party label per site required")
        if len(set(self.sites)) != len(self.sites):
            raise LabelCollision(f"duplicate site labels in {self.sites}")

    @classmethod
    def of(cls, assignment: Sequence[tuple[int, str]]) -> "Register":
        sites = tuple(s for s, _ in assignment)
        parties = tuple(p for _, p in assignment)
        return cls(sites, parties)

    @classmethod
    def for_parties(cls, *parties: str, start: int = 1) -> "Register":
        """One site per party, labeled ``start``, ``start+1``, ..."""
        return cls(tuple(range(start, start + len(parties))), tuple(parties))

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return 2 ** len(self.sites)

    def axis_of(self, site: int) -> int:
        try:
            return self.sites.index(site)
        except ValueError:
            raise KeyError(f"site {site} not in register {self.sites}") from None

    def party_of(self, site: int) -> str:
        return self.parties[self.axis_of(site)]

    def party_labels(self) -> tuple[str, ...]:
        """Distinct party labels, sorted."""
        return tuple(sorted(set(self.parties)))

    def sites_of(self, parties: Iterable[str]) -> tuple[int, ...]:
        """Sites owned by any of ``parties``, in register order."""
        wanted = set(parties)
        unknown = wanted - set(self.parties)
        if unknown:
            raise ValueError(f"unknown parties {sorted(unknown)}")
        return tuple(s for s, p in zip(self.sites, self.parties) if p in wanted)

    def without(self, drop: Iterable[int]) -> "Register":
        gone = set(drop)
        keep = [(s, p) for s, p in zip(self.sites, self.parties) if s not in gone]
        return Register.of(keep)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector over a register."""

    register: Register
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.register.dim,):
            raise ConstraintViolation(
                f"amplitude vector must have length {self.register.dim}, got {amps.shape}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ConstraintViolation(f"state norm {nrm!r} deviates from 1 by > {NORM_TOL}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return self.register.n_sites

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per site, register order."""
        return self.amplitudes.reshape((2,) * self.n_sites)

    def overlap(self, other: "PureState") -> complex:
        if self.register != other.register:
            raise RegisterMismatch("overlap requires identical registers")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def is_close(self, other: "PureState", tol: float = 1e-9) -> bool:
        """Equality up to a global phase."""
        return abs(self.overlap(other)) > 1.0 - tol

    def permuted(self, site_order: Sequence[int]) -> "PureState":
        """Same physical state with register sites listed in ``site_order``."""
        order = tuple(int(s) for s in site_order)
        if sorted(order) != sorted(self.register.sites):
            raise ValueError(f"{order} is not a permutation of {self.register.sites}")
        axes = [self.register.axis_of(s) for s in order]
        data = np.transpose(self.tensor_view(), axes).reshape(-1)
        reg = Register(order, tuple(self.register.party_of(s) for s in order))
        return PureState(reg, data)

    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(repr(self.register).encode())
        h.update(np.round(self.amplitudes, 12).tobytes())
        return f"q{self.n_sites}:{h.hexdigest()[:10]}"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced density operator on the sites owned by a party subset.

    Row index runs over the retained sites in register order, first retained
    site most significant.
    """

    parties: tuple[str, ...]
    matrix: np.ndarray
    sites: tuple[int, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConstraintViolation(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ConstraintViolation("density matrix is not Hermitian within 1e-12")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ConstraintViolation(f"density matrix trace {tr!r} deviates from 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ConstraintViolation("density matrix has an eigenvalue below -1e-10")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "parties", tuple(self.parties))
        object.__setattr__(self, "sites", tuple(self.sites))

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, nonincreasing."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Squared Schmidt coefficients plus the orthonormal bases of a cut.

    ``coeffs`` is nonincreasing, sums to one, and is padded with (numerical)
    zeros up to the smaller cut dimension.  The source state is
    ``sum_i sqrt(coeffs[i]) |left_basis[:, i]> |right_basis[:, i]>``.
    """

    coeffs: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ConstraintViolation("coeffs must be a nonempty vector")
        if c.min() < -1e-12:
            raise ConstraintViolation("negative Schmidt coefficient")
        if abs(c.sum() - 1.0) > NORM_TOL:
            raise ConstraintViolation(f"Schmidt coefficients sum to {c.sum()!r}, not 1")
        if np.any(np.diff(c) > 1e-12):
            raise ConstraintViolation("Schmidt coefficients must be nonincreasing")
        object.__setattr__(self, "coeffs", c)

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.coeffs > tol * self.coeffs[0]))


# ---------------------------------------------------------------------------
# named families


def _require_sites(register: Register, n: int, what: str) -> None:
    if register.n_sites != n:
        raise WrongArity(f"{what} needs a {n}-site register, got {register.n_sites} sites")


def w_family(a: float, b: float, c: float, d: float, register: Register) -> PureState:
    """State ``sqrt(a)|100> + sqrt(b)|010> + sqrt(c)|001> + sqrt(d)|000>``.

    Requires ``a, b, c > 0``, ``d >= 0`` and ``a+b+c+d == 1`` (within 1e-9).
    """
    _require_sites(register, 3, "w_family")
    if not (a > 0 and b > 0 and c > 0):
        raise ConstraintViolation("w_family requires a, b, c > 0")
    if d < 0:
        raise ConstraintViolation("w_family requires d >= 0")
    if abs((a + b + c + d) - 1.0) > NORM_TOL:
        raise ConstraintViolation(f"w_family weights sum to {a + b + c + d!r}, not 1")
    amps = np.zeros(8, dtype=np.complex128)
    amps[0b100] = np.sqrt(a)
    amps[0b010] = np.sqrt(b)
    amps[0b001] = np.sqrt(c)
    amps[0b000] = np.sqrt(d)
    return PureState(register, amps)


def w_state(register: Register) -> PureState:
    """The symmetric three-qubit W state."""
    return w_family(1 / 3, 1 / 3, 1 / 3, 0.0, register)


def ghz(register: Register) -> PureState:
    """``(|000> + |111>)/sqrt(2)``."""
    _require_sites(register, 3, "ghz")
    amps = np.zeros(8, dtype=np.complex128)
    amps[0] = amps[7] = 1 / np.sqrt(2)
    return PureState(register, amps)


def epr(register: Register) -> PureState:
    """``(|00> + |11>)/sqrt(2)``."""
    _require_sites(register, 2, "epr")
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = amps[3] = 1 / np.sqrt(2)
    return PureState(register, amps)


def computational(register: Register, bits: str | Sequence[int]) -> PureState:
    """Computational basis state, e.g. ``computational(reg, "00")``."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != register.n_sites or any(b not in (0, 1) for b in bits):
        raise ConstraintViolation(f"need {register.n_sites} bits, got {bits}")
    amps = np.zeros(register.dim, dtype=np.complex128)
    idx = 0
    for b in bits:
        idx = (idx << 1) | b
    amps[idx] = 1.0
    return PureState(register, amps)


def ghz_class(
    delta: float,
    phi: float,
    alpha: float,
    beta: float,
    gamma: float,
    register: Register,
) -> PureState:
    """Normalized ``cos(d)|000> + sin(d) e^{i phi} |pA>|pB>|pC>``.

    Each single-qubit factor is ``cos(t)|0> + sin(t)|1>``.  The overall factor
    is fixed by explicitly normalizing the (generally non-orthogonal)
    superposition; a destructively interfering parameter choice raises
    DegenerateState.
    """
    _require_sites(register, 3, "ghz_class")
    one = lambda t: np.array([np.cos(t), np.sin(t)], dtype=np.complex128)
    prod = np.kron(np.kron(one(alpha), one(beta)), one(gamma))
    v = np.sin(delta) * np.exp(1j * phi) * prod
    v[0] += np.cos(delta)
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise DegenerateState("ghz_class parameters interfere to the zero vector")
    return PureState(register, v / nrm)


# ---------------------------------------------------------------------------
# composition and reduction


def tensor(s1: PureState, s2: PureState) -> PureState:
    """Tensor product; registers are concatenated (site labels must be fresh)."""
    common = set(s1.register.sites) & set(s2.register.sites)
    if common:
        raise LabelCollision(f"site labels {sorted(common)} appear in both registers")
    reg = Register(
        s1.register.sites + s2.register.sites,
        s1.register.parties + s2.register.parties,
    )
    return PureState(reg, np.kron(s1.amplitudes, s2.amplitudes))


def reduced_density_sites(s: PureState, keep_sites: Sequence[int]) -> DensityMatrix:
    """Partial trace down to ``keep_sites`` (kept in register order)."""
    keep = [site for site in s.register.sites if site in set(keep_sites)]
    if not keep:
        raise EmptySubset("no sites retained")
    if len(keep) == s.n_sites:
        raise EmptySubset("nothing to trace out")
    axes_keep = [s.register.axis_of(x) for x in keep]
    axes_drop = [ax for ax in range(s.n_sites) if ax not in axes_keep]
    dk = 2 ** len(axes_keep)
    m = np.transpose(s.tensor_view(), axes_keep + axes_drop).reshape(dk, -1)
    rho = m @ m.conj().T
    parties = tuple(sorted({s.register.party_of(x) for x in keep}))
    return DensityMatrix(parties, rho, tuple(keep))


def reduced_density(s: PureState, parties: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix of the sites owned by ``parties``.

    The complement must be nonempty (tracing out nothing is an error).
    """
    wanted = set(parties)
    if not wanted:
        raise EmptySubset("empty party subset")
    keep = s.register.sites_of(wanted)
    if not keep:
        raise EmptySubset(f"parties {sorted(wanted)} own no sites")
    if len(keep) == s.n_sites:
        raise EmptySubset("party subset must be proper (complement owns no sites)")
    return reduced_density_sites(s, keep)


def numeric_rank(rho: DensityMatrix | np.ndarray, tol: float = RANK_TOL) -> int:
    """Number of eigenvalues exceeding ``tol`` times the largest one."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    ev = np.linalg.eigvalsh(m)
    top = ev[-1]
    if top <= 0:
        return 0
    return int(np.sum(ev > tol * top))


def schmidt(s: PureState, left: Iterable[str]) -> SchmidtSpectrum:
    """Schmidt decomposition across the cut (left parties)|(complement).

    Returns squared coefficients (nonincreasing, padded with numerical zeros
    up to the smaller cut dimension) together with both orthonormal bases.
    """
    wanted = set(left)
    if not wanted:
        raise EmptySubset("empty left subset")
    left_sites = s.register.sites_of(wanted)
    if not left_sites:
        raise EmptySubset(f"parties {sorted(wanted)} own no sites")
    right_sites = [x for x in s.register.sites if x not in set(left_sites)]
    if not right_sites:
        raise EmptySubset("cut needs a nonempty complement")
    axes = [s.register.axis_of(x) for x in left_sites] + [
        s.register.axis_of(x) for x in right_sites
    ]
    dl = 2 ** len(left_sites)
    m = np.transpose(s.tensor_view(), axes).reshape(dl, -1)
    u, sv, vh = np.linalg.svd(m, full_matrices=False)
    # right basis columns are chosen so the state reconstructs without conjugation
    return SchmidtSpectrum(sv**2, u, vh.T)


def apply_site_ops(
    s: PureState, ops: Mapping[int, np.ndarray], renormalize: bool = True
) -> PureState:
    """Apply one 2x2 operator per listed site and renormalize.

    Operators need not be unitary (this is the SLOCC workhorse); a result with
    numerically zero norm raises DegenerateState.
    """
    t = s.tensor_view()
    for site, op in ops.items():
        ax = s.register.axis_of(site)
        op = np.asarray(op, dtype=np.complex128)
        if op.shape != (2, 2):
            raise ConstraintViolation(f"site operator for {site} must be 2x2")
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [ax])), 0, ax)
    v = t.reshape(-1)
    if renormalize:
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise DegenerateState("local operator annihilated the state")
        v = v / nrm
    return PureState(s.register, v)


# ---------------------------------------------------------------------------
# serialization


def state_to_dict(s: PureState) -> dict:
    return {
        "sites": [
            {"label": int(site), "party": party}
            for site, party in zip(s.register.sites, s.register.parties)
        ],
        "amplitudes": [[float(z.real), float(z.imag)] for z in s.amplitudes],
    }


def state_from_dict(d: Mapping) -> PureState:
    try:
        sites = [(int(row["label"]), str(row["party"])) for row in d["sites"]]
        amps = np.array([complex(re, im) for re, im in d["amplitudes"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstraintViolation(f"malformed state document: {exc}") from exc
    return PureState(Register.of(sites), amps)


def save_state(s: PureState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(s), fh, indent=1)


def load_state(path) -> PureState:
    with open(path) as fh:
        return state_from_dict(json.load(fh))
