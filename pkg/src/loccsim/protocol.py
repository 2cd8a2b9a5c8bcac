"""Branching simulator for local protocols: measurements, local unitaries,
and teleportation over shared maximally entangled pairs.

Measured qubits leave the register, so post-measurement states live on the
remaining sites.  Teleportation is collapsed to its deterministic net effect
by default (the far site takes over the source qubit's role); a verbose mode
keeps the four Bell branches with their corrections for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    MalformedProtocol,
    NotAnEprResource,
    NotUnitary,
    SiteOwnership,
)
from .invariants import three_tangle
from .states import (
    DensityMatrix,
    PureState,
    Register,
    reduced_density_sites,
)

BRANCH_DROP = 1e-14
UNITARY_TOL = 1e-10
EPR_TOL = 1e-9
SUCCESS_TOL = 1e-9

_SQ2 = np.sqrt(2.0)

BASIS_Z = np.eye(2, dtype=np.complex128)
BASIS_X = np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQ2

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


# ---------------------------------------------------------------------------
# steps


@dataclass(frozen=True)
class Measure:
    """Single-site projective measurement; rows of ``basis`` are the outcome bras.

    ``accept`` filters branches: outcomes other than the accepted one abort.
    """

    party: str
    site: int
    basis: str | np.ndarray = "Z"
    accept: str = "*"  # "0" | "1" | "*"


@dataclass(frozen=True)
class Unitary:
    """Local unitary on sites owned by one party.

    ``when`` optionally gates the step on the classical outcome record, which
    is how correction unitaries conditioned on announced outcomes are written.
    """

    party: str
    sites: tuple[int, ...]
    matrix: np.ndarray
    when: Callable[[str], bool] | None = None


@dataclass(frozen=True)
class Teleport:
    """Send the qubit at ``source`` through the pair (``near``, ``far``)."""

    source: int
    near: int
    far: int
    verbose: bool = False


@dataclass(frozen=True)
class Accept:
    """Abort every branch whose record fails the predicate."""

    predicate: Callable[[str], bool]


@dataclass(frozen=True)
class Abort:
    """Abort every branch whose record satisfies the predicate."""

    predicate: Callable[[str], bool]


Step = Measure | Unitary | Teleport | Accept | Abort


@dataclass(frozen=True)
class Target:
    """Success test for protocol leaves.

    ``exact``: modulus of the overlap with ``state`` exceeds 1 - 1e-9.
    ``ghz-lu``: the three designated sites are locally unitary equivalent to
    the maximally entangled triple (flat single-site spectra, tangle 1) and
    any leftover sites factor out.
    """

    mode: str  # "exact" | "ghz-lu"
    state: PureState | None = None
    sites: tuple[int, int, int] | None = None


@dataclass(frozen=True)
class Protocol:
    steps: tuple[Step, ...]
    target: Target
    name: str = ""
    notes: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# primitive operations


def _resolve_basis(basis) -> np.ndarray:
    if isinstance(basis, str):
        if basis.upper() == "Z":
            return BASIS_Z
        if basis.upper() == "X":
            return BASIS_X
        raise NotUnitary(f"unknown basis name {basis!r}")
    b = np.asarray(basis, dtype=np.complex128)
    if b.shape != (2, 2):
        raise NotUnitary(f"measurement basis must be 2x2, got {b.shape}")
    if np.max(np.abs(b @ b.conj().T - np.eye(2))) > UNITARY_TOL:
        raise NotUnitary("measurement basis rows are not orthonormal")
    return b


def measure(
    s: PureState, party: str, site: int, basis="Z"
) -> list[tuple[str, float, PureState]]:
    """Measure one site; returns (outcome, probability, post-state) branches.

    The measured site is removed from the register.  Branches below the
    probability floor are dropped; outcome "0" is listed first.
    """
    if s.register.party_of(site) != party:
        raise SiteOwnership(
            f"site {site} belongs to {s.register.party_of(site)!r}, not {party!r}"
        )
    rows = _resolve_basis(basis)
    ax = s.register.axis_of(site)
    t = s.tensor_view()
    reg = s.register.without([site])
    out = []
    for k in (0, 1):
        proj = np.tensordot(rows[k], t, axes=([0], [ax]))
        p = float(np.linalg.norm(proj) ** 2)
        if p < BRANCH_DROP:
            continue
        out.append((str(k), p, PureState(reg, proj.reshape(-1) / np.sqrt(p))))
    return out


def apply_unitary(
    s: PureState, party: str, sites: Sequence[int], matrix: np.ndarray
) -> PureState:
    """Apply a ``2^k x 2^k`` unitary to ``sites`` (first listed site is the
    most significant index of the matrix)."""
    sites = tuple(sites)
    if len(set(sites)) != len(sites):
        raise MalformedProtocol(f"duplicate sites {sites}")
    for x in sites:
        owner = s.register.party_of(x)
        if owner != party:
            raise SiteOwnership(f"site {x} belongs to {owner!r}, not {party!r}")
    k = len(sites)
    u = np.asarray(matrix, dtype=np.complex128)
    if u.shape != (2**k, 2**k):
        raise NotUnitary(f"matrix shape {u.shape} does not act on {k} qubits")
    if np.max(np.abs(u @ u.conj().T - np.eye(2**k))) > UNITARY_TOL:
        raise NotUnitary("matrix is not unitary within 1e-10")
    axes = [s.register.axis_of(x) for x in sites]
    t = np.tensordot(u.reshape((2,) * (2 * k)), s.tensor_view(), axes=(range(k, 2 * k), axes))
    t = np.moveaxis(t, range(k), axes)
    return PureState(s.register, t.reshape(-1))


_EPR_PROJECTOR = np.zeros((4, 4), dtype=np.complex128)
_EPR_PROJECTOR[0, 0] = _EPR_PROJECTOR[0, 3] = _EPR_PROJECTOR[3, 0] = _EPR_PROJECTOR[3, 3] = 0.5

# Bell outcome bras over (source, near) and the matching correction on far
_BELL_BRANCHES = (
    ("00", np.array([[1, 0], [0, 1]]) / _SQ2, np.eye(2, dtype=np.complex128)),
    ("01", np.array([[0, 1], [1, 0]]) / _SQ2, PAULI_X),
    ("10", np.array([[1, 0], [0, -1]]) / _SQ2, PAULI_Z),
    ("11", np.array([[0, 1], [-1, 0]]) / _SQ2, PAULI_Z @ PAULI_X),
)


def _check_teleport_sites(s: PureState, source: int, near: int, far: int) -> None:
    if len({source, near, far}) != 3:
        raise MalformedProtocol("teleport needs three distinct sites")
    p_src = s.register.party_of(source)
    p_near = s.register.party_of(near)
    if p_src != p_near:
        raise SiteOwnership(
            f"source (owned by {p_src!r}) and near pair site (owned by {p_near!r}) "
            "must sit with one party"
        )
    pair = reduced_density_sites(s, [near, far])
    if np.max(np.abs(pair.matrix - _EPR_PROJECTOR)) > EPR_TOL:
        raise NotAnEprResource(
            f"sites ({near}, {far}) are not in the maximally entangled pair state"
        )


def teleport(s: PureState, source: int, epr_sites: tuple[int, int]) -> PureState:
    """Deterministic net effect of teleporting ``source`` through the pair.

    ``epr_sites = (near, far)``: the near site sits with the sending party,
    the far site ends up carrying the source qubit's role.  Source and near
    leave the register.
    """
    near, far = epr_sites
    _check_teleport_sites(s, source, near, far)
    ax_s = s.register.axis_of(source)
    ax_n = s.register.axis_of(near)
    # project (source, near) onto the maximally entangled bra and rescale:
    # for a resource pair this is exactly the identity channel onto far
    t = np.trace(s.tensor_view(), axis1=ax_s, axis2=ax_n) * _SQ2
    v = t.reshape(-1)
    v = v / np.linalg.norm(v)
    return PureState(s.register.without([source, near]), v)


def teleport_branches(
    s: PureState, source: int, epr_sites: tuple[int, int]
) -> list[tuple[str, float, PureState]]:
    """All four Bell branches of a teleport, corrections applied.

    Every corrected branch coincides with the merged ``teleport`` output up
    to a global phase; probabilities are 1/4 each for an exact resource pair.
    """
    near, far = epr_sites
    _check_teleport_sites(s, source, near, far)
    ax_s = s.register.axis_of(source)
    ax_n = s.register.axis_of(near)
    reg = s.register.without([source, near])
    out = []
    for label, bra, fix in _BELL_BRANCHES:
        t = np.tensordot(bra, s.tensor_view(), axes=([0, 1], [ax_s, ax_n]))
        p = float(np.linalg.norm(t) ** 2)
        if p < BRANCH_DROP:
            continue
        post = PureState(reg, t.reshape(-1) / np.sqrt(p))
        post = apply_unitary(post, reg.party_of(far), (far,), fix)
        out.append((label, p, post))
    return out


# ---------------------------------------------------------------------------
# protocol runner


@dataclass(frozen=True)
class BranchNode:
    record: str
    prob: float
    state: PureState | None
    status: str  # "internal" | "success" | "failure"
    children: tuple["BranchNode", ...] = ()

    def to_dict(self) -> dict:
        success = None if self.status == "internal" else self.status == "success"
        return {
            "record": self.record,
            "prob": float(f"{self.prob:.12g}"),
            "success": success,
            "children": [c.to_dict() for c in self.children],
        }

    def leaves(self) -> list["BranchNode"]:
        if not self.children:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


@dataclass(frozen=True)
class ProtocolResult:
    root: BranchNode
    success_probability: float

    def leaves(self) -> list[BranchNode]:
        return self.root.leaves()


def _validate(s: PureState, p: Protocol) -> tuple[int, ...]:
    """Structural check; returns the surviving sites in register order."""
    live = list(s.register.sites)
    parties = set(s.register.parties)
    for i, step in enumerate(p.steps):
        where = f"step {i + 1}"
        if isinstance(step, Measure):
            if step.party not in parties:
                raise MalformedProtocol(f"{where}: unknown party {step.party!r}")
            if step.site not in live:
                raise MalformedProtocol(f"{where}: site {step.site} not available")
            if step.accept not in ("0", "1", "*"):
                raise MalformedProtocol(f"{where}: bad accept token {step.accept!r}")
            live.remove(step.site)
        elif isinstance(step, Unitary):
            if step.party not in parties:
                raise MalformedProtocol(f"{where}: unknown party {step.party!r}")
            for x in step.sites:
                if x not in live:
                    raise MalformedProtocol(f"{where}: site {x} not available")
        elif isinstance(step, Teleport):
            for x in (step.source, step.near, step.far):
                if x not in live:
                    raise MalformedProtocol(f"{where}: site {x} not available")
            if len({step.source, step.near, step.far}) != 3:
                raise MalformedProtocol(f"{where}: teleport sites must be distinct")
            live.remove(step.source)
            live.remove(step.near)
        elif isinstance(step, (Accept, Abort)):
            if not callable(step.predicate):
                raise MalformedProtocol(f"{where}: predicate must be callable")
        else:
            raise MalformedProtocol(f"{where}: unknown step {step!r}")

    final = tuple(x for x in s.register.sites if x in live)
    tgt = p.target
    if tgt.mode == "exact":
        if tgt.state is None:
            raise MalformedProtocol("exact target needs a state")
        want = tgt.state.register
        got_parties = tuple(s.register.party_of(x) for x in final)
        if want.sites != final or want.parties != got_parties:
            raise MalformedProtocol(
                f"exact target register {want.sites}/{want.parties} does not match "
                f"surviving sites {final}/{got_parties}"
            )
    elif tgt.mode == "ghz-lu":
        if tgt.sites is None or len(set(tgt.sites)) != 3:
            raise MalformedProtocol("ghz-lu target needs three distinct sites")
        for x in tgt.sites:
            if x not in final:
                raise MalformedProtocol(f"ghz-lu site {x} does not survive the protocol")
    else:
        raise MalformedProtocol(f"unknown target mode {tgt.mode!r}")
    return final


def _ghz_lu_success(leaf: PureState, sites: tuple[int, int, int]) -> bool:
    kept = tuple(x for x in leaf.register.sites if x in set(sites))
    rest = [x for x in leaf.register.sites if x not in set(sites)]
    if rest:
        if reduced_density_sites(leaf, rest).purity() < 1.0 - SUCCESS_TOL:
            return False
        rho = reduced_density_sites(leaf, kept).matrix
        ev, vec = np.linalg.eigh(rho)
        triple = vec[:, -1]
    else:
        triple = leaf.permuted(kept).amplitudes
    pseudo = Register(kept, ("q1", "q2", "q3"))
    state = PureState(pseudo, triple / np.linalg.norm(triple))
    for x in sites:
        probs = reduced_density_sites(state, [x]).spectrum()
        if np.max(np.abs(probs - 0.5)) > SUCCESS_TOL:
            return False
    return abs(three_tangle(state) - 1.0) <= SUCCESS_TOL


def _leaf_success(leaf: PureState, target: Target) -> bool:
    if target.mode == "exact":
        return abs(leaf.overlap(target.state)) > 1.0 - SUCCESS_TOL
    return _ghz_lu_success(leaf, target.sites)


def run_protocol(s: PureState, p: Protocol) -> ProtocolResult:
    """Execute all branches and grade the surviving leaves against the target.

    Aborted branches stay in the tree as failure leaves and contribute zero
    success probability; children probabilities always sum to their parent's.
    """
    _validate(s, p)
    steps = p.steps

    def expand(state: PureState, record: str, prob: float, idx: int) -> BranchNode:
        while idx < len(steps):
            step = steps[idx]
            idx += 1
            if isinstance(step, Measure):
                children = []
                for outcome, pk, post in measure(state, step.party, step.site, step.basis):
                    rec = record + outcome
                    pr = prob * pk
                    if step.accept != "*" and outcome != step.accept:
                        children.append(BranchNode(rec, pr, post, "failure"))
                    else:
                        children.append(expand(post, rec, pr, idx))
                return BranchNode(record, prob, state, "internal", tuple(children))
            if isinstance(step, Unitary):
                if step.when is None or step.when(record):
                    state = apply_unitary(state, step.party, step.sites, step.matrix)
            elif isinstance(step, Teleport):
                if step.verbose:
                    children = []
                    for outcome, pk, post in teleport_branches(
                        state, step.source, (step.near, step.far)
                    ):
                        children.append(expand(post, record + outcome, prob * pk, idx))
                    return BranchNode(record, prob, state, "internal", tuple(children))
                state = teleport(state, step.source, (step.near, step.far))
            elif isinstance(step, Accept):
                if not step.predicate(record):
                    return BranchNode(record, prob, state, "failure")
            elif isinstance(step, Abort):
                if step.predicate(record):
                    return BranchNode(record, prob, state, "failure")
        status = "success" if _leaf_success(state, p.target) else "failure"
        return BranchNode(record, prob, state, status)

    root = expand(s, "", 1.0, 0)
    p_success = sum(leaf.prob for leaf in root.leaves() if leaf.status == "success")
    return ProtocolResult(root, float(p_success))
