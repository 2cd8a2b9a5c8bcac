"""Single-copy conversion probabilities and catalysis impossibility verdicts.

The bipartite machinery is the standard optimal-protocol formula for pure
states (minimum over tail-sum ratios of the two Schmidt spectra).  For the
multiparty case every bipartite splitting of the parties gives an upper
bound, and the minimum over splittings bounds any collective protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import CapExceeded, NotAProbabilityVector, RegisterMismatch
from .invariants import (
    PartyTensor,
    ProbeConfig,
    ProductTermEstimate,
    product_term_estimate,
)
from .states import PureState, numeric_rank, reduced_density, schmidt

ZERO_TAIL = 1e-12

IMPOSSIBLE = "impossible"
UNDETERMINED = "undetermined"


def _as_spectrum(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if v.size == 0:
        raise NotAProbabilityVector(f"{name} is empty")
    if v.min() < -1e-12:
        raise NotAProbabilityVector(f"{name} has a negative entry ({v.min()!r})")
    if abs(v.sum() - 1.0) > 1e-9:
        raise NotAProbabilityVector(f"{name} sums to {v.sum()!r}, not 1")
    return np.clip(v, 0.0, None)


def vidal_probability(alpha, beta) -> float:
    """Optimal probability of converting spectrum ``alpha`` into ``beta``.

    ``P = min_l  sum_{i>=l} alpha_i / sum_{i>=l} beta_i`` over tail starts l,
    after padding to a common length and sorting nonincreasing.  Tails that
    both vanish are skipped; a vanishing denominator against a live numerator
    contributes +inf (never the minimum).  The result is clamped to [0, 1].
    """
    a = _as_spectrum(alpha, "alpha")
    b = _as_spectrum(beta, "beta")
    n = max(a.size, b.size)
    a = np.pad(np.sort(a)[::-1], (0, n - a.size))
    b = np.pad(np.sort(b)[::-1], (0, n - b.size))
    tails_a = np.cumsum(a[::-1])[::-1]
    tails_b = np.cumsum(b[::-1])[::-1]
    best = np.inf
    for ta, tb in zip(tails_a, tails_b):
        if ta < ZERO_TAIL and tb < ZERO_TAIL:
            continue
        if tb < ZERO_TAIL:
            continue  # ratio is +inf
        best = min(best, ta / tb)
    return float(min(max(best, 0.0), 1.0))


@dataclass(frozen=True)
class ConversionBound:
    """Upper bound on the collective conversion probability, cut by cut."""

    per_cut: dict[str, float]
    bound: float
    source_id: str
    target_id: str

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "target_id": self.target_id,
            "per_cut": {k: _sig12(v) for k, v in self.per_cut.items()},
            "bound": _sig12(self.bound),
        }


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _compatible_registers(source: PureState, target: PureState) -> tuple[str, ...]:
    ps = source.register.party_labels()
    pt = target.register.party_labels()
    if ps != pt:
        raise RegisterMismatch(f"party sets differ: {ps} vs {pt}")
    for p in ps:
        if len(source.register.sites_of([p])) != len(target.register.sites_of([p])):
            raise RegisterMismatch(f"party {p} holds different site counts")
    return ps


def splitting_cuts(parties: Sequence[str]) -> list[tuple[tuple[str, ...], str]]:
    """Canonical bipartitions: one per complement pair, anchored on the
    lexicographically smallest party."""
    parties = tuple(sorted(parties))
    anchor, rest = parties[0], parties[1:]
    cuts = []
    for k in range(len(rest) + 1):
        for extra in combinations(rest, k):
            left = (anchor,) + extra
            right = tuple(p for p in parties if p not in left)
            if not right:
                continue
            cuts.append((left, "".join(left) + "|" + "".join(right)))
    return cuts


def splitting_bound(
    source: PureState,
    target: PureState,
    source_id: str | None = None,
    target_id: str | None = None,
) -> ConversionBound:
    """Minimum over party bipartitions of the bipartite conversion probability.

    Both states must carry the same parties with the same per-party site
    counts.  Every cut upper-bounds any collective local protocol, so the
    minimum does too.
    """
    parties = _compatible_registers(source, target)
    per_cut: dict[str, float] = {}
    for left, key in splitting_cuts(parties):
        sa = schmidt(source, left).coeffs
        sb = schmidt(target, left).coeffs
        per_cut[key] = vidal_probability(sa, sb)
    return ConversionBound(
        per_cut=per_cut,
        bound=min(per_cut.values()),
        source_id=source_id or source.fingerprint(),
        target_id=target_id or target.fingerprint(),
    )


# ---------------------------------------------------------------------------
# catalysis verdicts


@dataclass(frozen=True)
class RankObstruction:
    """What the per-party ranks exclude: either the whole transformation
    (a target rank exceeds the source rank) or every non-invertible local
    operator (all ranks equal)."""

    kind: str  # "target_rank_exceeds_source" | "equal_ranks_exclude_noninvertible"
    triples: tuple[tuple[str, int, int], ...]  # (party, source rank, target rank)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "triples": [
                {"party": p, "source_rank": s, "target_rank": t} for p, s, t in self.triples
            ],
        }


@dataclass(frozen=True)
class ProductTermObstruction:
    """Converged product-term counts that differ, excluding invertible operators."""

    source_terms: int
    target_terms: int
    heuristic: bool

    def to_dict(self) -> dict:
        return {
            "source_terms": self.source_terms,
            "target_terms": self.target_terms,
            "heuristic": self.heuristic,
        }


@dataclass(frozen=True)
class CatalysisVerdict:
    feasible: str  # IMPOSSIBLE | UNDETERMINED
    party_ranks: tuple[tuple[str, int, int], ...]
    rank_obstruction: RankObstruction | None
    product_term_obstruction: ProductTermObstruction | None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "party_ranks": [
                {"party": p, "source_rank": s, "target_rank": t}
                for p, s, t in self.party_ranks
            ],
            "rank_obstruction": self.rank_obstruction.to_dict()
            if self.rank_obstruction
            else None,
            "product_term_obstruction": self.product_term_obstruction.to_dict()
            if self.product_term_obstruction
            else None,
            "notes": list(self.notes),
        }


RankProbe = Callable[[PureState], ProductTermEstimate]


def default_rank_probe(config: ProbeConfig | None = None) -> RankProbe:
    cfg = config or ProbeConfig()

    def probe(state: PureState) -> ProductTermEstimate:
        return product_term_estimate(PartyTensor.from_state(state), cfg)

    return probe


def catalysis_verdict(
    source: PureState,
    target: PureState,
    rank_probe: RankProbe | None = None,
) -> CatalysisVerdict:
    """Decide whether ``source -> target`` under one local operator per party
    is excluded, with the resource state already folded into both sides.

    Rank monotonicity kills any transformation whose target rank exceeds the
    source rank somewhere.  When all per-party ranks agree, non-invertible
    operators are excluded; if on top of that both product-term probes
    converge to different counts, invertible operators are excluded too and
    the verdict is impossible.  Anything else stays undetermined, with the
    evidence gathered so far attached.
    """
    parties = _compatible_registers(source, target)
    probe = rank_probe or default_rank_probe()
    triples = []
    for p in parties:
        rs = numeric_rank(reduced_density(source, [p]))
        rt = numeric_rank(reduced_density(target, [p]))
        triples.append((p, rs, rt))
    triples = tuple(triples)

    exceeding = tuple(t for t in triples if t[2] > t[1])
    if exceeding:
        return CatalysisVerdict(
            feasible=IMPOSSIBLE,
            party_ranks=triples,
            rank_obstruction=RankObstruction("target_rank_exceeds_source", exceeding),
            product_term_obstruction=None,
        )

    if any(t[1] != t[2] for t in triples):
        return CatalysisVerdict(
            feasible=UNDETERMINED,
            party_ranks=triples,
            rank_obstruction=None,
            product_term_obstruction=None,
            notes=("rank profiles differ but never increase; ranks alone decide nothing",),
        )

    # equal ranks everywhere: non-invertible local operators are excluded
    try:
        est_src = probe(source)
        est_tgt = probe(target)
    except CapExceeded as exc:
        return CatalysisVerdict(
            feasible=UNDETERMINED,
            party_ranks=triples,
            rank_obstruction=None,
            product_term_obstruction=None,
            notes=(f"product-term probe inconclusive: {exc}",),
        )

    if est_src.terms != est_tgt.terms:
        return CatalysisVerdict(
            feasible=IMPOSSIBLE,
            party_ranks=triples,
            rank_obstruction=RankObstruction("equal_ranks_exclude_noninvertible", triples),
            product_term_obstruction=ProductTermObstruction(
                source_terms=est_src.terms,
                target_terms=est_tgt.terms,
                heuristic=est_src.heuristic or est_tgt.heuristic,
            ),
            notes=(
                "product-term counts rest on a converged-fit search; "
                "failures below the found rank are evidence, not proof",
            ),
        )

    return CatalysisVerdict(
        feasible=UNDETERMINED,
        party_ranks=triples,
        rank_obstruction=None,
        product_term_obstruction=None,
        notes=(
            f"equal ranks and equal product-term estimates "
            f"({est_src.terms} vs {est_tgt.terms}); nothing excluded",
        ),
    )
