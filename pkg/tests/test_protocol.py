import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loccsim.convert import splitting_bound
from loccsim.errors import (
    MalformedProtocol,
    NotAnEprResource,
    NotUnitary,
    SiteOwnership,
)
from loccsim.prebuilt import intro_teleport, prop3, prop3_input
from loccsim.protocol import (
    CNOT,
    PAULI_X,
    Abort,
    Accept,
    Measure,
    Protocol,
    Target,
    Teleport,
    Unitary,
    apply_unitary,
    measure,
    run_protocol,
    teleport,
    teleport_branches,
)
from loccsim.states import (
    PureState,
    Register,
    computational,
    epr,
    ghz,
    schmidt,
    tensor,
    w_state,
)

ABC = Register.of([(1, "A"), (2, "B"), (3, "C")])
AB = Register.of([(1, "A"), (2, "B")])


def haar_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# measurement


def test_measure_w_site1():
    # outcome 0 keeps the flat pair with weight 2/3; outcome 1 leaves |00>
    branches = measure(w_state(ABC), "A", 1, "Z")
    assert [b[0] for b in branches] == ["0", "1"]
    out0, p0, s0 = branches[0]
    out1, p1, s1 = branches[1]
    assert p0 == pytest.approx(2 / 3, abs=1e-12)
    assert p1 == pytest.approx(1 / 3, abs=1e-12)
    assert s0.register.sites == (2, 3)
    flat = np.zeros(4, complex)
    flat[[0b01, 0b10]] = 1 / np.sqrt(2)
    assert np.allclose(s0.amplitudes, flat, atol=1e-12)
    assert np.allclose(s1.amplitudes, [1, 0, 0, 0], atol=1e-12)


def test_measure_ghz_x_basis():
    branches = measure(ghz(ABC), "A", 1, "X")
    assert len(branches) == 2
    plus = np.array([1, 0, 0, 1]) / np.sqrt(2)
    minus = np.array([1, 0, 0, -1]) / np.sqrt(2)
    for (out, p, s), expect in zip(branches, (plus, minus)):
        assert p == pytest.approx(0.5, abs=1e-12)
        assert abs(np.vdot(s.amplitudes, expect)) == pytest.approx(1.0, abs=1e-12)


def test_measure_definite_state():
    branches = measure(computational(AB, "01"), "A", 1, "Z")
    assert len(branches) == 1  # the other branch has zero weight and is dropped
    out, p, s = branches[0]
    assert out == "0"
    assert p == pytest.approx(1.0)
    assert s.register.sites == (2,)


def test_measure_custom_basis():
    ry = np.array([[np.cos(0.3), np.sin(0.3)], [-np.sin(0.3), np.cos(0.3)]])
    branches = measure(ghz(ABC), "A", 1, ry)
    assert sum(p for _, p, _ in branches) == pytest.approx(1.0, abs=1e-12)


def test_measure_ownership_and_basis_errors():
    with pytest.raises(SiteOwnership):
        measure(ghz(ABC), "A", 2, "Z")
    with pytest.raises(NotUnitary):
        measure(ghz(ABC), "A", 1, "Y")
    with pytest.raises(NotUnitary):
        measure(ghz(ABC), "A", 1, np.array([[1, 1], [1, 1]]) / np.sqrt(2))


# ---------------------------------------------------------------------------
# unitaries


def test_cnot_site_order():
    # first listed site is the control
    both_b = Register.of([(1, "B"), (2, "B")])
    s = computational(both_b, "10")
    assert apply_unitary(s, "B", (1, 2), CNOT).is_close(computational(both_b, "11"))
    s = computational(both_b, "01")
    assert apply_unitary(s, "B", (2, 1), CNOT).is_close(computational(both_b, "11"))


def test_bit_flip_reaches_flat_triple():
    amps = np.zeros(8, complex)
    amps[[0b100, 0b011]] = 1 / np.sqrt(2)
    s = PureState(ABC, amps)
    assert apply_unitary(s, "A", (1,), PAULI_X).is_close(ghz(ABC))


def test_identity_is_noop():
    s = w_state(ABC)
    assert apply_unitary(s, "B", (2,), np.eye(2)).is_close(s)


def test_unitary_validation():
    with pytest.raises(NotUnitary):
        apply_unitary(ghz(ABC), "A", (1,), np.array([[1, 0], [0, 2]]))
    with pytest.raises(NotUnitary):
        apply_unitary(ghz(ABC), "A", (1,), np.eye(4))
    with pytest.raises(SiteOwnership):
        apply_unitary(ghz(ABC), "A", (1, 2), CNOT)
    with pytest.raises(MalformedProtocol):
        apply_unitary(ghz(ABC), "A", (1, 1), np.eye(4))


def test_unitary_acts_on_correct_axes():
    rng = np.random.default_rng(2)
    reg = Register.of([(1, "A"), (2, "A"), (3, "A")])
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = PureState(reg, v / np.linalg.norm(v))
    u = haar_unitary(rng)
    # applying on site 3 must equal I (x) I (x) u on the flat vector
    direct = np.kron(np.eye(4), u) @ s.amplitudes
    assert np.allclose(apply_unitary(s, "A", (3,), u).amplitudes, direct, atol=1e-12)


# ---------------------------------------------------------------------------
# teleportation


def payload_with_spectator(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    payload = PureState(Register.of([(1, "A"), (4, "B")]), v / np.linalg.norm(v))
    return payload, tensor(payload, epr(Register.of([(2, "A"), (3, "B")])))


def test_teleport_carries_amplitudes():
    payload, full = payload_with_spectator(np.random.default_rng(7))
    out = teleport(full, 1, (2, 3))
    assert out.register.sites == (4, 3)
    assert out.register.parties == ("B", "B")
    moved = out.permuted((3, 4)).amplitudes
    assert abs(np.vdot(moved, payload.amplitudes)) == pytest.approx(1.0, abs=1e-12)


def test_teleport_preserves_pair_spectrum():
    # teleporting one half of an entangled pair keeps its Schmidt data
    rng = np.random.default_rng(13)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    pair = PureState(Register.of([(1, "A"), (4, "C")]), v / np.linalg.norm(v))
    full = tensor(pair, epr(Register.of([(2, "A"), (3, "B")])))
    before = schmidt(pair, ["A"]).coeffs
    out = teleport(full, 1, (2, 3))
    after = schmidt(out, ["B"]).coeffs
    assert np.allclose(before, after, atol=1e-12)


def test_teleport_commutes_with_source_unitary():
    rng = np.random.default_rng(19)
    _payload, full = payload_with_spectator(rng)
    u = haar_unitary(rng)
    first = teleport(apply_unitary(full, "A", (1,), u), 1, (2, 3))
    second = apply_unitary(teleport(full, 1, (2, 3)), "B", (3,), u)
    assert abs(first.overlap(second)) == pytest.approx(1.0, abs=1e-12)


def test_teleport_verbose_branches():
    _payload, full = payload_with_spectator(np.random.default_rng(23))
    merged = teleport(full, 1, (2, 3))
    branches = teleport_branches(full, 1, (2, 3))
    assert [b[0] for b in branches] == ["00", "01", "10", "11"]
    for _out, p, post in branches:
        assert p == pytest.approx(0.25, abs=1e-12)
        assert abs(post.overlap(merged)) == pytest.approx(1.0, abs=1e-12)


def test_teleport_requires_resource_pair():
    payload, _unused = payload_with_spectator(np.random.default_rng(1))
    lopsided = PureState(
        Register.of([(2, "A"), (3, "B")]),
        np.array([np.sqrt(0.7), 0, 0, np.sqrt(0.3)], complex),
    )
    with pytest.raises(NotAnEprResource):
        teleport(tensor(payload, lopsided), 1, (2, 3))


def test_teleport_site_checks():
    _payload, full = payload_with_spectator(np.random.default_rng(3))
    with pytest.raises(SiteOwnership):
        teleport(full, 1, (3, 2))  # near site belongs to the other side
    with pytest.raises(MalformedProtocol):
        teleport(full, 1, (1, 3))


# ---------------------------------------------------------------------------
# the runner


def walk(node, visit):
    visit(node)
    for child in node.children:
        walk(child, visit)


def test_tree_probability_conservation():
    result = prop3(0.4).run()
    assert result.root.prob == pytest.approx(1.0, abs=1e-12)

    def check(node):
        if node.children:
            total = sum(c.prob for c in node.children)
            assert total == pytest.approx(node.prob, abs=1e-9)

    walk(result.root, check)


def test_tree_outcome_ordering():
    # depth-first, branch outcomes in ascending order at each node
    result = prop3(0.4).run()
    records = [leaf.record for leaf in result.leaves()]
    assert records == ["00", "01", "1"]


def test_exact_target_success():
    state = ghz(ABC)
    proto = Protocol(
        steps=(Measure("A", 1, "X", accept="*"),
               Unitary("B", (2,), np.diag([1, -1]).astype(complex),
                       when=lambda rec: rec.endswith("1"))),
        target=Target("exact", state=epr(Register.of([(2, "B"), (3, "C")]))),
    )
    result = run_protocol(state, proto)
    assert result.success_probability == pytest.approx(1.0, abs=1e-12)


def test_conditional_unitary_gates_on_record():
    # without the correction the minus branch must fail the exact target
    state = ghz(ABC)
    proto = Protocol(
        steps=(Measure("A", 1, "X", accept="*"),),
        target=Target("exact", state=epr(Register.of([(2, "B"), (3, "C")]))),
    )
    result = run_protocol(state, proto)
    assert result.success_probability == pytest.approx(0.5, abs=1e-12)


def test_ghz_lu_target_accepts_relabeled_flat_triple():
    # outcome-0 leaf of the pair-assisted conversion: (|100> + |011>)/sqrt(2)
    result = prop3(0.4).run()
    leaf = result.leaves()[0]
    assert leaf.record == "00"
    assert leaf.status == "success"
    expect = np.zeros(8, complex)
    expect[[0b100, 0b011]] = 1 / np.sqrt(2)
    assert abs(np.vdot(leaf.state.amplitudes, expect)) == pytest.approx(1.0, abs=1e-12)


def test_ghz_lu_target_rejects_w_leaf():
    state = tensor(w_state(ABC), epr(Register.of([(4, "B"), (5, "C")])))
    proto = Protocol(
        steps=(Measure("B", 4, "Z", accept="0"),),
        target=Target("ghz-lu", sites=(1, 2, 3)),
    )
    result = run_protocol(state, proto)
    assert result.success_probability == pytest.approx(0.0)


def test_abort_and_accept_predicates():
    state = ghz(ABC)
    aborting = Protocol(
        steps=(Measure("A", 1, "Z", accept="*"), Abort(lambda rec: rec == "1")),
        target=Target("exact", state=epr(Register.of([(2, "B"), (3, "C")]))),
    )
    result = run_protocol(state, aborting)
    statuses = {leaf.record: leaf.status for leaf in result.leaves()}
    assert statuses["1"] == "failure"

    accepting = Protocol(
        steps=(Measure("A", 1, "Z", accept="*"), Accept(lambda rec: rec == "0")),
        target=Target("exact", state=epr(Register.of([(2, "B"), (3, "C")]))),
    )
    result2 = run_protocol(state, accepting)
    statuses2 = {leaf.record: leaf.status for leaf in result2.leaves()}
    assert statuses2["1"] == "failure"


def test_malformed_protocols():
    state = ghz(ABC)
    dead_site = Protocol(
        steps=(Measure("A", 1, "Z"), Measure("A", 1, "Z")),
        target=Target("ghz-lu", sites=(1, 2, 3)),
    )
    with pytest.raises(MalformedProtocol):
        run_protocol(state, dead_site)

    unknown_party = Protocol(
        steps=(Measure("D", 1, "Z"),), target=Target("ghz-lu", sites=(1, 2, 3))
    )
    with pytest.raises(MalformedProtocol):
        run_protocol(state, unknown_party)

    bad_accept = Protocol(
        steps=(Measure("A", 1, "Z", accept="2"),),
        target=Target("ghz-lu", sites=(2, 3, 1)),
    )
    with pytest.raises(MalformedProtocol):
        run_protocol(state, bad_accept)

    # ghz-lu target site consumed by a measurement
    consumed = Protocol(
        steps=(Measure("A", 1, "Z"),), target=Target("ghz-lu", sites=(1, 2, 3))
    )
    with pytest.raises(MalformedProtocol):
        run_protocol(state, consumed)

    # exact target register must match the survivors
    mismatched = Protocol(
        steps=(Measure("A", 1, "Z"),),
        target=Target("exact", state=epr(Register.of([(2, "B"), (3, "B")]))),
    )
    with pytest.raises(MalformedProtocol):
        run_protocol(state, mismatched)

    with pytest.raises(MalformedProtocol):
        run_protocol(state, Protocol(steps=(), target=Target("fuzzy")))


def test_success_bounded_by_splitting_bound():
    # cross-module check on an exact-mode protocol
    prepared = intro_teleport()
    result = run_protocol(prepared.state, prepared.protocol)
    assert result.success_probability <= 1.0 + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=1 / 3, max_value=0.499))
def test_prop3_probability_matches_bound_family(a):
    from loccsim.prebuilt import prop3_target

    result = prop3(a).run()
    bound = splitting_bound(prop3_input(a), prop3_target()).bound
    assert result.success_probability <= bound + 1e-9
    assert result.success_probability == pytest.approx(2 * a, abs=1e-12)


def test_branch_tree_serialization():
    doc = prop3(0.4).run().root.to_dict()
    assert doc["prob"] == pytest.approx(1.0)
    assert doc["success"] is None
    kids = {c["record"]: c for c in doc["children"]}
    assert kids["1"]["success"] is False
    assert kids["1"]["prob"] == pytest.approx(0.2)
    grand = {c["record"]: c for c in kids["0"]["children"]}
    assert grand["00"]["success"] is True
