"""Smoke test for the cptrace extension module."""

import json
import math

import cptrace


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    swap = cptrace.System.corpus("z2-swap")
    assert swap.group_order == 2 and swap.space_size == 2
    assert swap.orbits() == [[0, 1]]

    # the unique trace of the swap system: GNS space is M_2
    t = cptrace.Trace.from_values(swap, [0.5, 0, 0.5, 0])
    assert t.is_valid()
    assert t.gns_dimension() == 4
    f, s = t.gns_residuals()
    assert f < 1e-12 and s < 1e-12

    z6 = cptrace.System.from_json(json.dumps({"group": {"cyclic": 6}, "space_size": 3, "action": {"1": [1, 2, 0]}}))
    assert z6.stabilizer(0) == [0, 3]
    ext = cptrace.enumerate_extremal(z6)
    assert len(ext) == 2
    dims, blocks = cptrace.oracle(z6)
    assert sorted(dims) == [3, 3]
    for b in blocks:
        assert min(b.distance(e) for e in ext) < 1e-9

    chi = cptrace.build_extremal(z6, 0, {3: "1/2"})
    assert close(chi.value(1, 3), -1 / 3)
    reports = chi.checks()
    assert all(r["pass"] for r in reports), reports

    nu = [0.2, 0.2, 0.2, 0.2, 0.2]
    sys5 = cptrace.System.corpus("z6-on-3-and-2")
    field = {0: {0: 1, 3: 0.5}, 3: {0: 1, 2: 0.25, 4: 0.25}}
    tr = cptrace.build_from_field(sys5, nu, {x: field[0] for x in range(3)} | {x: field[3] for x in (3, 4)})
    measure, back = tr.decompose()
    assert all(close(a, b) for a, b in zip(measure, nu))
    assert close(back[4][2], 0.25)

    # a non-trace is rejected by the checks
    bad = cptrace.Trace.from_values(swap, [0.5, 0.1, 0.5, 0.1])
    failing = {r["check"] for r in bad.checks() if not r["pass"]}
    assert "traciality" in failing

    try:
        cptrace.System.from_json('{"group": {"cayley": [[0, 1], [1, 1]]}, "space_size": 1}')
    except ValueError as e:
        assert "inverse" in str(e) or "malformed" in str(e), e
    else:
        raise AssertionError("bad table accepted")

    try:
        cptrace.induce(cptrace.System.corpus("z2-point"), [0, 1], [1, 2])
    except cptrace.ConditionError:
        pass
    else:
        raise AssertionError("non-positive function induced")

    zt = cptrace.zbuild([1, 0, 3, 4, 2], json.dumps({"orbits": [{"rep": 0, "mass": 0.5}, {"rep": 2, "mass": 0.5}]}))
    n, h, tr_res, margin = zt.residuals()
    assert n < 1e-12 and tr_res < 1e-12 and margin > -1e-9
    data = zt.decompose()
    assert [o["rep"] for o in data["orbits"]] == [0, 2]
    # mass only: uniform angles, so every nonzero moment vanishes
    assert close(zt.value(0, 0).real, 0.25) and abs(zt.value(0, 2)) < 1e-12
    assert math.isclose(sum(o["mass"] for o in data["orbits"]), 1.0)

    print("smoke test passed")


if __name__ == "__main__":
    main()
