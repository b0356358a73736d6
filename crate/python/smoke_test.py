"""Smoke test for the `mnae` extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/mnae-*.whl

then run `python python/smoke_test.py`.
"""

import math
import sys

import mnae


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    inst = mnae.Instance(3, [(3, 1, 2)])
    assert inst.clauses == [(1, 2, 3)]
    assert inst.cost([1, 1, 1]) == 1
    assert inst.cost([1, -1, 1]) == 0
    assert len(inst.satisfying()) == 6
    assert mnae.Instance.from_text(inst.to_text()).clauses == inst.clauses

    hp = mnae.hp(inst)
    assert hp.is_diagonal
    assert mnae.eigenvalues(hp) == [0.0] * 6 + [1.0] * 2

    inst = mnae.random_instance(8, 12, solutions=2, seed=3)
    sols = inst.satisfying()
    assert len(sols) == 2 and sols[0] == [-b for b in sols[1]]

    h = mnae.hent(inst)
    assert h.get(0, 1) == h.get(1, 0)
    ff = mnae.verify_frustration_free(inst, h)
    assert ff["status"] == "pass", ff

    prof = mnae.entropy_profile(h, inst)
    assert prof["ground_space"]["pass"], prof["ground_space"]
    s = prof["entropy_bits"]
    assert len(s) == 256
    assert max(s[:2]) <= 1e-8 and min(s[2:]) > 1e-4

    assert all(x == 0.0 for x in mnae.entropy_profile(mnae.hp(inst))["entropy_bits"])

    bell = [1 / math.sqrt(2), 0.0, 0.0, 1 / math.sqrt(2)]
    assert close(mnae.entanglement_entropy(bell, 2), 1.0, 1e-12)

    a = mnae.a_uniform_x(2)
    back = mnae.Operator.from_coo(a.to_coo())
    assert back.to_dense() == a.to_dense()

    scan = mnae.gap_scan(mnae.hp(inst), grid=11)
    assert len(scan["s"]) == 11
    assert close(scan["gap01"][0], 1.0, 1e-10) and scan["gap01"][-1] <= 1e-10

    r = mnae.gap_ratio(mnae.eigenvalues(mnae.ising(8)))
    assert 0.3 < r["mean"] < 0.7

    try:
        mnae.Instance(3, [(1, 2, 4)])
    except mnae.MnaeError as e:
        assert isinstance(e, ValueError)
    else:
        raise AssertionError("out-of-range clause accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    sys.exit(main())
