"""Smoke test for the tensorkit extension module.

Build and install first:  pip install -e crates/python --no-build-isolation
"""

import json

import tensorkit as tk


def main():
    cubic = tk.Group.catalog("cubic", "o3_zheng")
    assert cubic.order() == 48, cubic.order()

    t4 = tk.Space("T4(R3)")
    assert t4.dimension == 81
    assert tk.predict_dimension(cubic, t4) == 4

    basis = tk.basis(cubic, t4)
    assert len(basis) == 4
    assert all(max(abs(v) for v in b.values()) == 1.0 for b in basis)

    entries, nnz, l1 = tk.sparsify(cubic, t4)
    assert nnz == 3 and abs(l1 - 3.0) < 1e-9
    assert sorted(entries) == [(0, 0, 0, 0), (1, 1, 1, 1), (2, 2, 2, 2)]

    iso = tk.Group.catalog("isotropic", "o3_zheng")
    assert len(tk.basis(iso, preset="modulus")) == 2
    assert len(tk.basis(iso, preset="yield")) == 1

    r = tk.basis(cubic, t4, algorithm="randomized", seed=7, orthonormal=True)
    assert len(r) == 4

    flip = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]
    mirror = tk.Group.from_generators("mirror", [flip])
    assert mirror.order() == 2
    assert tk.predict_dimension(mirror, tk.Space("T1(R3)")) == 2

    oh = tk.canonical("Oh")
    eye = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    assert tk.kambouchev_invariants(eye, oh) == [3.0, 3.0, 1.0, 3.0, 3.0, 3.0]
    assert len(tk.kambouchev_basis(eye, oh)) == 6

    report = json.loads(tk.reproduce("karafillis"))
    assert report["discrepancies"]["rows"] == []

    try:
        tk.Group.catalog("nosuch")
    except ValueError as e:
        assert "triclinic" in str(e)
    else:
        raise AssertionError("unknown group accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
