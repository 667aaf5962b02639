"""Smoke test for the simplexforge_py extension module.

Build and run from the repository root:

    cargo build --release -p simplexforge-py --features extension-module
    cp target/release/libsimplexforge_py.so python/simplexforge_py.so
    python3 python/smoke_test.py
"""

import math

import simplexforge_py as sf


def main():
    basis = sf.GellMannBasis(3)
    assert len(basis) == 8
    # Tr(Λ_j Λ_k) = 2 δ_jk
    mats = basis.matrices()
    tr = sum(mats[0][i][k] * mats[0][k][i] for i in range(3) for k in range(3))
    assert abs(tr - 2) < 1e-12

    sic = sf.seed_sic(3)
    v = basis.to_bloch(sic[0])
    assert abs(math.hypot(*v) - sf.pure_state_radius(3)) < 1e-12
    back = basis.from_bloch(v)
    assert max(abs(back[i][j] - sic[0][i][j]) for i in range(3) for j in range(3)) < 1e-12

    rep = sf.verify(sic, power=3, f0=sf.pure_state_cubic(3))
    assert rep["flags"]["verdict"], rep["flags"]
    assert abs(rep["triple_sum"] - 81) < 1e-8

    simplex = sf.regular_simplex(2)
    assert len(simplex) == 3

    opt = sf.Optimizer(3)
    res = opt.optimize(0.1)
    assert res.converged and res.residual_sum < 1e-16, res
    assert res.verify()["flags"]["geometry"]
    warm = opt.optimize(0.05, start=res)
    assert warm.converged

    fams = opt.scan(-0.1, 0.1, 5)
    assert [round(f.f0, 12) for f in fams] == [-0.1, -0.05, 0.0, 0.05, 0.1]
    assert all(f.converged for f in fams)

    c = sf.circle(sic[0], sic[1], sic[2], samples=90)
    assert abs(c["fitted_cos3_coefficient"] - c["closed_form_cos3_coefficient"]) < 1e-9

    s = sf.knaster_s1(lambda x, y: math.sin(3 * math.atan2(y, x)), 3)
    assert s["spread"] < 1e-10
    s = sf.knaster_s1(lambda x, y: y + 0.3 * x * x, 2)
    assert s["spread"] < 1e-10

    lam = sf.spectrum_from_traces([[2, 1j], [-1j, 2]])
    assert abs(lam[0] - 3) < 1e-12 and abs(lam[1] - 1) < 1e-12

    try:
        sf.Optimizer(1)
    except ValueError:
        pass
    else:
        raise AssertionError("dimension 1 accepted")

    print("smoke test passed:", res)


if __name__ == "__main__":
    main()
