"""Smoke test for the algconj Python extension.

Build and install first:
    pip install maturin
    pip install --no-build-isolation ./crates/py
"""

import math

import algconj


def main() -> None:
    h = algconj.Height(1, "inf")
    assert h.n == 1 and math.isinf(h.p)
    assert abs(h.ball_volume() - 4.0) < 1e-12

    r = algconj.phi_count(h, 10, [[0.0, 1.0]])
    assert r["phi"] == 33, r  # Farey fractions of order 10 in [0, 1]

    lam, lam_star = algconj.lattice_cube(2, 2.0, half=1.0)
    assert (lam, lam_star) == (25, 16)

    reals, uppers = algconj.find_roots([-2.0, 0.0, 1.0])
    assert len(reals) == 2 and not uppers
    assert abs(reals[1] - math.sqrt(2.0)) < 1e-12
    assert not algconj.is_irreducible([-1, 0, 1])

    h2 = algconj.Height(2, "inf")
    p0, _ = algconj.prob_real_count(h2, 0)
    p1, _ = algconj.prob_real_count(h2, 1)
    assert abs(p0 + p1 - 1.0) < 1e-6, (p0, p1)

    value, err = algconj.rho(h2, [0.5])
    assert value > 0.0 and err >= 0.0

    bins = algconj.simulate_real_density(h2, -2.0, 2.0, bins=4, draws=20000, seed=3)
    assert len(bins) == 4

    try:
        algconj.Height(2, 0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("p < 1 accepted")

    print("algconj smoke test passed")


if __name__ == "__main__":
    main()
