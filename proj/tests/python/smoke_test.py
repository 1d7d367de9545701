"""Smoke tests for the python bindings: a thin pass over each exposed
operation, not a re-run of the C++ suites."""

import math
import sys

import cdmelab


def approx(a, b, tol=1e-10):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    basis = cdmelab.make_basis(3)
    approx(basis.eigenvalue(1), 0.0)
    approx(basis.eigenvalue(2), math.pi**2, 1e-12)
    approx(cdmelab.eval_mode(basis, 2, 0.0), math.sqrt(2.0), 1e-12)

    rate = cdmelab.project_creation_rate(basis, lambda x: 1.0 + math.cos(math.pi * x), 192)
    approx(rate.total_rate, 1.0, 1e-12)
    approx(rate.mode_coeffs[1], 1.0 / math.sqrt(2.0), 1e-12)

    space = cdmelab.make_space(3, 4)
    assert len(space) == 35  # C(7,3)
    assert space.index(0) == [0, 0, 0]
    assert space.find([2, 1, 0]) >= 0

    gen = cdmelab.assemble_from_genfun(space, basis, rate, 1.0)
    alt = cdmelab.assemble_from_cdme(space, basis, rate, 1.0, 192)
    rel, _, _ = cdmelab.max_entry_difference(gen, alt)
    assert rel < 1e-10, f"route disagreement {rel}"

    # evolve on a deeper degree cap so truncation leakage stays negligible
    deep = cdmelab.make_space(3, 12)
    deep_gen = cdmelab.assemble_from_genfun(deep, basis, rate, 1.0)
    vac = cdmelab.vacuum_state(deep)
    approx(cdmelab.mass(vac), 1.0)
    states = cdmelab.evolve(vac, deep_gen, [0.5, 1.0])
    law = cdmelab.number_law(states[-1])
    assert abs(sum(law) - 1.0) < 1e-6
    assert all(p > -1e-9 for p in law)

    # creation-only law is Poisson
    uniform = cdmelab.constant_creation_rate(cdmelab.make_basis(1), 1.0)
    s1 = cdmelab.make_space(1, 16)
    pure = cdmelab.assemble_from_genfun(s1, cdmelab.make_basis(1), uniform, 0.0)
    p = cdmelab.number_law(cdmelab.evolve(cdmelab.vacuum_state(s1), pure, [1.0])[0])
    exact = cdmelab.creation_only_law(1.0, 1.0, 16)
    assert max(abs(a - b) for a, b in zip(p, exact)) < 1e-8

    est = cdmelab.mc_estimate(1.0, 1.0, 1.0, replicas=2000, master_seed=7)
    assert est.replicas_used == 2000
    assert abs(sum(est.number_law) - 1.0) < 1e-12
    again = cdmelab.mc_estimate(1.0, 1.0, 1.0, replicas=2000, master_seed=7)
    assert est.number_law == again.number_law

    stat = cdmelab.cme_stationary(16, 1.0, 1.0)
    approx(sum(stat), 1.0, 1e-10)

    grid = [-2.0 + 0.1 * i for i in range(41)]
    assert max(cdmelab.weierstrass_transfer_check(n, grid) for n in range(9)) < 1e-8

    kernel = cdmelab.eval_kernel(states[-1], basis, [0.25, 0.75])
    flipped = cdmelab.eval_kernel(states[-1], basis, [0.75, 0.25])
    approx(kernel, flipped, 1e-12)
    assert kernel > 0.0  # two-particle density is positive for this model

    print("python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
