"""Check that the suites catch deliberately broken inputs.

Each control breaks one ingredient and reports the residual the matching
suite sees.  All residuals should sit far above the 1e-9 acceptance gate.
"""

import random

from orbitrsh import suites
from orbitrsh.bundle import cocycle_check
from orbitrsh.config import load_config
from orbitrsh.rep import Gen, boundary_decomposition_check, covariance_suite, function_corpus
from orbitrsh.sections import ElementaryTensor, generator_section, orbit_breaking_test, phase_section


def main():
    model = load_config("configs/golden_degree1.json").build_model()
    b, Y = model.bundle, model.Y
    system = model.system

    broken = b.with_scaled_transition(0, 1, 1.001)
    print(f"scaled transition g_01 by 1.001     cocycle violation {cocycle_check(broken)['max_violation']:.3g}")

    raw = phase_section(b, 1)
    member = orbit_breaking_test(ElementaryTensor((raw,)), Y)
    print(f"unprojected section in E_Y          max residual on alpha^-1(Y) {member['max_residual']:.3g}")

    rng = random.Random(0)
    f = function_corpus(model, rng, 1)[0]
    unprojected = generator_section(b, 1)
    x = system.modulus - system.theta_ticks
    res = boundary_decomposition_check(Gen(unprojected), model, 3, x)
    print(f"BDP with an unprojected generator   off-block mass {res.offblock:.3g}")

    cov = covariance_suite(model, unprojected, unprojected, f, samples=100)
    print(f"covariance with unprojected xi      identity (e) deviation {cov['e']:.3g}")

    gauge = suites.gauge_suite(model, samples=4)
    print(f"gauge suite on valid words          deviation {gauge['deviation']:.3g} (control: should be tiny)")


if __name__ == "__main__":
    main()
