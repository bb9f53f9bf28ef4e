"""Smoke test for the compiled extension: run with `python python/smoke_test.py`."""

import math
import sys

import confluent_susy as cs


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    grid = cs.Grid()
    assert len(grid) == 6001 and close(grid.spacing, 0.005, 1e-15)

    assert close(cs.pt_v0(0.0), -2.0, 1e-15)
    assert close(cs.pt_u(0, 1.0, 0.0), -math.sqrt(2.0), 1e-14)
    assert close(cs.pt_w4(1.0, 0.0), 0.5, 1e-14)

    tower = cs.Tower.poschl_teller(-1.0, [0.0, 0.0, 0.0])
    xs = grid.abscissae()
    w = tower.level(3)
    worst = max(abs(a - cs.pt_w4(1.0, x)) / abs(cs.pt_w4(1.0, x)) for a, x in zip(w, xs))
    assert worst < 1e-6, worst

    fig1 = cs.transform(-0.5, 4, [0.0, 0.0, 50.0, 0.0])
    assert fig1.is_regular and fig1.pair_wronskian_deviation < 1e-4
    states = [v for v, _ in fig1.bound_states()]
    assert len(states) == 2 and close(states[0], -1.0, 1e-3) and close(states[1], -0.5, 1e-3), states

    fig2 = cs.transform(-1.5, 5, [0.0, 0.0, 0.0, 0.01, 0.0])
    states = [v for v, _ in cs.bound_states(fig2.potential)]
    assert len(states) == 2 and close(states[0], -1.5, 1e-3) and close(states[1], -1.0, 1e-3), states

    scan = cs.regularity_scan([cs.pt_w4(1.0, x, c_a=-1.0) for x in xs])
    assert not scan.is_regular and close(scan.zero_brackets[0][0], math.log(2.0), 1e-6)

    try:
        cs.transform(-1.0, 4, [0.0, 0.0, -1.0, 0.0])
    except cs.SingularityError:
        pass
    else:
        raise AssertionError("expected SingularityError")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
