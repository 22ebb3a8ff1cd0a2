import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stackel import flow
from stackel.ambient import build_dual_moser
from stackel.exact import sample_constrained_point

A2 = (1, 2, 4)
seeds = st.integers(0, 2 ** 31)


def tangent_state(seed, m=3):
    rng = np.random.default_rng(seed)
    q = rng.normal(size=m)
    q /= np.linalg.norm(q)
    w = rng.normal(size=m)
    return q, w - (w @ q) * q


@pytest.mark.parametrize("name", flow.FLOWS)
@given(s=seeds)
def test_spray_keeps_velocity_tangent(name, s):
    # d/dt (q.v) = v.v + q.dv/dt must vanish on the constraint set
    q, v = tangent_state(s)
    acc = flow.spray(name, A2, q, v)
    assert abs(v @ v + q @ acc) <= 1e-12 * max(1.0, v @ v)


def test_unknown_flow_rejected():
    with pytest.raises(ValueError):
        flow.parse_flow("neumann")
    with pytest.raises(ValueError):
        flow.spray("g1", A2, [np.nan, 0, 1], [0, 1, 0])


def test_numeric_poly_matches_exact_evaluation():
    fam = build_dual_moser(A2)
    pt = sample_constrained_point(3, 2)
    num = flow.NumericPoly(fam.F[1])(np.array([[float(v) for v in pt.q]]), np.array([[float(v) for v in pt.p]]))
    assert num[0] == pytest.approx(float(fam.F[1].evaluate(pt.q, pt.p)), rel=1e-13)


def test_rejects_off_constraint_initial_state():
    with pytest.raises(ValueError):
        flow.integrate("g2", A2, flow.FlowState(0.0, [1.0, 0.1, 0.0], [0.0, 1.0, 0.0]))


@pytest.mark.parametrize("name", flow.FLOWS)
def test_round_sphere_great_circle_closes(name):
    q0 = np.array([1.0, 0.0, 0.0])
    v0 = np.array([0.0, 0.6, 0.8])
    v0 = flow.normalize_velocity(name, (2, 2, 2), q0, v0)
    speed = float(np.linalg.norm(v0))
    tr = flow.integrate(name, (2, 2, 2), flow.FlowState(0.0, q0, v0), 2 * math.pi / speed, 1e-12, 50)
    assert np.linalg.norm(tr.q[-1] - q0) < 1e-9


@pytest.mark.parametrize("name", flow.FLOWS)
def test_conservation_at_defaults(name):
    rep = flow.conservation_report(name, A2)
    assert rep.verdict, rep.failed()
    assert set(rep.info["drifts"]) == {"H", "J", "F0", "F1", "F2"}


def test_drift_shrinks_with_tolerance():
    init = flow.default_initial(np.array(A2, float), 0)
    init = flow.FlowState(0.0, init.q, flow.normalize_velocity("g2", A2, init.q, init.v))
    drifts = [flow.integrate("g2", A2, init, 10.0, tol, 5).drift("H") for tol in (1e-4, 1e-7, 1e-10)]
    assert drifts[0] > drifts[1] > drifts[2]


def test_csv_export(tmp_path):
    tr = flow.integrate("g1", A2, flow.conservation_report("g1", A2, T=1.0, samples=10).trajectory.state(0),
                        1.0, 1e-10, 10)
    path = tmp_path / "t.csv"
    tr.to_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "q0", "q1", "q2", "v0", "v1", "v2", "H", "F0", "F1", "F2", "J"]
    assert len(rows) == 12
    back = np.array([[float(x) for x in r] for r in rows[1:]])
    assert np.array_equal(back[:, 1:4], tr.q)


def test_projective_equivalence_and_mismatch_control():
    assert flow.projective_equivalence_test(A2, T=5.0, samples=1000).verdict
    ctrl = flow.projective_equivalence_test(A2, T=5.0, samples=1000, mismatch=0.05, threshold=1e-2,
                                            expected=False)
    assert not ctrl.verdict and ctrl.as_expected
