"""Smoke test for the Python bindings: one small end-to-end pass."""

import math

import numpy as np

import membranes_lab as ml


def test_pava():
    out = ml.pava_project([1.0, 3.0, 2.0])
    assert abs(sum(out) - 6.0) < 1e-12
    assert all(out[i] >= out[i + 1] - 1e-12 for i in range(len(out) - 1))
    assert all(abs(v - 2.0) < 1e-12 for v in out)


def test_solve_category_i():
    dom = ml.build_domain(65, 1.0)
    bc = ml.example46_boundary("i", dom)
    stack, report = ml.solve(dom, forcing=[1.0, 0.0, -1.0], theta=1.0, bc=bc)
    assert report["converged"], report

    exact = ml.example46_stack("i", dom).values()
    got = stack.values()
    assert got.shape == exact.shape == (3, 65, 65)
    err = np.max(np.abs(got - exact))
    assert err < 5e-2, err

    # origin lies on the free boundary of every pair
    mult = ml.contact_multiplicity(stack)
    assert mult[32, 32] == 2

    ix, iy = ml.find_blowup_base(stack, near_x=0.0, near_y=0.0)
    assert ix is not None


def test_weiss():
    dom = ml.build_domain(129, 1.2)
    stack = ml.example46_stack("i", dom)
    w = ml.weiss_energy(stack, [1.0, 0.0, -1.0], r=1.0)
    assert abs(w["W"] - math.pi / 8) < 1e-3, w
    assert abs(ml.weiss_of_category("i") - math.pi / 8) < 1e-10

    sweep = ml.weiss_sweep(stack, [1.0, 0.0, -1.0], radii=[0.3, 0.5, 0.8, 1.1])
    assert sweep["flagged_count"] == 0, sweep


def test_classify():
    dom = ml.build_domain(129, 1.0)
    stack = ml.example46_stack("ii", dom, e_angle=0.4)
    res = ml.classify(stack, forcing=[1.0, 0.0, -1.0], theta=1.0)
    assert res["label"] == "ii", res
    assert res["misfit"] < 1e-8, res
    assert abs(res["angle"] - 0.4) < 1e-6, res


def test_blowup():
    dom = ml.build_domain(129, 1.0)
    stack = ml.normalize_average(ml.example46_stack("i", dom))
    prof = ml.rescale(stack, [1.0, 0.0, -1.0], 64, 64, 0.5, n_ref=65)
    defect = ml.homogeneity_defect(prof, [0.25, 0.5, 0.75])
    assert defect < 1e-2, defect


if __name__ == "__main__":
    for fn in [test_pava, test_solve_category_i, test_weiss, test_classify,
               test_blowup]:
        fn()
        print(f"{fn.__name__}: ok")
    print("smoke test passed")
