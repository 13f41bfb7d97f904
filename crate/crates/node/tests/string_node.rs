use bcs_node::{
    check_passivity, feedback_boundary, swap_node, transfer, verify_feedback_formulas, verify_node_identities,
    verify_square_estimates, verify_swap, DiscreteBoundaryNode, FeedbackSpec, NodeParts,
};
use bcs_numerics::linalg::{self, from_real, C64};
use bcs_numerics::random::seeded_rng;
use bcs_numerics::HermitianGram;

/// Lossless string on (0, 1) with u(0) = 0, input v(1), output u(1).
fn string(n: usize) -> DiscreteBoundaryNode {
    let h = 1.0 / n as f64;
    let ns = 2 * n + 1;
    let (iul, iur) = (ns, ns + 1);
    let w: Vec<f64> = (0..=n).map(|i| if i == 0 || i == n { h / 2.0 } else { h }).collect();
    let mut l = linalg::zeros(ns, ns + 2);
    for i in 0..=n {
        let left = if i == 0 { iul } else { n + i };
        let right = if i == n { iur } else { n + 1 + i };
        l[(i, right)] += C64::new(1.0 / w[i], 0.0);
        l[(i, left)] -= C64::new(1.0 / w[i], 0.0);
    }
    for i in 0..n {
        l[(n + 1 + i, i + 1)] += C64::new(1.0 / h, 0.0);
        l[(n + 1 + i, i)] -= C64::new(1.0 / h, 0.0);
    }
    let mut gw = w;
    gw.extend(std::iter::repeat(h).take(n));
    DiscreteBoundaryNode::new(NodeParts {
        label: "string".into(),
        n_state: ns,
        l,
        essential: from_real(1, ns + 2, |_, j| if j == iul { 1.0 } else { 0.0 }),
        g: from_real(1, ns + 2, |_, j| if j == n { 1.0 } else { 0.0 }),
        k: from_real(1, ns + 2, |_, j| if j == iur { 1.0 } else { 0.0 }),
        x_gram: HermitianGram::diagonal(&gw).unwrap(),
        u_gram: HermitianGram::identity(1),
    })
    .unwrap()
}

#[test]
fn transfer_converges_to_tanh() {
    let lambda = C64::new(0.3, 0.7);
    let exact = lambda.tanh();
    let err = |n: usize| (transfer(&string(n), string(n).g(), lambda).unwrap().p[(0, 0)] - exact).norm();
    let (e1, e2) = (err(40), err(80));
    assert!(e2 < 1e-3, "{e2}");
    assert!(e1 / e2 > 3.0, "observed order too low: {e1} {e2}");
}

#[test]
fn identities_and_square_estimates() {
    let node = string(30);
    let mut rng = seeded_rng(9);
    let rep = verify_node_identities(&node, C64::new(0.1, 4.0), 10, &mut rng).unwrap();
    assert!(rep.max_residual() < 1e-9, "{rep:?}");
    for lambda in [C64::new(0.01, 1.0), C64::new(1.0, 0.0), C64::new(2.0, -30.0)] {
        assert!(verify_square_estimates(&node, lambda).unwrap().pass);
    }
}

#[test]
fn feedback_and_swap() {
    let node = string(24);
    let fb = FeedbackSpec::scalar(2.0, HermitianGram::identity(1)).unwrap();
    let damped = node.with_boundary(&feedback_boundary(&node, &fb).unwrap()).unwrap();
    assert!(check_passivity(&damped, 50, 1e-12, &mut seeded_rng(4)).unwrap().pass);
    for s in [0.0, 1.0, 10.0, 40.0] {
        let rep = verify_feedback_formulas(&node, &fb, C64::new(0.0, s)).unwrap();
        assert!(rep.passes(1e-8), "{s}: {rep:?}");
        assert!(rep.jpj_norm <= 0.5 + 1e-10);
    }
    let swapped = swap_node(&node).unwrap();
    assert_eq!(swapped.g(), node.k());
    assert!(verify_swap(&node, C64::new(0.5, 2.0)).unwrap().residual < 1e-9);
}

#[test]
fn feedback_spec_json_round_trip() {
    let fb = FeedbackSpec::scalar(1.5, HermitianGram::diagonal(&[1.0, 3.0]).unwrap()).unwrap();
    let text = serde_json::to_string(&fb).unwrap();
    let back: FeedbackSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, fb);
}
