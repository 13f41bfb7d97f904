use bcs_coupling::{
    assemble_coupled, assemble_system_coupled, coupled_resolvent_composed, coupled_resolvent_direct, CouplingKind,
    LinearSystemBlock, DISSIPATIVITY_TOL,
};
use bcs_node::{DiscreteBoundaryNode, NodeParts};
use bcs_numerics::linalg::{self, from_real, C64};
use bcs_numerics::random::{complex_normal_matrix, seeded_rng};
use bcs_numerics::HermitianGram;
use proptest::prelude::*;

/// String of length `len` with u(0) = 0, input v(len), output u(len), port weight `w`.
fn string(n: usize, len: f64, w: f64) -> DiscreteBoundaryNode {
    let h = len / n as f64;
    let ns = 2 * n + 1;
    let (iul, iur) = (ns, ns + 1);
    let mass: Vec<f64> = (0..=n).map(|i| if i == 0 || i == n { h / 2.0 } else { h }).collect();
    let mut l = linalg::zeros(ns, ns + 2);
    for i in 0..=n {
        let left = if i == 0 { iul } else { n + i };
        let right = if i == n { iur } else { n + 1 + i };
        l[(i, right)] += C64::new(1.0 / mass[i], 0.0);
        l[(i, left)] -= C64::new(1.0 / mass[i], 0.0);
    }
    for i in 0..n {
        l[(n + 1 + i, i + 1)] += C64::new(1.0 / h, 0.0);
        l[(n + 1 + i, i)] -= C64::new(1.0 / h, 0.0);
    }
    let mut gw = mass;
    gw.extend(std::iter::repeat(h).take(n));
    let gw: Vec<f64> = gw.into_iter().map(|x| x * w).collect();
    DiscreteBoundaryNode::new(NodeParts {
        label: "string".into(),
        n_state: ns,
        l,
        essential: from_real(1, ns + 2, |_, j| if j == iul { 1.0 } else { 0.0 }),
        g: from_real(1, ns + 2, |_, j| if j == n { 1.0 } else { 0.0 }),
        k: from_real(1, ns + 2, |_, j| if j == iur { 1.0 } else { 0.0 }),
        x_gram: HermitianGram::diagonal(&gw).unwrap(),
        u_gram: HermitianGram::diagonal(&[w]).unwrap(),
    })
    .unwrap()
}

fn damper(d: f64, w: f64) -> LinearSystemBlock {
    let a = from_real(1, 1, |_, _| -d);
    let b = from_real(1, 1, |_, _| 1.0);
    LinearSystemBlock::collocated(a, b, HermitianGram::diagonal(&[w]).unwrap(), HermitianGram::diagonal(&[w]).unwrap())
        .unwrap()
}

#[test]
fn kind_is_recorded() {
    let op = assemble_system_coupled(string(6, 1.0, 1.0), damper(1.0, 1.0), linalg::identity(1)).unwrap();
    assert_eq!(op.kind(), CouplingKind::NodeSystem);
    assert_eq!(op.constraints().nrows(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn string_string_with_weighted_ports(len in 0.5f64..2.0, w1 in 0.2f64..5.0, w2 in 0.2f64..5.0, c in -3.0f64..3.0, s in -20.0f64..20.0) {
        let a = string(10, 1.0, w1);
        let b = string(9, len, w2);
        let op = assemble_coupled(a, b, from_real(1, 1, |_, _| c)).unwrap();
        let r = op.dissipativity_residual(50, &mut seeded_rng(2)).unwrap();
        prop_assert!(r <= DISSIPATIVITY_TOL);
        let y = complex_normal_matrix(&mut seeded_rng(3), op.n_state(), 1);
        let lambda = C64::new(0.3, s);
        let direct = coupled_resolvent_direct(&op, lambda, &y).unwrap();
        prop_assert!(linalg::max_abs(&(op.constraints() * &direct)) < 1e-9 * linalg::max_abs(&direct));
    }

    #[test]
    fn string_damper_composed_equals_direct(d in 0.1f64..4.0, w in 0.2f64..5.0, c in 0.2f64..3.0, s in -30.0f64..30.0) {
        let op = assemble_system_coupled(string(12, 1.0, w), damper(d, w), from_real(1, 1, |_, _| c)).unwrap();
        let y = complex_normal_matrix(&mut seeded_rng(7), op.n_state(), 2);
        let lambda = C64::new(0.0, s);
        let direct = coupled_resolvent_direct(&op, lambda, &y).unwrap();
        let (composed, parts) = coupled_resolvent_composed(&op, lambda, &y).unwrap();
        prop_assert!(linalg::rel_diff(&composed, &direct) < 1e-8);
        let (bres, ires) = parts.residuals(op.node1());
        prop_assert!(bres < 1e-10 && ires < 1e-10);
    }
}
