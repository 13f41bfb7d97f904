use std::ops::Range;

use bcs_node::{check_passivity, kernel_projector, DiscreteBoundaryNode, FeedbackSpec};
use bcs_numerics::json;
use bcs_numerics::linalg::{self, CMat, C64};
use bcs_numerics::random::{complex_normal_vec, seeded_rng};
use bcs_numerics::HermitianGram;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::system::LinearSystemBlock;
use crate::{CouplingError, Result};

/// Per-unit-energy tolerance for `Re⟨Ax,x⟩ ≤ 0` and for constituent passivity.
pub const DISSIPATIVITY_TOL: f64 = 1e-12;
const TRIALS: usize = 100;
const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    NodeNode,
    NodeSystem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partner {
    Node(DiscreteBoundaryNode),
    System(LinearSystemBlock),
}

impl Partner {
    pub fn n_state(&self) -> usize {
        match self {
            Partner::Node(n) => n.n_state(),
            Partner::System(s) => s.n(),
        }
    }
    pub fn n_aux(&self) -> usize {
        match self {
            Partner::Node(n) => n.n_aux(),
            Partner::System(_) => 0,
        }
    }
    pub fn m(&self) -> usize {
        match self {
            Partner::Node(n) => n.m(),
            Partner::System(s) => s.m(),
        }
    }
    pub fn x_gram(&self) -> &HermitianGram {
        match self {
            Partner::Node(n) => n.x_gram(),
            Partner::System(s) => s.x_gram(),
        }
    }
    pub fn u_gram(&self) -> &HermitianGram {
        match self {
            Partner::Node(n) => n.u_gram(),
            Partner::System(s) => s.u_gram(),
        }
    }

    /// `P₂(λ)`.
    pub fn transfer(&self, lambda: C64) -> Result<CMat> {
        match self {
            Partner::Node(n) => Ok(bcs_node::transfer(n, n.g(), lambda)?.p),
            Partner::System(s) => s.transfer(lambda),
        }
    }

    /// State part of `(λ-A₂)^{-1}` as a dense matrix.
    pub fn state_resolvent(&self, lambda: C64) -> Result<CMat> {
        let id = linalg::identity(self.n_state());
        match self {
            Partner::Node(n) => {
                let full = bcs_node::restricted_resolvent(n, n.g(), lambda, &id)?;
                Ok(n.state_part(&full))
            }
            Partner::System(s) => Ok(s.resolvent_factor(lambda)?.solve(&id)),
        }
    }
}

/// Column ranges of `[state₁ | state₂ | aux₁ | aux₂]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub n_state1: usize,
    pub n_state2: usize,
    pub n_aux1: usize,
    pub n_aux2: usize,
}

impl Layout {
    pub fn n(&self) -> usize {
        self.n_state() + self.n_aux1 + self.n_aux2
    }
    pub fn n_state(&self) -> usize {
        self.n_state1 + self.n_state2
    }
    pub fn state1(&self) -> Range<usize> {
        0..self.n_state1
    }
    pub fn state2(&self) -> Range<usize> {
        self.n_state1..self.n_state()
    }
    pub fn aux1(&self) -> Range<usize> {
        self.n_state()..self.n_state() + self.n_aux1
    }
    pub fn aux2(&self) -> Range<usize> {
        self.n_state() + self.n_aux1..self.n()
    }
    /// Global column of each entry of a full first-node vector.
    pub fn node1_columns(&self) -> Vec<usize> {
        self.state1().chain(self.aux1()).collect()
    }
    pub fn partner_columns(&self) -> Vec<usize> {
        self.state2().chain(self.aux2()).collect()
    }
}

/// Places the columns of `local` at `cols` in a matrix with `n` columns.
fn scatter(local: &CMat, cols: &[usize], n: usize) -> CMat {
    let mut out = linalg::zeros(local.nrows(), n);
    for (lj, &gj) in cols.iter().enumerate() {
        for i in 0..local.nrows() {
            out[(i, gj)] = local[(i, lj)];
        }
    }
    out
}

fn gather_rows(x: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledOperator {
    kind: CouplingKind,
    node1: DiscreteBoundaryNode,
    partner: Partner,
    feedback: FeedbackSpec,
    gram: HermitianGram,
    l: CMat,
    constraints: CMat,
    layout: Layout,
}

/// Couples two nodes through `G₁x₁ = J^*K₂x₂` and `G₂x₂ = -JK₁x₁`.
pub fn assemble_coupled(node1: DiscreteBoundaryNode, node2: DiscreteBoundaryNode, j: CMat) -> Result<CoupledOperator> {
    check_node(&node1, "node 1")?;
    check_node(&node2, "node 2")?;
    CoupledOperator::build(node1, Partner::Node(node2), j, None)
}

/// Couples a node with a linear system through `(G₁+J^*D₂JK₁)x₁ = J^*C₂x₂`.
pub fn assemble_system_coupled(node1: DiscreteBoundaryNode, sys2: LinearSystemBlock, j: CMat) -> Result<CoupledOperator> {
    check_node(&node1, "node 1")?;
    CoupledOperator::build(node1, Partner::System(sys2), j, None)
}

fn check_node(node: &DiscreteBoundaryNode, which: &str) -> Result<()> {
    let rep = check_passivity(node, TRIALS, DISSIPATIVITY_TOL, &mut seeded_rng(SEED))?;
    if !rep.pass {
        return Err(CouplingError::PassivityViolation { which: which.into(), residual: rep.max_residual });
    }
    Ok(())
}

impl CoupledOperator {
    fn build(node1: DiscreteBoundaryNode, partner: Partner, j: CMat, q: Option<CMat>) -> Result<Self> {
        let (m1, m2) = (node1.m(), partner.m());
        if j.nrows() != m2 || j.ncols() != m1 {
            return Err(CouplingError::DimensionMismatch(format!(
                "J is {}x{}, expected {m2}x{m1}",
                j.nrows(),
                j.ncols()
            )));
        }
        let q = q.unwrap_or_else(|| linalg::zeros(m2, m2));
        let feedback = FeedbackSpec::new(j, q, partner.u_gram().clone(), None)?;
        let layout = Layout {
            n_state1: node1.n_state(),
            n_state2: partner.n_state(),
            n_aux1: node1.n_aux(),
            n_aux2: partner.n_aux(),
        };
        let n = layout.n();
        let (c1, c2) = (layout.node1_columns(), layout.partner_columns());
        let j = &feedback.j;
        let js = feedback.j_adjoint(node1.u_gram());
        let mut l_blocks = vec![scatter(node1.l(), &c1, n)];
        let mut con = vec![scatter(node1.essential(), &c1, n)];
        let kind = match &partner {
            Partner::Node(node2) => {
                l_blocks.push(scatter(node2.l(), &c2, n));
                con.push(scatter(node2.essential(), &c2, n));
                con.push(scatter(node1.g(), &c1, n) - scatter(&(&js * node2.k()), &c2, n));
                con.push(scatter(node2.g(), &c2, n) + scatter(&(j * node1.k()), &c1, n));
                CouplingKind::NodeNode
            }
            Partner::System(sys) => {
                let feed = linalg::scale(&(sys.b() * j * node1.k()), C64::new(-1.0, 0.0));
                l_blocks.push(scatter(sys.a(), &c2, n) + scatter(&feed, &c1, n));
                let b1 = node1.g() + &js * sys.d() * j * node1.k();
                con.push(scatter(&b1, &c1, n) - scatter(&(&js * sys.c()), &c2, n));
                CouplingKind::NodeSystem
            }
        };
        let l = linalg::vstack(&l_blocks.iter().collect::<Vec<_>>());
        let constraints = linalg::vstack(&con.iter().collect::<Vec<_>>());
        let gram = HermitianGram::block_diag(&[node1.x_gram(), partner.x_gram()]);
        let op = Self { kind, node1, partner, feedback, gram, l, constraints, layout };
        let residual = op.dissipativity_residual(TRIALS, &mut seeded_rng(SEED))?;
        if residual > DISSIPATIVITY_TOL {
            return Err(CouplingError::NotDissipative { residual });
        }
        Ok(op)
    }

    /// Records the damping `Q` used by the reference node `A₀`.
    pub fn with_q(self, q: CMat) -> Result<Self> {
        let feedback = FeedbackSpec::new(self.feedback.j.clone(), q, self.feedback.v_gram.clone(), None)?;
        Ok(Self { feedback, ..self })
    }

    /// Largest `Re⟨Lx,x⟩_X / ‖x‖²_X` over random vectors satisfying every constraint row.
    pub fn dissipativity_residual<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> Result<f64> {
        let proj = kernel_projector(&self.constraints)?;
        let ns = self.n_state();
        let mut worst = if trials == 0 { 0.0 } else { f64::NEG_INFINITY };
        for _ in 0..trials {
            let x = linalg::matvec(&proj, &complex_normal_vec(rng, self.n()));
            let lx = linalg::matvec(&self.l, &x);
            let e = self.gram.norm_sq(&x[..ns]);
            let r = self.gram.inner(&lx, &x[..ns]).re;
            worst = worst.max(if e > 0.0 { r / e } else { 0.0 });
        }
        Ok(worst)
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }
    pub fn node1(&self) -> &DiscreteBoundaryNode {
        &self.node1
    }
    pub fn partner(&self) -> &Partner {
        &self.partner
    }
    pub fn j(&self) -> &CMat {
        &self.feedback.j
    }
    pub fn q(&self) -> &CMat {
        &self.feedback.q
    }
    /// `J`, `Q` and the partner port Gram.
    pub fn feedback(&self) -> &FeedbackSpec {
        &self.feedback
    }
    /// `J^*: U₂ -> U₁`.
    pub fn j_adjoint(&self) -> CMat {
        self.feedback.j_adjoint(self.node1.u_gram())
    }
    pub fn gram(&self) -> &HermitianGram {
        &self.gram
    }
    pub fn l(&self) -> &CMat {
        &self.l
    }
    pub fn constraints(&self) -> &CMat {
        &self.constraints
    }
    pub fn layout(&self) -> Layout {
        self.layout
    }
    pub fn n(&self) -> usize {
        self.layout.n()
    }
    pub fn n_state(&self) -> usize {
        self.layout.n_state()
    }
    /// Evolution rows come first, constraint rows after.
    pub fn evolution_rows(&self) -> Range<usize> {
        0..self.n_state()
    }
    pub fn constraint_rows(&self) -> Range<usize> {
        self.n_state()..self.n()
    }

    /// `λ[I 0] - L`.
    pub fn evolution_matrix(&self, lambda: C64) -> CMat {
        let mut a = linalg::scale(&self.l, C64::new(-1.0, 0.0));
        for i in 0..self.n_state() {
            a[(i, i)] += lambda;
        }
        a
    }

    pub fn system_matrix(&self, lambda: C64) -> CMat {
        linalg::vstack(&[&self.evolution_matrix(lambda), &self.constraints])
    }

    /// Full first-node vectors (state then auxiliary) from full coupled vectors.
    pub fn node1_part(&self, x: &CMat) -> CMat {
        gather_rows(x, &self.layout.node1_columns())
    }
    pub fn partner_part(&self, x: &CMat) -> CMat {
        gather_rows(x, &self.layout.partner_columns())
    }

    /// Inverse of `node1_part`/`partner_part`.
    pub fn join(&self, x1: &CMat, x2: &CMat) -> CMat {
        let mut out = linalg::zeros(self.n(), x1.ncols());
        for (rows, part) in [(self.layout.node1_columns(), x1), (self.layout.partner_columns(), x2)] {
            for (li, &gi) in rows.iter().enumerate() {
                for j in 0..part.ncols() {
                    out[(gi, j)] = part[(li, j)];
                }
            }
        }
        out
    }

    /// `(E_W, E_H)`-style split of `½‖x‖²` into the two blocks.
    pub fn block_energies(&self, state: &[C64]) -> (f64, f64) {
        let (a, b) = state.split_at(self.layout.n_state1);
        (0.5 * self.node1.x_gram().norm_sq(a), 0.5 * self.partner.x_gram().norm_sq(b))
    }
}

#[derive(Serialize, Deserialize)]
struct CouplingSection {
    kind: CouplingKind,
    #[serde(with = "json::matrix")]
    j: CMat,
    #[serde(with = "json::matrix")]
    q: CMat,
}

#[derive(Serialize, Deserialize)]
struct CoupledDoc {
    node1: DiscreteBoundaryNode,
    partner: Partner,
    coupling: CouplingSection,
}

impl Serialize for CoupledOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoupledDoc {
            node1: self.node1.clone(),
            partner: self.partner.clone(),
            coupling: CouplingSection { kind: self.kind, j: self.feedback.j.clone(), q: self.feedback.q.clone() },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoupledOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let doc = CoupledDoc::deserialize(d)?;
        let kind_ok = matches!(
            (&doc.partner, doc.coupling.kind),
            (Partner::Node(_), CouplingKind::NodeNode) | (Partner::System(_), CouplingKind::NodeSystem)
        );
        if !kind_ok {
            return Err(D::Error::custom("coupling kind does not match the partner"));
        }
        let op = match doc.partner {
            Partner::Node(n2) => assemble_coupled(doc.node1, n2, doc.coupling.j),
            Partner::System(s2) => assemble_system_coupled(doc.node1, s2, doc.coupling.j),
        };
        op.and_then(|op| op.with_q(doc.coupling.q)).map_err(D::Error::custom)
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::{rod, string};
    use super::*;
    use crate::{coupled_resolvent_direct, ResolventSolver};

    fn one() -> CMat {
        linalg::identity(1)
    }

    #[test]
    fn layout_ranges() {
        let op = assemble_coupled(string(6), rod(5), one()).unwrap();
        let lay = op.layout();
        assert_eq!((lay.n_state1, lay.n_state2, lay.n_aux1, lay.n_aux2), (13, 5, 2, 2));
        assert_eq!(op.n(), 22);
        assert_eq!(op.constraints().nrows(), 4);
        assert_eq!(lay.aux2(), 20..22);
    }

    #[test]
    fn coupled_is_dissipative() {
        let op = assemble_coupled(string(20), rod(20), one()).unwrap();
        let r = op.dissipativity_residual(100, &mut seeded_rng(8)).unwrap();
        assert!(r <= 1e-12, "{r}");
    }

    #[test]
    fn zero_j_decouples() {
        let (a, b) = (string(8), rod(8));
        let op = assemble_coupled(a.clone(), b.clone(), linalg::zeros(1, 1)).unwrap();
        let lambda = C64::new(0.7, 2.0);
        let r = ResolventSolver::new(&op, lambda).unwrap().state_resolvent().unwrap();
        let r1 = bcs_node::restricted_resolvent(&a, a.g(), lambda, &linalg::identity(a.n_state())).unwrap();
        let r2 = Partner::Node(b).state_resolvent(lambda).unwrap();
        let expected = linalg::block_diag(&[&a.state_part(&r1), &r2]);
        assert!(linalg::rel_diff(&r, &expected) < 1e-12);
    }

    #[test]
    fn direct_resolvent_round_trip() {
        let op = assemble_coupled(string(10), rod(10), one()).unwrap();
        let lambda = C64::new(0.0, 3.0);
        let mut rng = seeded_rng(1);
        let y = bcs_numerics::random::complex_normal_matrix(&mut rng, op.n_state(), 2);
        let x = coupled_resolvent_direct(&op, lambda, &y).unwrap();
        assert!(linalg::rel_diff(&(op.evolution_matrix(lambda) * &x), &y) < 1e-10);
        assert!(linalg::max_abs(&(op.constraints() * &x)) < 1e-10 * linalg::max_abs(&x));
        let zero = coupled_resolvent_direct(&op, lambda, &linalg::zeros(op.n_state(), 1)).unwrap();
        assert_eq!(linalg::max_abs(&zero), 0.0);
    }

    #[test]
    fn contraction_at_one() {
        let op = assemble_coupled(string(12), rod(12), one()).unwrap();
        let r = ResolventSolver::new(&op, C64::new(1.0, 0.0)).unwrap().state_resolvent().unwrap();
        let norm = bcs_numerics::weighted_operator_norm(&r, op.gram(), op.gram()).unwrap();
        assert!(norm <= 1.0 + 1e-10, "{norm}");
    }

    #[test]
    fn wrong_j_shape() {
        let err = assemble_coupled(string(4), rod(4), linalg::zeros(2, 1)).unwrap_err();
        assert!(matches!(err, CouplingError::DimensionMismatch(_)));
    }

    #[test]
    fn json_round_trip_keeps_q() {
        let op = assemble_coupled(string(5), rod(5), one()).unwrap().with_q(one()).unwrap();
        let text = serde_json::to_string(&op).unwrap();
        assert!(text.contains("\"coupling\"") && text.contains("\"node-node\""));
        let back: CoupledOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn negative_q_rejected() {
        let op = assemble_coupled(string(5), rod(5), one()).unwrap();
        assert!(op.with_q(linalg::scale(&one(), C64::new(-0.1, 0.0))).is_err());
    }
}
