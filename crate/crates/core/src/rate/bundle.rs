use serde::Serialize;

use crate::digest::{model_digest, strategy_digest};
use crate::divergences::{conditional_mutual_information, mutual_information};
use crate::error::Result;
use crate::linalg::{DensityMatrix, LabeledOperator, Register};
use crate::names::{A, B, S, U, V};
use crate::scalar::{cre, CMatrix, Real};

use super::{ActionModel, Strategy};

/// Joint states induced by a strategy on a model.
#[derive(Clone, Debug)]
pub struct JointStateBundle<T: Real> {
    pub p_vu: Vec<Vec<T>>,
    /// `T(sigma_G^u)` on `S S0`, per `u`.
    pub sigma_ss0: Vec<DensityMatrix<T>>,
    /// `sigma_S^u`, per `u`.
    pub sigma_s: Vec<DensityMatrix<T>>,
    /// `(id_S ⊗ F^v)(sigma_SS0^u)` on `S A`, indexed `[v][u]`.
    pub rho_sa: Vec<Vec<DensityMatrix<T>>>,
    /// `Tr_A rho_SA^{v,u}`, indexed `[v][u]`.
    pub rho_s: Vec<Vec<DensityMatrix<T>>>,
    /// `N(rho_SA^{v,u})` on `B`, indexed `[v][u]`.
    pub rho_b: Vec<Vec<DensityMatrix<T>>>,
    pub rho_vusa: DensityMatrix<T>,
    pub rho_vub: DensityMatrix<T>,
    pub rho_vus: DensityMatrix<T>,
    /// `sum_{v,u} p(v,u) |v><v| ⊗ |u><u| ⊗ sigma_S^u`.
    pub rho_markov: DensityMatrix<T>,
    pub model_digest: String,
    pub strategy_digest: String,
}

/// `sum_{v,u} p(v,u) |v><v| ⊗ |u><u| ⊗ blocks[v][u]` on `V U ⊗ block register`.
pub fn classical_quantum<T: Real>(p_vu: &[Vec<T>], blocks: &[Vec<&DensityMatrix<T>>]) -> Result<DensityMatrix<T>> {
    let (nv, nu) = (p_vu.len(), p_vu[0].len());
    let inner = blocks[0][0].register().clone();
    let d = inner.dim();
    let reg = Register::new([(V, nv), (U, nu)])?.concat(&inner)?;
    let mut m = CMatrix::zeros(nv * nu * d, nv * nu * d);
    for v in 0..nv {
        for u in 0..nu {
            let off = (v * nu + u) * d;
            let w = cre(p_vu[v][u]);
            let blk = blocks[v][u].matrix();
            for i in 0..d {
                for j in 0..d {
                    m[(off + i, off + j)] = blk[(i, j)] * w;
                }
            }
        }
    }
    Ok(DensityMatrix::from_op_unchecked(LabeledOperator::new(reg, m)?))
}

fn refs<T: Real>(x: &[Vec<DensityMatrix<T>>]) -> Vec<Vec<&DensityMatrix<T>>> {
    x.iter().map(|row| row.iter().collect()).collect()
}

/// Builds all joint states of the rate formula.
pub fn assemble<T: Real>(model: &ActionModel<T>, strategy: &Strategy<T>) -> Result<JointStateBundle<T>> {
    strategy.check(model)?;
    let (nv, nu) = (strategy.nv(), strategy.nu());
    let sigma_ss0 = strategy.action_states().iter().map(|s| model.action().apply(s)).collect::<Result<Vec<_>>>()?;
    let sigma_s = sigma_ss0.iter().map(|s| s.partial_trace(&[S])).collect::<Result<Vec<_>>>()?;
    let mut rho_sa = Vec::with_capacity(nv);
    let mut rho_s = Vec::with_capacity(nv);
    let mut rho_b = Vec::with_capacity(nv);
    for f in strategy.encoders() {
        let mut sa_row = Vec::with_capacity(nu);
        let mut s_row = Vec::with_capacity(nu);
        let mut b_row = Vec::with_capacity(nu);
        for sig in &sigma_ss0 {
            let sa = f.apply(sig)?.permute(&[S, A])?;
            s_row.push(sa.partial_trace(&[S])?);
            b_row.push(model.comm().apply(&sa)?);
            sa_row.push(sa);
        }
        rho_sa.push(sa_row);
        rho_s.push(s_row);
        rho_b.push(b_row);
    }
    let p = strategy.p_vu();
    let rho_vusa = classical_quantum(p, &refs(&rho_sa))?;
    let rho_vub = classical_quantum(p, &refs(&rho_b))?;
    let rho_vus = classical_quantum(p, &refs(&rho_s))?;
    let markov_blocks: Vec<Vec<&DensityMatrix<T>>> = (0..nv).map(|_| sigma_s.iter().collect()).collect();
    let rho_markov = classical_quantum(p, &markov_blocks)?;
    Ok(JointStateBundle {
        p_vu: p.to_vec(),
        sigma_ss0,
        sigma_s,
        rho_sa,
        rho_s,
        rho_b,
        rho_vusa,
        rho_vub,
        rho_vus,
        rho_markov,
        model_digest: model_digest(model),
        strategy_digest: strategy_digest(strategy),
    })
}

impl<T: Real> JointStateBundle<T> {
    pub fn nv(&self) -> usize {
        self.p_vu.len()
    }

    pub fn nu(&self) -> usize {
        self.p_vu[0].len()
    }

    pub fn p_u(&self) -> Vec<T> {
        (0..self.nu()).map(|u| self.p_vu.iter().fold(T::zero(), |acc, row| acc + row[u])).collect()
    }

    pub fn rho_vu(&self) -> Result<DensityMatrix<T>> {
        self.rho_vub.partial_trace(&[V, U])
    }

    pub fn rho_b_marginal(&self) -> Result<DensityMatrix<T>> {
        self.rho_vub.partial_trace(&[B])
    }

    /// `rho_VU ⊗ rho_B`.
    pub fn product_vu_b(&self) -> Result<DensityMatrix<T>> {
        self.rho_vu()?.tensor(&self.rho_b_marginal()?)
    }
}

/// Both terms of the rate and their difference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateReport<T> {
    pub r_low: T,
    pub i_vub: T,
    pub i_vs_given_u: T,
    /// `max(0, r_low)`.
    pub capacity_lower_bound: T,
    pub model_digest: String,
    pub strategy_digest: String,
}

/// `I(VU;B) - I(V;S|U)`.
pub fn achievable_rate<T: Real>(bundle: &JointStateBundle<T>) -> Result<RateReport<T>> {
    let i_vub = mutual_information(&bundle.rho_vub, &[V, U], &[B])?;
    let i_vs_given_u = conditional_mutual_information(&bundle.rho_vus, &[V], &[S], &[U])?;
    let r_low = i_vub - i_vs_given_u;
    Ok(RateReport {
        r_low,
        i_vub,
        i_vs_given_u,
        capacity_lower_bound: r_low.max(T::zero()),
        model_digest: bundle.model_digest.clone(),
        strategy_digest: bundle.strategy_digest.clone(),
    })
}
