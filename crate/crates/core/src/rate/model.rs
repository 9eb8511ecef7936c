use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Register};
use crate::names::{A, B, G, S, S0};
use crate::scalar::Real;

/// Action channel `G -> S S0` followed by the communication channel
/// `S A -> B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionModel<T: Real> {
    action: KrausChannel<T>,
    comm: KrausChannel<T>,
}

fn has_exactly(r: &Register, names: &[&str]) -> bool {
    r.len() == names.len() && names.iter().all(|n| r.contains(n))
}

impl<T: Real> ActionModel<T> {
    pub fn new(action: KrausChannel<T>, comm: KrausChannel<T>) -> Result<Self> {
        if !has_exactly(action.input(), &[G]) || !has_exactly(action.output(), &[S, S0]) {
            return Err(Error::RegisterMismatch(format!(
                "action channel must map G to S ⊗ S0, got {} -> {}",
                action.input(),
                action.output()
            )));
        }
        if !has_exactly(comm.input(), &[S, A]) || !has_exactly(comm.output(), &[B]) {
            return Err(Error::RegisterMismatch(format!(
                "communication channel must map S ⊗ A to B, got {} -> {}",
                comm.input(),
                comm.output()
            )));
        }
        let ds = action.output().dim_of(S)?;
        if comm.input().dim_of(S)? != ds {
            return Err(Error::RegisterMismatch(format!(
                "S has dimension {} at the action output but {} at the channel input",
                ds,
                comm.input().dim_of(S)?
            )));
        }
        Ok(ActionModel { action, comm })
    }

    pub fn action(&self) -> &KrausChannel<T> {
        &self.action
    }

    pub fn comm(&self) -> &KrausChannel<T> {
        &self.comm
    }

    pub fn dim(&self, name: &str) -> usize {
        match name {
            G => self.action.input().dim(),
            S | S0 => self.action.output().dim_of(name).unwrap(),
            A => self.comm.input().dim_of(A).unwrap(),
            B => self.comm.output().dim(),
            _ => 0,
        }
    }

    pub fn register(&self, name: &str) -> Register {
        Register::single(name, self.dim(name)).expect("model dimensions are positive")
    }
}

/// Auxiliary distribution, action states and encoders.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy<T: Real> {
    p_vu: Vec<Vec<T>>,
    action_states: Vec<DensityMatrix<T>>,
    encoders: Vec<KrausChannel<T>>,
}

fn distribution_tol<T: Real>() -> T {
    T::of(1e-12).max(T::default_epsilon() * T::of(64.0))
}

impl<T: Real> Strategy<T> {
    /// `p_vu[v][u]`, one action state per `u` and one encoder per `v`.
    pub fn new(
        p_vu: Vec<Vec<T>>,
        action_states: Vec<DensityMatrix<T>>,
        encoders: Vec<KrausChannel<T>>,
    ) -> Result<Self> {
        let nv = p_vu.len();
        let nu = p_vu.first().map(Vec::len).unwrap_or(0);
        if nv == 0 || nu == 0 || p_vu.iter().any(|r| r.len() != nu) {
            return Err(Error::BadDistribution("p_vu must be a nonempty rectangular table".into()));
        }
        let mut total = T::zero();
        for &p in p_vu.iter().flatten() {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(Error::BadDistribution(format!("entry {} is not a probability", p)));
            }
            total += p;
        }
        if (total - T::one()).abs() > distribution_tol::<T>() {
            return Err(Error::BadDistribution(format!("p_vu sums to {}", total)));
        }
        if action_states.len() != nu {
            return Err(Error::RegisterMismatch(format!("{} action states for |U| = {}", action_states.len(), nu)));
        }
        if encoders.len() != nv {
            return Err(Error::RegisterMismatch(format!("{} encoders for |V| = {}", encoders.len(), nv)));
        }
        Ok(Strategy { p_vu, action_states, encoders })
    }

    pub fn nv(&self) -> usize {
        self.p_vu.len()
    }

    pub fn nu(&self) -> usize {
        self.p_vu[0].len()
    }

    pub fn p_vu(&self) -> &[Vec<T>] {
        &self.p_vu
    }

    pub fn action_states(&self) -> &[DensityMatrix<T>] {
        &self.action_states
    }

    pub fn encoders(&self) -> &[KrausChannel<T>] {
        &self.encoders
    }

    pub fn p_u(&self) -> Vec<T> {
        (0..self.nu()).map(|u| self.p_vu.iter().fold(T::zero(), |acc, row| acc + row[u])).collect()
    }

    pub fn p_v(&self) -> Vec<T> {
        self.p_vu.iter().map(|row| row.iter().fold(T::zero(), |a, &b| a + b)).collect()
    }

    /// `p(v|u)`; uniform when `p_U(u) = 0`.
    pub fn p_v_given_u(&self, u: usize) -> Vec<T> {
        let pu = self.p_u()[u];
        let nv = self.nv();
        if pu > T::zero() {
            self.p_vu.iter().map(|row| row[u] / pu).collect()
        } else {
            vec![T::one() / T::of(nv as f64); nv]
        }
    }

    /// Checks registers against the model.
    pub fn check(&self, model: &ActionModel<T>) -> Result<()> {
        let g = model.register(G);
        for (u, s) in self.action_states.iter().enumerate() {
            if s.register() != &g {
                return Err(Error::RegisterMismatch(format!(
                    "action state {} lives on {}, expected {}",
                    u,
                    s.register(),
                    g
                )));
            }
        }
        let (s0, a) = (model.register(S0), model.register(A));
        for (v, f) in self.encoders.iter().enumerate() {
            if f.input() != &s0 || f.output() != &a {
                return Err(Error::RegisterMismatch(format!(
                    "encoder {} maps {} -> {}, expected {} -> {}",
                    v,
                    f.input(),
                    f.output(),
                    s0,
                    a
                )));
            }
        }
        Ok(())
    }
}
