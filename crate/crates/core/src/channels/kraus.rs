use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, operator_norm, DensityMatrix, LabeledOperator, Register, Subsystem};
use crate::scalar::{cre, CMatrix, Real, C};

/// Completely positive map in Kraus form with declared input and output
/// registers. Constructed values are trace preserving within
/// [`Real::channel_tol`].
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    input: Register,
    output: Register,
    kraus: Vec<CMatrix<T>>,
}

/// CP and TP residuals of a raw Kraus list.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ChannelDiagnostics {
    /// Smallest eigenvalue of the Choi matrix.
    pub cp_min_eigenvalue: f64,
    /// Operator norm of `I - sum K†K`.
    pub tp_residual: f64,
}

fn check_shapes<T: Real>(input: &Register, output: &Register, kraus: &[CMatrix<T>]) -> Result<()> {
    if kraus.is_empty() {
        return Err(Error::InvalidChannel("empty Kraus list".into()));
    }
    for (k, m) in kraus.iter().enumerate() {
        if m.nrows() != output.dim() || m.ncols() != input.dim() {
            return Err(Error::RegisterMismatch(format!(
                "Kraus operator {} is {}x{}, expected {}x{} for {} -> {}",
                k,
                m.nrows(),
                m.ncols(),
                output.dim(),
                input.dim(),
                input,
                output
            )));
        }
    }
    Ok(())
}

fn tp_residual<T: Real>(input: &Register, kraus: &[CMatrix<T>]) -> T {
    let d = input.dim();
    let mut acc = CMatrix::<T>::identity(d, d);
    for k in kraus {
        acc -= k.adjoint() * k;
    }
    operator_norm(&acc)
}

/// Register of the Choi matrix: primed copies of the input names followed by
/// the output register.
fn choi_register(input: &Register, output: &Register) -> Result<Register> {
    let primed = input.subsystems().iter().map(|s| Subsystem { name: format!("{}'", s.name), dim: s.dim }).collect();
    Register::from_subsystems(primed)?.concat(output)
}

/// `sum_ij |i><j| ⊗ N(|i><j|)` for an arbitrary Kraus list.
pub fn choi_of<T: Real>(input: &Register, output: &Register, kraus: &[CMatrix<T>]) -> Result<LabeledOperator<T>> {
    check_shapes(input, output, kraus)?;
    let (di, d_o) = (input.dim(), output.dim());
    let mut m = CMatrix::zeros(di * d_o, di * d_o);
    for k in kraus {
        let v = CMatrix::from_fn(di * d_o, 1, |r, _| k[(r % d_o, r / d_o)]);
        m += &v * v.adjoint();
    }
    LabeledOperator::new(choi_register(input, output)?, m)
}

pub fn diagnose<T: Real>(input: &Register, output: &Register, kraus: &[CMatrix<T>]) -> Result<ChannelDiagnostics> {
    let choi = choi_of(input, output, kraus)?;
    Ok(ChannelDiagnostics {
        cp_min_eigenvalue: min_eigenvalue(&choi)?.as_f64(),
        tp_residual: tp_residual(input, kraus).as_f64(),
    })
}

impl<T: Real> KrausChannel<T> {
    pub fn new(input: Register, output: Register, kraus: Vec<CMatrix<T>>) -> Result<Self> {
        check_shapes(&input, &output, &kraus)?;
        let r = tp_residual(&input, &kraus);
        if !(r <= T::channel_tol()) {
            return Err(Error::InvalidChannel(format!("trace-preservation residual {}", r)));
        }
        Ok(KrausChannel { input, output, kraus })
    }

    pub fn input(&self) -> &Register {
        &self.input
    }

    pub fn output(&self) -> &Register {
        &self.output
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    pub fn choi(&self) -> LabeledOperator<T> {
        choi_of(&self.input, &self.output, &self.kraus).expect("shapes validated")
    }

    pub fn diagnostics(&self) -> ChannelDiagnostics {
        diagnose(&self.input, &self.output, &self.kraus).expect("shapes validated")
    }

    /// Applies the channel to the `input` subsystems of `x`, found by name;
    /// all other subsystems pass through.
    pub fn apply_op(&self, x: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
        x.conjugate_local(&self.input, &self.output, &self.kraus)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        let out = self.apply_op(rho.op())?;
        Ok(DensityMatrix::from_op_unchecked(out.hermitian_part()))
    }

    pub fn identity(register: Register) -> Self {
        let d = register.dim();
        KrausChannel { input: register.clone(), output: register, kraus: vec![CMatrix::identity(d, d)] }
    }

    /// Isometric channel `rho -> V rho V†`.
    pub fn isometric(input: Register, output: Register, v: CMatrix<T>) -> Result<Self> {
        KrausChannel::new(input, output, vec![v])
    }

    /// `rho -> (1-p) rho + p I/d`, with Kraus operators built from the
    /// Weyl (clock and shift) basis.
    pub fn depolarizing(register: Register, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::of(4.0 / 3.0) + T::channel_tol()) {
            return Err(Error::InvalidChannel(format!("depolarizing parameter {} out of range", p)));
        }
        let d = register.dim();
        let dd = T::of((d * d) as f64);
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                let w = if a == 0 && b == 0 { T::one() - p + p / dd } else { p / dd };
                let c = cre(w.max(T::zero()).sqrt());
                let theta = T::two_pi() / T::of(d as f64);
                kraus.push(CMatrix::from_fn(d, d, |i, j| {
                    if i == (j + a) % d {
                        {
                            let ph = theta * T::of((b * j) as f64);
                            C::new(ph.cos(), ph.sin()) * c
                        }
                    } else {
                        C::new(T::zero(), T::zero())
                    }
                }));
            }
        }
        KrausChannel::new(register.clone(), register, kraus)
    }

    /// `rho -> (1-p) rho + p diag(rho)`.
    pub fn dephasing(register: Register, p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::InvalidChannel(format!("dephasing parameter {} out of range", p)));
        }
        let d = register.dim();
        let mut kraus = vec![CMatrix::identity(d, d) * cre((T::one() - p).sqrt())];
        for i in 0..d {
            let mut k = CMatrix::zeros(d, d);
            k[(i, i)] = cre(p.sqrt());
            kraus.push(k);
        }
        KrausChannel::new(register.clone(), register, kraus)
    }

    /// Classical channel `|x><x| -> sum_y w[y][x] |y><y|`, with
    /// off-diagonal input coherences destroyed.
    pub fn classical_stochastic(input: Register, output: Register, w: &[Vec<T>]) -> Result<Self> {
        let (di, d_o) = (input.dim(), output.dim());
        if w.len() != d_o || w.iter().any(|row| row.len() != di) {
            return Err(Error::RegisterMismatch(format!("transition matrix must be {}x{} (output x input)", d_o, di)));
        }
        let mut kraus = Vec::new();
        for (y, row) in w.iter().enumerate() {
            for (x, &p) in row.iter().enumerate() {
                if p < T::zero() {
                    return Err(Error::InvalidChannel(format!("negative transition probability {}", p)));
                }
                if p > T::zero() {
                    let mut k = CMatrix::zeros(d_o, di);
                    k[(y, x)] = cre(p.sqrt());
                    kraus.push(k);
                }
            }
        }
        KrausChannel::new(input, output, kraus)
    }

    /// Discards the input and prepares `state`.
    pub fn replacement(input: Register, state: &DensityMatrix<T>) -> Result<Self> {
        let eig = crate::linalg::eigh(state.matrix())?;
        let (di, d_o) = (input.dim(), state.dim());
        let mut kraus = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam <= T::support_tol() * eig.values[0] {
                continue;
            }
            let s = cre(lam.sqrt());
            for i in 0..di {
                kraus.push(CMatrix::from_fn(d_o, di, |o, j| {
                    if j == i {
                        eig.vectors[(o, k)] * s
                    } else {
                        C::new(T::zero(), T::zero())
                    }
                }));
            }
        }
        KrausChannel::new(input, state.register().clone(), kraus)
    }

    /// Partial trace keeping the named subsystems of `input`.
    pub fn trace_out<S: AsRef<str>>(input: Register, keep: &[S]) -> Result<Self> {
        let output = input.retain(keep)?;
        let traced_names: Vec<&str> = input.names().filter(|n| !output.contains(n)).collect();
        let traced = input.retain(&traced_names)?;
        let mut kraus = Vec::with_capacity(traced.dim());
        for t in 0..traced.dim() {
            let td = traced.digits(t);
            let mut k = CMatrix::zeros(output.dim(), input.dim());
            for o in 0..output.dim() {
                let od = output.digits(o);
                let digits: Vec<usize> = input
                    .names()
                    .map(|n| match output.position(n) {
                        Some(p) => od[p],
                        None => td[traced.position(n).unwrap()],
                    })
                    .collect();
                k[(o, input.flat_index(&digits))] = cre(T::one());
            }
            kraus.push(k);
        }
        KrausChannel::new(input, output, kraus)
    }

    /// Same map with input and output subsystems renamed.
    pub fn relabel(&self, input: Register, output: Register) -> Result<Self> {
        if input.dim() != self.input.dim() || output.dim() != self.output.dim() {
            return Err(Error::RegisterMismatch(format!(
                "cannot relabel {} -> {} as {} -> {}",
                self.input, self.output, input, output
            )));
        }
        KrausChannel::new(input, output, self.kraus.clone())
    }

    /// Parallel composition on disjoint registers.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let input = self.input.concat(&other.input)?;
        let output = self.output.concat(&other.output)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        KrausChannel::new(input, output, kraus)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if !self.output.same_subsystems(other.input()) || self.output.dims() != other.input.dims() {
            return Err(Error::RegisterMismatch(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.input, self.output, other.input, other.output
            )));
        }
        let mut kraus = Vec::new();
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        KrausChannel::new(self.input.clone(), other.output.clone(), kraus)
    }

    /// Adds zero Kraus operators so that exactly `count` are present.
    pub fn pad_to(&self, count: usize) -> Self {
        let mut kraus = self.kraus.clone();
        while kraus.len() < count {
            kraus.push(CMatrix::zeros(self.output.dim(), self.input.dim()));
        }
        KrausChannel { input: self.input.clone(), output: self.output.clone(), kraus }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::max_abs;

    fn q(name: &str) -> Register {
        Register::single(name, 2).unwrap()
    }

    #[test]
    fn completely_depolarizing_qubit() {
        let ch = KrausChannel::<f64>::depolarizing(q("A"), 1.0).unwrap();
        let rho = DensityMatrix::basis(q("A"), 0).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(max_abs(&(out.matrix() - CMatrix::identity(2, 2) * cre(0.5))) < 1e-14);
    }

    #[test]
    fn half_identity_has_residual_three_quarters() {
        let k = vec![CMatrix::<f64>::identity(2, 2) * cre(0.5)];
        let d = diagnose(&q("A"), &q("A"), &k).unwrap();
        assert!((d.tp_residual - 0.75).abs() < 1e-14);
        assert!(KrausChannel::new(q("A"), q("A"), k).is_err());
    }

    #[test]
    fn identity_choi_is_unnormalized_bell() {
        let c = KrausChannel::<f64>::identity(q("A")).choi();
        let mut want = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(i, j)] = cre(1.0);
        }
        assert!(max_abs(&(c.matrix() - want)) < 1e-14);
        assert_eq!(c.register().names().collect::<Vec<_>>(), vec!["A'", "A"]);
    }

    #[test]
    fn trace_out_matches_partial_trace() {
        let reg = Register::new([("S", 2), ("A", 3)]).unwrap();
        let mut rng = crate::rng::generator(5);
        let rho = crate::random::density::<f64, _>(reg.clone(), 6, &mut rng);
        let ch = KrausChannel::trace_out(reg, &["A"]).unwrap();
        let a = ch.apply(&rho).unwrap();
        let b = rho.partial_trace(&["A"]).unwrap();
        assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-14);
    }

    #[test]
    fn classical_channel_acts_on_diagonals() {
        let w = vec![vec![0.9, 0.2], vec![0.1, 0.8]];
        let ch = KrausChannel::<f64>::classical_stochastic(q("X"), q("Y"), &w).unwrap();
        let rho = DensityMatrix::diagonal(q("X"), &[0.25, 0.75]).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.matrix()[(0, 0)].re - (0.9 * 0.25 + 0.2 * 0.75)).abs() < 1e-14);
    }
}
