//! Entropies, divergences and distances. All logarithms are base 2.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{eigh, operator_norm, psd_power, support_projector, DensityMatrix, LabeledOperator};
use crate::scalar::Real;

/// Value of a divergence that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Divergence<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Divergence::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Divergence::Finite(v) => v.as_f64(),
            Divergence::Infinite => f64::INFINITY,
        }
    }
}

impl<T: Real> fmt::Display for Divergence<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{}", v),
            Divergence::Infinite => f.write_str("inf"),
        }
    }
}

fn log2<T: Real>(x: T) -> T {
    x.ln() / T::ln_2()
}

fn same_register<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<()> {
    if rho.register() != sigma.register() {
        return Err(Error::RegisterMismatch(format!("{} vs {}", rho.register(), sigma.register())));
    }
    Ok(())
}

/// Eigenvalues above the support cutoff.
fn support_spectrum<T: Real>(m: &LabeledOperator<T>) -> Result<Vec<T>> {
    let e = eigh(m.hermitian_part().matrix())?;
    let top = e.values.first().copied().unwrap_or(T::zero()).max(T::zero());
    let cutoff = T::support_tol() * top;
    Ok(e.values.into_iter().filter(|&l| l > cutoff).collect())
}

/// `||(I - P_sigma) P_rho||`.
fn support_leak<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    let pr = support_projector(rho.op())?;
    let ps = support_projector(sigma.op())?;
    let d = rho.dim();
    let comp = crate::scalar::CMatrix::<T>::identity(d, d) - ps.matrix();
    Ok(operator_norm(&(comp * pr.matrix())))
}

const SUPPORT_SLACK: f64 = 1e-8;

/// `-Tr rho log rho`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let ev = support_spectrum(rho.op())?;
    let h = ev.iter().fold(T::zero(), |acc, &l| acc - l * log2(l));
    Ok(h.max(T::zero()))
}

/// Umegaki relative entropy; infinite unless `supp rho ⊆ supp sigma`.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<Divergence<T>> {
    same_register(rho, sigma)?;
    if support_leak(rho, sigma)? > T::of(SUPPORT_SLACK) {
        return Ok(Divergence::Infinite);
    }
    let neg_h = -von_neumann_entropy(rho)?;
    let log_sigma = crate::linalg::matrix_function(sigma.op(), log2, true)?;
    let cross = rho.op().trace_product(&log_sigma)?.re;
    Ok(Divergence::Finite((neg_h - cross).max(T::zero())))
}

fn names_of<S: AsRef<str>>(xs: &[S]) -> Vec<String> {
    xs.iter().map(|s| s.as_ref().to_string()).collect()
}

fn marginal_entropy<T: Real>(rho: &DensityMatrix<T>, keep: &[String]) -> Result<T> {
    if keep.is_empty() {
        return Ok(T::zero());
    }
    von_neumann_entropy(&rho.partial_trace(keep)?)
}

/// `I(A;B) = H(A) + H(B) - H(AB)` for a cut of the whole register into two
/// nonempty groups.
pub fn mutual_information<T: Real, S: AsRef<str>>(rho: &DensityMatrix<T>, a: &[S], b: &[S]) -> Result<T> {
    let (a, b) = (names_of(a), names_of(b));
    let reg = rho.register();
    if a.is_empty() || b.is_empty() {
        return Err(Error::BadPartition("both sides of the cut must be nonempty".into()));
    }
    for n in a.iter().chain(&b) {
        if !reg.contains(n) {
            return Err(Error::BadPartition(format!("`{}` is not in {}", n, reg)));
        }
    }
    if a.iter().any(|n| b.contains(n)) || a.len() + b.len() != reg.len() {
        return Err(Error::BadPartition(format!("{:?} | {:?} does not partition {}", a, b, reg)));
    }
    let ab = von_neumann_entropy(rho)?;
    Ok(marginal_entropy(rho, &a)? + marginal_entropy(rho, &b)? - ab)
}

/// `I(A;B|C) = H(AC) + H(BC) - H(C) - H(ABC)`.
pub fn conditional_mutual_information<T: Real, S: AsRef<str>>(
    rho: &DensityMatrix<T>,
    a: &[S],
    b: &[S],
    c: &[S],
) -> Result<T> {
    let (a, b, c) = (names_of(a), names_of(b), names_of(c));
    let reg = rho.register();
    let all: Vec<&String> = a.iter().chain(&b).chain(&c).collect();
    for (i, n) in all.iter().enumerate() {
        if !reg.contains(n) {
            return Err(Error::BadPartition(format!("`{}` is not in {}", n, reg)));
        }
        if all[..i].contains(n) {
            return Err(Error::BadPartition(format!("`{}` appears in more than one group", n)));
        }
    }
    let join = |x: &[String], y: &[String]| -> Vec<String> { x.iter().chain(y).cloned().collect() };
    let abc: Vec<String> = all.into_iter().cloned().collect();
    Ok(marginal_entropy(rho, &join(&a, &c))? + marginal_entropy(rho, &join(&b, &c))?
        - marginal_entropy(rho, &c)?
        - marginal_entropy(rho, &abc)?)
}

/// Sandwiched Rényi divergence
/// `1/(a-1) log Tr[(s^{(1-a)/2a} r s^{(1-a)/2a})^a]`, with powers of `sigma`
/// taken on its support.
pub fn sandwiched_renyi<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>, alpha: T) -> Result<Divergence<T>> {
    if !(alpha > T::zero()) || alpha == T::one() || !alpha.is_finite() {
        return Err(Error::BadOrder(alpha.as_f64()));
    }
    same_register(rho, sigma)?;
    if alpha > T::one() && support_leak(rho, sigma)? > T::of(SUPPORT_SLACK) {
        return Ok(Divergence::Infinite);
    }
    let p = (T::one() - alpha) / (T::of(2.0) * alpha);
    let s = psd_power(sigma.op(), p)?;
    let inner = s.mul(rho.op())?.mul(&s)?;
    let ev = support_spectrum(&inner)?;
    let q = ev.iter().fold(T::zero(), |acc, &l| acc + l.powf(alpha));
    if !(q > T::zero()) {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(log2(q) / (alpha - T::one())))
}

/// `F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1`, clamped to `[0, 1]`.
pub fn fidelity<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    same_register(rho, sigma)?;
    let s = psd_power(sigma.op(), T::of(0.5))?;
    let inner = s.mul(rho.op())?.mul(&s)?;
    let ev = support_spectrum(&inner)?;
    let f = ev.iter().fold(T::zero(), |acc, &l| acc + l.sqrt());
    Ok(f.min(T::one()).max(T::zero()))
}

/// `sqrt(1 - F^2)`.
pub fn purified_distance<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    let f = fidelity(rho, sigma)?;
    Ok((T::one() - f * f).max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Register;

    fn q() -> Register {
        Register::single("A", 2).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let h = von_neumann_entropy(&DensityMatrix::<f64>::diagonal(q(), &[0.75, 0.25]).unwrap()).unwrap();
        let want = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h - want).abs() < 1e-14);
        let h = von_neumann_entropy(&DensityMatrix::<f64>::maximally_mixed(Register::single("A", 4).unwrap())).unwrap();
        assert!((h - 2.0).abs() < 1e-14);
    }

    #[test]
    fn disjoint_supports_are_infinite() {
        let a = DensityMatrix::<f64>::basis(q(), 0).unwrap();
        let b = DensityMatrix::<f64>::basis(q(), 1).unwrap();
        assert_eq!(relative_entropy(&a, &b).unwrap(), Divergence::Infinite);
        assert_eq!(sandwiched_renyi(&a, &b, 0.5).unwrap(), Divergence::Infinite);
        assert_eq!(sandwiched_renyi(&a, &b, 2.0).unwrap(), Divergence::Infinite);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn bad_orders() {
        let a = DensityMatrix::<f64>::maximally_mixed(q());
        for alpha in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(sandwiched_renyi(&a, &a, alpha), Err(Error::BadOrder(_))));
        }
    }
}
