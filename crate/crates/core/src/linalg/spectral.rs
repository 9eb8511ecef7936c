use nalgebra::linalg::SymmetricEigen;

use super::operator::LabeledOperator;
use crate::error::{Error, Result};
use crate::scalar::{cre, max_abs, CMatrix, Real};

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
pub(crate) struct Eigh<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigh<T> {
    pub fn reassemble(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = cre(f(v));
            for i in 0..d {
                scaled[(i, j)] *= fv;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

fn raw_eigh<T: Real>(m: &CMatrix<T>) -> Option<(Vec<T>, CMatrix<T>)> {
    let n = m.nrows();
    let se = SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 1000 * n.max(10))?;
    if se.eigenvalues.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut scaled = se.eigenvectors.clone();
    for j in 0..n {
        let l = cre(se.eigenvalues[j]);
        for i in 0..n {
            scaled[(i, j)] *= l;
        }
    }
    let resid = max_abs(&(m * &se.eigenvectors - scaled));
    let scale = T::one().max(max_abs(m)) * T::of(n as f64);
    if !(resid <= T::of(1e3) * T::default_epsilon() * scale) {
        return None;
    }
    Some((se.eigenvalues.iter().copied().collect(), se.eigenvectors))
}

fn dft<T: Real>(n: usize) -> CMatrix<T> {
    let norm = T::one() / T::of(n as f64).sqrt();
    CMatrix::from_fn(n, n, |i, j| {
        let ph = T::of(2.0 * std::f64::consts::PI * ((i * j) % n) as f64 / n as f64);
        crate::scalar::C::new(ph.cos() * norm, ph.sin() * norm)
    })
}

/// Diagonalizes a matrix the caller has already made Hermitian.
///
/// The implicit QR iteration occasionally breaks down on exactly sparse
/// inputs (non-finite eigenvalues on large rank-one projectors); those are
/// retried after conjugation by the unitary DFT matrix.
pub(crate) fn eigh<T: Real>(m: &CMatrix<T>) -> Result<Eigh<T>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigh { values: Vec::new(), vectors: CMatrix::zeros(0, 0) });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let (vals, vecs) = match raw_eigh(m) {
        Some(r) => r,
        None => {
            let f = dft::<T>(n);
            let (vals, vecs) = raw_eigh(&(&f * m * f.adjoint()))
                .ok_or_else(|| Error::Numerical("eigendecomposition did not converge".into()))?;
            (vals, f.adjoint() * vecs)
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| vals[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

/// Symmetrizes `h` when its asymmetry is within [`Real::hermitian_tol`]
/// (relative to `max(1, max|h_ij|)`), otherwise fails with `NotHermitian`.
pub fn checked_hermitian<T: Real>(h: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
    let asym = h.hermitian_asymmetry();
    let scale = T::one().max(h.max_abs());
    if asym > T::hermitian_tol() * scale {
        return Err(Error::NotHermitian(asym.as_f64()));
    }
    Ok(h.hermitian_part())
}

fn decompose_raw<T: Real>(h: &LabeledOperator<T>) -> Result<Eigh<T>> {
    let h = checked_hermitian(h)?;
    eigh(h.matrix())
}

/// One eigenvalue cluster.
#[derive(Clone, Debug)]
pub struct Cluster<T: Real> {
    pub eigenvalue: T,
    pub projector: LabeledOperator<T>,
    pub multiplicity: usize,
}

/// Eigenvalue clusters of a Hermitian operator, sorted by descending
/// eigenvalue. `cluster_tolerance` is the absolute merge threshold used.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub clusters: Vec<Cluster<T>>,
    pub cluster_tolerance: T,
    vectors: CMatrix<T>,
    labels: Vec<usize>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// `sum_i lambda_i Pi_i`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let d = self.vectors.nrows();
        let mut acc = CMatrix::zeros(d, d);
        for c in &self.clusters {
            acc += c.projector.matrix() * cre(c.eigenvalue);
        }
        acc
    }

    /// `sum_i Pi_i b Pi_i`.
    pub fn pinch(&self, b: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
        let reg = self.clusters[0].projector.register();
        if b.register() != reg {
            return Err(Error::RegisterMismatch(format!("{} vs {}", b.register(), reg)));
        }
        let u = &self.vectors;
        let mut rotated = u.adjoint() * b.matrix() * u;
        let d = rotated.nrows();
        for i in 0..d {
            for j in 0..d {
                if self.labels[i] != self.labels[j] {
                    rotated[(i, j)] = cre(T::zero());
                }
            }
        }
        LabeledOperator::new(reg.clone(), u * rotated * u.adjoint())
    }

    /// Sum of the projectors whose cluster eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(T) -> bool) -> LabeledOperator<T> {
        let reg = self.clusters[0].projector.register().clone();
        let d = reg.dim();
        let mut acc = CMatrix::zeros(d, d);
        for c in self.clusters.iter().filter(|c| keep(c.eigenvalue)) {
            acc += c.projector.matrix();
        }
        LabeledOperator::new(reg, acc).expect("dimension preserved")
    }
}

/// Spectral decomposition with eigenvalues merged by a greedy descending
/// sweep: neighbours closer than `tol * max(1, spectral radius)` share a
/// cluster. The cluster eigenvalue is the mean of its members.
pub fn spectral_decompose<T: Real>(h: &LabeledOperator<T>, tol: T) -> Result<SpectralDecomposition<T>> {
    let e = decompose_raw(h)?;
    let radius = e.values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let abs_tol = tol * T::one().max(radius);
    let d = e.values.len();
    let mut labels = Vec::with_capacity(d);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        if i == 0 || e.values[i - 1] - e.values[i] > abs_tol {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
        labels.push(groups.len() - 1);
    }
    let clusters = groups
        .iter()
        .map(|g| {
            let mut p = CMatrix::zeros(d, d);
            let mut sum = T::zero();
            for &i in g {
                let col = e.vectors.column(i);
                p += col * col.adjoint();
                sum += e.values[i];
            }
            Cluster {
                eigenvalue: sum / T::from_usize(g.len()).unwrap(),
                projector: LabeledOperator::new(h.register().clone(), p).expect("square"),
                multiplicity: g.len(),
            }
        })
        .collect();
    Ok(SpectralDecomposition { clusters, cluster_tolerance: abs_tol, vectors: e.vectors, labels })
}

/// Decomposition at the default tolerance [`Real::cluster_tol`].
pub fn spectral_decompose_default<T: Real>(h: &LabeledOperator<T>) -> Result<SpectralDecomposition<T>> {
    spectral_decompose(h, T::cluster_tol())
}

/// Number of clusters with nonnegative eigenvalue; clusters below
/// `-tol * max(1, spectral radius)` are excluded.
pub fn distinct_eigenvalue_count<T: Real>(h: &LabeledOperator<T>, tol: T) -> Result<usize> {
    let sd = spectral_decompose(h, tol)?;
    let floor = -sd.cluster_tolerance;
    Ok(sd.clusters.iter().filter(|c| c.eigenvalue >= floor).count())
}

/// Applies `f` to the spectrum of a Hermitian operator.
///
/// With `support_only`, eigenvalues at or below `support_tol * lambda_max`
/// map to zero, which turns negative powers into pseudo-powers on the
/// support. Any retained eigenvalue where `f` is not finite is an error.
pub fn matrix_function<T: Real>(
    h: &LabeledOperator<T>,
    f: impl Fn(T) -> T,
    support_only: bool,
) -> Result<LabeledOperator<T>> {
    let e = decompose_raw(h)?;
    let lmax = e.values.first().copied().unwrap_or(T::zero());
    let cutoff = T::support_tol() * lmax.max(T::zero());
    for &v in &e.values {
        if support_only && v <= cutoff {
            continue;
        }
        if !f(v).is_finite() {
            return Err(Error::SingularFunction(v.as_f64()));
        }
    }
    let m = e.reassemble(|v| if support_only && v <= cutoff { T::zero() } else { f(v) });
    LabeledOperator::new(h.register().clone(), m)
}

/// `h^p` on the support of a positive semidefinite `h`.
pub fn psd_power<T: Real>(h: &LabeledOperator<T>, p: T) -> Result<LabeledOperator<T>> {
    matrix_function(h, |x| x.powf(p), true)
}

/// Projector onto the eigenvectors of `h` above the support cutoff.
pub fn support_projector<T: Real>(h: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
    matrix_function(h, |_| T::one(), true)
}

/// Eigenvalues in descending order.
pub fn eigenvalues<T: Real>(h: &LabeledOperator<T>) -> Result<Vec<T>> {
    Ok(decompose_raw(h)?.values)
}

pub fn min_eigenvalue<T: Real>(h: &LabeledOperator<T>) -> Result<T> {
    Ok(eigenvalues(h)?.last().copied().unwrap_or(T::zero()))
}

/// Largest singular value of an arbitrary operator.
pub fn operator_norm<T: Real>(x: &CMatrix<T>) -> T {
    if x.is_empty() {
        return T::zero();
    }
    x.clone().singular_values().iter().fold(T::zero(), |acc, &s| acc.max(s))
}

/// Pinching of `b` with respect to the eigenspaces of `a`.
pub fn pinch<T: Real>(a: &LabeledOperator<T>, b: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
    if a.register() != b.register() {
        return Err(Error::RegisterMismatch(format!("{} vs {}", a.register(), b.register())));
    }
    spectral_decompose_default(a)?.pinch(b)
}

/// The projector `{a >= b}`: the sum of eigenprojectors of `a - b` whose
/// cluster eigenvalue is nonnegative. Eigenvalues within the cluster
/// tolerance of zero count as nonnegative.
pub fn order_projector<T: Real>(a: &LabeledOperator<T>, b: &LabeledOperator<T>) -> Result<LabeledOperator<T>> {
    let diff = a.sub(b)?;
    let sd = spectral_decompose_default(&diff)?;
    let floor = -sd.cluster_tolerance;
    Ok(sd.projector_where(|l| l >= floor))
}

/// Largest absolute entry of the commutator `[a, b]`.
pub fn commutator_norm<T: Real>(a: &LabeledOperator<T>, b: &LabeledOperator<T>) -> Result<T> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Ok(max_abs(&(ab.matrix() - ba.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Register;
    use crate::scalar::c64;

    fn reg(d: usize) -> Register {
        Register::single("X", d).unwrap()
    }

    #[test]
    fn rank_one_projector_on_256_dims_has_finite_spectrum() {
        let d = 16;
        let n = d * d;
        let m = CMatrix::<f64>::from_fn(n, n, |i, j| {
            if i % (d + 1) == 0 && j % (d + 1) == 0 {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let ev = eigenvalues(&LabeledOperator::new(reg(n), m).unwrap()).unwrap();
        assert!((ev[0] - 16.0).abs() < 1e-9);
        assert!(ev.iter().skip(1).all(|v| v.abs() < 1e-9));
    }

    fn diag(v: &[f64]) -> LabeledOperator<f64> {
        LabeledOperator::from_diagonal(reg(v.len()), v).unwrap()
    }

    #[test]
    fn exact_degeneracy_gives_two_clusters() {
        let sd = spectral_decompose_default(&diag(&[0.5, 0.5, 0.25, 0.25])).unwrap();
        assert_eq!(sd.len(), 2);
        assert_eq!(sd.clusters.iter().map(|c| c.multiplicity).collect::<Vec<_>>(), vec![2, 2]);
        assert!((sd.clusters[0].eigenvalue - 0.5).abs() < 1e-15);
        let id = spectral_decompose_default(&LabeledOperator::<f64>::identity(reg(4))).unwrap();
        assert_eq!(id.len(), 1);
        assert!(max_abs(&(id.clusters[0].projector.matrix() - CMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn distinct_counts() {
        assert_eq!(distinct_eigenvalue_count(&diag(&[0.5, 0.5, 0.25, 0.25]), 1e-8).unwrap(), 2);
        assert_eq!(distinct_eigenvalue_count(&LabeledOperator::<f64>::identity(reg(3)), 1e-8).unwrap(), 1);
        assert_eq!(distinct_eigenvalue_count(&diag(&[1.0, -1.0, 0.0]), 1e-8).unwrap(), 2);
    }

    #[test]
    fn pseudo_functions() {
        let r = matrix_function(&diag(&[4.0, 1.0]), |x: f64| x.sqrt(), false).unwrap();
        assert!(max_abs(&(r.matrix() - diag(&[2.0, 1.0]).matrix())) < 1e-14);
        let r = matrix_function(&diag(&[1.0, 0.0]), |x: f64| 1.0 / x, true).unwrap();
        assert!(max_abs(&(r.matrix() - diag(&[1.0, 0.0]).matrix())) < 1e-14);
        assert_eq!(matrix_function(&diag(&[1.0, 0.0]), |x: f64| 1.0 / x, false), Err(Error::SingularFunction(0.0)));
    }

    #[test]
    fn pinch_and_order_projector_examples() {
        let a = diag(&[2.0, 1.0]);
        let b = LabeledOperator::new(reg(2), CMatrix::from_element(2, 2, c64(1.0, 0.0))).unwrap();
        let p = pinch(&a, &b).unwrap();
        assert!(max_abs(&(p.matrix() - CMatrix::identity(2, 2))) < 1e-14);
        let id = LabeledOperator::<f64>::identity(reg(2));
        assert!(max_abs(&(pinch(&id, &b).unwrap().matrix() - b.matrix())) < 1e-14);

        let q = order_projector(&diag(&[2.0, 0.0]), &diag(&[1.0, 1.0])).unwrap();
        assert!(max_abs(&(q.matrix() - diag(&[1.0, 0.0]).matrix())) < 1e-14);
        let q = order_projector(&b, &b).unwrap();
        assert!(max_abs(&(q.matrix() - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::<f64>::from_fn(2, 2, |i, j| c64(if i < j { 1.0 } else { 0.0 }, 0.0));
        let x = LabeledOperator::new(reg(2), m).unwrap();
        assert!(matches!(spectral_decompose_default(&x), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn single_precision_decomposition() {
        let x = LabeledOperator::<f32>::from_diagonal(reg(3), &[0.5, 0.5, 0.0]).unwrap();
        let sd = spectral_decompose_default(&x).unwrap();
        assert_eq!(sd.len(), 2);
        let s = psd_power(&x, 0.5f32).unwrap();
        assert!((s.matrix()[(0, 0)].re - 0.5f32.sqrt()).abs() < 1e-6);
    }
}
