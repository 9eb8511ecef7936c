use nalgebra::{Complex, DMatrix, DVector};

use super::register::Register;
use super::spectral::eigh;
use crate::error::{Error, Result};
use crate::scalar::{cre, max_abs, CMatrix, CVector, Real};

/// Complex square matrix acting on a labeled register.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator<T: Real> {
    register: Register,
    matrix: CMatrix<T>,
}

impl<T: Real> LabeledOperator<T> {
    pub fn new(register: Register, matrix: CMatrix<T>) -> Result<Self> {
        let d = register.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::RegisterMismatch(format!(
                "matrix is {}x{} but register {} has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                register,
                d
            )));
        }
        Ok(LabeledOperator { register, matrix })
    }

    pub fn identity(register: Register) -> Self {
        let d = register.dim();
        LabeledOperator { register, matrix: CMatrix::identity(d, d) }
    }

    pub fn zeros(register: Register) -> Self {
        let d = register.dim();
        LabeledOperator { register, matrix: CMatrix::zeros(d, d) }
    }

    pub fn from_diagonal(register: Register, diag: &[T]) -> Result<Self> {
        if diag.len() != register.dim() {
            return Err(Error::RegisterMismatch(format!("{} diagonal entries for register {}", diag.len(), register)));
        }
        let m = CMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| cre(x))));
        Ok(LabeledOperator { register, matrix: m })
    }

    /// Rank-one operator `|v><v|`.
    pub fn ket_bra(register: Register, v: &CVector<T>) -> Result<Self> {
        LabeledOperator::new(register, v * v.adjoint())
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn trace_re(&self) -> T {
        self.matrix.trace().re
    }

    pub fn dagger(&self) -> Self {
        LabeledOperator { register: self.register.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, s: T) -> Self {
        LabeledOperator { register: self.register.clone(), matrix: &self.matrix * cre(s) }
    }

    pub fn map_matrix(&self, f: impl FnOnce(&CMatrix<T>) -> CMatrix<T>) -> Result<Self> {
        LabeledOperator::new(self.register.clone(), f(&self.matrix))
    }

    fn same_register(&self, other: &Self) -> Result<()> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!("{} vs {}", self.register, other.register)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_register(other)?;
        Ok(LabeledOperator { register: self.register.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_register(other)?;
        Ok(LabeledOperator { register: self.register.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_register(other)?;
        Ok(LabeledOperator { register: self.register.clone(), matrix: &self.matrix * &other.matrix })
    }

    /// `Tr[self · other]`.
    pub fn trace_product(&self, other: &Self) -> Result<Complex<T>> {
        self.same_register(other)?;
        let d = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..d {
            for k in 0..d {
                acc += self.matrix[(i, k)] * other.matrix[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Largest absolute entry of `self − self†`.
    pub fn hermitian_asymmetry(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.matrix)
    }

    /// `(x + x†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = cre(T::of(0.5));
        LabeledOperator { register: self.register.clone(), matrix: (&self.matrix + self.matrix.adjoint()) * half }
    }

    /// Kronecker product in register order.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let register = self.register.concat(&other.register)?;
        Ok(LabeledOperator { register, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Traces out every subsystem not named in `keep`.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let kept = self.register.retain(keep)?;
        let traced_names: Vec<&str> = self.register.names().filter(|n| !kept.contains(n)).collect();
        let traced = self.register.retain(&traced_names)?;
        let kept_pos: Vec<usize> = kept.names().map(|n| self.register.position(n).unwrap()).collect();
        let traced_pos: Vec<usize> = traced.names().map(|n| self.register.position(n).unwrap()).collect();
        let (dk, dt) = (kept.dim(), traced.dim());
        let mut groups = vec![vec![0usize; dk]; dt];
        for f in 0..self.dim() {
            let digits = self.register.digits(f);
            let k = kept_pos.iter().fold(0, |acc, &p| acc * self.register.subsystems()[p].dim + digits[p]);
            let t = traced_pos.iter().fold(0, |acc, &p| acc * self.register.subsystems()[p].dim + digits[p]);
            groups[t][k] = f;
        }
        let mut out = CMatrix::zeros(dk, dk);
        for g in &groups {
            for a in 0..dk {
                for b in 0..dk {
                    out[(a, b)] += self.matrix[(g[a], g[b])];
                }
            }
        }
        Ok(LabeledOperator { register: kept, matrix: out })
    }

    /// Same matrix with subsystem `from` renamed to `to`.
    pub fn renamed(&self, from: &str, to: &str) -> Result<Self> {
        let register = self.register.renamed(from, to)?;
        Ok(LabeledOperator { register, matrix: self.matrix.clone() })
    }

    /// Reorders the register to `order`, which must name every subsystem.
    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let (register, map) = permutation_map(&self.register, order)?;
        let d = self.dim();
        let matrix = CMatrix::from_fn(d, d, |a, b| self.matrix[(map[a], map[b])]);
        Ok(LabeledOperator { register, matrix })
    }

    /// Applies `sum_k M_k X M_k†` where each `M_k` maps the `input` subsystems
    /// to the `output` subsystems and all other subsystems pass through.
    pub(crate) fn conjugate_local(&self, input: &Register, output: &Register, maps: &[CMatrix<T>]) -> Result<Self> {
        let emb = Embedding::locate(&self.register, input)?;
        let x = self.permute(&emb.order)?;
        let out_register = emb.before.concat(output)?.concat(&emb.after)?;
        let (db, da) = (emb.before.dim(), emb.after.dim());
        let ib = CMatrix::<T>::identity(db, db);
        let ia = CMatrix::<T>::identity(da, da);
        let d_out = out_register.dim();
        let mut acc = CMatrix::zeros(d_out, d_out);
        for m in maps {
            let full = ib.kronecker(m).kronecker(&ia);
            acc += &full * &x.matrix * full.adjoint();
        }
        LabeledOperator::new(out_register, acc)
    }
}

/// Where a sub-register sits inside a larger one.
pub(crate) struct Embedding {
    /// Full subsystem order with the input block made contiguous.
    pub order: Vec<String>,
    pub before: Register,
    pub after: Register,
}

impl Embedding {
    /// The input block is placed where its first subsystem sits in `reg`.
    pub fn locate(reg: &Register, input: &Register) -> Result<Embedding> {
        for s in input.subsystems() {
            match reg.position(&s.name) {
                None => {
                    return Err(Error::RegisterMismatch(format!(
                        "subsystem `{}` of {} not present in {}",
                        s.name, input, reg
                    )))
                }
                Some(p) if reg.subsystems()[p].dim != s.dim => {
                    return Err(Error::RegisterMismatch(format!(
                        "subsystem `{}` has dimension {} in {} but {} in {}",
                        s.name,
                        reg.subsystems()[p].dim,
                        reg,
                        s.dim,
                        input
                    )))
                }
                _ => {}
            }
        }
        let first = input.names().filter_map(|n| reg.position(n)).min().unwrap_or(0);
        let mut before = Vec::new();
        let mut after = Vec::new();
        for (i, s) in reg.subsystems().iter().enumerate() {
            if input.contains(&s.name) {
                continue;
            }
            if i < first {
                before.push(s.clone());
            } else {
                after.push(s.clone());
            }
        }
        let order = before
            .iter()
            .map(|s| s.name.clone())
            .chain(input.names().map(str::to_string))
            .chain(after.iter().map(|s| s.name.clone()))
            .collect();
        Ok(Embedding { order, before: Register::from_subsystems(before)?, after: Register::from_subsystems(after)? })
    }
}

/// New register and the map `new flat index -> old flat index`.
fn permutation_map<S: AsRef<str>>(reg: &Register, order: &[S]) -> Result<(Register, Vec<usize>)> {
    let new_reg = reg.select(order)?;
    if new_reg.len() != reg.len() {
        return Err(Error::RegisterMismatch(format!("permutation of {} must name all {} subsystems", reg, reg.len())));
    }
    let pos: Vec<usize> = new_reg.names().map(|n| reg.position(n).unwrap()).collect();
    let d = reg.dim();
    let mut map = vec![0; d];
    let mut old_digits = vec![0; reg.len()];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let nd = new_reg.digits(new_idx);
        for (k, &p) in pos.iter().enumerate() {
            old_digits[p] = nd[k];
        }
        *slot = reg.flat_index(&old_digits);
    }
    Ok((new_reg, map))
}

/// Complex vector on a labeled register.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledVector<T: Real> {
    register: Register,
    vector: CVector<T>,
}

impl<T: Real> LabeledVector<T> {
    pub fn new(register: Register, vector: CVector<T>) -> Result<Self> {
        if vector.len() != register.dim() {
            return Err(Error::RegisterMismatch(format!(
                "vector of length {} for register {}",
                vector.len(),
                register
            )));
        }
        Ok(LabeledVector { register, vector })
    }

    pub fn basis(register: Register, index: usize) -> Result<Self> {
        let d = register.dim();
        if index >= d {
            return Err(Error::RegisterMismatch(format!("basis index {index} >= {d}")));
        }
        let mut v = CVector::zeros(d);
        v[index] = cre(T::one());
        Ok(LabeledVector { register, vector: v })
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn vector(&self) -> &CVector<T> {
        &self.vector
    }

    pub fn norm(&self) -> T {
        self.vector.norm()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!("{} vs {}", self.register, other.register)));
        }
        Ok(self.vector.dotc(&other.vector))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let register = self.register.concat(&other.register)?;
        Ok(LabeledVector { register, vector: self.vector.kronecker(&other.vector) })
    }

    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let (register, map) = permutation_map(&self.register, order)?;
        let vector = CVector::from_fn(map.len(), |a, _| self.vector[map[a]]);
        Ok(LabeledVector { register, vector })
    }

    /// `|v><v|`.
    pub fn projector(&self) -> LabeledOperator<T> {
        LabeledOperator { register: self.register.clone(), matrix: &self.vector * self.vector.adjoint() }
    }

    /// Applies `map` (output-dim x input-dim) to the `input` subsystems,
    /// replacing them with `output`; other subsystems pass through.
    pub fn apply_local(&self, input: &Register, output: &Register, map: &CMatrix<T>) -> Result<Self> {
        if map.nrows() != output.dim() || map.ncols() != input.dim() {
            return Err(Error::RegisterMismatch(format!(
                "map is {}x{} but {} -> {}",
                map.nrows(),
                map.ncols(),
                input,
                output
            )));
        }
        let emb = Embedding::locate(&self.register, input)?;
        let x = self.permute(&emb.order)?;
        let out_register = emb.before.concat(output)?.concat(&emb.after)?;
        let (db, di, da, d_o) = (emb.before.dim(), input.dim(), emb.after.dim(), output.dim());
        let mut out = CVector::zeros(db * d_o * da);
        for b in 0..db {
            for o in 0..d_o {
                for i in 0..di {
                    let m = map[(o, i)];
                    if m.re == T::zero() && m.im == T::zero() {
                        continue;
                    }
                    for a in 0..da {
                        out[(b * d_o + o) * da + a] += m * x.vector[(b * di + i) * da + a];
                    }
                }
            }
        }
        LabeledVector::new(out_register, out)
    }

    /// Coefficient matrix `X[s, r]` for the split `first ⊗ rest`, where
    /// `first` are the leading subsystems of the register.
    pub fn split_matrix(&self, first_len: usize) -> CMatrix<T> {
        let d1: usize = self.register.subsystems()[..first_len].iter().map(|s| s.dim).product();
        let d2 = self.register.dim() / d1;
        DMatrix::from_fn(d1, d2, |s, r| self.vector[s * d2 + r])
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real>(LabeledOperator<T>);

impl<T: Real> DensityMatrix<T> {
    /// Validates the density-matrix invariants at [`Real::state_tol`].
    pub fn new(op: LabeledOperator<T>) -> Result<Self> {
        let tol = T::state_tol();
        let asym = op.hermitian_asymmetry();
        if asym > tol {
            return Err(Error::InvalidState(format!("not Hermitian (asymmetry {:e})", asym.as_f64())));
        }
        let op = op.hermitian_part();
        let tr = op.trace_re();
        if (tr - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr)));
        }
        let min = eigh(op.matrix())?.values.last().copied().unwrap_or(T::zero());
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", min.as_f64())));
        }
        Ok(DensityMatrix(op))
    }

    /// Wraps an operator already known to be a state, after symmetrizing it.
    pub(crate) fn from_op_unchecked(op: LabeledOperator<T>) -> Self {
        DensityMatrix(op.hermitian_part())
    }

    /// Pure state `|v><v|`; `v` must be a unit vector.
    pub fn pure(state: &LabeledVector<T>) -> Result<Self> {
        let n = state.norm();
        if (n - T::one()).abs() > T::state_tol() {
            return Err(Error::InvalidState(format!("state vector has norm {}", n)));
        }
        Ok(DensityMatrix(state.projector()))
    }

    pub fn basis(register: Register, index: usize) -> Result<Self> {
        Ok(DensityMatrix(LabeledVector::basis(register, index)?.projector()))
    }

    pub fn maximally_mixed(register: Register) -> Self {
        let d = T::from_usize(register.dim()).unwrap();
        DensityMatrix(LabeledOperator::identity(register).scale(T::one() / d))
    }

    pub fn diagonal(register: Register, probs: &[T]) -> Result<Self> {
        DensityMatrix::new(LabeledOperator::from_diagonal(register, probs)?)
    }

    pub fn op(&self) -> &LabeledOperator<T> {
        &self.0
    }

    pub fn into_op(self) -> LabeledOperator<T> {
        self.0
    }

    pub fn register(&self) -> &Register {
        self.0.register()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.0.matrix()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        Ok(DensityMatrix::from_op_unchecked(self.0.partial_trace(keep)?))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(DensityMatrix(self.0.tensor(&other.0)?))
    }

    pub fn permute<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        Ok(DensityMatrix(self.0.permute(order)?))
    }

    pub fn renamed(&self, from: &str, to: &str) -> Result<Self> {
        Ok(DensityMatrix(self.0.renamed(from, to)?))
    }

    /// Convex combination `sum_i w_i rho_i`; weights must sum to one.
    pub fn mixture(weights: &[T], states: &[&DensityMatrix<T>]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            if s.register() != first.register() {
                return Err(Error::RegisterMismatch(format!("{} vs {}", s.register(), first.register())));
            }
            acc += s.matrix() * cre(*w);
        }
        Ok(DensityMatrix::from_op_unchecked(LabeledOperator::new(first.register().clone(), acc)?))
    }
}

impl<T: Real> AsRef<LabeledOperator<T>> for DensityMatrix<T> {
    fn as_ref(&self) -> &LabeledOperator<T> {
        &self.0
    }
}

impl<T: Real> AsRef<LabeledOperator<T>> for LabeledOperator<T> {
    fn as_ref(&self) -> &LabeledOperator<T> {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    fn reg(items: &[(&str, usize)]) -> Register {
        Register::new(items.iter().map(|&(n, d)| (n, d))).unwrap()
    }

    #[test]
    fn tensor_of_identities_and_projectors() {
        let i2 = LabeledOperator::<f64>::identity(reg(&[("A", 2)]));
        let j2 = LabeledOperator::<f64>::identity(reg(&[("B", 2)]));
        let t = i2.tensor(&j2).unwrap();
        assert_eq!(t.matrix(), &CMatrix::<f64>::identity(4, 4));

        let p0 = LabeledOperator::<f64>::from_diagonal(reg(&[("A", 2)]), &[1.0, 0.0]).unwrap();
        let p1 = LabeledOperator::<f64>::from_diagonal(reg(&[("B", 2)]), &[0.0, 1.0]).unwrap();
        let t = p0.tensor(&p1).unwrap();
        let want = LabeledOperator::<f64>::from_diagonal(reg(&[("A", 2), ("B", 2)]), &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(t, want);
        assert_eq!(i2.tensor(&i2), Err(Error::DuplicateSubsystem("A".into())));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = reg(&[("A", 2), ("B", 2)]);
        let h = (0.5f64).sqrt();
        let v = CVector::from_vec(vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)]);
        let bell = LabeledVector::new(r, v).unwrap().projector();
        let m = bell.partial_trace(&["A"]).unwrap();
        let want = CMatrix::<f64>::identity(2, 2) * c64(0.5, 0.0);
        assert!(max_abs(&(m.matrix() - want)) < 1e-15);
        assert!(matches!(bell.partial_trace(&["Q"]), Err(Error::UnknownSubsystem(_))));
    }

    #[test]
    fn permute_then_partial_trace_commute() {
        let r = reg(&[("A", 2), ("B", 3)]);
        let m = CMatrix::<f64>::from_fn(6, 6, |i, j| c64((i * 6 + j) as f64, (i as f64) - (j as f64)));
        let x = LabeledOperator::new(r, m).unwrap();
        let y = x.permute(&["B", "A"]).unwrap();
        assert_eq!(y.register().names().collect::<Vec<_>>(), vec!["B", "A"]);
        assert_eq!(x.partial_trace(&["A"]).unwrap(), y.partial_trace(&["A"]).unwrap());
        assert_eq!(x.partial_trace(&["B"]).unwrap(), y.partial_trace(&["B"]).unwrap());
        assert_eq!(y.permute(&["A", "B"]).unwrap(), x);
    }

    #[test]
    fn density_validation() {
        let r = reg(&[("A", 2)]);
        assert!(DensityMatrix::<f64>::diagonal(r.clone(), &[0.6, 0.4]).is_ok());
        assert!(matches!(DensityMatrix::<f64>::diagonal(r.clone(), &[0.6, 0.5]), Err(Error::InvalidState(_))));
        assert!(matches!(DensityMatrix::<f64>::diagonal(r, &[1.2, -0.2]), Err(Error::InvalidState(_))));
    }

    #[test]
    fn local_vector_map_matches_operator_map() {
        let r = reg(&[("A", 2), ("B", 2), ("C", 2)]);
        let v = CVector::from_fn(8, |i, _| c64(i as f64 + 1.0, 0.5 * i as f64));
        let psi = LabeledVector::new(r, v).unwrap();
        let input = reg(&[("B", 2)]);
        let output = reg(&[("D", 3)]);
        let m = CMatrix::<f64>::from_fn(3, 2, |i, j| c64(i as f64 - j as f64, (i + j) as f64));
        let out = psi.apply_local(&input, &output, &m).unwrap();
        let rho = psi.projector().conjugate_local(&input, &output, &[m]).unwrap();
        assert_eq!(out.register().names().collect::<Vec<_>>(), vec!["A", "D", "C"]);
        assert!(max_abs(&(out.projector().matrix() - rho.matrix())) < 1e-10);
    }
}
