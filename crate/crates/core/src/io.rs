//! JSON file formats. Complex matrices are arrays of rows, each row an array
//! of `[re, im]` pairs; registers are ordered `{name, dim}` lists.

use serde::{Deserialize, Serialize, Serializer};

use crate::channels::{diagnose, ChannelDiagnostics, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, DensityMatrix, LabeledOperator, Register, Subsystem};
use crate::names::{A, B, G, S, S0};
use crate::rate::{ActionModel, Strategy};
use crate::scalar::{c64, CMatrix, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemSpec {
    pub name: String,
    pub dim: usize,
}

pub type RegisterSpec = Vec<SubsystemSpec>;
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub register: RegisterSpec,
    pub matrix: MatrixSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub input: RegisterSpec,
    pub output: RegisterSpec,
    pub kraus: Vec<MatrixSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub metadata: Metadata,
    pub registers: RegisterSpec,
    pub action_channel: ChannelFile,
    pub comm_channel: ChannelFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    /// Rows indexed by `v`, columns by `u`.
    pub p_vu: Vec<Vec<f64>>,
    pub action_states: Vec<StateFile>,
    pub encoders: Vec<ChannelFile>,
}

pub fn register_from_spec(spec: &RegisterSpec) -> Result<Register> {
    Register::from_subsystems(spec.iter().map(|s| Subsystem { name: s.name.clone(), dim: s.dim }).collect())
}

pub fn register_to_spec(r: &Register) -> RegisterSpec {
    r.subsystems().iter().map(|s| SubsystemSpec { name: s.name.clone(), dim: s.dim }).collect()
}

pub fn matrix_from_spec<T: Real>(spec: &MatrixSpec) -> Result<CMatrix<T>> {
    let rows = spec.len();
    let cols = spec.first().map(Vec::len).unwrap_or(0);
    if spec.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("matrix rows have different lengths".into()));
    }
    if spec.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Format("matrix entry is not finite".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| c64(spec[i][j][0], spec[i][j][1])))
}

pub fn matrix_to_spec<T: Real>(m: &CMatrix<T>) -> MatrixSpec {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()]).collect()).collect()
}

impl StateFile {
    pub fn operator<T: Real>(&self) -> Result<LabeledOperator<T>> {
        LabeledOperator::new(register_from_spec(&self.register)?, matrix_from_spec(&self.matrix)?)
    }

    pub fn to_state<T: Real>(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.operator()?)
    }

    pub fn from_state<T: Real>(rho: &DensityMatrix<T>) -> Self {
        StateFile { register: register_to_spec(rho.register()), matrix: matrix_to_spec(rho.matrix()) }
    }

    /// Hermiticity, trace and minimum-eigenvalue residuals.
    pub fn diagnose(&self) -> Result<StateDiagnostics> {
        let op = self.operator::<f64>()?;
        let min_eig = eigenvalues(&op.hermitian_part())?.last().copied().unwrap_or(0.0);
        Ok(StateDiagnostics {
            hermitian_residual: op.hermitian_asymmetry(),
            trace_residual: (op.trace().re - 1.0).abs() + op.trace().im.abs(),
            min_eigenvalue: min_eig,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub hermitian_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn violation(&self) -> Option<String> {
        let tol = f64::state_tol();
        if self.hermitian_residual > tol {
            Some(format!("hermiticity residual {}", self.hermitian_residual))
        } else if self.trace_residual > tol {
            Some(format!("trace residual {}", self.trace_residual))
        } else if self.min_eigenvalue < -tol {
            Some(format!("negative eigenvalue {}", self.min_eigenvalue))
        } else {
            None
        }
    }
}

impl ChannelFile {
    fn parts<T: Real>(&self) -> Result<(Register, Register, Vec<CMatrix<T>>)> {
        let kraus = self.kraus.iter().map(matrix_from_spec).collect::<Result<Vec<_>>>()?;
        Ok((register_from_spec(&self.input)?, register_from_spec(&self.output)?, kraus))
    }

    pub fn to_channel<T: Real>(&self) -> Result<KrausChannel<T>> {
        let (i, o, k) = self.parts()?;
        KrausChannel::new(i, o, k)
    }

    pub fn from_channel<T: Real>(ch: &KrausChannel<T>) -> Self {
        ChannelFile {
            input: register_to_spec(ch.input()),
            output: register_to_spec(ch.output()),
            kraus: ch.kraus().iter().map(matrix_to_spec).collect(),
        }
    }

    pub fn diagnose(&self) -> Result<ChannelDiagnostics> {
        let (i, o, k) = self.parts::<f64>()?;
        diagnose(&i, &o, &k)
    }
}

impl ModelFile {
    /// Checks that the declared registers are exactly `G S S0 A B` and that
    /// both channels use them consistently.
    pub fn check_registers(&self) -> Result<()> {
        let declared = register_from_spec(&self.registers)?;
        for n in [G, S, S0, A, B] {
            if !declared.contains(n) {
                return Err(Error::RegisterMismatch(format!("register `{}` is not declared", n)));
            }
        }
        if declared.len() != 5 {
            return Err(Error::RegisterMismatch(format!("unexpected registers in {}", declared)));
        }
        for (what, ch) in [("action_channel", &self.action_channel), ("comm_channel", &self.comm_channel)] {
            for spec in [&ch.input, &ch.output] {
                for s in spec {
                    match declared.dim_of(&s.name) {
                        Ok(d) if d == s.dim => {}
                        Ok(d) => {
                            return Err(Error::RegisterMismatch(format!(
                                "{}: `{}` has dimension {} but is declared with {}",
                                what, s.name, s.dim, d
                            )))
                        }
                        Err(_) => {
                            return Err(Error::RegisterMismatch(format!(
                                "{}: `{}` is not a declared register",
                                what, s.name
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_model<T: Real>(&self) -> Result<ActionModel<T>> {
        self.check_registers()?;
        ActionModel::new(self.action_channel.to_channel()?, self.comm_channel.to_channel()?)
    }

    pub fn from_model<T: Real>(model: &ActionModel<T>, metadata: Metadata) -> Self {
        let registers =
            [G, S, S0, A, B].iter().map(|n| SubsystemSpec { name: n.to_string(), dim: model.dim(n) }).collect();
        ModelFile {
            metadata,
            registers,
            action_channel: ChannelFile::from_channel(model.action()),
            comm_channel: ChannelFile::from_channel(model.comm()),
        }
    }
}

impl StrategyFile {
    pub fn to_strategy<T: Real>(&self) -> Result<Strategy<T>> {
        let p = self.p_vu.iter().map(|r| r.iter().map(|&x| T::of(x)).collect()).collect();
        let states = self.action_states.iter().map(StateFile::to_state).collect::<Result<Vec<_>>>()?;
        let encoders = self.encoders.iter().map(ChannelFile::to_channel).collect::<Result<Vec<_>>>()?;
        Strategy::new(p, states, encoders)
    }

    pub fn from_strategy<T: Real>(s: &Strategy<T>) -> Self {
        StrategyFile {
            p_vu: s.p_vu().iter().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect(),
            action_states: s.action_states().iter().map(StateFile::from_state).collect(),
            encoders: s.encoders().iter().map(ChannelFile::from_channel).collect(),
        }
    }
}

/// Serializes non-finite values as the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn serialize_extended_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Rounds to 15 significant digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.14e}", x).parse().unwrap_or(x)
}
