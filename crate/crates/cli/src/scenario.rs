//! Scenario files: versioned JSON describing one workflow.

use num_complex::Complex64;
use serde::Deserialize;

use icqt_core::hilbert::{Basis, NamedBasis, Operator, StateVector};
use icqt_core::icqc::{GateOp, Preparation, RegisterSizes};
use icqt_core::trinary::TrinaryDims;

use crate::CliError;

/// The only schema version this build reads.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    TrinaryBuild(TrinaryBuild),
    Dynamics(Dynamics),
    Born(BornScenario),
    Icqc(IcqcScenario),
    PropertySuite(SuiteScenario),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::TrinaryBuild(_) => "trinary-build",
            Body::Dynamics(_) => "dynamics",
            Body::Born(_) => "born",
            Body::Icqc(_) => "icqc",
            Body::PropertySuite(_) => "property-suite",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
pub struct DimsSpec {
    pub system: usize,
    pub apparatus: usize,
    pub programming: usize,
}

impl DimsSpec {
    pub fn build(&self) -> Result<TrinaryDims, CliError> {
        Ok(TrinaryDims::new(self.system, self.apparatus, self.programming)?)
    }
}

/// A complex number written `[re, im]`.
pub type ComplexSpec = [f64; 2];

fn complex(c: &ComplexSpec) -> Complex64 {
    Complex64::new(c[0], c[1])
}

/// An explicit complex matrix, row-major.
#[derive(Clone, Debug, Deserialize)]
#[serde(transparent)]
pub struct MatrixSpec(pub Vec<Vec<ComplexSpec>>);

impl MatrixSpec {
    pub fn build(&self) -> Result<Operator, CliError> {
        let n = self.0.len();
        if self.0.iter().any(|r| r.len() != n) {
            return Err(CliError::input("matrix rows must all have the matrix's row count"));
        }
        let flat: Vec<Complex64> = self.0.iter().flatten().map(complex).collect();
        Ok(Operator::from_rows(n, &flat)?)
    }
}

/// Measurement basis of a branch.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    /// `"Z"`, `"X"`, `"Y"` or `"random"`.
    Named(String),
    /// Basis vectors, each a list of `[re, im]` amplitudes.
    Vectors { vectors: Vec<Vec<ComplexSpec>> },
}

impl BasisSpec {
    pub fn build<R: rand::Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<Basis, CliError> {
        match self {
            BasisSpec::Named(name) if name.eq_ignore_ascii_case("random") => Ok(Basis::random(dim, rng)),
            BasisSpec::Named(name) => Ok(Basis::named(name.parse::<NamedBasis>()?, dim)),
            BasisSpec::Vectors { vectors } => {
                if vectors.len() != dim || vectors.iter().any(|v| v.len() != dim) {
                    return Err(CliError::input(format!("explicit basis must be {dim} vectors of length {dim}")));
                }
                let states: Vec<StateVector> = vectors
                    .iter()
                    .map(|v| StateVector::from_raw(nalgebra::DVector::from_iterator(dim, v.iter().map(complex))))
                    .collect();
                Ok(Basis::from_vectors(&states)?)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            BasisSpec::Named(n) => n.to_uppercase(),
            BasisSpec::Vectors { .. } => "explicit".into(),
        }
    }
}

/// A normalized vector on one register.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorSpec {
    Uniform,
    Random,
    Basis(usize),
    Amplitudes(Vec<ComplexSpec>),
}

impl VectorSpec {
    pub fn build<R: rand::Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<StateVector, CliError> {
        match self {
            VectorSpec::Uniform => Ok(StateVector::uniform(dim)),
            VectorSpec::Random => Ok(icqt_core::hilbert::random::random_state(dim, rng)),
            VectorSpec::Basis(k) if *k < dim => Ok(StateVector::basis(dim, *k)),
            VectorSpec::Basis(k) => Err(CliError::input(format!("basis index {k} out of range for dimension {dim}"))),
            VectorSpec::Amplitudes(a) => {
                if a.len() != dim {
                    return Err(CliError::input(format!("expected {dim} amplitudes, got {}", a.len())));
                }
                Ok(StateVector::new(nalgebra::DVector::from_iterator(dim, a.iter().map(complex)))?)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct TrinaryBuild {
    pub dims: DimsSpec,
    pub branches: Vec<BasisSpec>,
    /// Apparatus ready-state index used to probe the branches.
    #[serde(default)]
    pub probe: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum HamiltonianSpec {
    Zero,
    RandomMeasurable {
        #[serde(default)]
        group: Option<usize>,
    },
    RandomGeneric,
    /// Random blocks in second-level structured form; `violate_sapmc`
    /// makes each block's system Hamiltonian off-diagonal.
    RandomStructured {
        #[serde(default)]
        violate_sapmc: bool,
    },
    Explicit {
        program: MatrixSpec,
        programming_basis: BasisSpec,
        blocks: Vec<MatrixSpec>,
    },
}

#[derive(Clone, Debug, Deserialize)]
pub struct SegmentSpec {
    pub duration: f64,
    pub hamiltonian: HamiltonianSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum InitialSpec {
    /// Random product state `chi (x) psi (x) phi`.
    Separable,
    Random,
    Product {
        program: VectorSpec,
        system: VectorSpec,
        apparatus: VectorSpec,
    },
}

#[derive(Clone, Debug, Deserialize)]
pub struct Dynamics {
    pub dims: DimsSpec,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    pub segments: Option<Vec<SegmentSpec>>,
    pub times: Vec<f64>,
    pub initial: InitialSpec,
    /// Ask for the factorized route; a violated condition is recorded and
    /// the dense route used instead.
    #[serde(default)]
    pub factorized: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BornScenario {
    pub dims: DimsSpec,
    /// Pointer-measurement bases; `"identity"` leaves `S (x) A` untouched.
    pub branches: Vec<BasisSpec>,
    pub system: VectorSpec,
    #[serde(default = "uniform")]
    pub program: VectorSpec,
    #[serde(default)]
    pub apparatus_ready: usize,
}

fn uniform() -> VectorSpec {
    VectorSpec::Uniform
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProgramSpec {
    Identity,
    Tomographic,
    Random { len: usize },
    Table(Vec<Vec<GateOp>>),
}

#[derive(Clone, Debug, Deserialize)]
pub struct IcqcScenario {
    pub n: usize,
    /// Explicit register sizes; must obey the register law.
    #[serde(default)]
    pub registers: Option<RegisterSizes>,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub gates: Vec<GateOp>,
    pub program: ProgramSpec,
    #[serde(default)]
    pub post_program: Vec<GateOp>,
    #[serde(default)]
    pub emit_branch_states: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SuiteScenario {
    #[serde(default = "default_suite_dims")]
    pub dims: Vec<DimsSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    /// Adds a Hamiltonian that violates the measurability condition to
    /// the battery.
    #[serde(default)]
    pub inject_pmc_violation: bool,
}

fn default_suite_dims() -> Vec<DimsSpec> {
    vec![DimsSpec {
        system: 2,
        apparatus: 2,
        programming: 4,
    }]
}

fn default_seeds() -> u64 {
    50
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let scenario: Scenario =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("scenario: {e}")))?;
    if scenario.schema != SCHEMA_VERSION {
        return Err(CliError::input(format!(
            "unsupported schema {} (expected {SCHEMA_VERSION})",
            scenario.schema
        )));
    }
    Ok(scenario)
}
