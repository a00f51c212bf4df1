use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{apply_gate, GateKind, GateOp, Qubit, Register};
use crate::error::{IcqtError, Result};
use crate::hilbert::Operator;

/// Default cap on the full state dimension (`n <= 3`).
pub const DEFAULT_MAX_DIM: usize = 4096;
/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "ICQT_MAX_DIM";

/// Qubit counts of the three registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSizes {
    pub system: usize,
    pub apparatus: usize,
    pub programming: usize,
}

impl RegisterSizes {
    pub fn for_system(n: usize) -> Self {
        Self {
            system: n,
            apparatus: n,
            programming: 2 * n,
        }
    }

    /// `n_A = n` and `n_P = 2n`, with `n >= 1`.
    pub fn check_law(&self) -> Result<()> {
        if self.system == 0 || self.apparatus != self.system || self.programming != 2 * self.system {
            return Err(IcqtError::RegisterLaw {
                system: self.system,
                apparatus: self.apparatus,
                programming: self.programming,
            });
        }
        Ok(())
    }
}

/// Largest full-state dimension a run may allocate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capacity {
    pub max_dim: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

impl Capacity {
    /// Reads `ICQT_MAX_DIM`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_DIM_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(|max_dim| Self { max_dim })
                .map_err(|_| IcqtError::InvalidInput(format!("{MAX_DIM_ENV}={v:?} is not a size"))),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Full state dimension `2^(4n)` if it fits.
    pub fn check(&self, n: usize) -> Result<usize> {
        let required = 4 * n;
        if required >= usize::BITS as usize || (1usize << required) > self.max_dim {
            return Err(IcqtError::Capacity {
                required: if required >= usize::BITS as usize { usize::MAX } else { 1 << required },
                max: self.max_dim,
            });
        }
        Ok(1 << required)
    }
}

/// One entry of the program table: the operation on `S (x) A` selected by a
/// programming basis state.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchProgram {
    Circuit(Vec<GateOp>),
    /// A raw unitary on `S (x) A`; accepted only for `n = 1`.
    Matrix(Operator),
}

impl BranchProgram {
    pub fn identity() -> Self {
        BranchProgram::Circuit(Vec::new())
    }

    /// Applies the branch to one `S (x) A` block.
    pub(crate) fn apply(&self, block: &mut [Complex64], n: usize) {
        match self {
            BranchProgram::Circuit(gates) => {
                for g in gates {
                    apply_gate(block, g, n);
                }
            }
            BranchProgram::Matrix(u) => {
                let v = nalgebra::DVector::from_column_slice(block);
                let out = u.matrix() * v;
                block.copy_from_slice(out.as_slice());
            }
        }
    }

    /// The branch as a `4^n x 4^n` matrix, column by column.
    pub fn unitary(&self, n: usize) -> Operator {
        let d = 1usize << (2 * n);
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for col in 0..d {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[col] = Complex64::new(1.0, 0.0);
            self.apply(&mut e, n);
            m.set_column(col, &nalgebra::DVector::from_vec(e));
        }
        Operator::new(m).expect("square")
    }
}

/// Preparation of `S` and `A` before the gate stage; `P` always starts
/// uniform.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preparation {
    /// Uniform superposition on every register.
    #[default]
    Uniform,
    /// `S` and `A` reset to `|0...0>`.
    ResetSa,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcqcConfig {
    registers: RegisterSizes,
    preparation: Preparation,
    gates: Vec<GateOp>,
    program_table: Vec<BranchProgram>,
    post_program: Vec<GateOp>,
    labels: Vec<Option<String>>,
}

impl IcqcConfig {
    pub fn new(
        registers: RegisterSizes,
        gates: Vec<GateOp>,
        program_table: Vec<BranchProgram>,
        post_program: Vec<GateOp>,
    ) -> Result<Self> {
        registers.check_law()?;
        let n = registers.system;
        let branches = 1usize
            .checked_shl(2 * n as u32)
            .ok_or(IcqtError::Capacity { required: usize::MAX, max: usize::MAX })?;
        if program_table.len() != branches {
            return Err(IcqtError::ProgramArity {
                expected: branches,
                actual: program_table.len(),
            });
        }
        for g in &gates {
            g.validate(n, &[Register::P, Register::S, Register::A])?;
        }
        for g in &post_program {
            g.validate(n, &[Register::P])?;
        }
        let sa = 1usize << (2 * n);
        for entry in &program_table {
            match entry {
                BranchProgram::Circuit(gs) => {
                    for g in gs {
                        g.validate(n, &[Register::S, Register::A])?;
                    }
                }
                BranchProgram::Matrix(u) => {
                    if n != 1 {
                        return Err(IcqtError::InvalidInput(
                            "matrix program entries are only accepted for n = 1".into(),
                        ));
                    }
                    if u.dim() != sa {
                        return Err(IcqtError::DimensionMismatch {
                            expected: sa,
                            actual: u.dim(),
                        });
                    }
                    u.ensure_unitary()?;
                }
            }
        }
        Ok(Self {
            registers,
            preparation: Preparation::Uniform,
            gates,
            program_table,
            post_program,
            labels: vec![None; branches],
        })
    }

    pub fn with_preparation(mut self, preparation: Preparation) -> Self {
        self.preparation = preparation;
        self
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        for (slot, l) in self.labels.iter_mut().zip(labels) {
            *slot = l;
        }
        self
    }

    pub fn n(&self) -> usize {
        self.registers.system
    }

    pub fn registers(&self) -> RegisterSizes {
        self.registers
    }

    pub fn preparation(&self) -> Preparation {
        self.preparation
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn program_table(&self) -> &[BranchProgram] {
        &self.program_table
    }

    pub fn post_program(&self) -> &[GateOp] {
        &self.post_program
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }
}

/// Pointer measurement of `S_k` onto `A_k` in the eigenbasis of `Z`, `X`
/// or `Y`.
fn pointer_gates(basis: char, k: usize) -> Vec<GateOp> {
    let (s, a) = (Qubit::s(k), Qubit::a(k));
    let cnot = GateOp::cnot(s, a);
    let one = |g| GateOp::single(g, s);
    match basis {
        'Z' => vec![cnot],
        'X' => vec![one(GateKind::H), cnot, one(GateKind::H)],
        // V = Sdg H maps |k> to the k-th Y basis vector; the pointer is V CNOT V^dag
        'Y' => vec![one(GateKind::S), one(GateKind::H), cnot, one(GateKind::H), one(GateKind::Sdg)],
        _ => unreachable!("basis tag"),
    }
}

/// The tomographic program: branch `p` measures each system qubit `k` in
/// basis `(Z, X, Y, Z)[d_k]`, where `d_k` is the `k`-th base-4 digit of
/// `p` (most significant first). Returns the table and per-branch labels.
pub fn tomographic_program(n: usize) -> (Vec<BranchProgram>, Vec<Option<String>>) {
    const CYCLE: [char; 4] = ['Z', 'X', 'Y', 'Z'];
    let branches = 1usize << (2 * n);
    let mut table = Vec::with_capacity(branches);
    let mut labels = Vec::with_capacity(branches);
    for p in 0..branches {
        let mut gates = Vec::new();
        let mut label = String::with_capacity(n);
        for k in 0..n {
            let digit = (p >> (2 * (n - 1 - k))) & 3;
            gates.extend(pointer_gates(CYCLE[digit], k));
            label.push(CYCLE[digit]);
        }
        table.push(BranchProgram::Circuit(gates));
        labels.push(Some(label));
    }
    (table, labels)
}

/// A random circuit of `len` gates on `S (x) A`.
pub fn random_sa_circuit<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Vec<GateOp> {
    let qubit = |rng: &mut R| {
        let k = rng.gen_range(0..2 * n);
        if k < n {
            Qubit::s(k)
        } else {
            Qubit::a(k - n)
        }
    };
    (0..len)
        .map(|_| {
            let choice = rng.gen_range(0..10);
            let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let kind = match choice {
                0 => GateKind::H,
                1 => GateKind::X,
                2 => GateKind::Y,
                3 => GateKind::Z,
                4 => GateKind::S,
                5 => GateKind::T,
                6 => GateKind::Rx(theta),
                7 => GateKind::Ry(theta),
                8 => GateKind::Rz(theta),
                _ => GateKind::Cnot,
            };
            if kind == GateKind::Cnot {
                let c = qubit(rng);
                let mut t = qubit(rng);
                while t == c {
                    t = qubit(rng);
                }
                GateOp::cnot(c, t)
            } else {
                GateOp::single(kind, qubit(rng))
            }
        })
        .collect()
}
