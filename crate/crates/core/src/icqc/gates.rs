use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IcqtError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Register {
    P,
    S,
    A,
}

impl Register {
    pub fn tag(self) -> char {
        match self {
            Register::P => 'P',
            Register::S => 'S',
            Register::A => 'A',
        }
    }
}

/// One qubit of a register, written `S0`, `A1`, `P3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qubit {
    pub register: Register,
    pub index: usize,
}

impl Qubit {
    pub fn new(register: Register, index: usize) -> Self {
        Self { register, index }
    }

    pub fn p(index: usize) -> Self {
        Self::new(Register::P, index)
    }

    pub fn s(index: usize) -> Self {
        Self::new(Register::S, index)
    }

    pub fn a(index: usize) -> Self {
        Self::new(Register::A, index)
    }

    /// Bit position in the dense index of a state with `n` system qubits.
    /// Qubit 0 of each register is its most significant bit.
    pub(crate) fn bit(self, n: usize) -> usize {
        match self.register {
            Register::P => 4 * n - 1 - self.index,
            Register::S => 2 * n - 1 - self.index,
            Register::A => n - 1 - self.index,
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.register.tag(), self.index)
    }
}

impl FromStr for Qubit {
    type Err = IcqtError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let register = match chars.next() {
            Some('P') | Some('p') => Register::P,
            Some('S') | Some('s') => Register::S,
            Some('A') | Some('a') => Register::A,
            _ => return Err(IcqtError::InvalidGate(format!("bad qubit {s:?}"))),
        };
        let index = chars
            .as_str()
            .parse()
            .map_err(|_| IcqtError::InvalidGate(format!("bad qubit {s:?}")))?;
        Ok(Self { register, index })
    }
}

impl Serialize for Qubit {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qubit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "angle")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    #[serde(rename = "CNOT")]
    Cnot,
}

pub(crate) type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// The 2x2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn matrix(self) -> Option<Mat2> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        Some(match self {
            GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            GateKind::X => [[z, one], [one, z]],
            GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            GateKind::Z => [[one, z], [z, c(-1.0, 0.0)]],
            GateKind::S => [[one, z], [z, c(0.0, 1.0)]],
            GateKind::Sdg => [[one, z], [z, c(0.0, -1.0)]],
            GateKind::T => [[one, z], [z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            GateKind::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::Rz(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), z],
                [z, Complex64::from_polar(1.0, t / 2.0)],
            ],
            GateKind::Cnot => return None,
        })
    }
}

/// A gate and its targets; CNOT takes `[control, target]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    #[serde(flatten)]
    pub kind: GateKind,
    pub targets: Vec<Qubit>,
}

impl GateOp {
    pub fn single(kind: GateKind, q: Qubit) -> Self {
        Self {
            kind,
            targets: vec![q],
        }
    }

    pub fn cnot(control: Qubit, target: Qubit) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    /// Checks arity, distinct targets, register bounds and that every
    /// target lies in one of `allowed`.
    pub(crate) fn validate(&self, n: usize, allowed: &[Register]) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(IcqtError::InvalidGate(format!(
                "{:?} takes {} target(s), got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(IcqtError::InvalidGate(format!("repeated target {}", self.targets[0])));
        }
        for q in &self.targets {
            let size = match q.register {
                Register::P => 2 * n,
                _ => n,
            };
            if q.index >= size {
                return Err(IcqtError::QubitOutOfRange {
                    register: q.register.tag(),
                    index: q.index,
                    size,
                });
            }
            if !allowed.contains(&q.register) {
                return Err(IcqtError::InvalidGate(format!(
                    "qubit {q} is not allowed at this stage"
                )));
            }
        }
        Ok(())
    }
}

/// Applies one validated gate to amplitudes indexed with the layout of `n`.
/// `amps` may be a full state or a `S (x) A` block; only the addressed
/// bits must fit inside it.
pub(crate) fn apply_gate(amps: &mut [Complex64], gate: &GateOp, n: usize) {
    match gate.kind.matrix() {
        Some(m) => apply_single(amps, &m, gate.targets[0].bit(n)),
        None => apply_cnot(amps, gate.targets[0].bit(n), gate.targets[1].bit(n)),
    }
}

fn apply_single(amps: &mut [Complex64], m: &Mat2, bit: usize) {
    let mask = 1usize << bit;
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (amps[i], amps[j]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn apply_cnot(amps: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}
