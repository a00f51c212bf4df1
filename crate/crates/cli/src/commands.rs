//! One function per subcommand. Each returns the JSON report, the files it
//! wrote and whether a property or validation check failed.

use std::path::{Path, PathBuf};

use serde::Serialize;

use icqt_core::born::{conventional_oracle, dual_born_report, outcome_probabilities, DualBornReport};
use icqt_core::dynamics::{
    check_pmc, check_sapmc_all, diagonal_in, schedule_trajectory, CommutationCheck,
    EntanglementTrajectory, ProgrammedBlockStructure, Route, Schedule, ScheduleEngine,
    TrinaryHamiltonian,
};
use icqt_core::hilbert::random::{random_hermitian, random_real_spectrum, random_state, stream_rng};
use icqt_core::hilbert::{Basis, Operator, StateVector};
use icqt_core::icqc::{
    random_sa_circuit, run, tomographic_program, BranchProgram, Capacity, IcqcConfig, RegisterSizes,
    RunReport,
};
use icqt_core::trinary::{
    apply_programmed, build_pointer_measurement, validate_informational_completeness,
    CompletenessReport, ProgrammedUnitary, TrinaryDims, TrinaryState,
};
use rand_chacha::ChaCha20Rng;

use crate::output::{csv, to_json, write_atomic};
use crate::scenario::{
    BasisSpec, BornScenario, Dynamics, HamiltonianSpec, IcqcScenario, InitialSpec, ProgramSpec,
    TrinaryBuild,
};
use crate::CliError;

// independent random streams split from the scenario seed
const STREAM_BASES: u64 = 1;
const STREAM_HAMILTONIAN: u64 = 2;
const STREAM_STATE: u64 = 3;
const STREAM_PROGRAM: u64 = 4;

/// Largest factorized-vs-dense deviation accepted in reports.
pub const ORACLE_TOL: f64 = 1e-9;
/// Largest Born-rule deviation accepted in reports.
pub const BORN_TOL: f64 = 1e-10;

pub struct Outcome {
    pub json: String,
    pub files: Vec<PathBuf>,
    pub failed: bool,
    pub warnings: Vec<String>,
}

fn emit<T: Serialize>(
    out: &Path,
    name: &str,
    report: &T,
    failed: bool,
    warnings: Vec<String>,
    mut files: Vec<PathBuf>,
) -> Result<Outcome, CliError> {
    let json = to_json(report)?;
    files.push(write_atomic(out, name, &json)?);
    Ok(Outcome {
        json,
        files,
        failed,
        warnings,
    })
}

// ---- validate ---------------------------------------------------------------

#[derive(Serialize)]
struct ValidateReport<'a> {
    kind: &'static str,
    seed: u64,
    dims: TrinaryDims,
    labels: Vec<String>,
    report: &'a CompletenessReport,
}

pub fn validate(spec: &TrinaryBuild, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let dims = spec.dims.build()?;
    let mut rng = stream_rng(seed, STREAM_BASES);
    let bases = spec
        .branches
        .iter()
        .map(|b| b.build(dims.system, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    if spec.probe >= dims.apparatus {
        return Err(CliError::input(format!(
            "probe index {} out of range for apparatus dimension {}",
            spec.probe, dims.apparatus
        )));
    }
    let pu = ProgrammedUnitary::from_bases(dims, &bases)?;
    let report = validate_informational_completeness(&pu, &StateVector::basis(dims.apparatus, spec.probe))?;
    let labels = spec.branches.iter().map(BasisSpec::label).collect();
    let failed = !report.complete;
    emit(
        out,
        "completeness.json",
        &ValidateReport {
            kind: "trinary-build",
            seed,
            dims,
            labels,
            report: &report,
        },
        failed,
        vec![],
        vec![],
    )
}

// ---- evolve -----------------------------------------------------------------

fn build_hamiltonian(
    spec: &HamiltonianSpec,
    dims: TrinaryDims,
    rng: &mut ChaCha20Rng,
) -> Result<TrinaryHamiltonian, CliError> {
    Ok(match spec {
        HamiltonianSpec::Zero => TrinaryHamiltonian::zero(dims),
        HamiltonianSpec::RandomMeasurable { group: None } => TrinaryHamiltonian::random_measurable(dims, rng),
        HamiltonianSpec::RandomMeasurable { group: Some(g) } => {
            if *g == 0 {
                return Err(CliError::input("group size must be positive"));
            }
            TrinaryHamiltonian::random_measurable_grouped(dims, *g, rng)
        }
        HamiltonianSpec::RandomGeneric => TrinaryHamiltonian::random_generic(dims, rng),
        HamiltonianSpec::RandomStructured { violate_sapmc } => {
            let structures = (0..dims.programming)
                .map(|_| {
                    let sb = Basis::random(dims.system, rng);
                    let hs = if *violate_sapmc {
                        random_hermitian(dims.system, rng)
                    } else {
                        diagonal_in(&sb, &random_real_spectrum(dims.system, rng))
                    };
                    let gens = (0..dims.system)
                        .map(|_| random_hermitian(dims.apparatus, rng))
                        .collect();
                    ProgrammedBlockStructure::new(sb, gens, hs)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let pb = Basis::random(dims.programming, rng);
            let hp = diagonal_in(&pb, &random_real_spectrum(dims.programming, rng));
            TrinaryHamiltonian::from_structures(dims, hp, pb, structures)?
        }
        HamiltonianSpec::Explicit {
            program,
            programming_basis,
            blocks,
        } => TrinaryHamiltonian::new(
            dims,
            program.build()?,
            programming_basis.build(dims.programming, rng)?,
            blocks.iter().map(|b| b.build()).collect::<Result<Vec<_>, _>>()?,
        )?,
    })
}

fn build_initial(
    spec: &InitialSpec,
    dims: TrinaryDims,
    rng: &mut ChaCha20Rng,
) -> Result<TrinaryState, CliError> {
    Ok(match spec {
        InitialSpec::Separable => {
            let chi = random_state(dims.programming, rng);
            let psi = random_state(dims.system, rng);
            let phi = random_state(dims.apparatus, rng);
            TrinaryState::product(dims, &chi, &psi, &phi)?
        }
        InitialSpec::Random => TrinaryState::from_dense(dims, random_state(dims.total(), rng))?,
        InitialSpec::Product {
            program,
            system,
            apparatus,
        } => {
            let chi = program.build(dims.programming, rng)?;
            let psi = system.build(dims.system, rng)?;
            let phi = apparatus.build(dims.apparatus, rng)?;
            TrinaryState::product(dims, &chi, &psi, &phi)?
        }
    })
}

#[derive(Serialize)]
struct SegmentReport {
    duration: f64,
    pmc: CommutationCheck,
    /// Present for structured blocks only.
    sapmc: Option<CommutationCheck>,
    factorized: bool,
}

#[derive(Serialize)]
struct EvolveReport<'a> {
    kind: &'static str,
    seed: u64,
    dims: TrinaryDims,
    segments: Vec<SegmentReport>,
    factorized_requested: bool,
    factorized_used: bool,
    warning: bool,
    warnings: &'a [String],
    /// Factorized route against the dense route over all sample times;
    /// `None` when no segment could be factorized.
    max_deviation_factorized_vs_full: Option<f64>,
    trajectory: &'a EntanglementTrajectory,
}

pub fn evolve(spec: &Dynamics, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let dims = spec.dims.build()?;
    let mut hrng = stream_rng(seed, STREAM_HAMILTONIAN);
    let schedule = match (&spec.hamiltonian, &spec.segments) {
        (Some(h), None) => Schedule::constant(build_hamiltonian(h, dims, &mut hrng)?),
        (None, Some(segs)) => Schedule::new(
            segs.iter()
                .map(|s| Ok((s.duration, build_hamiltonian(&s.hamiltonian, dims, &mut hrng)?)))
                .collect::<Result<Vec<_>, CliError>>()?,
        )?,
        _ => return Err(CliError::input("give exactly one of `hamiltonian` or `segments`")),
    };
    let state = build_initial(&spec.initial, dims, &mut stream_rng(seed, STREAM_STATE))?;

    let segments: Vec<SegmentReport> = schedule
        .segments()
        .iter()
        .map(|(d, h)| {
            let pmc = check_pmc(h);
            SegmentReport {
                duration: *d,
                pmc,
                sapmc: check_sapmc_all(h),
                factorized: pmc.satisfied,
            }
        })
        .collect();
    let any_factorized = segments.iter().any(|s| s.factorized);
    let all_factorized = segments.iter().all(|s| s.factorized);

    let mut warnings = Vec::new();
    if spec.factorized && !all_factorized {
        warnings.push(
            "factorized evolution requested but the measurability condition fails; dense evolution used"
                .to_string(),
        );
    }
    for (i, s) in segments.iter().enumerate() {
        if matches!(s.sapmc, Some(c) if !c.satisfied) {
            warnings.push(format!("segment {i}: a structured block violates S|A measurability"));
        }
    }

    let trajectory = schedule_trajectory(&schedule, &state, &spec.times)?;
    let deviation = if any_factorized {
        let auto = ScheduleEngine::new(&schedule, Route::Auto)?;
        let full = ScheduleEngine::new(&schedule, Route::Full)?;
        let mut worst: f64 = 0.0;
        for &t in &spec.times {
            worst = worst.max(auto.evolve(&state, t)?.max_abs_diff(&full.evolve(&state, t)?));
        }
        Some(worst)
    } else {
        None
    };
    let failed = deviation.is_some_and(|d| d > ORACLE_TOL);

    let mut header = vec!["t".to_string(), "S_PSA".to_string()];
    header.extend((0..dims.programming).map(|n| format!("S_SA_branch_{n}")));
    let rows: Vec<Vec<f64>> = trajectory
        .times
        .iter()
        .zip(&trajectory.s_psa)
        .zip(&trajectory.s_sa_branches)
        .map(|((t, s), b)| {
            let mut row = vec![*t, *s];
            row.extend(b);
            row
        })
        .collect();
    let csv_path = write_atomic(out, "trajectory.csv", &csv(&header, &rows))?;

    let report = EvolveReport {
        kind: "dynamics",
        seed,
        dims,
        segments,
        factorized_requested: spec.factorized,
        factorized_used: trajectory.factorized,
        warning: !warnings.is_empty(),
        warnings: &warnings,
        max_deviation_factorized_vs_full: deviation,
        trajectory: &trajectory,
    };
    emit(out, "dynamics.json", &report, failed, warnings.clone(), vec![csv_path])
}

// ---- born -------------------------------------------------------------------

#[derive(Serialize)]
struct BranchComparison {
    branch: usize,
    label: String,
    /// Conventional `|<b_j|psi>|^2` in the branch basis.
    oracle: Option<Vec<f64>>,
    /// The branch's outcome probabilities aligned to the same basis.
    emergent: Option<Vec<f64>>,
    deviation: Option<f64>,
}

#[derive(Serialize)]
struct BornCommandReport<'a> {
    kind: &'static str,
    seed: u64,
    dims: TrinaryDims,
    report: &'a DualBornReport,
    comparison: Vec<BranchComparison>,
    /// Largest outcome deviation from the conventional rule.
    max_deviation: f64,
    /// Largest `| decision_r - |g_r|^2 |`.
    decision_deviation: f64,
    max_row_deviation: f64,
}

pub fn born(spec: &BornScenario, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let dims = spec.dims.build()?;
    if spec.apparatus_ready >= dims.apparatus {
        return Err(CliError::input("apparatus_ready out of range"));
    }
    let mut brng = stream_rng(seed, STREAM_BASES);
    let mut bases: Vec<Option<Basis>> = Vec::with_capacity(spec.branches.len());
    let mut unitaries = Vec::with_capacity(spec.branches.len());
    let mut labels = Vec::with_capacity(spec.branches.len());
    for b in &spec.branches {
        match b {
            BasisSpec::Named(n) if n.eq_ignore_ascii_case("identity") => {
                bases.push(None);
                unitaries.push(Operator::identity(dims.sa()));
                labels.push("identity".to_string());
            }
            _ => {
                let basis = b.build(dims.system, &mut brng)?;
                unitaries.push(build_pointer_measurement(&basis, dims.apparatus)?);
                bases.push(Some(basis));
                labels.push(b.label());
            }
        }
    }
    let pu = ProgrammedUnitary::new(dims, unitaries)?;
    let mut srng = stream_rng(seed, STREAM_STATE);
    let psi = spec.system.build(dims.system, &mut srng)?;
    let chi = spec.program.build(dims.programming, &mut srng)?;
    let ready = StateVector::basis(dims.apparatus, spec.apparatus_ready);
    let state = apply_programmed(&pu, &TrinaryState::product(dims, &chi, &psi, &ready)?)?;

    let report = dual_born_report(&state)?.with_labels(labels.iter().cloned().map(Some));
    let decision_deviation = report
        .decision_probs
        .iter()
        .zip(chi.as_slice())
        .map(|(p, g)| (p - g.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let mut max_deviation: f64 = 0.0;
    let comparison = bases
        .iter()
        .enumerate()
        .map(|(r, basis)| {
            let (oracle, emergent, deviation) = match (basis, report.outcome_probs[r].is_some()) {
                (Some(b), true) => {
                    let oracle = conventional_oracle(&psi, b);
                    let emergent = outcome_probabilities(&state, r)?.in_basis(b);
                    let d = oracle
                        .iter()
                        .zip(&emergent)
                        .map(|(a, e)| (a - e).abs())
                        .fold(0.0, f64::max);
                    max_deviation = max_deviation.max(d);
                    (Some(oracle), Some(emergent), Some(d))
                }
                _ => (None, None, None),
            };
            Ok(BranchComparison {
                branch: r,
                label: labels[r].clone(),
                oracle,
                emergent,
                deviation,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let max_row_deviation = report.max_row_deviation();
    let failed = max_deviation > BORN_TOL || decision_deviation > BORN_TOL || max_row_deviation > BORN_TOL;
    let warnings = report
        .empty_branches
        .iter()
        .map(|r| format!("branch {r} is empty"))
        .collect();
    emit(
        out,
        "born.json",
        &BornCommandReport {
            kind: "born",
            seed,
            dims,
            report: &report,
            comparison,
            max_deviation,
            decision_deviation,
            max_row_deviation,
        },
        failed,
        warnings,
        vec![],
    )
}

// ---- icqc -------------------------------------------------------------------

#[derive(Serialize)]
struct IcqcCommandReport<'a> {
    kind: &'static str,
    seed: u64,
    registers: RegisterSizes,
    report: &'a RunReport,
    max_row_deviation: f64,
    /// Normalized `S (x) A` state per branch as `[re, im]` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    branch_states: Option<Vec<Option<Vec<[f64; 2]>>>>,
}

pub fn icqc(spec: &IcqcScenario, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let registers = spec.registers.unwrap_or(RegisterSizes::for_system(spec.n));
    if registers.system != spec.n {
        return Err(CliError::input(format!(
            "n = {} but registers give {} system qubits",
            spec.n, registers.system
        )));
    }
    registers.check_law()?;
    let capacity = Capacity::from_env()?;
    capacity.check(spec.n)?;
    let branches = 1usize << (2 * spec.n);
    let (table, labels) = match &spec.program {
        ProgramSpec::Identity => (vec![BranchProgram::identity(); branches], vec![None; branches]),
        ProgramSpec::Tomographic => tomographic_program(spec.n),
        ProgramSpec::Random { len } => {
            let mut rng = stream_rng(seed, STREAM_PROGRAM);
            (
                (0..branches)
                    .map(|_| BranchProgram::Circuit(random_sa_circuit(spec.n, *len, &mut rng)))
                    .collect(),
                vec![None; branches],
            )
        }
        ProgramSpec::Table(t) => (
            t.iter().cloned().map(BranchProgram::Circuit).collect(),
            vec![None; t.len()],
        ),
    };
    let config = IcqcConfig::new(registers, spec.gates.clone(), table, spec.post_program.clone())?
        .with_labels(labels)
        .with_preparation(spec.preparation);
    let report = run(&config, capacity)?;
    let max_row_deviation = report.born.max_row_deviation();
    let branch_states = spec.emit_branch_states.then(|| {
        (0..branches)
            .map(|p| {
                report
                    .branch_state(p)
                    .map(|s| s.as_slice().iter().map(|z| [z.re, z.im]).collect())
            })
            .collect()
    });
    emit(
        out,
        "icqc.json",
        &IcqcCommandReport {
            kind: "icqc",
            seed,
            registers,
            report: &report,
            max_row_deviation,
            branch_states,
        },
        max_row_deviation > ORACLE_TOL,
        vec![],
        vec![],
    )
}
