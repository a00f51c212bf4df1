//! The property battery behind `icqt suite`.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use icqt_core::born::{decision_probabilities, dual_born_report};
use icqt_core::dynamics::{
    check_pmc, entanglement_trajectory, evolve_factorized, evolve_forced_factorized, evolve_full,
    FactorizedPropagator, Propagate, TrinaryHamiltonian,
};
use icqt_core::hilbert::random::{random_state, stream_rng};
use icqt_core::hilbert::{reduced_from_pure, schmidt_decompose, shannon_entropy, Basis, Keep};
use icqt_core::trinary::{apply_programmed, to_schmidt_form, ProgrammedUnitary, TrinaryDims, TrinaryState};

use crate::commands::{Outcome, ORACLE_TOL};
use crate::output::{to_json, write_atomic};
use crate::scenario::SuiteScenario;
use crate::CliError;

const NORM_TOL: f64 = 1e-10;
const ROW_TOL: f64 = 1e-10;
const CONVERSE_MIN: f64 = 1e-6;
const TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

// case streams start here so they never collide with the command streams
const STREAM_SUITE: u64 = 1 << 32;

#[derive(Serialize)]
pub struct PropertyResult {
    pub property: &'static str,
    pub cases: usize,
    /// Worst measured value over all cases; for the converse probe this is
    /// the smallest deviation, which must stay above the threshold.
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

struct Tally {
    property: &'static str,
    cases: usize,
    measured: f64,
    threshold: f64,
    /// `true` when `measured` must exceed `threshold` rather than stay below.
    lower_bound: bool,
}

impl Tally {
    fn upper(property: &'static str, threshold: f64) -> Self {
        Self { property, cases: 0, measured: 0.0, threshold, lower_bound: false }
    }

    fn lower(property: &'static str, threshold: f64) -> Self {
        Self { property, cases: 0, measured: f64::INFINITY, threshold, lower_bound: true }
    }

    fn record(&mut self, value: f64) {
        self.cases += 1;
        // NaN must never pass
        self.measured = if value.is_nan() {
            f64::NAN
        } else if self.lower_bound {
            self.measured.min(value)
        } else {
            self.measured.max(value)
        };
    }

    fn finish(self) -> PropertyResult {
        let passed = self.cases > 0
            && if self.lower_bound {
                self.measured > self.threshold
            } else {
                self.measured <= self.threshold
            };
        PropertyResult {
            property: self.property,
            cases: self.cases,
            measured: self.measured,
            threshold: self.threshold,
            passed,
        }
    }
}

#[derive(Serialize)]
struct SuiteReport {
    kind: &'static str,
    seed: u64,
    dims: Vec<TrinaryDims>,
    seeds: u64,
    properties: Vec<PropertyResult>,
    failures: Vec<&'static str>,
    passed: bool,
}

fn amplitude_leak(out: &TrinaryState, f: &nalgebra::DVector<Complex64>) -> f64 {
    let dims = out.dims();
    let (dp, n) = (dims.programming, dims.sa());
    let v = out.dense().amplitudes();
    let m = DMatrix::from_fn(dp, n, |r, j| v[r * n + j]);
    let kept = f * (f.adjoint() * &m);
    (m - kept).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn run_suite(spec: &SuiteScenario, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    if spec.dims.is_empty() || spec.seeds == 0 {
        return Err(CliError::input("suite needs at least one dims entry and one seed"));
    }
    let dims_list = spec.dims.iter().map(|d| d.build()).collect::<Result<Vec<_>, _>>()?;

    let mut factorization = Tally::upper("factorization", ORACLE_TOL);
    let mut norm = Tally::upper("norm-preservation", NORM_TOL);
    let mut composition = Tally::upper("composition", ORACLE_TOL);
    let mut locality = Tally::upper("block-locality", ORACLE_TOL);
    let mut schmidt = Tally::upper("schmidt-round-trip", NORM_TOL);
    let mut shannon = Tally::upper("shannon-identity", ORACLE_TOL);
    let mut bounds = Tally::upper("entropy-bounds", ORACLE_TOL);
    let mut rows = Tally::upper("born-row-normalization", ROW_TOL);
    let mut decisions = Tally::upper("decision-invariance", ROW_TOL);
    let mut converse = Tally::lower("converse-probe", CONVERSE_MIN);

    let mut case = 0u64;
    for &dims in &dims_list {
        for _ in 0..spec.seeds {
            let mut rng = stream_rng(seed, STREAM_SUITE + case);
            case += 1;

            let h = TrinaryHamiltonian::random_measurable(dims, &mut rng);
            if !check_pmc(&h).satisfied {
                // the generator guarantees this; count it as a failed case
                factorization.record(f64::INFINITY);
                continue;
            }
            let state = TrinaryState::from_dense(dims, random_state(dims.total(), &mut rng))?;
            for &t in &TIMES {
                let f = evolve_factorized(&h, &state, t)?;
                let d = evolve_full(&h, &state, t)?;
                factorization.record(f.max_abs_diff(&d));
                norm.record((f.dense().norm_sqr() - 1.0).abs().max((d.dense().norm_sqr() - 1.0).abs()));
            }
            let (t1, t2) = (0.3, 0.9);
            let stepped = evolve_full(&h, &evolve_full(&h, &state, t1)?, t2)?;
            composition.record(stepped.max_abs_diff(&evolve_full(&h, &state, t1 + t2)?));

            let prop = FactorizedPropagator::new(&h)?;
            let k = case as usize % dims.programming;
            let f = prop.components().column(k).into_owned();
            let w = random_state(dims.sa(), &mut rng);
            let injected = nalgebra::DVector::from_fn(dims.total(), |i, _| {
                f[i / dims.sa()] * w.amplitudes()[i % dims.sa()]
            });
            let moved = TrinaryState::from_dense(dims, icqt_core::hilbert::StateVector::normalized(injected)?)?;
            let evolved = prop.evolve(&moved, 1.0)?;
            locality.record(amplitude_leak(&evolved, &f));

            let sd = schmidt_decompose(state.dense(), (dims.programming, dims.sa()))?;
            schmidt.record(sd.reconstruct().max_abs_diff(state.dense()));
            let sf = to_schmidt_form(&state);
            // against the spectrum of the reduced density, not the SVD
            let rho_p = reduced_from_pure(state.dense(), (dims.programming, dims.sa()), Keep::Left)?;
            shannon.record((shannon_entropy(&decision_probabilities(&sf)) - rho_p.von_neumann_entropy()).abs());

            let tr = entanglement_trajectory(&h, &state, &[0.0, 1.0])?;
            let psa_cap = (dims.programming.min(dims.sa()) as f64).ln();
            let sa_cap = (dims.system.min(dims.apparatus) as f64).ln();
            let mut excess: f64 = 0.0;
            for (s, branch) in tr.s_psa.iter().zip(&tr.s_sa_branches) {
                excess = excess.max(-s).max(s - psa_cap);
                for b in branch {
                    excess = excess.max(-b).max(b - sa_cap);
                }
            }
            bounds.record(excess.max(0.0));

            if dims.apparatus >= dims.system {
                let bases: Vec<Basis> = (0..dims.programming)
                    .map(|_| Basis::random(dims.system, &mut rng))
                    .collect();
                let pu = ProgrammedUnitary::from_bases(dims, &bases)?;
                let chi = random_state(dims.programming, &mut rng);
                let psi = random_state(dims.system, &mut rng);
                let ready = icqt_core::hilbert::StateVector::basis(dims.apparatus, 0);
                let prepared = TrinaryState::product(dims, &chi, &psi, &ready)?;
                let after = apply_programmed(&pu, &prepared)?;
                rows.record(dual_born_report(&after)?.max_row_deviation());
                let d = decision_probabilities(&after)
                    .iter()
                    .zip(chi.as_slice())
                    .map(|(p, g)| (p - g.norm_sqr()).abs())
                    .fold(0.0, f64::max);
                decisions.record(d);
            }
        }
    }

    if spec.inject_pmc_violation {
        let dims = dims_list[0];
        let mut rng = stream_rng(seed, STREAM_SUITE + case);
        let h = TrinaryHamiltonian::random_generic(dims, &mut rng);
        if check_pmc(&h).satisfied {
            // a generic draw that happens to commute is no violation at all
            converse.record(0.0);
        } else {
            let state = TrinaryState::from_dense(dims, random_state(dims.total(), &mut rng))?;
            let forced = evolve_forced_factorized(&h, &state, 1.0)?;
            converse.record(forced.max_abs_diff(&evolve_full(&h, &state, 1.0)?));
        }
    }

    let mut properties: Vec<PropertyResult> = [
        factorization, norm, composition, locality, schmidt, shannon, bounds, rows, decisions,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect();
    if spec.inject_pmc_violation {
        properties.push(converse.finish());
    }
    let failures: Vec<&'static str> = properties.iter().filter(|p| !p.passed).map(|p| p.property).collect();
    let report = SuiteReport {
        kind: "property-suite",
        seed,
        dims: dims_list,
        seeds: spec.seeds,
        passed: failures.is_empty(),
        failures: failures.clone(),
        properties,
    };
    let json = to_json(&report)?;
    let file = write_atomic(out, "suite.json", &json)?;
    Ok(Outcome {
        json,
        files: vec![file],
        failed: !failures.is_empty(),
        warnings: failures.iter().map(|f| format!("property failed: {f}")).collect(),
    })
}
