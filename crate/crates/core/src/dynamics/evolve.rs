use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::block::{check_sapmc, StructuredBlockPropagator, COMMUTATION_TOL};
use super::hamiltonian::{check_pmc, TrinaryHamiltonian};
use crate::error::{IcqtError, Result};
use crate::hilbert::eigh::eigh;
use crate::hilbert::HermitianPropagator;
use crate::trinary::{TrinaryDims, TrinaryState};

/// Blocks closer than this are treated as one programmed operation.
const BLOCK_EQ_TOL: f64 = 1e-10;

/// Anything that advances dense trinary amplitudes by a time `t`.
pub trait Propagate {
    fn dims(&self) -> TrinaryDims;

    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64>;

    fn evolve(&self, state: &TrinaryState, t: f64) -> Result<TrinaryState> {
        self.dims().ensure_matches(&state.dims())?;
        Ok(TrinaryState::from_dense_unchecked(
            self.dims(),
            self.apply_vec(state.dense().amplitudes(), t),
        ))
    }
}

/// `exp(-i I_PSA t)` from the dense spectral decomposition. The
/// brute-force reference for every structured route.
#[derive(Clone, Debug)]
pub struct FullPropagator {
    dims: TrinaryDims,
    inner: HermitianPropagator,
}

impl FullPropagator {
    pub fn new(h: &TrinaryHamiltonian) -> Result<Self> {
        Ok(Self {
            dims: h.dims(),
            inner: HermitianPropagator::new(&h.full())?,
        })
    }
}

impl Propagate for FullPropagator {
    fn dims(&self) -> TrinaryDims {
        self.dims
    }

    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        self.inner.apply_vec(v, t)
    }
}

#[derive(Clone, Debug)]
enum BlockPropagator {
    Dense(HermitianPropagator),
    Structured(StructuredBlockPropagator),
}

impl BlockPropagator {
    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        match self {
            BlockPropagator::Dense(p) => p.apply_vec(v, t),
            BlockPropagator::Structured(p) => p.apply_vec(v, t),
        }
    }
}

/// Groups programming indices whose blocks coincide; returns the class of
/// each index and one representative index per class.
fn block_classes(h: &TrinaryHamiltonian) -> (Vec<usize>, Vec<usize>) {
    let mut class_of = Vec::with_capacity(h.blocks().len());
    let mut reps: Vec<usize> = Vec::new();
    for (n, b) in h.blocks().iter().enumerate() {
        let found = reps
            .iter()
            .position(|&r| b.max_abs_diff(&h.blocks()[r]) <= BLOCK_EQ_TOL);
        match found {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(n);
            }
        }
    }
    (class_of, reps)
}

fn block_propagators(h: &TrinaryHamiltonian, reps: &[usize]) -> Result<Vec<BlockPropagator>> {
    reps.iter()
        .map(|&n| {
            if let Some(s) = h.structures().map(|s| &s[n]) {
                if check_sapmc(s).satisfied {
                    return Ok(BlockPropagator::Structured(StructuredBlockPropagator::new(s)?));
                }
            }
            Ok(BlockPropagator::Dense(HermitianPropagator::new(&h.blocks()[n])?))
        })
        .collect()
}

/// Factorized dual dynamics for a Hamiltonian obeying the P-SA
/// measurability condition.
///
/// `H_P` is diagonalized jointly with the block structure, giving programming
/// components `|f_m>` with `H_P |f_m> = e_m |f_m>` and a single block `B_m`
/// each. Evolution then acts on each component independently as
/// `exp(-i e_m t) exp(-i B_m t)`; amplitudes never move between components.
#[derive(Clone, Debug)]
pub struct FactorizedPropagator {
    dims: TrinaryDims,
    /// Columns are the joint eigenvectors `|f_m>`.
    components: DMatrix<Complex64>,
    energies: Vec<f64>,
    component_class: Vec<usize>,
    blocks: Vec<BlockPropagator>,
}

impl FactorizedPropagator {
    pub fn new(h: &TrinaryHamiltonian) -> Result<Self> {
        let check = check_pmc(h);
        if !check.satisfied {
            return Err(IcqtError::FactorizationPrecondition {
                condition: "P-SA measurability",
                norm: check.commutator_norm,
            });
        }
        let dp = h.dims().programming;
        let (class_of, reps) = block_classes(h);
        let in_basis = h.program_in_basis();
        let e = h.programming_basis().matrix();

        // (energy, representative index, vector, class)
        let mut found: Vec<(f64, usize, DVector<Complex64>, usize)> = Vec::with_capacity(dp);
        for (c, &rep) in reps.iter().enumerate() {
            let members: Vec<usize> = (0..dp).filter(|&n| class_of[n] == c).collect();
            let sub = DMatrix::from_fn(members.len(), members.len(), |i, j| {
                in_basis[(members[i], members[j])]
            });
            let sub = (&sub + sub.adjoint()) * Complex64::new(0.5, 0.0);
            let (energies, vectors) = eigh(&sub);
            for (k, &energy) in energies.iter().enumerate() {
                let mut f = DVector::<Complex64>::zeros(dp);
                for (i, &n) in members.iter().enumerate() {
                    f += e.column(n) * vectors[(i, k)];
                }
                found.push((energy, rep, f, c));
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let components = DMatrix::from_columns(&found.iter().map(|x| x.2.clone()).collect::<Vec<_>>());
        Ok(Self {
            dims: h.dims(),
            components,
            energies: found.iter().map(|x| x.0).collect(),
            component_class: found.iter().map(|x| x.3).collect(),
            blocks: block_propagators(h, &reps)?,
        })
    }

    /// Joint eigenvectors of `H_P` and the block structure, as columns.
    pub fn components(&self) -> &DMatrix<Complex64> {
        &self.components
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

impl Propagate for FactorizedPropagator {
    fn dims(&self) -> TrinaryDims {
        self.dims
    }

    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let (dp, n) = (self.dims.programming, self.dims.sa());
        let m = DMatrix::from_fn(dp, n, |r, j| v[r * n + j]);
        let mut per_component = self.components.adjoint() * m;
        for k in 0..dp {
            let row: DVector<Complex64> = per_component.row(k).transpose();
            let phase = Complex64::from_polar(1.0, -self.energies[k] * t);
            let evolved = self.blocks[self.component_class[k]].apply_vec(&row, t) * phase;
            per_component.set_row(k, &evolved.transpose());
        }
        let out = &self.components * per_component;
        DVector::from_fn(dp * n, |k, _| out[(k / n, k % n)])
    }
}

/// The factorized product `sum_n |e_n><e_n| U_P(t) (x) U_SA|P(e_n, t)`
/// evaluated literally, whether or not the measurability condition holds.
///
/// Equals the true evolution exactly when `H_P` and the interaction
/// commute.
#[derive(Clone, Debug)]
pub struct ForcedFactorization {
    dims: TrinaryDims,
    program: HermitianPropagator,
    basis: DMatrix<Complex64>,
    class_of: Vec<usize>,
    blocks: Vec<BlockPropagator>,
}

impl ForcedFactorization {
    pub fn new(h: &TrinaryHamiltonian) -> Result<Self> {
        let (class_of, reps) = block_classes(h);
        Ok(Self {
            dims: h.dims(),
            program: HermitianPropagator::new(h.program_hamiltonian())?,
            basis: h.programming_basis().matrix().clone(),
            class_of,
            blocks: reps
                .iter()
                .map(|&n| HermitianPropagator::new(&h.blocks()[n]).map(BlockPropagator::Dense))
                .collect::<Result<_>>()?,
        })
    }
}

impl Propagate for ForcedFactorization {
    fn dims(&self) -> TrinaryDims {
        self.dims
    }

    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let (dp, n) = (self.dims.programming, self.dims.sa());
        let m = DMatrix::from_fn(dp, n, |r, j| v[r * n + j]);
        let after_program = self.program.at(t).matrix() * m;
        let mut per_state = self.basis.adjoint() * after_program;
        for k in 0..dp {
            let row: DVector<Complex64> = per_state.row(k).transpose();
            let evolved = self.blocks[self.class_of[k]].apply_vec(&row, t);
            per_state.set_row(k, &evolved.transpose());
        }
        let out = &self.basis * per_state;
        DVector::from_fn(dp * n, |k, _| out[(k / n, k % n)])
    }
}

/// Dense reference evolution `exp(-i I_PSA t) |state>`.
pub fn evolve_full(h: &TrinaryHamiltonian, state: &TrinaryState, t: f64) -> Result<TrinaryState> {
    h.dims().ensure_matches(&state.dims())?;
    FullPropagator::new(h)?.evolve(state, t)
}

/// Evolution through the factorized dual dynamics. Fails when the P-SA
/// measurability condition does not hold.
pub fn evolve_factorized(
    h: &TrinaryHamiltonian,
    state: &TrinaryState,
    t: f64,
) -> Result<TrinaryState> {
    h.dims().ensure_matches(&state.dims())?;
    FactorizedPropagator::new(h)?.evolve(state, t)
}

/// The literal factorized product with no precondition check.
pub fn evolve_forced_factorized(
    h: &TrinaryHamiltonian,
    state: &TrinaryState,
    t: f64,
) -> Result<TrinaryState> {
    h.dims().ensure_matches(&state.dims())?;
    ForcedFactorization::new(h)?.evolve(state, t)
}

/// Picks the factorized route when the measurability condition holds and
/// the dense route otherwise.
pub enum Engine {
    Factorized(FactorizedPropagator),
    Full(FullPropagator),
}

impl Engine {
    pub fn new(h: &TrinaryHamiltonian) -> Result<Self> {
        if check_pmc(h).commutator_norm <= COMMUTATION_TOL {
            Ok(Engine::Factorized(FactorizedPropagator::new(h)?))
        } else {
            Ok(Engine::Full(FullPropagator::new(h)?))
        }
    }

    pub fn is_factorized(&self) -> bool {
        matches!(self, Engine::Factorized(_))
    }
}

impl Propagate for Engine {
    fn dims(&self) -> TrinaryDims {
        match self {
            Engine::Factorized(p) => p.dims(),
            Engine::Full(p) => p.dims(),
        }
    }

    fn apply_vec(&self, v: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        match self {
            Engine::Factorized(p) => p.apply_vec(v, t),
            Engine::Full(p) => p.apply_vec(v, t),
        }
    }
}

/// A piecewise-constant Hamiltonian: each segment runs for its duration.
#[derive(Clone, Debug)]
pub struct Schedule {
    segments: Vec<(f64, TrinaryHamiltonian)>,
}

impl Schedule {
    pub fn new(segments: Vec<(f64, TrinaryHamiltonian)>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| IcqtError::InvalidInput("schedule has no segments".into()))?;
        let dims = first.1.dims();
        for (d, h) in &segments {
            if !(*d >= 0.0) {
                return Err(IcqtError::InvalidInput(format!("segment duration {d} is negative")));
            }
            dims.ensure_matches(&h.dims())?;
        }
        Ok(Self { segments })
    }

    /// A single Hamiltonian applied for all time.
    pub fn constant(h: TrinaryHamiltonian) -> Self {
        Self {
            segments: vec![(f64::INFINITY, h)],
        }
    }

    pub fn dims(&self) -> TrinaryDims {
        self.segments[0].1.dims()
    }

    pub fn segments(&self) -> &[(f64, TrinaryHamiltonian)] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.0).sum()
    }
}

/// Segment engines for a schedule, built once and reused across times.
pub struct ScheduleEngine {
    dims: TrinaryDims,
    segments: Vec<(f64, Box<dyn Propagate + Send + Sync>)>,
}

/// Which propagator each schedule segment uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Factorized when the segment obeys the measurability condition.
    Auto,
    Full,
    /// Literal factorized product regardless of the condition.
    Forced,
}

impl ScheduleEngine {
    pub fn new(schedule: &Schedule, route: Route) -> Result<Self> {
        let segments = schedule
            .segments
            .iter()
            .map(|(d, h)| {
                let p: Box<dyn Propagate + Send + Sync> = match route {
                    Route::Auto => match Engine::new(h)? {
                        Engine::Factorized(p) => Box::new(p),
                        Engine::Full(p) => Box::new(p),
                    },
                    Route::Full => Box::new(FullPropagator::new(h)?),
                    Route::Forced => Box::new(ForcedFactorization::new(h)?),
                };
                Ok((*d, p))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            dims: schedule.dims(),
            segments,
        })
    }

    /// Evolves from time 0 to `t` through consecutive segments.
    pub fn evolve(&self, state: &TrinaryState, t: f64) -> Result<TrinaryState> {
        self.dims.ensure_matches(&state.dims())?;
        if t < 0.0 {
            return Err(IcqtError::InvalidInput(format!("negative time {t}")));
        }
        let mut v = state.dense().amplitudes().clone();
        let mut remaining = t;
        for (duration, p) in &self.segments {
            if remaining <= 0.0 {
                break;
            }
            let dt = remaining.min(*duration);
            v = p.apply_vec(&v, dt);
            remaining -= dt;
        }
        if remaining > 1e-12 {
            return Err(IcqtError::InvalidInput(format!(
                "time {t} runs past the end of the schedule"
            )));
        }
        Ok(TrinaryState::from_dense_unchecked(self.dims, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_hermitian, random_state, stream_rng};
    use crate::hilbert::{Basis, Operator, StateVector};

    fn dims() -> TrinaryDims {
        TrinaryDims::new(2, 2, 4).unwrap()
    }

    fn random_trinary(dims: TrinaryDims, seed: u64) -> TrinaryState {
        let mut rng = stream_rng(seed, 99);
        TrinaryState::from_dense(dims, random_state(dims.total(), &mut rng)).unwrap()
    }

    #[test]
    fn zero_time_and_zero_hamiltonian_are_identity() {
        let st = random_trinary(dims(), 1);
        let mut rng = stream_rng(1, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        assert!(evolve_full(&h, &st, 0.0).unwrap().max_abs_diff(&st) < 1e-12);
        let z = TrinaryHamiltonian::zero(dims());
        assert!(evolve_full(&z, &st, 3.0).unwrap().max_abs_diff(&st) < 1e-12);
        assert!(evolve_factorized(&z, &st, 3.0).unwrap().max_abs_diff(&st) < 1e-12);
    }

    #[test]
    fn full_evolution_preserves_norm() {
        let st = random_trinary(dims(), 2);
        let mut rng = stream_rng(2, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        let out = evolve_full(&h, &st, 1.0).unwrap();
        assert!((out.dense().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn factorized_matches_full_for_measurable_hamiltonians() {
        let mut rng = stream_rng(3, 0);
        for seed in 0..5 {
            let h = TrinaryHamiltonian::random_measurable(dims(), &mut rng);
            let st = random_trinary(dims(), 10 + seed);
            for t in [0.1, 0.7, 2.0] {
                let a = evolve_factorized(&h, &st, t).unwrap();
                let b = evolve_full(&h, &st, t).unwrap();
                assert!(a.max_abs_diff(&b) <= 1e-9, "seed {seed} t {t}");
            }
        }
        let h = TrinaryHamiltonian::random_measurable_grouped(dims(), 2, &mut rng);
        let st = random_trinary(dims(), 20);
        let a = evolve_factorized(&h, &st, 1.3).unwrap();
        let b = evolve_full(&h, &st, 1.3).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn single_program_state_is_bipartite_evolution() {
        let d = TrinaryDims::new(2, 3, 1).unwrap();
        let mut rng = stream_rng(4, 0);
        let block = random_hermitian(6, &mut rng);
        let h = TrinaryHamiltonian::new(
            d,
            Operator::diagonal(&[Complex64::new(0.4, 0.0)]),
            Basis::computational(1),
            vec![block],
        )
        .unwrap();
        let st = random_trinary(d, 4);
        let a = evolve_factorized(&h, &st, 0.9).unwrap();
        let b = evolve_full(&h, &st, 0.9).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-10);
    }

    #[test]
    fn factorized_refuses_non_measurable() {
        let mut rng = stream_rng(5, 0);
        let h = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        let st = random_trinary(dims(), 5);
        assert!(matches!(
            evolve_factorized(&h, &st, 1.0),
            Err(IcqtError::FactorizationPrecondition { .. })
        ));
        let forced = evolve_forced_factorized(&h, &st, 1.0).unwrap();
        let full = evolve_full(&h, &st, 1.0).unwrap();
        assert!(forced.max_abs_diff(&full) > 1e-6);
    }

    #[test]
    fn forced_equals_exact_when_condition_holds() {
        let mut rng = stream_rng(6, 0);
        let h = TrinaryHamiltonian::random_measurable_grouped(dims(), 2, &mut rng);
        let st = random_trinary(dims(), 6);
        let forced = evolve_forced_factorized(&h, &st, 0.8).unwrap();
        let full = evolve_full(&h, &st, 0.8).unwrap();
        assert!(forced.max_abs_diff(&full) <= 1e-9);
    }

    #[test]
    fn components_never_mix() {
        let mut rng = stream_rng(7, 0);
        let h = TrinaryHamiltonian::random_measurable_grouped(dims(), 2, &mut rng);
        let prop = FactorizedPropagator::new(&h).unwrap();
        let f = prop.components().clone();
        let sa = random_state(4, &mut rng);
        for m in 0..4 {
            let fm = StateVector::from_raw(f.column(m).into_owned());
            let st = TrinaryState::from_dense(dims(), fm.tensor(&sa)).unwrap();
            let out = prop.evolve(&st, 1.7).unwrap();
            let coeffs = f.adjoint()
                * DMatrix::from_fn(4, 4, |r, j| out.dense()[r * 4 + j]);
            for k in 0..4 {
                if k != m {
                    assert!(coeffs.row(k).iter().all(|z| z.norm() < 1e-12));
                }
            }
        }
    }

    #[test]
    fn composition_law() {
        let mut rng = stream_rng(8, 0);
        let h = TrinaryHamiltonian::random_measurable(dims(), &mut rng);
        let st = random_trinary(dims(), 8);
        let (t1, t2) = (0.3, 1.1);
        let stepwise = evolve_factorized(&h, &evolve_factorized(&h, &st, t1).unwrap(), t2).unwrap();
        let direct = evolve_factorized(&h, &st, t1 + t2).unwrap();
        assert!(stepwise.max_abs_diff(&direct) <= 1e-9);
    }

    #[test]
    fn structured_blocks_take_second_level_route() {
        use crate::dynamics::block::ProgrammedBlockStructure;
        use crate::dynamics::hamiltonian::diagonal_in;
        use crate::hilbert::random::random_real_spectrum;
        let mut rng = stream_rng(9, 0);
        let structures: Vec<_> = (0..4)
            .map(|_| {
                let sb = Basis::random(2, &mut rng);
                let hs = diagonal_in(&sb, &random_real_spectrum(2, &mut rng));
                let gens = vec![random_hermitian(2, &mut rng), random_hermitian(2, &mut rng)];
                ProgrammedBlockStructure::new(sb, gens, hs).unwrap()
            })
            .collect();
        let pb = Basis::random(4, &mut rng);
        let hp = diagonal_in(&pb, &random_real_spectrum(4, &mut rng));
        let h = TrinaryHamiltonian::from_structures(dims(), hp, pb, structures).unwrap();
        let st = random_trinary(dims(), 9);
        let a = evolve_factorized(&h, &st, 0.6).unwrap();
        let b = evolve_full(&h, &st, 0.6).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn schedule_segments_compose() {
        let mut rng = stream_rng(10, 0);
        let h1 = TrinaryHamiltonian::random_measurable(dims(), &mut rng);
        let h2 = TrinaryHamiltonian::random_generic(dims(), &mut rng);
        let schedule = Schedule::new(vec![(0.4, h1.clone()), (0.5, h2.clone())]).unwrap();
        let engine = ScheduleEngine::new(&schedule, Route::Auto).unwrap();
        let st = random_trinary(dims(), 10);
        let out = engine.evolve(&st, 0.7).unwrap();
        let expect = evolve_full(&h2, &evolve_full(&h1, &st, 0.4).unwrap(), 0.3).unwrap();
        assert!(out.max_abs_diff(&expect) <= 1e-9);
        assert!(engine.evolve(&st, 1.0).is_err());
        assert!(Schedule::new(vec![]).is_err());
    }
}
