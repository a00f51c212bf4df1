use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use icqt_core::born::{dual_born_report, decision_probabilities};
use icqt_core::dynamics::{
    evolve_factorized, evolve_full, FactorizedPropagator, Propagate, TrinaryHamiltonian,
};
use icqt_core::hilbert::random::{random_state, random_unitary, stream_rng};
use icqt_core::hilbert::{schmidt_decompose, shannon_entropy, Basis, NamedBasis, StateVector};
use icqt_core::icqc::{
    apply_gates, init_state, random_sa_circuit, Capacity, GateKind, GateOp, Qubit,
};
use icqt_core::trinary::{
    apply_programmed, to_schmidt_form, validate_informational_completeness, ProgrammedUnitary,
    TrinaryDims, TrinaryState,
};

fn dims_strategy() -> impl Strategy<Value = TrinaryDims> {
    prop_oneof![
        Just((2, 2, 4)),
        Just((2, 2, 1)),
        Just((2, 3, 3)),
        Just((3, 3, 9)),
        Just((3, 2, 2)),
    ]
    .prop_map(|(s, a, p)| TrinaryDims::new(s, a, p).unwrap())
}

fn random_trinary(dims: TrinaryDims, seed: u64) -> TrinaryState {
    let mut rng = stream_rng(seed, 1);
    TrinaryState::from_dense(dims, random_state(dims.total(), &mut rng)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolutions_preserve_norm(dims in dims_strategy(), seed in any::<u64>(), t in 0.0f64..3.0) {
        let mut rng = stream_rng(seed, 0);
        let h = TrinaryHamiltonian::random_generic(dims, &mut rng);
        let st = random_trinary(dims, seed);
        let out = evolve_full(&h, &st, t).unwrap();
        prop_assert!((out.dense().norm_sqr() - 1.0).abs() <= 1e-10);
        let hm = TrinaryHamiltonian::random_measurable(dims, &mut rng);
        let out = evolve_factorized(&hm, &st, t).unwrap();
        prop_assert!((out.dense().norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn factorized_equals_full(dims in dims_strategy(), seed in any::<u64>(), t in 0.0f64..2.5, grouped in any::<bool>()) {
        let mut rng = stream_rng(seed, 0);
        let h = if grouped {
            TrinaryHamiltonian::random_measurable_grouped(dims, 2, &mut rng)
        } else {
            TrinaryHamiltonian::random_measurable(dims, &mut rng)
        };
        let st = random_trinary(dims, seed);
        let a = evolve_factorized(&h, &st, t).unwrap();
        let b = evolve_full(&h, &st, t).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn composition(dims in dims_strategy(), seed in any::<u64>(), t1 in 0.0f64..1.5, t2 in 0.0f64..1.5) {
        let mut rng = stream_rng(seed, 0);
        let h = TrinaryHamiltonian::random_measurable(dims, &mut rng);
        let st = random_trinary(dims, seed);
        let two = evolve_factorized(&h, &evolve_factorized(&h, &st, t1).unwrap(), t2).unwrap();
        let one = evolve_factorized(&h, &st, t1 + t2).unwrap();
        prop_assert!(two.max_abs_diff(&one) <= 1e-9);
        let two = evolve_full(&h, &evolve_full(&h, &st, t1).unwrap(), t2).unwrap();
        let one = evolve_full(&h, &st, t1 + t2).unwrap();
        prop_assert!(two.max_abs_diff(&one) <= 1e-9);
    }

    #[test]
    fn components_stay_separate(seed in any::<u64>(), m in 0usize..4, t in 0.0f64..3.0) {
        let dims = TrinaryDims::new(2, 2, 4).unwrap();
        let mut rng = stream_rng(seed, 0);
        let h = TrinaryHamiltonian::random_measurable_grouped(dims, 2, &mut rng);
        let prop = FactorizedPropagator::new(&h).unwrap();
        let f = prop.components().clone();
        let sa = random_state(4, &mut rng);
        let fm = StateVector::from_raw(f.column(m).into_owned());
        let st = TrinaryState::from_dense(dims, fm.tensor(&sa)).unwrap();
        let out = prop.evolve(&st, t).unwrap();
        let v = out.dense().amplitudes();
        for k in (0..4).filter(|&k| k != m) {
            let mut weight = 0.0;
            for j in 0..4 {
                let c: Complex64 = (0..4).map(|r| f[(r, k)].conj() * v[r * 4 + j]).sum();
                weight += c.norm_sqr();
            }
            prop_assert!(weight <= 1e-24);
        }
    }

    #[test]
    fn schmidt_round_trip(dl in 1usize..=8, dr in 1usize..=8, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let psi = random_state(dl * dr, &mut rng);
        let sd = schmidt_decompose(&psi, (dl, dr)).unwrap();
        prop_assert!(sd.reconstruct().max_abs_diff(&psi) <= 1e-10);
        prop_assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let s = sd.entropy();
        prop_assert!(s >= 0.0 && s <= (dl.min(dr) as f64).ln() + 1e-9);
    }

    #[test]
    fn local_unitaries_keep_entropy(dl in 1usize..=6, dr in 1usize..=6, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let psi = random_state(dl * dr, &mut rng);
        let u = random_unitary(dl, &mut rng).kron(&random_unitary(dr, &mut rng));
        let moved = u.apply(&psi).unwrap();
        let a = schmidt_decompose(&psi, (dl, dr)).unwrap().entropy();
        let b = schmidt_decompose(&moved, (dl, dr)).unwrap().entropy();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn shannon_matches_program_entanglement(dims in dims_strategy(), seed in any::<u64>()) {
        let st = random_trinary(dims, seed);
        let sf = to_schmidt_form(&st);
        prop_assert!(sf.max_abs_diff(&st) <= 1e-10);
        let h = shannon_entropy(&decision_probabilities(&sf));
        prop_assert!((h - st.program_entropy().unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn born_rows_normalized(dims in dims_strategy(), seed in any::<u64>()) {
        let rep = dual_born_report(&random_trinary(dims, seed)).unwrap();
        prop_assert!(rep.max_row_deviation() <= 1e-10);
        prop_assert!(rep.min_entry() >= -1e-12);
        prop_assert_eq!(rep.decision_probs.len(), dims.programming);
    }

    #[test]
    fn decisions_ignore_shared_sa_unitary(dims in dims_strategy(), seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let st = to_schmidt_form(&random_trinary(dims, seed));
        let u = random_unitary(dims.sa(), &mut rng);
        let pu = ProgrammedUnitary::new(dims, vec![u; dims.programming]).unwrap();
        let moved = to_schmidt_form(&apply_programmed(&pu, &st).unwrap());
        for (a, b) in decision_probabilities(&st).iter().zip(decision_probabilities(&moved)) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn completeness_ignores_branch_order(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        use NamedBasis::*;
        let dims = TrinaryDims::new(2, 2, 4).unwrap();
        let names = [Z, X, Y, Z];
        let bases: Vec<Basis> = perm.iter().map(|&i| Basis::named(names[i], 2)).collect();
        let pu = ProgrammedUnitary::from_bases(dims, &bases).unwrap();
        let rep = validate_informational_completeness(&pu, &StateVector::basis(2, 0)).unwrap();
        prop_assert_eq!(rep.tomographic_rank, 4);
        prop_assert!(rep.complete);
    }

    #[test]
    fn gate_involutions(seed in any::<u64>(), len in 0usize..12) {
        let mut rng = stream_rng(seed, 0);
        let st = apply_gates(&init_state(1, Capacity::default()).unwrap(), &random_sa_circuit(1, len, &mut rng)).unwrap();
        for pair in [
            [GateOp::single(GateKind::H, Qubit::s(0)), GateOp::single(GateKind::H, Qubit::s(0))],
            [GateOp::cnot(Qubit::s(0), Qubit::a(0)), GateOp::cnot(Qubit::s(0), Qubit::a(0))],
            [GateOp::single(GateKind::S, Qubit::p(1)), GateOp::single(GateKind::Sdg, Qubit::p(1))],
        ] {
            let out = apply_gates(&st, &pair).unwrap();
            prop_assert!(out.max_abs_diff(&st) <= 1e-12);
        }
        let out = apply_gates(&st, &random_sa_circuit(1, 10, &mut rng)).unwrap();
        prop_assert!((out.dense().norm_sqr() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn uniform_init_is_flat() {
    let st = init_state(2, Capacity::default()).unwrap();
    let expect = DVector::from_element(256, Complex64::new(1.0 / 16.0, 0.0));
    assert!((st.dense().amplitudes() - expect).camax() < 1e-15);
}
