use gaussopt::channels::{kraus_amplifier_ql, kraus_attenuator_ql, thermal_channel, DilationRep, ThermalKind};
use gaussopt::fock::thermal_state;
use gaussopt::harness::sampling::{random_distribution, random_state, trial_rng};
use gaussopt::linalg::{self, max_abs_diff, CMat};
use gaussopt::majorization::{decreasing_rearrangement, majorizes_weights, passive_rearrangement};
use gaussopt::spectra::{g, g_inv, shannon_entropy, spectrum};
use gaussopt::thinning::thin;
use gaussopt::{Cutoffs, DensityMatrix, FockSpace, GlobalConfig};
use proptest::prelude::*;

fn cfg() -> GlobalConfig {
    GlobalConfig::default()
}

fn state(dim: usize, rank: Option<usize>, seed: u64) -> DensityMatrix {
    random_state(&FockSpace::single(dim).unwrap(), rank, &mut trial_rng(seed, 0))
}

fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = linalg::cr(1.0);
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn g_is_increasing_concave_and_inverted(e in 0.0f64..50.0, de in 1e-3f64..5.0) {
        prop_assert!(g(e + de) > g(e));
        prop_assert!(g(e + de) - g(e) <= de * (1.0 + 1.0 / e).ln() + 1e-12);
        prop_assert!((g_inv(g(e)).unwrap() - e).abs() <= 1e-9 * (1.0 + e));
    }

    #[test]
    fn spectra_are_probability_vectors(dim in 2usize..12, rank in 1usize..12, seed: u64) {
        let rank = rank.min(dim);
        let sp = spectrum(&state(dim, Some(rank), seed), &cfg()).unwrap();
        let v = sp.values();
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(v.iter().all(|&x| x >= 0.0));
        prop_assert!(v.windows(2).all(|w| w[0] >= w[1]));
        let s = sp.entropy();
        prop_assert!(s >= -1e-12 && s <= (rank as f64).ln() + 1e-10);
        // Schatten norms decrease in p
        prop_assert!(sp.norm(1.5) >= sp.norm(2.0) - 1e-12 && sp.norm(2.0) >= sp.norm(4.0) - 1e-12);
    }

    #[test]
    fn state_json_round_trips(dim in 2usize..7, seed: u64) {
        let rho = state(dim, None, seed);
        let back = DensityMatrix::from_json(&rho.to_json(), &cfg()).unwrap();
        prop_assert_eq!(rho.matrix(), back.matrix());
    }

    #[test]
    fn attenuator_preserves_trace_and_positivity(lambda in 0.0f64..=1.0, dim in 2usize..10, seed: u64) {
        let ch = kraus_attenuator_ql(lambda, Cutoffs::square(dim), &cfg()).unwrap();
        let out = ch.apply(&state(dim, None, seed), &cfg()).unwrap();
        prop_assert!(out.leakage < 1e-12);
        let sp = spectrum(&out.value, &cfg()).unwrap();
        prop_assert!(sp.values().iter().all(|&x| x > -1e-10));
    }

    #[test]
    fn attenuator_kraus_agrees_with_its_dilation(lambda in 0.05f64..0.95, dim in 2usize..7) {
        let ch = kraus_attenuator_ql(lambda, Cutoffs::square(dim), &cfg()).unwrap();
        let vac = DensityMatrix::vacuum(&FockSpace::single(1).unwrap());
        let dil = DilationRep::attenuator(lambda, dim, vac).unwrap();
        for i in 0..dim {
            for j in 0..dim {
                let x = unit(dim, i, j);
                prop_assert!(max_abs_diff(&ch.apply_operator(&x).unwrap(), &dil.apply_operator(&x, dim)) < 1e-10);
            }
        }
    }

    #[test]
    fn vacuum_output_minimizes_entropy(lambda in 0.05f64..0.95, dim in 2usize..9, seed: u64) {
        let ch = kraus_attenuator_ql(lambda, Cutoffs::square(dim), &cfg()).unwrap();
        let vac = DensityMatrix::vacuum(&FockSpace::single(dim).unwrap());
        let s_vac = spectrum(&ch.apply(&vac, &cfg()).unwrap().value, &cfg()).unwrap().entropy();
        let s = spectrum(&ch.apply(&state(dim, Some(1), seed), &cfg()).unwrap().value, &cfg()).unwrap().entropy();
        prop_assert!(s >= s_vac - 1e-9);
    }

    #[test]
    fn thermal_attenuator_output_has_the_closed_form_entropy(lambda in 0.1f64..0.9, e in 0.0f64..1.5, e_in in 0.0f64..1.5) {
        let cfg = GlobalConfig::default().with_leakage_max(1e-9);
        let d = gaussopt::fock::thermal_required_dim(e_in.max(e), 1e-13).max(2) + 10;
        let ch = thermal_channel(ThermalKind::Attenuator, lambda, e, Cutoffs::square(d), &cfg).unwrap();
        let omega = thermal_state(e_in, &FockSpace::single(d).unwrap(), &cfg).unwrap().value;
        let s = spectrum(&ch.apply(&omega, &cfg).unwrap().value, &cfg).unwrap().entropy();
        prop_assert!((s - g(lambda * e_in + (1.0 - lambda) * e)).abs() < 1e-7);
    }

    #[test]
    fn dual_pairing_holds(kappa in 1.0f64..1.6, seed: u64) {
        let (d_in, d_out) = (4, 14);
        let amp = kraus_amplifier_ql(kappa, Cutoffs::new(d_in, d_out), &cfg()).unwrap();
        let a = state(d_in, None, seed).matrix().clone();
        let b = state(d_out, None, seed ^ 1).matrix().clone();
        let lhs = linalg::trace(&(&b * amp.apply_operator(&a).unwrap()));
        let rhs = linalg::trace(&(amp.dual().apply_operator(&b).unwrap() * &a));
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn majorization_is_a_preorder(len in 1usize..12, seed: u64) {
        let mut rng = trial_rng(seed, 0);
        let [a, b, c] = [0, 1, 2].map(|_| random_distribution(len, &mut rng));
        let (a, b, c) = (a.weights(), b.weights(), c.weights());
        prop_assert!(majorizes_weights(a, a, 1e-12).unwrap().holds);
        let ab = majorizes_weights(a, b, 1e-12).unwrap().holds;
        let bc = majorizes_weights(b, c, 1e-12).unwrap().holds;
        if ab && bc {
            prop_assert!(majorizes_weights(a, c, 1e-9).unwrap().holds);
        }
        // the point mass majorizes and the uniform vector is majorized by everything
        let mut point = vec![0.0; len];
        point[0] = 1.0;
        let uniform = vec![1.0 / len as f64; len];
        prop_assert!(majorizes_weights(&point, a, 1e-12).unwrap().holds);
        prop_assert!(majorizes_weights(a, &uniform, 1e-12).unwrap().holds);
    }

    #[test]
    fn majorization_orders_entropy(len in 2usize..12, seed: u64) {
        let mut rng = trial_rng(seed, 0);
        let a = random_distribution(len, &mut rng);
        let b = random_distribution(len, &mut rng);
        if majorizes_weights(a.weights(), b.weights(), 1e-12).unwrap().holds {
            prop_assert!(shannon_entropy(&a) <= shannon_entropy(&b) + 1e-12);
        }
    }

    #[test]
    fn passive_rearrangement_keeps_spectrum_and_lowers_energy(dim in 2usize..9, seed: u64) {
        let rho = state(dim, None, seed);
        let passive = passive_rearrangement(&rho, &cfg()).unwrap();
        let (s1, s2) = (spectrum(&rho, &cfg()).unwrap(), spectrum(&passive, &cfg()).unwrap());
        for (x, y) in s1.values().iter().zip(s2.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let energy = |r: &DensityMatrix| (0..dim).map(|n| n as f64 * r.matrix()[(n, n)].re).sum::<f64>();
        prop_assert!(energy(&passive) <= energy(&rho) + 1e-10);
    }

    #[test]
    fn thinning_is_a_mass_preserving_semigroup(len in 1usize..30, l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0, seed: u64) {
        let p = random_distribution(len, &mut trial_rng(seed, 0));
        let once = thin(&thin(&p, l1).unwrap(), l2).unwrap();
        let direct = thin(&p, l1 * l2).unwrap();
        for (x, y) in once.weights().iter().zip(direct.weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((direct.mass() - 1.0).abs() < 1e-12);
        prop_assert!((direct.mean() - l1 * l2 * p.mean()).abs() < 1e-10 * (1.0 + p.mean()));
    }

    #[test]
    fn thinning_a_decreasing_vector_majorizes(len in 1usize..25, lambda in 0.0f64..=1.0, seed: u64) {
        let p = random_distribution(len, &mut trial_rng(seed, 0));
        let down = decreasing_rearrangement(&p);
        let v = majorizes_weights(thin(&down, lambda).unwrap().weights(), thin(&p, lambda).unwrap().weights(), 1e-9).unwrap();
        prop_assert!(v.holds, "gap {}", v.worst_partial_sum_gap);
    }
}
