use super::*;
use crate::fock::{fock_state, ladder_matrix, number_operator, thermal_state, thermal_weights, Tensor};
use crate::linalg::{cr, kron, max_abs_diff};
use crate::spectra::{g, von_neumann_entropy};

fn cfg() -> GlobalConfig {
    GlobalConfig::default()
}

fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

fn diag_state(w: &[f64]) -> DensityMatrix {
    DensityMatrix::from_diagonal(FockSpace::single(w.len()).unwrap(), w, &cfg()).unwrap()
}

#[test]
fn attenuator_identity_and_vacuum() {
    let id = kraus_attenuator_ql(1.0, Cutoffs::square(5), &cfg()).unwrap();
    assert_eq!(id.n_kraus(), 1);
    assert!(max_abs_diff(&id.kraus_matrices()[0], &linalg::identity(5)) < 1e-15);
    let ch = kraus_attenuator_ql(0.37, Cutoffs::square(6), &cfg()).unwrap();
    assert!(ch.leakage() < 1e-12);
    let vac = DensityMatrix::vacuum(&FockSpace::single(6).unwrap());
    let out = ch.apply(&vac, &cfg()).unwrap();
    assert!(max_abs_diff(out.value.matrix(), vac.matrix()) < 1e-15);
}

#[test]
fn attenuator_on_single_photon() {
    let lambda = 0.3;
    let ch = kraus_attenuator_ql(lambda, Cutoffs::square(3), &cfg()).unwrap();
    let out = ch.apply(&fock_state(1, &FockSpace::single(3).unwrap()).unwrap(), &cfg()).unwrap().value;
    let d = out.diagonal();
    assert!((d[0] - (1.0 - lambda)).abs() < 1e-15);
    assert!((d[1] - lambda).abs() < 1e-15);
    assert!(out.max_off_diagonal() < 1e-15);
}

#[test]
fn beam_splitter_unitary_properties() {
    let s = FockSpace::new(vec![5, 5]).unwrap();
    let id = beam_splitter_unitary(1.0, &s).unwrap();
    assert!(max_abs_diff(id.matrix(), &linalg::identity(25)) < 1e-14);
    let lambda = 0.35;
    let u = beam_splitter_unitary(lambda, &s).unwrap();
    let u = u.matrix();
    // conserves the total photon number
    for r in 0..25 {
        for c in 0..25 {
            if (r / 5 + r % 5) != (c / 5 + c % 5) {
                assert_eq!(u[(r, c)], cr(0.0));
            }
        }
    }
    assert!(max_abs_diff(&(u.adjoint() * u), &linalg::identity(25)) < 1e-12);
    let a = kron(&ladder_matrix(5), &linalg::identity(5));
    let b = kron(&linalg::identity(5), &ladder_matrix(5));
    let lhs = u.adjoint() * &a * u;
    let rhs = a.scale(lambda.sqrt()) + b.scale((1.0 - lambda).sqrt());
    // compare on total photon number <= 3, where no truncated sector enters
    for r in 0..25 {
        for c in 0..25 {
            if r / 5 + r % 5 <= 3 && c / 5 + c % 5 <= 3 {
                assert!((lhs[(r, c)] - rhs[(r, c)]).norm() < 1e-12);
            }
        }
    }
    assert!(beam_splitter_unitary(-0.1, &s).is_err());
}

#[test]
fn squeezer_conjugation() {
    let kappa = 1.3;
    let l = 40;
    let s = FockSpace::new(vec![l, l]).unwrap();
    let u = squeezer_unitary(kappa, &s, (4, 4)).unwrap();
    assert!(u.leakage < 1e-8, "{}", u.leakage);
    let u = u.value.matrix().clone();
    let a = kron(&ladder_matrix(l), &linalg::identity(l));
    let b = kron(&linalg::identity(l), &ladder_matrix(l));
    let rhs = a.scale(kappa.sqrt()) + b.adjoint().scale((kappa - 1.0).sqrt());
    for c in 0..l * l {
        if c / l >= 4 || c % l >= 4 {
            continue;
        }
        let col = u.adjoint() * (&a * u.column(c));
        for r in 0..l * l {
            if r / l < 4 && r % l < 4 {
                assert!((col[r] - rhs[(r, c)]).norm() < 1e-8);
            }
        }
    }
}

#[test]
fn attenuator_kraus_matches_dilation() {
    for &lambda in &[0.3, 0.7] {
        let d = 6;
        let ch = kraus_attenuator_ql(lambda, Cutoffs::square(d), &cfg()).unwrap();
        let dil = DilationRep::attenuator(lambda, d, DensityMatrix::vacuum(&FockSpace::single(1).unwrap())).unwrap();
        for i in 0..d {
            for j in 0..d {
                let x = unit(d, i, j);
                let got = ch.apply_operator(&x).unwrap();
                let want = dil.apply_operator(&x, d);
                assert!(max_abs_diff(&got, &want) < 1e-12, "lambda={lambda} i={i} j={j}");
            }
        }
    }
}

#[test]
fn amplifier_kraus_matches_dilation() {
    let kappa = 1.2;
    let d = 5;
    let d_out = 15;
    let ch = kraus_amplifier_ql(kappa, Cutoffs::new(d, d_out), &cfg()).unwrap();
    let dil = DilationRep::amplifier(kappa, d, DensityMatrix::vacuum(&FockSpace::single(1).unwrap()), 4).unwrap();
    for i in 0..d {
        for j in 0..d {
            let x = unit(d, i, j);
            let got = ch.apply_operator(&x).unwrap();
            let want = dil.apply_operator(&x, d_out);
            assert!(max_abs_diff(&got, &want) < 1e-8, "i={i} j={j}: {}", max_abs_diff(&got, &want));
        }
    }
}

#[test]
fn amplifier_of_vacuum_is_thermal() {
    let kappa = 1.4;
    let ch = ChannelRep::with_auto_output(ChannelKind::AmplifierQl { kappa }, Cutoffs::square(4), &cfg()).unwrap();
    let out = ch.apply(&DensityMatrix::vacuum(&FockSpace::single(4).unwrap()), &cfg()).unwrap();
    let want = thermal_weights(kappa - 1.0, ch.dim_out());
    for (a, b) in out.value.diagonal().iter().zip(&want) {
        assert!((a - b).abs() < 1e-6);
    }
    let id = kraus_amplifier_ql(1.0, Cutoffs::square(4), &cfg()).unwrap();
    assert_eq!(id.n_kraus(), 1);
    assert!(max_abs_diff(&id.kraus_matrices()[0], &linalg::identity(4)) < 1e-15);
}

#[test]
fn thermal_channel_outputs_thermal_states() {
    let cases = [(ThermalKind::Attenuator, 0.5, 0.7, 1.2), (ThermalKind::Amplifier, 1.3, 0.5, 0.8)];
    for (kind, param, energy, e_in) in cases {
        let d_in = 60;
        let ch = thermal_channel(kind, param, energy, Cutoffs::new(d_in, 110), &cfg()).unwrap();
        let rho = thermal_state(e_in, &FockSpace::single(d_in).unwrap(), &cfg()).unwrap().value;
        let out = ch.apply(&rho, &cfg()).unwrap();
        let mean_out = match kind {
            ThermalKind::Attenuator => param * e_in + (1.0 - param) * energy,
            ThermalKind::Amplifier => param * e_in + (param - 1.0) * (energy + 1.0),
        };
        let s = von_neumann_entropy(&out.value, &cfg()).unwrap();
        assert!((s - g(mean_out)).abs() < 1e-6, "{kind:?}: {s} vs {}", g(mean_out));
    }
}

#[test]
fn thermal_energy_zero_is_quantum_limited() {
    let a = thermal_channel(ThermalKind::Attenuator, 0.4, 0.0, Cutoffs::square(6), &cfg()).unwrap();
    let b = kraus_attenuator_ql(0.4, Cutoffs::square(6), &cfg()).unwrap();
    let rho = diag_state(&[0.1, 0.2, 0.3, 0.15, 0.15, 0.1]);
    let x = a.apply(&rho, &cfg()).unwrap().value;
    let y = b.apply(&rho, &cfg()).unwrap().value;
    assert!(max_abs_diff(x.matrix(), y.matrix()) < 1e-14);
}

#[test]
fn beam_splitter_reduction_moments() {
    let (ea, eb, lambda) = (0.4, 0.9, 0.35);
    let d = 40;
    let s = FockSpace::single(d).unwrap();
    let rho = thermal_state(ea, &s, &cfg()).unwrap().value.tensor(&thermal_state(eb, &s, &cfg()).unwrap().value);
    let out = apply_b(&rho, lambda, None, &cfg()).unwrap();
    let n = number_operator(out.value.space());
    let mean = crate::fock::expectation(&n, &out.value, &cfg()).unwrap();
    assert!((mean - (lambda * ea + (1.0 - lambda) * eb)).abs() < 1e-6);
    let vac = DensityMatrix::vacuum(&FockSpace::new(vec![3, 3]).unwrap());
    let out = apply_b(&vac, 0.5, None, &cfg()).unwrap().value;
    assert!((out.diagonal()[0] - 1.0).abs() < 1e-14);
}

#[test]
fn beam_splitter_at_one_is_marginal() {
    let s = FockSpace::single(3).unwrap();
    let ra = diag_state(&[0.5, 0.3, 0.2]);
    let rb = diag_state(&[0.1, 0.6, 0.3]);
    let out = apply_b(&ra.tensor(&rb), 1.0, Some(3), &cfg()).unwrap().value;
    assert!(max_abs_diff(out.matrix(), ra.matrix()) < 1e-14);
    let _ = s;
}

#[test]
fn dual_pairing_and_amplifier_dual() {
    let kappa = 1.25;
    let (d_in, d_out) = (5, 12);
    let amp = kraus_amplifier_ql(kappa, Cutoffs::new(d_in, d_out), &cfg()).unwrap();
    let dual = amp.dual();
    assert!(!dual.is_trace_preserving());
    let a = CMat::from_fn(d_in, d_in, |i, j| crate::linalg::c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.3));
    let b = CMat::from_fn(d_out, d_out, |i, j| crate::linalg::c((i * j) as f64 * 0.05, (i + j) as f64 * 0.01));
    let lhs = linalg::trace(&(&b * amp.apply_operator(&a).unwrap()));
    let rhs = linalg::trace(&(dual.apply_operator(&b).unwrap() * &a));
    assert!((lhs - rhs).norm() < 1e-9);
    // A_kappa^dagger = (1/kappa) E_{1/kappa} on operators supported on the first d_in levels
    let att = kraus_attenuator_ql(1.0 / kappa, Cutoffs::new(d_out, d_out), &cfg()).unwrap();
    let mut y = CMat::zeros(d_out, d_out);
    y.view_mut((0, 0), (d_in, d_in)).copy_from(&a);
    let via_dual = dual.apply_operator(&y).unwrap();
    let via_att = att.apply_operator(&y).unwrap().scale(1.0 / kappa);
    assert!(max_abs_diff(&via_dual, &via_att.view((0, 0), (d_in, d_in)).into_owned()) < 1e-12);
    assert!(matches!(dual.dual().kind(), ChannelKind::AmplifierQl { .. }));
}

#[test]
fn complementary_shares_spectrum_on_pure_inputs() {
    let d = 6;
    let psi: Vec<_> = (0..d).map(|k| crate::linalg::c(1.0 / (k as f64 + 1.0), 0.2 * k as f64)).collect();
    let rho = DensityMatrix::pure(FockSpace::single(d).unwrap(), &psi).unwrap();
    let att = kraus_attenuator_ql(0.6, Cutoffs::square(d), &cfg()).unwrap();
    let comp = complementary_ql(&att, &cfg()).unwrap();
    let s1 = crate::spectra::spectrum(&att.apply(&rho, &cfg()).unwrap().value, &cfg()).unwrap();
    let s2 = crate::spectra::spectrum(&comp.apply(&rho, &cfg()).unwrap().value, &cfg()).unwrap();
    for (a, b) in s1.values().iter().zip(s2.values()) {
        assert!((a - b).abs() < 1e-10);
    }
    let thermal = thermal_channel(ThermalKind::Attenuator, 0.5, 0.2, Cutoffs::new(4, 12), &cfg()).unwrap();
    assert!(matches!(complementary_ql(&thermal, &cfg()), Err(Error::Unsupported(_))));
    let full = kraus_attenuator_ql(1.0, Cutoffs::square(d), &cfg()).unwrap();
    let comp = complementary_ql(&full, &cfg()).unwrap();
    let out = comp.apply(&rho, &cfg()).unwrap().value;
    assert!((out.diagonal()[0] - 1.0).abs() < 1e-14);
}

#[test]
fn complementary_matches_dilation() {
    let d = 5;
    let dil = DilationRep::attenuator(0.45, d, DensityMatrix::vacuum(&FockSpace::single(1).unwrap())).unwrap().complementary();
    let comp = complementary_ql(&kraus_attenuator_ql(0.45, Cutoffs::square(d), &cfg()).unwrap(), &cfg()).unwrap();
    for i in 0..d {
        for j in 0..d {
            let x = unit(d, i, j);
            assert!(max_abs_diff(&comp.apply_operator(&x).unwrap(), &dil.apply_operator(&x, d)) < 1e-12);
        }
    }
    let kappa = 1.2;
    let (d_in, d_env) = (4, 14);
    let amp = kraus_amplifier_ql(kappa, Cutoffs::new(d_in, d_env), &cfg()).unwrap();
    let comp = complementary_ql(&amp, &cfg()).unwrap();
    let dil = DilationRep::amplifier(kappa, d_in, DensityMatrix::vacuum(&FockSpace::single(1).unwrap()), 5).unwrap().complementary();
    for i in 0..d_in {
        for j in 0..d_in {
            let x = unit(d_in, i, j);
            let diff = max_abs_diff(&comp.apply_operator(&x).unwrap(), &dil.apply_operator(&x, d_env));
            assert!(diff < 1e-8, "i={i} j={j} diff={diff}");
        }
    }
}

#[test]
fn heat_identity_and_mean_shift() {
    let id = heat_semigroup(0.0, 15, Cutoffs::square(6), &cfg()).unwrap();
    assert_eq!(id.n_kraus(), 1);
    let t = 0.15;
    let ch = heat_semigroup(t, 15, Cutoffs::new(6, 24), &cfg()).unwrap();
    let rho = diag_state(&[0.3, 0.3, 0.2, 0.1, 0.05, 0.05]);
    let out = ch.apply(&rho, &cfg()).unwrap();
    let n_in = crate::fock::expectation(&number_operator(rho.space()), &rho, &cfg()).unwrap();
    let n_out = crate::fock::expectation(&number_operator(out.value.space()), &out.value, &cfg()).unwrap();
    assert!((n_out - n_in - t).abs() < 1e-4, "{}", n_out - n_in);
}

#[test]
fn tensor_power_matches_kron_of_channels() {
    let ch = kraus_attenuator_ql(0.6, Cutoffs::square(3), &cfg()).unwrap();
    let ra = diag_state(&[0.5, 0.3, 0.2]);
    let rb = diag_state(&[0.2, 0.2, 0.6]);
    let joint = ra.tensor(&rb);
    let out = ch.apply_tensor_power(&joint, &cfg()).unwrap().value;
    let want = ch.apply(&ra, &cfg()).unwrap().value.tensor(&ch.apply(&rb, &cfg()).unwrap().value);
    assert!(max_abs_diff(out.matrix(), want.matrix()) < 1e-14);
}

#[test]
fn spec_roundtrip() {
    let ch = thermal_channel(ThermalKind::Amplifier, 1.2, 0.3, Cutoffs::new(4, 10).with_guard(3), &cfg()).unwrap();
    let text = serde_json::to_string(&ch.spec()).unwrap();
    let back = ChannelRep::from_spec(&serde_json::from_str(&text).unwrap(), &cfg()).unwrap();
    assert_eq!(back.spec(), ch.spec());
    assert!(max_abs_diff(&back.kraus_matrices()[3], &ch.kraus_matrices()[3]) == 0.0);
    let dual = ChannelSpec { kind: ChannelKind::Dual { inner: Box::new(ChannelKind::AttenuatorQl { lambda: 0.5 }) }, cutoffs: Cutoffs::square(3) };
    let text = serde_json::to_string(&dual).unwrap();
    assert!(text.contains("\"type\":\"dual\""));
    assert!(ChannelRep::from_spec(&dual, &cfg()).is_ok());
}

#[test]
fn parameter_domains() {
    assert!(kraus_attenuator_ql(1.5, Cutoffs::square(3), &cfg()).is_err());
    assert!(kraus_amplifier_ql(0.5, Cutoffs::square(3), &cfg()).is_err());
    assert!(thermal_channel(ThermalKind::Attenuator, 0.5, -1.0, Cutoffs::square(3), &cfg()).is_err());
    assert!(heat_semigroup(-0.1, 5, Cutoffs::square(3), &cfg()).is_err());
}

#[test]
fn zero_cmi_blocks_have_zero_cmi() {
    let c = cfg();
    let two = FockSpace::new(vec![2, 2]).unwrap();
    let bell = DensityMatrix::pure(two.clone(), &[cr(1.0), cr(0.0), cr(0.0), cr(1.0)]).unwrap();
    let mixed = DensityMatrix::from_diagonal(two, &[0.1, 0.2, 0.3, 0.4], &c).unwrap();
    let blocks = vec![
        ZeroCmiBlock { weight: 0.4, rho_a: bell.clone(), rho_b: mixed.clone() },
        ZeroCmiBlock { weight: 0.6, rho_a: mixed.clone(), rho_b: bell.clone() },
    ];
    let state = zero_cmi_state(&blocks, &c).unwrap();
    assert_eq!(state.space().mode_dims(), &[2, 2, 8]);
    let cmi = crate::spectra::cond_mutual_information(&state, &[0], &[1], &[2], &c).unwrap();
    assert!(cmi.abs() < 1e-9, "{cmi}");
    let bad = vec![ZeroCmiBlock { weight: 0.5, rho_a: bell.clone(), rho_b: mixed.clone() }];
    assert!(zero_cmi_state(&bad, &c).is_err());
    let single = ZeroCmiBlock { weight: 1.0, rho_a: diag_state(&[0.5, 0.5]), rho_b: diag_state(&[0.9, 0.1]) };
    let state = zero_cmi_state(&[single], &c).unwrap();
    assert_eq!(state.space().mode_dims(), &[2, 2, 1]);
    // an entangled A-B state (not built from blocks) has positive CMI
    let ent = DensityMatrix::pure(FockSpace::new(vec![2, 2, 1]).unwrap(), &[cr(1.0), cr(0.0), cr(0.0), cr(1.0)]).unwrap();
    assert!(crate::spectra::cond_mutual_information(&ent, &[0], &[1], &[2], &c).unwrap() > 1.0);
}

