use sculpt::fock::FockState;
use sculpt::oracle::{oracle_compare, sequences, ExactStep, SubsetState};
use sculpt::protocols::*;
use sculpt::slater::{slater_spectrum, DEFAULT_RANK_TOL};

fn run(p: &Protocol, target: Option<&FockState>) -> ProtocolResult {
    run_protocol(&FockState::sym_state(p.n_modes()), p, target).unwrap()
}

fn assert_matches_oracle(p: &Protocol, exact: &[ExactStep]) {
    let oracle = SubsetState::full(p.n_modes()).run(exact);
    let out = run(p, None);
    if let Err(e) = oracle_compare(&oracle, &out.final_state, 1e-10) {
        panic!("{:?} n={} m={:?}: {e}", p.family(), p.n(), p.m());
    }
}

#[test]
fn bipartite_agrees_with_oracle() {
    for n in 2..=6 {
        assert_matches_oracle(&bipartite_sequence(n).unwrap(), &sequences::bipartite(n));
    }
}

#[test]
fn ghz_agrees_with_oracle() {
    for n in 2..=6 {
        assert_matches_oracle(&ghz_sequence(n).unwrap(), &sequences::ghz(n));
    }
}

#[test]
fn w_and_dicke_agree_with_oracle() {
    for n in 2..=4 {
        assert_matches_oracle(&w_stage1_sequence(n).unwrap(), &sequences::w_stage1(n));
        for m in 1..n {
            assert_matches_oracle(&dicke_sequence(n, m).unwrap(), &sequences::dicke(n, m));
        }
    }
}

#[test]
fn bipartite_reaches_minimal_purity() {
    for n in 2..=6 {
        let out = run(&bipartite_sequence(n).unwrap(), Some(&target_phi(n).unwrap()));
        assert!((out.fidelity_to_target.unwrap() - 1.0).abs() < 1e-10);
        let spec = slater_spectrum(&out.final_state).unwrap();
        assert!((spec.purity() - 1.0 / (2 * n) as f64).abs() < 1e-10);
        assert_eq!(spec.rank(DEFAULT_RANK_TOL), 2 * n);
    }
}

#[test]
fn ghz_output_has_equal_plus_components() {
    for n in 2..=5 {
        let out = run(&ghz_sequence(n).unwrap(), None);
        assert!(is_dual_rail(&out.final_state, n));
        let plus = target_ghz_with_phase(n, GhzPhase::Plus).unwrap();
        let f = sculpt::fidelity(&plus, &out.final_state).unwrap();
        assert!((f - 1.0).abs() < 1e-10, "n = {n}: {f}");
        // the alternating-sign target coincides for odd n and is orthogonal for even n
        let alt = sculpt::fidelity(&target_ghz(n).unwrap(), &out.final_state).unwrap();
        let expected = if n % 2 == 1 { 1.0 } else { 0.0 };
        assert!((alt - expected).abs() < 1e-10, "n = {n}: {alt}");
    }
}

#[test]
fn stage1_output_carries_minus_on_odd_pairs() {
    for n in 2..=4 {
        let out = run(&w_stage1_sequence(n).unwrap(), None);
        let signed = sculpt::fidelity(&target_stage1_signed(n).unwrap(), &out.final_state).unwrap();
        assert!((signed - 1.0).abs() < 1e-10);
        let plain = sculpt::fidelity(&target_stage1(n).unwrap(), &out.final_state).unwrap();
        assert!(plain < 1e-10, "n = {n}: {plain}");
        assert!(out.per_step_weights.iter().all(|&w| w > 0.0));
    }
}

#[test]
fn w_output_is_flipped_w() {
    for n in 2..=4 {
        let flipped = target_w(n, true).unwrap();
        let out = run(&w_sequence(n).unwrap(), Some(&flipped));
        assert!((out.fidelity_to_target.unwrap() - 1.0).abs() < 1e-10);
        let reduced = out.final_state.restrict_modes(2 * n).unwrap();
        assert!(is_dual_rail(&reduced, n));
        let swapped = flip_qubits(&reduced).unwrap();
        let f = sculpt::fidelity(&target_w(n, false).unwrap(), &swapped).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }
}

#[test]
fn dicke_four_two_is_uniform_over_balanced_words() {
    let out = run(&dicke_sequence(4, 2).unwrap(), Some(&target_dicke(4, 2).unwrap()));
    assert!((out.fidelity_to_target.unwrap() - 1.0).abs() < 1e-10);
    let reduced = out.final_state.restrict_modes(8).unwrap();
    assert_eq!(reduced.len(), 6);
    let first = reduced.terms().next().unwrap().1 / reduced.terms().next().unwrap().1.norm();
    for (occ, amp) in reduced.terms() {
        assert!((amp - first * (1.0 / 6f64.sqrt())).norm() < 1e-10, "{occ}");
        let odd = (0..4).filter(|k| occ.as_slice()[2 * k] == 1).count();
        assert_eq!(odd, 2);
    }
}

#[test]
fn success_weight_is_product_and_reproducible() {
    let p = ghz_sequence(4).unwrap();
    let a = run(&p, None);
    let b = run(&p, None);
    assert_eq!(a.per_step_weights, b.per_step_weights);
    let product: f64 = a.per_step_weights.iter().product();
    assert_eq!(a.success_weight, product);

    let bip = run(&bipartite_sequence(2).unwrap(), None);
    assert!((bip.success_weight - 0.5).abs() < 1e-12);
}

/// Relabels qubit pairs: pair `k` goes to `perm[k]` (and its copy pair
/// `qubits + k` to `qubits + perm[k]` when `copies` is set).
fn pair_permutation(perm: &[usize], copies: bool) -> Vec<usize> {
    let q = perm.len();
    let pairs: Vec<usize> = if copies {
        perm.iter().copied().chain(perm.iter().map(|p| p + q)).collect()
    } else {
        perm.to_vec()
    };
    (0..2 * pairs.len()).map(|i| 2 * pairs[i / 2] + i % 2).collect()
}

#[test]
fn relabeling_qubits_leaves_results_unchanged() {
    let perm = [2, 0, 3, 1];
    let cases = [
        (ghz_sequence(4).unwrap(), target_ghz_with_phase(4, GhzPhase::Plus).unwrap(), false),
        (w_sequence(4).unwrap(), target_w(4, true).unwrap(), true),
    ];
    for (p, target, copies) in cases {
        let base = run(&p, Some(&target));
        let modes = pair_permutation(&perm, copies);
        let target_perm: Vec<usize> = modes[..target.modes()].to_vec();
        let moved = run(
            &p.relabeled(&modes).unwrap(),
            Some(&target.permute_modes(&target_perm).unwrap()),
        );
        assert!((base.fidelity_to_target.unwrap() - moved.fidelity_to_target.unwrap()).abs() < 1e-12);
        for (x, y) in base.per_step_weights.iter().zip(&moved.per_step_weights) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn ghz_certificate_is_exact() {
    for n in 2..=5 {
        let cert = sculpt::oracle::ghz_cancellation(n);
        assert!(cert.mixed_all_zero, "n = {n}");
        assert!(cert.mixed_terms > 0);
        assert_eq!(cert.odd_coefficient, cert.even_coefficient);
        assert!(!cert.odd_coefficient.is_zero());
    }
}

#[test]
fn custom_protocol_file_is_normalized_on_load() {
    let json = r#"{"family":"custom","n":0,"m":null,"steps":[[{"re":1,"im":0},{"re":1,"im":0}]]}"#;
    let p = Protocol::from_json(json).unwrap();
    assert_eq!(p.family(), Family::Custom);
    assert!(p.steps()[0].is_normalized());
    let out = run(&p, None);
    assert_eq!(out.final_state.particles(), 1);
    assert!((out.success_weight - 1.0).abs() < 1e-12);

    let built_in = r#"{"family":"ghz","n":2,"m":null,"steps":[[{"re":1,"im":0},{"re":1,"im":0}]]}"#;
    assert!(Protocol::from_json(built_in).is_err());
}

#[test]
fn sculpt_reports_on_target_modes() {
    let mut spec = SculptSpec::new(Family::W, 3);
    let plain = sculpt(&spec).unwrap();
    assert_eq!(plain.output.modes(), 6);
    assert!((plain.fidelity - 1.0).abs() < 1e-10);
    spec.flipped = true;
    let flipped = sculpt(&spec).unwrap();
    assert!((flipped.fidelity - 1.0).abs() < 1e-10);
    assert!(sculpt::fidelity(&plain.output, &flipped.output).unwrap() < 1e-10);

    let mut ghz = SculptSpec::new(Family::Ghz, 2);
    assert!(sculpt(&ghz).unwrap().fidelity < 1e-10);
    ghz.phase = GhzPhase::Plus;
    assert!((sculpt(&ghz).unwrap().fidelity - 1.0).abs() < 1e-10);

    let mut dicke = SculptSpec::new(Family::Dicke, 4);
    assert!(sculpt(&dicke).is_err());
    dicke.m = Some(2);
    assert!((sculpt(&dicke).unwrap().fidelity - 1.0).abs() < 1e-10);
    assert!(sculpt(&SculptSpec::new(Family::Custom, 2)).is_err());
}
