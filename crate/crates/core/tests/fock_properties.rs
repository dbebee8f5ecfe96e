use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sculpt::fock::{inner_product, FockState, ModeSuperposition, Statistics};
use sculpt::oracle::{oracle_compare, Cyclotomic, SubsetState};
use sculpt::Error;

fn amp() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn superposition(modes: usize) -> impl Strategy<Value = ModeSuperposition> {
    prop::collection::vec(amp(), modes)
        .prop_filter("nonzero", |c| c.iter().any(|x| x.norm() > 1e-3))
        .prop_map(|c| ModeSuperposition::new(c).unwrap())
}

/// Random bosonic state: up to 6 terms, `particles` bosons over `modes` modes.
fn boson_state(modes: usize, particles: usize) -> impl Strategy<Value = FockState> {
    prop::collection::vec((prop::collection::vec(0..modes, particles), amp()), 1..6).prop_filter_map(
        "nonzero state",
        move |terms| {
            let terms = terms.into_iter().map(|(placement, a)| {
                let mut occ = vec![0u32; modes];
                for m in placement {
                    occ[m] += 1;
                }
                (occ, a)
            });
            let s = FockState::from_terms(modes, Statistics::Boson, terms).ok()?;
            (!s.is_zero()).then_some(s)
        },
    )
}

fn fermion_state(modes: usize, particles: usize) -> impl Strategy<Value = FockState> {
    prop::collection::vec((prop::sample::subsequence((0..modes).collect::<Vec<_>>(), particles), amp()), 1..6)
        .prop_filter_map("nonzero state", move |terms| {
            let terms = terms.into_iter().map(|(subset, a)| {
                let mut occ = vec![0u32; modes];
                for m in subset {
                    occ[m] = 1;
                }
                (occ, a)
            });
            let s = FockState::from_terms(modes, Statistics::Fermion, terms).ok()?;
            (!s.is_zero()).then_some(s)
        })
}

fn sized_boson() -> impl Strategy<Value = (FockState, FockState, ModeSuperposition, ModeSuperposition)> {
    (1usize..=5, 1usize..=4).prop_flat_map(|(modes, n)| {
        (
            boson_state(modes, n),
            boson_state(modes, n - 1),
            superposition(modes),
            superposition(modes),
        )
    })
}

fn sized_fermion() -> impl Strategy<Value = (FockState, FockState, ModeSuperposition, ModeSuperposition)> {
    (2usize..=6)
        .prop_flat_map(|modes| (Just(modes), 1..=modes))
        .prop_flat_map(|(modes, n)| {
            (
                fermion_state(modes, n),
                fermion_state(modes, n - 1),
                superposition(modes),
                superposition(modes),
            )
        })
}

fn assert_states_close(a: &FockState, b: &FockState, tol: f64) {
    assert_eq!(a.modes(), b.modes());
    for (occ, amp) in a.terms().chain(b.terms()) {
        let (x, y) = (a.amplitude(occ.as_slice()), b.amplitude(occ.as_slice()));
        assert!((x - y).norm() <= tol * (1.0 + amp.norm()), "{occ}: {x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn adjointness_boson((psi, phi, alpha, _) in sized_boson()) {
        let lhs = inner_product(&phi.create(&alpha).unwrap(), &psi).unwrap();
        let rhs = inner_product(&phi, &psi.subtract(&alpha.conj()).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn adjointness_fermion((psi, phi, alpha, _) in sized_fermion()) {
        let lhs = inner_product(&phi.create(&alpha).unwrap(), &psi).unwrap();
        let rhs = inner_product(&phi, &psi.subtract(&alpha.conj()).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn particle_number_bookkeeping((psi, _, alpha, _) in sized_boson()) {
        let down = psi.subtract(&alpha).unwrap();
        prop_assert_eq!(down.particles(), psi.particles() - 1);
        prop_assert!(down.terms().all(|(occ, _)| occ.total() == psi.particles() - 1));
        let up = psi.create(&alpha).unwrap();
        prop_assert_eq!(up.particles(), psi.particles() + 1);
    }

    #[test]
    fn bosonic_subtractions_commute((psi, _, a, b) in sized_boson()) {
        prop_assume!(psi.particles() >= 2);
        let ab = psi.subtract(&a).unwrap().subtract(&b).unwrap();
        let ba = psi.subtract(&b).unwrap().subtract(&a).unwrap();
        assert_states_close(&ab, &ba, 1e-10);
    }

    #[test]
    fn fermionic_subtractions_anticommute((psi, _, a, b) in sized_fermion()) {
        prop_assume!(psi.particles() >= 2);
        let ab = psi.subtract(&a).unwrap().subtract(&b).unwrap();
        let ba = psi.subtract(&b).unwrap().subtract(&a).unwrap();
        assert_states_close(&ab, &ba.scaled(C64::new(-1.0, 0.0)), 1e-10);
    }

    #[test]
    fn subtraction_beyond_particle_count_annihilates((psi, _, a, _) in sized_boson()) {
        let mut state = psi.clone();
        let mut annihilated = false;
        for _ in 0..=psi.particles() * psi.modes() {
            match state.subtract(&a) {
                Ok(next) if next.is_zero() => {
                    annihilated = true;
                    break;
                }
                Ok(next) => state = next,
                Err(Error::VacuumSubtraction) => {
                    annihilated = true;
                    break;
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert!(annihilated);
    }

    #[test]
    fn mode_permutation_preserves_overlaps(
        (psi, phi, _, _) in (2usize..=5, 1usize..=3).prop_flat_map(|(m, n)| {
            (boson_state(m, n), boson_state(m, n), superposition(m), superposition(m))
        }),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut perm: Vec<usize> = (0..psi.modes()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let before = inner_product(&phi, &psi).unwrap();
        let after = inner_product(&phi.permute_modes(&perm).unwrap(), &psi.permute_modes(&perm).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
    }
}

/// Exact step coefficients of the form `k · i^p`.
fn exact_coeff() -> impl Strategy<Value = (i64, i64)> {
    (-2i64..=2, 0i64..4)
}

fn exact_state(modes: usize) -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    (1..=modes).prop_flat_map(move |n| {
        prop::collection::vec(
            (prop::sample::subsequence((0..modes).collect::<Vec<_>>(), n), -3i64..=3),
            1..5,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// Float subtraction agrees with the exact subset expansion term by term.
    #[test]
    fn subtraction_matches_oracle(
        (modes, terms, steps) in (2usize..=6).prop_flat_map(|m| {
            (Just(m), exact_state(m), prop::collection::vec(prop::collection::vec(exact_coeff(), m), 1..=3))
        })
    ) {
        let exact = SubsetState::from_terms(
            modes,
            terms.iter().map(|(s, c)| (s.clone(), Cyclotomic::from_integer(*c))),
        ).unwrap();
        prop_assume!(!exact.is_zero());
        prop_assume!(steps.len() <= exact.particles());

        let mut fock = exact.to_fock().unwrap();
        let mut oracle = exact;
        for step in &steps {
            let coeffs: Vec<Cyclotomic> = step
                .iter()
                .map(|&(k, p)| &Cyclotomic::from_integer(k) * &Cyclotomic::root_of_unity(4, p))
                .collect();
            let floats: Vec<C64> = coeffs.iter().map(Cyclotomic::to_complex).collect();
            prop_assume!(floats.iter().any(|c| c.norm() > 0.0));
            oracle = oracle.subtract(&coeffs);
            fock = fock.subtract(&ModeSuperposition::new(floats).unwrap()).unwrap();
        }
        if oracle.is_zero() {
            prop_assert!(fock.is_zero() || fock.norm_squared() < 1e-20);
        } else {
            let check = oracle_compare(&oracle, &fock, 1e-10);
            prop_assert!(check.is_ok(), "{:?}", check);
        }
    }
}

/// Unit-norm complex vectors from a seeded generator.
fn random_unit(rng: &mut impl rand::Rng, modes: usize) -> ModeSuperposition {
    let c: Vec<C64> = (0..modes)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ModeSuperposition::new(c).unwrap().normalized()
}

#[test]
fn fermionic_rdm_stays_a_single_determinant() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in 2..=6 {
        for k in 1..n {
            for _ in 0..5 {
                let mut state = FockState::asym_state(n);
                for _ in 0..k {
                    state = state.subtract(&random_unit(&mut rng, n)).unwrap();
                }
                let rdm = state.normalized().unwrap().single_particle_rdm().unwrap();
                let ev = rdm.eigenvalues();
                let left = n - k;
                for (i, e) in ev.iter().enumerate() {
                    let expected = if i < left { 1.0 / left as f64 } else { 0.0 };
                    assert!((e - expected).abs() < 1e-10, "N={n} K={k}: {ev:?}");
                }
            }
        }
    }
}
