use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siegel_core::engine::{assemble_from_chains, euler_evaluate, restrict_ic, restrict_weighted};
use siegel_core::strata::ic_profiles;
use siegel_core::{build_context, Bound, Profile, Weight};

fn random_dominant(rng: &mut ChaCha8Rng, d: usize, m0: bool) -> Weight {
    let mut a = vec![0i64; d];
    let mut acc = 0;
    for i in (0..d).rev() {
        acc += rng.gen_range(0..=3);
        a[i] = acc;
    }
    Weight::new(a, if m0 { rng.gen_range(-2..=2) } else { 0 })
}

#[test]
fn genus_three_ic_profiles_agree_under_euler() {
    let ctx = build_context(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let lambda = random_dominant(&mut rng, 3, false);
        for r in 0..3 {
            let (t, s) = restrict_ic(&ctx, &lambda, r).unwrap();
            assert_eq!(
                euler_evaluate(&t, &ctx).unwrap(),
                euler_evaluate(&s, &ctx).unwrap(),
                "lambda={lambda} r={r}"
            );
        }
    }
}

#[test]
fn similitude_twist_does_not_change_ic_comparison() {
    let ctx = build_context(2, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let lambda = random_dominant(&mut rng, 2, true);
        for r in 0..2 {
            let (t, s) = restrict_ic(&ctx, &lambda, r).unwrap();
            assert_eq!(t, s, "lambda={lambda} r={r}");
        }
    }
}

#[test]
fn genus_three_expansion_matches_direct_sum() {
    let ctx = build_context(3, 3).unwrap();
    let (t, _) = ic_profiles(3);
    let profiles = [
        t,
        Profile::constant(3, Bound::NegInf),
        Profile::constant(3, Bound::PosInf),
        Profile::new(vec![Bound::Finite(-1), Bound::PosInf, Bound::Finite(0)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for profile in &profiles {
        let lambda = random_dominant(&mut rng, 3, true);
        for r in 0..3 {
            assert_eq!(
                restrict_weighted(&ctx, profile, &lambda, r).unwrap(),
                assemble_from_chains(&ctx, profile, &lambda, r).unwrap(),
                "profile={profile} lambda={lambda} r={r}"
            );
        }
    }
}

#[test]
fn everything_kept_at_the_open_end() {
    // With every threshold at -inf the restriction to the stratum is the full
    // Kostant module on {r}, weighted by card(I_{r}) = 1.
    let ctx = build_context(2, 4).unwrap();
    let lambda = Weight::new(vec![2, 1], 0);
    let class = restrict_weighted(&ctx, &Profile::constant(2, Bound::NegInf), &lambda, 1).unwrap();
    let terms = class.terms();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].set.indices(), &[1]);
    assert_eq!(terms[0].module.len(), 4);
}
