//! Restriction of weighted complexes and of the intersection complex to a
//! boundary stratum, as integer combinations of truncated Kostant modules.
//!
//! A class is a sum over parabolic sets `S` of `coefficient * RG(Gamma_S, M_S)`
//! where `M_S` is a graded `L_S`-module. The arithmetic-group cohomology
//! `RG(Gamma_S, -)` is never expanded: it is kept as the term wrapper, or
//! replaced by the Euler characteristic of `Gamma_S` in [`euler_evaluate`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::arith::{euler_char_congruence, ExactRational};
use crate::error::{Error, Result};
use crate::group::{GroupContext, ParabolicSet};
use crate::kostant::{lie_n_cohomology, lie_n_cohomology_complex};
use crate::reps::{
    central_weight, truncate, truncate_centered, Bound, GradedVirtualRep, Profile, TruncCond, Weight,
};
use crate::strata::{double_coset_count, stratum_dims};

/// One term of a [`SymbolicClass`]: `coefficient * [RG(Gamma_S, module)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: BigInt,
    pub set: ParabolicSet,
    pub module: GradedVirtualRep,
}

/// Integer combination of boundary terms in canonical form: one entry per
/// parabolic set, holding the merged module. Empty modules are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicClass {
    d: usize,
    terms: BTreeMap<ParabolicSet, GradedVirtualRep>,
}

impl SymbolicClass {
    pub fn zero(d: usize) -> Self {
        SymbolicClass {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn genus(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coefficient * module`.
    pub fn add_term(&mut self, coefficient: i64, module: &GradedVirtualRep) {
        if coefficient == 0 || module.is_empty() {
            return;
        }
        let set = module.set().clone();
        let scaled = module.scaled(coefficient);
        let merged = match self.terms.remove(&set) {
            Some(existing) => existing.plus(&scaled),
            None => scaled,
        };
        if !merged.is_empty() {
            self.terms.insert(set, merged);
        }
    }

    pub fn plus(&self, other: &SymbolicClass) -> SymbolicClass {
        let mut out = self.clone();
        for module in other.terms.values() {
            out.add_term(1, module);
        }
        out
    }

    pub fn scaled(&self, k: i64) -> SymbolicClass {
        let mut out = SymbolicClass::zero(self.d);
        for module in self.terms.values() {
            out.add_term(k, module);
        }
        out
    }

    /// Terms with the largest common factor of each module pulled into the
    /// coefficient, sorted by parabolic set.
    pub fn terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(set, module)| {
                let mut module = module.clone();
                let factor = module.make_primitive();
                Term {
                    coefficient: BigInt::from(factor),
                    set: set.clone(),
                    module,
                }
            })
            .collect()
    }

    /// Merged module of each parabolic set, multiplicities including the coefficient.
    pub fn modules(&self) -> impl Iterator<Item = &GradedVirtualRep> {
        self.terms.values()
    }
}

/// Strata `r_1 > .. > r_c` with thresholds `a_1 .. a_c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    entries: Vec<(usize, Bound)>,
}

impl Chain {
    pub fn new(entries: Vec<(usize, Bound)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(Error::ChainOrder);
        }
        Ok(Chain { entries })
    }

    pub fn empty() -> Self {
        Chain { entries: vec![] }
    }

    pub fn entries(&self) -> &[(usize, Bound)] {
        &self.entries
    }

    pub fn min(&self) -> Option<usize> {
        self.entries.last().map(|&(r, _)| r)
    }

    /// `t_i = -a_i + r_i(r_i + 1)/2`.
    pub fn thresholds(&self) -> Vec<(usize, Bound)> {
        self.entries
            .iter()
            .map(|&(r, a)| (r, a.negate().shift((r * (r + 1) / 2) as i64)))
            .collect()
    }

    /// Chain on the given strata whose thresholds reproduce `profile`, shifted
    /// by the central weight `shift`.
    pub fn from_profile(profile: &Profile, strata: &[usize], shift: i64) -> Result<Self> {
        let mut idx = strata.to_vec();
        idx.sort_unstable_by(|a, b| b.cmp(a));
        Chain::new(
            idx.into_iter()
                .map(|s| {
                    (
                        s,
                        profile
                            .get(s)
                            .shift(shift)
                            .negate()
                            .shift((s * (s + 1) / 2) as i64),
                    )
                })
                .collect(),
        )
    }
}

fn to_i64(x: num_bigint::BigUint) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::CapExceeded {
        needed: x.to_string(),
        cap: i64::MAX as u64,
    })
}

fn check_stratum(ctx: &GroupContext, r: usize) -> Result<()> {
    if r >= ctx.d {
        return Err(Error::OutOfRange {
            what: "stratum",
            index: r,
            bound: ctx.d,
        });
    }
    Ok(())
}

fn check_profile(ctx: &GroupContext, profile: &Profile) -> Result<()> {
    if profile.len() != ctx.d {
        return Err(Error::Dimension {
            expected: ctx.d,
            got: profile.len(),
        });
    }
    Ok(())
}

/// Contribution of one chain to the restriction at stratum `r`: on
/// `S = chain + {r}`, the Kostant module truncated below each chain threshold,
/// weighted by `card(I_S)`.
pub fn chain_term(ctx: &GroupContext, chain: &Chain, r: usize, lambda: &Weight) -> Result<SymbolicClass> {
    check_stratum(ctx, r)?;
    if let Some(min) = chain.min() {
        if r > min {
            return Err(Error::StratumAboveChain { r, min });
        }
    }
    if let Some(&(top, _)) = chain.entries().first() {
        check_stratum(ctx, top)?;
    }
    let set = ParabolicSet::new(ctx.d, chain.entries().iter().map(|&(s, _)| s).chain([r]))?;
    let coefficient = to_i64(double_coset_count(ctx, r, &set)?)?;
    let conds: Vec<TruncCond> = chain
        .thresholds()
        .into_iter()
        .map(|(s, t)| TruncCond::below(s, t))
        .collect();
    let module = truncate(&lie_n_cohomology(ctx, &set, lambda)?, &conds);
    let mut class = SymbolicClass::zero(ctx.d);
    class.add_term(coefficient, &module);
    Ok(class)
}

/// Restriction of the weighted complex with thresholds `profile` to the
/// stratum of index `r`, for a coefficient system given as a graded sum of
/// irreducibles `sum mult * V_lambda[-deg]`.
///
/// Thresholds are measured relative to the central weight of each
/// irreducible constituent.
pub fn restrict_weighted_complex(
    ctx: &GroupContext,
    profile: &Profile,
    complex: &[(i64, Weight, i64)],
    r: usize,
) -> Result<SymbolicClass> {
    check_stratum(ctx, r)?;
    check_profile(ctx, profile)?;
    let sets = ParabolicSet::containing_min(ctx.d, r);
    let pieces: Vec<(i64, GradedVirtualRep)> = sets
        .par_iter()
        .map(|set| -> Result<(i64, GradedVirtualRep)> {
            let sign = if set.len() % 2 == 1 { 1 } else { -1 };
            let coefficient = sign * to_i64(double_coset_count(ctx, r, set)?)?;
            let conds: Vec<TruncCond> = set
                .indices()
                .iter()
                .map(|&s| {
                    if s == r {
                        TruncCond::at_least(s, profile.get(s))
                    } else {
                        TruncCond::below(s, profile.get(s))
                    }
                })
                .collect();
            let module = lie_n_cohomology_complex(ctx, set, complex)?;
            Ok((coefficient, truncate_centered(&module, &conds)))
        })
        .collect::<Result<_>>()?;
    let mut class = SymbolicClass::zero(ctx.d);
    for (coefficient, module) in &pieces {
        class.add_term(*coefficient, module);
    }
    Ok(class)
}

pub fn restrict_weighted(
    ctx: &GroupContext,
    profile: &Profile,
    lambda: &Weight,
    r: usize,
) -> Result<SymbolicClass> {
    restrict_weighted_complex(ctx, profile, &[(0, lambda.clone(), 1)], r)
}

/// Restriction of the intersection complex through both of its profiles.
pub fn restrict_ic(ctx: &GroupContext, lambda: &Weight, r: usize) -> Result<(SymbolicClass, SymbolicClass)> {
    let (t, s) = crate::strata::ic_profiles(ctx.d);
    Ok((
        restrict_weighted(ctx, &t, lambda, r)?,
        restrict_weighted(ctx, &s, lambda, r)?,
    ))
}

/// All chains `1 <= n_1 < .. < n_k <= count` with sign `(-1)^k`, by size then
/// lexicographically; the empty chain comes first.
pub fn expansion_terms(count: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out: Vec<(Vec<usize>, i64)> = (0u64..(1u64 << count))
        .map(|mask| {
            let chain: Vec<usize> = (1..=count).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let sign = if chain.len().is_multiple_of(2) { 1 } else { -1 };
            (chain, sign)
        })
        .collect();
    out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.cmp(&y.0)));
    out
}

/// The restriction at stratum `r` rebuilt from chain terms: chain position
/// `i` is the stratum of parabolic index `i - 1`, and chains reaching below
/// `r` contribute nothing.
pub fn assemble_from_chains(
    ctx: &GroupContext,
    profile: &Profile,
    lambda: &Weight,
    r: usize,
) -> Result<SymbolicClass> {
    check_stratum(ctx, r)?;
    check_profile(ctx, profile)?;
    let shift = central_weight(lambda);
    let mut class = SymbolicClass::zero(ctx.d);
    for (positions, sign) in expansion_terms(ctx.d) {
        let strata: Vec<usize> = positions.iter().map(|i| i - 1).collect();
        if strata.iter().any(|&s| s < r) {
            continue;
        }
        let chain = Chain::from_profile(profile, &strata, shift)?;
        class = class.plus(&chain_term(ctx, &chain, r, lambda)?.scaled(sign));
    }
    Ok(class)
}

/// Additive invariant: `RG(Gamma_S, M)` evaluated as `e(Gamma_S) * chi(M)`,
/// with `e(Gamma_S)` the product of `e(Gamma(n) in SL_k(Z))` over the GL
/// blocks of `L_S`.
pub fn euler_evaluate(class: &SymbolicClass, ctx: &GroupContext) -> Result<ExactRational> {
    let mut total = ExactRational::zero();
    for module in class.modules() {
        let mut factor = ExactRational::from_integer(1);
        for &k in &module.shape().blocks {
            factor = factor * euler_char_congruence(k, ctx.n)?;
        }
        if factor.is_zero() {
            continue;
        }
        total = total + factor * ExactRational::from_integer(module.euler_dimension()?);
    }
    Ok(total)
}

/// One row per summand of every module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub set: ParabolicSet,
    pub degree: i64,
    pub weight: Weight,
    pub mult: i64,
    pub central_weight: i64,
    pub sheaf_weight: i64,
    pub pairings: Vec<(usize, i64)>,
}

pub fn graded_report(class: &SymbolicClass) -> Vec<ReportRow> {
    class
        .modules()
        .flat_map(|module| {
            module.summands().map(move |s| {
                let ann = module.annotate(s.weight);
                ReportRow {
                    set: module.set().clone(),
                    degree: s.degree,
                    weight: s.weight.clone(),
                    mult: s.mult,
                    central_weight: ann.central_weight,
                    sheaf_weight: ann.sheaf_weight,
                    pairings: ann.pairings,
                }
            })
        })
        .collect()
}

/// `s_r = 1 - t_r + 2(c_{d-r} - c_0)`.
pub fn dual_profile(profile: &Profile) -> Profile {
    let d = profile.len();
    let c = stratum_dims(d);
    Profile::new(
        (0..d)
            .map(|r| {
                profile
                    .get(r)
                    .negate()
                    .shift(1 + 2 * (c[d - r] as i64 - c[0] as i64))
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_context;
    use crate::reps::Bound::{Finite, NegInf, PosInf};
    use crate::strata::ic_profiles;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn dominant(d: usize, max: i64) -> impl Strategy<Value = Weight> {
        prop::collection::vec(0i64..=max, d).prop_map(|mut a| {
            a.sort_unstable_by(|x, y| y.cmp(x));
            Weight::new(a, 0)
        })
    }

    #[test]
    fn chain_validation() {
        assert!(Chain::new(vec![(1, Finite(0)), (1, Finite(0))]).is_err());
        assert!(Chain::new(vec![(0, Finite(0)), (1, Finite(0))]).is_err());
        let c = Chain::new(vec![(2, Finite(1)), (0, NegInf)]).unwrap();
        assert_eq!(c.thresholds(), vec![(2, Finite(2)), (0, PosInf)]);
    }

    #[test]
    fn chain_term_examples() {
        let ctx = build_context(1, 3).unwrap();
        let lambda = Weight::zero(1);
        let full = chain_term(&ctx, &Chain::empty(), 0, &lambda).unwrap();
        let terms = full.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, BigInt::from(1));
        assert_eq!(terms[0].module.len(), 2);

        for k in 0..4 {
            let lambda = Weight::new(vec![k], 0);
            let chain = Chain::new(vec![(0, Finite(0))]).unwrap();
            let class = chain_term(&ctx, &chain, 0, &lambda).unwrap();
            let rows = graded_report(&class);
            assert_eq!(rows.len(), 1);
            assert_eq!(rows[0].degree, 1);
        }

        let ctx = build_context(2, 3).unwrap();
        let chain = Chain::new(vec![(1, NegInf)]).unwrap();
        let class = chain_term(&ctx, &chain, 0, &Weight::zero(2)).unwrap();
        let terms = class.terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].set, ctx.borel());
        assert_eq!(terms[0].coefficient, BigInt::from(4));
        assert_eq!(terms[0].module.len(), 8);
        assert!(chain_term(&ctx, &chain, 1, &Weight::zero(2)).is_ok());
        let low = Chain::new(vec![(0, NegInf)]).unwrap();
        assert_eq!(
            chain_term(&ctx, &low, 1, &Weight::zero(2)).unwrap_err(),
            Error::StratumAboveChain { r: 1, min: 0 }
        );
    }

    #[test]
    fn modular_curve_restriction() {
        let ctx = build_context(1, 3).unwrap();
        let (t, s) = ic_profiles(1);
        for k in 0..6 {
            let lambda = Weight::new(vec![k], 0);
            for profile in [&t, &s] {
                let class = restrict_weighted(&ctx, profile, &lambda, 0).unwrap();
                let rows = graded_report(&class);
                assert_eq!(rows.len(), 1);
                assert_eq!(rows[0].degree, 0);
                assert_eq!(rows[0].weight, lambda);
                assert_eq!(rows[0].central_weight, k);
                assert_eq!(rows[0].sheaf_weight, -k);
                assert_eq!(rows[0].pairings, vec![(0, 2 * k)]);
                assert_eq!(
                    euler_evaluate(&class, &ctx).unwrap(),
                    ExactRational::from_integer(1)
                );
            }
            let empty = restrict_weighted(&ctx, &Profile::constant(1, PosInf), &lambda, 0).unwrap();
            assert!(empty.is_zero());
            assert_eq!(euler_evaluate(&empty, &ctx).unwrap(), ExactRational::zero());
            assert!(graded_report(&empty).is_empty());
        }
    }

    #[test]
    fn expansion_signs() {
        assert_eq!(expansion_terms(0), vec![(vec![], 1)]);
        let two: Vec<i64> = expansion_terms(2).iter().map(|x| x.1).collect();
        assert_eq!(two, vec![1, -1, -1, 1]);
        let three = expansion_terms(3);
        assert_eq!(three.len(), 8);
        assert_eq!(three.iter().map(|x| x.1).sum::<i64>(), 0);
    }

    #[test]
    fn euler_evaluate_gl2_block() {
        // Siegel stratum of genus 2 at level 3: one GL(2) block with e = -2.
        let ctx = build_context(2, 3).unwrap();
        let set = ctx.parabolic([0]).unwrap();
        let mut module = GradedVirtualRep::new(2, set);
        // Sym^4 of the standard GL(2) representation has dimension 5.
        module.insert(0, Weight::new(vec![4, 0], 0), 1);
        let mut class = SymbolicClass::zero(2);
        class.add_term(1, &module);
        assert_eq!(
            euler_evaluate(&class, &ctx).unwrap(),
            ExactRational::from_integer(-10)
        );

        let ctx3 = build_context(3, 3).unwrap();
        let set = ctx3.parabolic([0]).unwrap();
        let mut module = GradedVirtualRep::new(3, set);
        module.insert(0, Weight::zero(3), 1);
        let mut class = SymbolicClass::zero(3);
        class.add_term(7, &module);
        assert!(euler_evaluate(&class, &ctx3).unwrap().is_zero());
    }

    #[test]
    fn canonical_merging() {
        let ctx = build_context(2, 3).unwrap();
        let lambda = Weight::new(vec![1, 0], 0);
        let class = restrict_weighted(&ctx, &ic_profiles(2).0, &lambda, 0).unwrap();
        assert!(class.plus(&class.scaled(-1)).is_zero());
        assert_eq!(class.plus(&class), class.scaled(2));
        for term in class.terms() {
            assert!(!term.module.is_empty());
            assert!(term.module.multiplicities().next().unwrap() > 0);
        }
    }

    #[test]
    fn degenerate_profile_gives_full_alternating_sum() {
        for d in 1..=3 {
            let ctx = build_context(d, 3).unwrap();
            let lambda = Weight::new((0..d as i64).rev().collect(), 0);
            for r in 0..d {
                let mut t = vec![PosInf; d];
                t[r] = NegInf;
                let class = restrict_weighted(&ctx, &Profile::new(t), &lambda, r).unwrap();
                let mut expected = SymbolicClass::zero(d);
                for set in ParabolicSet::containing_min(d, r) {
                    let sign = if set.len() % 2 == 1 { 1 } else { -1 };
                    let card = to_i64(double_coset_count(&ctx, r, &set).unwrap()).unwrap();
                    expected.add_term(sign * card, &lie_n_cohomology(&ctx, &set, &lambda).unwrap());
                }
                assert_eq!(class, expected);
            }
        }
    }

    #[test]
    fn ic_profiles_agree_in_euler_mode_genus_two() {
        for n in [3, 4, 5] {
            let ctx = build_context(2, n).unwrap();
            for a in 0..=4 {
                for b in 0..=a {
                    let lambda = Weight::new(vec![a, b], 0);
                    for r in 0..2 {
                        let (t, s) = restrict_ic(&ctx, &lambda, r).unwrap();
                        assert_eq!(
                            euler_evaluate(&t, &ctx).unwrap(),
                            euler_evaluate(&s, &ctx).unwrap(),
                            "n={n} lambda={lambda} r={r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dual_profile_of_ic_profiles() {
        for d in 1..5 {
            let (t, s) = ic_profiles(d);
            // the dual of t is s shifted down by the stratum codimension terms
            let dual = dual_profile(&t);
            for r in 0..d {
                let c = stratum_dims(d);
                assert_eq!(
                    dual.get(r),
                    s.get(r).negate().shift(2 * (c[d - r] as i64 - c[0] as i64))
                );
            }
            assert_eq!(dual_profile(&dual), t);
        }
    }

    /// On the modular curve, the restriction for `t` and `lambda` is the
    /// degree-reflected complement of the restriction for the dual profile
    /// and the contragredient weight, at the level of graded dimensions.
    #[test]
    fn genus_one_duality() {
        let ctx = build_context(1, 3).unwrap();
        let c0 = stratum_dims(1)[0] as i64;
        for k in 0..6 {
            let lambda = Weight::new(vec![k], 0);
            let dual_weight = lambda.dual();
            let full = lie_n_cohomology(&ctx, &ctx.parabolic([0]).unwrap(), &dual_weight).unwrap();
            for t in -12..12 {
                let profile = Profile::new(vec![Finite(t)]);
                let lhs = restrict_weighted(&ctx, &profile, &lambda, 0).unwrap();
                let rhs = restrict_weighted(&ctx, &dual_profile(&profile), &dual_weight, 0).unwrap();
                let mut complement = SymbolicClass::zero(1);
                complement.add_term(1, &full);
                let complement = complement.plus(&rhs.scaled(-1));
                let dims = |class: &SymbolicClass| -> BTreeMap<i64, BigInt> {
                    let mut out = BTreeMap::new();
                    for module in class.modules() {
                        for (deg, dim) in module.dimensions_by_degree().unwrap() {
                            *out.entry(deg).or_insert_with(BigInt::zero) += dim;
                        }
                    }
                    out.retain(|_, v| !v.is_zero());
                    out
                };
                let reflected: BTreeMap<i64, BigInt> = dims(&complement)
                    .into_iter()
                    .map(|(q, v)| (2 * c0 - 1 - q, v))
                    .collect();
                assert_eq!(dims(&lhs), reflected, "k={k} t={t}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn expansion_matches_direct_sum(
            d in 1usize..=2,
            lambda_seed in dominant(2, 4),
            t0 in -8i64..4,
            t1 in -8i64..4,
            r_seed in 0usize..2,
        ) {
            let ctx = build_context(d, 3).unwrap();
            let lambda = Weight::new(lambda_seed.a[..d].to_vec(), 0);
            let profile = Profile::new(vec![Finite(t0), Finite(t1)][..d].to_vec());
            let r = r_seed % d;
            prop_assert_eq!(
                assemble_from_chains(&ctx, &profile, &lambda, r).unwrap(),
                restrict_weighted(&ctx, &profile, &lambda, r).unwrap()
            );
        }

        #[test]
        fn restriction_is_linear(
            lambda in dominant(2, 3),
            mu in dominant(2, 3),
            mult in 1i64..3,
            r in 0usize..2,
        ) {
            let ctx = build_context(2, 4).unwrap();
            let profile = ic_profiles(2).0;
            let mu = Weight::new(mu.a.clone(), 1);
            let joint = restrict_weighted_complex(
                &ctx, &profile, &[(0, lambda.clone(), 1), (0, mu.clone(), mult)], r).unwrap();
            let separate = restrict_weighted(&ctx, &profile, &lambda, r).unwrap()
                .plus(&restrict_weighted(&ctx, &profile, &mu, r).unwrap().scaled(mult));
            prop_assert_eq!(joint, separate);
        }

        #[test]
        fn lowering_thresholds_is_monotone(lambda in dominant(2, 3), t0 in -6i64..3, t1 in -6i64..3, drop in 1i64..4) {
            // At the stratum's own index, lowering its threshold only grows
            // the kept part of the S = {r} module.
            let ctx = build_context(2, 3).unwrap();
            for r in 0..2 {
                let base = Profile::new(vec![Finite(t0), Finite(t1)]);
                let mut lowered = base.clone();
                lowered.t[r] = lowered.t[r].shift(-drop);
                let own = ParabolicSet::new(2, [r]).unwrap();
                let pick = |class: &SymbolicClass| class.modules().find(|m| m.set() == &own).cloned();
                let before = pick(&restrict_weighted(&ctx, &base, &lambda, r).unwrap());
                let after = pick(&restrict_weighted(&ctx, &lowered, &lambda, r).unwrap());
                if let Some(before) = before {
                    let after = after.expect("lowering keeps summands");
                    prop_assert!(before.summands().all(|x| after.summands().any(|y| y == x)));
                }
            }
        }
    }
}
