//! Boundary strata of the Baily-Borel compactification: how many strata of
//! each parabolic index, the double-coset multiplicities `card(I_S)`, stratum
//! dimensions and the two threshold profiles of the intersection complex.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{group_order, integral_image_order, GroupKind};
use crate::error::{Error, Result};
use crate::group::{GroupContext, LeviShape, ParabolicSet};
use crate::reps::{Bound, Profile};
use crate::shadow::{self, ShadowModel};

/// `c_r = (d - r)(d + 1 - r) / 2` for `r = 0..=d`.
pub fn stratum_dims(d: usize) -> Vec<usize> {
    (0..=d).map(|r| (d - r) * (d + 1 - r) / 2).collect()
}

/// `dim N_r = (d-r)(d-r+1)/2 + 2r(d-r)`.
pub fn unipotent_dim(d: usize, r: usize) -> usize {
    (d - r) * (d - r + 1) / 2 + 2 * r * (d - r)
}

/// A stratum of parabolic index `r`, numbered among the strata at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumRef {
    pub r: usize,
    pub class_index: u64,
    pub n: u64,
}

impl StratumRef {
    pub fn new(ctx: &GroupContext, r: usize, class_index: u64) -> Result<Self> {
        let total = strata_count(ctx, r)?;
        if BigUint::from(class_index) >= total {
            return Err(Error::OutOfRange {
                what: "stratum class",
                index: class_index as usize,
                bound: usize::try_from(total).unwrap_or(usize::MAX),
            });
        }
        Ok(StratumRef {
            r,
            class_index,
            n: ctx.n,
        })
    }
}

fn check_index(d: usize, r: usize) -> Result<()> {
    if r >= d {
        return Err(Error::OutOfRange {
            what: "stratum",
            index: r,
            bound: d,
        });
    }
    Ok(())
}

fn exact_div(num: BigUint, den: BigUint) -> BigUint {
    let (q, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "closed form is not integral");
    q
}

/// Number of strata of index `r` at level `n`; `n = 1` is allowed and gives 1.
pub fn strata_count_at(d: usize, n: u64, r: usize) -> Result<BigUint> {
    check_index(d, r)?;
    let num = group_order(GroupKind::GSp(d), n)?;
    let den = group_order(GroupKind::GSp(r), n)?
        * group_order(GroupKind::NUnipotent(unipotent_dim(d, r)), n)?
        * integral_image_order(d - r, n)?;
    Ok(exact_div(num, den))
}

pub fn strata_count(ctx: &GroupContext, r: usize) -> Result<BigUint> {
    strata_count_at(ctx.d, ctx.n, r)
}

/// `card(I_S)` at level `n`, with `r = min S`.
pub fn double_coset_count_at(d: usize, n: u64, set: &ParabolicSet) -> Result<BigUint> {
    let shape = LeviShape::of(d, set);
    let num = integral_image_order(d - shape.symp_rank, n)?;
    let mut den = group_order(GroupKind::NUnipotent(shape.gl_unipotent_dim()), n)?;
    for &k in &shape.blocks {
        den *= integral_image_order(k, n)?;
    }
    Ok(exact_div(num, den))
}

pub fn double_coset_count(ctx: &GroupContext, r: usize, set: &ParabolicSet) -> Result<BigUint> {
    if set.stratum() != r {
        return Err(Error::NotMinimum {
            r,
            min: set.stratum(),
        });
    }
    double_coset_count_at(ctx.d, ctx.n, set)
}

/// The two profiles `t_r = 1 + c_{d-r} - c_0` and `s_r = c_{d-r} - c_0`
/// describing the intersection complex.
pub fn ic_profiles(d: usize) -> (Profile, Profile) {
    let c = stratum_dims(d);
    let t = (0..d)
        .map(|r| Bound::Finite(1 + c[d - r] as i64 - c[0] as i64))
        .collect();
    let s = (0..d)
        .map(|r| Bound::Finite(c[d - r] as i64 - c[0] as i64))
        .collect();
    (Profile::new(t), Profile::new(s))
}

/// Strata of index `r` counted as orbits in `GSp(2d)(Z/n)`.
pub fn brute_force_strata_count(d: usize, n: u64, r: usize, cap: u64) -> Result<usize> {
    check_index(d, r)?;
    let model = ShadowModel::new(d, n, cap)?;
    Ok(model.stratum_orbits(&ParabolicSet::new(d, [r])?).count())
}

pub fn brute_force_double_coset_count(d: usize, n: u64, set: &ParabolicSet, cap: u64) -> Result<usize> {
    shadow::brute_force_double_cosets(d, n, set, cap)
}

/// Image of the similitude character on `GSp(2d)(Z/n)`, from the closed forms.
pub fn similitude_image_count(d: usize, n: u64) -> Result<BigUint> {
    Ok(exact_div(
        group_order(GroupKind::GSp(d), n)?,
        group_order(GroupKind::Sp(d), n)?,
    ))
}
