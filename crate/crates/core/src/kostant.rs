//! `H^*(Lie N_S, V_lambda)` as a graded `L_S`-representation via Kostant's
//! theorem: one irreducible of highest weight `w(lambda + rho) - rho` in
//! degree `l(w)` for each minimal coset representative `w`.

use rayon::prelude::*;

use crate::error::Result;
use crate::group::{GroupContext, ParabolicSet};
use crate::reps::{dot_action, GradedVirtualRep, Weight};

pub fn lie_n_cohomology(ctx: &GroupContext, set: &ParabolicSet, lambda: &Weight) -> Result<GradedVirtualRep> {
    lie_n_cohomology_complex(ctx, set, &[(0, lambda.clone(), 1)])
}

/// Extends [`lie_n_cohomology`] to a formal graded sum `sum mult * V[-deg]`;
/// total degree is the internal degree plus `l(w)`.
pub fn lie_n_cohomology_complex(
    ctx: &GroupContext,
    set: &ParabolicSet,
    complex: &[(i64, Weight, i64)],
) -> Result<GradedVirtualRep> {
    for (_, lambda, _) in complex {
        lambda.require_dominant()?;
        if lambda.genus() != ctx.d {
            return Err(crate::Error::Dimension {
                expected: ctx.d,
                got: lambda.genus(),
            });
        }
    }
    let reps = ctx.kostant_reps(set)?;
    let pieces: Vec<(i64, Weight, i64)> = reps
        .par_iter()
        .flat_map_iter(|w| {
            complex.iter().map(move |(deg, lambda, mult)| {
                (deg + w.length() as i64, dot_action(w, lambda, &ctx.rho), *mult)
            })
        })
        .collect();
    let mut out = GradedVirtualRep::new(ctx.d, set.clone());
    for (deg, weight, mult) in pieces {
        out.insert(deg, weight, mult);
    }
    Ok(out)
}
