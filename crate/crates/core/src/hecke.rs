//! Level-changing bookkeeping between levels `n | m`: the indices
//! `[H_{l,S} : H'_{l,S}]`, transfer degrees, boundary fibre counts, and the
//! combinatorial structure of the Hecke coefficient matrix.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{congruence_index, GroupKind};
use crate::error::{Error, Result};
use crate::group::{GroupContext, ParabolicSet};
use crate::shadow::{ModMatrix, ShadowModel};

fn check_levels(n: u64, m: u64) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::BadModulus(0));
    }
    if !m.is_multiple_of(n) {
        return Err(Error::Divisibility { n, m });
    }
    Ok(())
}

fn exact_div(num: BigUint, den: &BigUint, what: &str) -> Result<BigUint> {
    let (q, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return Err(Error::NonIntegralHecke(format!("{what}: {num} / {den}")));
    }
    Ok(q)
}

/// `(m/n)^{dim N_S} * prod_i [SL_{n_i}(Z/m) : SL_{n_i}(Z/n)]`.
pub fn hecke_index(ctx: &GroupContext, set: &ParabolicSet, m: u64) -> Result<BigUint> {
    check_levels(ctx.n, m)?;
    let data = ctx.parabolic_data(set)?;
    let mut index = BigUint::from(m / ctx.n).pow(data.dim_n as u32);
    for &k in data.levi_blocks() {
        index *= congruence_index(GroupKind::SL(k), ctx.n, m)?;
    }
    Ok(index)
}

/// `[K(n) : K(m)] = |GSp(2d)(Z/m)| / |GSp(2d)(Z/n)|`.
pub fn transfer_degree(d: usize, n: u64, m: u64) -> Result<BigUint> {
    check_levels(n, m)?;
    congruence_index(GroupKind::GSp(d), n, m)
}

/// Number of boundary points of index `r` at level `m` over one boundary
/// point at level `n`: `transfer_degree / hecke_index({r})`.
pub fn boundary_fiber_count(ctx: &GroupContext, r: usize, m: u64) -> Result<BigUint> {
    let set = ctx.parabolic([r])?;
    exact_div(
        transfer_degree(ctx.d, ctx.n, m)?,
        &hecke_index(ctx, &set, m)?,
        "boundary fiber",
    )
}

/// `[K_r(n) : K_r(m)]` for the `GSp(2r)` factor; each stratum is a Shimura
/// variety for this group with that many components per component below.
pub fn stratum_level_index(r: usize, n: u64, m: u64) -> Result<BigUint> {
    check_levels(n, m)?;
    congruence_index(GroupKind::GSp(r), n, m)
}

/// Number of level-`m` strata of index `r` over one level-`n` stratum:
/// the fibre count divided by [`stratum_level_index`].
pub fn strata_over_stratum(ctx: &GroupContext, r: usize, m: u64) -> Result<BigUint> {
    exact_div(
        boundary_fiber_count(ctx, r, m)?,
        &stratum_level_index(r, ctx.n, m)?,
        "strata fiber",
    )
}

/// An integral Hecke element: `g` in `GSp(2d)(Z/m)` with `n | m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeDatum {
    pub d: usize,
    pub n: u64,
    pub m: u64,
    pub g: ModMatrix,
}

impl HeckeDatum {
    pub fn new(d: usize, n: u64, m: u64, g: ModMatrix) -> Result<Self> {
        check_levels(n, m)?;
        if n < 3 {
            return Err(Error::LevelConstraint { n });
        }
        if g.size() != 2 * d {
            return Err(Error::Dimension {
                expected: 2 * d,
                got: g.size(),
            });
        }
        if g.modulus() != m {
            return Err(Error::NotInGroup {
                group: format!("GSp({})(Z/{m})", 2 * d),
                reason: format!("entries taken modulo {}", g.modulus()),
            });
        }
        if g.similitude().is_none() {
            return Err(Error::NotInGroup {
                group: format!("GSp({})(Z/{m})", 2 * d),
                reason: format!("{g} is not a symplectic similitude with unit multiplier"),
            });
        }
        Ok(HeckeDatum { d, n, m, g })
    }

    pub fn identity(d: usize, n: u64, m: u64) -> Result<Self> {
        HeckeDatum::new(d, n, m, ModMatrix::identity(2 * d, m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeEntry {
    /// Number of level-`m` classes `C'` with `C' g -> C1` and `C' -> C2`.
    pub count: u64,
    pub coefficient: BigUint,
    /// Smallest level-`m` representative `h` of such a `C'`, with the level-`n`
    /// representatives of `C1` and `C2` it maps to.
    pub annotation: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub level_n_classes: usize,
    pub level_m_classes: usize,
    pub entries: BTreeMap<(usize, usize), HeckeEntry>,
}

impl HeckeMatrix {
    /// Sum of counts for each `C2`.
    pub fn column_totals(&self) -> BTreeMap<usize, u64> {
        let mut out = BTreeMap::new();
        for (&(_, c2), e) in &self.entries {
            *out.entry(c2).or_insert(0) += e.count;
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.entries.values().map(|e| e.count).sum()
    }
}

/// Block structure of `u_{C1,C2}` for the classes of `P_S(Z) Q_r(Z^)` in
/// `GSp(2d)`, computed in the finite shadows at levels `n` and `m`.
pub fn hecke_matrix_structure(
    datum: &HeckeDatum,
    r: usize,
    set: &ParabolicSet,
    cap: u64,
) -> Result<HeckeMatrix> {
    if set.stratum() != r {
        return Err(Error::NotMinimum {
            r,
            min: set.stratum(),
        });
    }
    let ctx = GroupContext::new(datum.d, datum.n)?;
    let coefficient = hecke_index(&ctx, set, datum.m)?;
    let fine = ShadowModel::new(datum.d, datum.m, cap)?;
    let coarse = if datum.m == datum.n {
        fine.clone()
    } else {
        ShadowModel::new(datum.d, datum.n, cap)?
    };
    let fine_orbits = fine.stratum_orbits(set);
    let coarse_orbits = coarse.stratum_orbits(set);
    let coarse_class = |g: &ModMatrix| -> usize {
        let pos = coarse
            .table
            .position(&g.reduce(datum.n))
            .expect("reduction stays in the group");
        coarse_orbits.class_of[pos] as usize
    };
    let mut entries: BTreeMap<(usize, usize), HeckeEntry> = BTreeMap::new();
    for &rep in &fine_orbits.representatives {
        let h = &fine.table.elements[rep];
        let c2 = coarse_class(h);
        let c1 = coarse_class(&h.mul(&datum.g));
        entries
            .entry((c1, c2))
            .and_modify(|e| e.count += 1)
            .or_insert_with(|| HeckeEntry {
                count: 1,
                coefficient: coefficient.clone(),
                annotation: format!(
                    "h={h} C1={} C2={}",
                    coarse.table.elements[coarse_orbits.representatives[c1]],
                    coarse.table.elements[coarse_orbits.representatives[c2]]
                ),
            });
    }
    Ok(HeckeMatrix {
        level_n_classes: coarse_orbits.count(),
        level_m_classes: fine_orbits.count(),
        entries,
    })
}

/// Level-`m` strata of index `r` over each level-`n` stratum, from the shadows.
pub fn brute_force_strata_fibers(d: usize, r: usize, n: u64, m: u64, cap: u64) -> Result<Vec<u64>> {
    let datum = HeckeDatum::identity(d, n, m)?;
    let set = ParabolicSet::new(d, [r])?;
    let matrix = hecke_matrix_structure(&datum, r, &set, cap)?;
    let mut out = vec![0u64; matrix.level_n_classes];
    for (c2, total) in matrix.column_totals() {
        out[c2] = total;
    }
    Ok(out)
}

/// Order of `H_{l,S}` reduced modulo `m`, counted directly.
pub fn brute_force_hecke_index(ctx: &GroupContext, set: &ParabolicSet, m: u64, cap: u64) -> Result<BigUint> {
    crate::shadow::brute_force_hecke_index(ctx.d, set, ctx.n, m, cap).map(|x| BigUint::from(x as u64))
}
