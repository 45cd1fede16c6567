//! Root datum of `GSp(2d)` in similitude coordinates, its Weyl group of signed
//! permutations, and the standard parabolic subgroups `P_S`.
//!
//! The diagonal torus is `diag(t_1, .., t_d, c/t_d, .., c/t_1)`. A character is
//! a [`Weight`] `(a_1, .., a_d; m0)` with `e_i` dual to `t_i` and `e_0` dual to
//! `c`. Positive roots are
//!
//! * `e_i - e_j` for `i < j`,
//! * `e_i + e_j - e_0` for `i < j`,
//! * `2 e_i - e_0`,
//!
//! and the simple roots are `alpha_i = e_i - e_{i+1}` (`1 <= i < d`) together
//! with `alpha_d = 2 e_d - e_0`. The maximal parabolic `P_r` (Levi
//! `GL(d-r) x GSp(2r)`) drops `alpha_{d-r}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::reps::Weight;

/// Largest genus for which the Weyl group is materialised unless overridden.
pub const DEFAULT_MAX_GENUS: usize = 6;

/// Element of the type `C_d` Weyl group, stored as a signed permutation.
///
/// `w(e_i) = e_{perm[i]}` when `signs[i]` is false and
/// `w(e_i) = e_0 - e_{perm[i]}` when it is true; `e_0` is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElt {
    length: usize,
    perm: Vec<usize>,
    signs: Vec<bool>,
}

impl WeylElt {
    pub fn identity(d: usize) -> Self {
        WeylElt {
            length: 0,
            perm: (0..d).collect(),
            signs: vec![false; d],
        }
    }

    /// Builds an element from a 0-based permutation and reflection flags.
    pub fn from_parts(perm: Vec<usize>, signs: Vec<bool>) -> Result<Self> {
        let d = perm.len();
        if signs.len() != d {
            return Err(Error::Dimension {
                expected: d,
                got: signs.len(),
            });
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::Parse(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut w = WeylElt {
            length: 0,
            perm,
            signs,
        };
        w.length = w.count_inversions();
        Ok(w)
    }

    pub fn genus(&self) -> usize {
        self.perm.len()
    }

    /// Coxeter length: the number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// Linear action on characters.
    pub fn apply(&self, mu: &Weight) -> Weight {
        let d = self.genus();
        debug_assert_eq!(mu.a.len(), d);
        let mut a = vec![0i64; d];
        let mut m0 = mu.m0;
        for i in 0..d {
            let target = self.perm[i];
            if self.signs[i] {
                a[target] -= mu.a[i];
                m0 += mu.a[i];
            } else {
                a[target] += mu.a[i];
            }
        }
        Weight { a, m0 }
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &WeylElt) -> WeylElt {
        let d = self.genus();
        let mut perm = vec![0; d];
        let mut signs = vec![false; d];
        for i in 0..d {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] ^ self.signs[j];
        }
        let mut w = WeylElt {
            length: 0,
            perm,
            signs,
        };
        w.length = w.count_inversions();
        w
    }

    pub fn inverse(&self) -> WeylElt {
        let d = self.genus();
        let mut perm = vec![0; d];
        let mut signs = vec![false; d];
        for i in 0..d {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        WeylElt {
            length: self.length,
            perm,
            signs,
        }
    }

    fn count_inversions(&self) -> usize {
        positive_roots(self.genus())
            .iter()
            .filter(|alpha| !is_positive_root(&self.apply(alpha)))
            .count()
    }
}

impl fmt::Display for WeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if s { "-" } else { "" }, p + 1)?;
        }
        write!(f, "]")
    }
}

/// All `d^2` positive roots, in the order listed in the module docs.
pub fn positive_roots(d: usize) -> Vec<Weight> {
    let mut roots = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in i + 1..d {
            let mut a = vec![0; d];
            a[i] = 1;
            a[j] = -1;
            roots.push(Weight { a, m0: 0 });
        }
    }
    for i in 0..d {
        for j in i..d {
            let mut a = vec![0; d];
            a[i] += 1;
            a[j] += 1;
            roots.push(Weight { a, m0: -1 });
        }
    }
    roots
}

/// Simple roots `alpha_1 .. alpha_d` (index 0 holds `alpha_1`).
pub fn simple_roots(d: usize) -> Vec<Weight> {
    (1..=d)
        .map(|i| {
            let mut a = vec![0; d];
            if i < d {
                a[i - 1] = 1;
                a[i] = -1;
                Weight { a, m0: 0 }
            } else {
                a[d - 1] = 2;
                Weight { a, m0: -1 }
            }
        })
        .collect()
}

/// A root is positive iff the first non-zero `e_i` coordinate is positive.
pub fn is_positive_root(root: &Weight) -> bool {
    root.a.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// Every element of the Weyl group, sorted by length, then permutation, then signs.
pub fn weyl_group(d: usize) -> Vec<WeylElt> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..d).collect();
    permutations(&mut perm, 0, &mut |p| {
        for mask in 0u32..(1u32 << d) {
            let signs = (0..d).map(|i| mask & (1 << i) != 0).collect();
            let mut w = WeylElt {
                length: 0,
                perm: p.to_vec(),
                signs,
            };
            w.length = w.count_inversions();
            out.push(w);
        }
    });
    out.sort();
    out
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Non-empty set `S` of parabolic indices in `{0, .., d-1}`; `P_S` is the
/// intersection of the maximal parabolics `P_s`, `s` in `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicSet {
    indices: Vec<usize>,
}

impl ParabolicSet {
    pub fn new(d: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::EmptyParabolic);
        }
        if let Some(&bad) = indices.iter().find(|&&s| s >= d) {
            return Err(Error::OutOfRange {
                what: "parabolic",
                index: bad,
                bound: d,
            });
        }
        Ok(ParabolicSet { indices })
    }

    /// Smallest element, the stratum index `r` attached to `S`.
    pub fn stratum(&self) -> usize {
        self.indices[0]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, s: usize) -> bool {
        self.indices.binary_search(&s).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All sets `S` with `r` in `S` and `S` inside `{r, .., d-1}`, ordered by
    /// size and then lexicographically.
    pub fn containing_min(d: usize, r: usize) -> Vec<ParabolicSet> {
        let above: Vec<usize> = (r + 1..d).collect();
        let mut out: Vec<ParabolicSet> = (0u32..(1u32 << above.len()))
            .map(|mask| {
                let mut idx = vec![r];
                idx.extend(
                    above
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &s)| s),
                );
                ParabolicSet { indices: idx }
            })
            .collect();
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        out
    }
}

impl fmt::Display for ParabolicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Block structure of the Levi quotient `L_S = GL(n_1) x .. x GL(n_k) x GSp(2r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeviShape {
    pub blocks: Vec<usize>,
    pub symp_rank: usize,
}

impl LeviShape {
    /// Cuts `d - r` at the points `d - s`, `s` in `S \ {r}`.
    pub fn of(d: usize, set: &ParabolicSet) -> LeviShape {
        let r = set.stratum();
        let mut cuts: Vec<usize> = set.indices().iter().map(|&s| d - s).collect();
        cuts.sort_unstable();
        let mut blocks = Vec::with_capacity(cuts.len());
        let mut prev = 0;
        for c in cuts {
            blocks.push(c - prev);
            prev = c;
        }
        LeviShape { blocks, symp_rank: r }
    }

    pub fn genus(&self) -> usize {
        self.blocks.iter().sum::<usize>() + self.symp_rank
    }

    /// GL block holding 0-based coordinate `i`, or `None` for the GSp block.
    pub fn block_of(&self, i: usize) -> Option<usize> {
        let mut end = 0;
        for (b, &size) in self.blocks.iter().enumerate() {
            end += size;
            if i < end {
                return Some(b);
            }
        }
        None
    }

    /// Whether a root of `G` lies in the Levi.
    pub fn is_levi_root(&self, root: &Weight) -> bool {
        let support: Vec<usize> = (0..root.a.len()).filter(|&i| root.a[i] != 0).collect();
        if root.m0 == 0 {
            // e_i - e_j: both coordinates in one GL block, or both symplectic
            self.block_of(support[0]) == self.block_of(support[1])
        } else {
            support.iter().all(|&i| self.block_of(i).is_none())
        }
    }

    /// Order of the Levi Weyl group, `prod(n_i!) * 2^r * r!`.
    pub fn weyl_order(&self) -> u64 {
        let fact = |k: usize| (1..=k as u64).product::<u64>();
        self.blocks.iter().map(|&k| fact(k)).product::<u64>()
            * (1u64 << self.symp_rank)
            * fact(self.symp_rank)
    }

    /// `dim N_{l,S} = sum_{i<j} n_i n_j`, the unipotent radical of the block
    /// parabolic inside `GL(d-r)`.
    pub fn gl_unipotent_dim(&self) -> usize {
        let mut total = 0;
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                total += self.blocks[i] * self.blocks[j];
            }
        }
        total
    }
}

/// Root-theoretic data for `P_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicData {
    pub set: ParabolicSet,
    pub shape: LeviShape,
    /// Roots of `Lie N_S`.
    pub n_roots: Vec<Weight>,
    /// Roots of `Lie U_r`, `r = min S`, the centre of `N_r`.
    pub u_roots: Vec<Weight>,
    pub dim_n: usize,
    pub dim_u: usize,
}

impl ParabolicData {
    pub fn levi_blocks(&self) -> &[usize] {
        &self.shape.blocks
    }

    pub fn symp_rank(&self) -> usize {
        self.shape.symp_rank
    }
}

/// All derived combinatorial data for genus `d` and level `n`.
#[derive(Clone, Debug)]
pub struct GroupContext {
    pub d: usize,
    pub n: u64,
    pub positive_roots: Vec<Weight>,
    pub rho: Weight,
    pub weyl_order: u64,
    pub dim_g: usize,
    pub c: usize,
    pub stratum_dims: Vec<usize>,
    weyl: Vec<WeylElt>,
}

impl GroupContext {
    pub fn new(d: usize, n: u64) -> Result<Self> {
        Self::with_max_genus(d, n, DEFAULT_MAX_GENUS)
    }

    pub fn with_max_genus(d: usize, n: u64, max_genus: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::GenusConstraint { d });
        }
        if n < 3 {
            return Err(Error::LevelConstraint { n });
        }
        if d > max_genus {
            return Err(Error::GenusTooLarge { d, max: max_genus });
        }
        let positive_roots = positive_roots(d);
        let rho = Weight {
            a: (1..=d as i64).rev().collect(),
            m0: 0,
        };
        let weyl = weyl_group(d);
        let stratum_dims = crate::strata::stratum_dims(d);
        Ok(GroupContext {
            d,
            n,
            dim_g: 2 * positive_roots.len() + d + 1,
            positive_roots,
            rho,
            weyl_order: weyl.len() as u64,
            c: d * (d + 1) / 2,
            stratum_dims,
            weyl,
        })
    }

    pub fn weyl_group(&self) -> &[WeylElt] {
        &self.weyl
    }

    pub fn parabolic(&self, indices: impl IntoIterator<Item = usize>) -> Result<ParabolicSet> {
        ParabolicSet::new(self.d, indices)
    }

    fn check_set(&self, set: &ParabolicSet) -> Result<()> {
        match set.indices().last() {
            Some(&s) if s >= self.d => Err(Error::OutOfRange {
                what: "parabolic",
                index: s,
                bound: self.d,
            }),
            _ => Ok(()),
        }
    }

    pub fn parabolic_data(&self, set: &ParabolicSet) -> Result<ParabolicData> {
        self.check_set(set)?;
        let d = self.d;
        let r = set.stratum();
        let shape = LeviShape::of(d, set);
        let n_roots: Vec<Weight> = self
            .positive_roots
            .iter()
            .filter(|root| !shape.is_levi_root(root))
            .cloned()
            .collect();
        let u_roots: Vec<Weight> = self
            .positive_roots
            .iter()
            .filter(|root| root.m0 == -1 && root.a[..d - r].iter().sum::<i64>() == 2)
            .cloned()
            .collect();
        Ok(ParabolicData {
            set: set.clone(),
            dim_n: n_roots.len(),
            dim_u: u_roots.len(),
            shape,
            n_roots,
            u_roots,
        })
    }

    /// Simple roots that survive in the Levi of `P_S`.
    pub fn levi_simple_roots(&self, set: &ParabolicSet) -> Vec<Weight> {
        let d = self.d;
        simple_roots(d)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !set.contains(d - (i + 1)))
            .map(|(_, root)| root)
            .collect()
    }

    /// Minimal-length representatives of the right cosets `W_L w`: the `w`
    /// with `w^{-1}(alpha) > 0` for every Levi simple root `alpha`.
    pub fn kostant_reps(&self, set: &ParabolicSet) -> Result<Vec<WeylElt>> {
        self.check_set(set)?;
        let levi_simple = self.levi_simple_roots(set);
        Ok(self
            .weyl
            .iter()
            .filter(|w| {
                let inv = w.inverse();
                levi_simple
                    .iter()
                    .all(|alpha| is_positive_root(&inv.apply(alpha)))
            })
            .cloned()
            .collect())
    }

    /// The full Borel set `{0, .., d-1}`.
    pub fn borel(&self) -> ParabolicSet {
        ParabolicSet {
            indices: (0..self.d).collect(),
        }
    }

    /// Every non-empty `S`, ordered by size then lexicographically.
    pub fn all_parabolics(&self) -> Vec<ParabolicSet> {
        let mut out: Vec<ParabolicSet> = (1u32..(1u32 << self.d))
            .map(|mask| ParabolicSet {
                indices: (0..self.d).filter(|i| mask & (1 << i) != 0).collect(),
            })
            .collect();
        out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        out
    }
}

pub fn build_context(d: usize, n: u64) -> Result<GroupContext> {
    GroupContext::new(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_small_genus() {
        let ctx = build_context(1, 3).unwrap();
        assert_eq!(ctx.weyl_order, 2);
        assert_eq!(ctx.c, 1);

        let ctx = build_context(2, 3).unwrap();
        assert_eq!(ctx.weyl_order, 8);
        assert_eq!(ctx.dim_g, 11);
        assert_eq!(ctx.stratum_dims, vec![3, 1, 0]);
        assert_eq!(ctx.positive_roots.len(), 4);
        assert_eq!(ctx.rho, Weight::new(vec![2, 1], 0));
    }

    #[test]
    fn context_rejects_bad_level_and_genus() {
        assert_eq!(build_context(2, 2).unwrap_err(), Error::LevelConstraint { n: 2 });
        assert_eq!(build_context(0, 5).unwrap_err(), Error::GenusConstraint { d: 0 });
        assert!(build_context(7, 3).unwrap_err().is_scope());
        assert!(GroupContext::with_max_genus(7, 3, 7).is_ok());
    }

    #[test]
    fn weyl_group_lengths() {
        let w1: Vec<usize> = weyl_group(1).iter().map(WeylElt::length).collect();
        assert_eq!(w1, vec![0, 1]);
        let w2: Vec<usize> = weyl_group(2).iter().map(WeylElt::length).collect();
        assert_eq!(w2, vec![0, 1, 1, 2, 2, 3, 3, 4]);
        assert_eq!(weyl_group(3).len(), 48);
        let longest: Vec<_> = weyl_group(3).into_iter().filter(|w| w.length() == 9).collect();
        assert_eq!(longest.len(), 1);
        assert!(longest[0].signs().iter().all(|&s| s));
    }

    #[test]
    fn length_matches_word_length_from_simple_reflections() {
        // Breadth-first search over words in the simple reflections.
        let d = 3;
        let gens: Vec<WeylElt> = (0..d)
            .map(|i| {
                if i + 1 < d {
                    let mut perm: Vec<usize> = (0..d).collect();
                    perm.swap(i, i + 1);
                    WeylElt::from_parts(perm, vec![false; d]).unwrap()
                } else {
                    let mut signs = vec![false; d];
                    signs[d - 1] = true;
                    WeylElt::from_parts((0..d).collect(), signs).unwrap()
                }
            })
            .collect();
        let mut dist = std::collections::HashMap::new();
        let id = WeylElt::identity(d);
        dist.insert(id.clone(), 0usize);
        let mut frontier = vec![id];
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for w in &frontier {
                for s in &gens {
                    let x = w.compose(s);
                    if !dist.contains_key(&x) {
                        dist.insert(x.clone(), level);
                        next.push(x);
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(dist.len(), 48);
        for (w, l) in dist {
            assert_eq!(w.length(), l, "{w}");
        }
    }

    #[test]
    fn parabolic_data_genus_two() {
        let ctx = build_context(2, 3).unwrap();
        let siegel = ctx.parabolic_data(&ctx.parabolic([0]).unwrap()).unwrap();
        assert_eq!(siegel.levi_blocks(), &[2]);
        assert_eq!(siegel.symp_rank(), 0);
        assert_eq!(siegel.dim_n, 3);

        let klingen = ctx.parabolic_data(&ctx.parabolic([1]).unwrap()).unwrap();
        assert_eq!(klingen.levi_blocks(), &[1]);
        assert_eq!(klingen.symp_rank(), 1);
        assert_eq!(klingen.dim_n, 3);
        assert_eq!(klingen.dim_u, 1);

        let borel = ctx.parabolic_data(&ctx.borel()).unwrap();
        assert_eq!(borel.levi_blocks(), &[1, 1]);
        assert_eq!(borel.symp_rank(), 0);
        assert_eq!(borel.dim_n, 4);
    }

    #[test]
    fn parabolic_set_validation() {
        assert_eq!(ParabolicSet::new(3, []).unwrap_err(), Error::EmptyParabolic);
        assert!(ParabolicSet::new(3, [3]).is_err());
        let s = ParabolicSet::new(3, [2, 0, 2]).unwrap();
        assert_eq!(s.indices(), &[0, 2]);
        assert_eq!(s.stratum(), 0);
        assert_eq!(s.to_string(), "{0,2}");
    }

    #[test]
    fn kostant_reps_examples() {
        let ctx = build_context(1, 3).unwrap();
        let reps = ctx.kostant_reps(&ctx.parabolic([0]).unwrap()).unwrap();
        assert_eq!(reps.iter().map(WeylElt::length).collect::<Vec<_>>(), vec![0, 1]);

        let ctx = build_context(2, 3).unwrap();
        let reps = ctx.kostant_reps(&ctx.parabolic([1]).unwrap()).unwrap();
        assert_eq!(
            reps.iter().map(WeylElt::length).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(ctx.kostant_reps(&ctx.borel()).unwrap().len(), 8);
    }

    #[test]
    fn kostant_reps_are_coset_minima() {
        // Oracle: group W by right cosets W_L w and keep the shortest element.
        for d in 1..=3 {
            let ctx = build_context(d, 3).unwrap();
            for set in ctx.all_parabolics() {
                let shape = LeviShape::of(d, &set);
                let levi: Vec<&WeylElt> = ctx
                    .weyl_group()
                    .iter()
                    .filter(|w| {
                        // W_L permutes coordinates within blocks, reflecting only symplectic ones
                        (0..d).all(|i| {
                            shape.block_of(i) == shape.block_of(w.perm()[i])
                                && (!w.signs()[i] || shape.block_of(i).is_none())
                        })
                    })
                    .collect();
                assert_eq!(levi.len() as u64, shape.weyl_order());
                let mut minima = std::collections::BTreeSet::new();
                for w in ctx.weyl_group() {
                    let coset_min = levi
                        .iter()
                        .map(|x| x.compose(w))
                        .min_by_key(|x| x.length())
                        .unwrap();
                    minima.insert(coset_min);
                }
                let reps: std::collections::BTreeSet<WeylElt> =
                    ctx.kostant_reps(&set).unwrap().into_iter().collect();
                assert_eq!(reps, minima, "d={d} S={set}");
            }
        }
    }

    #[test]
    fn inverse_and_composition() {
        let w = weyl_group(3);
        let id = WeylElt::identity(3);
        for x in &w {
            assert_eq!(x.compose(&x.inverse()), id);
            for y in w.iter().step_by(5) {
                let xy = x.compose(y);
                let mu = Weight::new(vec![5, 3, 2], 1);
                assert_eq!(xy.apply(&mu), x.apply(&y.apply(&mu)));
                assert!(xy.length().abs_diff(x.length()) <= y.length());
            }
        }
    }
}
