//! Finite shadows over `Z/n`: explicit matrices, exhaustive group
//! enumeration, and orbit counting for the subgroups that index boundary
//! strata. These are the brute-force oracles behind the closed forms in
//! [`crate::strata`] and [`crate::hecke`].

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use crate::arith::{factorize, group_order, GroupKind};
use crate::error::{Error, Result};
use crate::group::{LeviShape, ParabolicSet};

/// Square matrix over `Z/modulus`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    size: usize,
    modulus: u64,
    data: Vec<u16>,
}

impl ModMatrix {
    pub fn new(size: usize, modulus: u64, entries: &[i64]) -> Result<Self> {
        if modulus == 0 || modulus > u16::MAX as u64 {
            return Err(Error::BadModulus(modulus));
        }
        if entries.len() != size * size {
            return Err(Error::Dimension {
                expected: size * size,
                got: entries.len(),
            });
        }
        Ok(ModMatrix {
            size,
            modulus,
            data: entries
                .iter()
                .map(|x| x.rem_euclid(modulus as i64) as u16)
                .collect(),
        })
    }

    pub fn identity(size: usize, modulus: u64) -> Self {
        let mut data = vec![0u16; size * size];
        for i in 0..size {
            data[i * size + i] = (1 % modulus) as u16;
        }
        ModMatrix { size, modulus, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.size + j] as u64
    }

    fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.size + j] = (x % self.modulus) as u16;
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        debug_assert_eq!(self.size, other.size);
        debug_assert_eq!(self.modulus, other.modulus);
        let k = self.size;
        let mut data = vec![0u16; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0u64;
                for l in 0..k {
                    acc += self.get(i, l) * other.get(l, j);
                }
                data[i * k + j] = (acc % self.modulus) as u16;
            }
        }
        ModMatrix {
            size: k,
            modulus: self.modulus,
            data,
        }
    }

    /// Reduction to `Z/n` for `n | modulus`.
    pub fn reduce(&self, n: u64) -> ModMatrix {
        debug_assert_eq!(self.modulus % n, 0);
        ModMatrix {
            size: self.size,
            modulus: n,
            data: self.data.iter().map(|&x| (x as u64 % n) as u16).collect(),
        }
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut out = self.clone();
        for i in 0..self.size {
            for j in 0..self.size {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    /// Square sub-block on rows and columns `lo..hi`.
    pub fn block(&self, lo: usize, hi: usize) -> ModMatrix {
        let k = hi - lo;
        let mut data = Vec::with_capacity(k * k);
        for i in lo..hi {
            for j in lo..hi {
                data.push(self.data[i * self.size + j]);
            }
        }
        ModMatrix {
            size: k,
            modulus: self.modulus,
            data,
        }
    }

    /// Determinant by cofactor expansion, reduced into `0..modulus`.
    pub fn det(&self) -> u64 {
        let m = self.modulus as i64;
        let entries: Vec<i64> = self.data.iter().map(|&x| x as i64).collect();
        det_rec(&entries, self.size, m).rem_euclid(m) as u64
    }

    pub fn is_identity(&self) -> bool {
        *self == ModMatrix::identity(self.size, self.modulus)
    }

    /// `c` with `M^T J M = c J` for the standard alternating form, if any.
    pub fn similitude(&self) -> Option<u64> {
        let j = symplectic_form(self.size / 2, self.modulus);
        let lhs = self.transpose().mul(&j).mul(self);
        let c = lhs.get(0, self.size - 1);
        let target = scalar_times(&j, c);
        (lhs == target && is_unit(c, self.modulus)).then_some(c)
    }

    /// Inverse of an element of `GSp`: `c^{-1} J^{-1} M^T J`.
    pub fn symplectic_inverse(&self) -> Option<ModMatrix> {
        let c = self.similitude()?;
        let c_inv = mod_inverse(c, self.modulus)?;
        let j = symplectic_form(self.size / 2, self.modulus);
        let neg_j = scalar_times(&j, self.modulus - 1 % self.modulus);
        Some(scalar_times(&neg_j.mul(&self.transpose()).mul(&j), c_inv))
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.size {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.size {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn det_rec(entries: &[i64], k: usize, m: i64) -> i64 {
    match k {
        0 => 1 % m,
        1 => entries[0] % m,
        2 => (entries[0] * entries[3] - entries[1] * entries[2]) % m,
        _ => {
            let mut total = 0i64;
            for col in 0..k {
                let pivot = entries[col];
                if pivot == 0 {
                    continue;
                }
                let minor: Vec<i64> = (1..k)
                    .flat_map(|i| (0..k).filter(move |&j| j != col).map(move |j| (i, j)))
                    .map(|(i, j)| entries[i * k + j])
                    .collect();
                let term = pivot * det_rec(&minor, k - 1, m) % m;
                total = if col % 2 == 0 { total + term } else { total - term } % m;
            }
            total
        }
    }
}

fn scalar_times(a: &ModMatrix, c: u64) -> ModMatrix {
    ModMatrix {
        size: a.size,
        modulus: a.modulus,
        data: a
            .data
            .iter()
            .map(|&x| (x as u64 * c % a.modulus) as u16)
            .collect(),
    }
}

pub fn is_unit(x: u64, n: u64) -> bool {
    x.gcd(&n) == 1
}

pub fn mod_inverse(x: u64, n: u64) -> Option<u64> {
    let e = (x as i64).extended_gcd(&(n as i64));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i64) as u64)
}

/// Whether `x` is `1` or `-1` modulo `n`.
pub fn is_sign(x: u64, n: u64) -> bool {
    x == 1 % n || x == n - 1
}

/// `J = [[0, J_r], [-J_r, 0]]` with `J_r` the antidiagonal identity.
pub fn symplectic_form(r: usize, n: u64) -> ModMatrix {
    let size = 2 * r;
    let mut j = ModMatrix {
        size,
        modulus: n,
        data: vec![0; size * size],
    };
    for i in 0..size {
        let x = if i < r { 1 } else { n - 1 % n };
        j.set(i, size - 1 - i, x);
    }
    j
}

fn all_vectors(k: usize, n: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn rank_mod_prime(cols: &[&Vec<u64>], p: u64) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let rows = cols[0].len();
    let mut m: Vec<Vec<u64>> = cols.iter().map(|c| c.iter().map(|x| x % p).collect()).collect();
    let mut rank = 0;
    for row in 0..rows {
        let Some(pivot) = (rank..m.len()).find(|&i| m[i][row] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][row], p).expect("prime field");
        for i in 0..m.len() {
            if i != rank && m[i][row] != 0 {
                let f = m[i][row] * inv % p;
                let pivot_row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row).take(rows) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn from_columns(cols: &[Vec<u64>], n: u64) -> ModMatrix {
    let k = cols.len();
    let mut g = ModMatrix {
        size: k,
        modulus: n,
        data: vec![0; k * k],
    };
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            g.set(i, j, x);
        }
    }
    g
}

/// Elements of `GL_k(Z/n)` passing `keep`, by column backtracking with a
/// rank test modulo every prime divisor of `n`.
pub fn enumerate_gl(k: usize, n: u64, keep: impl Fn(&ModMatrix) -> bool + Sync) -> Vec<ModMatrix> {
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let vectors = all_vectors(k, n);
    fn extend(
        chosen: &mut Vec<Vec<u64>>,
        k: usize,
        n: u64,
        primes: &[u64],
        vectors: &[Vec<u64>],
        keep: &(dyn Fn(&ModMatrix) -> bool + Sync),
        out: &mut Vec<ModMatrix>,
    ) {
        if chosen.len() == k {
            let g = from_columns(chosen, n);
            if keep(&g) {
                out.push(g);
            }
            return;
        }
        for v in vectors {
            chosen.push(v.clone());
            let refs: Vec<&Vec<u64>> = chosen.iter().collect();
            if primes.iter().all(|&p| rank_mod_prime(&refs, p) == chosen.len()) {
                extend(chosen, k, n, primes, vectors, keep, out);
            }
            chosen.pop();
        }
    }
    if k == 0 {
        let g = ModMatrix::identity(0, n);
        return if keep(&g) { vec![g] } else { vec![] };
    }
    vectors
        .par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![first.clone()];
            let refs: Vec<&Vec<u64>> = chosen.iter().collect();
            if primes.iter().all(|&p| rank_mod_prime(&refs, p) == 1) {
                extend(&mut chosen, k, n, &primes, &vectors, &keep, &mut out);
            }
            out
        })
        .collect()
}

fn omega(x: &[u64], y: &[u64], n: u64) -> u64 {
    // x^T J y with J[i][2r-1-i] = 1 for i < r and -1 otherwise
    let size = x.len();
    let r = size / 2;
    let mut acc = 0u64;
    for i in 0..size {
        let t = x[i] * y[size - 1 - i] % n;
        acc = if i < r { acc + t } else { acc + n - t } % n;
    }
    acc
}

/// Elements of `GSp(2r)(Z/n)`, restricted to similitude `sim` if given.
/// `GSp(0)` is realised as `1 x 1` matrices holding the similitude.
pub fn enumerate_gsp(r: usize, n: u64, sim: Option<u64>) -> Vec<ModMatrix> {
    if r == 0 {
        return (0..n)
            .filter(|&c| is_unit(c, n) && sim.is_none_or(|s| s == c))
            .map(|c| ModMatrix::new(1, n, &[c as i64]).expect("valid"))
            .collect();
    }
    let size = 2 * r;
    // column order pairs each basis vector with its symplectic partner
    let order: Vec<usize> = (0..r).flat_map(|i| [i, size - 1 - i]).collect();
    let primes: Vec<u64> = factorize(n).into_iter().map(|(p, _)| p).collect();
    let vectors = all_vectors(size, n);
    let form = |i: usize, j: usize| -> i64 {
        if j == size - 1 - i {
            if i < r {
                1
            } else {
                -1
            }
        } else {
            0
        }
    };

    #[allow(clippy::too_many_arguments)]
    fn extend(
        t: usize,
        cols: &mut Vec<Option<Vec<u64>>>,
        c: u64,
        order: &[usize],
        vectors: &[Vec<u64>],
        n: u64,
        sim: Option<u64>,
        form: &(dyn Fn(usize, usize) -> i64 + Sync),
        out: &mut Vec<ModMatrix>,
    ) {
        if t == order.len() {
            let full: Vec<Vec<u64>> = cols.iter().map(|c| c.clone().expect("filled")).collect();
            out.push(from_columns(&full, n));
            return;
        }
        let j = order[t];
        for v in vectors {
            let mut c_here = c;
            if t == 1 {
                c_here = omega(cols[order[0]].as_ref().expect("set"), v, n);
                if !is_unit(c_here, n) || sim.is_some_and(|s| s != c_here) {
                    continue;
                }
            } else {
                let ok = order[..t].iter().all(|&i| {
                    let target = (form(i, j) * c_here as i64).rem_euclid(n as i64) as u64;
                    omega(cols[i].as_ref().expect("set"), v, n) == target
                });
                if !ok {
                    continue;
                }
            }
            cols[j] = Some(v.clone());
            extend(t + 1, cols, c_here, order, vectors, n, sim, form, out);
            cols[j] = None;
        }
    }

    vectors
        .par_iter()
        .filter(|v| primes.iter().all(|&p| v.iter().any(|x| x % p != 0)))
        .flat_map_iter(|first| {
            let mut cols: Vec<Option<Vec<u64>>> = vec![None; size];
            cols[order[0]] = Some(first.clone());
            let mut out = Vec::new();
            extend(1, &mut cols, 0, &order, &vectors, n, sim, &form, &mut out);
            out
        })
        .collect()
}

/// `(Z/n)^dim` as unipotent matrices `[[1, v], [0, I]]`.
pub fn enumerate_unipotent(dim: usize, n: u64) -> Vec<ModMatrix> {
    all_vectors(dim, n)
        .into_iter()
        .map(|v| {
            let mut g = ModMatrix::identity(dim + 1, n);
            for (j, x) in v.into_iter().enumerate() {
                g.set(0, j + 1, x);
            }
            g
        })
        .collect()
}

/// Whether `g` in `GSp(2d)` stabilises the isotropic flag of `P_S`:
/// `span(e_1..e_{d-s})` for each `s` in `S`.
pub fn in_parabolic(g: &ModMatrix, d: usize, set: &ParabolicSet) -> bool {
    set.indices().iter().all(|&s| {
        let k = d - s;
        (0..k).all(|col| (k..2 * d).all(|row| g.get(row, col) == 0))
    })
}

/// GL blocks of the Levi of `P_S`, as coordinate ranges.
pub fn gl_block_ranges(shape: &LeviShape) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(shape.blocks.len());
    let mut lo = 0;
    for &k in &shape.blocks {
        out.push((lo, lo + k));
        lo += k;
    }
    out
}

/// Image of `P_S(Z)`: `g` in `P_S` with every GL-block determinant and the
/// similitude equal to `+-1`.
pub fn in_integral_parabolic(g: &ModMatrix, d: usize, set: &ParabolicSet, c: u64) -> bool {
    let n = g.modulus();
    in_parabolic(g, d, set)
        && is_sign(c, n)
        && gl_block_ranges(&LeviShape::of(d, set))
            .into_iter()
            .all(|(lo, hi)| is_sign(g.block(lo, hi).det(), n))
}

/// Pink's `Q_r`: `g` in `P_r` acting by the similitude on `span(e_1..e_{d-r})`
/// and trivially on the dual block.
pub fn in_pink_subgroup(g: &ModMatrix, d: usize, r: usize, c: u64) -> bool {
    let n = g.modulus();
    let k = d - r;
    let top = g.block(0, k);
    let bottom = g.block(2 * d - k, 2 * d);
    let set = ParabolicSet::new(d, [r]).expect("r < d");
    in_parabolic(g, d, &set) && top == scalar_times(&ModMatrix::identity(k, n), c) && bottom.is_identity()
}

/// Partition of a finite group into orbits of a subgroup acting by left
/// multiplication.
#[derive(Clone, Debug)]
pub struct Orbits {
    /// Orbit id of each element of the ambient list, numbered by smallest member.
    pub class_of: Vec<u32>,
    /// Smallest member of each orbit.
    pub representatives: Vec<usize>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

/// Sorted ambient group with an index for lookups.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub elements: Vec<ModMatrix>,
    index: HashMap<ModMatrix, u32>,
}

impl GroupTable {
    pub fn new(mut elements: Vec<ModMatrix>) -> Self {
        elements.sort();
        elements.dedup();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i as u32))
            .collect();
        GroupTable { elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &ModMatrix) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    /// Orbits of `sub` acting by left multiplication; `sub` must be a subgroup.
    pub fn left_orbits(&self, sub: &[ModMatrix]) -> Orbits {
        let mut class_of = vec![u32::MAX; self.len()];
        let mut representatives = Vec::new();
        for i in 0..self.len() {
            if class_of[i] != u32::MAX {
                continue;
            }
            let id = representatives.len() as u32;
            representatives.push(i);
            let g = &self.elements[i];
            let members: Vec<usize> = sub
                .par_iter()
                .map(|h| {
                    self.position(&h.mul(g))
                        .expect("subgroup element outside ambient group")
                })
                .collect();
            for j in members {
                debug_assert!(class_of[j] == u32::MAX || class_of[j] == id);
                class_of[j] = id;
            }
        }
        Orbits {
            class_of,
            representatives,
        }
    }
}

/// All products `a * b`, deduplicated and sorted.
pub fn product_set(a: &[ModMatrix], b: &[ModMatrix]) -> Vec<ModMatrix> {
    let mut out: Vec<ModMatrix> = a
        .par_iter()
        .flat_map_iter(|x| b.iter().map(move |y| x.mul(y)))
        .collect();
    out.par_sort();
    out.dedup();
    out
}

fn check_cap(kind: GroupKind, n: u64, cap: u64) -> Result<()> {
    let order = group_order(kind, n)?;
    if order > cap.into() {
        return Err(Error::CapExceeded {
            needed: order.to_string(),
            cap,
        });
    }
    Ok(())
}

/// `GSp(2d)(Z/n)` together with the similitude of each element.
#[derive(Clone, Debug)]
pub struct ShadowModel {
    pub d: usize,
    pub n: u64,
    pub table: GroupTable,
    similitudes: Vec<u64>,
}

impl ShadowModel {
    pub fn new(d: usize, n: u64, cap: u64) -> Result<Self> {
        check_cap(GroupKind::GSp(d), n, cap)?;
        let table = GroupTable::new(enumerate_gsp(d, n, None));
        let similitudes = table
            .elements
            .par_iter()
            .map(|g| g.similitude().expect("enumerated element is in GSp"))
            .collect();
        Ok(ShadowModel {
            d,
            n,
            table,
            similitudes,
        })
    }

    fn filter(&self, pred: impl Fn(&ModMatrix, u64) -> bool + Sync) -> Vec<ModMatrix> {
        self.table
            .elements
            .par_iter()
            .zip(&self.similitudes)
            .filter(|(g, &c)| pred(g, c))
            .map(|(g, _)| g.clone())
            .collect()
    }

    pub fn integral_parabolic(&self, set: &ParabolicSet) -> Vec<ModMatrix> {
        self.filter(|g, c| in_integral_parabolic(g, self.d, set, c))
    }

    pub fn pink_subgroup(&self, r: usize) -> Vec<ModMatrix> {
        self.filter(|g, c| in_pink_subgroup(g, self.d, r, c))
    }

    /// Image of `P_S(Z) Q_r(Z^)` in `GSp(2d)(Z/n)`, `r = min S`.
    pub fn stratum_group(&self, set: &ParabolicSet) -> Vec<ModMatrix> {
        product_set(&self.integral_parabolic(set), &self.pink_subgroup(set.stratum()))
    }

    pub fn stratum_orbits(&self, set: &ParabolicSet) -> Orbits {
        self.table.left_orbits(&self.stratum_group(set))
    }

    /// Distinct similitudes, i.e. the image of `GSp(2d)(Z/n) -> (Z/n)^x`.
    pub fn similitude_image(&self) -> Vec<u64> {
        let mut out = self.similitudes.clone();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Cosets of the integral block-triangular group `P_{l,S}(Z)` inside the
/// integral image of `GL_{d-r}(Z)`, counted in `GL_{d-r}(Z/n)`.
pub fn brute_force_double_cosets(d: usize, n: u64, set: &ParabolicSet, cap: u64) -> Result<usize> {
    let shape = LeviShape::of(d, set);
    let k = d - shape.symp_rank;
    check_cap(GroupKind::GL(k), n, cap)?;
    let ambient = GroupTable::new(enumerate_gl(k, n, |g| is_sign(g.det(), n)));
    let ranges = gl_block_ranges(&shape);
    let sub: Vec<ModMatrix> = ambient
        .elements
        .iter()
        .filter(|g| {
            let triangular = ranges
                .iter()
                .all(|&(lo, hi)| (lo..hi).all(|col| (hi..k).all(|row| g.get(row, col) == 0)));
            triangular && ranges.iter().all(|&(lo, hi)| is_sign(g.block(lo, hi).det(), n))
        })
        .cloned()
        .collect();
    Ok(ambient.left_orbits(&sub).count())
}

/// Order of the kernel of reduction mod `n` on `N_S(Z/m) x prod SL_{n_i}(Z/m)`,
/// found by scanning all matrices congruent to the identity mod `n`.
pub fn brute_force_hecke_index(d: usize, set: &ParabolicSet, n: u64, m: u64, cap: u64) -> Result<usize> {
    if !m.is_multiple_of(n) {
        return Err(Error::Divisibility { n, m });
    }
    let size = 2 * d;
    let lifts = m / n;
    let candidates = (lifts as u128).pow((size * size) as u32);
    if candidates > cap as u128 * 64 {
        return Err(Error::CapExceeded {
            needed: candidates.to_string(),
            cap,
        });
    }
    let shape = LeviShape::of(d, set);
    let ranges = gl_block_ranges(&shape);
    let symp = (d - shape.symp_rank, d + shape.symp_rank);
    let total = candidates as u64;
    let count = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let mut code = code;
            let mut entries = vec![0i64; size * size];
            for (idx, e) in entries.iter_mut().enumerate() {
                let base = if idx / size == idx % size { 1 } else { 0 };
                *e = base + (code % lifts) as i64 * n as i64;
                code /= lifts;
            }
            let g = ModMatrix::new(size, m, &entries).expect("valid");
            in_parabolic(&g, d, set)
                && g.similitude() == Some(1 % m)
                && ranges.iter().all(|&(lo, hi)| g.block(lo, hi).det() == 1 % m)
                && g.block(symp.0, symp.1).is_identity()
        })
        .count();
    Ok(count)
}
