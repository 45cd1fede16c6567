//! Weights, Levi dominance, Weyl dimensions, graded virtual representations and
//! the central-torus truncations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{LeviShape, ParabolicSet, WeylElt};

/// Character `(a_1, .., a_d; m0)` of the diagonal torus of `GSp(2d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub a: Vec<i64>,
    pub m0: i64,
}

impl Weight {
    pub fn new(a: Vec<i64>, m0: i64) -> Self {
        Weight { a, m0 }
    }

    pub fn zero(d: usize) -> Self {
        Weight { a: vec![0; d], m0: 0 }
    }

    pub fn genus(&self) -> usize {
        self.a.len()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            m0: self.m0 + other.m0,
        }
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
            m0: self.m0 - other.m0,
        }
    }

    pub fn negated(&self) -> Weight {
        Weight {
            a: self.a.iter().map(|x| -x).collect(),
            m0: -self.m0,
        }
    }

    /// `-w_0(self)`: the highest weight of the contragredient representation.
    pub fn dual(&self) -> Weight {
        Weight {
            a: self.a.clone(),
            m0: -self.m0 - self.a.iter().sum::<i64>(),
        }
    }

    /// Dominance for `GSp(2d)`: `a_1 >= .. >= a_d >= 0`.
    pub fn is_dominant(&self) -> bool {
        self.a.windows(2).all(|w| w[0] >= w[1]) && self.a.last().is_none_or(|&x| x >= 0)
    }

    pub fn require_dominant(&self) -> Result<()> {
        if self.is_dominant() {
            Ok(())
        } else {
            Err(Error::NonDominant {
                weight: self.to_string(),
                group: format!("GSp({})", 2 * self.genus()),
            })
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ";{})", self.m0)
    }
}

/// Parses `a1,a2,..,ad[@m0]`.
impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (coords, m0) = match s.split_once('@') {
            Some((c, m)) => (
                c,
                m.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("{m}: {e}")))?,
            ),
            None => (s, 0),
        };
        let a = coords
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("{x}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Weight { a, m0 })
    }
}

/// `sum a_i + 2 m0`, the exponent of the centre.
pub fn central_weight(mu: &Weight) -> i64 {
    mu.a.iter().sum::<i64>() + 2 * mu.m0
}

/// Pairing with the cocharacter of `S_s`, which has `t_i = x^2` for
/// `i <= d - s`, `t_i = x` beyond, and similitude `x^2`.
pub fn torus_pairing(mu: &Weight, s: usize) -> Result<i64> {
    let d = mu.genus();
    if s >= d {
        return Err(Error::OutOfRange {
            what: "parabolic",
            index: s,
            bound: d,
        });
    }
    let cut = d - s;
    Ok(2 * mu.a[..cut].iter().sum::<i64>() + mu.a[cut..].iter().sum::<i64>() + 2 * mu.m0)
}

/// `w(lambda + rho) - rho`.
pub fn dot_action(w: &WeylElt, lambda: &Weight, rho: &Weight) -> Weight {
    w.apply(&lambda.add(rho)).sub(rho)
}

/// Highest weight of an irreducible of `L_S`, split into its blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeviWeight {
    pub shape: LeviShape,
    pub gl: Vec<Vec<i64>>,
    pub symp: Vec<i64>,
    pub m0: i64,
}

impl LeviWeight {
    pub fn from_weight(shape: &LeviShape, mu: &Weight) -> Result<Self> {
        if shape.genus() != mu.genus() {
            return Err(Error::Dimension {
                expected: shape.genus(),
                got: mu.genus(),
            });
        }
        let mut gl = Vec::with_capacity(shape.blocks.len());
        let mut start = 0;
        for &size in &shape.blocks {
            gl.push(mu.a[start..start + size].to_vec());
            start += size;
        }
        Ok(LeviWeight {
            shape: shape.clone(),
            gl,
            symp: mu.a[start..].to_vec(),
            m0: mu.m0,
        })
    }

    pub fn to_weight(&self) -> Weight {
        let mut a: Vec<i64> = self.gl.iter().flatten().copied().collect();
        a.extend(&self.symp);
        Weight { a, m0: self.m0 }
    }

    pub fn is_dominant(&self) -> bool {
        let decreasing = |v: &[i64]| v.windows(2).all(|w| w[0] >= w[1]);
        self.gl.iter().all(|b| decreasing(b))
            && decreasing(&self.symp)
            && self.symp.last().is_none_or(|&x| x >= 0)
    }
}

/// Dimension of the `L_S` irreducible with highest weight `mu`.
pub fn weyl_dim(mu: &LeviWeight) -> Result<BigUint> {
    if !mu.is_dominant() {
        return Err(Error::NonDominant {
            weight: mu.to_weight().to_string(),
            group: format!("Levi {:?} x GSp({})", mu.shape.blocks, 2 * mu.shape.symp_rank),
        });
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for block in &mu.gl {
        let k = block.len();
        for i in 0..k {
            for j in i + 1..k {
                num *= (block[i] - block[j] + (j - i) as i64) as u64;
                den *= (j - i) as u64;
            }
        }
    }
    let r = mu.symp.len();
    let shifted: Vec<i64> = (0..r).map(|i| mu.symp[i] + (r - i) as i64).collect();
    let rho: Vec<i64> = (0..r).map(|i| (r - i) as i64).collect();
    for i in 0..r {
        for j in i + 1..r {
            num *= (shifted[i] * shifted[i] - shifted[j] * shifted[j]) as u64;
            den *= (rho[i] * rho[i] - rho[j] * rho[j]) as u64;
        }
        num *= shifted[i] as u64;
        den *= rho[i] as u64;
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Threshold in `Z` extended by `-inf` and `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Finite(i64),
    PosInf,
}

impl Bound {
    pub fn shift(self, by: i64) -> Bound {
        match self {
            Bound::Finite(x) => Bound::Finite(x + by),
            other => other,
        }
    }

    pub fn negate(self) -> Bound {
        match self {
            Bound::NegInf => Bound::PosInf,
            Bound::Finite(x) => Bound::Finite(-x),
            Bound::PosInf => Bound::NegInf,
        }
    }

    /// `x < self`.
    pub fn exceeds(self, x: i64) -> bool {
        Bound::Finite(x) < self
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::Finite(x) => write!(f, "{x}"),
            Bound::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(Bound::PosInf),
            "-inf" => Ok(Bound::NegInf),
            x => x
                .parse::<i64>()
                .map(Bound::Finite)
                .map_err(|e| Error::Parse(format!("{x}: {e}"))),
        }
    }
}

/// Thresholds `(t_0, .., t_{d-1})` indexed by parabolic index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    pub t: Vec<Bound>,
}

impl Profile {
    pub fn new(t: Vec<Bound>) -> Self {
        Profile { t }
    }

    pub fn constant(d: usize, b: Bound) -> Self {
        Profile { t: vec![b; d] }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn get(&self, s: usize) -> Bound {
        self.t[s]
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.t.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Profile {
            t: s.split(',').map(str::parse).collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TruncMode {
    Below,
    AtLeast,
}

/// Keep summands whose `S_s`-pairing is `< bound` or `>= bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TruncCond {
    pub s: usize,
    pub bound: Bound,
    pub mode: TruncMode,
}

impl TruncCond {
    pub fn below(s: usize, bound: Bound) -> Self {
        TruncCond {
            s,
            bound,
            mode: TruncMode::Below,
        }
    }

    pub fn at_least(s: usize, bound: Bound) -> Self {
        TruncCond {
            s,
            bound,
            mode: TruncMode::AtLeast,
        }
    }

    pub fn holds(&self, pairing: i64) -> bool {
        match self.mode {
            TruncMode::Below => self.bound.exceeds(pairing),
            TruncMode::AtLeast => !self.bound.exceeds(pairing),
        }
    }
}

/// Per-summand bookkeeping: central weight, sheaf weight `-central` and the
/// pairings with `S_s` for `s` in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub central_weight: i64,
    pub sheaf_weight: i64,
    pub pairings: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand<'a> {
    pub degree: i64,
    pub weight: &'a Weight,
    pub mult: i64,
}

/// Graded virtual `L_S`-representation: a finite `Z`-combination of
/// irreducibles placed in cohomological degrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedVirtualRep {
    set: ParabolicSet,
    shape: LeviShape,
    entries: BTreeMap<(i64, Weight), i64>,
}

impl GradedVirtualRep {
    pub fn new(d: usize, set: ParabolicSet) -> Self {
        GradedVirtualRep {
            shape: LeviShape::of(d, &set),
            set,
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&self) -> &ParabolicSet {
        &self.set
    }

    pub fn shape(&self) -> &LeviShape {
        &self.shape
    }

    pub fn genus(&self) -> usize {
        self.shape.genus()
    }

    pub fn insert(&mut self, degree: i64, weight: Weight, mult: i64) {
        debug_assert_eq!(weight.genus(), self.genus());
        let key = (degree, weight);
        let total = self.entries.get(&key).copied().unwrap_or(0) + mult;
        if total == 0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, total);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Summands sorted by degree, then weight.
    pub fn summands(&self) -> impl Iterator<Item = Summand<'_>> {
        self.entries.iter().map(|((degree, weight), &mult)| Summand {
            degree: *degree,
            weight,
            mult,
        })
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.values().copied()
    }

    pub fn annotate(&self, weight: &Weight) -> Annotation {
        let central = central_weight(weight);
        Annotation {
            central_weight: central,
            sheaf_weight: -central,
            pairings: self
                .set
                .indices()
                .iter()
                .map(|&s| (s, torus_pairing(weight, s).expect("s < d")))
                .collect(),
        }
    }

    pub fn levi_weight(&self, weight: &Weight) -> LeviWeight {
        LeviWeight::from_weight(&self.shape, weight).expect("genus matches")
    }

    pub fn scaled(&self, k: i64) -> GradedVirtualRep {
        let mut out = GradedVirtualRep {
            set: self.set.clone(),
            shape: self.shape.clone(),
            entries: BTreeMap::new(),
        };
        if k != 0 {
            out.entries = self.entries.iter().map(|(key, m)| (key.clone(), m * k)).collect();
        }
        out
    }

    /// Degree-wise sum; both sides must live on the same `S`.
    pub fn plus(&self, other: &GradedVirtualRep) -> GradedVirtualRep {
        assert_eq!(self.set, other.set, "summing modules over different parabolics");
        let mut out = self.clone();
        for ((deg, w), &m) in &other.entries {
            out.insert(*deg, w.clone(), m);
        }
        out
    }

    /// Shifts every degree by `by`.
    pub fn shifted(&self, by: i64) -> GradedVirtualRep {
        GradedVirtualRep {
            set: self.set.clone(),
            shape: self.shape.clone(),
            entries: self
                .entries
                .iter()
                .map(|((deg, w), &m)| ((deg + by, w.clone()), m))
                .collect(),
        }
    }

    /// `sum (-1)^deg * mult * dim`.
    pub fn euler_dimension(&self) -> Result<BigInt> {
        let mut total = BigInt::zero();
        for s in self.summands() {
            let dim = BigInt::from(weyl_dim(&self.levi_weight(s.weight))?);
            let term = dim * s.mult;
            if s.degree.rem_euclid(2) == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        Ok(total)
    }

    /// Virtual dimension in each degree.
    pub fn dimensions_by_degree(&self) -> Result<BTreeMap<i64, BigInt>> {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for s in self.summands() {
            let dim = BigInt::from(weyl_dim(&self.levi_weight(s.weight))?);
            *out.entry(s.degree).or_default() += dim * s.mult;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Divides all multiplicities by their gcd and makes the first one
    /// positive; returns the extracted factor.
    pub(crate) fn make_primitive(&mut self) -> i64 {
        let g = self
            .entries
            .values()
            .fold(0i64, |acc, &m| num_integer::gcd(acc, m));
        if g == 0 {
            return 0;
        }
        let sign = if self.entries.values().next().is_some_and(|m| m.is_negative()) {
            -1
        } else {
            1
        };
        let factor = g * sign;
        for m in self.entries.values_mut() {
            *m /= factor;
        }
        factor
    }
}

/// Keeps exactly the summands whose pairings satisfy every condition.
pub fn truncate(module: &GradedVirtualRep, conds: &[TruncCond]) -> GradedVirtualRep {
    let d = module.genus();
    let mut out = GradedVirtualRep::new(d, module.set.clone());
    out.entries = module
        .entries
        .iter()
        .filter(|((_, w), _)| {
            conds
                .iter()
                .all(|c| c.holds(torus_pairing(w, c.s).expect("valid parabolic index")))
        })
        .map(|(k, &m)| (k.clone(), m))
        .collect();
    out
}

/// Like [`truncate`], but each summand `mu` is tested through
/// `pairing(mu) - central_weight(mu)`, so that bounds are measured relative to
/// the weight of the coefficient system the summand came from.
pub fn truncate_centered(module: &GradedVirtualRep, conds: &[TruncCond]) -> GradedVirtualRep {
    let d = module.genus();
    let mut out = GradedVirtualRep::new(d, module.set.clone());
    out.entries = module
        .entries
        .iter()
        .filter(|((_, w), _)| {
            let centre = central_weight(w);
            conds
                .iter()
                .all(|c| c.holds(torus_pairing(w, c.s).expect("valid parabolic index") - centre))
        })
        .map(|(k, &m)| (k.clone(), m))
        .collect();
    out
}

/// Weights with multiplicities.
pub type WeightList = Vec<(Weight, i64)>;

/// Splits `V` into the part of central weight `< t` and the part `>= t`.
pub fn global_weight_split(v: &[(Weight, i64)], t: Bound) -> Result<(WeightList, WeightList)> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (w, m) in v {
        w.require_dominant()?;
        if t.exceeds(central_weight(w)) {
            lower.push((w.clone(), *m));
        } else {
            upper.push((w.clone(), *m));
        }
    }
    Ok((lower, upper))
}
