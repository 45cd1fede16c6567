//! Orders of finite matrix groups over `Z/n`, congruence indices, Euler
//! characteristics of principal congruence subgroups of `SL_k(Z)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::shadow::{self, ModMatrix};

/// Default bound on the size of brute-force enumerations.
pub const DEFAULT_CAP: u64 = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    GL(usize),
    SL(usize),
    /// `Sp(2r)`, parametrised by `r`.
    Sp(usize),
    /// `GSp(2r)`, parametrised by `r`; `GSp(0)` is the unit group.
    GSp(usize),
    /// Additive group `(Z/n)^D`, realised as unipotent matrices.
    NUnipotent(usize),
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::GL(k) => write!(f, "GL({k})"),
            GroupKind::SL(k) => write!(f, "SL({k})"),
            GroupKind::Sp(r) => write!(f, "Sp({})", 2 * r),
            GroupKind::GSp(r) => write!(f, "GSp({})", 2 * r),
            GroupKind::NUnipotent(dim) => write!(f, "N({dim})"),
        }
    }
}

/// Reduced fraction with a positive denominator, printed as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn from_integer(x: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(x.into()))
    }

    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl std::str::FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("{x}: {e}")))
        };
        match s.split_once('/') {
            Some((p, q)) => {
                let q = parse(q)?;
                if q.is_zero() {
                    return Err(Error::Parse(format!("{s}: zero denominator")));
                }
                Ok(ExactRational::new(parse(p)?, q))
            }
            None => Ok(ExactRational::from_integer(parse(s)?)),
        }
    }
}

impl Add for ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: Self) -> Self {
        ExactRational(self.0 + rhs.0)
    }
}

impl Sub for ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: Self) -> Self {
        ExactRational(self.0 - rhs.0)
    }
}

impl Mul for ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: Self) -> Self {
        ExactRational(self.0 * rhs.0)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> Self {
        ExactRational(-self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn pow(p: u64, e: usize) -> BigUint {
    BigUint::from(p).pow(e as u32)
}

fn prime_power_order(kind: GroupKind, p: u64, e: u32) -> BigUint {
    let q = p.pow(e);
    let lift = e as usize - 1;
    let units = BigUint::from(q - q / p);
    match kind {
        GroupKind::GL(k) => {
            let mut order = pow(p, lift * k * k);
            for i in 0..k {
                order *= pow(p, k) - pow(p, i);
            }
            order
        }
        GroupKind::SL(0) => BigUint::one(),
        GroupKind::SL(k) => prime_power_order(GroupKind::GL(k), p, e) / units,
        GroupKind::Sp(r) => {
            let mut order = pow(p, lift * (2 * r * r + r)) * pow(p, r * r);
            for i in 1..=r {
                order *= pow(p, 2 * i) - BigUint::one();
            }
            order
        }
        GroupKind::GSp(r) => prime_power_order(GroupKind::Sp(r), p, e) * units,
        GroupKind::NUnipotent(dim) => pow(q, dim),
    }
}

/// `|kind(Z/n)|`, multiplicative over the prime powers of `n`. `n = 1` gives 1.
pub fn group_order(kind: GroupKind, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BadModulus(n));
    }
    Ok(factorize(n)
        .into_iter()
        .map(|(p, e)| prime_power_order(kind, p, e))
        .product())
}

/// Order of the image of `GL_k(Z)` in `GL_k(Z/n)`: `|SL_k(Z/n)|` times the
/// number of residues `{1, -1} mod n`.
pub fn integral_image_order(k: usize, n: u64) -> Result<BigUint> {
    let sl = group_order(GroupKind::SL(k), n)?;
    Ok(if k > 0 && n > 2 { sl * 2u32 } else { sl })
}

/// `|kind(Z/m)| / |kind(Z/n)|` for `n | m`.
pub fn congruence_index(kind: GroupKind, n: u64, m: u64) -> Result<BigUint> {
    if n == 0 || m == 0 {
        return Err(Error::BadModulus(0));
    }
    if !m.is_multiple_of(n) {
        return Err(Error::Divisibility { n, m });
    }
    let (q, rem) = group_order(kind, m)?.div_rem(&group_order(kind, n)?);
    debug_assert!(rem.is_zero());
    Ok(q)
}

/// Bernoulli numbers `B_0 .. B_k` with `B_1 = -1/2`.
pub fn bernoulli(k: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * BigRational::from_integer(binom.clone());
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `zeta(1 - i) = -B_i / i` for `i >= 2`.
pub fn zeta_at_negative(i: usize) -> BigRational {
    assert!(i >= 2);
    let b = bernoulli(i);
    -b[i].clone() / BigRational::from_integer(BigInt::from(i))
}

/// `e(Gamma(n))` for `Gamma(n)` the principal congruence subgroup of `SL_k(Z)`:
/// `|SL_k(Z/n)| * prod_{i=2}^{k} zeta(1 - i)`.
pub fn euler_char_congruence(k: usize, n: u64) -> Result<ExactRational> {
    if n < 3 {
        return Err(Error::LevelConstraint { n });
    }
    let mut value = BigRational::from_integer(BigInt::from(group_order(GroupKind::SL(k), n)?));
    for i in 2..=k {
        value *= zeta_at_negative(i);
    }
    Ok(ExactRational(value))
}

/// Every element of `kind(Z/n)`, sorted.
pub fn brute_force_group(kind: GroupKind, n: u64, cap: u64) -> Result<Vec<ModMatrix>> {
    if n == 0 {
        return Err(Error::BadModulus(n));
    }
    let order = group_order(kind, n)?;
    if order > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            needed: order.to_string(),
            cap,
        });
    }
    let mut out = match kind {
        GroupKind::GL(k) => shadow::enumerate_gl(k, n, |_| true),
        GroupKind::SL(k) => shadow::enumerate_gl(k, n, |g| g.det() == 1 % n),
        GroupKind::Sp(r) => shadow::enumerate_gsp(r, n, Some(1 % n)),
        GroupKind::GSp(r) => shadow::enumerate_gsp(r, n, None),
        GroupKind::NUnipotent(dim) => shadow::enumerate_unipotent(dim, n),
    };
    out.sort();
    Ok(out)
}
