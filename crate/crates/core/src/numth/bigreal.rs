//! Arbitrary-precision reals backed by `astro-float`, with an explicit
//! precision in bits and helpers for significant-figure rounding.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Working precision used for every criterion evaluation unless overridden.
pub const DEFAULT_PRECISION: usize = 256;
/// Ceiling for the precision-doubling loop in [`compare_stable`].
pub const MAX_PRECISION: usize = 4096;
/// Environment variable overriding the starting precision.
pub const PRECISION_ENV: &str = "RFKN_PRECISION_BITS";
/// Relative gap below which a comparison is re-run at higher precision.
pub const STABILITY_GAP_LOG2: i32 = -32;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Starting precision: `RFKN_PRECISION_BITS` if set (never below 256), else 256.
pub fn start_precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(DEFAULT_PRECISION, |p| p.clamp(DEFAULT_PRECISION, MAX_PRECISION))
}

#[derive(Clone, Debug)]
pub struct BigReal {
    v: BigFloat,
    p: usize,
}

impl BigReal {
    fn wrap(v: BigFloat, p: usize) -> Self {
        debug_assert!(!v.is_nan(), "BigReal operation produced NaN");
        BigReal { v, p }
    }

    pub fn zero(p: usize) -> Self {
        Self::from_u64(0, p)
    }

    pub fn one(p: usize) -> Self {
        Self::from_u64(1, p)
    }

    pub fn from_u64(n: u64, p: usize) -> Self {
        let mut v = BigFloat::from_u64(n, p.max(64));
        v.set_precision(p, RM).expect("precision");
        Self::wrap(v, p)
    }

    /// Exact conversion, then rounding to `p` bits.
    pub fn from_biguint(n: &BigUint, p: usize) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let words = n.to_u64_digits();
        let e = i32::try_from(words.len() * 64).expect("integer too large for BigReal");
        let mut v = BigFloat::from_words(&words, Sign::Pos, e);
        v.set_precision(p, RM).expect("precision");
        Self::wrap(v, p)
    }

    pub fn from_ratio(num: &BigUint, den: &BigUint, p: usize) -> Self {
        &Self::from_biguint(num, p) / &Self::from_biguint(den, p)
    }

    /// Parses a decimal literal such as `8.5`, `1310.0623` or `2.132e15`.
    pub fn parse(s: &str, p: usize) -> Result<Self> {
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, p, RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Parse(format!("not a real number: `{s}`")));
        }
        Ok(Self::wrap(v, p))
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    /// The same value rounded (or padded) to `p` bits.
    pub fn with_precision(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("precision");
        Self::wrap(v, p)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.v.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.v.is_int()
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.p)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.p, RM), self.p)
    }

    pub fn ln(&self) -> Self {
        let v = with_consts(|cc| self.v.ln(self.p, RM, cc));
        Self::wrap(v, self.p)
    }

    pub fn exp(&self) -> Self {
        let v = with_consts(|cc| self.v.exp(self.p, RM, cc));
        Self::wrap(v, self.p)
    }

    pub fn pow(&self, e: &BigReal) -> Self {
        let p = self.p.max(e.p);
        let v = with_consts(|cc| self.v.pow(&e.v, p, RM, cc));
        Self::wrap(v, p)
    }

    pub fn powi(&self, n: u64) -> Self {
        Self::wrap(self.v.powi(n as usize, self.p, RM), self.p)
    }

    pub fn ln2(p: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.ln_2(p, RM)), p)
    }

    pub fn pi(p: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(p, RM)), p)
    }

    /// `2^t`, exact when `t` is a non-negative integer.
    pub fn pow2(t: &BigReal) -> Self {
        if t.is_integer() && !t.v.is_negative() {
            if let Some(k) = t.floor_biguint().to_u64() {
                return Self::from_biguint(&(BigUint::one() << k), t.p);
            }
        }
        (t * &Self::ln2(t.p)).exp()
    }

    /// `floor(x)` for `x >= 0`.
    pub fn floor_biguint(&self) -> BigUint {
        assert!(!self.v.is_negative(), "floor_biguint of a negative value");
        if self.is_zero() {
            return BigUint::zero();
        }
        let (words, _, _, e, _) = self.v.as_raw_parts().expect("finite value");
        let m = BigUint::from_slice(
            &words.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
        );
        let shift = e as i64 - 64 * words.len() as i64;
        if shift >= 0 {
            m << shift as u64
        } else {
            m >> (-shift) as u64
        }
    }

    /// `ceil(x)` for `x >= 0`.
    pub fn ceil_biguint(&self) -> BigUint {
        let f = self.floor_biguint();
        if self.is_integer() {
            f
        } else {
            f + 1u32
        }
    }

    /// Approximate `log2 |x|` as f64, valid far beyond the f64 range of `x`.
    pub fn log2_estimate(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (words, _, _, e, _) = self.v.as_raw_parts().expect("finite value");
        let top = *words.last().unwrap() as f64;
        e as f64 - 64.0 + top.log2()
    }

    pub fn log10_estimate(&self) -> f64 {
        self.log2_estimate() * std::f64::consts::LOG10_2
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (words, _, sign, e, _) = self.v.as_raw_parts().expect("finite value");
        let top = *words.last().unwrap() as f64;
        let mag = top * 2f64.powi(e - 64);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    fn pow10(e: i64, p: usize) -> Self {
        let ten = Self::from_u64(10, p);
        let r = ten.powi(e.unsigned_abs());
        if e < 0 {
            r.recip()
        } else {
            r
        }
    }

    /// Exact `floor(log10 x)` for `x > 0` (within working precision).
    pub fn decimal_exponent(&self) -> i64 {
        assert!(self.is_positive(), "decimal exponent of a non-positive value");
        let mut e = self.log10_estimate().floor() as i64;
        while Self::pow10(e, self.p) > *self {
            e -= 1;
        }
        while Self::pow10(e + 1, self.p) <= *self {
            e += 1;
        }
        e
    }

    fn round_sig(&self, sig: u32, up: bool) -> SigFigs {
        assert!(sig >= 1);
        let mut exponent = self.decimal_exponent();
        let scaled = self / &Self::pow10(exponent - sig as i64 + 1, self.p);
        let mut digits = if up {
            scaled.ceil_biguint()
        } else {
            (&scaled + &Self::parse("0.5", self.p).unwrap()).floor_biguint()
        };
        if digits == BigUint::from(10u32).pow(sig) {
            digits = BigUint::from(10u32).pow(sig - 1);
            exponent += 1;
        }
        SigFigs { digits, sig, exponent }
    }

    /// Rounds up (towards +infinity) to `sig` significant figures.
    pub fn ceil_sig(&self, sig: u32) -> SigFigs {
        self.round_sig(sig, true)
    }

    /// Rounds half-up to `sig` significant figures.
    pub fn nearest_sig(&self, sig: u32) -> SigFigs {
        self.round_sig(sig, false)
    }

    /// Scientific notation with `sig` significant figures, e.g. `7.0495e21`.
    pub fn to_sci(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let s = self.abs().nearest_sig(sig).to_sci();
        if self.v.is_negative() {
            format!("-{s}")
        } else {
            s
        }
    }

    /// `|self - other| / |other|`.
    pub fn rel_gap(&self, other: &BigReal) -> BigReal {
        &(self - other).abs() / &other.abs()
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(12))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let p = self.p.max(rhs.p);
                BigReal::wrap(self.v.$m(&rhs.v, p, RM), p)
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(BigFloat::neg(&self.v), self.p)
    }
}

/// A positive number rounded to a fixed count of significant figures:
/// `digits * 10^(exponent - sig + 1)` with `digits` having exactly `sig` digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SigFigs {
    pub digits: BigUint,
    pub sig: u32,
    pub exponent: i64,
}

impl SigFigs {
    /// `d.ddd` followed by `e<exponent>` (no exponent when it is zero).
    pub fn to_sci(&self) -> String {
        let s = self.digits.to_string();
        let mantissa = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
        if self.exponent == 0 {
            mantissa
        } else {
            format!("{mantissa}e{}", self.exponent)
        }
    }

    /// Value at `p` bits.
    pub fn to_bigreal(&self, p: usize) -> BigReal {
        &BigReal::from_biguint(&self.digits, p) * &BigReal::pow10(self.exponent - self.sig as i64 + 1, p)
    }
}

impl fmt::Display for SigFigs {
    /// Plain integers are printed as such when every printed digit sits left of
    /// the decimal point, e.g. `14459`; otherwise scientific, e.g. `2.24e13`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 && self.exponent + 1 == self.sig as i64 {
            write!(f, "{}", self.digits)
        } else {
            f.write_str(&self.to_sci())
        }
    }
}

impl FromStr for SigFigs {
    type Err = Error;

    /// Accepts `14459`, `2.24e13`, `5.71e3157`, `0.19113`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad significant-figure literal `{s}`"));
        let (mant, exp) = match s.trim().split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
            None => (s.trim(), 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all = format!("{int}{frac}");
        let lead = all.len() - all.trim_start_matches('0').len();
        let body = &all[lead..];
        if body.is_empty() {
            return Err(bad());
        }
        let digits: BigUint = body.parse().map_err(|_| bad())?;
        let sig = body.len() as u32;
        // position of the leading digit relative to the decimal point
        let exponent = exp + int.len() as i64 - 1 - lead as i64;
        Ok(SigFigs { digits, sig, exponent })
    }
}

impl TryFrom<String> for SigFigs {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SigFigs> for String {
    fn from(s: SigFigs) -> String {
        s.to_string()
    }
}

/// Outcome of a precision-stable comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StableCmp {
    /// `None` when the operands stayed within the stability gap at maximum precision.
    pub ordering: Option<Ordering>,
    pub precision_bits: usize,
}

/// Evaluates `(lhs, rhs)` at the starting precision and compares them. When
/// the relative gap is below 2^-32 the evaluation is repeated at doubled
/// precision, up to [`MAX_PRECISION`]; if still that close, the result is a boundary.
pub fn compare_stable<F>(mut eval: F) -> Result<StableCmp>
where
    F: FnMut(usize) -> Result<(BigReal, BigReal)>,
{
    let mut p = start_precision();
    loop {
        let (lhs, rhs) = eval(p)?;
        let gap = lhs.rel_gap(&rhs);
        let tiny = BigReal::pow2(&BigReal::from_u64(32, p)).recip();
        if rhs.is_zero() || gap >= tiny {
            return Ok(StableCmp { ordering: lhs.partial_cmp(&rhs), precision_bits: p });
        }
        if p * 2 > MAX_PRECISION {
            return Ok(StableCmp { ordering: None, precision_bits: p });
        }
        p *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    #[test]
    fn integer_round_trip() {
        let n = BigUint::from(11u32).pow(300) + 7u32;
        let r = BigReal::from_biguint(&n, 2048);
        assert_eq!(r.floor_biguint(), n);
        assert_eq!(BigReal::from_u64(12345, P).floor_biguint(), BigUint::from(12345u32));
        assert!(BigReal::from_u64(12345, P).is_integer());
    }

    #[test]
    fn floor_and_ceil() {
        let x = BigReal::parse("14458.797", P).unwrap();
        assert_eq!(x.floor_biguint(), BigUint::from(14458u32));
        assert_eq!(x.ceil_biguint(), BigUint::from(14459u32));
        assert_eq!(BigReal::parse("0.25", P).unwrap().floor_biguint(), BigUint::zero());
    }

    #[test]
    fn transcendental() {
        let two = BigReal::from_u64(2, P);
        let x = two.ln().exp();
        assert!(x.rel_gap(&two).log2_estimate() < -240.0);
        let t = BigReal::parse("8.5", P).unwrap();
        let a = BigReal::pow2(&t);
        let b = two.pow(&t);
        assert!(a.rel_gap(&b).log2_estimate() < -240.0);
        assert!((a.to_f64() - 2f64.powf(8.5)).abs() < 1e-9);
        assert_eq!(BigReal::pow2(&BigReal::from_u64(6, P)), BigReal::from_u64(64, P));
    }

    #[test]
    fn significant_figures() {
        let x = BigReal::parse("14458.797", P).unwrap();
        assert_eq!(x.ceil_sig(5).to_string(), "14459");
        assert_eq!(x.nearest_sig(3).to_string(), "1.45e4");
        let y = BigReal::parse("2.2324e13", P).unwrap();
        assert_eq!(y.ceil_sig(3).to_string(), "2.24e13");
        assert_eq!(y.nearest_sig(3).to_string(), "2.23e13");
        let z = BigReal::parse("9.999e99", P).unwrap();
        assert_eq!(z.ceil_sig(3).to_string(), "1.00e100");
        let huge = BigReal::parse("5.7058e3157", 512).unwrap();
        assert_eq!(huge.ceil_sig(3).to_string(), "5.71e3157");
        let small = BigReal::parse("0.191126", P).unwrap();
        assert_eq!(small.ceil_sig(5).to_sci(), "1.9113e-1");
    }

    #[test]
    fn sig_fig_literals() {
        for (s, digits, sig, exp) in [
            ("14459", 14459u32, 5, 4),
            ("2.24e13", 224, 3, 13),
            ("5.71e3157", 571, 3, 3157),
            ("0.19113", 19113, 5, -1),
            ("11", 11, 2, 1),
        ] {
            let f: SigFigs = s.parse().unwrap();
            assert_eq!((f.digits.clone(), f.sig, f.exponent), (BigUint::from(digits), sig, exp), "{s}");
        }
        assert!("".parse::<SigFigs>().is_err());
        assert!("1.2.3".parse::<SigFigs>().is_err());
        let f: SigFigs = "2.132e15".parse().unwrap();
        assert_eq!(f.to_bigreal(P), BigReal::parse("2.132e15", P).unwrap());
    }

    #[test]
    fn stable_comparison() {
        let c = compare_stable(|p| Ok((BigReal::from_u64(3, p), BigReal::from_u64(2, p)))).unwrap();
        assert_eq!(c.ordering, Some(Ordering::Greater));
        assert_eq!(c.precision_bits, DEFAULT_PRECISION);
        let c = compare_stable(|p| Ok((BigReal::from_u64(2, p), BigReal::from_u64(2, p)))).unwrap();
        assert_eq!(c.ordering, None);
        assert_eq!(c.precision_bits, MAX_PRECISION);
    }
}
