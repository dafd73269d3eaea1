//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! [`Real`] extends the `num-traits` arithmetic bounds with the elementary and
//! special functions the analytic code needs. It is implemented for `f64`
//! (fast exploratory runs) and for [`Mp`], a multiple-precision float backed
//! by MPFR whose working precision is controlled by [`set_default_digits`] and
//! [`scoped_bits`].

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use rug::float::Constant;
use rug::integer::Order;
use rug::Float;

/// Extra bits carried beyond the requested number of decimal digits.
pub const GUARD_BITS: u32 = 64;

/// Number of bits needed to represent `digits` decimal digits plus guard bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
}

static DEFAULT_BITS: AtomicU32 = AtomicU32::new(50 * 10 / 3 + 1 + GUARD_BITS);

thread_local! {
    static SCOPED_BITS: Cell<Option<u32>> = const { Cell::new(None) };
}

/// Set the process-wide default precision for [`Mp`] values.
pub fn set_default_digits(digits: u32) {
    DEFAULT_BITS.store(digits_to_bits(digits), AtomicOrdering::SeqCst);
}

/// Current working precision in bits on this thread.
pub fn working_bits() -> u32 {
    SCOPED_BITS
        .with(|c| c.get())
        .unwrap_or_else(|| DEFAULT_BITS.load(AtomicOrdering::SeqCst))
}

/// Working precision expressed in decimal digits (guard bits excluded).
pub fn working_digits() -> u32 {
    (working_bits().saturating_sub(GUARD_BITS) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Restores the previous thread-local precision when dropped.
pub struct PrecisionGuard {
    prev: Option<u32>,
}

impl Drop for PrecisionGuard {
    fn drop(&mut self) {
        let prev = self.prev;
        SCOPED_BITS.with(|c| c.set(prev));
    }
}

/// Temporarily override the working precision on the current thread.
pub fn scoped_bits(bits: u32) -> PrecisionGuard {
    let prev = SCOPED_BITS.with(|c| c.replace(Some(bits)));
    PrecisionGuard { prev }
}

/// Real scalar field used by the analytic routines.
pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    fn from_f64(x: f64) -> Self;
    fn from_i64(x: i64) -> Self;
    fn from_bigint(x: &BigInt) -> Self;
    fn from_mp(x: &Mp) -> Self;
    fn to_f64(&self) -> f64;

    fn from_ratio(x: &BigRational) -> Self {
        Self::from_bigint(x.numer()) / Self::from_bigint(x.denom())
    }

    fn from_u64(x: u64) -> Self {
        Self::from_bigint(&BigInt::from(x))
    }

    fn pi() -> Self;
    /// Unit roundoff at the current working precision.
    fn epsilon() -> Self;
    /// Decimal digits carried at the current working precision.
    fn digits() -> u32;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn powi(&self, e: i32) -> Self;
    fn gamma(&self) -> Self;
    fn ln_gamma(&self) -> Self;
    fn erfc(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Scientific notation with `sig` significant digits.
    fn to_sci(&self, sig: usize) -> String;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn two() -> Self {
        Self::from_i64(2)
    }

    fn half() -> Self {
        Self::from_i64(1) / Self::from_i64(2)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn from_bigint(x: &BigInt) -> Self {
        num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
    }
    fn from_mp(x: &Mp) -> Self {
        x.0.to_f64()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_ratio(x: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn digits() -> u32 {
        15
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn powi(&self, e: i32) -> Self {
        f64::powi(*self, e)
    }
    fn gamma(&self) -> Self {
        libm::tgamma(*self)
    }
    fn ln_gamma(&self) -> Self {
        libm::lgamma(*self)
    }
    fn erfc(&self) -> Self {
        libm::erfc(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn to_sci(&self, sig: usize) -> String {
        format!("{:.*e}", sig.saturating_sub(1), self)
    }
}

/// Multiple-precision float at the thread's working precision.
#[derive(Clone, Debug)]
pub struct Mp(pub Float);

impl Mp {
    pub fn new(x: f64) -> Self {
        Mp(Float::with_val(working_bits(), x))
    }

    /// Parse a decimal literal at the working precision.
    pub fn parse(s: &str) -> Option<Self> {
        let p = Float::parse(s).ok()?;
        Some(Mp(Float::with_val(working_bits(), p)))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Copy rounded to the current working precision.
    pub fn rounded(&self) -> Self {
        Mp(Float::with_val(working_bits(), &self.0))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    /// Upper incomplete gamma function Γ(a, x) via MPFR.
    pub fn gamma_inc(&self, x: &Mp) -> Mp {
        Mp(self.0.clone().gamma_inc(&x.0))
    }
}

fn float_from_bigint(x: &BigInt, bits: u32) -> Float {
    let (sign, digits) = x.to_u32_digits();
    let mut i = rug::Integer::from_digits(&digits, Order::Lsf);
    if sign == Sign::Minus {
        i = -i;
    }
    Float::with_val(bits, i)
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.to_sci(p.max(1))),
            None => write!(f, "{}", self.to_sci(working_digits().max(1) as usize)),
        }
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                Mp(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $m(self, rhs: &'a Mp) -> Mp {
                Mp(self.0.$m(&rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Mp> for &'a Mp {
            type Output = Mp;
            fn $m(self, rhs: &'b Mp) -> Mp {
                Mp(Float::with_val(working_bits(), (&self.0).$m(&rhs.0)))
            }
        }
        impl $atr for Mp {
            fn $am(&mut self, rhs: Mp) {
                self.0.$am(rhs.0);
            }
        }
        impl<'a> $atr<&'a Mp> for Mp {
            fn $am(&mut self, rhs: &'a Mp) {
                self.0.$am(&rhs.0);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, rhs: Mp) -> Mp {
        Mp(self.0 % rhs.0)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Self {
        Mp(Float::new(working_bits()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Self {
        Mp(Float::with_val(working_bits(), 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let p = Float::parse_radix(s, radix as i32)?;
        Ok(Mp(Float::with_val(working_bits(), p)))
    }
}

impl Sum for Mp {
    fn sum<I: Iterator<Item = Mp>>(iter: I) -> Mp {
        let mut acc = Mp::zero();
        for x in iter {
            acc += x;
        }
        acc
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp::new(x)
    }
    fn from_i64(x: i64) -> Self {
        Mp(Float::with_val(working_bits(), x))
    }
    fn from_bigint(x: &BigInt) -> Self {
        Mp(float_from_bigint(x, working_bits()))
    }
    fn from_mp(x: &Mp) -> Self {
        x.rounded()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn from_u64(x: u64) -> Self {
        Mp(Float::with_val(working_bits(), x))
    }
    fn pi() -> Self {
        Mp(Float::with_val(working_bits(), Constant::Pi))
    }
    fn epsilon() -> Self {
        let b = working_bits();
        Mp(Float::with_val(b, Float::i_exp(1, 1 - b as i32)))
    }
    fn digits() -> u32 {
        working_digits()
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn powf(&self, e: &Self) -> Self {
        Mp(Float::with_val(self.0.prec(), rug::ops::Pow::pow(&self.0, &e.0)))
    }
    fn powi(&self, e: i32) -> Self {
        Mp(Float::with_val(self.0.prec(), rug::ops::Pow::pow(&self.0, e)))
    }
    fn gamma(&self) -> Self {
        Mp(self.0.clone().gamma())
    }
    fn ln_gamma(&self) -> Self {
        Mp(self.0.clone().ln_gamma())
    }
    fn erfc(&self) -> Self {
        Mp(self.0.clone().erfc())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn to_sci(&self, sig: usize) -> String {
        if self.0.is_zero() {
            return format!("{:.*e}", sig.saturating_sub(1), 0.0);
        }
        let s = self.0.to_string_radix(10, Some(sig));
        normalize_sci(&s)
    }
}

// MPFR prints "1.2340e5" style mantissas; rewrite into the `f64` layout so both
// scalar types produce identical text for identical values.
fn normalize_sci(s: &str) -> String {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits: String = int.chars().chain(frac.chars()).collect();
    let lead = digits.chars().position(|c| c != '0').unwrap_or(0);
    let digits = &digits[lead..];
    let e = exp + int.len() as i64 - 1 - lead as i64;
    let body = if digits.len() > 1 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        digits.to_string()
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, e)
}

/// Exact rational scalar.
pub type Exact = BigRational;
