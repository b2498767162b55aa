//! Exact integer and rational kernel.
//!
//! Every rationality decision in the crate bottoms out in [`is_perfect_square`]
//! or [`sqrt_rational`]. Integers are arbitrary precision ([`BigInt`]) and
//! rationals are always kept reduced with a positive denominator.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("square root of a negative value: {0}")]
    NegativeSqrt(String),
}

// 64 * 63 * 65 * 11; squares mod each factor are tabulated below.
const RESIDUE_MODULUS: u32 = 2_882_880;

struct ResidueTables {
    mod64: [bool; 64],
    mod63: [bool; 63],
    mod65: [bool; 65],
    mod11: [bool; 11],
}

const fn square_table<const N: usize>() -> [bool; N] {
    let mut t = [false; N];
    let mut i = 0;
    while i < N {
        t[(i * i) % N] = true;
        i += 1;
    }
    t
}

static RESIDUES: ResidueTables = ResidueTables {
    mod64: square_table::<64>(),
    mod63: square_table::<63>(),
    mod65: square_table::<65>(),
    mod11: square_table::<11>(),
};

#[inline]
fn residue_may_be_square(r: u32) -> bool {
    RESIDUES.mod64[(r % 64) as usize]
        && RESIDUES.mod63[(r % 63) as usize]
        && RESIDUES.mod65[(r % 65) as usize]
        && RESIDUES.mod11[(r % 11) as usize]
}

/// Floor square root of a nonnegative integer by Newton iteration.
///
/// Returns `(root, exact)` with `root = ⌊√n⌋` and `exact ⇔ root² = n`.
pub fn int_sqrt(n: &BigInt) -> Result<(BigInt, bool), ExactError> {
    if n.is_negative() {
        return Err(ExactError::NegativeSqrt(n.to_string()));
    }
    let root = BigInt::from(isqrt_biguint(n.magnitude()));
    let exact = &root * &root == *n;
    Ok((root, exact))
}

fn isqrt_biguint(n: &BigUint) -> BigUint {
    if let Some(small) = n.to_u128() {
        return BigUint::from(small.isqrt());
    }
    // start above the root: 2^ceil(bits/2) > √n
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Exact perfect-square test. Negative values are never squares.
pub fn is_perfect_square(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Minus => false,
        Sign::NoSign => true,
        Sign::Plus => {
            let r = (n.magnitude() % RESIDUE_MODULUS).to_u32().unwrap_or(0);
            if !residue_may_be_square(r) {
                return false;
            }
            let root = isqrt_biguint(n.magnitude());
            &root * &root == *n.magnitude()
        }
    }
}

/// Fixed-width perfect-square test; agrees with [`is_perfect_square`].
#[inline]
pub fn is_perfect_square_u128(n: u128) -> bool {
    if !residue_may_be_square((n % RESIDUE_MODULUS as u128) as u32) {
        return false;
    }
    let r = n.isqrt();
    r * r == n
}

/// Square root of a nonnegative integer when it is a perfect square.
pub fn exact_sqrt_u128(n: u128) -> Option<u128> {
    if !is_perfect_square_u128(n) {
        return None;
    }
    Some(n.isqrt())
}

/// Whether a nonnegative rational is the square of a rational.
pub fn is_rational_square(q: &Rational) -> bool {
    !q.is_negative() && is_perfect_square(q.numer()) && is_perfect_square(q.denom())
}

/// Rational square root of `q`, present iff both reduced parts are perfect squares.
pub fn sqrt_rational(q: &Rational) -> Result<Option<Rational>, ExactError> {
    if q.is_negative() {
        return Err(ExactError::NegativeSqrt(q.to_string()));
    }
    let (num, num_exact) = int_sqrt(q.numer())?;
    if !num_exact {
        return Ok(None);
    }
    let (den, den_exact) = int_sqrt(q.denom())?;
    if !den_exact {
        return Ok(None);
    }
    Ok(Some(Rational::new(num, den)))
}

/// Rational from an integer numerator and denominator, reduced.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Decimal rendering of a rational. Denominators of the form 2^i·5^j give
/// a terminating expansion; anything else falls back to `num/den`.
pub fn to_decimal_string(q: &Rational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let den = q.denom();
    let mut rest = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", q.numer(), den);
    }
    let digits = twos.max(fives);
    let scaled = q.numer() * num_traits::pow(BigInt::from(10), digits as usize) / den;
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (whole, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, whole, frac)
}
