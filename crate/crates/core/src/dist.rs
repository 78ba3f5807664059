//! Exact probability distributions over state indices.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::set::StateSet;

/// A finitely supported distribution with exact rational weights.
///
/// Entries are kept sorted by state and never hold zero, so the key set is
/// the support.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dist {
    entries: Vec<(usize, BigRational)>,
}

impl Dist {
    /// Builds a distribution, merging repeated states and dropping zeros.
    pub fn new<I: IntoIterator<Item = (usize, BigRational)>>(items: I) -> Result<Self, Error> {
        let mut entries: Vec<(usize, BigRational)> = items.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, BigRational)> = Vec::with_capacity(entries.len());
        for (q, p) in entries {
            if p.is_negative() {
                return Err(Error::InvalidModel(format!("negative probability {p} on state {q}")));
            }
            match merged.last_mut() {
                Some((last, acc)) if *last == q => *acc += p,
                _ => merged.push((q, p)),
            }
        }
        merged.retain(|(_, p)| !p.is_zero());
        let total: BigRational = merged.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidModel(format!("distribution sums to {total}, not 1")));
        }
        Ok(Dist { entries: merged })
    }

    pub fn dirac(q: usize) -> Self {
        Dist {
            entries: vec![(q, BigRational::one())],
        }
    }

    /// Uniform distribution over a nonempty set.
    pub fn uniform(set: &StateSet) -> Result<Self, Error> {
        let n = set.len();
        if n == 0 {
            return Err(Error::Precondition("uniform distribution over an empty set".into()));
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(n));
        Ok(Dist {
            entries: set.iter().map(|q| (q, p.clone())).collect(),
        })
    }

    pub fn prob(&self, q: usize) -> BigRational {
        match self.entries.binary_search_by_key(&q, |e| e.0) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.entries.iter().map(|(q, p)| (*q, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    pub fn support(&self, universe: usize) -> StateSet {
        StateSet::from_iter(universe, self.entries.iter().map(|e| e.0))
    }

    pub fn max_state(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn min_prob(&self) -> Option<&BigRational> {
        self.entries.iter().map(|e| &e.1).min()
    }

    /// Total mass on `set`.
    pub fn mass(&self, set: &StateSet) -> BigRational {
        self.entries
            .iter()
            .filter(|(q, _)| set.contains(*q))
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Largest mass on a single member of `set`.
    pub fn max_mass(&self, set: &StateSet) -> BigRational {
        self.entries
            .iter()
            .filter(|(q, _)| set.contains(*q))
            .map(|(_, p)| p.clone())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Relabels states through `f`, merging entries that collide.
    pub fn map_states(&self, f: impl Fn(usize) -> usize) -> Dist {
        let mut out: Vec<(usize, BigRational)> = self.entries.iter().map(|(q, p)| (f(*q), p.clone())).collect();
        out.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, BigRational)> = Vec::with_capacity(out.len());
        for (q, p) in out {
            match merged.last_mut() {
                Some((last, acc)) if *last == q => *acc += p,
                _ => merged.push((q, p)),
            }
        }
        Dist { entries: merged }
    }

    /// Builds from entries already known to be positive, sorted and summing to one.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, BigRational)>) -> Dist {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Dist { entries }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(q, p)| (q, p.to_string())))
            .finish()
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let neg = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if !int_digits.chars().all(|c| c.is_ascii_digit()) || (int_digits.is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac_part);
    let mut num: BigInt = digits.parse().ok()?;
    if neg {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(num, den))
}

/// Canonical text for a probability: `1`, `0`, or `p/q` in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a nonnegative rational as a decimal with `digits` fractional digits, truncated.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let int_part = &scaled / &scale;
    let frac_part = (&scaled % &scale).abs();
    if digits == 0 {
        return int_part.to_string();
    }
    format!("{}.{:0>width$}", int_part, frac_part.to_string(), width = digits)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `1 - 2^-i` as an exact rational.
pub fn one_minus_pow2(i: u32) -> BigRational {
    let den = BigInt::one() << i;
    BigRational::new(&den - BigInt::one(), den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1/2"), Some(r(1, 2)));
        assert_eq!(parse_rational("2/4"), Some(r(1, 2)));
        assert_eq!(parse_rational("0.125"), Some(r(1, 8)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1"), Some(r(1, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&r(1, 3), 4), "0.3333");
        assert_eq!(format_decimal(&r(1, 1), 2), "1.00");
        assert_eq!(format_decimal(&r(1, 20), 3), "0.050");
        assert_eq!(format_rational(&r(4, 8)), "1/2");
        assert_eq!(format_rational(&r(1, 1)), "1");
    }

    #[test]
    fn rejects_bad_totals() {
        assert!(Dist::new([(0, r(1, 2)), (1, r(1, 3))]).is_err());
        let d = Dist::new([(1, r(1, 2)), (0, r(1, 4)), (1, r(1, 4)), (2, r(0, 1))]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.prob(1), r(3, 4));
        assert_eq!(one_minus_pow2(3), r(7, 8));
    }
}
