//! Exponent vectors and the graded-lexicographic monomial order.

use std::cmp::Ordering;
use std::fmt;

use super::PolyError;

/// Exponent vector `(a_1, …, a_n)` of the monomial `y_1^{a_1}⋯y_n^{a_n}`.
///
/// `Ord` is the graded-lex order: total degree first, then the first index
/// where the exponents differ, larger exponent wins (so `y_1 > y_2 > … > y_n`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(exponents: Vec<u32>) -> Self {
        Exponent(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    /// `y_var^power`, with `var` zero-based.
    pub fn var_power(nvars: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        Exponent(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn mul(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.0.len(), other.0.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Exponent) -> Option<Exponent> {
        if !self.divides(other) {
            return None;
        }
        Some(Exponent(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl std::ops::Index<usize> for Exponent {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

fn graded_lex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| {
        a.iter()
            .zip(b)
            .find(|(x, y)| x != y)
            .map_or(Ordering::Equal, |(x, y)| x.cmp(y))
    })
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        graded_lex(&self.0, &other.0)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `y1^2*y3`; the empty monomial renders as `1`.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_monomial(f, &self.0, "y")
    }
}

pub(crate) fn write_monomial(f: &mut impl fmt::Write, exps: &[u32], symbol: &str) -> fmt::Result {
    let mut first = true;
    for (i, &a) in exps.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write!(f, "{symbol}{}", i + 1)?;
        if a > 1 {
            write!(f, "^{a}")?;
        }
    }
    if first {
        f.write_char('1')?;
    }
    Ok(())
}

/// Monomial orders supported by the crate.
///
/// Only graded-lex is implemented; the type exists so call sites state the
/// order they rely on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    #[default]
    GradedLex,
}

impl MonomialOrder {
    pub fn compare(&self, a: &Exponent, b: &Exponent) -> Ordering {
        match self {
            MonomialOrder::GradedLex => graded_lex(&a.0, &b.0),
        }
    }
}

/// Compare two exponent vectors in the given order.
pub fn compare_monomials(a: &Exponent, b: &Exponent, order: MonomialOrder) -> Result<Ordering, PolyError> {
    if a.nvars() != b.nvars() {
        return Err(PolyError::RingMismatch {
            left: a.nvars(),
            right: b.nvars(),
        });
    }
    Ok(order.compare(a, b))
}
