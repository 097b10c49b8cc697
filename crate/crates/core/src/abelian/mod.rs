//! Finitely generated abelian coefficient groups and exact linear algebra.
//!
//! A group is a direct sum `Z/d_1 + ... + Z/d_r` where each `d_i` is either
//! `0` (an infinite cyclic factor, written `Z`) or at least `2`.  The factor
//! list is kept exactly as written; `Z/2 x Z/4` and `Z/8` are different specs
//! even when isomorphic.  [`GroupSpec::canonicalize`] produces the invariant
//! factor form when a canonical representative is wanted.
//!
//! Elements are coordinate vectors with one entry per factor, reduced into
//! `[0, d_i)` on finite factors and kept as arbitrary integers on infinite
//! ones.  All arithmetic is exact; matrix entries are arbitrary-precision
//! because unimodular reduction can grow entries far beyond machine width.

mod matrix;
mod smith;
mod solve;

pub use matrix::IntMatrix;
pub use smith::{canonical_invariant_factors, kernel_mod, snf, SmithDecomposition};
pub use solve::{solve_homogeneous, SolutionEnumerator, SolutionSpace};

pub(crate) use smith::diagonal_with_col_transform;
pub(crate) use solve::solution_space_from_reduction;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// A direct sum of cyclic groups, one `u64` per factor: `0` for `Z`,
/// otherwise the order of the finite factor (never `1`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Arc<[u64]>,
}

impl GroupSpec {
    /// Builds a spec from a factor list, rejecting order-1 factors.
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.contains(&1) {
            return Err(Error::BadGroupSpec(
                "factor 1 is not allowed; drop trivial factors or write \"1\"".into(),
            ));
        }
        Ok(GroupSpec { factors: factors.into() })
    }

    /// The trivial group, written `"1"`.
    pub fn trivial() -> Self {
        GroupSpec { factors: Arc::from([]) }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of cyclic factors as written (not the minimal rank).
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// True when some factor is infinite or of even order, i.e. when 2 fails
    /// to act invertibly.
    pub fn has_even_or_infinite_part(&self) -> bool {
        self.factors.iter().any(|&d| d == 0 || d % 2 == 0)
    }

    /// Total order of the group; `None` when a factor is infinite.
    pub fn order(&self) -> Option<u128> {
        self.factors
            .iter()
            .try_fold(1u128, |acc, &d| if d == 0 { None } else { acc.checked_mul(d as u128) })
    }

    /// Invariant-factor form: `d_1 | d_2 | ... | d_k` followed by the free
    /// factors, computed by Smith-reducing the diagonal relation matrix.
    pub fn canonicalize(&self) -> GroupSpec {
        GroupSpec { factors: canonical_invariant_factors(&self.factors).into() }
    }

    /// The zero element.
    pub fn zero(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            coords: vec![BigInt::zero(); self.rank()],
        }
    }

    /// Builds an element from integer coordinates, reducing finite factors.
    pub fn element(&self, coords: Vec<BigInt>) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates for {}, got {}",
                self.rank(),
                self,
                coords.len()
            )));
        }
        let mut e = GroupElement { group: self.clone(), coords };
        e.reduce();
        Ok(e)
    }

    /// Convenience constructor from machine integers.
    pub fn element_from_i64(&self, coords: &[i64]) -> Result<GroupElement> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }
}

impl fmt::Display for GroupSpec {
    /// Writes the group in the same grammar [`GroupSpec::from_str`]
    /// accepts, compressing runs of `Z` to `Z^k`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let d = self.factors[i];
            if d == 0 {
                let mut run = 1;
                while i + run < self.factors.len() && self.factors[i + run] == 0 {
                    run += 1;
                }
                parts.push(if run == 1 { "Z".into() } else { format!("Z^{run}") });
                i += run;
            } else {
                parts.push(format!("Z/{d}"));
                i += 1;
            }
        }
        write!(f, "{}", parts.join(" x "))
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Parses `group := term (" x " term)* | "1"` with
    /// `term := "Z" | "Z/" digits | "Z^" digits`.
    ///
    /// The separator is exactly `" x "`.  `Z/0`, `Z/1` and `Z^0` are
    /// rejected: an infinite factor is written `Z`, and the trivial group is
    /// written `1`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(GroupSpec::trivial());
        }
        let mut factors = Vec::new();
        for term in s.split(" x ") {
            if term == "Z" {
                factors.push(0);
            } else if let Some(digits) = term.strip_prefix("Z/") {
                let d = parse_digits(digits, term)?;
                if d < 2 {
                    return Err(Error::BadGroupSpec(format!(
                        "\"{term}\": cyclic order must be at least 2 (write Z for an infinite factor)"
                    )));
                }
                factors.push(d);
            } else if let Some(digits) = term.strip_prefix("Z^") {
                let k = parse_digits(digits, term)?;
                if k == 0 {
                    return Err(Error::BadGroupSpec(
                        "\"Z^0\": the trivial group is written \"1\"".into(),
                    ));
                }
                factors.extend(std::iter::repeat_n(0, k as usize));
            } else {
                return Err(Error::BadGroupSpec(format!(
                    "unrecognized term \"{term}\" (expected Z, Z/<n> or Z^<n>)"
                )));
            }
        }
        Ok(GroupSpec { factors: factors.into() })
    }
}

fn parse_digits(digits: &str, term: &str) -> Result<u64> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::BadGroupSpec(format!("\"{term}\": expected decimal digits")));
    }
    digits
        .parse::<u64>()
        .map_err(|_| Error::BadGroupSpec(format!("\"{term}\": value out of range")))
}

/// An element of a [`GroupSpec`], carrying its group so that cross-group
/// arithmetic is detectable.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    group: GroupSpec,
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Reduces each finite coordinate into `[0, d_i)`.
    fn reduce(&mut self) {
        for (c, &d) in self.coords.iter_mut().zip(self.group.factors.iter()) {
            if d != 0 {
                *c = c.mod_floor(&BigInt::from(d));
            }
        }
    }

    pub fn checked_add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_group(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        let mut e = GroupElement { group: self.group.clone(), coords };
        e.reduce();
        Ok(e)
    }

    pub fn checked_sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_group(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        let mut e = GroupElement { group: self.group.clone(), coords };
        e.reduce();
        Ok(e)
    }

    pub fn checked_neg(&self) -> Result<GroupElement> {
        let coords = self.coords.iter().map(|a| -a).collect();
        let mut e = GroupElement { group: self.group.clone(), coords };
        e.reduce();
        Ok(e)
    }

    /// Scalar multiple `n * self`.
    pub fn scale(&self, n: &BigInt) -> GroupElement {
        let coords = self.coords.iter().map(|a| a * n).collect();
        let mut e = GroupElement { group: self.group.clone(), coords };
        e.reduce();
        e
    }

    pub fn scale_i64(&self, n: i64) -> GroupElement {
        self.scale(&BigInt::from(n))
    }

    fn same_group(&self, other: &GroupElement) -> Result<()> {
        if self.group != other.group {
            return Err(Error::MismatchedGroup(self.group.clone(), other.group.clone()));
        }
        Ok(())
    }
}

impl fmt::Display for GroupElement {
    /// `[3,1,0]` — one reduced coordinate per factor.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.group)
    }
}

// The operator impls panic on mismatched groups; use the checked_* methods at
// boundaries where the groups are not already known to agree.

impl std::ops::Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        self.checked_add(rhs).expect("group mismatch in +")
    }
}

impl std::ops::Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        self.checked_sub(rhs).expect("group mismatch in -")
    }
}

impl std::ops::Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        self.checked_neg().expect("negation cannot fail")
    }
}

/// gcd with `0` treated as the absorbing "infinite" order:
/// `gcd_star(0, x) = x`, `gcd_star(0, 0) = 0`.
pub(crate) fn gcd_star(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else if b == 0 {
        a
    } else {
        a.gcd(&b)
    }
}
