//! The exterior square of a coefficient group.
//!
//! For `A = Z/d_1 + ... + Z/d_r` this is `(A (x) A) / <x(x)y + y(x)x>` —
//! note the quotient is by the *symmetrizer*, not the alternating relations,
//! so diagonal classes `x ^ x` survive as 2-torsion instead of vanishing.
//!
//! Concretely:
//!
//! * one slot per factor pair `i < j` of order `t_ij = gcd*(d_i, d_j)`,
//!   where `gcd*(0, x) = x` and `gcd*(0, 0) = 0`;
//! * one order-2 diagonal slot per factor with `d_i = 0` or `d_i` even
//!   (for odd `d_i` the relation `2 g_ii = 0` kills the slot).
//!
//! In these coordinates `x ^ y` has off-diagonal entries
//! `x_i y_j - x_j y_i mod t_ij` and diagonal entries `x_i y_i mod 2`.
//! Consequences worth remembering: `x ^ y = -(y ^ x)` on the nose,
//! `2 (x ^ x) = 0`, and `(x+y) ^ (x+y) = x ^ x + y ^ y` because the cross
//! terms cancel against each other.
//!
//! [`lambda2_oracle`] recomputes the isomorphism type from the defining
//! presentation (r^2 tensor generators, symmetrizer and order relations,
//! Smith reduction) and is the independent check that the slot model above
//! is the right group.

use crate::abelian::{canonical_invariant_factors, gcd_star, snf, GroupElement, GroupSpec, IntMatrix};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;

/// Slot layout of the exterior square of one [`GroupSpec`].
#[derive(Clone, PartialEq, Eq)]
pub struct Lambda2Basis {
    group: GroupSpec,
    /// `(i, j, t_ij)` for every `i < j`, in lexicographic order.  Slots with
    /// `t_ij = 1` are kept (their coordinate is always 0) so the layout
    /// depends only on the rank.
    off: Vec<(usize, usize, u64)>,
    /// Factor indices owning an order-2 diagonal slot.
    diag: Vec<usize>,
}

impl Lambda2Basis {
    pub fn for_group(g: &GroupSpec) -> Lambda2Basis {
        let d = g.factors();
        let mut off = Vec::new();
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                off.push((i, j, gcd_star(d[i], d[j])));
            }
        }
        let diag = (0..d.len()).filter(|&i| d[i] == 0 || d[i].is_multiple_of(2)).collect();
        Lambda2Basis { group: g.clone(), off, diag }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Off-diagonal slots `(i, j, t_ij)`.
    pub fn off_diagonal(&self) -> &[(usize, usize, u64)] {
        &self.off
    }

    /// Factors carrying a diagonal order-2 slot.
    pub fn diagonal(&self) -> &[usize] {
        &self.diag
    }

    /// Orders of all slots: the `t_ij` list followed by a 2 per diagonal
    /// slot.  Not canonicalized.
    pub fn slot_orders(&self) -> Vec<u64> {
        let mut orders: Vec<u64> = self.off.iter().map(|&(_, _, t)| t).collect();
        orders.extend(std::iter::repeat_n(2, self.diag.len()));
        orders
    }
}

/// An element of the exterior square, in the slot coordinates of
/// [`Lambda2Basis`].
#[derive(Clone, PartialEq, Eq)]
pub struct Wedge2Element {
    group: GroupSpec,
    off: Vec<BigInt>,
    diag: Vec<u8>,
}

impl Wedge2Element {
    pub fn zero(g: &GroupSpec) -> Wedge2Element {
        let basis = Lambda2Basis::for_group(g);
        Wedge2Element {
            group: g.clone(),
            off: vec![BigInt::zero(); basis.off.len()],
            diag: vec![0; basis.diag.len()],
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn is_zero(&self) -> bool {
        self.off.iter().all(Zero::is_zero) && self.diag.iter().all(|&d| d == 0)
    }

    fn reduce(&mut self) {
        let basis = Lambda2Basis::for_group(&self.group);
        for (c, &(_, _, t)) in self.off.iter_mut().zip(basis.off.iter()) {
            if t != 0 {
                *c = c.mod_floor(&BigInt::from(t));
            }
        }
    }

    fn same_group(&self, other: &Wedge2Element) -> Result<()> {
        if self.group != other.group {
            return Err(Error::MismatchedGroup(self.group.clone(), other.group.clone()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Wedge2Element) -> Result<Wedge2Element> {
        self.same_group(other)?;
        let off = self.off.iter().zip(&other.off).map(|(a, b)| a + b).collect();
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| (a + b) % 2).collect();
        let mut w = Wedge2Element { group: self.group.clone(), off, diag };
        w.reduce();
        Ok(w)
    }

    pub fn checked_neg(&self) -> Result<Wedge2Element> {
        let off = self.off.iter().map(|a| -a).collect();
        let mut w = Wedge2Element { group: self.group.clone(), off, diag: self.diag.clone() };
        w.reduce();
        Ok(w)
    }

    pub fn checked_sub(&self, other: &Wedge2Element) -> Result<Wedge2Element> {
        self.checked_add(&other.checked_neg()?)
    }

    /// Scalar multiple `n * self`.
    pub fn scale(&self, n: &BigInt) -> Wedge2Element {
        let off = self.off.iter().map(|a| a * n).collect();
        let parity = if n.is_even() { 0 } else { 1 };
        let diag = self.diag.iter().map(|&d| d * parity).collect();
        let mut w = Wedge2Element { group: self.group.clone(), off, diag };
        w.reduce();
        w
    }

    pub fn scale_i64(&self, n: i64) -> Wedge2Element {
        self.scale(&BigInt::from(n))
    }

    /// Multiplies each slot by the inverse of `n` modulo that slot's order.
    /// Only defined when every slot order is odd and coprime to `n`; used to
    /// undo the factor 4 in odd-torsion groups.
    pub fn scale_by_inverse_of(&self, n: u64) -> Result<Wedge2Element> {
        if !self.diag.is_empty() {
            return Err(Error::GroupHasEvenTorsion(self.group.clone()));
        }
        let basis = Lambda2Basis::for_group(&self.group);
        let mut off = Vec::with_capacity(self.off.len());
        for (c, &(_, _, t)) in self.off.iter().zip(basis.off.iter()) {
            if t == 0 {
                return Err(Error::GroupHasEvenTorsion(self.group.clone()));
            }
            if t == 1 {
                off.push(BigInt::zero());
                continue;
            }
            let inv = modular_inverse(n % t, t).ok_or_else(|| {
                Error::PreconditionFailed(format!("{n} is not invertible mod {t}"))
            })?;
            off.push((c * BigInt::from(inv)).mod_floor(&BigInt::from(t)));
        }
        Ok(Wedge2Element { group: self.group.clone(), off, diag: Vec::new() })
    }
}

fn modular_inverse(a: u64, m: u64) -> Option<u64> {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(m));
    if e.gcd.is_one() {
        Some(u64::try_from(&e.x.mod_floor(&BigInt::from(m))).expect("inverse fits"))
    } else {
        None
    }
}

/// The wedge `x ^ y`.
pub fn wedge(x: &GroupElement, y: &GroupElement) -> Result<Wedge2Element> {
    if x.group() != y.group() {
        return Err(Error::MismatchedGroup(x.group().clone(), y.group().clone()));
    }
    let basis = Lambda2Basis::for_group(x.group());
    let xc = x.coords();
    let yc = y.coords();
    let off = basis
        .off
        .iter()
        .map(|&(i, j, _)| &xc[i] * &yc[j] - &xc[j] * &yc[i])
        .collect();
    let diag = basis
        .diag
        .iter()
        .map(|&i| if (&xc[i] * &yc[i]).is_even() { 0 } else { 1 })
        .collect();
    let mut w = Wedge2Element { group: x.group().clone(), off, diag };
    w.reduce();
    Ok(w)
}

impl std::ops::Add for &Wedge2Element {
    type Output = Wedge2Element;
    fn add(self, rhs: &Wedge2Element) -> Wedge2Element {
        self.checked_add(rhs).expect("group mismatch in +")
    }
}

impl std::ops::Sub for &Wedge2Element {
    type Output = Wedge2Element;
    fn sub(self, rhs: &Wedge2Element) -> Wedge2Element {
        self.checked_sub(rhs).expect("group mismatch in -")
    }
}

impl std::ops::Neg for &Wedge2Element {
    type Output = Wedge2Element;
    fn neg(self) -> Wedge2Element {
        self.checked_neg().expect("negation cannot fail")
    }
}

impl fmt::Display for Wedge2Element {
    /// Nonzero slots only, `e[i^j]=c` off-diagonal and `d[i]=1` diagonal
    /// (1-based factor indices), space-separated in lexicographic order of
    /// the slot strings; the zero element prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = Lambda2Basis::for_group(&self.group);
        let mut parts: Vec<String> = Vec::new();
        for (c, &(i, j, _)) in self.off.iter().zip(basis.off.iter()) {
            if !c.is_zero() {
                parts.push(format!("e[{}^{}]={}", i + 1, j + 1, c));
            }
        }
        for (&d, &i) in self.diag.iter().zip(basis.diag.iter()) {
            if d != 0 {
                parts.push(format!("d[{}]=1", i + 1));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        parts.sort();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Wedge2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in Lambda2({})", self.group)
    }
}

/// Isomorphism type of the exterior square from the slot model, in
/// invariant-factor form.
pub fn lambda2_invariant_factors(g: &GroupSpec) -> Vec<u64> {
    canonical_invariant_factors(&Lambda2Basis::for_group(g).slot_orders())
}

/// Maximum rank accepted by [`lambda2_oracle`]; the presentation has `r^2`
/// generators, so this caps the reduction at 64 columns.
pub const ORACLE_MAX_RANK: usize = 8;

/// Recomputes the isomorphism type of the exterior square from first
/// principles: present `A (x) A` on the `r^2` generators `g_ij = e_i (x) e_j`
/// with the order relations `d_i g_ij = d_j g_ij = 0`, impose the
/// symmetrizer relations `g_ij + g_ji = 0` (so `2 g_ii = 0`), and read the
/// cokernel off of the Smith form.  Returns invariant factors, free rank
/// last as zeros.
pub fn lambda2_oracle(g: &GroupSpec) -> Result<Vec<u64>> {
    let r = g.rank();
    if r > ORACLE_MAX_RANK {
        return Err(Error::RankTooLarge { rank: r, max: ORACLE_MAX_RANK });
    }
    let d = g.factors();
    let n = r * r;
    let idx = |i: usize, j: usize| i * r + j;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if d[i] != 0 {
                let mut row = vec![BigInt::zero(); n];
                row[idx(i, j)] = BigInt::from(d[i]);
                rows.push(row);
            }
            if d[j] != 0 {
                let mut row = vec![BigInt::zero(); n];
                row[idx(i, j)] = BigInt::from(d[j]);
                rows.push(row);
            }
        }
    }
    for i in 0..r {
        for j in i..r {
            let mut row = vec![BigInt::zero(); n];
            if i == j {
                row[idx(i, i)] = BigInt::from(2);
            } else {
                row[idx(i, j)] = BigInt::one();
                row[idx(j, i)] = BigInt::one();
            }
            rows.push(row);
        }
    }
    let m = if rows.is_empty() {
        IntMatrix::zero(0, n)
    } else {
        IntMatrix::from_rows(rows)
    };
    let dec = snf(&m);
    debug_assert!(dec.verify(&m));
    let mut factors: Vec<u64> = dec
        .d
        .diagonal_entries()
        .iter()
        .filter(|e| !e.is_one())
        .map(|e| u64::try_from(e).expect("cokernel factor fits"))
        .collect();
    // columns beyond the rank of the relation matrix are free generators
    factors.extend(std::iter::repeat_n(0, n - m.rows().min(n)));
    Ok(canonical_invariant_factors(&factors))
}
