//! Sparse polynomials in jet variables over the exact rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by the monomial order, so
//! iterating a polynomial always visits the smallest term first — the
//! same convention used for display and for smallest-term extraction.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::scalar::{binom, Scalar};
use crate::space::{JetVar, VarSpace};

/// Which weight is used when splitting a polynomial into graded pieces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WeightMode {
    /// A variable of derivative order `l` weighs `l + 1`.
    OrderPlusOne,
    /// A variable of derivative order `l` weighs `l`.
    OrderOnly,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    space: VarSpace,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(space: VarSpace) -> Self {
        Polynomial {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: VarSpace, c: Scalar) -> Self {
        let mut p = Polynomial::zero(space);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(space: VarSpace) -> Self {
        Polynomial::constant(space, Scalar::one())
    }

    pub fn var(space: VarSpace, v: JetVar) -> Result<Self> {
        space.check_var(v)?;
        let mut p = Polynomial::zero(space);
        p.terms.insert(Monomial::var(v), Scalar::one());
        Ok(p)
    }

    pub fn monomial(space: VarSpace, m: Monomial, c: Scalar) -> Result<Self> {
        for v in m.vars() {
            space.check_var(v)?;
        }
        let mut p = Polynomial::zero(space);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        Ok(p)
    }

    pub fn from_terms(
        space: VarSpace,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self> {
        let mut p = Polynomial::zero(space);
        for (m, c) in terms {
            for v in m.vars() {
                space.check_var(v)?;
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The smallest term in the monomial order.
    pub fn smallest_term(&self) -> Result<(&Monomial, &Scalar)> {
        self.terms
            .iter()
            .next()
            .ok_or(Error::ZeroPolynomial)
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.space);
        }
        Polynomial {
            space: self.space,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            space: self.space,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.space);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative: `x^(l)` maps to `x^(l+1)` and the product
    /// rule applies term by term.
    pub fn differentiate(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.space);
        for (m, c) in &self.terms {
            let factors = m.factors();
            for (idx, &(v, e)) in factors.iter().enumerate() {
                // d/dt (v^e) = e * v^(e-1) * v'
                let mut new_factors: Vec<(JetVar, u32)> = factors.to_vec();
                new_factors[idx].1 -= 1;
                new_factors.push((v.raised(), 1));
                out.add_term(
                    Monomial::from_factors(new_factors),
                    c * &Scalar::from_int(e as i64),
                );
            }
        }
        out
    }

    /// Derivative iterated `k` times.
    pub fn differentiate_n(&self, k: usize) -> Polynomial {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.differentiate();
        }
        p
    }

    /// Largest derivative order appearing in any term.
    pub fn max_order(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.max_order())
            .max()
            .unwrap_or(0)
    }

    /// Split into graded pieces by the chosen weight.
    pub fn weight_decompose(&self, mode: WeightMode) -> BTreeMap<u64, Polynomial> {
        let mut out: BTreeMap<u64, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let w = match mode {
                WeightMode::OrderPlusOne => m.weight(),
                WeightMode::OrderOnly => m.gg_weight(),
            };
            out.entry(w)
                .or_insert_with(|| Polynomial::zero(self.space))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// True when every term has the same total degree `degree`.
    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    /// Evaluate by assigning a scalar to every variable.
    pub fn evaluate(&self, assign: &dyn Fn(JetVar) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in m.factors() {
                term *= assign(v).pow(e);
            }
            acc += term;
        }
        acc
    }

    /// Substitute a polynomial for every variable. All images must live
    /// in `target`, which becomes the space of the result.
    pub fn substitute(
        &self,
        target: VarSpace,
        image: &dyn Fn(JetVar) -> Polynomial,
    ) -> Result<Polynomial> {
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for &(v, e) in m.factors() {
                let img = image(v);
                target.check_same(img.space())?;
                term = &term * &img.pow(e);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `binom(n, k)` as a polynomial-friendly scalar; exposed here so
    /// matrix builders and chart maps share one convention.
    pub fn binom_scalar(n: i64, k: i64) -> Scalar {
        binom(n, k)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.space, rhs.space, "polynomial space mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.space, rhs.space, "polynomial space mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.space, rhs.space, "polynomial space mismatch");
        let mut out = Polynomial::zero(self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            space: self.space,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Smallest term first.
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", m.render(&self.space))?;
            } else {
                write!(f, "{mag}*{}", m.render(&self.space))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Scalar,
    mono: Monomial,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    space: VarSpace,
    terms: Vec<TermRepr>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            space: self.space,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRepr {
                    coeff: c.clone(),
                    mono: m.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        Polynomial::from_terms(repr.space, repr.terms.into_iter().map(|t| (t.mono, t.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space1() -> VarSpace {
        VarSpace::affine(0, 1).unwrap()
    }

    fn x(order: usize) -> Polynomial {
        Polynomial::var(space1(), JetVar::new(1, order)).unwrap()
    }

    #[test]
    fn arithmetic_basics() {
        let p = &x(0) + &x(1);
        let q = &p * &p;
        // (x + x')^2 = x^2 + 2 x x' + x'^2
        assert_eq!(q.num_terms(), 3);
        assert_eq!(
            q.coeff(&Monomial::from_factors([
                (JetVar::new(1, 0), 1),
                (JetVar::new(1, 1), 1)
            ])),
            Scalar::from_int(2)
        );
        assert!((&q - &q).is_zero());
    }

    #[test]
    fn derivative_product_rule() {
        // (x^2)' = 2 x x'
        let sq = &x(0) * &x(0);
        let d = sq.differentiate();
        assert_eq!(d.num_terms(), 1);
        let (m, c) = d.smallest_term().unwrap();
        assert_eq!(c, &Scalar::from_int(2));
        assert_eq!(m.weight(), 3);
        // Second derivative: 2 x' x' + 2 x x''
        let d2 = d.differentiate();
        assert_eq!(d2.num_terms(), 2);
    }

    #[test]
    fn display_ascending() {
        // x''*x has a larger smallest... render order check:
        // 2 x' x' - x x'' prints the x'x' term first.
        let xpxp = &x(1) * &x(1);
        let xxpp = &x(0) * &x(2);
        let p = &xpxp.scale(&Scalar::from_int(2)) - &xxpp;
        assert_eq!(p.to_string(), "2*x[1]^(1)*x[1]^(1) - x[1]*x[1]^(2)");
    }

    #[test]
    fn smallest_term_of_zero_fails() {
        assert!(Polynomial::zero(space1()).smallest_term().is_err());
    }

    #[test]
    fn weight_split() {
        let p = &(&x(0) * &x(1)) + &x(2);
        let by_weight = p.weight_decompose(WeightMode::OrderPlusOne);
        assert_eq!(by_weight.len(), 1);
        assert!(by_weight.contains_key(&3));
        let by_gg = p.weight_decompose(WeightMode::OrderOnly);
        assert_eq!(
            by_gg.keys().copied().collect::<Vec<_>>(),
            vec![1, 2]
        );
    }

    #[test]
    fn evaluate_and_substitute() {
        let p = &(&x(0) * &x(0)) + &x(1);
        let val = p.evaluate(&|v| Scalar::from_int(v.order as i64 + 2));
        // x -> 2, x' -> 3: 4 + 3
        assert_eq!(val, Scalar::from_int(7));

        let sp = space1();
        let sub = p
            .substitute(sp, &|v| {
                if v.order == 0 {
                    x(1)
                } else {
                    Polynomial::one(sp)
                }
            })
            .unwrap();
        // x -> x', x' -> 1 gives x'^2 + 1
        assert_eq!(sub.num_terms(), 2);
    }

    #[test]
    fn json_round_trip() {
        let p = &x(0).scale(&Scalar::from_fraction(-3, 2)) + &(&x(1) * &x(1));
        let json = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}
