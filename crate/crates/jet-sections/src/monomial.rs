//! Monomials in jet variables with the graded comparison used to pick
//! out smallest terms of determinants.
//!
//! A monomial is stored as a list of `(variable, exponent)` factors
//! sorted with the *largest* variable first. Two monomials are compared
//! by repeatedly looking at their largest remaining variables: if they
//! differ, the monomial holding the larger variable is larger;
//! otherwise the shared variable is consumed with multiplicity and the
//! comparison recurses. The empty monomial (the constant `1`) is the
//! global minimum. This is exactly a lexicographic comparison of the
//! fully expanded, descending variable sequences, with a proper prefix
//! counting as smaller.

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::space::JetVar;

/// A product of jet variables, kept in canonical form: factors sorted
/// descending by variable, all exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(JetVar, u32)>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn var(v: JetVar) -> Self {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    /// Build from arbitrary factors; duplicates are merged and zero
    /// exponents dropped.
    pub fn from_factors(factors: impl IntoIterator<Item = (JetVar, u32)>) -> Self {
        let mut factors: Vec<(JetVar, u32)> =
            factors.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(JetVar, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((last, exp)) if *last == v => *exp += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factors in descending variable order.
    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.factors
    }

    pub fn exponent_of(&self, v: JetVar) -> u32 {
        self.factors
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    /// Total degree (number of variable factors with multiplicity).
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Weight where a variable of derivative order `l` counts `l + 1`.
    pub fn weight(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(v, e)| (v.order as u64 + 1) * e as u64)
            .sum()
    }

    /// Weight where a variable of derivative order `l` counts `l`.
    pub fn gg_weight(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(v, e)| v.order as u64 * e as u64)
            .sum()
    }

    /// Largest derivative order appearing, or `None` for the constant.
    pub fn max_order(&self) -> Option<usize> {
        self.factors.iter().map(|&(v, _)| v.order).max()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        // Merge two descending factor lists.
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = self.factors[i];
            let (b, eb) = other.factors[j];
            match b.cmp(&a) {
                Ordering::Less => {
                    out.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { factors: out }
    }

    pub fn mul_var(&self, v: JetVar) -> Monomial {
        self.mul(&Monomial::var(v))
    }

    pub fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial {
            factors: self.factors.iter().map(|&(v, k)| (v, k * e)).collect(),
        }
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for &(v, e) in &self.factors {
            let mut rem = e;
            if j < other.factors.len() && other.factors[j].0 == v {
                let need = other.factors[j].1;
                if need > e {
                    return None;
                }
                rem = e - need;
                j += 1;
            }
            if rem > 0 {
                out.push((v, rem));
            }
        }
        if j == other.factors.len() {
            Some(Monomial { factors: out })
        } else {
            None
        }
    }

    pub fn is_divisible_by(&self, other: &Monomial) -> bool {
        self.try_div(other).is_some()
    }

    /// All distinct variables, largest first.
    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    pub fn render(&self, space: &crate::space::VarSpace) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        // Display smaller variables first, so a term reads like
        // `x x^(2)` rather than the internal descending order.
        let mut parts: Vec<String> = Vec::new();
        for &(v, e) in self.factors.iter().rev() {
            let base = space.render_var(v);
            for _ in 0..e {
                parts.push(base.clone());
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        let (mut ea, mut eb) = (0u32, 0u32);
        loop {
            if ea == 0 {
                if i == self.factors.len() {
                    return if j == other.factors.len() && eb == 0 {
                        Ordering::Equal
                    } else {
                        Ordering::Less
                    };
                }
                ea = self.factors[i].1;
            }
            if eb == 0 {
                if j == other.factors.len() {
                    return Ordering::Greater;
                }
                eb = other.factors[j].1;
            }
            let (a, b) = (self.factors[i].0, other.factors[j].0);
            match a.cmp(&b) {
                Ordering::Equal => {
                    let take = ea.min(eb);
                    ea -= take;
                    eb -= take;
                    if ea == 0 {
                        i += 1;
                    }
                    if eb == 0 {
                        j += 1;
                    }
                }
                // Largest remaining variables differ: they decide.
                ord => return ord,
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr: Vec<(usize, usize, u32)> = self
            .factors
            .iter()
            .rev()
            .map(|&(v, e)| (v.coord, v.order, e))
            .collect();
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = Vec::<(usize, usize, u32)>::deserialize(deserializer)?;
        Ok(Monomial::from_factors(
            repr.into_iter().map(|(c, l, e)| (JetVar::new(c, l), e)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coord: usize, order: usize) -> JetVar {
        JetVar::new(coord, order)
    }

    fn m(factors: &[(usize, usize, u32)]) -> Monomial {
        Monomial::from_factors(factors.iter().map(|&(c, l, e)| (v(c, l), e)))
    }

    #[test]
    fn constant_is_minimum() {
        let one = Monomial::one();
        assert!(one < m(&[(1, 0, 1)]));
        assert!(one < m(&[(3, 5, 2)]));
        assert_eq!(one.cmp(&Monomial::one()), Ordering::Equal);
    }

    #[test]
    fn largest_variable_decides() {
        // x[1] and its derivatives; x[1]^(1) is larger than x[1].
        let x = m(&[(1, 0, 1)]);
        let xp = m(&[(1, 1, 1)]);
        // x*x*x' vs x'*x'  : largest vars equal (x'), consume one each,
        // then x*x vs x' -> x' larger.
        let a = m(&[(1, 0, 2), (1, 1, 1)]);
        let b = m(&[(1, 1, 2)]);
        assert!(x < xp);
        assert!(a < b);
        // A proper prefix is smaller: x < x*x.
        assert!(m(&[(1, 0, 1)]) < m(&[(1, 0, 2)]));
    }

    #[test]
    fn cross_coordinate_blocks() {
        // Coordinate 2 variables are all smaller than coordinate 1.
        assert!(m(&[(2, 7, 3)]) < m(&[(1, 0, 1)]));
        // x[2]*x[1] vs x[1]: largest equal (x[1]), then x[2] vs empty.
        assert!(m(&[(1, 0, 1)]) < m(&[(2, 0, 1), (1, 0, 1)]));
    }

    #[test]
    fn weights() {
        let a = m(&[(1, 0, 1), (1, 2, 2)]);
        assert_eq!(a.weight(), 1 + 2 * 3);
        assert_eq!(a.gg_weight(), 2 * 2);
        assert_eq!(a.degree(), 3);
        assert_eq!(a.max_order(), Some(2));
    }

    #[test]
    fn mul_and_div() {
        let a = m(&[(1, 0, 1), (2, 1, 2)]);
        let b = m(&[(1, 0, 2), (2, 1, 1), (1, 3, 1)]);
        let prod = a.mul(&b);
        assert_eq!(prod, m(&[(1, 0, 3), (2, 1, 3), (1, 3, 1)]));
        assert_eq!(prod.try_div(&b), Some(a.clone()));
        assert_eq!(prod.try_div(&a), Some(b));
        assert_eq!(a.try_div(&m(&[(1, 0, 2)])), None);
        assert_eq!(a.try_div(&m(&[(3, 0, 1)])), None);
    }

    #[test]
    fn canonical_form_merges() {
        let a = Monomial::from_factors([(v(1, 0), 1), (v(1, 0), 2), (v(2, 0), 0)]);
        assert_eq!(a, m(&[(1, 0, 3)]));
    }
}
