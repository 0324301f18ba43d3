//! Smallest-term analysis, linear independence, basis expansion, and
//! the assembled global-section basis with its `(N+1)^d` count.
//!
//! The key fact driving everything here: each determinant section has
//! a computable smallest term — as a monomial in chart 0, and as a
//! reduced rational term in chart 1 — and the map from staircase
//! tuples to smallest terms is injective. That gives linear
//! independence directly, and expansion of arbitrary polynomials in
//! the determinant basis by triangular elimination.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::charts::{is_global_section, to_chart, RationalSection, RationalTerm};
use crate::combinatorics::{enumerate_by_twist, enumerate_by_weight, StaircaseTuple, WeakTuple};
use crate::error::{Error, Result};
use crate::matrix::{build_delta0, build_delta_j, JetMatrix};
use crate::monomial::Monomial;
use crate::par;
use crate::polynomial::Polynomial;
use crate::scalar::{factorial, Scalar};
use crate::space::{JetVar, VarSpace};

/// How to compute the smallest chart-1 rational term of a determinant
/// section.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SmallestTermMode {
    /// Expand `det Δ₁` fully, reduce every term over the pole `M + 1`,
    /// and take the minimum. Normative.
    Brute,
    /// Structural shortcut: read the term off a diagonal product of
    /// `Δ₁` (or of a last-row minor when the first block does not
    /// reach `M`). Cross-checked against `Brute` in tests.
    ClosedForm,
}

/// The ≺-smallest reduced rational term of `det Δ₁(t) / y₁^{M+1}` in
/// chart 1.
pub fn smallest_chart_term(t: &StaircaseTuple, mode: SmallestTermMode) -> Result<RationalTerm> {
    t.validate()?;
    if t.is_all_empty() {
        return Ok(RationalTerm {
            chart: 1,
            pole: 0,
            numerator: Monomial::one(),
            coeff: Scalar::one(),
        });
    }
    let pole = (t.max_entry() + 1) as usize;
    match mode {
        SmallestTermMode::Brute => {
            let det = build_delta_j(t, 1)?.determinant();
            let section = RationalSection::new(1, pole, det);
            section
                .terms()
                .into_iter()
                .min()
                .ok_or(Error::ZeroPolynomial)
        }
        SmallestTermMode::ClosedForm => closed_form_term(t, pole),
    }
}

fn reduce_term(mut numerator: Monomial, mut coeff: Scalar, pole: usize) -> RationalTerm {
    let y = JetVar::new(1, 0);
    let strip = (numerator.exponent_of(y) as usize).min(pole);
    if strip > 0 {
        numerator = numerator
            .try_div(&Monomial::var(y).pow(strip as u32))
            .expect("exponent bound checked");
    }
    if coeff.is_zero() {
        coeff = Scalar::zero();
    }
    RationalTerm {
        chart: 1,
        pole: pole - strip,
        numerator,
        coeff,
    }
}

fn closed_form_term(t: &StaircaseTuple, pole: usize) -> Result<RationalTerm> {
    let m = t.max_entry() as usize;
    let delta1 = build_delta_j(t, 1)?;
    let n1 = t.block_len(1);
    let first_block_reaches_max = n1 > 0 && *t.block(1).entries().last().unwrap() == m;
    if first_block_reaches_max {
        // The diagonal of Δ₁ is its smallest monomial.
        let (mono, coeff) = delta1.diagonal_minimum()?;
        return Ok(reduce_term(mono, coeff, pole));
    }
    // The maximum is reached only in a later block: expand along the
    // last row at the order-0 entry of the earliest such coordinate.
    let tv = (2..=t.ambient_dim())
        .find(|&j| {
            t.block_len(j) > 0 && *t.block(j).entries().last().unwrap() == m
        })
        .ok_or_else(|| {
            Error::VerificationFailed(format!("no block of {t} attains the maximum {m}"))
        })?;
    let size = delta1.size();
    let last = size - 1;
    let target = JetVar::new(tv, 0);
    let col = (0..size)
        .find(|&c| matches!(delta1.entry(last, c), Some((_, v)) if *v == target))
        .ok_or_else(|| {
            Error::VerificationFailed(format!(
                "last row of the chart-1 matrix of {t} has no order-0 entry in coordinate {tv}"
            ))
        })?;
    let (entry_coeff, entry_var) = delta1.entry(last, col).as_ref().expect("entry found");
    // Minor: drop the last row and the chosen column.
    let minor_cols: Vec<Vec<crate::matrix::Entry>> = (0..size)
        .filter(|&c| c != col)
        .map(|c| (0..last).map(|r| delta1.entry(r, c).clone()).collect())
        .collect();
    let minor = JetMatrix::from_columns(*delta1.space(), minor_cols, None)?;
    let (minor_mono, minor_coeff) = minor.diagonal_minimum()?;
    let sign = if (last + col) % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    };
    let coeff = &(&sign * entry_coeff) * &minor_coeff;
    let mono = minor_mono.mul_var(*entry_var);
    Ok(reduce_term(mono, coeff, pole))
}

/// Check that the chart-1 smallest terms of the given tuples are
/// pairwise distinct (ignoring coefficients). Returns `None` when all
/// are distinct, or the indices of a colliding pair.
pub fn distinct_smallest_terms(ts: &[StaircaseTuple]) -> Result<Option<(usize, usize)>> {
    for (i, a) in ts.iter().enumerate() {
        if ts[i + 1..].contains(a) {
            return Err(Error::DuplicateInput(a.to_string()));
        }
    }
    let shapes: Vec<(usize, Monomial)> = par::map_collect(ts.to_vec(), |t| {
        smallest_chart_term(&t, SmallestTermMode::Brute).map(|term| term.shape())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut seen: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for (i, shape) in shapes.into_iter().enumerate() {
        if let Some(&first) = seen.get(&shape) {
            return Ok(Some((first, i)));
        }
        seen.insert(shape, i);
    }
    Ok(None)
}

/// Expand a chart-0 polynomial in the determinant basis: the unique
/// coefficients with `p = Σ c_t · det Δ₀(t)`.
///
/// Works by triangular elimination: the smallest monomial of the
/// residual determines its tuple through the shift bijection, and
/// subtracting the matching multiple of that determinant strictly
/// increases the smallest monomial.
pub fn expand_in_basis(p: &Polynomial) -> Result<BTreeMap<StaircaseTuple, Scalar>> {
    let space = *p.space();
    if !space.is_affine() || space.chart() != Some(0) {
        return Err(Error::InvalidInput(format!(
            "basis expansion expects a chart-0 polynomial, got space {space}"
        )));
    }
    let mut coeffs: BTreeMap<StaircaseTuple, Scalar> = BTreeMap::new();
    let mut residual = p.clone();
    let mut steps = 0usize;
    while !residual.is_zero() {
        steps += 1;
        assert!(
            steps <= 100_000,
            "basis expansion failed to terminate; smallest monomial not eliminated"
        );
        let (m, c) = residual.smallest_term()?;
        let (m, c) = (m.clone(), c.clone());
        let t = WeakTuple::from_monomial(&m, &space)?.to_staircase();
        let det = build_delta0(&t)?.determinant();
        let (m0, c0) = det.smallest_term()?;
        debug_assert_eq!(m0, &m, "smallest monomial must match the decoded tuple");
        let factor = &c * &c0.recip();
        residual = &residual - &det.scale(&factor);
        debug_assert!(residual.coeff(&m).is_zero());
        *coeffs.entry(t).or_insert_with(Scalar::zero) += factor;
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(coeffs)
}

/// Rebuild `Σ c_t · det Δ₀(t)` over an `N`-coordinate chart-0 space.
pub fn reconstruct(coeffs: &BTreeMap<StaircaseTuple, Scalar>, n: usize) -> Result<Polynomial> {
    let space = VarSpace::affine(0, n)?;
    let mut acc = Polynomial::zero(space);
    for (t, c) in coeffs {
        if t.ambient_dim() != n {
            return Err(Error::InvalidInput(format!(
                "tuple {t} has {} blocks, expected {n}",
                t.ambient_dim()
            )));
        }
        acc = &acc + &build_delta0(t)?.determinant().scale(c);
    }
    Ok(acc)
}

/// One verified element of the global-section basis.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub tuple: StaircaseTuple,
    pub det: Polynomial,
    /// `(chart, pole order)` for each chart `1..=N`.
    pub poles: Vec<(usize, usize)>,
    pub smallest_term: RationalTerm,
}

impl Serialize for BasisElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("BasisElement", 4)?;
        s.serialize_field("tuple", &self.tuple)?;
        s.serialize_field("det", &self.det)?;
        s.serialize_field("poles", &self.poles)?;
        s.serialize_field("smallest_term", &self.smallest_term)?;
        s.end()
    }
}

/// The verified determinant basis of the space of twisted global jet
/// sections: `(N+1)^d` elements, each with pole orders at most `d` in
/// every chart and pairwise distinct chart-1 smallest terms.
#[derive(Clone, Debug, Serialize)]
pub struct SectionBasis {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub elements: Vec<BasisElement>,
}

impl SectionBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Build and fully verify the determinant basis for jet order `k` and
/// twist `d`: enumerate the `(N+1)^d` staircase tuples with maximum
/// entry below `d`, expand each determinant, check pole orders, the
/// jet-order bound, and pairwise distinctness of smallest terms.
pub fn global_section_basis(n: usize, d: usize, k: usize) -> Result<SectionBasis> {
    if d >= 1 && k + 1 < d {
        return Err(Error::JetOrderTooSmall { k, required: d - 1 });
    }
    let tuples = enumerate_by_twist(n, d);
    let expected = (n as u64 + 1).pow(d as u32) as usize;
    if tuples.len() != expected {
        return Err(Error::VerificationFailed(format!(
            "enumeration produced {} tuples, expected {expected}",
            tuples.len()
        )));
    }
    let elements: Vec<BasisElement> = par::map_collect(tuples.clone(), |t| -> Result<BasisElement> {
        let det = build_delta0(&t)?.determinant();
        let report = is_global_section(&det, d)?;
        if !report.is_global {
            return Err(Error::VerificationFailed(format!(
                "determinant of {t} has a pole above the twist {d}: {:?}",
                report.poles
            )));
        }
        if det.max_order() > k {
            return Err(Error::JetOrderTooSmall {
                k,
                required: det.max_order(),
            });
        }
        let smallest_term = smallest_chart_term(&t, SmallestTermMode::Brute)?;
        Ok(BasisElement {
            tuple: t,
            det,
            poles: report.poles,
            smallest_term,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    if let Some((i, j)) = distinct_smallest_terms(&tuples)? {
        return Err(Error::VerificationFailed(format!(
            "smallest terms of {} and {} collide",
            tuples[i], tuples[j]
        )));
    }
    Ok(SectionBasis { n, d, k, elements })
}

/// Polynomial curves with exact rational coefficients, used by the
/// randomized homogeneity check.
fn random_curve(rng: &mut ChaCha8Rng, degree: usize, nonzero_constant: bool) -> Vec<Scalar> {
    let mut coeffs: Vec<Scalar> = (0..=degree)
        .map(|_| Scalar::from_fraction(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
        .collect();
    if nonzero_constant {
        while coeffs[0].is_zero() {
            coeffs[0] = Scalar::from_fraction(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        }
    }
    coeffs
}

fn curve_product(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

/// The order-`l` jet at 0 of a polynomial curve: `l! · c_l`.
fn jet(coeffs: &[Scalar], l: usize) -> Scalar {
    match coeffs.get(l) {
        Some(c) => &factorial(l as u64) * c,
        None => Scalar::zero(),
    }
}

/// Randomized-exact check that a homogeneous jet polynomial `P` of
/// degree `d` satisfies `P({(Q·X_i)^{(l)}}) = Q^d · P({X_i^{(l)}})`
/// for arbitrary curves: each trial draws rational-coefficient curves
/// `X_i(T)` and a multiplier `Q(T)`, evaluates both sides exactly at
/// `T = 0`, and compares. A failing trial is a disproof; all trials
/// passing gives `true`.
pub fn is_differentially_homogeneous(
    p: &Polynomial,
    degree: u32,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let space = *p.space();
    if space.is_affine() {
        return Err(Error::InvalidInput(
            "homogeneity check expects a polynomial in homogeneous jet variables".into(),
        ));
    }
    if !p.is_homogeneous_of(degree) {
        return Err(Error::NotHomogeneous {
            expected: degree as usize,
        });
    }
    let n = space.ambient_dim();
    let curve_degree = p.max_order() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let curves: Vec<Vec<Scalar>> = (0..=n)
            .map(|_| random_curve(&mut rng, curve_degree, false))
            .collect();
        let q = random_curve(&mut rng, curve_degree, true);
        let scaled: Vec<Vec<Scalar>> = curves.iter().map(|c| curve_product(&q, c)).collect();
        let lhs = p.evaluate(&|v: JetVar| jet(&scaled[v.coord], v.order));
        let rhs = &q[0].pow(degree) * &p.evaluate(&|v: JetVar| jet(&curves[v.coord], v.order));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of a rational matrix by exact Gaussian elimination.
fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for c in col..ncols {
            let scaled = &rows[rank][c] * &inv;
            rows[rank][c] = scaled;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Independent upper-bound oracle for `N = 1`: the dimension of the
/// space of chart-0 polynomials of weight at most `d + 2` whose chart-1
/// pole order is at most `d`, computed as a linear solve. Pole
/// cancellation is linear: over the common denominator, every
/// numerator monomial with too small a power of `y` must vanish.
pub fn pole_cancellation_dimension(d: usize) -> Result<usize> {
    let space = VarSpace::affine(0, 1)?;
    // All monomials of weight ≤ d + 2, the constant included.
    let mut monomials: Vec<Monomial> = Vec::new();
    for w in 0..=(d as u64 + 2) {
        for t in enumerate_by_weight(1, w) {
            monomials.push(t.to_weak().monomial());
        }
    }
    let sections: Vec<RationalSection> = monomials
        .iter()
        .map(|m| {
            to_chart(
                &Polynomial::monomial(space, m.clone(), Scalar::one())?,
                1,
            )
        })
        .collect::<Result<_>>()?;
    let common = sections.iter().map(RationalSection::pole).max().unwrap_or(0);
    if common <= d {
        return Ok(monomials.len());
    }
    // Numerators over y^common; monomials with y-exponent below
    // common - d produce one linear constraint each.
    let y = Monomial::var(JetVar::new(1, 0));
    let threshold = (common - d) as u32;
    let mut constraint_rows: BTreeMap<Monomial, Vec<Scalar>> = BTreeMap::new();
    for (i, sec) in sections.iter().enumerate() {
        let lift = sec
            .numerator()
            .mul_monomial(&y.pow((common - sec.pole()) as u32));
        for (m, c) in lift.terms() {
            if m.exponent_of(JetVar::new(1, 0)) < threshold {
                constraint_rows
                    .entry(m.clone())
                    .or_insert_with(|| vec![Scalar::zero(); monomials.len()])[i] = c.clone();
            }
        }
    }
    let rank = rank(constraint_rows.into_values().collect());
    Ok(monomials.len() - rank)
}

/// A reproducible random chart-0 polynomial of weight at most
/// `max_weight`: every monomial is included with probability 1/3 with
/// a small random rational coefficient.
pub fn random_polynomial(n: usize, max_weight: u64, rng: &mut ChaCha8Rng) -> Polynomial {
    let space = VarSpace::affine(0, n).expect("chart 0 always exists");
    let mut terms: Vec<(Monomial, Scalar)> = Vec::new();
    for w in 0..=max_weight {
        for t in enumerate_by_weight(n, w) {
            if rng.gen_range(0..3) == 0 {
                let c = Scalar::from_fraction(rng.gen_range(-9..=9), rng.gen_range(1..=4));
                terms.push((t.to_weak().monomial(), c));
            }
        }
    }
    Polynomial::from_terms(space, terms).expect("generated monomials live in the space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::StrictSeq;
    use crate::matrix::build_homogeneous;

    fn tuple(blocks: &[&[usize]]) -> StaircaseTuple {
        StaircaseTuple::new(
            blocks
                .iter()
                .map(|b| StrictSeq::new(b.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn smallest_term_goldens() {
        // (1,2): y''/y^3.
        let term = smallest_chart_term(&tuple(&[&[1, 2]]), SmallestTermMode::Brute).unwrap();
        assert_eq!(term.pole, 3);
        assert_eq!(term.numerator, Monomial::var(JetVar::new(1, 2)));
        assert_eq!(term.coeff.abs(), Scalar::one());
        // (0,4): 24 y'y'y' / y^5.
        let term = smallest_chart_term(&tuple(&[&[0, 4]]), SmallestTermMode::Brute).unwrap();
        assert_eq!(term.pole, 5);
        assert_eq!(
            term.numerator,
            Monomial::from_factors([(JetVar::new(1, 1), 3)])
        );
        assert_eq!(term.coeff.abs(), Scalar::from_int(24));
        // Empty tuple: the constant 1.
        let term =
            smallest_chart_term(&StaircaseTuple::all_empty(2), SmallestTermMode::ClosedForm)
                .unwrap();
        assert_eq!((term.pole, term.numerator), (0, Monomial::one()));
    }

    #[test]
    fn closed_form_matches_brute() {
        for n in 1..=3usize {
            for d in 1..=(5 - n) {
                for t in enumerate_by_twist(n, d) {
                    let brute = smallest_chart_term(&t, SmallestTermMode::Brute).unwrap();
                    let closed = smallest_chart_term(&t, SmallestTermMode::ClosedForm).unwrap();
                    assert_eq!(brute, closed, "tuple {t}");
                }
            }
        }
    }

    #[test]
    fn structural_shape_of_smallest_terms() {
        // Factor counts match the construction: M - n_1 + 1 factors in
        // the numerator, and exactly n_j of them in coordinate j ≥ 2.
        for t in enumerate_by_twist(2, 3) {
            if t.is_all_empty() {
                continue;
            }
            let term = smallest_chart_term(&t, SmallestTermMode::Brute).unwrap();
            let m = t.max_entry() as u32;
            assert_eq!(
                term.numerator.degree(),
                m + 1 - t.block_len(1) as u32,
                "tuple {t}"
            );
            for j in 2..=2 {
                let in_coord: u32 = term
                    .numerator
                    .factors()
                    .iter()
                    .filter(|(v, _)| v.coord == j)
                    .map(|&(_, e)| e)
                    .sum();
                assert_eq!(in_coord, t.block_len(j) as u32, "tuple {t} coord {j}");
            }
        }
    }

    #[test]
    fn distinctness_small() {
        assert_eq!(
            distinct_smallest_terms(&enumerate_by_twist(1, 3)).unwrap(),
            None
        );
        assert_eq!(
            distinct_smallest_terms(&enumerate_by_twist(2, 2)).unwrap(),
            None
        );
        let t = tuple(&[&[1, 2]]);
        assert!(matches!(
            distinct_smallest_terms(&[t.clone(), t]),
            Err(Error::DuplicateInput(_))
        ));
    }

    #[test]
    fn expansion_golden() {
        let det = build_delta0(&tuple(&[&[1, 2]])).unwrap().determinant();
        let coeffs = expand_in_basis(&det).unwrap();
        assert_eq!(coeffs.len(), 1);
        assert_eq!(coeffs[&tuple(&[&[1, 2]])], Scalar::one());
        assert!(expand_in_basis(&Polynomial::zero(*det.space()))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn expansion_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=2usize {
            for _ in 0..20 {
                let p = random_polynomial(n, 5, &mut rng);
                let coeffs = expand_in_basis(&p).unwrap();
                assert_eq!(reconstruct(&coeffs, n).unwrap(), p);
            }
        }
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(global_section_basis(1, 2, 1).unwrap().len(), 4);
        assert_eq!(global_section_basis(2, 2, 1).unwrap().len(), 9);
        let b = global_section_basis(1, 1, 0).unwrap();
        assert_eq!(b.len(), 2);
        let dets: Vec<String> = b.elements.iter().map(|e| e.det.to_string()).collect();
        assert!(dets.contains(&"1".to_string()) && dets.contains(&"x[1]".to_string()));
        assert!(matches!(
            global_section_basis(1, 3, 1),
            Err(Error::JetOrderTooSmall { .. })
        ));
    }

    #[test]
    fn differential_homogeneity() {
        let t = tuple(&[&[1, 2]]);
        let det = build_homogeneous(&t).unwrap().determinant();
        assert!(is_differentially_homogeneous(&det, 3, 20, 42).unwrap());
        // X_0 itself is homogeneous of degree 1...
        let hom = VarSpace::homogeneous(1);
        let x0 = Polynomial::var(hom, JetVar::new(0, 0)).unwrap();
        assert!(is_differentially_homogeneous(&x0, 1, 20, 42).unwrap());
        // ...but its derivative is not.
        let x0p = Polynomial::var(hom, JetVar::new(0, 1)).unwrap();
        assert!(!is_differentially_homogeneous(&x0p, 1, 20, 42).unwrap());
    }

    #[test]
    fn pole_cancellation_dimensions() {
        assert_eq!(pole_cancellation_dimension(0).unwrap(), 1);
        assert_eq!(pole_cancellation_dimension(1).unwrap(), 2);
        assert_eq!(pole_cancellation_dimension(2).unwrap(), 4);
        assert_eq!(pole_cancellation_dimension(3).unwrap(), 8);
    }
}
