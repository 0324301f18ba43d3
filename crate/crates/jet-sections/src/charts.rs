//! Change of affine charts for jet polynomials.
//!
//! A chart-0 coordinate is a ratio of homogeneous coordinates, so its
//! image in chart `j` is a rational function whose only denominator is
//! a power of the chart's own coordinate `x_{jj} = X_0/X_j`:
//!
//! * `x_{0j} = 1/x_{jj}` and `x_{0t} = x_{jt}/x_{jj}` for `t ≠ j`;
//! * derivatives follow from `D(P/x^s) = (D(P)·x - s·P·x')/x^{s+1}`.
//!
//! The same rule with the roles of the two charts swapped maps chart-`j`
//! polynomials back to chart 0, which is what makes round-trip checks
//! possible. All images are reduced fractions with a single-variable
//! denominator; no general rational-function field is needed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::StaircaseTuple;
use crate::error::{Error, Result};
use crate::matrix::{build_delta_j, build_homogeneous, PolyMatrix};
use crate::monomial::Monomial;
use crate::polynomial::Polynomial;
use crate::scalar::{binom, Scalar};
use crate::space::{JetVar, VarSpace};

/// A reduced fraction `numerator / x_{jj}^pole` over a chart's affine
/// space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalSection {
    chart: usize,
    pole: usize,
    numerator: Polynomial,
    /// Coordinate of the order-0 denominator variable. Equals the
    /// chart index for images of chart-0 polynomials; differs only for
    /// the reverse direction (chart j back to chart 0), where the
    /// denominator is `x_{0j}`.
    denom: usize,
}

impl RationalSection {
    /// Wrap and reduce: strip every common factor of the denominator
    /// variable from the numerator.
    pub fn new(chart: usize, pole: usize, numerator: Polynomial) -> Self {
        assert!(chart >= 1, "chart-0 sections need an explicit denominator");
        RationalSection::with_denominator(chart, chart, pole, numerator)
    }

    pub fn with_denominator(
        chart: usize,
        denom: usize,
        pole: usize,
        numerator: Polynomial,
    ) -> Self {
        let mut section = RationalSection {
            chart,
            pole,
            numerator,
            denom,
        };
        section.reduce();
        section
    }

    fn denom_var(&self) -> JetVar {
        JetVar::new(self.denom, 0)
    }

    fn reduce(&mut self) {
        if self.numerator.is_zero() {
            self.pole = 0;
            return;
        }
        let y = Monomial::var(self.denom_var());
        while self.pole > 0 {
            let divided: Option<Vec<(Monomial, Scalar)>> = self
                .numerator
                .terms()
                .map(|(m, c)| m.try_div(&y).map(|d| (d, c.clone())))
                .collect();
            match divided {
                Some(terms) => {
                    self.numerator = Polynomial::from_terms(*self.numerator.space(), terms)
                        .expect("dividing by a variable stays in the space");
                    self.pole -= 1;
                }
                None => break,
            }
        }
    }

    pub fn chart(&self) -> usize {
        self.chart
    }

    pub fn pole(&self) -> usize {
        self.pole
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    /// The individually reduced rational terms of this section, each a
    /// monomial over a power of the denominator variable.
    pub fn terms(&self) -> Vec<RationalTerm> {
        let y = self.denom_var();
        self.numerator
            .terms()
            .map(|(m, c)| {
                let strip = (m.exponent_of(y) as usize).min(self.pole);
                let reduced = m
                    .try_div(&Monomial::var(y).pow(strip as u32))
                    .expect("exponent bound checked");
                RationalTerm {
                    chart: self.chart,
                    pole: self.pole - strip,
                    numerator: reduced,
                    coeff: c.clone(),
                }
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SectionRepr {
    chart: usize,
    pole: usize,
    numerator: Polynomial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    denom: Option<usize>,
}

impl Serialize for RationalSection {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SectionRepr {
            chart: self.chart,
            pole: self.pole,
            numerator: self.numerator.clone(),
            denom: (self.denom != self.chart).then_some(self.denom),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalSection {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = SectionRepr::deserialize(deserializer)?;
        let denom = repr.denom.unwrap_or(repr.chart);
        Ok(RationalSection::with_denominator(
            repr.chart,
            denom,
            repr.pole,
            repr.numerator,
        ))
    }
}

impl std::fmt::Display for RationalSection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let space = self.numerator.space();
        if self.pole == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(
                f,
                "({}) / {}^{}",
                self.numerator,
                space.render_var(self.denom_var()),
                self.pole
            )
        }
    }
}

/// One reduced term `coeff · numerator / x_{jj}^pole`; the numerator
/// carries no factor of the denominator variable when `pole > 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalTerm {
    pub chart: usize,
    pub pole: usize,
    pub numerator: Monomial,
    pub coeff: Scalar,
}

impl Serialize for RationalTerm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("RationalTerm", 3)?;
        s.serialize_field("pole", &self.pole)?;
        s.serialize_field("mono", &self.numerator)?;
        s.serialize_field("coeff", &self.coeff)?;
        s.end()
    }
}

impl RationalTerm {
    /// The pole/numerator pair that identifies the term in the
    /// smallest-term order, independent of its coefficient.
    pub fn shape(&self) -> (usize, Monomial) {
        (self.pole, self.numerator.clone())
    }
}

impl Ord for RationalTerm {
    /// A larger pole makes a term *smaller*; equal poles compare the
    /// numerators in the monomial order. The coefficient is only a
    /// final tiebreaker so the order stays consistent with equality.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .pole
            .cmp(&self.pole)
            .then_with(|| self.numerator.cmp(&other.numerator))
            .then_with(|| self.coeff.cmp(&other.coeff))
            .then_with(|| self.chart.cmp(&other.chart))
    }
}

impl PartialOrd for RationalTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for RationalTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let space = VarSpace::affine(self.chart, self.chart.max(1))
            .expect("chart index is a valid chart of its own space");
        write!(f, "{}", self.coeff)?;
        if !self.numerator.is_one() {
            write!(f, "*{}", self.numerator.render(&space))?;
        }
        if self.pole > 0 {
            write!(
                f,
                " / {}^{}",
                space.render_var(JetVar::new(self.chart, 0)),
                self.pole
            )?;
        }
        Ok(())
    }
}

/// Maps polynomials between chart 0 and a chart `j ≥ 1` (either
/// direction), memoizing the image of each jet variable.
pub struct ChartMapper {
    source: VarSpace,
    target: VarSpace,
    /// The coordinate whose order-0 variable is the only denominator;
    /// equal to the nonzero chart index for both directions.
    special: usize,
    memo: HashMap<JetVar, (Polynomial, usize)>,
}

impl ChartMapper {
    pub fn new(source_chart: usize, target_chart: usize, n: usize) -> Result<Self> {
        if source_chart == target_chart || (source_chart != 0 && target_chart != 0) {
            return Err(Error::InvalidInput(format!(
                "chart map must connect chart 0 with another chart, got {source_chart} -> {target_chart}"
            )));
        }
        Ok(ChartMapper {
            source: VarSpace::affine(source_chart, n)?,
            target: VarSpace::affine(target_chart, n)?,
            special: source_chart.max(target_chart),
            memo: HashMap::new(),
        })
    }

    pub fn target(&self) -> &VarSpace {
        &self.target
    }

    fn denom_var(&self) -> JetVar {
        JetVar::new(self.special, 0)
    }

    /// The image of a single source variable as `(numerator, pole)`.
    fn image(&mut self, v: JetVar) -> Result<(Polynomial, usize)> {
        self.source.check_var(v)?;
        if let Some(hit) = self.memo.get(&v) {
            return Ok(hit.clone());
        }
        let result = if v.order == 0 {
            if v.coord == self.special {
                // The ratio inverts: x ↦ 1/y.
                (Polynomial::one(self.target), 1)
            } else {
                (Polynomial::var(self.target, JetVar::new(v.coord, 0))?, 1)
            }
        } else {
            let (p, s) = self.image(JetVar::new(v.coord, v.order - 1))?;
            let y = Polynomial::var(self.target, self.denom_var())?;
            let y_prime = Polynomial::var(self.target, JetVar::new(self.special, 1))?;
            let num = &(&p.differentiate() * &y) - &(&p.scale(&Scalar::from_int(s as i64)) * &y_prime);
            (num, s + 1)
        };
        self.memo.insert(v, result.clone());
        Ok(result)
    }

    /// The image of one source variable as a reduced rational section
    /// over the target chart.
    pub fn image_section(&mut self, v: JetVar) -> Result<RationalSection> {
        let (num, pole) = self.image(v)?;
        Ok(RationalSection::with_denominator(
            self.target.chart().expect("target is affine"),
            self.special,
            pole,
            num,
        ))
    }

    /// Map a whole polynomial, combining terms over the least common
    /// denominator and reducing the result.
    pub fn map(&mut self, p: &Polynomial) -> Result<RationalSection> {
        self.source.check_same(p.space())?;
        let chart = self.target.chart().expect("target is affine");
        let mut parts: Vec<(Polynomial, usize)> = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            let mut num = Polynomial::constant(self.target, c.clone());
            let mut pole = 0usize;
            for &(v, e) in m.factors() {
                let (iv, is) = self.image(v)?;
                num = &num * &iv.pow(e);
                pole += is * e as usize;
            }
            parts.push((num, pole));
        }
        let max_pole = parts.iter().map(|&(_, s)| s).max().unwrap_or(0);
        let y = Monomial::var(self.denom_var());
        let mut numerator = Polynomial::zero(self.target);
        for (num, s) in parts {
            numerator = &numerator + &num.mul_monomial(&y.pow((max_pole - s) as u32));
        }
        Ok(RationalSection::with_denominator(
            chart,
            self.special,
            max_pole,
            numerator,
        ))
    }
}

/// Express a chart-0 polynomial in chart `j` as a reduced rational
/// section.
pub fn to_chart(p: &Polynomial, j: usize) -> Result<RationalSection> {
    let n = p.space().ambient_dim();
    if j == 0 || j > n {
        return Err(Error::InvalidChart { chart: j, n });
    }
    ChartMapper::new(0, j, n)?.map(p)
}

/// The reduced pole order of a chart-0 polynomial in chart `j`.
pub fn pole_order(p: &Polynomial, j: usize) -> Result<usize> {
    Ok(to_chart(p, j)?.pole())
}

/// Per-chart pole orders and the verdict for twist `d`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GlobalSectionReport {
    pub twist: usize,
    /// `(chart, pole)` for each chart `1..=N`.
    pub poles: Vec<(usize, usize)>,
    pub is_global: bool,
}

/// A chart-0 polynomial extends to a global section of the `d`-twist
/// exactly when its pole order is at most `d` in every other chart.
pub fn is_global_section(p: &Polynomial, d: usize) -> Result<GlobalSectionReport> {
    let n = p.space().ambient_dim();
    let mut poles = Vec::with_capacity(n);
    for j in 1..=n {
        poles.push((j, pole_order(p, j)?));
    }
    let is_global = poles.iter().all(|&(_, s)| s <= d);
    Ok(GlobalSectionReport {
        twist: d,
        poles,
        is_global,
    })
}

/// Transport a chart-0 section of the `d`-twist into chart `j` as a
/// genuine polynomial: the image times `x_{jj}^d`.
pub fn twisted_transport(p: &Polynomial, j: usize, d: usize) -> Result<Polynomial> {
    let section = to_chart(p, j)?;
    if section.pole() > d {
        return Err(Error::PoleExceedsTwist {
            pole: section.pole(),
            twist: d,
        });
    }
    let y = Monomial::var(JetVar::new(j, 0));
    Ok(section
        .numerator()
        .mul_monomial(&y.pow((d - section.pole()) as u32)))
}

/// Verify, by full symbolic expansion, that dehomogenizing the
/// homogeneous matrix in chart `j` matches the chart-`j` matrix: after
/// substituting `X_i = x_{ji}·X_j` (with `X_0 = x_{jj}·X_j`) and
/// expanding derivatives by Leibniz,
/// `det ℋ = ± det Δ_j · X_j^{M+1}` exactly. Returns the sign.
pub fn verify_dehomogenization(t: &StaircaseTuple, j: usize) -> Result<i8> {
    let n = t.ambient_dim();
    if j > n {
        return Err(Error::InvalidChart { chart: j, n });
    }
    let mixed = VarSpace::mixed(j, n)?;
    // Image of X_i^{(l)} in the mixed space, where coordinate 0 stands
    // for the jets of X_j and coordinates 1..N for the chart's affine
    // coordinates.
    let substitute = |v: JetVar| -> Polynomial {
        if v.coord == j {
            return Polynomial::var(mixed, JetVar::new(0, v.order)).expect("mixed coord 0");
        }
        let c = if v.coord == 0 { j } else { v.coord };
        let mut acc = Polynomial::zero(mixed);
        for q in 0..=v.order {
            let m = Monomial::from_factors([
                (JetVar::new(c, q), 1),
                (JetVar::new(0, v.order - q), 1),
            ]);
            let term = Polynomial::monomial(mixed, m, binom(v.order as i64, q as i64))
                .expect("mixed-space vars");
            acc = &acc + &term;
        }
        acc
    };

    let h = build_homogeneous(t)?;
    let size = h.size();
    let entries: Vec<Vec<Polynomial>> = (0..size)
        .map(|r| {
            (0..size)
                .map(|c| match h.entry(r, c) {
                    Some((coeff, v)) => substitute(*v).scale(coeff),
                    None => Polynomial::zero(mixed),
                })
                .collect()
        })
        .collect();
    let det_h = PolyMatrix::new(mixed, entries)?.determinant();

    let det_chart = build_delta_j(t, j)?.determinant();
    let lifted = det_chart.substitute(mixed, &|v| {
        Polynomial::var(mixed, v).expect("chart coords embed in the mixed space")
    })?;
    let twist = Monomial::var(JetVar::new(0, 0)).pow((t.max_entry() + 1) as u32);
    let rhs = lifted.mul_monomial(&twist);

    if det_h == rhs {
        Ok(1)
    } else if det_h == -&rhs {
        Ok(-1)
    } else {
        Err(Error::IdentityFailure {
            chart: j,
            residual: (&det_h - &rhs).to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{enumerate_by_weight, StrictSeq};

    fn space1() -> VarSpace {
        VarSpace::affine(0, 1).unwrap()
    }

    fn x(order: usize) -> Polynomial {
        Polynomial::var(space1(), JetVar::new(1, order)).unwrap()
    }

    fn y_mono(order: usize, exp: u32) -> Monomial {
        Monomial::from_factors([(JetVar::new(1, order), exp)])
    }

    #[test]
    fn variable_images() {
        // x -> 1/y, x' -> -y'/y^2, x'' -> (2y'y' - y''y)/y^3.
        let s0 = to_chart(&x(0), 1).unwrap();
        assert_eq!(s0.pole(), 1);
        assert_eq!(s0.numerator().to_string(), "1");

        let s1 = to_chart(&x(1), 1).unwrap();
        assert_eq!(s1.pole(), 2);
        assert_eq!(s1.numerator().to_string(), "-x[1]^(1)");

        let s2 = to_chart(&x(2), 1).unwrap();
        assert_eq!(s2.pole(), 3);
        assert_eq!(
            s2.numerator().to_string(),
            "2*x[1]^(1)*x[1]^(1) - x[1]*x[1]^(2)"
        );
    }

    #[test]
    fn pole_orders() {
        let wronskian = &(&x(1) * &x(1)).scale(&Scalar::from_int(2)) - &(&x(0) * &x(2));
        assert_eq!(pole_order(&wronskian, 1).unwrap(), 3);
        assert_eq!(pole_order(&(&x(1) * &x(1)), 1).unwrap(), 4);
        assert_eq!(pole_order(&Polynomial::one(space1()), 1).unwrap(), 0);
    }

    #[test]
    fn twisted_transport_goldens() {
        let wronskian = &(&x(1) * &x(1)).scale(&Scalar::from_int(2)) - &(&x(0) * &x(2));
        assert_eq!(
            twisted_transport(&wronskian, 1, 3).unwrap().to_string(),
            "x[1]^(2)"
        );
        assert_eq!(
            twisted_transport(&Polynomial::one(space1()), 1, 2)
                .unwrap()
                .to_string(),
            "x[1]*x[1]"
        );
        assert_eq!(twisted_transport(&x(0), 1, 1).unwrap().to_string(), "1");
        assert!(matches!(
            twisted_transport(&(&x(1) * &x(1)), 1, 3),
            Err(Error::PoleExceedsTwist { pole: 4, twist: 3 })
        ));
    }

    #[test]
    fn global_section_report() {
        let wronskian = &(&x(1) * &x(1)).scale(&Scalar::from_int(2)) - &(&x(0) * &x(2));
        assert!(is_global_section(&wronskian, 3).unwrap().is_global);
        let report = is_global_section(&(&x(1) * &x(1)), 3).unwrap();
        assert!(!report.is_global);
        assert_eq!(report.poles, vec![(1, 4)]);
    }

    #[test]
    fn rational_term_order() {
        let term = |pole: usize, num: Monomial| RationalTerm {
            chart: 1,
            pole,
            numerator: num,
            coeff: Scalar::one(),
        };
        // y''/y^3 beats y'y'/y^4 (deeper pole is smaller)...
        let a = term(3, y_mono(2, 1));
        let b = term(4, y_mono(1, 2));
        assert!(a > b);
        // ...and equal poles compare numerators.
        assert!(term(2, y_mono(1, 1)) < term(2, y_mono(2, 1)));
        assert_eq!(a.cmp(&a.clone()), std::cmp::Ordering::Equal);
    }

    #[test]
    fn round_trip_through_chart1() {
        // p = num1 / y^s1 and mapping num1 back to chart 0 as
        // num0 / x^s0 forces num0·x^s1 = p·x^s0.
        let polys = vec![
            x(0),
            &(&x(1) * &x(1)).scale(&Scalar::from_int(2)) - &(&x(0) * &x(2)),
            &(&x(0) * &x(3)) + &x(1).scale(&Scalar::from_fraction(1, 3)),
        ];
        for p in polys {
            let fwd = to_chart(&p, 1).unwrap();
            let mut back = ChartMapper::new(1, 0, 1).unwrap();
            let sec = back.map(fwd.numerator()).unwrap();
            let x0 = Monomial::var(JetVar::new(1, 0));
            let lhs = sec.numerator().mul_monomial(&x0.pow(fwd.pole() as u32));
            let rhs = p.mul_monomial(&x0.pow(sec.pole() as u32));
            assert_eq!(lhs, rhs, "failed for {p}");
        }
    }

    #[test]
    fn dehomogenization_identity_12() {
        let t = StaircaseTuple::new(vec![StrictSeq::new(vec![1, 2]).unwrap()]).unwrap();
        let s0 = verify_dehomogenization(&t, 0).unwrap();
        let s1 = verify_dehomogenization(&t, 1).unwrap();
        assert!(s0 == 1 || s0 == -1);
        assert!(s1 == 1 || s1 == -1);
    }

    #[test]
    fn dehomogenization_identity_empty() {
        let t = StaircaseTuple::all_empty(2);
        for j in 0..=2 {
            assert_eq!(verify_dehomogenization(&t, j).unwrap(), 1);
        }
    }

    #[test]
    fn dehomogenization_small_sweep() {
        for p in 0..=4u64 {
            for t in enumerate_by_weight(2, p) {
                for j in 0..=2 {
                    verify_dehomogenization(&t, j).unwrap_or_else(|e| {
                        panic!("identity failed for {t}, chart {j}: {e}")
                    });
                }
            }
        }
    }

    #[test]
    fn pole_bound_on_determinants() {
        for p in 0..=5u64 {
            for t in enumerate_by_weight(2, p) {
                let det = crate::matrix::build_delta0(&t).unwrap().determinant();
                let bound = (t.max_entry() + 1) as usize;
                for j in 1..=2 {
                    let pole = pole_order(&det, j).unwrap();
                    assert!(pole <= bound, "tuple {t}: pole {pole} > {bound} in chart {j}");
                }
                if !t.is_all_empty() {
                    assert_eq!(
                        pole_order(&det, 1).unwrap(),
                        bound,
                        "tuple {t}: chart-1 pole must be exactly M+1"
                    );
                }
            }
        }
    }

    #[test]
    fn section_json_round_trip() {
        let sec = to_chart(&x(2), 1).unwrap();
        let json = serde_json::to_string(&sec).unwrap();
        assert!(json.contains("\"chart\":1") && json.contains("\"pole\":3"));
        let back: RationalSection = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sec);
    }
}
