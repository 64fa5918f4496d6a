//! Elliptic curves `y² = x(x − a)(x + b)` over ℚ with the chord-tangent law.
//!
//! Two one-parameter families get special treatment because their full
//! rational torsion subgroup (ℤ/2 × ℤ/4) is known in closed form:
//!
//! * `E1(s)`: `a = (2s)²`, `b = (s² − 1)²`
//! * `E2(t)`: `a = (t² − 1)²`, `b = (2t)²`
//!
//! For those, [`CurveParams::is_torsion`] is a lookup in the explicit
//! eight-point list; [`CurveParams::torsion_brute_check`] is the independent
//! multiple-based check (rational torsion has order at most 12).

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactq::{format_rational, int, is_excluded_parameter, parse_rational};

/// Largest order of a rational torsion point on any elliptic curve over ℚ.
pub const MAZUR_ORDER_BOUND: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurveKind {
    E1(BigRational),
    E2(BigRational),
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveParams {
    a: BigRational,
    b: BigRational,
    kind: CurveKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Identity,
    Affine { x: BigRational, y: BigRational },
}

impl CurvePoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Identity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Identity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    pub fn negate(&self) -> CurvePoint {
        match self {
            CurvePoint::Identity => CurvePoint::Identity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), -y),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Identity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

fn square(v: &BigRational) -> BigRational {
    v * v
}

impl CurveParams {
    /// A generic member `y² = x(x − a)(x + b)`; requires three distinct roots.
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        Self::with_kind(a, b, CurveKind::Generic)
    }

    fn with_kind(a: BigRational, b: BigRational, kind: CurveKind) -> Result<Self> {
        if a.is_zero() || b.is_zero() || a == -&b {
            return Err(Error::domain(format!(
                "y^2 = x(x - {a})(x + {b}) is singular"
            )));
        }
        Ok(CurveParams { a, b, kind })
    }

    /// `E1(s): y² = x(x − (2s)²)(x + (s² − 1)²)`, `s ∉ {0, ±1}`.
    pub fn e1(s: &BigRational) -> Result<Self> {
        if is_excluded_parameter(s) {
            return Err(Error::domain(format!(
                "E1 parameter s = {s} must not be 0 or ±1"
            )));
        }
        let a = square(&(s * int(2)));
        let b = square(&(square(s) - int(1)));
        Self::with_kind(a, b, CurveKind::E1(s.clone()))
    }

    /// `E2(t): y² = x(x − (t² − 1)²)(x + (2t)²)`, `t ∉ {0, ±1}`.
    pub fn e2(t: &BigRational) -> Result<Self> {
        if is_excluded_parameter(t) {
            return Err(Error::domain(format!(
                "E2 parameter t = {t} must not be 0 or ±1"
            )));
        }
        let a = square(&(square(t) - int(1)));
        let b = square(&(t * int(2)));
        Self::with_kind(a, b, CurveKind::E2(t.clone()))
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// `x(x − a)(x + b)`.
    pub fn rhs(&self, x: &BigRational) -> BigRational {
        x * (x - &self.a) * (x + &self.b)
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Identity => true,
            CurvePoint::Affine { x, y } => square(y) == self.rhs(x),
        }
    }

    fn check(&self, p: &CurvePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!("point {p} is not on {self}")))
        }
    }

    pub fn negate(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        Ok(p.negate())
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    // Expanded form y² = x³ + A x² + B x with A = b − a, B = −ab.
    pub(crate) fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Identity, _) => return q.clone(),
            (_, CurvePoint::Identity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let coeff_a = &self.b - &self.a;
        let slope = if x1 == x2 {
            if y1 == &-y2 {
                // vertical chord, or tangent at a 2-torsion point
                return CurvePoint::Identity;
            }
            let coeff_b = -(&self.a * &self.b);
            (int(3) * square(x1) + int(2) * &coeff_a * x1 + coeff_b) / (int(2) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = square(&slope) - &coeff_a - x1 - x2;
        let y3 = slope * (x1 - &x3) - y1;
        CurvePoint::affine(x3, y3)
    }

    pub fn double(&self, p: &CurvePoint) -> Result<CurvePoint> {
        self.add(p, p)
    }

    /// `[n]p` by double-and-add. Coordinate size roughly grows with n², so
    /// cost climbs quickly for large multiples.
    pub fn scalar_mul(&self, n: i64, p: &CurvePoint) -> Result<CurvePoint> {
        self.check(p)?;
        let base = if n < 0 { p.negate() } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut addend = base;
        let mut acc = CurvePoint::Identity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(&acc, &addend);
            }
            k >>= 1;
            if k > 0 {
                addend = self.add_unchecked(&addend, &addend);
            }
        }
        Ok(acc)
    }

    /// The explicit rational torsion subgroup for `E1`/`E2` curves.
    pub fn torsion_points(&self) -> Result<Vec<CurvePoint>> {
        match &self.kind {
            CurveKind::E1(s) => torsion_points_e1(s),
            CurveKind::E2(t) => torsion_points_e2(t),
            CurveKind::Generic => Err(Error::Unsupported(format!(
                "no closed-form torsion list for generic curve {self}"
            ))),
        }
    }

    pub fn is_torsion(&self, p: &CurvePoint) -> Result<bool> {
        let points = self.torsion_points()?;
        self.check(p)?;
        Ok(points.contains(p))
    }

    /// Smallest `1 ≤ n ≤ bound` with `[n]p = O`.
    pub fn torsion_order_up_to(&self, p: &CurvePoint, bound: u32) -> Result<Option<u32>> {
        self.check(p)?;
        // [m]P = O iff [⌈m/2⌉]P = −[⌊m/2⌋]P, so only multiples up to ⌈bound/2⌉ are formed.
        let half = bound.div_ceil(2) as usize;
        let mut multiples = vec![CurvePoint::Identity, p.clone()];
        while multiples.len() <= half {
            let next = self.add_unchecked(multiples.last().unwrap(), p);
            multiples.push(next);
        }
        for m in 1..=bound as usize {
            let (hi, lo) = (m.div_ceil(2), m / 2);
            if multiples[hi] == multiples[lo].negate() {
                return Ok(Some(m as u32));
            }
        }
        Ok(None)
    }

    pub fn torsion_brute_check(&self, p: &CurvePoint, bound: u32) -> Result<bool> {
        Ok(self.torsion_order_up_to(p, bound)?.is_some())
    }
}

impl fmt::Display for CurveParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            CurveKind::E1(s) => write!(f, "E1({s})"),
            CurveKind::E2(t) => write!(f, "E2({t})"),
            CurveKind::Generic => write!(f, "y^2 = x(x - {})(x + {})", self.a, self.b),
        }
    }
}

/// `{O, (0,0), ((2s)²,0), (−(s²−1)²,0), (2s(s+1)², ±2s(s+1)²(s²+1)),
/// (−2s(s−1)², ±2s(s−1)²(s²+1))}`.
pub fn torsion_points_e1(s: &BigRational) -> Result<Vec<CurvePoint>> {
    if is_excluded_parameter(s) {
        return Err(Error::domain(format!(
            "E1 parameter s = {s} must not be 0 or ±1"
        )));
    }
    let one = BigRational::one();
    let two_s = s * int(2);
    let s2p1 = square(s) + &one;
    let x_plus = &two_s * square(&(s + &one));
    let y_plus = &x_plus * &s2p1;
    let x_minus = -(&two_s * square(&(s - &one)));
    let y_minus = -(&x_minus * &s2p1);
    Ok(vec![
        CurvePoint::Identity,
        CurvePoint::affine(int(0), int(0)),
        CurvePoint::affine(square(&two_s), int(0)),
        CurvePoint::affine(-square(&(square(s) - &one)), int(0)),
        CurvePoint::affine(x_plus.clone(), y_plus.clone()),
        CurvePoint::affine(x_plus, -y_plus),
        CurvePoint::affine(x_minus.clone(), y_minus.clone()),
        CurvePoint::affine(x_minus, -y_minus),
    ])
}

/// The `E1` list carried back through `E2(t) ≅ E1((t+1)/(t−1))`:
/// `{O, (0,0), ((t²−1)²,0), (−(2t)²,0), (2t²(t²−1), ±2t²(t²−1)(t²+1)),
/// (−2(t²−1), ±2(t²−1)(t²+1))}`.
pub fn torsion_points_e2(t: &BigRational) -> Result<Vec<CurvePoint>> {
    if is_excluded_parameter(t) {
        return Err(Error::domain(format!(
            "E2 parameter t = {t} must not be 0 or ±1"
        )));
    }
    let one = BigRational::one();
    let t2 = square(t);
    let t2m1 = &t2 - &one;
    let t2p1 = &t2 + &one;
    let x_plus = int(2) * &t2 * &t2m1;
    let y_plus = &x_plus * &t2p1;
    let x_minus = int(-2) * &t2m1;
    let y_minus = int(2) * &t2m1 * &t2p1;
    Ok(vec![
        CurvePoint::Identity,
        CurvePoint::affine(int(0), int(0)),
        CurvePoint::affine(square(&t2m1), int(0)),
        CurvePoint::affine(-square(&(t * int(2))), int(0)),
        CurvePoint::affine(x_plus.clone(), y_plus.clone()),
        CurvePoint::affine(x_plus, -y_plus),
        CurvePoint::affine(x_minus.clone(), y_minus.clone()),
        CurvePoint::affine(x_minus, -y_minus),
    ])
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Identity { identity: bool },
    Affine { x: String, y: String },
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Identity => PointRepr::Identity { identity: true },
            CurvePoint::Affine { x, y } => PointRepr::Affine {
                x: format_rational(x),
                y: format_rational(y),
            },
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CurvePoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match PointRepr::deserialize(de)? {
            PointRepr::Identity { identity: true } => Ok(CurvePoint::Identity),
            PointRepr::Identity { identity: false } => {
                Err(D::Error::custom("\"identity\" must be true"))
            }
            PointRepr::Affine { x, y } => Ok(CurvePoint::affine(
                parse_rational(&x).map_err(D::Error::custom)?,
                parse_rational(&y).map_err(D::Error::custom)?,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::q;
    use proptest::prelude::*;

    fn seed_curve() -> CurveParams {
        CurveParams::e1(&q(5, 3)).unwrap()
    }

    fn seed_point() -> CurvePoint {
        CurvePoint::affine(q(-20, 27), q(1120, 243))
    }

    fn naive_order(e: &CurveParams, p: &CurvePoint, bound: u32) -> Option<u32> {
        let mut m = p.clone();
        for n in 1..=bound {
            if m.is_identity() {
                return Some(n);
            }
            m = e.add_unchecked(&m, p);
        }
        None
    }

    #[test]
    fn order_matches_repeated_addition() {
        for s in [q(5, 3), q(-7, 2), q(11, 13)] {
            let e = CurveParams::e1(&s).unwrap();
            for p in e.torsion_points().unwrap() {
                for bound in [1, 2, 3, 4, 7, 12] {
                    assert_eq!(
                        e.torsion_order_up_to(&p, bound).unwrap(),
                        naive_order(&e, &p, bound)
                    );
                }
            }
        }
        let e = seed_curve();
        assert_eq!(e.torsion_order_up_to(&seed_point(), 12).unwrap(), None);
    }

    #[test]
    fn membership() {
        let e = seed_curve();
        assert!(e.contains(&seed_point()));
        assert!(e.contains(&CurvePoint::Identity));
        assert!(!e.contains(&CurvePoint::affine(q(-20, 27), q(1120, 243) + int(1))));
    }

    #[test]
    fn rejects_singular_and_excluded() {
        assert!(CurveParams::e1(&int(1)).is_err());
        assert!(CurveParams::e1(&int(-1)).is_err());
        assert!(CurveParams::e2(&int(0)).is_err());
        assert!(CurveParams::new(int(2), int(-2)).is_err());
        assert!(CurveParams::new(int(0), int(3)).is_err());
    }

    #[test]
    fn group_law_examples() {
        let e = seed_curve();
        let p = seed_point();
        assert_eq!(e.add(&p, &CurvePoint::Identity).unwrap(), p);
        assert_eq!(
            e.add(&p, &e.negate(&p).unwrap()).unwrap(),
            CurvePoint::Identity
        );
        let two_p = e.scalar_mul(2, &p).unwrap();
        assert_eq!(two_p.x().unwrap(), &q(105625, 7056));
        assert_eq!(q(325, 84) * q(325, 84), q(105625, 7056));
        assert!(e.contains(&two_p));
        assert_eq!(
            e.scalar_mul(-3, &p).unwrap(),
            e.scalar_mul(3, &p).unwrap().negate()
        );
        assert_eq!(e.scalar_mul(0, &p).unwrap(), CurvePoint::Identity);
    }

    #[test]
    fn doubling_matches_tangent_line() {
        // independent route: the tangent at p meets the curve again at
        // x3 = m² − (b − a) − 2x with m = f'(x)/(2y), f(x) = x(x − a)(x + b)
        let e = seed_curve();
        let (x, y) = (q(-20, 27), q(1120, 243));
        let f_prime = (&x - e.a()) * (&x + e.b()) + &x * (&x + e.b()) + &x * (&x - e.a());
        let m = f_prime / (int(2) * &y);
        let x3 = &m * &m - (e.b() - e.a()) - int(2) * &x;
        assert_eq!(e.double(&seed_point()).unwrap().x().unwrap(), &x3);
    }

    #[test]
    fn off_curve_inputs_are_rejected() {
        let e = seed_curve();
        let bad = CurvePoint::affine(int(1), int(1));
        assert!(matches!(e.add(&bad, &seed_point()), Err(Error::Domain(_))));
        assert!(matches!(e.scalar_mul(2, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn e1_torsion_at_five_thirds() {
        let pts = torsion_points_e1(&q(5, 3)).unwrap();
        let xs: Vec<_> = pts.iter().filter_map(|p| p.x().cloned()).collect();
        for x in [int(0), q(100, 9), q(-256, 81), q(640, 27), q(-40, 27)] {
            assert!(xs.contains(&x), "missing x = {x}");
        }
        assert!(pts.contains(&CurvePoint::affine(q(640, 27), q(21760, 243))));
        assert!(pts.contains(&CurvePoint::affine(q(640, 27), q(-21760, 243))));
        let e = seed_curve();
        assert!(pts.iter().all(|p| e.contains(p)));
        assert!(torsion_points_e1(&int(0)).is_err());
    }

    #[test]
    fn e2_torsion_at_seventeen_ninths() {
        let t = q(17, 9);
        let pts = torsion_points_e2(&t).unwrap();
        let e = CurveParams::e2(&t).unwrap();
        assert!(pts.iter().all(|p| e.contains(p)));
        assert!(pts.contains(&CurvePoint::affine(int(0), int(0))));
        let xs: Vec<_> = pts.iter().filter_map(|p| p.x().cloned()).collect();
        assert!(xs.contains(&q(120224, 6561)));
        assert!(xs.contains(&q(-416, 81)));
        assert!(torsion_points_e2(&int(-1)).is_err());
    }

    #[test]
    fn torsion_lookup_and_brute_force() {
        let e = seed_curve();
        let order4 = CurvePoint::affine(q(640, 27), q(21760, 243));
        assert!(e.is_torsion(&order4).unwrap());
        assert_eq!(e.torsion_order_up_to(&order4, 12).unwrap(), Some(4));
        assert!(!e.is_torsion(&seed_point()).unwrap());
        assert!(!e
            .torsion_brute_check(&seed_point(), MAZUR_ORDER_BOUND)
            .unwrap());
        let origin = CurvePoint::affine(int(0), int(0));
        assert_eq!(e.torsion_order_up_to(&origin, 12).unwrap(), Some(2));

        let e9 = CurveParams::e1(&int(9)).unwrap();
        let p9 = CurvePoint::affine(int(3645), int(348705));
        assert!(e9.contains(&p9));
        assert!(!e9.is_torsion(&p9).unwrap());
        assert!(!e9.torsion_brute_check(&p9, 12).unwrap());
    }

    #[test]
    fn generic_curve_torsion_is_unsupported() {
        let e = CurveParams::new(int(1), int(2)).unwrap();
        assert!(matches!(
            e.is_torsion(&CurvePoint::Identity),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn point_json() {
        let p = seed_point();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"x":"-20/27","y":"1120/243"}"#);
        assert_eq!(serde_json::from_str::<CurvePoint>(&text).unwrap(), p);
        let o = serde_json::to_string(&CurvePoint::Identity).unwrap();
        assert_eq!(o, r#"{"identity":true}"#);
        assert_eq!(
            serde_json::from_str::<CurvePoint>(&o).unwrap(),
            CurvePoint::Identity
        );
    }

    fn arb_param() -> impl Strategy<Value = BigRational> {
        (-60i64..60, 1i64..60)
            .prop_map(|(n, d)| q(n, d))
            .prop_filter("excluded", |s| !is_excluded_parameter(s))
    }

    fn subgroup_checks(
        e: &CurveParams,
        pts: &[CurvePoint],
    ) -> std::result::Result<(), TestCaseError> {
        for p in pts {
            prop_assert!(e.contains(p));
            let order = e.torsion_order_up_to(p, 12).unwrap();
            prop_assert!(order.is_some());
            prop_assert!(e.is_torsion(p).unwrap());
            if !p.is_identity() {
                let doubled = e.double(p).unwrap();
                match order.unwrap() {
                    4 => prop_assert!(doubled.y().map(|y| y.is_zero()).unwrap_or(false)),
                    2 => prop_assert!(doubled.is_identity()),
                    n => prop_assert!(false, "unexpected order {}", n),
                }
            }
            for r in pts {
                prop_assert!(pts.contains(&e.add(p, r).unwrap()));
            }
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn e1_torsion_is_a_subgroup_of_order_8(s in arb_param()) {
            let e = CurveParams::e1(&s).unwrap();
            let pts = torsion_points_e1(&s).unwrap();
            let distinct: std::collections::BTreeSet<_> = pts.iter().cloned().collect();
            prop_assert_eq!(distinct.len(), 8);
            subgroup_checks(&e, &pts)?;
        }

        #[test]
        fn e2_torsion_is_a_subgroup_of_order_8(t in arb_param()) {
            let e = CurveParams::e2(&t).unwrap();
            let pts = torsion_points_e2(&t).unwrap();
            subgroup_checks(&e, &pts)?;
        }

        #[test]
        fn group_axioms_on_seed_multiples(i in -6i64..6, j in -6i64..6, k in -6i64..6, tor in 0usize..8) {
            let e = seed_curve();
            let base = seed_point();
            let t = torsion_points_e1(&q(5, 3)).unwrap()[tor].clone();
            let p = e.add(&e.scalar_mul(i, &base).unwrap(), &t).unwrap();
            let qq = e.scalar_mul(j, &base).unwrap();
            let r = e.scalar_mul(k, &base).unwrap();
            prop_assert!(e.contains(&p) && e.contains(&qq) && e.contains(&r));
            prop_assert_eq!(e.add(&p, &qq).unwrap(), e.add(&qq, &p).unwrap());
            let left = e.add(&e.add(&p, &qq).unwrap(), &r).unwrap();
            let right = e.add(&p, &e.add(&qq, &r).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(e.add(&p, &CurvePoint::Identity).unwrap(), p.clone());
            prop_assert_eq!(e.add(&p, &p.negate()).unwrap(), CurvePoint::Identity);
            prop_assert_eq!(e.scalar_mul(j + k, &base).unwrap(), e.add(&qq, &r).unwrap());
            prop_assert_eq!(e.is_torsion(&p).unwrap(), e.torsion_brute_check(&p, 12).unwrap());
        }
    }
}
