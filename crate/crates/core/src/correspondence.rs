//! Maps between rational points on `E1(s)`, the parameter pairs `(t, γ)`
//! that describe face cuboids, and points on `E2(t)`.
//!
//! ```text
//!   (s, α, β) ──4:1──▶ (t, γ, δ) ──iso──▶ (s', α', β')
//!       │                  │
//!      2:1                2:1
//!       ▼                  ▼
//!    (s, α)  ──F, 4:1──▶ (t, γ) ──4:1──▶ similarity class of cuboids
//! ```
//!
//! The fibers of `F` are exactly the orbits of the Klein four-group
//! `Γ = {id, σ, τ, στ}` acting on pairs `(s, α)`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::curves::{CurveParams, CurvePoint};
use crate::error::{Error, Result};
use crate::exactq::{
    exact_sqrt, int, is_excluded_parameter, is_perfect_square, q, serde_rational, sign_of,
    sqrt_expected,
};

fn square(v: &BigRational) -> BigRational {
    v * v
}

/// `(s, α, β)` with `(α, β)` a non-torsion rational point of `E1(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTripleA")]
pub struct TripleA {
    #[serde(with = "serde_rational")]
    s: BigRational,
    #[serde(with = "serde_rational")]
    alpha: BigRational,
    #[serde(with = "serde_rational")]
    beta: BigRational,
}

/// `(s, α)` such that some `β ≠ 0` makes `(s, α, β)` a [`TripleA`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPairA")]
pub struct PairA {
    #[serde(with = "serde_rational")]
    s: BigRational,
    #[serde(with = "serde_rational")]
    alpha: BigRational,
}

/// `(t, γ, δ)` with `(γ, δ)` a non-torsion rational point of `E2(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTripleB")]
pub struct TripleB {
    #[serde(with = "serde_rational")]
    t: BigRational,
    #[serde(with = "serde_rational")]
    gamma: BigRational,
    #[serde(with = "serde_rational")]
    delta: BigRational,
}

/// `(t, γ)` with `γ`, `γ − (t² − 1)²` and `γ + (2t)²` all nonzero squares.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPairB")]
pub struct PairB {
    #[serde(with = "serde_rational")]
    t: BigRational,
    #[serde(with = "serde_rational")]
    gamma: BigRational,
}

macro_rules! raw_repr {
    ($raw:ident, $target:ident, $($field:ident),+) => {
        #[derive(Deserialize)]
        struct $raw {
            $(
                #[serde(with = "serde_rational")]
                $field: BigRational,
            )+
        }

        impl TryFrom<$raw> for $target {
            type Error = Error;

            fn try_from(raw: $raw) -> Result<Self> {
                $target::new($(raw.$field),+)
            }
        }
    };
}

raw_repr!(RawTripleA, TripleA, s, alpha, beta);
raw_repr!(RawPairA, PairA, s, alpha);
raw_repr!(RawTripleB, TripleB, t, gamma, delta);
raw_repr!(RawPairB, PairB, t, gamma);

fn require_parameter(name: &str, value: &BigRational) -> Result<()> {
    if is_excluded_parameter(value) {
        Err(Error::domain(format!(
            "{name} = {value} must not be 0 or ±1"
        )))
    } else {
        Ok(())
    }
}

fn require_non_torsion(curve: &CurveParams, point: &CurvePoint) -> Result<()> {
    if !curve.contains(point) {
        return Err(Error::domain(format!("{point} is not on {curve}")));
    }
    if curve.is_torsion(point)? {
        return Err(Error::domain(format!(
            "{point} is a torsion point of {curve}"
        )));
    }
    Ok(())
}

impl TripleA {
    pub fn new(s: BigRational, alpha: BigRational, beta: BigRational) -> Result<Self> {
        require_parameter("s", &s)?;
        let curve = CurveParams::e1(&s)?;
        require_non_torsion(&curve, &CurvePoint::affine(alpha.clone(), beta.clone()))?;
        Ok(TripleA { s, alpha, beta })
    }

    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn curve(&self) -> CurveParams {
        CurveParams::e1(&self.s).expect("validated parameter")
    }

    pub fn point(&self) -> CurvePoint {
        CurvePoint::affine(self.alpha.clone(), self.beta.clone())
    }

    pub fn pair(&self) -> PairA {
        PairA {
            s: self.s.clone(),
            alpha: self.alpha.clone(),
        }
    }
}

impl PairA {
    pub fn new(s: BigRational, alpha: BigRational) -> Result<Self> {
        require_parameter("s", &s)?;
        let curve = CurveParams::e1(&s)?;
        let radicand = curve.rhs(&alpha);
        if !radicand.is_positive() {
            return Err(Error::domain(format!(
                "alpha = {alpha}: alpha(alpha - (2s)^2)(alpha + (s^2-1)^2) = {radicand} is not positive"
            )));
        }
        let beta = exact_sqrt(&radicand)?;
        require_non_torsion(&curve, &CurvePoint::affine(alpha.clone(), beta))?;
        Ok(PairA { s, alpha })
    }

    pub(crate) fn new_unchecked(s: BigRational, alpha: BigRational) -> Self {
        PairA { s, alpha }
    }

    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }
}

impl TripleB {
    pub fn new(t: BigRational, gamma: BigRational, delta: BigRational) -> Result<Self> {
        require_parameter("t", &t)?;
        let curve = CurveParams::e2(&t)?;
        require_non_torsion(&curve, &CurvePoint::affine(gamma.clone(), delta.clone()))?;
        Ok(TripleB { t, gamma, delta })
    }

    pub fn t(&self) -> &BigRational {
        &self.t
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn curve(&self) -> CurveParams {
        CurveParams::e2(&self.t).expect("validated parameter")
    }

    pub fn point(&self) -> CurvePoint {
        CurvePoint::affine(self.gamma.clone(), self.delta.clone())
    }

    /// Projection to `(t, γ)`; fails unless the three square conditions hold.
    pub fn pair(&self) -> Result<PairB> {
        PairB::new(self.t.clone(), self.gamma.clone())
    }
}

impl PairB {
    pub fn new(t: BigRational, gamma: BigRational) -> Result<Self> {
        require_parameter("t", &t)?;
        let t2m1 = square(&t) - BigRational::one();
        let checks = [
            ("gamma", gamma.clone()),
            ("gamma - (t^2-1)^2", &gamma - square(&t2m1)),
            ("gamma + (2t)^2", &gamma + square(&(&t * int(2)))),
        ];
        for (name, value) in checks {
            if value.is_zero() || !is_perfect_square(&value) {
                return Err(Error::domain(format!(
                    "(t, gamma) = ({t}, {gamma}): {name} = {value} is not a nonzero square"
                )));
            }
        }
        Ok(PairB { t, gamma })
    }

    pub(crate) fn new_unchecked(t: BigRational, gamma: BigRational) -> Self {
        PairB { t, gamma }
    }

    pub fn t(&self) -> &BigRational {
        &self.t
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }
}

impl fmt::Display for PairA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(s, alpha) = ({}, {})", self.s, self.alpha)
    }
}

impl fmt::Display for PairB {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t, gamma) = ({}, {})", self.t, self.gamma)
    }
}

/// An element of `Γ = {id, σ, τ, στ} ≅ ℤ/2 × ℤ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaElement {
    Id,
    Sigma,
    Tau,
    SigmaTau,
}

impl GammaElement {
    pub const ALL: [GammaElement; 4] = [
        GammaElement::Id,
        GammaElement::Sigma,
        GammaElement::Tau,
        GammaElement::SigmaTau,
    ];

    fn bits(self) -> (bool, bool) {
        match self {
            GammaElement::Id => (false, false),
            GammaElement::Sigma => (true, false),
            GammaElement::Tau => (false, true),
            GammaElement::SigmaTau => (true, true),
        }
    }

    fn from_bits(sigma: bool, tau: bool) -> Self {
        match (sigma, tau) {
            (false, false) => GammaElement::Id,
            (true, false) => GammaElement::Sigma,
            (false, true) => GammaElement::Tau,
            (true, true) => GammaElement::SigmaTau,
        }
    }

    pub fn compose(self, other: GammaElement) -> GammaElement {
        let (s1, t1) = self.bits();
        let (s2, t2) = other.bits();
        GammaElement::from_bits(s1 ^ s2, t1 ^ t2)
    }

    pub fn apply(self, p: &PairA) -> PairA {
        apply_gamma(self, p)
    }
}

/// `σ(s, α) = (−s, −(s² − 1)²(α − (2s)²)/(α + (s² − 1)²))`.
pub fn sigma(p: &PairA) -> PairA {
    let s2m1_sq = square(&(square(&p.s) - BigRational::one()));
    let four_s2 = square(&(&p.s * int(2)));
    let alpha = -(&s2m1_sq * (&p.alpha - four_s2)) / (&p.alpha + &s2m1_sq);
    PairA::new_unchecked(-&p.s, alpha)
}

/// `τ(s, α) = (−1/s, −4(s² − 1)²/(s²α))`.
///
/// The sign on `−1/s` matters: `(1/s, …)` lands on `(−t, γ)`, a similar
/// cuboid but a different point of the image of `F`.
pub fn tau(p: &PairA) -> PairA {
    let s2 = square(&p.s);
    let s2m1_sq = square(&(&s2 - BigRational::one()));
    let alpha = -(int(4) * s2m1_sq) / (s2 * &p.alpha);
    PairA::new_unchecked(-p.s.recip(), alpha)
}

pub fn apply_gamma(g: GammaElement, p: &PairA) -> PairA {
    match g {
        GammaElement::Id => p.clone(),
        GammaElement::Sigma => sigma(p),
        GammaElement::Tau => tau(p),
        GammaElement::SigmaTau => sigma(&tau(p)),
    }
}

fn require_distinct<T: Ord + Clone + fmt::Display>(items: &[T], what: &str) -> Result<()> {
    let set: BTreeSet<&T> = items.iter().collect();
    if set.len() != items.len() {
        let listed: Vec<String> = items.iter().map(|p| p.to_string()).collect();
        return Err(Error::internal(format!(
            "{what} should have {} distinct elements: {}",
            items.len(),
            listed.join(", ")
        )));
    }
    Ok(())
}

/// `{p, σp, τp, στp}` in that order.
pub fn gamma_orbit(p: &PairA) -> Result<[PairA; 4]> {
    let orbit = GammaElement::ALL.map(|g| apply_gamma(g, p));
    require_distinct(&orbit, "Gamma-orbit")?;
    Ok(orbit)
}

/// The map `F(s, α) = (t, γ)` with
/// `t = (sα − 2s(s² − 1))/(α + 2s²(s² − 1))` and `γ = t²(s − 1/s)²`.
pub fn forward_f(p: &PairA) -> Result<PairB> {
    let s = &p.s;
    let alpha = &p.alpha;
    let s2m1 = square(s) - BigRational::one();
    let den = alpha + int(2) * square(s) * &s2m1;
    if den.is_zero() {
        return Err(Error::internal(format!(
            "{p}: alpha + 2s^2(s^2-1) vanished"
        )));
    }
    let t = (s * alpha - int(2) * s * &s2m1) / den;
    let gamma = square(&t) * square(&(s - s.recip()));
    PairB::new(t, gamma).map_err(|e| e.into_internal("forward map"))
}

/// The four pairs `(s, α)` over `(t, γ)`: `s = (±√γ ± √(γ + (2t)²))/(2t)` and
/// `α = 2s(s² − 1)(1 + st)/(s − t)`, the linear solve of the `t` formula.
pub fn fiber_f(q: &PairB) -> Result<[PairA; 4]> {
    let t = &q.t;
    let root_gamma = sqrt_expected(&q.gamma, "gamma")?;
    let root_space = sqrt_expected(&(&q.gamma + square(&(t * int(2)))), "gamma + (2t)^2")?;
    let two_t = t * int(2);
    let signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let mut out = Vec::with_capacity(4);
    for (e1, e2) in signs {
        let s = (&root_gamma * int(e1) + &root_space * int(e2)) / &two_t;
        if is_excluded_parameter(&s) || &s == t {
            return Err(Error::internal(format!(
                "{q}: fiber produced degenerate s = {s}"
            )));
        }
        let alpha = int(2) * &s * (square(&s) - BigRational::one()) * (BigRational::one() + &s * t)
            / (&s - t);
        out.push(PairA::new(s, alpha).map_err(|e| e.into_internal("fiber of F"))?);
    }
    require_distinct(&out, "fiber of F")?;
    Ok(out.try_into().expect("four elements"))
}

/// `[(s, α, β), (s, α, −β)]` with `β > 0`.
pub fn lift_a(p: &PairA) -> Result<[TripleA; 2]> {
    let curve = CurveParams::e1(&p.s)?;
    let radicand = curve.rhs(&p.alpha);
    if !radicand.is_positive() {
        return Err(Error::domain(format!(
            "{p}: radicand {radicand} is not positive"
        )));
    }
    let beta = exact_sqrt(&radicand)?;
    let make = |beta: BigRational| TripleA {
        s: p.s.clone(),
        alpha: p.alpha.clone(),
        beta,
    };
    Ok([make(beta.clone()), make(-beta)])
}

/// `(t, γ, δ)` with `δ = √(γ(γ − (t² − 1)²)(γ + (2t)²)) > 0`.
pub fn lift_b(q: &PairB) -> Result<TripleB> {
    let curve = CurveParams::e2(&q.t)?;
    let delta = sqrt_expected(&curve.rhs(&q.gamma), "gamma(gamma-(t^2-1)^2)(gamma+(2t)^2)")?;
    TripleB::new(q.t.clone(), q.gamma.clone(), delta)
        .map_err(|e| e.into_internal("lift of (t, gamma)"))
}

/// `(s, α, β) ↦ (t, γ, sign(β)·|δ|)` where `(t, γ) = F(s, α)`.
pub fn map_a_to_bprime(a: &TripleA) -> Result<TripleB> {
    let lifted = lift_b(&forward_f(&a.pair())?)?;
    if sign_of(&a.beta) == num_bigint::Sign::Minus {
        Ok(TripleB {
            delta: -lifted.delta,
            ..lifted
        })
    } else {
        Ok(lifted)
    }
}

/// `s' = (t + 1)/(t − 1)`, the `E1` parameter isomorphic to `E2(t)`.
pub fn e1_parameter_for(t: &BigRational) -> BigRational {
    (t + BigRational::one()) / (t - BigRational::one())
}

/// `(x, y) ↦ (k²x, k³y)` with `k = 2/(t − 1)²`, from `E2(t)` to `E1((t+1)/(t−1))`.
pub fn transport_point(t: &BigRational, p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Identity => CurvePoint::Identity,
        CurvePoint::Affine { x, y } => {
            let k = int(2) / square(&(t - BigRational::one()));
            let k2 = square(&k);
            let k3 = &k2 * &k;
            CurvePoint::affine(k2 * x, k3 * y)
        }
    }
}

/// The isomorphism `E2(t) ≅ E1(s')` on triples.
pub fn iso_b_to_a(b: &TripleB) -> Result<TripleA> {
    let s = e1_parameter_for(&b.t);
    match transport_point(&b.t, &b.point()) {
        CurvePoint::Affine { x, y } => {
            TripleA::new(s, x, y).map_err(|e| e.into_internal("E2 -> E1 isomorphism"))
        }
        CurvePoint::Identity => unreachable!("affine points transport to affine points"),
    }
}

/// `((s + 1)α + 2s(s − 1)²(s + 1)) / ((s − 1)α − 2s(s − 1)(s + 1)²)`.
pub fn composite_parameter(s: &BigRational, alpha: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    let sp1 = s + &one;
    let sm1 = s - &one;
    let den = &sm1 * alpha - int(2) * s * &sm1 * square(&sp1);
    if den.is_zero() {
        return Err(Error::domain(format!(
            "composite map undefined at (s, alpha) = ({s}, {alpha}): zero denominator"
        )));
    }
    Ok((&sp1 * alpha + int(2) * s * square(&sm1) * &sp1) / den)
}

/// The composite `(s, α, β) → (t, γ, δ) → (s', α', β')`.
pub fn composite_self_map(a: &TripleA) -> Result<TripleA> {
    let expected = composite_parameter(&a.s, &a.alpha)?;
    let out = iso_b_to_a(&map_a_to_bprime(a)?)?;
    if out.s != expected {
        return Err(Error::internal(format!(
            "composite map of {:?} gave s = {}, closed form says {expected}",
            a, out.s
        )));
    }
    Ok(out)
}

/// The seed `(5/3, −20/27, 1120/243)`: a point of infinite order on `E1(5/3)`.
pub fn default_seed() -> TripleA {
    TripleA::new(q(5, 3), q(-20, 27), q(1120, 243)).expect("seed is a non-torsion point")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankWitness {
    /// `n` such that the witness is the image of `[n]` times the seed point.
    pub multiple: i64,
    #[serde(with = "serde_rational")]
    pub s: BigRational,
    pub witness: TripleA,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankFamily {
    pub members: Vec<RankWitness>,
    /// Multiples whose image parameter repeated an earlier one.
    pub skipped: Vec<(i64, BigRational)>,
}

/// `count` pairwise-distinct parameters `s` with `rank E1(s)(ℚ) > 0`, each
/// certified by a non-torsion witness: the composite self-map applied to
/// `[n]` times the seed point for `n = 1, 2, …`.
pub fn rank_family(seed: &TripleA, count: usize) -> Result<RankFamily> {
    if count == 0 {
        return Err(Error::domain("rank family count must be positive"));
    }
    let curve = seed.curve();
    let base = seed.point();
    let max_multiple = 4 * count as i64 + 16;

    let mut family = RankFamily::default();
    let mut seen = BTreeSet::new();
    let mut current = CurvePoint::Identity;
    let mut n = 0i64;
    while family.members.len() < count {
        let wanted = count - family.members.len();
        let mut batch = Vec::with_capacity(wanted);
        while batch.len() < wanted && n < max_multiple {
            n += 1;
            current = curve.add_unchecked(&current, &base);
            batch.push((n, current.clone()));
        }
        if batch.is_empty() {
            return Err(Error::domain(format!(
                "only {} distinct parameters within {max_multiple} multiples of the seed",
                family.members.len()
            )));
        }
        let images: Vec<Result<(i64, TripleA)>> = batch
            .into_par_iter()
            .map(|(n, point)| {
                let (x, y) = match point {
                    CurvePoint::Affine { x, y } => (x, y),
                    CurvePoint::Identity => {
                        return Err(Error::internal(format!("[{n}] seed point is the identity")))
                    }
                };
                let triple = TripleA::new(seed.s.clone(), x, y)
                    .map_err(|e| e.into_internal("seed multiple"))?;
                composite_self_map(&triple)
                    .map(|image| (n, image))
                    .map_err(|e| match e {
                        Error::Domain(msg) => Error::Domain(format!("multiple {n}: {msg}")),
                        other => other,
                    })
            })
            .collect();
        for image in images {
            let (n, witness) = image?;
            let s = witness.s.clone();
            if seen.insert(s.clone()) {
                family.members.push(RankWitness {
                    multiple: n,
                    s,
                    witness,
                });
            } else {
                family.skipped.push((n, s));
            }
        }
    }
    Ok(family)
}
