//! Rational face cuboids and their similarity classes.
//!
//! Edge labels follow the box `ABCD-EFGH`: `BF` is the vertical edge at `F`,
//! `EF` and `GF` the base edges at `F`. The two rational face diagonals are
//! `BE` (over `BF`, `EF`) and `HF` (over `EF`, `GF`), so they always share
//! `EF`. `DF` is the space diagonal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::str::FromStr;

use crate::correspondence::{fiber_f, lift_a, PairB, TripleA};
use crate::error::{Error, Result};
use crate::exactq::{
    format_rational, int, is_perfect_square, parse_rational, sqrt_expected, sqrt_if_square,
};

fn square(v: &BigRational) -> BigRational {
    v * v
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaceCuboid {
    pub bf: BigRational,
    pub ef: BigRational,
    pub gf: BigRational,
    pub be: BigRational,
    pub hf: BigRational,
    pub df: BigRational,
}

impl FaceCuboid {
    /// Builds the cuboid from its edges, requiring `BE`, `HF` and `DF` rational.
    pub fn from_edges(bf: BigRational, ef: BigRational, gf: BigRational) -> Result<Self> {
        for (name, v) in [("BF", &bf), ("EF", &ef), ("GF", &gf)] {
            if !v.is_positive() {
                return Err(Error::domain(format!("edge {name} = {v} must be positive")));
            }
        }
        let diagonal = |name: &str, value: BigRational| {
            sqrt_if_square(&value).ok_or_else(|| {
                Error::domain(format!("{name}^2 = {value} is not a rational square"))
            })
        };
        let be = diagonal("face diagonal BE", square(&bf) + square(&ef))?;
        let hf = diagonal("face diagonal HF", square(&ef) + square(&gf))?;
        let df = diagonal("space diagonal DF", square(&bf) + square(&ef) + square(&gf))?;
        Ok(FaceCuboid {
            bf,
            ef,
            gf,
            be,
            hf,
            df,
        })
    }

    pub fn edges(&self) -> [&BigRational; 3] {
        [&self.bf, &self.ef, &self.gf]
    }

    /// All three Pythagorean relations, checked exactly.
    pub fn is_valid(&self) -> bool {
        let positive = [&self.bf, &self.ef, &self.gf, &self.be, &self.hf, &self.df]
            .iter()
            .all(|v| v.is_positive());
        positive
            && square(&self.bf) + square(&self.ef) == square(&self.be)
            && square(&self.ef) + square(&self.gf) == square(&self.hf)
            && square(&self.bf) + square(&self.ef) + square(&self.gf) == square(&self.df)
    }

    /// `BF² + GF²`; a square here would make the box a perfect cuboid.
    pub fn third_diagonal_squared(&self) -> BigRational {
        square(&self.bf) + square(&self.gf)
    }

    pub fn third_diagonal_rational(&self) -> bool {
        is_perfect_square(&self.third_diagonal_squared())
    }

    /// Similar with `BF`, `EF`, `GF` corresponding in order.
    pub fn is_similar_to(&self, other: &FaceCuboid) -> bool {
        let ratio = &other.bf / &self.bf;
        &self.ef * &ratio == other.ef && &self.gf * &ratio == other.gf
    }

    /// The edges scaled to coprime positive integers, labels preserved.
    pub fn primitive_edges(&self) -> [BigInt; 3] {
        primitive_integers(&[&self.bf, &self.ef, &self.gf])
            .try_into()
            .expect("three edges")
    }
}

fn primitive_integers(values: &[&BigRational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    scaled.into_iter().map(|v| v / &gcd).collect()
}

/// `BF = 2|t|`, `EF = |t² − 1|`, `BE = t² + 1`, `HF = √γ`,
/// `GF = √(γ − (t² − 1)²)`, `DF = √(γ + (2t)²)`.
pub fn cuboid_from_pair_b(q: &PairB) -> Result<FaceCuboid> {
    let t = q.t();
    let gamma = q.gamma();
    let t2 = square(t);
    let t2m1 = &t2 - BigRational::one();
    let cuboid = FaceCuboid {
        bf: (t * int(2)).abs(),
        ef: t2m1.abs(),
        gf: sqrt_expected(&(gamma - square(&t2m1)), "gamma - (t^2-1)^2")?,
        be: &t2 + BigRational::one(),
        hf: sqrt_expected(gamma, "gamma")?,
        df: sqrt_expected(&(gamma + int(4) * &t2), "gamma + (2t)^2")?,
    };
    if !cuboid.is_valid() {
        return Err(Error::internal(format!(
            "{q} produced an invalid cuboid {cuboid:?}"
        )));
    }
    Ok(cuboid)
}

/// The four pairs defining similar cuboids:
/// `(t, γ)`, `(−t, γ)`, `(1/t, γ/t⁴)`, `(−1/t, γ/t⁴)`.
pub fn b_orbit(q: &PairB) -> [PairB; 4] {
    let t = q.t();
    let inv = t.recip();
    let scaled_gamma = q.gamma() / square(&square(t));
    [
        q.clone(),
        PairB::new_unchecked(-t, q.gamma().clone()),
        PairB::new_unchecked(inv.clone(), scaled_gamma.clone()),
        PairB::new_unchecked(-inv, scaled_gamma),
    ]
}

/// A similarity class of face cuboids, keyed by its representative `(t, γ)`
/// with `t > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuboidClass {
    pub canonical: PairB,
    pub primitive_edges: [BigInt; 3],
}

impl CuboidClass {
    pub fn cuboid(&self) -> FaceCuboid {
        cuboid_from_pair_b(&self.canonical).expect("canonical pair is valid")
    }
}

pub fn canonicalize(q: &PairB) -> Result<CuboidClass> {
    let one = BigRational::one();
    let canonical = b_orbit(q)
        .into_iter()
        .find(|p| p.t() > &one)
        .expect("exactly one of ±t, ±1/t exceeds 1");
    let primitive_edges = cuboid_from_pair_b(&canonical)?.primitive_edges();
    Ok(CuboidClass {
        canonical,
        primitive_edges,
    })
}

/// Recovers `(t, γ)` from edges labeled so that `EF` is shared by the two
/// rational face diagonals: `t = BF/(BE − EF)` and `γ = (HF/λ)²` with
/// `λ = EF/(t² − 1)`. The result always has `t > 1`.
pub fn pair_b_from_cuboid(bf: &BigRational, ef: &BigRational, gf: &BigRational) -> Result<PairB> {
    let cuboid = FaceCuboid::from_edges(bf.clone(), ef.clone(), gf.clone())?;
    let t = &cuboid.bf / (&cuboid.be - &cuboid.ef);
    let scale = &cuboid.ef / (square(&t) - BigRational::one());
    let gamma = square(&(&cuboid.hf / scale));
    PairB::new(t, gamma).map_err(|e| e.into_internal("cuboid inversion"))
}

/// All 32 triples `(s, α, ±β)` whose cuboid lies in the class of `q`: four
/// similar `(t, γ)` representatives, four `(s, α)` over each, two signs of `β`.
pub fn class_fiber_32(q: &PairB) -> Result<Vec<TripleA>> {
    let per_rep: Vec<Result<Vec<TripleA>>> = b_orbit(q)
        .par_iter()
        .map(|rep| {
            let mut triples = Vec::with_capacity(8);
            for pair in fiber_f(rep)? {
                triples.extend(lift_a(&pair)?);
            }
            Ok(triples)
        })
        .collect();
    let mut all = Vec::with_capacity(32);
    for triples in per_rep {
        all.extend(triples?);
    }
    let distinct: BTreeSet<&TripleA> = all.iter().collect();
    if all.len() != 32 || distinct.len() != 32 {
        return Err(Error::internal(format!(
            "class fiber over {q} has {} elements ({} distinct), expected 32",
            all.len(),
            distinct.len()
        )));
    }
    Ok(all)
}

/// The JSON record for one cuboid class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuboidRecord {
    pub edges: [String; 3],
    pub face_diagonals: [String; 2],
    pub space_diagonal: String,
    pub third_diagonal_rational: bool,
    pub canonical_t: String,
    pub primitive_edges: [serde_json::Number; 3],
}

impl CuboidRecord {
    pub fn from_class(class: &CuboidClass) -> Self {
        let c = class.cuboid();
        let number =
            |n: &BigInt| serde_json::Number::from_str(&n.to_string()).expect("integer literal");
        CuboidRecord {
            edges: [&c.bf, &c.ef, &c.gf].map(format_rational),
            face_diagonals: [&c.be, &c.hf].map(format_rational),
            space_diagonal: format_rational(&c.df),
            third_diagonal_rational: c.third_diagonal_rational(),
            canonical_t: format_rational(class.canonical.t()),
            primitive_edges: class.primitive_edges.clone().map(|n| number(&n)),
        }
    }

    /// Re-derives the class from the record's edges and checks every field.
    pub fn validate(&self) -> Result<CuboidClass> {
        let edges: Vec<BigRational> = self
            .edges
            .iter()
            .map(|e| parse_rational(e))
            .collect::<Result<_>>()?;
        let cuboid = FaceCuboid::from_edges(edges[0].clone(), edges[1].clone(), edges[2].clone())?;
        let class = canonicalize(&pair_b_from_cuboid(&cuboid.bf, &cuboid.ef, &cuboid.gf)?)?;
        let expected = CuboidRecord::from_class(&class);
        let diagonals_match = parse_rational(&self.face_diagonals[0])? == cuboid.be
            && parse_rational(&self.face_diagonals[1])? == cuboid.hf
            && parse_rational(&self.space_diagonal)? == cuboid.df;
        let primitive: Vec<BigInt> = self
            .primitive_edges
            .iter()
            .map(|n| BigInt::from_str(&n.to_string()))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("primitive edge: {e}")))?;
        if !diagonals_match
            || self.third_diagonal_rational != expected.third_diagonal_rational
            || parse_rational(&self.canonical_t)? != *class.canonical.t()
            || primitive != class.primitive_edges
        {
            return Err(Error::domain(format!(
                "cuboid record is inconsistent with its edges: {self:?}"
            )));
        }
        Ok(class)
    }
}
