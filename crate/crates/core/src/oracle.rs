//! Brute-force integer face-cuboid search, independent of the curve
//! machinery, used to cross-check it.
//!
//! Every face cuboid has two integral face diagonals, and any two faces of a
//! box share an edge. So the search builds, for each integer `e`, the list of
//! partners `x` with `e² + x²` a square, and tests the space diagonal for each
//! pair of partners of the same `e`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::correspondence::{fiber_f, PairB};
use crate::cuboid::{cuboid_from_pair_b, pair_b_from_cuboid, FaceCuboid};
use crate::error::{Error, Result};
use crate::exactq::serde_rational;

/// Environment variable capping the number of search threads.
pub const THREADS_ENV: &str = "CUBOID_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiagonalPair {
    pub edges: [u64; 2],
    pub diagonal: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntegerCuboidHit {
    /// Ascending.
    pub edges: [u64; 3],
    pub rational_diagonal_pairs: Vec<DiagonalPair>,
    pub space_diagonal: Option<u64>,
}

fn exact_isqrt(n: u128) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r as u64)
}

fn sq(n: u64) -> u128 {
    (n as u128) * (n as u128)
}

impl IntegerCuboidHit {
    /// Classifies a box by which of its diagonals are integral.
    pub fn from_edges(edges: [u64; 3]) -> Self {
        let mut edges = edges;
        edges.sort_unstable();
        let mut pairs = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if let Some(d) = exact_isqrt(sq(edges[i]) + sq(edges[j])) {
                pairs.push(DiagonalPair {
                    edges: [edges[i], edges[j]],
                    diagonal: d,
                });
            }
        }
        let space_diagonal = exact_isqrt(edges.iter().map(|&e| sq(e)).sum());
        IntegerCuboidHit {
            edges,
            rational_diagonal_pairs: pairs,
            space_diagonal,
        }
    }

    /// Every reported diagonal squares to the sum of its squared edges.
    pub fn diagonals_verify(&self) -> bool {
        let faces = self
            .rational_diagonal_pairs
            .iter()
            .all(|p| sq(p.diagonal) == sq(p.edges[0]) + sq(p.edges[1]));
        let space = self
            .space_diagonal
            .is_none_or(|d| sq(d) == self.edges.iter().map(|&e| sq(e)).sum());
        faces && space
    }

    pub fn is_face_cuboid(&self) -> bool {
        self.rational_diagonal_pairs.len() >= 2 && self.space_diagonal.is_some()
    }
}

/// For each leg `e ≤ max_edge`, the sorted partners `x ≤ max_edge` with
/// `e² + x²` a perfect square, generated from primitive triples
/// `(m² − n², 2mn)` and their multiples.
fn partner_lists(max_edge: u64) -> Vec<Vec<u64>> {
    let mut partners = vec![Vec::new(); max_edge as usize + 1];
    // m² + n² ≤ hypotenuse ≤ √2·max_edge bounds m
    let m_max = (2 * max_edge as u128).sqrt() as u64 + 1;
    for m in 2..=m_max {
        for n in 1..m {
            if (m - n) % 2 == 0 || m.gcd(&n) != 1 {
                continue;
            }
            let a = m * m - n * n;
            let b = 2 * m * n;
            let mut k = 1;
            while k * a.max(b) <= max_edge {
                let (x, y) = (k * a, k * b);
                partners[x as usize].push(y);
                partners[y as usize].push(x);
                k += 1;
            }
        }
    }
    for list in &mut partners {
        list.sort_unstable();
        list.dedup();
    }
    partners
}

/// All primitive integer face cuboids with every edge at most `max_edge`,
/// ordered lexicographically by their ascending edges.
pub fn brute_force_face_cuboids(max_edge: u64) -> Result<Vec<IntegerCuboidHit>> {
    if max_edge == 0 {
        return Err(Error::domain("max_edge must be at least 1"));
    }
    if max_edge > u32::MAX as u64 {
        return Err(Error::domain(format!(
            "max_edge {max_edge} exceeds {}",
            u32::MAX
        )));
    }
    let partners = partner_lists(max_edge);
    let primitive: BTreeSet<[u64; 3]> = (1..=max_edge as usize)
        .into_par_iter()
        .flat_map_iter(|shared| {
            let list = &partners[shared];
            let shared = shared as u64;
            let mut found = Vec::new();
            for (i, &x) in list.iter().enumerate() {
                for &y in &list[i + 1..] {
                    if exact_isqrt(sq(shared) + sq(x) + sq(y)).is_some() {
                        let g = shared.gcd(&x).gcd(&y);
                        let mut edges = [shared / g, x / g, y / g];
                        edges.sort_unstable();
                        found.push(edges);
                    }
                }
            }
            found
        })
        .collect();
    Ok(primitive
        .into_iter()
        .map(IntegerCuboidHit::from_edges)
        .collect())
}

/// Runs the search on a dedicated pool of `threads` workers, or on the
/// global pool when `None`.
pub fn brute_force_face_cuboids_with_threads(
    max_edge: u64,
    threads: Option<usize>,
) -> Result<Vec<IntegerCuboidHit>> {
    match threads {
        None => brute_force_face_cuboids(max_edge),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::internal(format!("thread pool: {e}")))?
            .install(|| brute_force_face_cuboids(max_edge)),
    }
}

/// Reads [`THREADS_ENV`]; unset means no cap.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Parse(format!(
                "{THREADS_ENV}={v:?} is not a positive integer"
            ))),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Roundtrip {
    pub edges: [u64; 3],
    /// `[BF, EF, GF]`, with `EF` the edge shared by the integral face
    /// diagonals and `BF ≤ GF`.
    pub labeled_edges: [u64; 3],
    #[serde(with = "serde_rational")]
    pub t: BigRational,
    #[serde(with = "serde_rational")]
    pub gamma: BigRational,
    #[serde(serialize_with = "serialize_rationals")]
    pub s_fiber: Vec<BigRational>,
    pub passed: bool,
}

fn serialize_rationals<S: serde::Serializer>(
    values: &[BigRational],
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(values.iter().map(|v| v.to_string()))
}

/// `[BF, EF, GF]` for a face cuboid: `EF` is the edge shared by the two
/// integral face diagonals, and `BF ≤ GF`.
fn label_edges(hit: &IntegerCuboidHit) -> Result<[u64; 3]> {
    if !hit.is_face_cuboid() {
        return Err(Error::domain(format!(
            "{:?} is not a face cuboid",
            hit.edges
        )));
    }
    if hit.rational_diagonal_pairs.len() == 3 {
        return Err(Error::PerfectCuboid(hit.edges));
    }
    let [p, q] = [
        &hit.rational_diagonal_pairs[0],
        &hit.rational_diagonal_pairs[1],
    ];
    let shared = *p
        .edges
        .iter()
        .find(|e| q.edges.contains(e))
        .expect("two face diagonals of a box share an edge");
    let other = |d: &DiagonalPair| {
        if d.edges[0] == shared {
            d.edges[1]
        } else {
            d.edges[0]
        }
    };
    let (bf, gf) = (other(p).min(other(q)), other(p).max(other(q)));
    Ok([bf, shared, gf])
}

/// Labels the hit's edges, inverts to `(t, γ)`, checks the four-element
/// `s`-fiber and that `(t, γ)` rebuilds a similar cuboid.
pub fn verify_class_roundtrip(hit: &IntegerCuboidHit) -> Result<Roundtrip> {
    // classify from the edges alone rather than trusting the reported lists
    if !hit.diagonals_verify() || hit.edges.contains(&0) {
        return Err(Error::domain(format!(
            "{:?} reports a wrong diagonal",
            hit.edges
        )));
    }
    let fresh = IntegerCuboidHit::from_edges(hit.edges);
    let labeled_edges = label_edges(&fresh)?;

    let [bf_q, ef_q, gf_q] = labeled_edges.map(|e| BigRational::from_integer(BigInt::from(e)));
    let pair = pair_b_from_cuboid(&bf_q, &ef_q, &gf_q)?;
    let fiber = fiber_f(&pair)?;
    let original = FaceCuboid::from_edges(bf_q, ef_q, gf_q)?;
    let rebuilt = cuboid_from_pair_b(&pair)?;
    let valid_pair = PairB::new(pair.t().clone(), pair.gamma().clone()).is_ok();
    let passed = valid_pair && fiber.len() == 4 && original.is_similar_to(&rebuilt);
    Ok(Roundtrip {
        edges: fresh.edges,
        labeled_edges,
        t: pair.t().clone(),
        gamma: pair.gamma().clone(),
        s_fiber: fiber.iter().map(|a| a.s().clone()).collect(),
        passed,
    })
}
