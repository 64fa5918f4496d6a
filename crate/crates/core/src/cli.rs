//! The `facecuboid` command line.
//!
//! Exit codes: 0 success, 1 malformed input, 2 domain error, 3 internal
//! consistency error.

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::correspondence::{
    default_seed, fiber_f, forward_f, map_a_to_bprime, rank_family, PairB, TripleA,
};
use crate::cuboid::{canonicalize, class_fiber_32, pair_b_from_cuboid, CuboidRecord};
use crate::curves::CurvePoint;
use crate::error::{Error, Result};
use crate::exactq::{format_rational, parse_rational, serde_rational};
use crate::oracle::{
    brute_force_face_cuboids_with_threads, threads_from_env, verify_class_roundtrip,
    IntegerCuboidHit, Roundtrip,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "facecuboid",
    version,
    about = "Rational face cuboids from elliptic-curve points"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "jsonl", global = true)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct SeedArgs {
    /// Curve parameter s of E1(s) [default: 5/3].
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// x-coordinate of a non-torsion point [default: -20/27].
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// y-coordinate of that point [default: 1120/243].
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cuboid classes from the multiples [1]P ... [n]P of a seed point.
    Family {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, default_value_t = 6)]
        n: u32,
    },
    /// The full chain (s, alpha, beta) -> (t, gamma, delta) -> cuboid class.
    FromPoint {
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Parameters (t, gamma) and the four (s, alpha) of a cuboid given as BF,EF,GF.
    Invert {
        /// BF,EF,GF with EF the edge shared by the two rational face diagonals.
        #[arg(long)]
        edges: String,
    },
    /// The 32 triples (s, alpha, beta) over the class of (t, gamma).
    Fibers {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Distinct s with rank E1(s) > 0, each with a non-torsion witness.
    RankFamily {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Primitive integer face cuboids with all edges at most --max-edge.
    Search {
        #[arg(long)]
        max_edge: u64,
    },
    /// Round-trip integer face cuboids through the parameter maps.
    Verify {
        /// One integer box, edges in any order.
        #[arg(
            long,
            conflicts_with = "max_edge",
            required_unless_present = "max_edge"
        )]
        edges: Option<String>,
        /// Verify every search hit up to this bound.
        #[arg(long)]
        max_edge: Option<u64>,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => 1,
        Error::Domain(_)
        | Error::NotSquare(_)
        | Error::Unsupported(_)
        | Error::PerfectCuboid(_) => 2,
        Error::Internal(_) => 3,
    }
}

/// Records that can be written as JSON or as one flat CSV row.
pub trait Emit: Serialize {
    fn csv_header() -> Vec<&'static str>;
    fn csv_row(&self) -> Vec<String>;
}

impl Emit for CuboidRecord {
    fn csv_header() -> Vec<&'static str> {
        vec![
            "bf",
            "ef",
            "gf",
            "be",
            "hf",
            "df",
            "third_diagonal_rational",
            "canonical_t",
            "primitive_bf",
            "primitive_ef",
            "primitive_gf",
        ]
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> = self.edges.to_vec();
        row.extend(self.face_diagonals.iter().cloned());
        row.push(self.space_diagonal.clone());
        row.push(self.third_diagonal_rational.to_string());
        row.push(self.canonical_t.clone());
        row.extend(self.primitive_edges.iter().map(|n| n.to_string()));
        row
    }
}

impl Emit for TripleA {
    fn csv_header() -> Vec<&'static str> {
        vec!["s", "alpha", "beta"]
    }

    fn csv_row(&self) -> Vec<String> {
        [self.s(), self.alpha(), self.beta()]
            .map(format_rational)
            .to_vec()
    }
}

impl Emit for IntegerCuboidHit {
    fn csv_header() -> Vec<&'static str> {
        vec!["a", "b", "c", "face_diagonals", "space_diagonal"]
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> = self.edges.iter().map(u64::to_string).collect();
        let diagonals: Vec<String> = self
            .rational_diagonal_pairs
            .iter()
            .map(|p| format!("{}:{}:{}", p.edges[0], p.edges[1], p.diagonal))
            .collect();
        row.push(diagonals.join(" "));
        row.push(
            self.space_diagonal
                .map(|d| d.to_string())
                .unwrap_or_default(),
        );
        row
    }
}

impl Emit for Roundtrip {
    fn csv_header() -> Vec<&'static str> {
        vec!["bf", "ef", "gf", "t", "gamma", "s_fiber", "passed"]
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> = self.labeled_edges.iter().map(u64::to_string).collect();
        row.push(format_rational(&self.t));
        row.push(format_rational(&self.gamma));
        let fiber: Vec<String> = self.s_fiber.iter().map(format_rational).collect();
        row.push(fiber.join(" "));
        row.push(self.passed.to_string());
        row
    }
}

#[derive(Debug, Serialize)]
pub struct RankRecord {
    pub n: i64,
    #[serde(with = "serde_rational")]
    pub s: BigRational,
    pub witness: TripleA,
}

impl Emit for RankRecord {
    fn csv_header() -> Vec<&'static str> {
        vec!["n", "s", "alpha", "beta"]
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            format_rational(&self.s),
            format_rational(self.witness.alpha()),
            format_rational(self.witness.beta()),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct PointChainRecord {
    pub triple: TripleA,
    pub triple_b: crate::correspondence::TripleB,
    pub cuboid: CuboidRecord,
}

impl Emit for PointChainRecord {
    fn csv_header() -> Vec<&'static str> {
        let mut h = vec!["s", "alpha", "beta", "t", "gamma", "delta"];
        h.extend(CuboidRecord::csv_header());
        h
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row = self.triple.csv_row();
        let b = &self.triple_b;
        row.extend([b.t(), b.gamma(), b.delta()].map(format_rational));
        row.extend(self.cuboid.csv_row());
        row
    }
}

#[derive(Debug, Serialize)]
pub struct InvertRecord {
    pub edges: [String; 3],
    pub pair: PairB,
    pub fiber: Vec<crate::correspondence::PairA>,
}

impl Emit for InvertRecord {
    fn csv_header() -> Vec<&'static str> {
        vec!["bf", "ef", "gf", "t", "gamma", "s", "alpha"]
    }

    fn csv_row(&self) -> Vec<String> {
        let mut row = self.edges.to_vec();
        row.push(format_rational(self.pair.t()));
        row.push(format_rational(self.pair.gamma()));
        let ss: Vec<String> = self.fiber.iter().map(|p| format_rational(p.s())).collect();
        let alphas: Vec<String> = self
            .fiber
            .iter()
            .map(|p| format_rational(p.alpha()))
            .collect();
        row.push(ss.join(" "));
        row.push(alphas.join(" "));
        row
    }
}

pub fn write_records<T: Emit>(records: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    let io_err = |e: io::Error| Error::Domain(format!("write failed: {e}"));
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, records)
                .map_err(|e| Error::Domain(format!("write failed: {e}")))?;
            writeln!(out).map_err(io_err)?;
        }
        Format::Jsonl => {
            for r in records {
                let line = serde_json::to_string(r).expect("records serialize");
                writeln!(out, "{line}").map_err(io_err)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let csv_err = |e: csv::Error| Error::Domain(format!("write failed: {e}"));
            w.write_record(T::csv_header()).map_err(csv_err)?;
            for r in records {
                w.write_record(r.csv_row()).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)?;
        }
    }
    Ok(())
}

fn seed_from(args: &SeedArgs) -> Result<TripleA> {
    match (&args.s, &args.x, &args.y) {
        (None, None, None) => Ok(default_seed()),
        (Some(s), Some(x), Some(y)) => {
            TripleA::new(parse_rational(s)?, parse_rational(x)?, parse_rational(y)?)
        }
        _ => Err(Error::Parse(
            "--s, --x and --y must be given together".into(),
        )),
    }
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',').map(|part| parse(part.trim())).collect()
}

fn parse_edges3<T>(text: &str, parse: impl Fn(&str) -> Result<T>) -> Result<[T; 3]> {
    parse_list(text, parse)?.try_into().map_err(|_| {
        Error::Parse(format!(
            "expected three comma-separated edges, got {text:?}"
        ))
    })
}

fn parse_u64(text: &str) -> Result<u64> {
    text.parse()
        .map_err(|_| Error::Parse(format!("expected a positive integer, got {text:?}")))
}

/// The cuboid classes of `F(s, x([n]P))` for `n = 1..=n_max`.
pub fn family_records(seed: &TripleA, n_max: u32) -> Result<Vec<CuboidRecord>> {
    let curve = seed.curve();
    let base = seed.point();
    let mut current = CurvePoint::Identity;
    let mut seen = BTreeSet::new();
    let mut records = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        current = curve.add(&current, &base)?;
        let (x, y) = match &current {
            CurvePoint::Affine { x, y } => (x.clone(), y.clone()),
            CurvePoint::Identity => {
                return Err(Error::internal(format!(
                    "[{n}]P is the identity for a non-torsion P"
                )))
            }
        };
        let triple =
            TripleA::new(seed.s().clone(), x, y).map_err(|e| e.into_internal("multiple"))?;
        let class = canonicalize(&forward_f(&triple.pair())?)?;
        if !seen.insert(class.clone()) {
            return Err(Error::internal(format!(
                "multiple {n} repeats an earlier cuboid class"
            )));
        }
        records.push(CuboidRecord::from_class(&class));
    }
    Ok(records)
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let format = cli.format;
    match &cli.command {
        Command::Family { seed, n } => {
            if *n == 0 {
                return Err(Error::Parse("--n must be positive".into()));
            }
            write_records(&family_records(&seed_from(seed)?, *n)?, format, out)
        }
        Command::FromPoint { seed } => {
            let triple = seed_from(seed)?;
            let triple_b = map_a_to_bprime(&triple)?;
            let class = canonicalize(
                &triple_b
                    .pair()
                    .map_err(|e| e.into_internal("B' projection"))?,
            )?;
            let record = PointChainRecord {
                triple,
                triple_b,
                cuboid: CuboidRecord::from_class(&class),
            };
            write_records(&[record], format, out)
        }
        Command::Invert { edges } => {
            let [bf, ef, gf] = parse_edges3(edges, parse_rational)?;
            let pair = pair_b_from_cuboid(&bf, &ef, &gf)?;
            let fiber = fiber_f(&pair)?.to_vec();
            let record = InvertRecord {
                edges: [&bf, &ef, &gf].map(format_rational),
                pair,
                fiber,
            };
            write_records(&[record], format, out)
        }
        Command::Fibers { t, gamma } => {
            let pair = PairB::new(parse_rational(t)?, parse_rational(gamma)?)?;
            write_records(&class_fiber_32(&pair)?, format, out)
        }
        Command::RankFamily { count, seed } => {
            if *count == 0 {
                return Err(Error::Parse("--count must be positive".into()));
            }
            let family = rank_family(&seed_from(seed)?, *count)?;
            for (n, s) in &family.skipped {
                let _ = writeln!(err, "note: multiple {n} repeats s = {s}; skipped");
            }
            let records: Vec<RankRecord> = family
                .members
                .into_iter()
                .map(|m| RankRecord {
                    n: m.multiple,
                    s: m.s,
                    witness: m.witness,
                })
                .collect();
            write_records(&records, format, out)
        }
        Command::Search { max_edge } => {
            if *max_edge == 0 {
                return Err(Error::Parse("--max-edge must be positive".into()));
            }
            let hits = brute_force_face_cuboids_with_threads(*max_edge, threads_from_env()?)?;
            write_records(&hits, format, out)
        }
        Command::Verify { edges, max_edge } => {
            let hits = match (edges, max_edge) {
                (Some(edges), _) => vec![IntegerCuboidHit::from_edges(parse_edges3(
                    edges, parse_u64,
                )?)],
                (None, Some(0)) => return Err(Error::Parse("--max-edge must be positive".into())),
                (None, Some(m)) => brute_force_face_cuboids_with_threads(*m, threads_from_env()?)?,
                (None, None) => unreachable!("clap requires one of --edges, --max-edge"),
            };
            let reports: Vec<Roundtrip> = hits
                .iter()
                .map(verify_class_roundtrip)
                .collect::<Result<_>>()?;
            write_records(&reports, format, out)?;
            match reports.iter().find(|r| !r.passed) {
                Some(r) => Err(Error::internal(format!(
                    "round trip failed for {:?}",
                    r.edges
                ))),
                None => Ok(()),
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(file) => {
                let mut w = BufWriter::new(file);
                execute(&cli, &mut w, stderr).and_then(|()| {
                    w.flush()
                        .map_err(|e| Error::Domain(format!("write failed: {e}")))
                })
            }
            Err(e) => Err(Error::Domain(format!(
                "cannot create {}: {e}",
                path.display()
            ))),
        },
        None => execute(&cli, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
