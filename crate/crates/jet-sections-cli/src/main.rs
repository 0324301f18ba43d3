//! Command-line surface for the jet-sections library.
//!
//! Exit codes: 0 on success, 2 when a verification fails, 3 on invalid
//! input. Errors are emitted as one JSON object on stderr.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use jet_sections::basis::{
    expand_in_basis, global_section_basis, is_differentially_homogeneous, smallest_chart_term,
    SmallestTermMode,
};
use jet_sections::charts::{is_global_section, to_chart, twisted_transport, verify_dehomogenization};
use jet_sections::combinatorics::{enumerate_by_twist, enumerate_by_weight, StaircaseTuple, StrictSeq};
use jet_sections::matrix::{build_delta0, build_delta_j, build_homogeneous, JetMatrix};
use jet_sections::{Polynomial, Scalar};

const EXIT_VERIFICATION: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "jet-sections", version, about = "Exact determinant bases of twisted jet-differential sections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum MatrixKind {
    Delta0,
    H,
    DeltaJ,
}

#[derive(Args)]
struct TupleArg {
    /// Staircase tuple as a JSON array of blocks, block j=1 first,
    /// e.g. "[[1,2]]" or "[[2],[0]]".
    #[arg(long)]
    tuple: String,
    /// Ambient dimension; pads the tuple with empty blocks when it has
    /// fewer than N.
    #[arg(long = "N")]
    n: Option<usize>,
}

impl TupleArg {
    fn parse(&self) -> Result<StaircaseTuple, CliError> {
        let blocks: Vec<Vec<usize>> = serde_json::from_str(&self.tuple)
            .map_err(|e| CliError::invalid(format!("cannot parse tuple literal: {e}")))?;
        let n = self.n.unwrap_or(blocks.len()).max(blocks.len()).max(1);
        let mut seqs = Vec::with_capacity(n);
        for b in blocks {
            seqs.push(StrictSeq::new(b).map_err(CliError::from_invalid)?);
        }
        seqs.resize(n, StrictSeq::empty());
        StaircaseTuple::new(seqs).map_err(CliError::from_invalid)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List staircase tuples, either of a fixed weight or below a
    /// twist bound.
    Enumerate {
        #[arg(long = "N")]
        n: usize,
        /// Enumerate tuples of weight exactly p.
        #[arg(long, conflicts_with = "d")]
        p: Option<u64>,
        /// Enumerate the (N+1)^d tuples with maximum entry below d.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build a matrix for a tuple and print it with its determinant.
    Det {
        #[command(flatten)]
        tuple: TupleArg,
        #[arg(long, value_enum, default_value_t = MatrixKind::Delta0)]
        kind: MatrixKind,
        /// Chart index for --kind delta-j.
        #[arg(long)]
        chart: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Transport a chart-0 polynomial to another chart and report pole
    /// orders.
    Chart {
        /// Polynomial as JSON (or @path to a JSON file).
        #[arg(long)]
        poly: String,
        #[arg(long)]
        chart: usize,
        /// Twist d: also emit the transported polynomial x_jj^d · image.
        #[arg(long)]
        twist: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sweep all tuples with max entry below d: dehomogenization
    /// identity in every chart, diagonal smallest-monomial check, and
    /// closed-form/brute smallest-term agreement.
    Verify {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build and verify the global-section basis; print its size
    /// against (N+1)^d.
    Dim {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Jet order bound; defaults to d-1.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Expand a chart-0 polynomial in the determinant basis.
    BasisExpand {
        /// Polynomial as JSON (or @path to a JSON file).
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check differential homogeneity of det ℋ(tuple) by randomized
    /// exact trials.
    Diffhom {
        #[command(flatten)]
        tuple: TupleArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: String) -> Self {
        CliError {
            code: EXIT_INVALID,
            message,
        }
    }

    fn verification(message: String) -> Self {
        CliError {
            code: EXIT_VERIFICATION,
            message,
        }
    }

    fn from_invalid(e: jet_sections::Error) -> Self {
        CliError::invalid(e.to_string())
    }

    fn from_verification(e: jet_sections::Error) -> Self {
        CliError::verification(e.to_string())
    }
}

fn read_poly(arg: &str) -> Result<Polynomial, CliError> {
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read {path}: {e}")))?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("cannot parse polynomial JSON: {e}")))
}

fn emit(format: Format, value: &impl Serialize, table: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("output serializes")
        ),
        Format::Table => print!("{}", table()),
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("JETSECTIONS_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.message, "code": e.code }));
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Enumerate { n, p, d, format } => {
            let tuples = match (p, d) {
                (Some(p), None) => enumerate_by_weight(n, p),
                (None, Some(d)) => enumerate_by_twist(n, d),
                _ => {
                    return Err(CliError::invalid(
                        "exactly one of --p (weight) or --d (twist) is required".into(),
                    ))
                }
            };
            emit(format, &tuples, || {
                let mut out = String::new();
                for t in &tuples {
                    out.push_str(&format!("{t}\n"));
                }
                out.push_str(&format!("count: {}\n", tuples.len()));
                out
            });
            Ok(())
        }
        Command::Det {
            tuple,
            kind,
            chart,
            format,
        } => {
            let t = tuple.parse()?;
            let matrix: JetMatrix = match kind {
                MatrixKind::Delta0 => build_delta0(&t),
                MatrixKind::H => build_homogeneous(&t),
                MatrixKind::DeltaJ => build_delta_j(
                    &t,
                    chart.ok_or_else(|| {
                        CliError::invalid("--kind delta-j requires --chart".into())
                    })?,
                ),
            }
            .map_err(CliError::from_invalid)?;
            let det = matrix.determinant();
            let payload = json!({
                "tuple": t,
                "size": matrix.size(),
                "matrix": matrix,
                "det": det,
                "det_text": det.to_string(),
            });
            emit(format, &payload, || {
                format!("{}det = {}\n", matrix.render_text(), det)
            });
            Ok(())
        }
        Command::Chart {
            poly,
            chart,
            twist,
            format,
        } => {
            let p = read_poly(&poly)?;
            let section = to_chart(&p, chart).map_err(CliError::from_invalid)?;
            let transported = match twist {
                Some(d) => Some(twisted_transport(&p, chart, d).map_err(CliError::from_verification)?),
                None => None,
            };
            let report = match twist {
                Some(d) => Some(is_global_section(&p, d).map_err(CliError::from_invalid)?),
                None => None,
            };
            let payload = json!({
                "chart": chart,
                "pole": section.pole(),
                "section": section,
                "twist": twist,
                "transported": transported,
                "transported_text": transported.as_ref().map(|q| q.to_string()),
                "global_section": report,
            });
            emit(format, &payload, || {
                let mut out = format!("image in chart {chart}: {section}\n");
                if let Some(q) = &transported {
                    out.push_str(&format!("twisted transport: {q}\n"));
                }
                if let Some(r) = &report {
                    out.push_str(&format!(
                        "global section of twist {}: {}\n",
                        r.twist,
                        if r.is_global { "yes" } else { "no" }
                    ));
                }
                out
            });
            Ok(())
        }
        Command::Verify { n, d, format } => {
            let tuples = enumerate_by_twist(n, d);
            let mut signs = Vec::new();
            for t in &tuples {
                for j in 0..=n {
                    let sign = verify_dehomogenization(t, j).map_err(CliError::from_verification)?;
                    signs.push(json!({ "tuple": t, "chart": j, "sign": sign }));
                }
                let m = build_delta0(t).map_err(CliError::from_invalid)?;
                if m.size() > 0 {
                    let (mono, coeff) = m.diagonal_minimum().map_err(CliError::from_verification)?;
                    let det = m.determinant();
                    let (dm, dc) = det.smallest_term().map_err(CliError::from_verification)?;
                    if (dm, dc) != (&mono, &coeff) {
                        return Err(CliError::verification(format!(
                            "diagonal of {t} does not realize the smallest monomial"
                        )));
                    }
                }
                let brute = smallest_chart_term(t, SmallestTermMode::Brute)
                    .map_err(CliError::from_verification)?;
                let closed = smallest_chart_term(t, SmallestTermMode::ClosedForm)
                    .map_err(CliError::from_verification)?;
                if brute != closed {
                    return Err(CliError::verification(format!(
                        "smallest-term modes disagree on {t}"
                    )));
                }
            }
            let payload = json!({
                "N": n,
                "d": d,
                "tuples": tuples.len(),
                "checks": ["dehomogenization", "diagonal-minimum", "smallest-term-agreement"],
                "signs": signs,
                "status": "ok",
            });
            emit(format, &payload, || {
                format!(
                    "verified {} tuples across charts 0..={n}: OK\n",
                    tuples.len()
                )
            });
            Ok(())
        }
        Command::Dim { n, d, k, format } => {
            let k = k.unwrap_or(d.saturating_sub(1));
            let basis = global_section_basis(n, d, k).map_err(CliError::from_verification)?;
            let expected = (n as u64 + 1).pow(d as u32);
            if basis.len() as u64 != expected {
                return Err(CliError::verification(format!(
                    "basis has {} elements, expected {expected}",
                    basis.len()
                )));
            }
            let payload = json!({
                "N": n,
                "d": d,
                "k": k,
                "dimension": basis.len(),
                "expected": expected,
                "status": "ok",
            });
            emit(format, &payload, || {
                format!("{}\nOK\n", basis.len())
            });
            Ok(())
        }
        Command::BasisExpand { poly, format } => {
            let p = read_poly(&poly)?;
            let coeffs: BTreeMap<StaircaseTuple, Scalar> =
                expand_in_basis(&p).map_err(CliError::from_invalid)?;
            let items: Vec<serde_json::Value> = coeffs
                .iter()
                .map(|(t, c)| json!({ "tuple": t, "coeff": c }))
                .collect();
            emit(format, &items, || {
                let mut out = String::new();
                for (t, c) in &coeffs {
                    out.push_str(&format!("{t}: {c}\n"));
                }
                out
            });
            Ok(())
        }
        Command::Diffhom {
            tuple,
            trials,
            seed,
            format,
        } => {
            let t = tuple.parse()?;
            let det = build_homogeneous(&t)
                .map_err(CliError::from_invalid)?
                .determinant();
            let degree = (t.max_entry() + 1) as u32;
            let ok = is_differentially_homogeneous(&det, degree, trials, seed)
                .map_err(CliError::from_invalid)?;
            let payload = json!({
                "tuple": t,
                "degree": degree,
                "trials": trials,
                "seed": seed,
                "differentially_homogeneous": ok,
            });
            emit(format, &payload, || {
                format!(
                    "det H{t} with degree {degree}: {} ({trials} trials, seed {seed})\n",
                    if ok { "homogeneous" } else { "NOT homogeneous" }
                )
            });
            if ok {
                Ok(())
            } else {
                Err(CliError::verification(format!(
                    "differential homogeneity failed for {t}"
                )))
            }
        }
    }
}
