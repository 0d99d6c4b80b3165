//! The `kemeny` command: read a chain document, run the pipeline, print a
//! report and optionally write a [`ResultDocument`].

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::document::{ChainDocument, ResultDocument};
use crate::error::{Condition, Error};
use crate::kemeny::{analyze, Analysis};
use crate::mc::estimate_kemeny;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Parser)]
#[command(name = "kemeny", version, about = "Kemeny's constant of a reversible Markov chain by four routes")]
pub struct Args {
    /// Chain document (TOML, or JSON with a .json extension).
    pub input: PathBuf,

    /// Print the human-readable report (the default unless --out is given).
    #[arg(long)]
    pub report: bool,

    /// Write the JSON result document to this path.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Include simplex vertex coordinates, circumcenter and Lemoine point.
    #[arg(long)]
    pub emit_embedding: bool,

    /// Monte Carlo samples for an empirical estimate of K.
    #[arg(long, value_name = "K")]
    pub mc_samples: Option<u64>,

    /// Seed for the Monte Carlo estimate.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Override the cross-route agreement tolerance.
    #[arg(long, value_name = "T")]
    pub tol_cross: Option<f64>,
}

/// Failure classes with their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Parse,
    Inadmissible(Condition),
    Numerical,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Parse => 2,
            Category::Inadmissible(_) => 3,
            Category::Numerical => 4,
        }
    }

    pub fn label(self) -> String {
        match self {
            Category::Parse => "parse_error".into(),
            Category::Inadmissible(c) => format!("inadmissible:{c}"),
            Category::Numerical => "numerical_failure".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}: {message}", category.label())]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError {
            category: Category::Parse,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let category = match &err {
            Error::Inadmissible(c) => Category::Inadmissible(*c),
            Error::SelfLoop { .. } => Category::Inadmissible(Condition::LoopFree),
            Error::Reducible => Category::Inadmissible(Condition::Irreducible),
            Error::NotReversible { .. } => Category::Inadmissible(Condition::Reversible),
            Error::DimensionMismatch(_)
            | Error::TooSmall(_)
            | Error::DuplicateState(_)
            | Error::NonFinite { .. }
            | Error::NegativeEntry { .. }
            | Error::NonStochasticRow { .. }
            | Error::InvalidArgument(_) => Category::Parse,
            _ => Category::Numerical,
        };
        CliError {
            category,
            message: err.to_string(),
        }
    }
}

/// Runs one invocation. The report goes to `out`, warnings to `err`.
pub fn run(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<ResultDocument, CliError> {
    let doc = ChainDocument::load(&args.input).map_err(|e| CliError::parse(e.to_string()))?;
    for warning in doc.warnings() {
        let _ = writeln!(err, "warning: {warning}");
    }
    let chain = doc.to_chain().map_err(|e| CliError::parse(e.to_string()))??;

    let mut tol = Tolerances::default();
    if let Some(t) = args.tol_cross {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::parse(format!("--tol-cross must be positive, got {t}")));
        }
        tol = tol.with_cross(t);
    }
    let analysis = analyze(&chain, &tol)?;

    let mut result = ResultDocument::from_analysis(&analysis, doc.metadata.name.clone(), args.emit_embedding);
    if let Some(samples) = args.mc_samples {
        if samples == 0 {
            return Err(CliError::parse("--mc-samples must be at least 1"));
        }
        let estimate = estimate_kemeny(&chain, &analysis.pi, samples, args.seed)?;
        result = result.with_mc(estimate, args.seed);
    }

    if let Some(path) = &args.out {
        std::fs::write(path, result.to_json())
            .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.report || args.out.is_none() {
        let text = render_report(&analysis, &result);
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::parse(format!("cannot write report: {e}")))?;
    }
    Ok(result)
}

/// Like C's `%g` with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vector(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| sig6(v)).collect();
    format!("({})", parts.join(", "))
}

pub fn render_report(analysis: &Analysis, result: &ResultDocument) -> String {
    let mut s = String::new();
    let states = analysis.chain.states();
    let n = states.len();
    let adm = &analysis.admissibility;
    let k = &analysis.kemeny;
    let g = &analysis.geometry;
    let d = &analysis.diagnostics;

    let title = result.name.as_deref().unwrap_or("chain");
    let _ = writeln!(s, "{title}: {n} states");
    let _ = writeln!(
        s,
        "admissible: irreducible {}, aperiodic {}, reversible {}, loop-free {}",
        yes_no(adm.irreducible),
        yes_no(adm.aperiodic),
        yes_no(adm.reversible),
        yes_no(adm.loop_free)
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "stationary distribution");
    for (label, p) in states.iter().zip(analysis.pi.as_vector().iter()) {
        let _ = writeln!(s, "  {label:<12} {}", sig6(*p));
    }
    if n <= 10 {
        let _ = writeln!(s);
        let _ = writeln!(s, "commute times");
        let c = analysis.commute.matrix();
        for x in 0..n {
            for y in (x + 1)..n {
                let _ = writeln!(s, "  {:<12} {:<12} {}", states[x], states[y], sig6(c[(x, y)]));
            }
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "checks");
    let _ = writeln!(s, "  hitting-time recursion residual {}", sci(d.recursion_residual));
    let _ = writeln!(s, "  hitting vs pseudoinverse route  {}", sci(d.commute_route_deviation));
    let _ = writeln!(s, "  simplex edges vs commute times  {}", sci(d.embedding_deviation));

    let _ = writeln!(s);
    let _ = writeln!(s, "Kemeny's constant");
    let (lo, hi) = k
        .per_state
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let _ = writeln!(s, "  per-state K_x           {}..{}  spread {}", sig6(lo), sig6(hi), sci(k.spread));
    let _ = writeln!(s, "  commute                 {}", sig6(k.commute));
    let _ = writeln!(
        s,
        "  geometric R^2-|g-l|^2   {}  deviation {}",
        sig6(k.geometric),
        sci(d.geometric_deviation)
    );
    let _ = writeln!(
        s,
        "  spectral                {}  deviation {}",
        sig6(k.spectral),
        sci(d.spectral_deviation)
    );
    let _ = writeln!(s, "  max route disagreement  {}", sci(k.agreement));

    let _ = writeln!(s);
    let _ = writeln!(s, "simplex");
    let _ = writeln!(s, "  circumradius R       {}", sig6(g.r));
    let _ = writeln!(s, "  R^2                  {}", sig6(g.r_squared));
    let _ = writeln!(s, "  |gamma - ell|        {}", sig6(g.center_distance));
    let _ = writeln!(s, "  |gamma - ell|^2      {}", sig6(g.center_distance_squared));
    let _ = writeln!(
        s,
        "  circumcenter coords  {}  {}",
        vector(&g.gamma_hat),
        if g.circumcenter_inside { "inside" } else { "outside" }
    );
    let _ = writeln!(
        s,
        "  Lemoine coords       {}  facet total {}",
        vector(&g.ell_hat),
        sig6(g.lemoine_facet_total)
    );

    if let Some(e) = &result.embedding {
        let _ = writeln!(s);
        let _ = writeln!(s, "embedding");
        for (label, v) in states.iter().zip(&e.vertices) {
            let _ = writeln!(s, "  v[{label}] {}", vector(v));
        }
        let _ = writeln!(s, "  gamma {}", vector(&e.circumcenter));
        let _ = writeln!(s, "  ell   {}", vector(&e.lemoine));
    }

    if let Some(mc) = &result.mc {
        let _ = writeln!(s);
        let _ = writeln!(s, "Monte Carlo ({} samples, seed {})", mc.estimate.samples, mc.seed);
        let _ = writeln!(
            s,
            "  estimate             {} +/- {}  ({} stderr from exact)",
            sig6(mc.estimate.mean),
            sig6(mc.estimate.stderr),
            sig6(mc.z_score)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(1.35), "1.35");
        assert_eq!(sig6(1.40625f64.sqrt()), "1.18585");
        assert_eq!(sig6(0.05625), "0.05625");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.00001234), "1.234e-5");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.0), "0");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(4.0), "4");
    }

    #[test]
    fn error_categories() {
        let e: CliError = Error::SelfLoop { state: 0, value: 0.5 }.into();
        assert_eq!(e.category, Category::Inadmissible(Condition::LoopFree));
        assert_eq!(e.category.exit_code(), 3);
        let e: CliError = Error::Inadmissible(Condition::Aperiodic).into();
        assert_eq!(e.category.label(), "inadmissible:aperiodic");
        let e: CliError = Error::SingularSystem.into();
        assert_eq!(e.category.exit_code(), 4);
        let e: CliError = Error::NonStochasticRow { row: 0, sum: 2.0 }.into();
        assert_eq!(e.category.exit_code(), 2);
    }
}
