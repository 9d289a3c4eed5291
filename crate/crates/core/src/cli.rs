//! The `cantor` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::cantor::default_budget;
use crate::classify::{classify_pair, lambda_sweep, sample_space, ClassifyOptions, StructureClass};
use crate::config::ExperimentConfig;
use crate::dimension::{
    box_dimension_estimate, content_profile, gamma_decomposition, moran_dimension,
    non_increasing_from, scaling_witness, GammaOutcome, WitnessOptions, DEFAULT_PRIME_BOUND,
};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::renorm::{
    box_search_no, box_search_yes, difference_pair_search, verify_certificate, Certificate,
    DiffPairContext, PlaneBox, PlanePoint, SearchLimits, Verdict,
};
use crate::svg::interval_diagram;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "cantor",
    version,
    about = "Arithmetic differences of affine Cantor sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    depth: Option<usize>,
    /// Covering budget in intervals (default: CANTOR_ARITH_BUDGET or 2^22).
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimensions, box-counting and content tables.
    Dim(Common),
    /// Depth-d covering of K - lambda K'.
    Cover(Common),
    /// Certify a point or box, or replay a certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Verify an existing certificate instead of searching.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Classify K - lambda K'.
    Classify(Common),
    /// Classify over a grid of lambda values.
    Sweep(Common),
    /// Draw random pairs from a parameter box.
    Sample(Common),
    /// Build a scaling witness around t.
    Witness(Common),
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::Verification(_) => EXIT_VERIFICATION,
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Dim(c) => cmd_dim(&Session::open(c)?),
        Command::Cover(c) => cmd_cover(&Session::open(c)?),
        Command::Certify {
            replay: Some(path), ..
        } => cmd_replay(&path),
        Command::Certify { common, .. } => cmd_certify(&Session::open(common)?),
        Command::Classify(c) => cmd_classify(&Session::open(c)?),
        Command::Sweep(c) => cmd_sweep(&Session::open(c)?),
        Command::Sample(c) => cmd_sample(&Session::open(c)?),
        Command::Witness(c) => cmd_witness(&Session::open(c)?),
    }
}

struct Session {
    cfg: ExperimentConfig,
    flags: Common,
}

impl Session {
    fn open(flags: Common) -> Result<Self> {
        let path = flags
            .config
            .as_ref()
            .ok_or_else(|| Error::Config("--config is required".into()))?;
        Ok(Session {
            cfg: ExperimentConfig::load(path)?,
            flags,
        })
    }

    fn budget(&self) -> usize {
        self.flags
            .budget
            .or(self.cfg.budget)
            .unwrap_or_else(default_budget)
    }

    fn depth(&self, default: usize) -> usize {
        self.flags.depth.or(self.cfg.depth).unwrap_or(default)
    }

    fn limits(&self) -> SearchLimits {
        let d = SearchLimits::default();
        SearchLimits {
            depth_cap: self
                .flags
                .depth
                .or(self.cfg.depth_cap)
                .unwrap_or(d.depth_cap),
            node_budget: self.cfg.node_budget.unwrap_or(d.node_budget),
        }
    }

    fn classify_options(&self) -> ClassifyOptions {
        let d = ClassifyOptions::default();
        ClassifyOptions {
            depth: self.depth(d.depth),
            gap_samples: self.cfg.gap_samples.unwrap_or(d.gap_samples),
            budget: self.budget(),
            ..d
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let dir = &self.flags.out;
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
        text.push('\n');
        self.write(name, &text)
    }
}

/// `%.15g`-style text: 15 significant digits, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let fixed = format!("{:.*}", (14 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV text with the versioned header comment.
fn csv(kind: &str, columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("# cantor-csv v1 {kind}\n{}\n", columns.join(","));
    for row in rows {
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    out
}

fn q(x: &Rational) -> String {
    rational::format(x)
}

fn cmd_dim(s: &Session) -> Result<()> {
    let (k, kp) = s.cfg.ifs_pair()?;
    let lambda = s.cfg.lambda_or_one();
    let budget = s.budget();
    let d = moran_dimension(&k.ratios())?;
    let dp = moran_dimension(&kp.ratios())?;
    let hd_sum = d + dp;
    let depths = s.cfg.depths.clone().unwrap_or_else(|| vec![4, 6, 8, 10]);
    let est = box_dimension_estimate(&k, &kp, &lambda, &depths, budget)?;
    let exponent = s.cfg.content_exponent.unwrap_or(hd_sum.min(1.0));
    let content_depths = s
        .cfg
        .content_depths
        .clone()
        .unwrap_or_else(|| (4..=10).collect());
    let content = content_profile(&k, &kp, &lambda, exponent, &content_depths, budget)?;

    let rows: Vec<Vec<String>> = est
        .rows
        .iter()
        .map(|r| {
            vec![
                r.depth.to_string(),
                q(&r.scale),
                r.count.to_string(),
                r.intervals.to_string(),
                format_float(r.residual),
            ]
        })
        .collect();
    s.write(
        "dim.csv",
        &csv(
            "box-dimension",
            &["depth", "scale", "count", "intervals", "residual"],
            &rows,
        ),
    )?;
    let rows: Vec<Vec<String>> = content
        .iter()
        .map(|r| {
            vec![
                r.depth.to_string(),
                format_float(r.content),
                r.intervals.to_string(),
            ]
        })
        .collect();
    s.write(
        "content.csv",
        &csv("content", &["depth", "content", "intervals"], &rows),
    )?;
    let summary = json!({
        "dim_k": format_float(d),
        "dim_k_prime": format_float(dp),
        "hd_sum": format_float(hd_sum),
        "lambda": q(&lambda),
        "box_dimension": format_float(est.slope),
        "intercept": format_float(est.intercept),
        "content_exponent": format_float(exponent),
        "content_non_increasing_from": non_increasing_from(&content),
    });
    s.write_json("dim.json", &summary)?;
    println!(
        "dim K = {}  dim K' = {}  sum = {}  box estimate = {}",
        format_float(d),
        format_float(dp),
        format_float(hd_sum),
        format_float(est.slope)
    );
    Ok(())
}

fn cmd_cover(s: &Session) -> Result<()> {
    let (k, kp) = s.cfg.ifs_pair()?;
    let lambda = s.cfg.lambda_or_one();
    let depth = s.depth(8);
    let budget = s.budget();
    let left = k.level_set(depth, budget)?;
    let right = kp.level_set(depth, budget)?;
    let required = left.len() as u128 * right.len() as u128;
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let cover =
        left.minkowski_diff(&right.affine_image(&lambda, &Rational::from_integer(0.into()))?)?;
    let rows: Vec<Vec<String>> = cover
        .intervals()
        .iter()
        .map(|i| vec![q(&i.lo), q(&i.hi)])
        .collect();
    s.write("cover.csv", &csv("cover", &["lo", "hi"], &rows))?;
    if s.cfg.svg.unwrap_or(true) {
        let title = format!("K - {} K' at depth {depth}", q(&lambda));
        s.write("cover.svg", &interval_diagram(&cover, &title, 12))?;
    }
    println!(
        "{} intervals, {} gaps at depth {depth}",
        cover.len(),
        cover.gaps().len()
    );
    Ok(())
}

fn cmd_certify(s: &Session) -> Result<()> {
    let (pair, _) = s.cfg.pair()?;
    let ctx = DiffPairContext::with_limits(&pair, s.limits());
    let cert = match (&s.cfg.point, &s.cfg.region) {
        (Some(p), None) => {
            difference_pair_search(&ctx, &PlanePoint::new(p.s.clone(), p.t.clone())?)
        }
        (None, Some(b)) => {
            let bx = PlaneBox::new(b.s.clone(), b.t.clone())?;
            let no = box_search_no(&ctx, &bx);
            if no.verdict == Verdict::Unknown && ctx.lemma1.holds {
                let yes = box_search_yes(&ctx, &bx);
                if yes.verdict == Verdict::Yes {
                    yes
                } else {
                    no
                }
            } else {
                no
            }
        }
        _ => {
            return Err(Error::Config(
                "certify needs exactly one of \"point\" or \"box\"".into(),
            ))
        }
    };
    verify_certificate(&cert)?;
    let path = s.write("certificate.json", &(cert.to_json() + "\n"))?;
    println!(
        "verdict {:?} ({:?}), {} nodes, written to {}",
        cert.verdict,
        cert.terminal,
        cert.nodes,
        path.display()
    );
    Ok(())
}

fn cmd_replay(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text)?;
    verify_certificate(&cert)?;
    println!(
        "replay ok: verdict {:?} ({:?})",
        cert.verdict, cert.terminal
    );
    Ok(())
}

const CLASS_COLUMNS: [&str; 9] = [
    "lambda",
    "class",
    "certainty",
    "hd_sum",
    "tauRL",
    "tauLR",
    "n_gaps",
    "largest_gap",
    "depth",
];

fn class_row(c: &StructureClass) -> Vec<String> {
    vec![
        q(&c.lambda),
        c.class.to_string(),
        c.certainty.to_string(),
        format_float(c.conditions.hd_sum),
        q(&c.conditions.tau_rl),
        q(&c.conditions.tau_lr),
        c.diagnostics
            .n_gaps
            .map_or_else(String::new, |n| n.to_string()),
        c.diagnostics
            .largest_gap
            .as_ref()
            .map_or_else(String::new, q),
        c.diagnostics.depth.to_string(),
    ]
}

fn cmd_classify(s: &Session) -> Result<()> {
    let (pair, _) = s.cfg.pair()?;
    let lambda = s.cfg.lambda_or_one();
    let options = s.classify_options();
    let c = classify_pair(&pair, &lambda, &options)?;
    s.write(
        "classify.csv",
        &csv("classify", &CLASS_COLUMNS, &[class_row(&c)]),
    )?;
    s.write_json("classify.json", &c)?;
    if s.cfg.svg.unwrap_or(true) {
        let budget = s.budget();
        let left = pair.k.to_ifs().level_set(options.depth, budget)?;
        let right = pair.kp.to_ifs().level_set(options.depth, budget)?;
        if (left.len() as u128) * (right.len() as u128) <= budget as u128 {
            let cover = left
                .minkowski_diff(&right.affine_image(&lambda, &Rational::from_integer(0.into()))?)?;
            let title = format!("{} at depth {}: {}", pair, options.depth, c.class);
            s.write("classify.svg", &interval_diagram(&cover, &title, 12))?;
        }
    }
    println!("{} {} ({})", q(&lambda), c.class, c.certainty);
    Ok(())
}

fn cmd_sweep(s: &Session) -> Result<()> {
    let (pair, _) = s.cfg.pair()?;
    let rows = lambda_sweep(&pair, &s.cfg.grid, &s.classify_options(), s.flags.jobs)?;
    let table: Vec<Vec<String>> = rows.iter().map(class_row).collect();
    s.write("sweep.csv", &csv("sweep", &CLASS_COLUMNS, &table))?;
    s.write_json("sweep.json", &rows)?;
    for r in &rows {
        println!("{} {} ({})", q(&r.lambda), r.class, r.certainty);
    }
    Ok(())
}

fn cmd_sample(s: &Session) -> Result<()> {
    let bounds = s
        .cfg
        .bounds
        .as_ref()
        .ok_or_else(|| Error::Config("sample needs \"bounds\"".into()))?;
    let count = s.cfg.count.unwrap_or(10);
    let seed = s.flags.seed.or(s.cfg.seed).unwrap_or(0);
    let pairs = sample_space(count, bounds, seed)?;
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (rl, lr) = p.thickness_products();
            vec![
                i.to_string(),
                q(p.k.p0()),
                q(p.k.p1()),
                q(p.k.a()),
                q(p.kp.p0()),
                q(p.kp.p1()),
                q(p.kp.a()),
                format_float(p.hd_sum()),
                q(&rl),
                q(&lr),
            ]
        })
        .collect();
    let columns = [
        "index", "p0", "p1", "a", "q0", "q1", "b", "hd_sum", "tauRL", "tauLR",
    ];
    s.write("sample.csv", &csv("sample", &columns, &rows))?;
    println!("{} pairs (seed {seed})", pairs.len());
    Ok(())
}

fn cmd_witness(s: &Session) -> Result<()> {
    let (k, kp) = s.cfg.ifs_pair()?;
    let t = s
        .cfg
        .t
        .clone()
        .ok_or_else(|| Error::Config("witness needs \"t\"".into()))?;
    let radius = s
        .cfg
        .radius
        .clone()
        .ok_or_else(|| Error::Config("witness needs \"radius\"".into()))?;
    let decomp = match gamma_decomposition(&k.ratios(), &kp.ratios(), DEFAULT_PRIME_BOUND)? {
        GammaOutcome::Decomposed(d) => d,
        GammaOutcome::Independent { i, j } => {
            return Err(Error::Unsupported(format!(
                "ratios {i} of K and {j} of K' have an irrational log-ratio"
            )))
        }
        GammaOutcome::Undecided { value } => {
            return Err(Error::Unsupported(format!("could not factor {value}")))
        }
    };
    let options = WitnessOptions {
        max_k: s.depth(WitnessOptions::default().max_k),
        budget: s.budget(),
    };
    let w = scaling_witness(&k, &kp, &decomp, &t, &radius, options)?;
    let report = json!({
        "witness": w,
        "decomposition": decomp,
        "verification": {
            "expansion_ok": w.expansion_ok,
            "gamma_identity_ok": w.gamma_identity_ok,
            "window_ok": w.entry.projection().lo > &t - &radius && w.entry.projection().hi < &t + &radius,
        },
    });
    s.write_json("witness.json", &report)?;
    println!(
        "k = {} l = {} scale = {} shift = {} A = {}",
        w.k,
        w.l,
        q(&w.scale),
        q(&w.shift),
        q(&w.a_const)
    );
    if !(w.expansion_ok && w.gamma_identity_ok) {
        return Err(Error::Verification("witness failed its own checks".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.630929753571457), "0.630929753571457");
        assert_eq!(format_float(2.0f64.ln() / 3f64.ln()), "0.630929753571457");
        assert_eq!(format_float(-0.5), "-0.5");
        assert_eq!(format_float(1.5e-9), "1.5e-9");
        assert_eq!(format_float(0.0), "0");
    }

    #[test]
    fn csv_header_is_versioned() {
        let text = csv("demo", &["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(text, "# cantor-csv v1 demo\na,b\n1,2\n");
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(
            exit_code(&Error::BudgetExceeded {
                required: 2,
                budget: 1
            }),
            EXIT_BUDGET
        );
        assert_eq!(
            exit_code(&Error::Verification("x".into())),
            EXIT_VERIFICATION
        );
        assert_eq!(exit_code(&Error::Unsupported("x".into())), EXIT_UNSUPPORTED);
    }
}
