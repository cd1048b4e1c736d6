mod suite;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bubblecert::certificate::{
    self, CertificateReport, Condition, FeasiblePoint, GradientBound, GridAxis, GridSpec, Reproduction,
};
use bubblecert::forms::Params;
use bubblecert::geometry::FdConfig;
use bubblecert::profile::{self, ProfileCheck, DEFAULT_CLEARANCE, PROFILE_TOLERANCE};
use bubblecert::rational::{format_rational, parse_rational, to_f64};
use bubblecert::Rational;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Exact feasibility certificates for μ-bubble stability estimates.
///
/// Exit status: 0 feasible or verified, 1 infeasible or a failed check,
/// 2 usage or numeric error.
#[derive(Parser, Debug)]
#[command(name = "bubblecert", version)]
struct Cli {
    /// Emit JSON instead of the human-readable report.
    #[arg(long, global = true)]
    json: bool,

    /// Write the report to this file instead of stdout.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Seed for every randomised check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for grid scans (default: all cores).
    #[arg(long, global = true, env = "BUBBLECERT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Hypersurface dimension.
    #[arg(long)]
    n: u32,
    /// Weight exponent a, as "p/q" or an integer.
    #[arg(long)]
    a: String,
    /// Mixing weight α, as "p/q" or an integer.
    #[arg(long)]
    alpha: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate conditions (i)–(iv) and the area condition at one point.
    Check {
        #[command(flatten)]
        point: PointArgs,
        /// Gradient bound "A,B" meaning a|∇h̃| ≤ A + B·h̃².
        #[arg(long, alias = "budget", value_name = "A,B")]
        grad_bound: Option<String>,
    },
    /// Scan a rational (a, α) grid.
    Search {
        #[arg(long)]
        n: u32,
        /// Grid step 1/STEPS on both axes.
        #[arg(long, default_value_t = 100)]
        steps: u32,
        /// Range of a as "lo,hi" (default 1,4; a = 4 is skipped).
        #[arg(long, value_name = "LO,HI")]
        a_range: Option<String>,
        /// Range of α as "lo,hi" (default 0,1).
        #[arg(long, value_name = "LO,HI")]
        alpha_range: Option<String>,
        /// Refinement rounds around the best feasible point.
        #[arg(long, default_value_t = 2)]
        refine: u32,
        #[arg(long, alias = "budget", value_name = "A,B")]
        grad_bound: Option<String>,
        /// Write every grid point as a CSV row.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Recompute the worked constants for n = 3, 4, 5 or the n = 6 scan.
    Reproduce {
        #[arg(long)]
        n: u32,
    },
    /// Synthesise and verify the band profile h.
    Profile {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Fraction of the band excluded at each end.
        #[arg(long, default_value_t = DEFAULT_CLEARANCE)]
        clearance: f64,
        /// Write (t, h, dh, violation) samples as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Run the numerical geometry checks.
    VerifyGeometry {
        #[arg(long, value_enum, default_value_t = suite::Which::All)]
        check: suite::Which,
        /// Dimension for the algebraic and hypersurface checks.
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Sample points per dimension for the conformal check.
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Relative finite-difference step.
        #[arg(long, default_value_t = bubblecert::geometry::DEFAULT_FD_STEP)]
        fd_step: f64,
        /// Disable Richardson extrapolation.
        #[arg(long)]
        no_richardson: bool,
    },
}

struct Outcome {
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("configuring thread pool")?;
    }
    let out = match &cli.command {
        Command::Check { point, grad_bound } => check(cli, point, grad_bound.as_deref())?,
        Command::Search { n, steps, a_range, alpha_range, refine, grad_bound, csv } => {
            let mut spec = GridSpec::uniform(*steps)?;
            if let Some(r) = a_range {
                let (lo, hi) = parse_pair(r)?;
                spec.a = GridAxis::new(lo, hi, spec.a.step.clone())?;
            }
            if let Some(r) = alpha_range {
                let (lo, hi) = parse_pair(r)?;
                spec.alpha = GridAxis::new(lo, hi, spec.alpha.step.clone())?;
            }
            spec.refine_rounds = *refine;
            spec.budget = grad_bound.as_deref().map(parse_bound).transpose()?;
            search(cli, *n, &spec, csv.as_deref())?
        }
        Command::Reproduce { n } => reproduce(cli, *n)?,
        Command::Profile { eps, c, samples, clearance, csv } => {
            profile_cmd(cli, *eps, *c, *samples, *clearance, csv.as_deref())?
        }
        Command::VerifyGeometry { check, n, trials, points, fd_step, no_richardson } => {
            let cfg = suite::SuiteConfig {
                which: *check,
                n: *n,
                trials: *trials,
                points: *points,
                fd: FdConfig { step_rel: *fd_step, richardson: !no_richardson },
                seed: cli.seed,
            };
            let summary = suite::run(&cfg)?;
            let text = if cli.json { to_json(&summary)? } else { geometry_text(&summary) };
            Outcome { text, ok: summary.pass }
        }
    };
    emit(cli.output.as_deref(), &out.text)?;
    Ok(out.ok)
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().lock().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_pair(s: &str) -> anyhow::Result<(Rational, Rational)> {
    let Some((l, r)) = s.split_once(',') else {
        bail!("expected two comma-separated rationals, got {s:?}");
    };
    Ok((parse_rational(l.trim())?, parse_rational(r.trim())?))
}

fn parse_bound(s: &str) -> anyhow::Result<GradientBound> {
    let (a, b) = parse_pair(s)?;
    Ok(GradientBound::new(a, b)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.16}"))
}

fn failed_list(failed: &[Condition]) -> String {
    failed.iter().map(|c| c.tag()).collect::<Vec<_>>().join(";")
}

// ---------------------------------------------------------------------------

fn check(cli: &Cli, point: &PointArgs, bound: Option<&str>) -> anyhow::Result<Outcome> {
    let params = Params::parse(point.n, &point.a, &point.alpha)?;
    let bound = bound.map(parse_bound).transpose()?;
    let report = certificate::check_conditions(&params, bound.as_ref())?;
    let text = if cli.json { to_json(&report)? } else { report_text(&report) };
    Ok(Outcome { text, ok: report.feasible })
}

fn report_text(r: &CertificateReport) -> String {
    let mut s = String::new();
    let p = &r.params;
    let _ = writeln!(s, "n = {}, a = {}, alpha = {}", p.n(), format_rational(p.a()), format_rational(p.alpha()));
    let _ = writeln!(s, "  (i)    delta        = {} ({:.16})", format_rational(&r.delta), to_f64(&r.delta));
    let _ = writeln!(s, "  (ii)   P psd        = {} (lambda_min {:.6e})", yes_no(r.p_verdict.is_psd), r.p_verdict.lambda_min);
    let c = r.c.c_max.as_ref().map_or_else(|| "-inf".to_string(), format_rational);
    let _ = writeln!(s, "  (iii)  c            = {} ({:.16})", c, r.c.c_max_f64);
    let _ = writeln!(s, "  area   condition    = {} (intro form {})", yes_no(r.area_ok), yes_no(r.area_ok_intro_form));
    let _ = writeln!(s, "  (iv)   eps_required = {}", opt_f64(r.eps_required));
    if let Some(rs) = &r.rescaling {
        let _ = writeln!(s, "         lambda       = {:.16}", rs.lambda);
    }
    let _ = writeln!(s, "  margin = {}", opt_f64(r.margin));
    if r.feasible {
        let _ = writeln!(s, "feasible");
    } else {
        let _ = writeln!(s, "infeasible: {}", failed_list(&r.failed).replace(';', ", "));
    }
    s
}

// ---------------------------------------------------------------------------

/// One grid point, flattened for CSV.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CsvRow {
    pub n: u32,
    pub a: String,
    pub alpha: String,
    pub delta: String,
    pub p_psd: bool,
    #[serde(rename = "lambda_min_P")]
    pub lambda_min_p: f64,
    pub c_max: String,
    pub area_ok: bool,
    pub area_ok_intro_form: bool,
    pub eps_required: Option<f64>,
    pub feasible: bool,
    pub margin: Option<f64>,
    pub failure: Option<String>,
    pub failed: String,
}

#[derive(Debug, Serialize)]
struct SearchSummary<'a> {
    n: u32,
    grid: &'a GridSpec,
    grid_points: usize,
    feasible_count: usize,
    best: Option<&'a FeasiblePoint>,
    first_failure_counts: BTreeMap<&'static str, usize>,
}

fn search(cli: &Cli, n: u32, spec: &GridSpec, csv_path: Option<&Path>) -> anyhow::Result<Outcome> {
    let result = certificate::search(n, spec)?;
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        for row in &result.rows {
            w.serialize(CsvRow {
                n,
                a: format_rational(row.params.a()),
                alpha: format_rational(row.params.alpha()),
                delta: row.delta.clone(),
                p_psd: row.p_psd,
                lambda_min_p: row.lambda_min_p,
                c_max: row.c_max.clone(),
                area_ok: row.area_ok,
                area_ok_intro_form: row.area_ok_intro_form,
                eps_required: row.eps_required,
                feasible: row.feasible,
                margin: row.margin,
                failure: row.failure.map(|c| c.tag().to_string()),
                failed: failed_list(&row.failed),
            })?;
        }
        w.flush().with_context(|| format!("writing {}", path.display()))?;
    }

    let mut counts = BTreeMap::new();
    for entry in &result.failure_map {
        *counts.entry(entry.first.tag()).or_insert(0) += 1;
    }
    let summary = SearchSummary {
        n,
        grid: &result.grid,
        grid_points: result.rows.len(),
        feasible_count: result.feasible_points.len(),
        best: result.best.as_ref(),
        first_failure_counts: counts,
    };
    let text = if cli.json {
        to_json(&summary)?
    } else {
        let mut s = String::new();
        let g = &result.grid;
        let _ = writeln!(
            s,
            "n = {n}: a in [{}, {}], alpha in [{}, {}], step {} / {}",
            g.a.lo, g.a.hi, g.alpha.lo, g.alpha.hi, g.a.step, g.alpha.step
        );
        let _ = writeln!(s, "grid points: {}", summary.grid_points);
        let _ = writeln!(s, "feasible:    {}", summary.feasible_count);
        match summary.best {
            Some(b) => {
                let _ = writeln!(s, "best:        a = {}, alpha = {}, margin = {:.16}", b.a, b.alpha, b.margin);
            }
            None => {
                let _ = writeln!(s, "best:        none");
            }
        }
        for (tag, count) in &summary.first_failure_counts {
            let _ = writeln!(s, "first failure ({tag}): {count}");
        }
        s
    };
    Ok(Outcome { text, ok: !result.feasible_points.is_empty() })
}

// ---------------------------------------------------------------------------

fn reproduce(cli: &Cli, n: u32) -> anyhow::Result<Outcome> {
    let rep = certificate::reproduce(n)?;
    let text = if cli.json { to_json(&rep)? } else { reproduction_text(&rep) };
    Ok(Outcome { text, ok: rep.feasible })
}

fn reproduction_text(rep: &Reproduction) -> String {
    let mut s = String::new();
    if let Some(r) = &rep.report {
        s.push_str(&report_text(r));
    }
    if !rep.rows.is_empty() {
        let _ = writeln!(s, "\n{:<28} {:>22} {:>22} {:>10}  match", "quantity", "computed", "reference", "|diff|");
        for row in &rep.rows {
            let _ = writeln!(
                s,
                "{:<28} {:>22.16} {:>22.16} {:>10.2e}  {}",
                row.quantity,
                row.computed,
                row.reference,
                row.abs_diff,
                yes_no(row.matches)
            );
        }
    }
    if let Some(b) = &rep.b_solution {
        let _ = writeln!(
            s,
            "\nD(b) = ({})b² + ({})b + ({}); largest root b = {:.12}, D(b + 1e-6) = {:.3e}",
            b.discriminant_coefficients[0], b.discriminant_coefficients[1], b.discriminant_coefficients[2], b.b, b.discriminant_after_b
        );
    }
    if let Some(o) = &rep.obstruction {
        let _ = writeln!(s, "n = {} obstruction over the default grid", rep.n);
        let _ = writeln!(s, "  grid points         {}", o.grid_points);
        let _ = writeln!(s, "  feasible            {}", o.feasible_count);
        let _ = writeln!(s, "  max delta           {}", format_rational(&o.max_delta));
        let _ = writeln!(s, "  (iii) failures      {}", o.iii_failures);
        let _ = writeln!(s, "  PD (H, z) block at  {}", o.block_pd_points);
        let _ = writeln!(s, "  max c               {}", o.max_c.as_deref().unwrap_or("-inf"));
        for (cond, count) in &o.first_failures {
            let _ = writeln!(s, "  first failure {:<5} {}", cond.tag(), count);
        }
    }
    let _ = writeln!(s, "{}", if rep.feasible { "feasible" } else { "infeasible" });
    s
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct ProfileSummary {
    eps: f64,
    c: f64,
    length: f64,
    check: ProfileCheck,
    tolerance: f64,
    pass: bool,
}

fn profile_cmd(
    cli: &Cli,
    eps: f64,
    c: f64,
    samples: usize,
    clearance: f64,
    csv_path: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let h = profile::synthesize(eps, c)?;
    let check = profile::verify_with_clearance(&h, samples, clearance)?;
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        for sample in h.sample(samples, clearance)? {
            w.serialize(sample)?;
        }
        w.flush().with_context(|| format!("writing {}", path.display()))?;
    }
    let summary = ProfileSummary {
        eps,
        c,
        length: h.length(),
        check,
        tolerance: PROFILE_TOLERANCE,
        pass: check.passes(PROFILE_TOLERANCE),
    };
    let text = if cli.json {
        to_json(&summary)?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "h(t) = sqrt(eps/c)·tan(sqrt(eps·c)·(L/2 − t)), eps = {eps}, c = {c}");
        let _ = writeln!(s, "band length L        = {:.16}", summary.length);
        let _ = writeln!(s, "samples              = {} (clearance {} of L at each end)", check.samples, check.clearance);
        let _ = writeln!(s, "max violation        = {:.3e}", check.max_violation);
        let _ = writeln!(s, "max relative         = {:.3e} (tolerance {:.0e})", check.max_relative_violation, PROFILE_TOLERANCE);
        let _ = writeln!(s, "sign changes         = {}", check.sign_changes);
        let _ = writeln!(s, "{}", if summary.pass { "verified" } else { "violated" });
        s
    };
    Ok(Outcome { text, ok: summary.pass })
}

// ---------------------------------------------------------------------------

fn geometry_text(summary: &suite::GeometrySummary) -> String {
    let mut s = String::new();
    for c in &summary.checks {
        let count = match (c.trials, c.points) {
            (Some(t), _) => format!("{t} trials"),
            (None, Some(p)) => format!("{p} points"),
            _ => String::new(),
        };
        let _ = writeln!(
            s,
            "{:<36} {:<12} max residual {:.3e} (tol {:.0e})  {}",
            c.check_name,
            count,
            c.max_residual,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(s, "{}", if summary.pass { "all checks passed" } else { "some checks failed" });
    s
}
