//! `lab` — experiment front end for the circle-diffeomorphism numerics
//! library: tune a family to a target rotation number, run the
//! level-by-level Denjoy suite, build the conjugacy profile, and merge
//! the outcomes into one report.
//!
//! Exit codes: 0 success, 2 precondition/config error, 3 resource cap,
//! 4 numerical invariant violation.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::Signed;

use circlelab::conjugacy::{
    build_profile, commutation_residual, holder_exponent, homological_residual,
    verify_measure_identity, HolderVerdict,
};
use circlelab::denjoy::denjoy_suite;
use circlelab::maps::DEFAULT_ORBIT_CAP;
use circlelab::numerics::circle::mod1;
use circlelab::rotation::tune_parameter;
use circlelab::{precision, Error, Hp, Real};

use config::{
    build_family, parse_real, parse_target, resolve, resolve_subject, target_name, target_value,
    FileConfig,
};
use output::{must, out_path, write_csv, write_json, write_plot};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Prints the single-line machine-parsable error and exits.
pub fn fail(code: &str, exit: i32, msg: &str) -> ! {
    eprintln!("error[{code}]: {msg}");
    std::process::exit(exit);
}

fn fail_core(e: &Error) -> ! {
    let (code, exit) = match e {
        Error::Precondition(_)
        | Error::NonFinite(_)
        | Error::TuningFailed(_)
        | Error::PeriodicOrbit { .. } => ("E_PRECONDITION", 2),
        Error::ResourceCap { .. } | Error::PrecisionExhausted { .. } => ("E_RESOURCE", 3),
        Error::InvariantViolation(_) => ("E_INVARIANT", 4),
    };
    fail(code, exit, &e.to_string())
}

fn ok_or_fail<T>(r: circlelab::Result<T>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => fail_core(&e),
    }
}

#[derive(Parser)]
#[command(
    name = "lab",
    version,
    about = "Numerics laboratory for circle diffeomorphisms",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tune a family parameter to a target rotation number.
    Tune(TuneArgs),
    /// Per-level Denjoy analysis: scales, ε, derivative sups, exact
    /// relations, decay fits.
    Denjoy(DenjoyArgs),
    /// Invariant density, conjugacy, residuals, Hölder scan.
    Conjugacy(ConjugacyArgs),
    /// Merge tuned/denjoy/conjugacy outputs into one JSON.
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// working precision in significant decimal digits (>= 17)
    #[arg(long)]
    precision: Option<u32>,
    /// hard cap on orbit length
    #[arg(long)]
    orbit_cap: Option<usize>,
    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn init(&self) -> (FileConfig, usize, PathBuf) {
        let file = FileConfig::load(self.config.as_deref());
        let digits = resolve(self.precision, &file, "precision", Some(50)).unwrap();
        if !(17..=100_000).contains(&digits) {
            fail(
                "E_CONFIG",
                2,
                &format!("--precision must be between 17 and 100000 digits, got {digits}"),
            );
        }
        precision::set_digits(digits);
        let cap = resolve(self.orbit_cap, &file, "orbit-cap", Some(DEFAULT_ORBIT_CAP)).unwrap();
        let out = resolve(self.out.clone(), &file, "out", Some(PathBuf::from("."))).unwrap();
        (file, cap, out)
    }
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// map family: arnold | two_harmonic | rotation
    #[arg(long)]
    family: Option<String>,
    /// Arnold coefficient
    #[arg(long)]
    a: Option<String>,
    /// first two-harmonic coefficient
    #[arg(long)]
    a1: Option<String>,
    /// second two-harmonic coefficient
    #[arg(long)]
    a2: Option<String>,
    /// target rotation number: golden | silver | word:k1,k2,...
    #[arg(long)]
    target: Option<String>,
    /// partial quotients to reproduce
    #[arg(long)]
    depth: Option<usize>,
    /// bisection bracket tolerance on the parameter
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Args)]
struct MapArgs {
    /// tuned.json produced by `lab tune`
    #[arg(long)]
    tuned: Option<PathBuf>,
    /// map family (with --target/--t) when not using --tuned
    #[arg(long)]
    family: Option<String>,
    /// rotation-number target: golden | silver | word:k1,k2,...
    #[arg(long)]
    target: Option<String>,
    /// explicit family parameter (tuned externally)
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    a1: Option<String>,
    #[arg(long)]
    a2: Option<String>,
}

impl MapArgs {
    fn subject(&self, file: &FileConfig) -> config::Subject {
        let tuned = resolve(self.tuned.clone(), file, "tuned", None);
        let family = resolve(self.family.clone(), file, "family", None);
        let target = resolve(self.target.clone(), file, "target", None);
        let real_of = |name: &str, v: &Option<String>| -> Option<Hp> {
            resolve(v.clone(), file, name, None).map(|s| parse_real(name, &s))
        };
        let t = real_of("t", &self.t);
        let a = real_of("a", &self.a);
        let a1 = real_of("a1", &self.a1);
        let a2 = real_of("a2", &self.a2);
        resolve_subject(
            tuned.as_deref(),
            family.as_deref(),
            target.as_deref(),
            t.as_ref(),
            a.as_ref(),
            a1.as_ref(),
            a2.as_ref(),
        )
    }
}

#[derive(Args)]
struct DenjoyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    map: MapArgs,
    /// deepest renormalization level
    #[arg(long)]
    n_max: Option<usize>,
    /// start points sampled per level for the derivative sup
    #[arg(long)]
    samples: Option<usize>,
    /// also export the rank-n partition to partition.csv
    #[arg(long)]
    partition_level: Option<usize>,
}

#[derive(Args)]
struct ConjugacyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    map: MapArgs,
    /// orbit length for the profile
    #[arg(long)]
    samples: Option<usize>,
    /// levels at which to check the invariant-measure identity
    #[arg(long, value_delimiter = ',')]
    measure_levels: Option<Vec<usize>>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Tune(args) => cmd_tune(args),
        Command::Denjoy(args) => cmd_denjoy(args),
        Command::Conjugacy(args) => cmd_conjugacy(args),
        Command::Report(args) => cmd_report(args),
    }
    ExitCode::SUCCESS
}

fn cmd_tune(args: TuneArgs) {
    let (file, cap, out) = args.common.init();
    let family_name = resolve(args.family, &file, "family", Some("arnold".into())).unwrap();
    let target_str: String = resolve(args.target, &file, "target", None)
        .unwrap_or_else(|| fail("E_CONFIG", 2, "missing required option --target"));
    let depth = resolve(args.depth, &file, "depth", Some(15)).unwrap();
    let tol_str = resolve(args.tol, &file, "tol", Some("1e-30".to_string())).unwrap();
    let tol = parse_real("tol", &tol_str);

    let a = resolve(args.a, &file, "a", None).map(|s| parse_real("a", &s));
    let a1 = resolve(args.a1, &file, "a1", None).map(|s| parse_real("a1", &s));
    let a2 = resolve(args.a2, &file, "a2", None).map(|s| parse_real("a2", &s));

    let kind = parse_target(&target_str);
    let rho = target_value(&kind);
    let target_cf = ok_or_fail(circlelab::cfarith::cf_expand(&rho, 60));
    let fam = ok_or_fail(build_family(&family_name, a.as_ref(), a1.as_ref(), a2.as_ref()));

    let origin = ok_or_fail(mod1(Hp::from_decimal("0").unwrap()));
    let result = ok_or_fail(tune_parameter(&fam, &target_cf, depth, &tol, &origin, cap));

    let map = ok_or_fail(fam.at(result.t_star.clone()));
    let mut parameters = serde_json::Map::new();
    if let Some(a) = &a {
        parameters.insert("a".into(), a.to_decimal_full().into());
    }
    if let Some(a1) = &a1 {
        parameters.insert("a1".into(), a1.to_decimal_full().into());
    }
    if let Some(a2) = &a2 {
        parameters.insert("a2".into(), a2.to_decimal_full().into());
    }
    let tuned = output::TunedJson {
        version: VERSION.into(),
        precision: precision::digits(),
        family: family_name,
        parameters,
        target: target_name(&kind),
        depth,
        tol: tol.to_decimal_full(),
        t_star: result.t_star.to_decimal_full(),
        verified_quotients: result.verified_quotients.clone(),
        rho_estimate: result.rho_estimate.value.to_decimal_full(),
        rho_residual: result.rho_estimate.residual.to_decimal_full(),
        bracket_width: result.bracket_width.to_decimal_full(),
        probes: result.probes,
        descriptor: map.descriptor(),
    };
    must(write_json(&out_path(&out, "tuned.json"), &tuned));
    println!(
        "tuned {} to {} at depth {depth}: t* = {}",
        tuned.family, tuned.target, tuned.t_star
    );
}

fn cmd_denjoy(args: DenjoyArgs) {
    let (file, cap, out) = args.common.init();
    let n_max = resolve(args.n_max, &file, "n-max", Some(12)).unwrap();
    let samples = resolve(args.samples, &file, "samples", Some(64)).unwrap();
    let subject = args.map.subject(&file);

    let cf = subject.cf(n_max + 3);
    let origin = ok_or_fail(mod1(Hp::from_decimal("0").unwrap()));
    let suite = ok_or_fail(denjoy_suite(&subject.map, &cf, n_max, samples, &origin, cap));

    let header = [
        "n",
        "q_n",
        "delta_n",
        "l_n",
        "eps_n",
        "S_n",
        "S_n_over_eps_n",
        "kneps_n",
        "res_mk_products",
        "res_segment_transfer",
        "res_derivative_transfer",
    ];
    let rows: Vec<Vec<String>> = suite
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.q_n.to_string(),
                r.delta_n.to_decimal_full(),
                r.l_n.to_decimal_full(),
                r.eps_n.to_decimal_full(),
                r.s_n.to_decimal_full(),
                r.s_over_eps.to_decimal_full(),
                r.kneps.to_decimal_full(),
                r.res_products.to_decimal_full(),
                r.res_segment_transfer.to_decimal_full(),
                r.res_derivative_transfer.to_decimal_full(),
            ]
        })
        .collect();
    must(write_csv(&out_path(&out, "denjoy.csv"), &header, &rows));

    let positives: Vec<&Hp> = suite
        .rows
        .iter()
        .filter(|r| r.s_n.is_positive())
        .map(|r| &r.s_over_eps)
        .collect();
    let zero = || Hp::from_decimal("0").unwrap();
    let ratio_max = positives
        .iter()
        .fold(None::<Hp>, |acc, v| {
            Some(acc.map_or((*v).clone(), |a| a.max_with(v)))
        })
        .unwrap_or_else(zero);
    let ratio_min = positives
        .iter()
        .fold(None::<Hp>, |acc, v| {
            Some(acc.map_or((*v).clone(), |a| a.min_with(v)))
        })
        .unwrap_or_else(zero);

    let summary = output::DenjoyJson {
        version: VERSION.into(),
        precision: precision::digits(),
        descriptor: subject.descriptor.clone(),
        target: target_name(&subject.target),
        alpha: subject.map.alpha().to_decimal_full(),
        n_max,
        samples,
        delta_hat: suite.delta_hat.to_decimal_full(),
        a_sup: suite.a_sup.to_decimal_full(),
        lambda_hat: suite.lambda_hat.to_decimal_full(),
        s_n_rate: suite.s_n_rate.as_ref().map(|r| r.to_decimal_full()),
        kneps_rate: suite.kneps_rate.to_decimal_full(),
        kneps_refined_max: suite.kneps_refined_max.to_decimal_full(),
        max_exact_relation_residual: suite.max_relation_residual.to_decimal_full(),
        s_over_eps_max: ratio_max.to_decimal_full(),
        s_over_eps_min: ratio_min.to_decimal_full(),
    };
    must(write_json(&out_path(&out, "denjoy.json"), &summary));

    if let Some(level) = resolve(args.partition_level, &file, "partition-level", None) {
        let part = ok_or_fail(circlelab::partitions::build_partition(
            &subject.map,
            &cf,
            level,
            &origin,
            cap,
        ));
        let header = ["level", "index", "start", "end", "length"];
        let rows: Vec<Vec<String>> = part
            .segments
            .iter()
            .map(|s| {
                vec![
                    s.level.to_string(),
                    s.index.to_string(),
                    s.arc.start().position().to_decimal_full(),
                    s.arc.end().position().to_decimal_full(),
                    s.length.to_decimal_full(),
                ]
            })
            .collect();
        must(write_csv(&out_path(&out, "partition.csv"), &header, &rows));
    }

    println!(
        "denjoy suite: {} levels, max exact-relation residual {}",
        n_max, summary.max_exact_relation_residual
    );
}

fn cmd_conjugacy(args: ConjugacyArgs) {
    let (file, cap, out) = args.common.init();
    let n_orbit = resolve(args.samples, &file, "samples", Some(100_000)).unwrap();
    let levels = args.measure_levels.unwrap_or_else(|| {
        match file.get("measure-levels") {
            Some(raw) => raw
                .split(',')
                .map(|t| {
                    t.trim().parse::<usize>().unwrap_or_else(|_| {
                        fail("E_CONFIG", 2, &format!("measure-levels entry {t:?} unparsable"))
                    })
                })
                .collect(),
            None => vec![3, 8],
        }
    });
    let subject = args.map.subject(&file);

    let origin = ok_or_fail(mod1(Hp::from_decimal("0").unwrap()));
    let profile = ok_or_fail(build_profile(&subject.map, &origin, n_orbit, cap));

    let grid = 4096usize;
    let homological = ok_or_fail(homological_residual(&subject.map, &profile, grid));
    let commutation = ok_or_fail(commutation_residual(&profile, &subject.rho));

    let max_level = levels.iter().copied().max().unwrap_or(3);
    let cf = subject.cf(max_level + 2);
    let mut measure = Vec::new();
    for &level in &levels {
        let defect = ok_or_fail(verify_measure_identity(&cf, &profile, level));
        measure.push(output::MeasureIdentityJson {
            level,
            defect: defect.to_decimal_full(),
        });
    }

    let scan = ok_or_fail(holder_exponent(&profile, 32));
    let (verdict, slope) = match &scan.verdict {
        HolderVerdict::Flat => ("flat".to_string(), None),
        HolderVerdict::LipschitzOrBetter { slope } => (
            "lipschitz_or_better".to_string(),
            Some(slope.to_decimal_full()),
        ),
        HolderVerdict::Exponent { slope } => {
            ("exponent".to_string(), Some(slope.to_decimal_full()))
        }
    };

    // (ξ, γ, h, φ) table
    let header = ["xi", "gamma", "h", "phi"];
    let rows: Vec<Vec<String>> = (0..profile.sample_count())
        .map(|k| {
            vec![
                profile.positions()[k].to_decimal_full(),
                profile.gamma_values()[k].to_decimal_full(),
                profile.h_values()[k].to_decimal_full(),
                profile.phi_values()[k].to_decimal_full(),
            ]
        })
        .collect();
    must(write_csv(&out_path(&out, "conjugacy.csv"), &header, &rows));

    let plot: Vec<(String, String)> = scan
        .envelope
        .iter()
        .map(|(r, o)| (r.to_decimal_full(), o.to_decimal_full()))
        .collect();
    must(write_plot(&out_path(&out, "holder.txt"), &plot));

    let summary = output::ConjugacyJson {
        version: VERSION.into(),
        precision: precision::digits(),
        descriptor: subject.descriptor.clone(),
        target: target_name(&subject.target),
        orbit_length: n_orbit,
        normalization: profile.normalization().to_decimal_full(),
        density_mass: profile.density_mass().to_decimal_full(),
        min_h: profile.min_h().to_decimal_full(),
        max_h: profile.max_h().to_decimal_full(),
        gamma_gap_max: profile.gamma_gap_max().to_decimal_full(),
        max_position_gap: profile.max_gap().to_decimal_full(),
        homological_residual: homological.to_decimal_full(),
        homological_grid: grid,
        commutation_residual: commutation.to_decimal_full(),
        measure_identity: measure,
        holder_verdict: verdict,
        holder_slope: slope,
        holder_scales_used: scan.envelope.len(),
    };
    must(write_json(&out_path(&out, "conjugacy.json"), &summary));
    println!(
        "conjugacy profile: N = {n_orbit}, homological residual {}, commutation residual {}",
        summary.homological_residual, summary.commutation_residual
    );
}

fn cmd_report(args: ReportArgs) {
    let (_file, _cap, out) = args.common.init();
    let mut missing = Vec::new();
    let mut merged = serde_json::Map::new();
    merged.insert("version".into(), VERSION.into());
    merged.insert(
        "precision".into(),
        serde_json::Value::from(precision::digits()),
    );
    for name in ["tuned", "denjoy", "conjugacy"] {
        let path = out_path(&out, &format!("{name}.json"));
        if path.exists() {
            let v: serde_json::Value = must(output::read_json(&path));
            merged.insert(name.into(), v);
        } else {
            missing.push(format!("{name}.json"));
        }
    }
    if merged.len() <= 2 {
        fail(
            "E_CONFIG",
            2,
            &format!(
                "no inputs found in {}: missing {}",
                out.display(),
                missing.join(", ")
            ),
        );
    }
    if !missing.is_empty() {
        merged.insert(
            "missing_inputs".into(),
            serde_json::Value::from(missing.clone()),
        );
    }
    must(write_json(
        &out_path(&out, "report.json"),
        &serde_json::Value::Object(merged),
    ));
    println!(
        "report written{}",
        if missing.is_empty() {
            String::new()
        } else {
            format!(" (missing: {})", missing.join(", "))
        }
    );
}
