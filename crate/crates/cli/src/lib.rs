//! Command-line surface of the `pilipovic` checks: parameter grids in, CSV
//! reports and SVG plots out, exit code 0 (pass), 1 (usage) or 2 (failed check).

mod commands;
mod config;
mod grid;
mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::Outcome;
use config::Config;

pub const OUT_ENV: &str = "PILIPOVIC_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "pilipovic",
    version,
    about = "Verification suites for Hermite-coefficient decay laws"
)]
struct Cli {
    /// Config file with `key = value` lines and a `[section]` per command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $PILIPOVIC_OUT, else the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward and reverse coefficient/norm bounds.
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        args: VerifyArgs,
    },
    /// The one-variable estimates.
    Lemma {
        #[arg(value_enum)]
        which: LemmaKind,
        #[command(flatten)]
        args: LemmaArgs,
    },
    /// Bell numbers, their envelopes and the C_N sequence.
    Bell(BellArgs),
    /// Bargmann images: growth fits, classes and the vartheta sandwich.
    Bargmann(BargmannArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub(crate) enum Theorem {
    /// One r: geometric law forward check plus the reverse coefficient bound.
    Thm1,
    /// Descending r-grid, every r must pass.
    Thm2,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub(crate) enum LemmaKind {
    Interval,
    Maximum,
    Series,
    Convex,
}

#[derive(Args, Debug, Default)]
pub(crate) struct VerifyArgs {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Constant of the geometric law.
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long = "Ngrid")]
    pub n_grid: Option<String>,
    /// Defaults to 2·d·r.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Coefficient degrees for the reverse bound.
    #[arg(long = "kgrid")]
    pub k_grid: Option<String>,
    /// Largest N in the reverse bound's minimum.
    #[arg(long = "nmax")]
    pub n_max: Option<u64>,
    #[arg(long = "rgrid")]
    pub r_grid: Option<String>,
    /// thm2 uses r0 = factor·d·r.
    #[arg(long = "r0factor")]
    pub r0_factor: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub(crate) struct LemmaArgs {
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "Ngrid")]
    pub n_grid: Option<String>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long = "kgrid")]
    pub k_grid: Option<String>,
    #[arg(long = "tgrid")]
    pub t_grid: Option<String>,
    /// Involution residual allowed by `lemma convex`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub(crate) struct BellArgs {
    #[arg(long = "nmax")]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "cngrid")]
    pub cn_grid: Option<String>,
}

#[derive(Args, Debug, Default)]
pub(crate) struct BargmannArgs {
    /// geometric, subexp or finite.
    #[arg(long)]
    pub law: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Order of the class being tested.
    #[arg(long)]
    pub s: Option<f64>,
    /// Order of the subexp law, when it differs from --s.
    #[arg(long = "law-s")]
    pub law_s: Option<f64>,
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Truncation degree of the expansion.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Hermite degrees present in the finite law.
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long)]
    pub radii: Option<String>,
    /// Run the vartheta sandwich instead of the growth fit.
    #[arg(long)]
    pub vartheta: bool,
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    #[arg(long = "kgrid")]
    pub k_grid: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Quadrature self-check tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn out_dir(flag: Option<PathBuf>, config: &Config, env: Option<OsString>) -> PathBuf {
    flag.or_else(|| config.get("output", "out").map(PathBuf::from))
        .or_else(|| env.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn execute(cli: Cli, env_out: Option<OsString>) -> Result<(Outcome, PathBuf)> {
    let config = Config::load(cli.config.as_deref())?;
    let dir = out_dir(cli.out, &config, env_out);
    let outcome = match &cli.command {
        Command::Verify { theorem, args } => {
            commands::verify(*theorem, &config.section("verify"), args)?
        }
        Command::Lemma { which, args } => commands::lemma(*which, &config.section("lemma"), args)?,
        Command::Bell(args) => commands::bell(&config.section("bell"), args)?,
        Command::Bargmann(args) => commands::bargmann(&config.section("bargmann"), args)?,
    };
    Ok((outcome, dir))
}

fn write_outputs(dir: &Path, outcome: &Outcome) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Parses `args`, runs the command and writes its files. Nothing is written
/// unless the whole configuration is valid and the computation succeeds.
pub fn run<I, T>(
    args: I,
    env_out: Option<OsString>,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = execute(cli, env_out).and_then(|(outcome, dir)| {
        write_outputs(&dir, &outcome)?;
        Ok((outcome, dir))
    });
    match result {
        Ok((outcome, dir)) => {
            for line in &outcome.summary {
                let _ = writeln!(stdout, "{line}");
            }
            for (name, _) in &outcome.files {
                let _ = writeln!(stdout, "wrote {}", dir.join(name).display());
            }
            let _ = writeln!(stdout, "{}", if outcome.pass { "PASS" } else { "FAIL" });
            if outcome.pass {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], dir: &Path) -> (i32, String) {
        let mut argv = vec!["pilipovic", "--out", dir.to_str().unwrap()];
        argv.extend_from_slice(args);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(argv, None, &mut out, &mut err);
        let text = String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap();
        (code, text)
    }

    fn files(dir: &Path) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .map(|it| {
                it.map(|e| e.unwrap().file_name().into_string().unwrap())
                    .collect()
            })
            .unwrap_or_default();
        names.sort();
        names
    }

    #[test]
    fn verify_thm1_passes() {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(
            &[
                "verify", "thm1", "--r", "0.25", "--d", "1", "--Ngrid", "5:40:5",
            ],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        assert_eq!(
            files(dir.path()),
            ["thm1_ratio.svg", "thm1_report.csv", "thm1_reverse.csv"]
        );
        let csv = std::fs::read_to_string(dir.path().join("thm1_report.csv")).unwrap();
        assert!(csv.starts_with("N,lhs_log,rhs_log,ratio_log,pass\n5,"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn verify_thm2_passes() {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(
            &["verify", "thm2", "--rgrid", "1,0.5,0.25,0.1", "--d", "1"],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        let csv = std::fs::read_to_string(dir.path().join("thm2_report.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 * 8);
    }

    #[test]
    fn malformed_grid_is_a_usage_error_without_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        let (code, _) = call(&["verify", "thm1", "--Ngrid", "40:5"], &target);
        assert_eq!(code, 1);
        assert!(!target.exists());
        let (code, _) = call(&["verify", "thm2", "--rgrid", "0.1,0.5"], &target);
        assert_eq!(code, 1);
        let (code, _) = call(&["verify", "thm3"], &target);
        assert_eq!(code, 1);
        assert!(!target.exists());
    }

    #[test]
    fn failed_check_exits_two() {
        // C_N·N^a only starts decreasing at larger N
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(
            &["bell", "--nmax", "5", "--cngrid", "2:1e3:log"],
            dir.path(),
        );
        assert_eq!(code, 2, "{text}");
    }

    #[test]
    fn lemma_commands() {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(
            &["lemma", "interval", "--r", "1", "--Ngrid", "1e2:1e6:log"],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("empirical N0 = 100"));
        let (code, text) = call(
            &[
                "lemma", "series", "--a1", "1", "--a2", "0", "--r", "0.3", "--r0", "0.5",
            ],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        let (code, text) = call(&["lemma", "convex", "--r", "2.718281828"], dir.path());
        assert_eq!(code, 0, "{text}");
        let (code, text) = call(
            &["lemma", "maximum", "--r", "2", "--Ngrid", "1e3:1e5:log"],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        for name in [
            "lemma_interval.svg",
            "lemma_series.csv",
            "lemma_convex.svg",
            "lemma_maximum.csv",
        ] {
            assert!(dir.path().join(name).exists(), "{name}");
        }
    }

    #[test]
    fn bell_command() {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(&["bell", "--nmax", "50"], dir.path());
        assert_eq!(code, 0, "{text}");
        let csv = std::fs::read_to_string(dir.path().join("bell.csv")).unwrap();
        assert_eq!(csv.lines().count(), 51);

        let (code, _) = call(&["bell", "--nmax", "5"], dir.path());
        assert_eq!(code, 0);
        let csv = std::fs::read_to_string(dir.path().join("bell.csv")).unwrap();
        let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(first[1], "2");
        let upper: f64 = first[5].parse().unwrap();
        assert!((upper - 2.0788).abs() < 1e-4 && 2.0 < upper);

        let empty = dir.path().join("empty");
        assert_eq!(call(&["bell", "--nmax", "0"], &empty).0, 1);
        assert!(!empty.exists());
    }

    #[test]
    fn bargmann_command() {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = call(
            &[
                "bargmann",
                "--law",
                "subexp",
                "--r",
                "1",
                "--s",
                "0.25",
                "--radii",
                "1e1:1e6:log",
            ],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        assert!(
            text.contains("model log_power") && text.contains("class for s = 0.25: A_s"),
            "{text}"
        );
        let (code, text) = call(
            &["bargmann", "--law", "geometric", "--r", "1", "--s", "0.25"],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("class for s = 0.25: outside"), "{text}");
        let (code, text) = call(
            &[
                "bargmann",
                "--vartheta",
                "--s",
                "0.25",
                "--R",
                "1",
                "--kgrid",
                "10:200:10",
            ],
            dir.path(),
        );
        assert_eq!(code, 0, "{text}");
        let csv = std::fs::read_to_string(dir.path().join("bargmann_vartheta.csv")).unwrap();
        assert!(csv.starts_with("k,R,s,log_vartheta,lower_env,upper_env,pass\n"));
        let growth = std::fs::read_to_string(dir.path().join("bargmann_growth.csv")).unwrap();
        assert!(growth.starts_with("rho,logM,model,R_hat,theta_hat,residual\n"));
    }

    #[test]
    fn config_file_and_environment() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.ini");
        std::fs::write(&cfg, "[verify]\nr = 0.25\nNgrid = 5:10:5\n").unwrap();
        let env_dir = dir.path().join("env");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            [
                "pilipovic",
                "verify",
                "thm1",
                "--config",
                cfg.to_str().unwrap(),
            ],
            Some(env_dir.clone().into_os_string()),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        let csv = std::fs::read_to_string(env_dir.join("thm1_report.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);

        let flag_dir = dir.path().join("flag");
        let code = run(
            [
                "pilipovic",
                "--out",
                flag_dir.to_str().unwrap(),
                "verify",
                "thm1",
                "--config",
                cfg.to_str().unwrap(),
                "--Ngrid",
                "5:20:5",
            ],
            Some(env_dir.into_os_string()),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0);
        let csv = std::fs::read_to_string(flag_dir.join("thm1_report.csv")).unwrap();
        assert_eq!(csv.lines().count(), 5);
    }
}
