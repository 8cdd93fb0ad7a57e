use std::fmt::Write as _;

use anyhow::{bail, ensure, Result};
use pilipovic::asymptotics::{
    bell_numbers, berend_tassa_check, berend_tassa_lower_ln, berend_tassa_upper_ln, cn_decreasing,
    dobinski, double_conjugate, interval_check, maximum_bound_check, phi_eval,
    phi_star_estimate_check, remark_cn_limit, series_bound_check, young_conjugate, ConvexPhi,
};
use pilipovic::bargmann::{
    bargmann_from_expansion, classify_entire, vartheta_sandwich_check, GrowthModel,
};
use pilipovic::hermite::realize_law;
use pilipovic::oscillator::{forward_check, reverse_check, BoundExponent};
use pilipovic::report::{csv_float, fmt_key, reports_to_csv, CheckReport, FittedBound};
use pilipovic::CoefficientLaw;

use crate::config::Params;
use crate::grid;
use crate::svg::{Plot, Series, Style};
use crate::{BargmannArgs, BellArgs, LemmaArgs, LemmaKind, Theorem, VerifyArgs};

pub struct Outcome {
    pub pass: bool,
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn new(pass: bool) -> Self {
        Outcome {
            pass,
            files: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn say(&mut self, line: String) {
        self.summary.push(line);
    }
}

fn int_grid(p: &Params, flag: Option<&str>, key: &str, default: &str) -> Result<Vec<u64>> {
    let g = p.grid(flag, key, default)?;
    grid::ascending(&g, key)?;
    grid::integers(&g, key)
}

fn ratio_plot(title: &str, key: &str, curves: Vec<(String, &[CheckReport])>) -> String {
    let keys: Vec<f64> = curves
        .iter()
        .flat_map(|(_, rows)| rows.iter().map(|r| r.key))
        .collect();
    let lo = keys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = keys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut plot = Plot::new(title, key, "ln(lhs/rhs), fitted constant included").log_x();
    for (label, reports) in curves {
        let pts = reports.iter().map(|r| (r.key, r.ratio_log)).collect();
        plot = plot.with(Series::new(label, pts, Style::Line));
    }
    plot.with(Series::new(
        "pass threshold",
        vec![(lo, 0.0), (hi, 0.0)],
        Style::Dashed,
    ))
    .render()
}

fn describe(name: &str, fit: &FittedBound) -> String {
    format!(
        "{name}: C = exp({:.6}), stable = {}, rows passing = {}/{}, pass = {}",
        fit.constant_log,
        fit.stable,
        fit.reports.iter().filter(|r| r.pass).count(),
        fit.reports.len(),
        fit.pass()
    )
}

pub fn verify(which: Theorem, p: &Params, a: &VerifyArgs) -> Result<Outcome> {
    let d = p.value(a.d, "d", 1usize)?;
    let c = p.value(a.c, "C", 1.0)?;
    let n_grid = int_grid(p, a.n_grid.as_deref(), "Ngrid", "5:40:5")?;
    match which {
        Theorem::Thm1 => {
            let r = p.value(a.r, "r", 0.25)?;
            let r0 = p.value(a.r0, "r0", 2.0 * d as f64 * r)?;
            let k_grid = int_grid(p, a.k_grid.as_deref(), "kgrid", "20,50,100")?;
            let n_max = p.value(a.n_max, "nmax", 5000u64)?;
            ensure!(
                k_grid.iter().all(|&k| k <= u32::MAX as u64),
                "kgrid entries too large"
            );
            let k_grid: Vec<u32> = k_grid.iter().map(|&k| k as u32).collect();

            let forward = forward_check(&CoefficientLaw::geometric(c, r), d, &n_grid, r0)?;
            let reverse = reverse_check(r, &k_grid, n_max, BoundExponent::Reverse)?;
            let mut out = Outcome::new(forward.pass() && reverse.pass());
            out.say(describe(
                &format!("thm1 forward (r = {r}, r0 = {r0}, d = {d})"),
                &forward,
            ));
            out.say(describe(
                &format!("thm1 reverse (r = {r}, N <= {n_max})"),
                &reverse,
            ));
            out.file("thm1_report.csv", reports_to_csv("N", &forward.reports));
            out.file("thm1_reverse.csv", reports_to_csv("k", &reverse.reports));
            out.file(
                "thm1_ratio.svg",
                ratio_plot(
                    "forward bound, ratio vs N",
                    "N",
                    vec![(format!("r = {r}"), &forward.reports)],
                ),
            );
            Ok(out)
        }
        Theorem::Thm2 => {
            let r_grid = p.grid(a.r_grid.as_deref(), "rgrid", "1,0.5,0.25,0.1")?;
            grid::descending(&r_grid, "rgrid")?;
            let factor = p.value(a.r0_factor, "r0factor", 2.0)?;
            ensure!(factor > 1.0, "r0factor must exceed 1");
            let mut fits = Vec::with_capacity(r_grid.len());
            for &r in &r_grid {
                let r0 = factor * d as f64 * r;
                fits.push((
                    r,
                    forward_check(&CoefficientLaw::geometric(c, r), d, &n_grid, r0)?,
                ));
            }
            let mut out = Outcome::new(fits.iter().all(|(_, f)| f.pass()));
            let mut csv = String::from("r,N,lhs_log,rhs_log,ratio_log,pass\n");
            for (r, fit) in &fits {
                out.say(describe(&format!("thm2 forward (r = {r}, d = {d})"), fit));
                for row in &fit.reports {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        csv_float(*r),
                        fmt_key(row.key),
                        csv_float(row.lhs.ln_abs()),
                        csv_float(row.rhs.ln_abs()),
                        csv_float(row.ratio_log),
                        row.pass
                    );
                }
            }
            out.file("thm2_report.csv", csv);
            let curves = fits
                .iter()
                .map(|(r, f)| (format!("r = {r}"), f.reports.as_slice()))
                .collect();
            out.file(
                "thm2_ratio.svg",
                ratio_plot("forward bound for every r, ratio vs N", "N", curves),
            );
            Ok(out)
        }
    }
}

pub fn lemma(which: LemmaKind, p: &Params, a: &LemmaArgs) -> Result<Outcome> {
    match which {
        LemmaKind::Interval => {
            let r = p.value(a.r, "r", 1.0)?;
            let n_grid = int_grid(p, a.n_grid.as_deref(), "Ngrid", "1e2:1e6:log")?;
            let sweep = interval_check(r, &n_grid)?;
            let mut out = Outcome::new(sweep.n0.is_some());
            out.say(format!(
                "interval (r = {r}): {}/{} grid points pass, empirical N0 = {}",
                sweep.rows.iter().filter(|x| x.pass).count(),
                sweep.rows.len(),
                sweep.n0.map_or("none".to_string(), |n| n.to_string())
            ));
            out.file("lemma_interval.csv", sweep.to_csv());
            let svg = Plot::new("slope of m at the interval ends", "N", "asinh m'(t)")
                .log_x()
                .with(Series::new(
                    "m'(t1)",
                    sweep
                        .rows
                        .iter()
                        .map(|x| (x.n as f64, x.dm_t1.asinh()))
                        .collect(),
                    Style::Line,
                ))
                .with(Series::new(
                    "m'(t2)",
                    sweep
                        .rows
                        .iter()
                        .map(|x| (x.n as f64, x.dm_t2.asinh()))
                        .collect(),
                    Style::Line,
                ))
                .render();
            out.file("lemma_interval.svg", svg);
            Ok(out)
        }
        LemmaKind::Maximum => {
            let r = p.value(a.r, "r", 1.0)?;
            let n_grid = int_grid(p, a.n_grid.as_deref(), "Ngrid", "1e2:1e6:log")?;
            let sweep = maximum_bound_check(r, &n_grid)?;
            let mut out = Outcome::new(sweep.pass());
            out.say(format!(
                "maximum (r = {r}): theta0 = {:.6}, theta = {:.6}, N0 = {}, rows passing = {}/{}",
                sweep.theta.theta0,
                sweep.theta.theta,
                sweep.n0.map_or("none".to_string(), |n| n.to_string()),
                sweep.reports.iter().filter(|x| x.pass).count(),
                sweep.reports.len()
            ));
            out.file("lemma_maximum.csv", reports_to_csv("N", &sweep.reports));
            out.file(
                "lemma_maximum.svg",
                ratio_plot(
                    "max m(t) against its bound",
                    "N",
                    vec![(format!("r = {r}"), &sweep.reports)],
                ),
            );
            Ok(out)
        }
        LemmaKind::Series => {
            let a1 = p.value(a.a1, "a1", 1.0)?;
            let a2 = p.value(a.a2, "a2", 0.0)?;
            let r = p.value(a.r, "r", 0.3)?;
            let r0 = p.value(a.r0, "r0", 0.5)?;
            let n_grid = int_grid(p, a.n_grid.as_deref(), "Ngrid", "10:1e4:log")?;
            let fit = series_bound_check(a1, a2, r, r0, &n_grid)?;
            let mut out = Outcome::new(fit.pass());
            out.say(describe(
                &format!("series (a1 = {a1}, a2 = {a2}, r = {r}, r0 = {r0})"),
                &fit,
            ));
            out.file("lemma_series.csv", reports_to_csv("N", &fit.reports));
            out.file(
                "lemma_series.svg",
                ratio_plot(
                    "series against its bound",
                    "N",
                    vec![(format!("a1 = {a1}, a2 = {a2}"), &fit.reports)],
                ),
            );
            Ok(out)
        }
        LemmaKind::Convex => {
            let r = p.value(a.r, "r", std::f64::consts::E)?;
            let t_grid = p.grid(a.t_grid.as_deref(), "tgrid", "0.25:5:0.25")?;
            grid::ascending(&t_grid, "tgrid")?;
            ensure!(t_grid[0] >= 0.0, "tgrid must be nonnegative");
            let k_grid = int_grid(p, a.k_grid.as_deref(), "kgrid", "50,100,500,1000")?;
            let tol = p.value(a.tol, "tol", 1e-6)?;
            ensure!(tol > 0.0, "tol must be positive");
            let phi = ConvexPhi::new(r)?;
            let estimate = phi_star_estimate_check(r, &k_grid)?;

            let mut csv = String::from("t,phi,phi_star,phi_double_star,residual\n");
            let mut curves = (Vec::new(), Vec::new(), Vec::new());
            let mut worst: f64 = 0.0;
            for &t in &t_grid {
                let (f, fs, fss) = (
                    phi_eval(&phi, t),
                    young_conjugate(&phi, t),
                    double_conjugate(&phi, t),
                );
                let residual = (fss - f).abs();
                worst = worst.max(residual);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    csv_float(t),
                    csv_float(f),
                    csv_float(fs),
                    csv_float(fss),
                    csv_float(residual)
                );
                curves.0.push((t, f));
                curves.1.push((t, fs));
                curves.2.push((t, fss));
            }
            let mut out = Outcome::new(worst < tol && estimate.pass());
            out.say(format!(
                "convex (r = {r}): max |(phi*)* - phi| = {worst:.3e} (tolerance {tol:e})"
            ));
            out.say(describe("phi* estimate", &estimate));
            out.file("lemma_convex.csv", csv);
            out.file(
                "lemma_convex_estimate.csv",
                reports_to_csv("k", &estimate.reports),
            );
            let svg = Plot::new(format!("phi, phi* and (phi*)* for r = {r}"), "t", "value")
                .with(Series::new("phi", curves.0, Style::Line))
                .with(Series::new("phi*", curves.1, Style::Line))
                .with(Series::new("(phi*)*", curves.2, Style::Dashed))
                .render();
            out.file("lemma_convex.svg", svg);
            Ok(out)
        }
    }
}

/// Exact values are tabulated while `2N` stays within the Bell triangle.
const BELL_EXACT_MAX: u64 = 100;

pub fn bell(p: &Params, a: &BellArgs) -> Result<Outcome> {
    let n_max = p.value(a.n_max, "nmax", 50u64)?;
    ensure!(n_max >= 1, "empty grid: --nmax must be at least 1");
    let lambda = p.value(a.lambda, "lambda", 0.5)?;
    let exponent = p.value(a.a, "a", 0.1)?;
    let r = p.value(a.r, "r", 1.0)?;
    let cn_grid = int_grid(p, a.cn_grid.as_deref(), "cngrid", "1e3:1e8:log")?;

    let ns: Vec<u64> = (1..=n_max).collect();
    let checks = berend_tassa_check(&ns)?;
    let exact = bell_numbers((2 * n_max.min(BELL_EXACT_MAX)) as usize)?;
    let mut csv = String::from("N,bell_2N,dobinski_ln,lower_ln,upper_ln,upper,pass\n");
    for (i, &n) in ns.iter().enumerate() {
        let exact_text = if n <= BELL_EXACT_MAX {
            exact[(2 * n - 1) as usize].to_string()
        } else {
            String::new()
        };
        let upper_ln = berend_tassa_upper_ln(n);
        let _ = writeln!(
            csv,
            "{n},{exact_text},{},{},{},{},{}",
            csv_float(dobinski(n, true)?.ln_abs()),
            csv_float(berend_tassa_lower_ln(n)),
            csv_float(upper_ln),
            csv_float(upper_ln.exp()),
            checks[2 * i].pass && checks[2 * i + 1].pass
        );
    }

    let rows = remark_cn_limit(r, lambda, exponent, &cn_grid)?;
    let mut cn_csv = String::from("N,ln_cn_na,cn_na,identity_error\n");
    for row in &rows {
        let _ = writeln!(
            cn_csv,
            "{},{},{},{}",
            row.n,
            csv_float(row.ln_value),
            csv_float(row.value()),
            csv_float(row.identity_error)
        );
    }
    let bt_pass = checks.iter().all(|c| c.pass);
    let decreasing = cn_decreasing(&rows);
    let mut out = Outcome::new(bt_pass && decreasing);
    out.say(format!(
        "bell: Berend-Tassa envelopes hold for 1 <= N <= {n_max}: {bt_pass}"
    ));
    let last = rows.last().expect("cngrid is nonempty");
    out.say(format!(
        "C_N N^a (r = {r}, lambda = {lambda}, a = {exponent}) decreasing on the grid: {decreasing}; value at N = {} is {:.6e}",
        last.n,
        last.value()
    ));
    out.file("bell.csv", csv);
    out.file("bell_cn.csv", cn_csv);
    Ok(out)
}

pub fn bargmann(p: &Params, a: &BargmannArgs) -> Result<Outcome> {
    let s = p.value(a.s, "s", 0.25)?;
    ensure!(s > 0.0 && s < 0.5, "s must lie in (0, 1/2)");
    let d = p.value(a.d, "d", 1usize)?;
    let vartheta = a.vartheta || p.value(None, "vartheta", false)?;
    if vartheta {
        let big_r = p.value(a.big_r, "R", 1.0)?;
        let k_grid = int_grid(p, a.k_grid.as_deref(), "kgrid", "10:200:10")?;
        let mu = p.optional(a.mu, "mu")?;
        let tol = p.value(a.tol, "tol", 1e-8)?;
        ensure!(tol > 0.0, "tol must be positive");
        let w = vartheta_sandwich_check(big_r, s, d, &k_grid, mu)?;
        let converged = w.max_self_check() <= tol;
        let mut out = Outcome::new(w.pass() && converged);
        out.say(format!(
            "vartheta (R = {big_r}, s = {s}, d = {d}, mu = {}): bracketed = {}, lower stable = {}, upper stable = {}, max self-check = {:.3e}",
            w.mu,
            w.bracketed(),
            w.lower.stable,
            w.upper.stable,
            w.max_self_check()
        ));
        out.say(format!(
            "  envelope constants: c1 = {:.6e} (0.9 of {:.6e}), c2 = {:.6e}, a1 = a2 = {}",
            w.c1, w.constants.c1_max, w.constants.c2, w.constants.a1
        ));
        let csv = w.to_csv();
        let mut curves = (Vec::new(), Vec::new(), Vec::new());
        for line in csv.lines().skip(1) {
            let f: Vec<f64> = line
                .split(',')
                .take(6)
                .map(|x| x.parse().unwrap_or(f64::NAN))
                .collect();
            curves.0.push((f[0], f[3]));
            curves.1.push((f[0], f[4]));
            curves.2.push((f[0], f[5]));
        }
        out.file("bargmann_vartheta.csv", csv);
        let svg = Plot::new(
            format!("vartheta sandwich, R = {big_r}, s = {s}"),
            "k",
            "ln value",
        )
        .with(Series::new("ln vartheta", curves.0, Style::Points))
        .with(Series::new("lower envelope", curves.1, Style::Line))
        .with(Series::new("upper envelope", curves.2, Style::Line))
        .render();
        out.file("bargmann_vartheta.svg", svg);
        return Ok(out);
    }

    let law_name = p.value(a.law.clone(), "law", "subexp".to_string())?;
    let r = p.value(a.r, "r", 1.0)?;
    let (law, default_degree) = match law_name.as_str() {
        "geometric" => (CoefficientLaw::geometric(p.value(a.c, "C", 1.0)?, r), 200),
        "subexp" => (
            CoefficientLaw::sub_exponential(r, p.value(a.law_s, "law_s", s)?),
            60,
        ),
        "finite" => {
            let degrees = p.grid(a.degrees.as_deref(), "degrees", "0,1")?;
            let degrees = grid::integers(&degrees, "degrees")?;
            let top = *degrees.iter().max().expect("grid is nonempty");
            (
                CoefficientLaw::hermite_sum(&degrees.iter().map(|&k| k as u32).collect::<Vec<_>>()),
                (2 * top as usize).max(20),
            )
        }
        other => bail!("unknown law `{other}`; expected geometric, subexp or finite"),
    };
    let degree = p.value(a.degree, "degree", default_degree)?;
    let radii = p.optional_grid(a.radii.as_deref(), "radii")?;
    if let Some(g) = &radii {
        grid::ascending(g, "radii")?;
    }
    let f = bargmann_from_expansion(&realize_law(&law, d, degree)?);
    let class = classify_entire(&f, s, radii.as_deref())?;
    let fit = &class.fit;
    let mut out = Outcome::new(true);
    out.say(format!(
        "bargmann ({law_name}, r = {r}, d = {d}, degree {degree}): model {}, R_hat = {:.6}, theta_hat = {}, residual = {:.3e}{}",
        fit.model.label(),
        fit.r_hat,
        fit.theta_hat.map_or("-".to_string(), |t| format!("{t:.4}")),
        fit.residual,
        if fit.degenerate { " (bounded, degenerate fit)" } else { "" }
    ));
    out.say(format!("class for s = {s}: {}", class.class.label()));
    out.file("bargmann_growth.csv", fit.to_csv());

    let theta_s = 1.0 / (1.0 - 2.0 * s);
    let x = |rho: f64| (0.5 * (rho * rho).ln_1p()).powf(theta_s);
    let data: Vec<(f64, f64)> = fit.samples.iter().map(|&(rho, m)| (x(rho), m)).collect();
    let mut plot = Plot::new(
        format!("growth of the {law_name} image"),
        format!("(ln<rho>)^{theta_s:.3}"),
        "ln M(rho)",
    )
    .with(Series::new("ln M(rho)", data, Style::Points));
    if let (GrowthModel::LogPower, Some(theta)) = (fit.model, fit.theta_hat) {
        let curve = fit
            .samples
            .iter()
            .map(|&(rho, _)| (x(rho), fit.r_hat * (0.5 * (rho * rho).ln_1p()).powf(theta)))
            .collect();
        plot = plot.with(Series::new("log_power fit", curve, Style::Line));
    }
    let svg = plot.render();
    out.file("bargmann_growth.svg", svg);
    Ok(out)
}
