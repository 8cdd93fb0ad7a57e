//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::f64::consts::E;
use std::process::Command;
use std::time::{Duration, Instant};

use pilipovic::asymptotics::{
    bell_numbers, berend_tassa_check, cn_decreasing, dobinski, double_conjugate, grid_argmax_m,
    interval_check, maximum_bound_check, phi_eval, phi_star_estimate_check, remark_cn_limit,
    series_bound_check, ConvexPhi, LemmaFunction,
};
use pilipovic::bargmann::{
    bargmann_from_expansion, classify_entire, default_radii, growth_fit, vartheta_sandwich_check,
    EntireClass, GrowthModel,
};
use pilipovic::hermite::{parseval_oracle, realize_law};
use pilipovic::oscillator::{forward_check, h_power_norm, reverse_check, BoundExponent};
use pilipovic::{CoefficientLaw, HermiteExpansion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn log_grid(lo: f64, hi: f64) -> Vec<u64> {
    let decades = (hi / lo).log10();
    let n = (10.0 * decades).round() as usize;
    let mut out: Vec<u64> = (0..=n)
        .map(|i| (lo * 10f64.powf(decades * i as f64 / n as f64)).round() as u64)
        .collect();
    out.dedup();
    out
}

const LEMMA_R: [f64; 3] = [0.5, 1.0, 2.0];
const LEMMA_N: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

fn spectral_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.gen_range(0..=20usize);
        let n = rng.gen_range(0..=6u32);
        let coeffs: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = HermiteExpansion::from_univariate(&coeffs).unwrap();
        let weighted: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (2.0 * k as f64 + 1.0).powi(n as i32) * c)
            .collect();
        let oracle = parseval_oracle(
            &HermiteExpansion::from_univariate(&weighted).unwrap(),
            2 * m + 1,
        )
        .unwrap();
        let norm = h_power_norm(&f, n).to_f64();
        worst = worst.max((norm - oracle).abs() / oracle);
    }
    verdict(
        worst <= 1e-6,
        format!("50 random expansions, max relative error {worst:.2e}"),
    )
}

fn interval_lemma() -> Verdict {
    let mut ok = true;
    let mut worst_gap: f64 = 0.0;
    for r in LEMMA_R {
        let sweep = interval_check(r, &LEMMA_N).unwrap();
        for row in &sweep.rows {
            let grid = grid_argmax_m(&LemmaFunction::new(row.n, r).unwrap(), 0.01);
            let gap = (row.tstar - grid).abs();
            worst_gap = worst_gap.max(gap);
            ok &= row.pass && row.dm_t1 > 0.0 && row.dm_t2 < 0.0 && gap <= 0.02;
        }
    }
    verdict(
        ok,
        format!("12 (r, N) points, max |t* - grid argmax| = {worst_gap:.2e}"),
    )
}

fn maximum_lemma() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for r in LEMMA_R {
        let sweep = maximum_bound_check(r, &LEMMA_N).unwrap();
        let failures = sweep.reports.iter().filter(|x| !x.pass).count();
        ok &= sweep.n0.is_some() && failures == 0;
        parts.push(format!(
            "r = {r}: theta = {:.4}, N0 = {:?}, failures {failures}",
            sweep.theta.theta, sweep.n0
        ));
    }
    verdict(ok, parts.join("; "))
}

fn series_lemma() -> Verdict {
    let grid = log_grid(10.0, 1e4);
    let mut ok = true;
    let mut parts = Vec::new();
    for (a1, a2) in [(1.0, 0.0), (1.0, 3.0), (2.0, 5.0)] {
        let fit = series_bound_check(a1, a2, 0.3, 0.5, &grid).unwrap();
        let rows_ok = fit.reports.iter().all(|x| x.pass);
        // within a factor 10 either way of the full-grid constant
        let top_vs_full = (fit.top_constant_log - fit.constant_log).abs();
        let within = top_vs_full <= 10f64.ln();
        ok &= rows_ok && within;
        parts.push(format!(
            "({a1},{a2}): rows {rows_ok}, |ln C_top - ln C| = {top_vs_full:.1} ({}), no upward drift {}",
            tag(within),
            fit.stable
        ));
    }
    verdict(ok, parts.join("; "))
}

fn bell_suite() -> Verdict {
    let exact = bell_numbers(40).unwrap();
    let mut dob_err: f64 = 0.0;
    for n in 1..=20u64 {
        let exact_ln = pilipovic::asymptotics::bell::ln_biguint(&exact[(2 * n - 1) as usize]);
        dob_err = dob_err.max(
            (dobinski(n, true).unwrap().ln_abs() - exact_ln)
                .exp_m1()
                .abs(),
        );
    }
    let dobinski_ok = dob_err <= 1e-9;

    let ns: Vec<u64> = (1..=500).collect();
    let envelopes_ok = berend_tassa_check(&ns).unwrap().iter().all(|c| c.pass);

    let rows = remark_cn_limit(1.0, 0.5, 0.1, &log_grid(1e3, 1e8)).unwrap();
    let decreasing = cn_decreasing(&rows);
    let at_1e8 = rows.last().unwrap();
    assert_eq!(at_1e8.n, 100_000_000);
    let small = at_1e8.value() < 1e-3;

    verdict(
        dobinski_ok && envelopes_ok && decreasing && small,
        format!(
            "Dobinski max rel err {dob_err:.1e} ({}); envelopes N <= 500 ({}); C_N N^a decreasing ({}); C_N N^a at 1e8 = {:.4} < 1e-3 ({})",
            tag(dobinski_ok),
            tag(envelopes_ok),
            tag(decreasing),
            at_1e8.value(),
            tag(small)
        ),
    )
}

fn convex_machinery() -> Verdict {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for r in [1.5, E, 5.0] {
        let phi = ConvexPhi::new(r).unwrap();
        for i in 1..=20 {
            let t = 0.25 * i as f64;
            worst = worst.max((double_conjugate(&phi, t) - phi_eval(&phi, t)).abs());
        }
        let est = phi_star_estimate_check(r, &[50, 100, 500, 1000]).unwrap();
        ok &= est.pass();
        parts.push(format!(
            "r = {r:.3}: estimate stable {} rows {}",
            est.stable,
            est.pass()
        ));
    }
    ok &= worst <= 1e-6;
    verdict(
        ok,
        format!("max |(phi*)* - phi| = {worst:.1e}; {}", parts.join("; ")),
    )
}

fn round_trip() -> Verdict {
    let grid: Vec<u64> = (3..=40).collect();
    let forward = forward_check(&CoefficientLaw::geometric(1.0, 0.25), 1, &grid, 0.5).unwrap();
    let reverse = reverse_check(0.25, &[20, 50, 100], 5000, BoundExponent::Reverse).unwrap();
    verdict(
        forward.pass() && reverse.pass(),
        format!(
            "forward N = 3..40 pass {} (C = e^{:.3}); reverse k = 20,50,100 pass {} (C = e^{:.3})",
            forward.pass(),
            forward.constant_log,
            reverse.pass(),
            reverse.constant_log
        ),
    )
}

fn vartheta_sandwich() -> Verdict {
    let ks: Vec<u64> = (1..=20).map(|i| 10 * i).collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut unstable = Vec::new();
    for s in [0.1, 0.25, 0.4] {
        for big_r in [0.5, 1.0, 2.0] {
            let w = vartheta_sandwich_check(big_r, s, 1, &ks, None).unwrap();
            worst = worst.max(w.max_self_check());
            ok &= w.bracketed() && w.max_self_check() <= 1e-8;
            if !(w.lower.stable && w.upper.stable) {
                unstable.push(format!("(s={s},R={big_r})"));
            }
        }
    }
    verdict(
        ok,
        format!(
            "9 (s, R) sweeps bracketed, max self-check {worst:.1e}; fitted constants drift more than 10x on {}",
            if unstable.is_empty() { "none".to_string() } else { unstable.join(" ") }
        ),
    )
}

fn bargmann_classification() -> Verdict {
    let sub = bargmann_from_expansion(
        &realize_law(&CoefficientLaw::sub_exponential(1.0, 0.25), 1, 60).unwrap(),
    );
    let radii = default_radii(&sub);
    let class = classify_entire(&sub, 0.25, Some(&radii)).unwrap();
    let theta = class.fit.theta_hat.unwrap_or(f64::NAN);
    let sub_ok = class.fit.model == GrowthModel::LogPower
        && (theta - 2.0).abs() <= 0.15 * 2.0
        && class.class == EntireClass::As;
    let mut parts = vec![format!(
        "subexp: {} theta = {theta:.3} class {} on rho in [{:.1e}, {:.1e}]",
        class.fit.model.label(),
        class.class.label(),
        radii[0],
        radii[radii.len() - 1]
    )];
    let mut geo_ok = true;
    for r in [0.5, 1.0, 2.0] {
        let f = bargmann_from_expansion(
            &realize_law(&CoefficientLaw::geometric(1.0, r), 1, 400).unwrap(),
        );
        let fit = growth_fit(&f, &default_radii(&f), 16).unwrap();
        let class = classify_entire(&f, 0.25, None).unwrap();
        geo_ok &= fit.model == GrowthModel::ExpLinear
            && (fit.r_hat - r).abs() <= 0.05 * r
            && class.class == EntireClass::Outside;
        parts.push(format!(
            "geometric r = {r}: {} R = {:.4} class {}",
            fit.model.label(),
            fit.r_hat,
            class.class.label()
        ));
    }
    verdict(sub_ok && geo_ok, parts.join("; "))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("thm1.ini");
    std::fs::write(&cfg, "[verify]\nr = 0.25\nd = 1\nNgrid = 5:40:5\n").unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_pilipovic"))
            .args(["verify", "thm1", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        let bytes: Vec<Vec<u8>> = ["thm1_report.csv", "thm1_reverse.csv", "thm1_ratio.svg"]
            .iter()
            .map(|name| std::fs::read(out.join(name)).unwrap_or_default())
            .collect();
        outputs.push((status.code(), bytes));
    }
    let same = outputs[0] == outputs[1] && !outputs[0].1[0].is_empty();
    verdict(
        same && outputs[0].0 == Some(0),
        format!(
            "exit codes {:?} / {:?}, CSV and SVG byte-identical {same}",
            outputs[0].0, outputs[1].0
        ),
    )
}

fn tag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            1,
            "spectral identity",
            Some(Duration::from_secs(10)),
            spectral_identity,
        ),
        (
            2,
            "interval lemma",
            Some(Duration::from_secs(30)),
            interval_lemma,
        ),
        (3, "maximum lemma", None, maximum_lemma),
        (4, "series lemma", None, series_lemma),
        (5, "Bell suite", Some(Duration::from_secs(20)), bell_suite),
        (6, "convex machinery", None, convex_machinery),
        (7, "forward/reverse round trip", None, round_trip),
        (
            8,
            "vartheta sandwich",
            Some(Duration::from_secs(60)),
            vartheta_sandwich,
        ),
        (9, "Bargmann classification", None, bargmann_classification),
        (10, "determinism", None, determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let in_time = budget.map_or(true, |b| elapsed <= b);
        let pass = v.pass && in_time;
        let budget_text = budget.map_or(String::new(), |b| format!(" of {}s", b.as_secs()));
        println!(
            "criterion {id:>2} {} [{:.2}s{budget_text}] {name}: {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            v.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
