use std::fmt::Write as _;

use hostlab::adic::multiplicatively_dependent;
use hostlab::ergodic::{
    martingale_avg_experiment, split_index_average, time_change_joint_experiment, DigitTest, SymbolicProcess,
    WindowFunction,
};
use hostlab::fourier::{certify_c1, certify_smoothing, default_c1_frequencies, default_measures, mc_cross_check, C1Density, SmoothingGrid};
use hostlab::host::{decay_violation, host_experiment, proof_chain_quantity, rational_point_control, HostExperimentConfig};
use hostlab::measure::{correlation_log_slope, verify_equivariance, GenKind};
use hostlab::seed::{self, stream};
use hostlab::{CylinderWord, MeasureGen};
use rand::Rng;
use serde::Serialize;

use crate::config::{config_err, parse_gen, RunConfig};
use crate::run::{Outcome, Run};

fn gen_or(cfg: &RunConfig, default: &str) -> anyhow::Result<MeasureGen> {
    parse_gen(cfg.gen.as_deref().unwrap_or(default))
}

/// Decades `10^2, 10^3, …` below `n`, then `n`.
fn decades(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(100usize), |&c| c.checked_mul(10)).take_while(|&c| c < n).collect();
    out.push(n);
    out
}

#[derive(Serialize)]
struct WeylCsvRow {
    sample: usize,
    seed: u64,
    m: i64,
    #[serde(rename = "N")]
    n: usize,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct WeylSummaryRow {
    m: i64,
    #[serde(rename = "N")]
    n: usize,
    median_abs: f64,
    p90_abs: f64,
    oracle_re: Option<f64>,
    oracle_im: Option<f64>,
    oracle_median_dev: Option<f64>,
}

/// Weyl sums of `μ`-typical points with their reports; shared by `weyl` and
/// the dependent control.
fn weyl_run(run: &mut Run, hc: &HostExperimentConfig, prefix: &str) -> anyhow::Result<hostlab::host::HostReport> {
    let report = host_experiment(hc)?;
    let rows: Vec<WeylCsvRow> = report
        .rows
        .iter()
        .map(|r| WeylCsvRow { sample: r.sample, seed: report.seeds[r.sample], m: r.m, n: r.n, re: r.re, im: r.im, abs: r.abs })
        .collect();
    run.csv(&format!("{prefix}.csv"), &rows)?;
    let summary: Vec<WeylSummaryRow> = report
        .summary
        .iter()
        .map(|s| WeylSummaryRow {
            m: s.m,
            n: s.n,
            median_abs: s.median,
            p90_abs: s.p90,
            oracle_re: s.oracle.map(|o| o.re),
            oracle_im: s.oracle.map(|o| o.im),
            oracle_median_dev: s.oracle_median_dev,
        })
        .collect();
    run.csv(&format!("{prefix}_summary.csv"), &summary)?;

    let mut dat = String::from("# N");
    for &m in &hc.freqs {
        write!(dat, " median_m{m} p90_m{m}").unwrap();
    }
    dat.push('\n');
    let mut cps = hc.checkpoints.clone();
    cps.sort_unstable();
    cps.dedup();
    for &n in &cps {
        write!(dat, "{n}").unwrap();
        for &m in &hc.freqs {
            let s = report.summary_at(m, n).expect("summary row per (m, N)");
            write!(dat, " {} {}", s.median, s.p90).unwrap();
        }
        dat.push('\n');
    }
    run.text(&format!("{prefix}.dat"), &dat)?;

    let bounded = report.rows.iter().all(|r| r.abs <= 1.0 + 1e-12);
    run.check(format!("{prefix}: |W_N(m)| <= 1"), true, bounded, format!("{} values", report.rows.len()));
    run.note("seeds", &report.seeds);
    run.note("precision_digits", report.precision);
    if let Some(label) = &report.label {
        run.note("label", label);
    }
    Ok(report)
}

pub fn weyl(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let gen = gen_or(cfg, "cantor3")?;
    let n = cfg.n.unwrap_or(100_000);
    let hc = HostExperimentConfig {
        gen,
        b: cfg.b.unwrap_or(2),
        samples: cfg.samples.unwrap_or(50),
        freqs: cfg.m.clone().unwrap_or_else(|| vec![1]),
        checkpoints: cfg.checkpoints.clone().unwrap_or_else(|| decades(n)),
        k: cfg.k.as_ref().and_then(|k| k.first().copied()).unwrap_or(0),
        seed: cfg.seed()?,
        guard: cfg.guard.unwrap_or(hostlab::PrecisionBudget::DEFAULT_GUARD_DIGITS),
    };
    let report = weyl_run(run, &hc, "weyl")?;
    if report.label.is_some() {
        run.check("weyl: a, b multiplicatively dependent", false, true, "negative control; decay checks skipped");
        return Ok(());
    }
    for &m in &hc.freqs {
        let meds: Vec<(usize, f64)> =
            report.summary.iter().filter(|s| s.m == m && s.n >= 1000).map(|s| (s.n, s.median)).collect();
        let dec = meds.windows(2).all(|w| w[1].1 < w[0].1);
        run.check(format!("weyl: median |W_N({m})| decreasing from N=1000"), false, dec, format!("{meds:?}"));
    }
    if let Some(s) = report.summary.iter().rfind(|s| s.m == 1) {
        let thr = cfg.soft_weyl_median.unwrap_or(0.05);
        run.check(
            format!("weyl: median |W_{}(1)| < {thr}", s.n),
            false,
            s.median < thr,
            format!("median {:.5}", s.median),
        );
    }
    Ok(())
}

pub fn fourier_cert(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let battery = cfg.battery.as_deref().unwrap_or("default");
    if battery != "default" {
        return Err(config_err(format!("unknown battery {battery:?} (only \"default\")")));
    }
    let seed = cfg.seed()?;
    let c1 = certify_c1(&C1Density::battery(), &default_c1_frequencies())?;
    run.csv("c1.csv", &c1)?;
    let bad = c1.iter().filter(|r| !r.ok).count();
    run.check("fourier-cert: C1 decay bound", true, bad == 0, format!("{} rows, {bad} violated", c1.len()));

    let measures = default_measures(seed)?;
    let mut grid = SmoothingGrid::default();
    if let Some(m) = &cfg.m {
        grid.ms = m.clone();
    }
    if let Some(b) = &cfg.b_grid {
        grid.bs = b.clone();
    }
    if let Some(r) = &cfg.r {
        grid.rs = r.clone();
    }
    let rep = certify_smoothing(&measures, &grid)?;
    run.csv("smoothing.csv", &rep.rows)?;
    let bad = rep.rows.iter().filter(|r| !r.ok).count();
    run.check(
        "fourier-cert: smoothing bound",
        true,
        bad == 0,
        format!("{} rows, {bad} violated, {} (measure, r) pairs below resolution", rep.rows.len(), rep.skipped),
    );

    let mc_rows = cfg.mc_rows.unwrap_or(5);
    if mc_rows > 0 {
        let mc = mc_cross_check(&measures, &grid, mc_rows, cfg.mc_pairs.unwrap_or(1_000_000), seed)?;
        run.csv("mc.csv", &mc)?;
        let worst = mc.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
        run.check("fourier-cert: Monte Carlo cross-check within 3 SE", false, mc.iter().all(|c| c.ok), format!("max |z| {worst:.3}"));
    }
    run.note("measures", measures.iter().map(|m| m.id.clone()).collect::<Vec<_>>());
    Ok(())
}

/// Correlation dimension `−ln Σ p² / ln a` of a memoryless generator.
fn correlation_dimension(gen: &MeasureGen) -> Option<f64> {
    match gen.kind() {
        GenKind::Markov => None,
        _ => {
            let s: f64 = gen.initial_law().iter().map(|p| p * p).sum();
            Some(-s.ln() / (gen.base() as f64).ln())
        }
    }
}

#[derive(Serialize)]
struct ProofChainRow {
    k: usize,
    m: i64,
    samples: usize,
    level: usize,
    panels: usize,
    value: f64,
    std_error: f64,
    fourier_term: f64,
    correlation_term: f64,
    rhs: f64,
    within_rhs: bool,
}

pub fn proof_chain(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let gen = gen_or(cfg, "cantor3")?;
    let seed = cfg.seed()?;
    let ks = cfg.k.clone().unwrap_or_else(|| vec![0, 2, 4, 6]);
    let level = cfg.level.unwrap_or(10);
    let samples = cfg.samples.unwrap_or(32);
    let mut rows = Vec::new();
    let mut all_seeds = Vec::new();
    for &m in cfg.m.as_deref().unwrap_or(&[1]) {
        let mut ests = Vec::new();
        for &k in &ks {
            let est = proof_chain_quantity(&gen, k, m, samples, level, seed)?;
            rows.push(ProofChainRow {
                k,
                m,
                samples,
                level,
                panels: est.panels,
                value: est.value,
                std_error: est.std_error,
                fourier_term: est.fourier_term,
                correlation_term: est.correlation_term,
                rhs: est.rhs,
                within_rhs: est.within_rhs(),
            });
            if all_seeds.is_empty() {
                all_seeds = est.seeds.clone();
            }
            ests.push(est);
        }
        let within = ests.iter().all(|e| e.within_rhs());
        run.check(format!("proof-chain: m={m} value <= smoothing bound"), true, within, format!("{} values of k", ests.len()));
        let v = decay_violation(&ests);
        run.check(format!("proof-chain: m={m} decreasing in k up to 2 SE"), false, v <= 2.0, format!("worst rise {v:.3} SE"));
    }
    run.csv("proof_chain.csv", &rows)?;

    let slope_level = level.max(12);
    let mu = gen.realize(slope_level)?;
    let a = gen.base() as f64;
    let radii: Vec<f64> = (2..=8).map(|j| a.powi(-j)).collect();
    let slope = correlation_log_slope(&mu, &radii)?;
    run.note("correlation_slope", slope);
    if let Some(d2) = correlation_dimension(&gen) {
        run.check(
            "proof-chain: correlation log-slope",
            false,
            (slope - d2).abs() <= 0.05,
            format!("slope {slope:.4}, correlation dimension {d2:.4}"),
        );
    }
    run.note("seeds", all_seeds);
    Ok(())
}

#[derive(Serialize)]
struct MartingaleRow {
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    trial: usize,
    seed: u64,
    value: f64,
}

pub fn martingale(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let gen = gen_or(cfg, "markov2")?;
    let seed = cfg.seed()?;
    let n = cfg.n.unwrap_or(10_000);
    let trials = cfg.trials.unwrap_or(100);
    let c = cfg.soft_rms_c.unwrap_or(3.0);
    let band = cfg.soft_rms_ratio.clone().unwrap_or_else(|| vec![0.3, 0.75]);
    if band.len() != 2 {
        return Err(config_err("soft_rms_ratio needs two values lo,hi"));
    }
    let proc = SymbolicProcess::new(gen.clone(), seed)?;
    let mut rows = Vec::new();
    for &k in cfg.k.as_deref().unwrap_or(&[1, 3]) {
        let f = WindowFunction::cosine(gen.base(), k)?;
        let r1 = martingale_avg_experiment(&proc, &f, n, trials)?;
        let r4 = martingale_avg_experiment(&proc, &f, 4 * n, trials)?;
        for r in [&r1, &r4] {
            for (t, (&v, &s)) in r.values.iter().zip(&r.seeds).enumerate() {
                rows.push(MartingaleRow { k, n: r.n, trial: t, seed: s, value: v });
            }
        }
        let bound = r1.rms_bound(c);
        run.check(format!("martingale: k={k} RMS at N={n}"), false, r1.rms < bound, format!("{:.3e} vs {bound:.3e}", r1.rms));
        let ratio = r4.rms / r1.rms;
        run.check(
            format!("martingale: k={k} RMS(4N)/RMS(N)"),
            false,
            ratio >= band[0] && ratio <= band[1],
            format!("{ratio:.3} (band {}..{})", band[0], band[1]),
        );
        let split = split_index_average(&r1.values, k.max(2))?;
        run.check(format!("martingale: k={k} index split reassembles"), true, split.discrepancy() <= 1e-12, format!("{:.1e}", split.discrepancy()));
    }
    run.csv("martingale.csv", &rows)?;
    Ok(())
}

pub fn time_change(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let gen = gen_or(cfg, "markov2")?;
    let seed = cfg.seed()?;
    let theta = cfg.theta.unwrap_or(2f64.ln() / 3f64.ln());
    let beta = cfg.beta.unwrap_or(theta);
    let a = gen.base();
    let tests = vec![DigitTest::first_digit_character(a, 1)?, DigitTest::truncated_character(a, 3, 1)?];
    let freqs = cfg.m.clone().unwrap_or_else(|| vec![0, 1, 2, 3]);
    let res = time_change_joint_experiment(
        theta,
        beta,
        &gen,
        &freqs,
        &tests,
        cfg.n.unwrap_or(10_000),
        cfg.samples.unwrap_or(100),
        seed,
    )?;
    run.csv("time_change.csv", &res.entries)?;
    let worst = res.entries.iter().map(|e| e.deviation / e.tolerance).fold(0.0, f64::max);
    run.check("time-change: joint averages within tolerance", false, res.all_ok(), format!("worst deviation/tolerance {worst:.3}"));
    run.note("seeds", &res.seeds);
    Ok(())
}

#[derive(Serialize)]
struct EquivarianceRow {
    gen: String,
    pair: usize,
    past: String,
    word: String,
    max_abs_diff: f64,
    holds: bool,
}

fn digits_str(d: &[u32]) -> String {
    d.iter().map(|x| x.to_string()).collect()
}

pub fn equivariance(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let seed = cfg.seed()?;
    let pairs = cfg.samples.unwrap_or(100);
    let level = cfg.level.unwrap_or(8);
    if level < 2 {
        return Err(config_err("equivariance needs level >= 2"));
    }
    let gens = match &cfg.gen {
        Some(g) => vec![parse_gen(g)?],
        None => vec![MeasureGen::bernoulli(vec![0.2, 0.5, 0.3])?, parse_gen("markov2")?, MeasureGen::cantor()],
    };
    let mut rows = Vec::new();
    for (gi, gen) in gens.iter().enumerate() {
        for pair in 0..pairs {
            let mut rng = seed::unit_rng(seed, stream::BATTERY, ((gi as u64) << 32) | pair as u64);
            let past_len = rng.random_range(1..=6);
            let past = gen.sample_past(&mut rng, past_len);
            let word_len = rng.random_range(1..=level.min(4));
            let digits = gen.sample_digits_from(&mut rng, gen.past_state(&past)?, word_len);
            let word = CylinderWord::new(gen.base(), digits)?;
            let c = verify_equivariance(gen, &past, &word, level)?;
            rows.push(EquivarianceRow {
                gen: gen.label(),
                pair,
                past: digits_str(past.symbols()),
                word: digits_str(word.digits()),
                max_abs_diff: c.max_abs_diff,
                holds: c.holds,
            });
        }
    }
    run.csv("equivariance.csv", &rows)?;
    let bad = rows.iter().filter(|r| !r.holds).count();
    let worst = rows.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    run.check("equivariance: conditional measures", true, bad == 0, format!("{} pairs, {bad} failed, max diff {worst:.2e}", rows.len()));
    Ok(())
}

pub fn controls(cfg: &RunConfig, run: &mut Run) -> anyhow::Result<()> {
    let mode = cfg.mode.as_deref().unwrap_or("all");
    if !matches!(mode, "dependent" | "rational" | "all") {
        return Err(config_err(format!("unknown mode {mode:?} (dependent, rational, all)")));
    }
    let tol = cfg.soft_control_tol.unwrap_or(0.05);
    let n = cfg.n.unwrap_or(100_000);
    let m = cfg.m.clone().unwrap_or_else(|| vec![1]);
    if mode != "rational" {
        let a = cfg.a.unwrap_or(2);
        let b = cfg.b.unwrap_or(a as u64);
        let gen = match &cfg.gen {
            Some(g) => parse_gen(g)?,
            None if a == 2 => MeasureGen::bernoulli(vec![0.25, 0.75])?,
            None => {
                let total = (a * (a + 1) / 2) as f64;
                MeasureGen::bernoulli((1..=a).map(|i| i as f64 / total).collect())?
            }
        };
        if gen.base() != a {
            return Err(config_err(format!("generator base {} does not match a = {a}", gen.base())));
        }
        if !multiplicatively_dependent(a as u64, b) {
            return Err(config_err(format!("a = {a} and b = {b} are independent; the dependent control needs a^i = b^j")));
        }
        let hc = HostExperimentConfig {
            gen,
            b,
            samples: cfg.samples.unwrap_or(10),
            freqs: m.clone(),
            checkpoints: cfg.checkpoints.clone().unwrap_or_else(|| decades(n)),
            k: 0,
            seed: cfg.seed()?,
            guard: cfg.guard.unwrap_or(hostlab::PrecisionBudget::DEFAULT_GUARD_DIGITS),
        };
        let report = weyl_run(run, &hc, "dependent")?;
        run.check(
            "controls: dependent run labeled negative_control",
            true,
            report.label.as_deref() == Some("negative_control"),
            format!("a={a}, b={b}"),
        );
        for &mm in &m {
            if let Some(s) = report.summary.iter().rfind(|s| s.m == mm) {
                if let (Some(o), Some(dev)) = (s.oracle, s.oracle_median_dev) {
                    run.check(
                        format!("controls: |W_{}({mm}) - mu^({mm})| < {tol}", s.n),
                        false,
                        dev < tol,
                        format!("median deviation {dev:.4}, oracle {:.5}{:+.5}i", o.re, o.im),
                    );
                }
            }
        }
    }
    if mode != "dependent" {
        let (p, q) = (cfg.p.unwrap_or(1), cfg.q.unwrap_or(7));
        let b = cfg.b.unwrap_or(2);
        let nr = cfg.n.unwrap_or(30_000);
        let rows = m.iter().map(|&mm| rational_point_control(p, q, b, mm, nr)).collect::<Result<Vec<_>, _>>()?;
        #[derive(Serialize)]
        struct RationalRow {
            p: u64,
            q: u64,
            b: u64,
            m: i64,
            #[serde(rename = "N")]
            n: usize,
            re: f64,
            im: f64,
            cycle_re: f64,
            cycle_im: f64,
            cycle_len: usize,
            deviation: f64,
        }
        let out: Vec<RationalRow> = rows
            .iter()
            .map(|r| RationalRow {
                p: r.p,
                q: r.q,
                b: r.b,
                m: r.m,
                n: r.n,
                re: r.value.re,
                im: r.value.im,
                cycle_re: r.cycle_average.re,
                cycle_im: r.cycle_average.im,
                cycle_len: r.cycle.len(),
                deviation: r.deviation,
            })
            .collect();
        run.csv("rational.csv", &out)?;
        let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
        run.check(format!("controls: {p}/{q} under x{b} tends to its cycle average"), false, worst < 1e-3, format!("max deviation {worst:.2e}"));
    }
    Ok(())
}

pub fn dispatch(name: &'static str, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    cfg.seed()?;
    let mut run = Run::new(name, cfg)?;
    match name {
        "weyl" => weyl(cfg, &mut run)?,
        "fourier-cert" => fourier_cert(cfg, &mut run)?,
        "proof-chain" => proof_chain(cfg, &mut run)?,
        "martingale" => martingale(cfg, &mut run)?,
        "time-change" => time_change(cfg, &mut run)?,
        "equivariance" => equivariance(cfg, &mut run)?,
        "controls" => controls(cfg, &mut run)?,
        other => unreachable!("unknown subcommand {other}"),
    }
    run.finish()
}
