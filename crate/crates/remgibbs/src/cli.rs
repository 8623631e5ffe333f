//! Command runners behind the `remgibbs` binary.
//!
//! Four commands share one [`RunConfig`]:
//!
//! * `free-energy` — brute-force finite-volume free energy against its limit.
//! * `verify` — the bound suite; every row is a [`BoundReport`], the process
//!   exit status is nonzero iff any row fails.
//! * `simulate` — JSON-lines records of simulated approximate Gibbs measures.
//! * `compare` — per-replica total variation between the brute-force Gibbs
//!   measure and its truncation, with the analytic bound and the good-event
//!   indicator, plus a max-weight KS summary against the ladder route.
//!
//! Output is deterministic given the full configuration: replicas own
//! counter-derived substreams and are merged in index order, so neither the
//! worker count nor scheduling affects a byte of output.

use crate::bounds::{self, BoundReport};
use crate::error::{Error, Result};
use crate::gibbs_approx::{self, KSchedule};
use crate::order_stats::ExponentialLadder;
use crate::quantile::std_normal_cdf;
use crate::rem_core::{self, beta_c, EnergySample};
use crate::rng::{lane_substream, run_replicas};
use crate::simulator::{self, summarize};
use crate::stats::two_sample_ks;
use serde::Serialize;
use std::io::Write;

pub const CSV_SCHEMA_VERSION: &str = "remgibbs-csv v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FreeEnergy,
    Verify,
    Simulate,
    Compare,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "free-energy" => Ok(Command::FreeEnergy),
            "verify" => Ok(Command::Verify),
            "simulate" => Ok(Command::Simulate),
            "compare" => Ok(Command::Compare),
            other => Err(Error::Config(format!(
                "unknown command '{other}'; expected free-energy|verify|simulate|compare"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMethod {
    OrderStats,
    Ladder,
}

/// Full run configuration; see the binary for flag parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n_list: Vec<u32>,
    /// Absolute inverse temperatures.
    pub betas: Vec<f64>,
    pub schedule: KSchedule,
    pub replicas: usize,
    pub seed: u64,
    /// 0 means the global default thread pool.
    pub workers: usize,
    pub format: OutputFormat,
    /// Check selection for `verify`; `None` selects the whole suite.
    pub checks: Option<Vec<String>>,
    pub method: SimMethod,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if self.n_list.is_empty() && self.command != Command::Verify {
            return Err(Error::Config("no system sizes given (use --N or --N-range)".into()));
        }
        if self.betas.is_empty() && self.command != Command::Verify {
            return Err(Error::Config("no inverse temperatures given".into()));
        }
        Ok(())
    }
}

/// Run a command, writing its output; returns the process exit code
/// (0 on success, 1 if a verify row failed).
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    cfg.validate()?;
    let body = || -> Result<i32> {
        match cfg.command {
            Command::FreeEnergy => {
                cmd_free_energy(cfg, out)?;
                Ok(0)
            }
            Command::Verify => {
                let all_hold = cmd_verify(cfg, out)?;
                Ok(if all_hold { 0 } else { 1 })
            }
            Command::Simulate => {
                cmd_simulate(cfg, out)?;
                Ok(0)
            }
            Command::Compare => {
                cmd_compare(cfg, out)?;
                Ok(0)
            }
        }
    };
    if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(body)
    } else {
        body()
    }
}

#[derive(Serialize)]
struct FreeEnergyRow {
    n: u32,
    beta: f64,
    mean_fn: f64,
    sd_fn: f64,
    f_limit: f64,
}

/// Mean and spread of the finite-volume free energy per `(N, beta)`, next to
/// the limit value.
pub fn cmd_free_energy(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    if cfg.format == OutputFormat::Csv {
        writeln!(out, "# {CSV_SCHEMA_VERSION} free-energy")?;
        writeln!(out, "N,beta,mean_FN,sd_FN,F_limit")?;
    }
    let mut lane = 0u64;
    for &n_exp in &cfg.n_list {
        if n_exp > rem_core::MAX_BRUTE_N {
            return Err(Error::Resource(format!(
                "N = {n_exp} above brute-force cap {}",
                rem_core::MAX_BRUTE_N
            )));
        }
        for &beta in &cfg.betas {
            let values = run_replicas(cfg.seed, lane, cfg.replicas, |_, rng| {
                let sample = EnergySample::sample(n_exp, rng).expect("guarded N");
                rem_core::free_energy(&sample, beta).expect("beta > 0")
            });
            lane += 1;
            let (mean, sd) = if values.len() >= 2 {
                let (m, se) = crate::stats::mean_and_se(&values);
                (m, se * (values.len() as f64).sqrt())
            } else {
                (values[0], 0.0)
            };
            let row = FreeEnergyRow {
                n: n_exp,
                beta,
                mean_fn: mean,
                sd_fn: sd,
                f_limit: rem_core::free_energy_limit(beta)?,
            };
            match cfg.format {
                OutputFormat::Csv => writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.n, row.beta, row.mean_fn, row.sd_fn, row.f_limit
                )?,
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&row).unwrap())?,
            }
        }
    }
    Ok(())
}

const ALL_CHECKS: &[&str] = &[
    "lemma21",
    "ladder",
    "ztail",
    "lemma22",
    "bernstein",
    "prop22",
    "refined",
    "zeta",
    "supermartingale",
    "lemma32",
    "properties",
];

fn selected(cfg: &RunConfig, name: &str) -> bool {
    match &cfg.checks {
        None => true,
        Some(list) => list.iter().any(|c| c == name),
    }
}

/// The default verification suite. Sizes are fixed so the suite is a
/// reproducible contract; `--seed` moves every substream at once.
pub fn default_suite(cfg: &RunConfig) -> Result<Vec<BoundReport>> {
    if let Some(list) = &cfg.checks {
        if list.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        for c in list {
            if !ALL_CHECKS.contains(&c.as_str()) {
                return Err(Error::Config(format!(
                    "unknown check '{c}'; available: {}",
                    ALL_CHECKS.join(",")
                )));
            }
        }
    }
    let seed = cfg.seed;
    let mut rows = Vec::new();

    if selected(cfg, "lemma21") {
        rows.push(bounds::lemma21_check(1 << 20, 1.0, 100_000, seed)?);
        rows.push(bounds::lemma21_check(1 << 40, 1.0, 100_000, seed ^ 0x11)?);
    }
    if selected(cfg, "ladder") {
        rows.push(bounds::ladder_deviation_check(16, 0.5, 1_000_000, seed)?);
        rows.push(bounds::ladder_deviation_check(400, 0.5, 200_000, seed ^ 0x12)?);
    }
    if selected(cfg, "ztail") {
        for pair in bounds::z_tail_reports(&[5.0, 10.0], 400, 10_000_000, seed)? {
            rows.extend(pair);
        }
    }
    if selected(cfg, "lemma22") {
        rows.push(bounds::weighted_tail_check(2.0, 0.8, 2, 1_000_000, 2000, seed)?);
    }
    if selected(cfg, "bernstein") {
        rows.push(bounds::bernstein_check(0.3, 10_000, 2.0, 10_000, seed)?);
        rows.push(bounds::bernstein_check(0.3, 10_000, 3.0, 10_000, seed ^ 0x13)?);
    }
    if selected(cfg, "prop22") {
        let params = bounds::regime(1 << 20, 0.5, 0.25, 1.0, 0.3, 1.0)?;
        rows.push(bounds::prop22_check(&params, 320, 0.3, 1000, seed)?);
    }
    if selected(cfg, "refined") {
        rows.push(bounds::refined_spacing_check(1 << 30, 1000, 0.5, 1000, seed)?);
    }
    if selected(cfg, "zeta") {
        rows.extend(zeta_mean_reports(2.0 * beta_c(), 100, 100_000, seed)?);
    }
    if selected(cfg, "supermartingale") {
        rows.push(gibbs_approx::supermartingale_check(2.0 * beta_c(), 20, 100_000, seed)?);
    }
    if selected(cfg, "lemma32") {
        let rep = simulator::lemma32_check(5, 2, 1_000_000, seed)?;
        rows.push(rep.rank_probability);
        rows.push(rep.factorization);
    }
    if selected(cfg, "properties") {
        rows.push(property_suite_report(2.0 * beta_c(), 45, 3, 10_000, seed)?);
    }
    Ok(rows)
}

/// Monte Carlo mean of the partial zeta series against its exact mean
/// (two-sided, 3-SE) and against the crude majorant (one-sided).
pub fn zeta_mean_reports(beta: f64, k: usize, replicas: usize, seed: u64) -> Result<Vec<BoundReport>> {
    let draws = run_replicas(seed, 9, replicas, |_, rng| {
        let l = ExponentialLadder::sample(k, rng).expect("k >= 1");
        gibbs_approx::zeta_partial(&l, beta, k).expect("valid").partial
    });
    let (mc, se) = crate::stats::mean_and_se(&draws);
    let (exact, crude) = gibbs_approx::zeta_mean_exact(beta, k)?;
    let r = beta / beta_c();
    let mut rows = vec![BoundReport::new(
        format!("zeta_mean_abs_dev(beta/beta_c={r:.3}, k={k})"),
        (mc - exact).abs(),
        se,
        0.0,
    )];
    if let Some(c) = crude {
        rows.push(BoundReport::new(
            format!("zeta_mean_crude_majorant(beta/beta_c={r:.3}, k={k})"),
            mc,
            se,
            c,
        ));
    }
    Ok(rows)
}

/// Fraction of replicas violating any of the four pathwise property
/// inequalities; they are deterministic per path, so the bound is zero with
/// zero allowance.
pub fn property_suite_report(
    beta: f64,
    k_n: usize,
    k_0: usize,
    replicas: usize,
    seed: u64,
) -> Result<BoundReport> {
    let violations: u64 = run_replicas(seed, 10, replicas, |_, rng| {
        let l = ExponentialLadder::sample(k_n, rng).expect("k_n >= 1");
        let p = gibbs_approx::property_lower_bounds(&l, beta, k_n, k_0).expect("valid");
        u64::from(!p.all_hold)
    })
    .into_iter()
    .sum();
    let r = beta / beta_c();
    Ok(BoundReport::new(
        format!("property_pathwise(beta/beta_c={r:.3}, k_n={k_n}, k_0={k_0})"),
        violations as f64 / replicas as f64,
        0.0,
        0.0,
    ))
}

/// Run the suite, emit one row per bound; returns whether every row holds.
pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let rows = default_suite(cfg)?;
    if cfg.format == OutputFormat::Csv {
        writeln!(out, "# {CSV_SCHEMA_VERSION} verify")?;
        writeln!(out, "name,empirical,se,bound,holds")?;
    }
    let mut all = true;
    for r in &rows {
        all &= r.holds;
        match cfg.format {
            OutputFormat::Csv => writeln!(
                out,
                "{},{},{},{},{}",
                r.name, r.empirical, r.se, r.bound, r.holds
            )?,
            OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(r).unwrap())?,
        }
    }
    Ok(all)
}

#[derive(Serialize)]
struct SimulateRecord {
    n: u32,
    beta_over_betac: f64,
    k_n: usize,
    replica: u64,
    configs: Vec<String>,
    weights: Vec<f64>,
    summary: simulator::SummaryStats,
}

/// JSON-lines records of simulated measures, one line per replica.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let mut lane = 0u64;
    for &n_exp in &cfg.n_list {
        let k_n = cfg.schedule.k(n_exp)?;
        for &beta in &cfg.betas {
            let records: Vec<Result<SimulateRecord>> =
                run_replicas(cfg.seed, lane, cfg.replicas, |replica, rng| {
                    let g = match cfg.method {
                        SimMethod::OrderStats => simulator::simulate_v1(n_exp, beta, k_n, rng),
                        SimMethod::Ladder => simulator::simulate_v2(n_exp, beta, k_n, rng),
                    }?;
                    Ok(SimulateRecord {
                        n: n_exp,
                        beta_over_betac: g.beta_over_beta_c,
                        k_n,
                        replica,
                        configs: g.configs.iter().map(|c| c.to_hex()).collect(),
                        weights: g.measure.weights().to_vec(),
                        summary: summarize(&g.measure),
                    })
                });
            lane += 1;
            for rec in records {
                let rec = rec?;
                writeln!(out, "{}", serde_json::to_string(&rec).unwrap())?;
            }
        }
    }
    Ok(())
}

struct CompareReplica {
    tv: f64,
    bound: f64,
    omega: bool,
    brute_w_max: f64,
}

/// Good-event indicator evaluated on a brute-force sample: the log of the
/// minimum's lower-tail mass sits in its window, and every scaled order
/// statistic `(n+1) Phi(X_{j,n}) / j` stays within 1/2 of 1 across the
/// ladder window (the total `S_{n+1}` is not observable from the sample, so
/// `n+1` stands in for it; its fluctuations are exponentially negligible).
fn brute_good_event(sample: &EnergySample, k_n: usize, delta: f64) -> bool {
    let n = sample.size() as f64;
    let ln_n = n.ln();
    let window = 2.0 * (ln_n.powf(1.0 + delta)).ln();
    let v1 = std_normal_cdf(sample.order_stat(1));
    if ((1.0 / v1).ln() - ln_n).abs() > window {
        return false;
    }
    let params = match bounds::regime(sample.size() as u64, 0.5, 0.25, delta, 0.3, 1.0) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let top = ((n * params.lambda_tilde_n).ceil() as usize).min(sample.size());
    for j in k_n..=top {
        let v_j = std_normal_cdf(sample.order_stat(j));
        if ((n + 1.0) * v_j / j as f64 - 1.0).abs() >= 0.5 {
            return false;
        }
    }
    true
}

/// Per-replica truncation distance against the analytic bound, plus a
/// two-sample KS between the brute-force and ladder max-weight laws.
pub fn cmd_compare(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    if cfg.format == OutputFormat::Csv {
        writeln!(out, "# {CSV_SCHEMA_VERSION} compare")?;
        writeln!(out, "kind,N,beta_over_betac,kN,replica,tv,bound,omega_n,ks_wmax")?;
    }
    let mut lane = 0u64;
    for &n_exp in &cfg.n_list {
        if n_exp > 22 {
            return Err(Error::Resource(format!(
                "N = {n_exp} above the brute-force comparison cap 22"
            )));
        }
        let k_n = cfg.schedule.k(n_exp)?;
        for &beta in &cfg.betas {
            let r = beta / beta_c();
            let bound = gibbs_approx::tv_truncation_bound(k_n, beta)?;
            let rows: Vec<CompareReplica> = run_replicas(cfg.seed, lane, cfg.replicas, |_, rng| {
                let sample = EnergySample::sample(n_exp, rng).expect("guarded N");
                let gibbs = rem_core::gibbs_measure(&sample, beta).expect("beta >= 0");
                let m1 = gibbs_approx::mu1(&sample, beta, k_n).expect("valid");
                CompareReplica {
                    tv: gibbs_approx::tv(&gibbs, &m1).expect("normalized"),
                    bound,
                    omega: brute_good_event(&sample, k_n, 1.0),
                    brute_w_max: gibbs.weights()[0],
                }
            });
            let v2_w_max = run_replicas(cfg.seed, lane + 1000, cfg.replicas, |_, rng| {
                let g = simulator::simulate_v2(n_exp, beta, k_n, rng).expect("valid");
                g.measure.weights()[0]
            });
            lane += 1;
            let brute_w_max: Vec<f64> = rows.iter().map(|r| r.brute_w_max).collect();
            let ks = two_sample_ks(&brute_w_max, &v2_w_max);
            for (i, row) in rows.iter().enumerate() {
                match cfg.format {
                    OutputFormat::Csv => writeln!(
                        out,
                        "replica,{},{},{},{},{},{},{},",
                        n_exp,
                        r,
                        k_n,
                        i,
                        row.tv,
                        row.bound,
                        u8::from(row.omega)
                    )?,
                    OutputFormat::Json => writeln!(
                        out,
                        "{}",
                        serde_json::json!({
                            "kind": "replica", "N": n_exp, "beta_over_betac": r, "kN": k_n,
                            "replica": i, "tv": row.tv, "bound": row.bound,
                            "omega_n": row.omega,
                        })
                    )?,
                }
            }
            match cfg.format {
                OutputFormat::Csv => {
                    writeln!(out, "summary,{n_exp},{r},{k_n},,,,,{ks}")?;
                }
                OutputFormat::Json => writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "kind": "summary", "N": n_exp, "beta_over_betac": r, "kN": k_n,
                        "ks_wmax": ks,
                    })
                )?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg(command: Command) -> RunConfig {
        RunConfig {
            command,
            n_list: vec![10],
            betas: vec![2.0 * beta_c()],
            schedule: KSchedule::iterated_log(1),
            replicas: 4,
            seed: 42,
            workers: 0,
            format: OutputFormat::Csv,
            checks: None,
            method: SimMethod::Ladder,
        }
    }

    #[test]
    fn verify_rejects_empty_selection() {
        let mut cfg = base_cfg(Command::Verify);
        cfg.checks = Some(vec![]);
        let mut sink = Vec::new();
        let err = run(&cfg, &mut sink).unwrap_err();
        assert!(err.to_string().contains("no checks selected"));
    }

    #[test]
    fn verify_rejects_unknown_check() {
        let mut cfg = base_cfg(Command::Verify);
        cfg.checks = Some(vec!["nonsense".into()]);
        assert!(run(&cfg, &mut Vec::new()).is_err());
    }

    #[test]
    fn verify_single_check_exit_zero() {
        let mut cfg = base_cfg(Command::Verify);
        cfg.checks = Some(vec!["lemma32".into()]);
        let mut sink = Vec::new();
        let code = run(&cfg, &mut sink).unwrap();
        assert_eq!(code, 0);
        let text = String::from_utf8(sink).unwrap();
        assert!(text.starts_with(&format!("# {CSV_SCHEMA_VERSION} verify")));
        assert!(text.contains("rank_tuple"));
    }

    #[test]
    fn free_energy_csv_layout_and_limit() {
        let mut cfg = base_cfg(Command::FreeEnergy);
        cfg.betas = vec![beta_c()];
        let mut sink = Vec::new();
        run(&cfg, &mut sink).unwrap();
        let text = String::from_utf8(sink).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# remgibbs-csv v1 free-energy");
        assert_eq!(lines.next().unwrap(), "N,beta,mean_FN,sd_FN,F_limit");
        let row = lines.next().unwrap();
        let f_limit: f64 = row.split(',').last().unwrap().parse().unwrap();
        assert!((f_limit - (-beta_c())).abs() < 1e-12);
    }

    #[test]
    fn deterministic_output_across_worker_counts() {
        let mut one = Vec::new();
        let mut four = Vec::new();
        let mut cfg = base_cfg(Command::Simulate);
        cfg.replicas = 8;
        cfg.workers = 1;
        run(&cfg, &mut one).unwrap();
        cfg.workers = 4;
        run(&cfg, &mut four).unwrap();
        assert_eq!(one, four);
        assert!(!one.is_empty());
    }

    #[test]
    fn simulate_records_are_normalized_json() {
        let mut cfg = base_cfg(Command::Simulate);
        cfg.n_list = vec![40];
        cfg.schedule = KSchedule::iterated_log(3);
        cfg.replicas = 3;
        let mut sink = Vec::new();
        run(&cfg, &mut sink).unwrap();
        let text = String::from_utf8(sink).unwrap();
        let mut count = 0;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["k_n"], 11); // ceil(40 * ln ln ln 40)
            let w: Vec<f64> = v["weights"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect();
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(v["configs"][0].as_str().unwrap().starts_with("0x"));
            count += 1;
        }
        assert_eq!(count, 3);
    }

    #[test]
    fn compare_emits_rows_and_summary() {
        let mut cfg = base_cfg(Command::Compare);
        cfg.n_list = vec![12];
        cfg.replicas = 6;
        let mut sink = Vec::new();
        run(&cfg, &mut sink).unwrap();
        let text = String::from_utf8(sink).unwrap();
        let replica_rows = text.lines().filter(|l| l.starts_with("replica,")).count();
        let summary_rows = text.lines().filter(|l| l.starts_with("summary,")).count();
        assert_eq!(replica_rows, 6);
        assert_eq!(summary_rows, 1);
        for line in text.lines().filter(|l| l.starts_with("replica,")) {
            let cols: Vec<&str> = line.split(',').collect();
            let tv: f64 = cols[5].parse().unwrap();
            assert!((0.0..=2.0).contains(&tv));
        }
    }

    #[test]
    fn compare_guards_brute_force_cap() {
        let mut cfg = base_cfg(Command::Compare);
        cfg.n_list = vec![23];
        assert!(matches!(run(&cfg, &mut Vec::new()), Err(Error::Resource(_))));
    }

    #[test]
    fn command_parse_round_trip() {
        assert_eq!(Command::parse("verify").unwrap(), Command::Verify);
        assert_eq!(Command::parse("free-energy").unwrap(), Command::FreeEnergy);
        assert!(Command::parse("bogus").is_err());
    }
}
