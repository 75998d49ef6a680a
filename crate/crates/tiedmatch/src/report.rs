//! Machine-readable renderings of exact results and seed-averaged regret.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tiedmatch_core::bandit::{simulate_etco, BanditConfig, BanditEnv, RegretTrace, ReportRow};
use tiedmatch_core::scalar::format_rational;
use tiedmatch_core::share::RatioValue;
use tiedmatch_core::{Rational, Scalar};

/// `{"exact": "3/8", "decimal": 0.375}`
pub fn exact(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "decimal": r.to_f64() })
}

pub fn exact_list(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(exact).collect())
}

/// `(1/2, 3/8)`
pub fn show(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// Infinite ratios are written as the string `"inf"` with a null decimal.
pub fn ratio_value(r: &RatioValue) -> Value {
    match r {
        RatioValue::Finite(x) => exact(x),
        RatioValue::Infinite => json!({ "exact": "inf", "decimal": null }),
    }
}

/// One line of the regret CSV. Workers are 1-based.
#[derive(Debug, Clone, Serialize)]
pub struct RegretCsvRow {
    pub checkpoint_t: u64,
    pub worker: usize,
    pub mean_reg: f64,
    pub stderr_reg: f64,
    pub mean_reg_alpha: f64,
    pub stderr_reg_alpha: f64,
    pub frac_runs_gs_oracle: f64,
}

impl From<&ReportRow> for RegretCsvRow {
    fn from(r: &ReportRow) -> Self {
        Self {
            checkpoint_t: r.checkpoint_t,
            worker: r.worker + 1,
            mean_reg: r.mean_reg,
            stderr_reg: r.stderr_reg,
            mean_reg_alpha: r.mean_reg_alpha,
            stderr_reg_alpha: r.stderr_reg_alpha,
            frac_runs_gs_oracle: r.frac_runs_gs_oracle,
        }
    }
}

pub fn write_csv<T: Serialize, W: Write>(out: W, rows: impl IntoIterator<Item = T>) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_regret_csv<W: Write>(out: W, rows: &[ReportRow]) -> csv::Result<()> {
    write_csv(out, rows.iter().map(RegretCsvRow::from))
}

/// Runs seeds `cfg.seed, cfg.seed + 1, …` in parallel. Each run owns its
/// RNG stream, so the traces do not depend on scheduling.
pub fn run_seeds(env: &BanditEnv, cfg: &BanditConfig, seeds: u64) -> tiedmatch_core::error::Result<Vec<RegretTrace>> {
    (0..seeds)
        .into_par_iter()
        .map(|i| {
            let mut run = cfg.clone();
            run.seed = cfg.seed.wrapping_add(i);
            simulate_etco(env, &run)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiedmatch_core::bandit::T0Policy;
    use tiedmatch_core::gen;
    use tiedmatch_core::scalar::ratio;
    use tiedmatch_core::stability::EnumBound;

    #[test]
    fn exact_values_carry_both_forms() {
        assert_eq!(exact(&ratio(3, 8)), json!({ "exact": "3/8", "decimal": 0.375 }));
        assert_eq!(ratio_value(&RatioValue::Infinite)["exact"], "inf");
    }

    #[test]
    fn parallel_runs_match_sequential_ones() {
        let env = BanditEnv::new(&gen::appendix_h_nu(), EnumBound::default()).unwrap();
        let cfg = BanditConfig::new(2000, T0Policy::TwoThirds, 7);
        let traces = run_seeds(&env, &cfg, 4).unwrap();
        for (i, tr) in traces.iter().enumerate() {
            let mut single = cfg.clone();
            single.seed = 7 + i as u64;
            assert_eq!(*tr, simulate_etco(&env, &single).unwrap());
        }
    }

    #[test]
    fn csv_has_the_documented_header() {
        let env = BanditEnv::new(&gen::example1(), EnumBound::default()).unwrap();
        let traces = run_seeds(&env, &BanditConfig::new(300, T0Policy::HalfLog, 1), 2).unwrap();
        let rows = tiedmatch_core::bandit::regret_report(&traces, &[1.0; 3]).unwrap();
        let mut buf = Vec::new();
        write_regret_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "checkpoint_t,worker,mean_reg,stderr_reg,mean_reg_alpha,stderr_reg_alpha,frac_runs_gs_oracle\n"
        ));
        assert_eq!(text.lines().count(), 1 + rows.len());
    }
}
