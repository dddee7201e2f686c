use std::io::Write;

use serde::{Deserialize, Serialize};

use super::run::{prepare, RunResult};
use crate::error::{Error, Result};
use crate::optim::Rule;
use crate::sharpness::gap_curve;

pub const CURVES_CSV_HEADER: &str = "rule,target_domain,rho,gap";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub rule: Rule,
    pub target_domain: usize,
    pub rho: f64,
    pub gap: f64,
}

/// Surrogate gap of every run's selected checkpoint, measured on its
/// held-out target domain at each radius. Runs sharing a rule and target
/// (different seeds) are averaged into one curve; curves keep the order in
/// which their first run appears.
pub fn export_sharpness_curves(results: &[RunResult], radii: &[f64]) -> Result<Vec<CurveRow>> {
    if results.is_empty() {
        return Err(Error::invalid("no runs to export"));
    }
    let mut curves: Vec<((Rule, usize), Vec<f64>, usize)> = Vec::new();
    for r in results {
        let data = prepare(&r.config)?;
        let (gaps, _) = gap_curve(&data.model, &r.chosen_params, &data.target, radii)?;
        let key = (r.config.optimizer.rule, r.config.dataset.target_domain);
        match curves.iter_mut().find(|(k, _, _)| *k == key) {
            Some((_, sum, n)) => {
                sum.iter_mut().zip(&gaps).for_each(|(s, g)| *s += g);
                *n += 1;
            }
            None => curves.push((key, gaps, 1)),
        }
    }
    Ok(curves
        .into_iter()
        .flat_map(|((rule, target_domain), sum, n)| {
            radii.iter().zip(sum).map(move |(&rho, s)| CurveRow {
                rule,
                target_domain,
                rho,
                gap: s / n as f64,
            })
        })
        .collect())
}

pub fn write_curves_csv<W: Write>(rows: &[CurveRow], mut writer: W) -> Result<()> {
    writeln!(writer, "{CURVES_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            writer,
            "{},{},{:.16e},{:.16e}",
            r.rule, r.target_domain, r.rho, r.gap
        )?;
    }
    Ok(())
}
