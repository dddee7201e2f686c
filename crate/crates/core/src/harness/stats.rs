use super::sweep::SweepTable;
use crate::error::{Error, Result};

/// Mean and standard error `s/√n` (sample standard deviation) of repeated
/// trials. Needs at least two finite values.
pub fn aggregate_trials(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::invalid(format!(
            "aggregating trials needs at least 2 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "trial values",
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Config id with the highest validation accuracy among successful rows;
/// the lowest id wins ties.
pub fn model_selection(table: &SweepTable) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for row in &table.rows {
        if let Some(v) = row.val_accuracy {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((row.config_id, v));
            }
        }
    }
    best.map(|(id, _)| id)
        .ok_or_else(|| Error::invalid("model selection: every sweep row failed"))
}
