//! `feature_0..feature_k,label,domain_id` CSV files.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::dataset::{Domain, MultiDomainDataset, Provenance};
use crate::error::{Error, Result};

/// Writes every example; floats use 17 significant digits.
pub fn write_csv<W: Write>(ds: &MultiDomainDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ds.n_features())
        .map(|k| format!("feature_{k}"))
        .collect();
    header.push("label".into());
    header.push("domain_id".into());
    w.write_record(&header)?;
    for d in ds.domains() {
        let b = d.examples();
        for i in 0..b.len() {
            let mut rec: Vec<String> = b.row(i).iter().map(|x| format!("{x:.16e}")).collect();
            rec.push(b.labels()[i].to_string());
            rec.push(d.id().to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset back. Domains are ordered by id; `n_classes` defaults to
/// one past the largest label.
pub fn read_csv<R: Read>(reader: R, n_classes: Option<usize>) -> Result<MultiDomainDataset> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let n_cols = header.len();
    if n_cols < 3 || &header[n_cols - 2] != "label" || &header[n_cols - 1] != "domain_id" {
        return Err(Error::Parse(
            "expected columns feature_0..feature_k,label,domain_id".into(),
        ));
    }
    let n_features = n_cols - 2;
    for (k, name) in header.iter().take(n_features).enumerate() {
        if name != format!("feature_{k}") {
            return Err(Error::Parse(format!(
                "column {k} should be feature_{k}, found `{name}`"
            )));
        }
    }
    let mut by_domain: BTreeMap<usize, (Vec<f64>, Vec<usize>)> = BTreeMap::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse_err = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 1));
        let entry_id: usize = rec[n_cols - 1]
            .trim()
            .parse()
            .map_err(|_| parse_err("domain_id"))?;
        let label: usize = rec[n_cols - 2]
            .trim()
            .parse()
            .map_err(|_| parse_err("label"))?;
        let entry = by_domain.entry(entry_id).or_default();
        for k in 0..n_features {
            let x: f64 = rec[k].trim().parse().map_err(|_| parse_err("feature"))?;
            entry.0.push(x);
        }
        entry.1.push(label);
    }
    let max_label = by_domain
        .values()
        .flat_map(|(_, l)| l.iter().copied())
        .max();
    let n_classes = match (n_classes, max_label) {
        (Some(c), _) => c,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(Error::Parse("csv has no rows".into())),
    };
    let domains = by_domain
        .into_iter()
        .map(|(id, (features, labels))| Domain::new(id, n_features, features, labels))
        .collect::<Result<Vec<_>>>()?;
    MultiDomainDataset::new(domains, n_classes, Provenance::named("csv"))
}
