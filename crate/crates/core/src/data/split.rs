use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{Domain, MultiDomainDataset};
use crate::error::{Error, Result};

/// Holds out domain `target_index`; the sources keep their original order
/// and ids.
pub fn leave_one_out_split(
    ds: &MultiDomainDataset,
    target_index: usize,
) -> Result<(MultiDomainDataset, Domain)> {
    if ds.n_domains() < 2 {
        return Err(Error::invalid("leave-one-out needs at least two domains"));
    }
    if target_index >= ds.n_domains() {
        return Err(Error::IndexOutOfRange {
            index: target_index,
            len: ds.n_domains(),
        });
    }
    let target = ds.domains()[target_index].clone();
    let sources = ds
        .domains()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_index)
        .map(|(_, d)| d.clone())
        .collect();
    Ok((ds.with_domains(sources), target))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InDomainSplit {
    pub train: MultiDomainDataset,
    pub val: MultiDomainDataset,
    pub test: MultiDomainDataset,
}

/// `(train, val, test)` sizes for one domain of `n` examples.
fn split_sizes(n: usize) -> (usize, usize, usize) {
    let val = (n as f64 * 0.2).round() as usize;
    let test = (n as f64 * 0.2).round() as usize;
    (n - val - test, val, test)
}

/// Stratified 60/20/20 partition of every domain.
///
/// Within each label the examples are shuffled, then all labels are
/// interleaved in proportion to their frequency before the ordered sequence
/// is cut at the split boundaries. Every split therefore sees each label in
/// close to its domain-level proportion, and per-domain sizes are exact.
pub fn in_domain_split(ds: &MultiDomainDataset, seed: u64) -> Result<InDomainSplit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for d in ds.domains() {
        if d.len() < 5 {
            return Err(Error::invalid(format!(
                "domain {} has {} examples; in-domain split needs at least 5",
                d.id(),
                d.len()
            )));
        }
        let labels = d.examples().labels();
        let mut keyed: Vec<(f64, usize, usize)> = Vec::with_capacity(d.len());
        for class in 0..ds.n_classes() {
            let mut members: Vec<usize> = (0..d.len()).filter(|&i| labels[i] == class).collect();
            members.shuffle(&mut rng);
            let size = members.len() as f64;
            for (rank, idx) in members.into_iter().enumerate() {
                keyed.push(((rank as f64 + 0.5) / size, class, idx));
            }
        }
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let order: Vec<usize> = keyed.into_iter().map(|(_, _, i)| i).collect();
        let (n_train, n_val, _) = split_sizes(d.len());
        train.push(d.subset(&order[..n_train]));
        val.push(d.subset(&order[n_train..n_train + n_val]));
        test.push(d.subset(&order[n_train + n_val..]));
    }
    Ok(InDomainSplit {
        train: ds.with_domains(train),
        val: ds.with_domains(val),
        test: ds.with_domains(test),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_rotated_domains;

    #[test]
    fn leave_one_out_keeps_order() {
        let ds = make_rotated_domains(4, 20, 30.0, 0.3, 0).unwrap();
        let (src, tgt) = leave_one_out_split(&ds, 2).unwrap();
        let ids: Vec<usize> = src.domains().iter().map(|d| d.id()).collect();
        assert_eq!(ids, vec![0, 1, 3]);
        assert_eq!(&tgt, &ds.domains()[2]);
        assert!(matches!(
            leave_one_out_split(&ds, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn two_domains_leave_one_source() {
        let ds = make_rotated_domains(2, 20, 30.0, 0.3, 0).unwrap();
        let (src, tgt) = leave_one_out_split(&ds, 0).unwrap();
        assert_eq!(src.n_domains(), 1);
        assert_eq!(src.domains()[0].id(), 1);
        assert_eq!(tgt.id(), 0);
    }

    #[test]
    fn sixty_twenty_twenty() {
        let ds = make_rotated_domains(2, 100, 30.0, 0.3, 0).unwrap();
        let s = in_domain_split(&ds, 3).unwrap();
        for k in 0..2 {
            assert_eq!(s.train.domains()[k].len(), 60);
            assert_eq!(s.val.domains()[k].len(), 20);
            assert_eq!(s.test.domains()[k].len(), 20);
            // stratified: 50/50 labels stay 50/50
            let ones = s.val.domains()[k]
                .examples()
                .labels()
                .iter()
                .filter(|&&y| y == 1)
                .count();
            assert_eq!(ones, 10);
        }
        assert_eq!(s, in_domain_split(&ds, 3).unwrap());
        assert_ne!(s, in_domain_split(&ds, 4).unwrap());
    }

    #[test]
    fn small_domains_are_rejected() {
        let ds = make_rotated_domains(2, 4, 30.0, 0.3, 0).unwrap();
        assert!(in_domain_split(&ds, 0).is_err());
    }
}
