//! Synthetic multi-domain classification data and the split/batching
//! protocol used by the harness.

mod batching;
mod csv_io;
mod dataset;
mod split;
mod synth;

pub use batching::{balanced_minibatch, rng_from_seed, RngState};
pub use csv_io::{read_csv, write_csv};
pub use dataset::{Domain, MultiDomainDataset, Provenance};
pub use split::{in_domain_split, leave_one_out_split, InDomainSplit};
pub use synth::make_rotated_domains;
