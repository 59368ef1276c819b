//! Insertion-ordered running sums keyed by an input vector.

use std::collections::HashMap;

use super::fingerprint;

/// For each distinct key vector: how often it was seen and the sum of the
/// values recorded with it.
#[derive(Clone, Debug, Default)]
pub(crate) struct Accumulator {
    index: HashMap<Vec<u64>, usize>,
    pub(crate) entries: Vec<(Vec<f64>, f64, Vec<f64>)>,
}

impl Accumulator {
    pub(crate) fn add(&mut self, key: &[f64], weight: f64, value: &[f64]) {
        let fp = fingerprint(key);
        match self.index.get(&fp) {
            Some(&i) => {
                let e = &mut self.entries[i];
                e.1 += weight;
                for (s, v) in e.2.iter_mut().zip(value) {
                    *s += weight * v;
                }
            }
            None => {
                self.index.insert(fp, self.entries.len());
                self.entries
                    .push((key.to_vec(), weight, value.iter().map(|v| weight * v).collect()));
            }
        }
    }

    pub(crate) fn clear(&mut self) {
        self.index.clear();
        self.entries.clear();
    }

    /// `(key, weight, mean value)` per entry.
    pub(crate) fn means(&self) -> impl Iterator<Item = (&[f64], f64, Vec<f64>)> + '_ {
        self.entries
            .iter()
            .map(|(k, w, s)| (k.as_slice(), *w, s.iter().map(|v| v / w).collect()))
    }
}
