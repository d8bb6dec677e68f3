use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Assignment of every couple to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignments: BTreeMap<String, usize>,
}

/// Couple-grouped k-fold split.
///
/// `couple_ids` holds one entry per sequence, so repeated ids give each
/// couple its size. Couples are shuffled by `seed`, stably ordered by
/// decreasing size, and each is put into the fold with the fewest sequences
/// so far (lowest index on ties).
pub fn grouped_kfold<S: AsRef<str>>(couple_ids: &[S], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("need k >= 2 folds, got {k}")));
    }
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for c in couple_ids {
        *sizes.entry(c.as_ref()).or_default() += 1;
    }
    if sizes.len() < k {
        return Err(Error::InsufficientData(format!(
            "{} couples cannot fill {k} folds",
            sizes.len()
        )));
    }
    let mut couples: Vec<(&str, usize)> = sizes.into_iter().collect();
    couples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    couples.sort_by_key(|c| std::cmp::Reverse(c.1));

    let mut load = vec![0usize; k];
    let mut assignments = BTreeMap::new();
    for (couple, size) in couples {
        let fold = (0..k).min_by_key(|&f| (load[f], f)).expect("k >= 2");
        load[fold] += size;
        assignments.insert(couple.to_string(), fold);
    }
    Ok(FoldPlan { k, assignments })
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &BTreeMap<String, usize> {
        &self.assignments
    }

    pub fn fold_of(&self, couple: &str) -> Option<usize> {
        self.assignments.get(couple).copied()
    }

    pub fn couples_in(&self, fold: usize) -> Vec<&str> {
        self.assignments
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// (train, test) positions into `couple_ids` for one fold.
    pub fn split<S: AsRef<str>>(&self, couple_ids: &[S], fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, c) in couple_ids.iter().enumerate() {
            match self.fold_of(c.as_ref()) {
                Some(f) if f == fold => test.push(i),
                Some(_) => train.push(i),
                None => {}
            }
        }
        (train, test)
    }
}
