//! k-ary incidence coding (kIC).
//!
//! A kIC query shows `k` items and asks the worker to group the ones that
//! share a label. The answer is a set partition of the `k` items into at most
//! `N` unlabeled blocks. Partitions are stored as restricted-growth strings:
//! item 0 is always in block 0 and every new block gets the next free index,
//! so two responses are equal exactly when their strings are equal.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest arity accepted by the closed-form spammer error.
pub const MAX_CLOSED_FORM_ARITY: usize = 100;

/// Largest arity accepted by the exhaustive spammer-error oracle.
pub const MAX_BRUTEFORCE_ARITY: usize = 16;

/// A partition of a query's items, in restricted-growth form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern(Vec<u8>);

impl Pattern {
    /// Canonical partition induced by grouping equal labels.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Self {
        let mut firsts: Vec<&T> = Vec::new();
        let blocks = labels
            .iter()
            .map(|label| match firsts.iter().position(|f| *f == label) {
                Some(b) => b as u8,
                None => {
                    firsts.push(label);
                    (firsts.len() - 1) as u8
                }
            })
            .collect();
        Pattern(blocks)
    }

    pub fn blocks(&self) -> &[u8] {
        &self.0
    }

    /// Number of items in the query.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn block_count(&self) -> usize {
        self.0.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
    }

    /// Bitmask with bit `i` set when item `i` sits in block 1. Only
    /// meaningful for partitions with at most two blocks.
    fn as_binary_mask(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |mask, (i, &b)| mask | (u32::from(b == 1) << i))
    }
}

/// Block notation with 1-based items, e.g. `{12|3}`. Items are comma
/// separated once `k` reaches 10.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.len() >= 10 { "," } else { "" };
        let groups: Vec<String> = (0..self.block_count())
            .map(|b| {
                self.0
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x as usize == b)
                    .map(|(i, _)| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect();
        write!(f, "{{{}}}", groups.join("|"))
    }
}

fn check_arity(k: usize, clusters: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k", "a query needs at least one item"));
    }
    if clusters < 2 {
        return Err(Error::invalid("clusters", format!("{clusters} < 2")));
    }
    if clusters > u8::MAX as usize + 1 {
        return Err(Error::invalid("clusters", "at most 256 clusters supported"));
    }
    Ok(())
}

/// All partitions of `k` items into at most `clusters` nonempty blocks, in
/// lexicographic order of their restricted-growth strings.
pub fn enumerate_valid_responses(k: usize, clusters: usize) -> Result<Vec<Pattern>> {
    check_arity(k, clusters)?;
    let mut out = Vec::new();
    let mut current = vec![0u8; k];
    extend_rgs(&mut current, 1, 1, clusters, &mut out);
    Ok(out)
}

fn extend_rgs(current: &mut [u8], pos: usize, used: usize, max: usize, out: &mut Vec<Pattern>) {
    if pos == current.len() {
        out.push(Pattern(current.to_vec()));
        return;
    }
    for b in 0..(used + 1).min(max) {
        current[pos] = b as u8;
        extend_rgs(current, pos + 1, used.max(b + 1), max, out);
    }
}

/// `Σ_{j=1..N} S(k, j)` via the Stirling recurrence. `None` on overflow.
pub fn valid_response_count(k: usize, clusters: usize) -> Option<u128> {
    // row[j] = S(i, j)
    let mut row = vec![0u128; clusters + 1];
    row[0] = 1;
    for _ in 0..k {
        for j in (1..=clusters).rev() {
            row[j] = (j as u128)
                .checked_mul(row[j])?
                .checked_add(row[j - 1])?;
        }
        row[0] = 0;
    }
    row[1..].iter().try_fold(0u128, |acc, &s| acc.checked_add(s))
}

/// A k-ary incidence code over `N` clusters with its valid response set.
#[derive(Debug, Clone, PartialEq)]
pub struct KicCode {
    k: usize,
    clusters: usize,
    responses: Vec<Pattern>,
}

impl KicCode {
    pub fn new(k: usize, clusters: usize) -> Result<Self> {
        let responses = enumerate_valid_responses(k, clusters)?;
        Ok(KicCode {
            k,
            clusters,
            responses,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn responses(&self) -> &[Pattern] {
        &self.responses
    }

    /// Number of choices `M` a worker has when answering a query.
    pub fn response_count(&self) -> usize {
        self.responses.len()
    }

    pub fn index_of(&self, pattern: &Pattern) -> Option<usize> {
        self.responses.binary_search(pattern).ok()
    }

    /// Partition induced by the true labels of the query's items.
    pub fn encode(&self, labels: &[usize]) -> Result<Pattern> {
        if labels.len() != self.k {
            return Err(Error::invalid(
                "labels",
                format!("expected {} labels, got {}", self.k, labels.len()),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= self.clusters) {
            return Err(Error::SymbolOutOfRange {
                symbol: bad,
                size: self.clusters,
            });
        }
        Ok(Pattern::from_labels(labels))
    }
}

/// Free-function form of [`KicCode::encode`].
pub fn encode_query(labels: &[usize], code: &KicCode) -> Result<Pattern> {
    code.encode(labels)
}

/// One kIC query: the shown items and the response a hammer would give.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KicQuery {
    pub item_ids: Vec<usize>,
    pub true_pattern: Pattern,
}

impl KicQuery {
    pub fn new(item_ids: Vec<usize>, labels: &[usize], code: &KicCode) -> Result<Self> {
        for (i, a) in item_ids.iter().enumerate() {
            if *a >= labels.len() {
                return Err(Error::SymbolOutOfRange {
                    symbol: *a,
                    size: labels.len(),
                });
            }
            if item_ids[..i].contains(a) {
                return Err(Error::invalid("item_ids", format!("item {a} repeated")));
            }
        }
        let query_labels: Vec<usize> = item_ids.iter().map(|&i| labels[i]).collect();
        let true_pattern = code.encode(&query_labels)?;
        Ok(KicQuery {
            item_ids,
            true_pattern,
        })
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Probability that a spammer's kIC response mislabels an item, for binary
/// labels and a uniform dataset.
///
/// For odd `k` this is `Σ_{i ≤ (k−1)/2} i·C(k,i) / (k·2^(k−1))`; even `k`
/// adds `(k/4)·C(k, k/2)` inside the sum.
pub fn spammer_error_prob(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid("k", format!("{k} < 2")));
    }
    if k > MAX_CLOSED_FORM_ARITY {
        return Err(Error::invalid(
            "k",
            format!("{k} exceeds {MAX_CLOSED_FORM_ARITY}"),
        ));
    }
    let kk = k as u128;
    // Scaled by 4 so the even-k term stays integral.
    let mut numerator: u128 = (0..=(kk - 1) / 2).map(|i| 4 * i * binomial(kk, i)).sum();
    if k.is_multiple_of(2) {
        numerator += kk * binomial(kk, kk / 2);
    }
    let denominator = 4.0 * kk as f64 * 2f64.powi(k as i32 - 1);
    Ok(numerator as f64 / denominator)
}

/// Exhaustive counterpart of [`spammer_error_prob`].
///
/// Averages over every (true response, spammer response) pair of the binary
/// kIC code with weight `1/M²`, scoring each pair by the fraction of items
/// mislabeled under the better of the two label alignments.
pub fn spammer_error_prob_bruteforce(k: usize) -> Result<f64> {
    if !(2..=MAX_BRUTEFORCE_ARITY).contains(&k) {
        return Err(Error::invalid(
            "k",
            format!("exhaustive oracle supports 2..={MAX_BRUTEFORCE_ARITY}, got {k}"),
        ));
    }
    let masks: Vec<u32> = enumerate_valid_responses(k, 2)?
        .iter()
        .map(Pattern::as_binary_mask)
        .collect();
    let k32 = k as u32;
    let mut total: u64 = 0;
    for &u in &masks {
        for &v in &masks {
            let w = (u ^ v).count_ones();
            total += u64::from(w.min(k32 - w));
        }
    }
    let m = masks.len() as f64;
    Ok(total as f64 / (k as f64 * m * m))
}

/// Fewest item mismatches between `truth` and `response` over all
/// injective assignments of response blocks to labels.
pub fn min_mismatch(response: &Pattern, truth: &[usize], n_labels: usize) -> usize {
    let mut best = usize::MAX;
    for_each_assignment(response.block_count(), n_labels, |assign| {
        best = best.min(mismatches(response, truth, assign));
    });
    best
}

/// Labels a query's items from `response` using a minimum-mismatch
/// assignment of blocks to labels; ties are broken uniformly at random.
pub fn decode_aligned<R: Rng + ?Sized>(
    response: &Pattern,
    truth: &[usize],
    n_labels: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut best = usize::MAX;
    let mut ties: Vec<Vec<usize>> = Vec::new();
    for_each_assignment(response.block_count(), n_labels, |assign| {
        let cost = mismatches(response, truth, assign);
        if cost < best {
            best = cost;
            ties.clear();
        }
        if cost == best {
            ties.push(assign.to_vec());
        }
    });
    let chosen = &ties[rng.gen_range(0..ties.len())];
    response.0.iter().map(|&b| chosen[b as usize]).collect()
}

fn mismatches(response: &Pattern, truth: &[usize], assign: &[usize]) -> usize {
    response
        .0
        .iter()
        .zip(truth)
        .filter(|(&b, &t)| assign[b as usize] != t)
        .count()
}

fn for_each_assignment(blocks: usize, labels: usize, mut visit: impl FnMut(&[usize])) {
    fn recurse(
        assign: &mut Vec<usize>,
        used: &mut [bool],
        blocks: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if assign.len() == blocks {
            visit(assign);
            return;
        }
        for label in 0..used.len() {
            if !used[label] {
                used[label] = true;
                assign.push(label);
                recurse(assign, used, blocks, visit);
                assign.pop();
                used[label] = false;
            }
        }
    }
    let mut used = vec![false; labels];
    recurse(&mut Vec::with_capacity(blocks), &mut used, blocks, &mut visit);
}
