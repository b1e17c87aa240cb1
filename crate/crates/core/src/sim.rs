//! Monte Carlo crowdsourcing simulation.
//!
//! One trial draws a labeled dataset, spreads every item over exactly `R′`
//! non-adaptive queries, lets an independently drawn worker answer each
//! query, decodes, and scores the per-item Hamming error. Trials use
//! independent ChaCha streams derived from the configured seed, so a run is
//! bit-for-bit reproducible regardless of how trials are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{kic_rate_threshold, spammer_error_for_arity, RateBound};
use crate::error::{check_probability, Error, Result};
use crate::kic::{decode_aligned, spammer_error_prob, valid_response_count, KicCode, Pattern};
use crate::source::SourceModel;
use crate::worker::{draw_worker_state, MscChannel, SkillPopulation, WorkerState};

/// Trials needed before a confidence interval is reported.
pub const MIN_TRIALS_FOR_CI: u32 = 8;

/// Largest valid-response set the engine will enumerate.
pub const MAX_RESPONSE_SET: u128 = 1 << 20;

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkerModel {
    SpammerHammer { hammer_prob: f64 },
    Msc { population: SkillPopulation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    /// Knows every worker's state; errs only on items seen by spammers alone.
    Oracle,
    /// Plurality over direct label answers.
    Majority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_items: usize,
    pub source: SourceModel,
    pub code_k: usize,
    /// `R′`: number of queries each item appears in. The rate is `R′/k`.
    pub queries_per_item: u32,
    pub worker_model: WorkerModel,
    pub decoder: Decoder,
    pub seed: u64,
    pub n_trials: u32,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.code_k == 0 {
            return Err(Error::invalid("k", "a query needs at least one item"));
        }
        if self.n_items < self.code_k {
            return Err(Error::invalid(
                "n_items",
                format!("{} items cannot fill a {}-item query", self.n_items, self.code_k),
            ));
        }
        if self.queries_per_item == 0 {
            return Err(Error::invalid("queries_per_item", "must be at least 1"));
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.source.n_labels() < 2 {
            return Err(Error::invalid("source", "needs at least two labels"));
        }
        match &self.worker_model {
            WorkerModel::SpammerHammer { hammer_prob } => {
                check_probability("q", *hammer_prob)?;
            }
            WorkerModel::Msc { .. } => {}
        }
        if self.code_k > 1 {
            match valid_response_count(self.code_k, self.source.n_labels()) {
                Some(c) if c <= MAX_RESPONSE_SET => {}
                _ => {
                    return Err(Error::invalid(
                        "k",
                        format!("more than {MAX_RESPONSE_SET} valid responses"),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Queries per item, `R′/k`.
    pub fn rate(&self) -> f64 {
        f64::from(self.queries_per_item) / self.code_k as f64
    }

    pub fn hammer_prob(&self) -> Option<f64> {
        match self.worker_model {
            WorkerModel::SpammerHammer { hammer_prob } => Some(hammer_prob),
            WorkerModel::Msc { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    /// Mean per-item error over all trials.
    pub empirical_error: f64,
    /// Standard error of `empirical_error` from the spread across trials.
    pub std_error: Option<f64>,
    /// 95% normal-approximation half-width.
    pub ci_halfwidth: Option<f64>,
    pub analytic_prediction: Option<f64>,
    pub rate_used: f64,
    pub queries_per_item: u32,
    pub code_k: usize,
    pub hammer_prob: Option<f64>,
    pub n_items: usize,
    pub n_trials: u32,
    /// Unscored padding items added so every query is full.
    pub filler_items: usize,
    pub seed: u64,
}

impl SimulationReport {
    /// Standard error used by [`Self::agrees_with_prediction`]. Falls back to
    /// the binomial value at the predicted error for single-trial runs.
    pub fn estimator_sigma(&self) -> Option<f64> {
        self.std_error.or_else(|| {
            self.analytic_prediction.map(|p| {
                let decodings = self.n_items as f64 * f64::from(self.n_trials);
                (p * (1.0 - p) / decodings).sqrt()
            })
        })
    }

    /// `|empirical − analytic| ≤ sigmas · σ`; `None` without a prediction.
    pub fn agrees_with_prediction(&self, sigmas: f64) -> Option<bool> {
        let predicted = self.analytic_prediction?;
        let sigma = self.estimator_sigma()?;
        Some((self.empirical_error - predicted).abs() <= sigmas * sigma)
    }
}

/// Result of [`assign_queries`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAssignment {
    /// Item ids per query. Ids at or above `n_items` are fillers.
    pub queries: Vec<Vec<usize>>,
    pub n_items: usize,
    pub filler_items: usize,
}

/// Draws `n_items` iid labels from `source`.
pub fn generate_dataset<R: Rng + ?Sized>(
    n_items: usize,
    source: &SourceModel,
    rng: &mut R,
) -> Vec<usize> {
    let sampler = source.sampler();
    (0..n_items).map(|_| sampler.sample(rng)).collect()
}

/// Builds `n_items · R′ / k` queries of `k` distinct items in which every
/// item appears exactly `R′` times.
///
/// When `n_items · R′` is not a multiple of `k`, up to `k − 1` filler items
/// (ids `n_items..`) each appear once to complete the last queries.
pub fn assign_queries<R: Rng + ?Sized>(
    n_items: usize,
    k: usize,
    queries_per_item: u32,
    rng: &mut R,
) -> Result<QueryAssignment> {
    if k == 0 {
        return Err(Error::invalid("k", "a query needs at least one item"));
    }
    if n_items < k {
        return Err(Error::invalid(
            "n_items",
            format!("{n_items} items cannot fill a {k}-item query"),
        ));
    }
    if queries_per_item == 0 {
        return Err(Error::invalid("queries_per_item", "must be at least 1"));
    }
    let rounds = queries_per_item as usize;
    let filler_items = (k - (n_items * rounds) % k) % k;
    let mut slots = Vec::with_capacity(n_items * rounds + filler_items);
    let mut order: Vec<usize> = (0..n_items).collect();
    for _ in 0..rounds {
        order.shuffle(rng);
        slots.extend_from_slice(&order);
    }
    slots.extend(n_items..n_items + filler_items);

    let mut queries: Vec<Vec<usize>> = slots.chunks(k).map(<[usize]>::to_vec).collect();
    repair_duplicates(&mut queries, rng)?;
    Ok(QueryAssignment {
        queries,
        n_items,
        filler_items,
    })
}

/// Round boundaries can put one item twice in a query; swap such entries
/// with entries of other queries until every query is duplicate free.
fn repair_duplicates<R: Rng + ?Sized>(queries: &mut [Vec<usize>], rng: &mut R) -> Result<()> {
    let n_queries = queries.len();
    for qi in 0..n_queries {
        while let Some(pos) = duplicate_position(&queries[qi]) {
            let item = queries[qi][pos];
            let start = rng.gen_range(0..n_queries);
            let swap = (0..n_queries)
                .map(|off| (start + off) % n_queries)
                .filter(|&qj| qj != qi && !queries[qj].contains(&item))
                .find_map(|qj| {
                    queries[qj]
                        .iter()
                        .position(|other| !queries[qi].contains(other))
                        .map(|pj| (qj, pj))
                });
            let Some((qj, pj)) = swap else {
                return Err(Error::invalid(
                    "queries_per_item",
                    "could not build a query assignment with distinct items",
                ));
            };
            let other = queries[qj][pj];
            queries[qj][pj] = item;
            queries[qi][pos] = other;
        }
    }
    Ok(())
}

fn duplicate_position(query: &[usize]) -> Option<usize> {
    (1..query.len()).find(|&i| query[..i].contains(&query[i]))
}

/// Seed for grid point `index` of a sweep started from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // SplitMix64 finaliser over a golden-ratio stride.
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(trial));
    rng
}

fn summarize(cfg: &SimConfig, errors: &[f64], filler_items: usize, analytic: Option<f64>) -> SimulationReport {
    let trials = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / trials;
    let std_error = (errors.len() >= 2).then(|| {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1.0);
        (var / trials).sqrt()
    });
    let ci_halfwidth = if cfg.n_trials >= MIN_TRIALS_FOR_CI {
        std_error.map(|s| Z_95 * s)
    } else {
        None
    };
    SimulationReport {
        empirical_error: mean,
        std_error,
        ci_halfwidth,
        analytic_prediction: analytic,
        rate_used: cfg.rate(),
        queries_per_item: cfg.queries_per_item,
        code_k: cfg.code_k,
        hammer_prob: cfg.hammer_prob(),
        n_items: cfg.n_items,
        n_trials: cfg.n_trials,
        filler_items,
        seed: cfg.seed,
    }
}

fn filler_count(cfg: &SimConfig) -> usize {
    let slots = cfg.n_items * cfg.queries_per_item as usize;
    (cfg.code_k - slots % cfg.code_k) % cfg.code_k
}

/// Predicted oracle error `ε̄ · (1 − q)^(R′)`: `ε̄ = ε̄_S(k)` for binary
/// kIC and `(N−1)/N` for direct queries.
pub fn oracle_prediction(cfg: &SimConfig) -> Option<f64> {
    let q = cfg.hammer_prob()?;
    let n = cfg.source.n_labels();
    let spam = match cfg.code_k {
        1 => 1.0 - 1.0 / n as f64,
        k if n == 2 => spammer_error_prob(k).ok()?,
        _ => return None,
    };
    Some(spam * (1.0 - q).powi(cfg.queries_per_item as i32))
}

/// Oracle-decoder simulation under `SHC(q)`.
///
/// An item with at least one hammer among its `R′` queries is decoded
/// correctly. Otherwise one of its spammer queries is picked uniformly and
/// the item takes the label that query's random response assigns it under
/// the minimum-mismatch alignment with the truth.
pub fn run_oracle_decoder_sim(cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    if cfg.decoder != Decoder::Oracle {
        return Err(Error::ConfigMismatch("expected the oracle decoder".into()));
    }
    let Some(hammer_prob) = cfg.hammer_prob() else {
        return Err(Error::ConfigMismatch(
            "the oracle decoder needs a spammer-hammer worker model".into(),
        ));
    };
    let code = if cfg.code_k > 1 {
        Some(KicCode::new(cfg.code_k, cfg.source.n_labels())?)
    } else {
        None
    };
    let errors = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| oracle_trial(cfg, hammer_prob, code.as_ref(), &mut trial_rng(cfg.seed, t)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(cfg, &errors, filler_count(cfg), oracle_prediction(cfg)))
}

fn oracle_trial(
    cfg: &SimConfig,
    hammer_prob: f64,
    code: Option<&KicCode>,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let n = cfg.n_items;
    let k = cfg.code_k;
    let r = cfg.queries_per_item as usize;
    let n_labels = cfg.source.n_labels();
    let assignment = assign_queries(n, k, cfg.queries_per_item, rng)?;
    let labels = generate_dataset(n + assignment.filler_items, &cfg.source, rng);
    let states: Vec<WorkerState> = assignment
        .queries
        .iter()
        .map(|_| draw_worker_state(hammer_prob, rng))
        .collect();

    // (query, position) of every appearance, R′ consecutive entries per item.
    let mut seen = vec![0usize; n];
    let mut appearances = vec![(0usize, 0usize); n * r];
    for (qi, query) in assignment.queries.iter().enumerate() {
        for (pos, &item) in query.iter().enumerate() {
            if item < n {
                appearances[item * r + seen[item]] = (qi, pos);
                seen[item] += 1;
            }
        }
    }

    let mut decoded: Vec<Option<Vec<usize>>> = vec![None; assignment.queries.len()];
    let mut wrong = 0usize;
    for item in 0..n {
        let mine = &appearances[item * r..(item + 1) * r];
        if mine.iter().any(|&(qi, _)| states[qi] == WorkerState::Hammer) {
            continue;
        }
        let (qi, pos) = mine[rng.gen_range(0..r)];
        let answer = decoded[qi].get_or_insert_with(|| {
            let query = &assignment.queries[qi];
            match code {
                None => vec![rng.gen_range(0..n_labels)],
                Some(code) => {
                    let response: &Pattern =
                        &code.responses()[rng.gen_range(0..code.response_count())];
                    let truth: Vec<usize> = query.iter().map(|&i| labels[i]).collect();
                    decode_aligned(response, &truth, n_labels, rng)
                }
            }
        });
        if answer[pos] != labels[item] {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / n as f64)
}

/// Majority voting over direct (`k = 1`) label queries answered by MSC
/// workers whose skill is drawn fresh from the population for every query.
/// Ties are broken uniformly at random.
pub fn run_majority_vote_sim(cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    if cfg.decoder != Decoder::Majority {
        return Err(Error::ConfigMismatch("expected the majority decoder".into()));
    }
    if cfg.code_k != 1 {
        return Err(Error::invalid(
            "k",
            "majority voting is only defined for direct (k = 1) queries",
        ));
    }
    let WorkerModel::Msc { population } = &cfg.worker_model else {
        return Err(Error::ConfigMismatch(
            "majority voting needs an MSC worker population".into(),
        ));
    };
    let errors: Vec<f64> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| majority_trial(cfg, population, &mut trial_rng(cfg.seed, t)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(cfg, &errors, 0, majority_prediction(cfg)))
}

/// Binomial-tail error of plurality voting with random tie-breaks on a
/// binary source: every answer is flipped independently with the
/// population's mean skill. `None` for non-binary sources or non-MSC models.
pub fn majority_prediction(cfg: &SimConfig) -> Option<f64> {
    let WorkerModel::Msc { population } = &cfg.worker_model else {
        return None;
    };
    if cfg.source.n_labels() != 2 || cfg.code_k != 1 {
        return None;
    }
    let eps = population.mean_skill();
    let r = cfg.queries_per_item;
    let mut total = 0.0;
    let mut binom = 1.0f64;
    for j in 0..=r {
        if j > 0 {
            binom *= f64::from(r - j + 1) / f64::from(j);
        }
        let mass = binom * eps.powi(j as i32) * (1.0 - eps).powi((r - j) as i32);
        match (2 * j).cmp(&r) {
            std::cmp::Ordering::Greater => total += mass,
            std::cmp::Ordering::Equal => total += 0.5 * mass,
            std::cmp::Ordering::Less => {}
        }
    }
    Some(total)
}

fn majority_trial(
    cfg: &SimConfig,
    population: &SkillPopulation,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let n_labels = cfg.source.n_labels();
    let labels = generate_dataset(cfg.n_items, &cfg.source, rng);
    let mut votes = vec![0u32; n_labels];
    let mut leaders = Vec::with_capacity(n_labels);
    let mut wrong = 0usize;
    for &truth in &labels {
        votes.iter_mut().for_each(|v| *v = 0);
        for _ in 0..cfg.queries_per_item {
            let worker = MscChannel::new(n_labels, population.sample(rng))?;
            votes[worker.sample_unchecked(truth, rng)] += 1;
        }
        let top = *votes.iter().max().unwrap_or(&0);
        leaders.clear();
        leaders.extend((0..n_labels).filter(|&l| votes[l] == top));
        let decision = leaders[rng.gen_range(0..leaders.len())];
        if decision != truth {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / cfg.n_items as f64)
}

/// Runs whichever simulation `cfg.decoder` selects.
pub fn simulate(cfg: &SimConfig) -> Result<SimulationReport> {
    match cfg.decoder {
        Decoder::Oracle => run_oracle_decoder_sim(cfg),
        Decoder::Majority => run_majority_vote_sim(cfg),
    }
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "snake_case")]
pub enum SweepAxis {
    QueriesPerItem(Vec<u32>),
    HammerProb(Vec<f64>),
    /// Target errors; each point runs at the smallest `R′` whose rate meets
    /// the kIC threshold for that target.
    TargetError(Vec<f64>),
}

impl SweepAxis {
    pub fn len(&self) -> usize {
        match self {
            SweepAxis::QueriesPerItem(v) => v.len(),
            SweepAxis::HammerProb(v) | SweepAxis::TargetError(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Smallest `R′` with `R′/k` at or above the kIC rate threshold.
pub fn queries_for_target(k: usize, hammer_prob: f64, target_error: f64) -> Result<u32> {
    match kic_rate_threshold(k, hammer_prob, target_error)? {
        RateBound::Infeasible => Err(Error::invalid(
            "target_error",
            format!("{target_error} is unreachable with q = {hammer_prob}"),
        )),
        RateBound::Feasible(rate) => {
            spammer_error_for_arity(k)?;
            let needed = (rate * k as f64 - 1e-9).ceil().max(1.0);
            if needed > f64::from(u32::MAX) {
                return Err(Error::invalid("target_error", "required R' overflows"));
            }
            Ok(needed as u32)
        }
    }
}

/// Configuration for grid point `index` of `axis`.
pub fn sweep_point(template: &SimConfig, axis: &SweepAxis, index: usize) -> Result<SimConfig> {
    let mut cfg = template.clone();
    cfg.seed = derive_seed(template.seed, index as u64);
    match axis {
        SweepAxis::QueriesPerItem(values) => cfg.queries_per_item = values[index],
        SweepAxis::HammerProb(values) => {
            cfg.worker_model = WorkerModel::SpammerHammer {
                hammer_prob: values[index],
            }
        }
        SweepAxis::TargetError(values) => {
            let q = template.hammer_prob().ok_or_else(|| {
                Error::ConfigMismatch("a target-error sweep needs a spammer-hammer model".into())
            })?;
            cfg.queries_per_item = queries_for_target(cfg.code_k, q, values[index])?;
        }
    }
    Ok(cfg)
}

/// One report per grid point, in grid order.
pub fn sweep(template: &SimConfig, axis: &SweepAxis) -> Result<Vec<SimulationReport>> {
    let configs = (0..axis.len())
        .map(|i| sweep_point(template, axis, i))
        .collect::<Result<Vec<_>>>()?;
    configs.par_iter().map(simulate).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shc_config(k: usize, q: f64, r: u32, n: usize, trials: u32) -> SimConfig {
        SimConfig {
            n_items: n,
            source: SourceModel::uniform(2).unwrap(),
            code_k: k,
            queries_per_item: r,
            worker_model: WorkerModel::SpammerHammer { hammer_prob: q },
            decoder: Decoder::Oracle,
            seed: 42,
            n_trials: trials,
        }
    }

    fn msc_config(eps: f64, r: u32, n: usize, trials: u32) -> SimConfig {
        SimConfig {
            n_items: n,
            source: SourceModel::uniform(2).unwrap(),
            code_k: 1,
            queries_per_item: r,
            worker_model: WorkerModel::Msc {
                population: SkillPopulation::single(eps).unwrap(),
            },
            decoder: Decoder::Majority,
            seed: 7,
            n_trials: trials,
        }
    }

    #[test]
    fn dataset_examples() {
        let mut rng = trial_rng(1, 0);
        let fixed = SourceModel::from_probabilities(vec![1.0, 0.0]).unwrap();
        assert!(generate_dataset(1000, &fixed, &mut rng).iter().all(|&l| l == 0));
        assert!(generate_dataset(0, &fixed, &mut rng).is_empty());
        let fair = SourceModel::uniform(2).unwrap();
        let labels = generate_dataset(1_000_000, &fair, &mut rng);
        let zeros = labels.iter().filter(|&&l| l == 0).count() as f64 / 1e6;
        assert!((zeros - 0.5).abs() < 0.0015);
    }

    fn check_regular(a: &QueryAssignment, k: usize, r: u32) {
        let mut degree = vec![0u32; a.n_items + a.filler_items];
        for q in &a.queries {
            assert_eq!(q.len(), k);
            assert!(duplicate_position(q).is_none(), "{q:?}");
            for &i in q {
                degree[i] += 1;
            }
        }
        assert!(degree[..a.n_items].iter().all(|&d| d == r));
        assert!(degree[a.n_items..].iter().all(|&d| d == 1));
        assert_eq!(a.queries.len() * k, a.n_items * r as usize + a.filler_items);
    }

    #[test]
    fn assignment_examples() {
        let mut rng = trial_rng(2, 0);
        let direct = assign_queries(5, 1, 3, &mut rng).unwrap();
        assert_eq!(direct.queries.len(), 15);
        check_regular(&direct, 1, 3);
        let triple = assign_queries(6, 3, 2, &mut rng).unwrap();
        assert_eq!(triple.queries.len(), 4);
        assert_eq!(triple.filler_items, 0);
        check_regular(&triple, 3, 2);
        assert!(assign_queries(2, 3, 1, &mut rng).is_err());
        assert!(assign_queries(5, 0, 1, &mut rng).is_err());
        assert!(assign_queries(5, 2, 0, &mut rng).is_err());
    }

    #[test]
    fn assignment_is_regular_on_small_grids() {
        for k in 1..=5 {
            for n in k..k + 7 {
                for r in 1..=5u32 {
                    for seed in 0..8 {
                        let mut rng = trial_rng(seed, 0);
                        let a = assign_queries(n, k, r, &mut rng).unwrap();
                        assert!(a.filler_items < k);
                        check_regular(&a, k, r);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_all_hammers_is_error_free() {
        for k in 1..=4 {
            let report = run_oracle_decoder_sim(&shc_config(k, 1.0, 2, 1000, 4)).unwrap();
            assert_eq!(report.empirical_error, 0.0);
            assert_eq!(report.analytic_prediction, Some(0.0));
        }
    }

    #[test]
    fn oracle_pure_spammers_match_spammer_error() {
        let report = run_oracle_decoder_sim(&shc_config(2, 0.0, 1, 100_000, 10)).unwrap();
        assert_eq!(report.analytic_prediction, Some(0.25));
        assert!(report.agrees_with_prediction(4.0).unwrap(), "{report:?}");
    }

    #[test]
    fn oracle_matches_prediction_k3() {
        let report = run_oracle_decoder_sim(&shc_config(3, 0.3, 3, 100_000, 20)).unwrap();
        let predicted = 0.25 * 0.7f64.powi(3);
        assert!((report.analytic_prediction.unwrap() - predicted).abs() < 1e-15);
        assert!((report.rate_used - 1.0).abs() < 1e-15);
        assert!(report.agrees_with_prediction(3.0).unwrap(), "{report:?}");
        assert!(report.ci_halfwidth.unwrap() > 0.0);
    }

    #[test]
    fn oracle_direct_queries() {
        let report = run_oracle_decoder_sim(&shc_config(1, 0.4, 2, 100_000, 10)).unwrap();
        let predicted = 0.5 * 0.6f64.powi(2);
        assert!((report.analytic_prediction.unwrap() - predicted).abs() < 1e-15);
        assert!(report.agrees_with_prediction(4.0).unwrap(), "{report:?}");
    }

    #[test]
    fn oracle_skewed_binary_source_keeps_prediction() {
        let mut cfg = shc_config(4, 0.2, 2, 100_000, 10);
        cfg.source = SourceModel::from_probabilities(vec![0.9, 0.1]).unwrap();
        let report = run_oracle_decoder_sim(&cfg).unwrap();
        assert!(report.agrees_with_prediction(4.0).unwrap(), "{report:?}");
    }

    #[test]
    fn oracle_multiclass_runs_without_prediction() {
        let mut cfg = shc_config(3, 0.3, 2, 5_000, 4);
        cfg.source = SourceModel::uniform(3).unwrap();
        let report = run_oracle_decoder_sim(&cfg).unwrap();
        assert_eq!(report.analytic_prediction, None);
        assert!(report.empirical_error > 0.0 && report.empirical_error < 1.0);
    }

    #[test]
    fn oracle_rejects_msc() {
        let mut cfg = msc_config(0.1, 3, 100, 2);
        cfg.decoder = Decoder::Oracle;
        assert!(matches!(
            run_oracle_decoder_sim(&cfg),
            Err(Error::ConfigMismatch(_))
        ));
    }

    #[test]
    fn majority_examples() {
        let perfect = run_majority_vote_sim(&msc_config(0.0, 3, 1000, 2)).unwrap();
        assert_eq!(perfect.empirical_error, 0.0);
        assert_eq!(perfect.analytic_prediction, Some(0.0));

        let single = run_majority_vote_sim(&msc_config(0.3, 1, 100_000, 10)).unwrap();
        let sigma = single.std_error.unwrap();
        assert!((single.empirical_error - 0.3).abs() < 4.0 * sigma);

        let five = run_majority_vote_sim(&msc_config(0.3, 5, 100_000, 10)).unwrap();
        let sigma = five.std_error.unwrap();
        assert!((five.empirical_error - 0.16308).abs() < 4.0 * sigma);
    }

    #[test]
    fn majority_prediction_is_the_binomial_tail() {
        // ε = 0.3, five votes: P(Bin(5, 0.3) ≥ 3).
        let tail: f64 = [(10.0, 3), (5.0, 4), (1.0, 5)]
            .iter()
            .map(|&(c, j)| c * 0.3f64.powi(j) * 0.7f64.powi(5 - j))
            .sum();
        let predicted = majority_prediction(&msc_config(0.3, 5, 10, 1)).unwrap();
        assert!((predicted - tail).abs() < 1e-15);
        assert!((predicted - 0.16308).abs() < 1e-12);
        // Even vote counts split ties: two votes at ε gives ε.
        let two = majority_prediction(&msc_config(0.2, 2, 10, 1)).unwrap();
        assert!((two - 0.2).abs() < 1e-15);
    }

    #[test]
    fn majority_ties_are_split() {
        // Two votes, ε = 0.5: ties half the time, broken at random.
        let report = run_majority_vote_sim(&msc_config(0.5, 2, 100_000, 10)).unwrap();
        assert!((report.empirical_error - 0.5).abs() < 4.0 * report.std_error.unwrap());
    }

    #[test]
    fn majority_rejects_kic() {
        let mut cfg = msc_config(0.1, 3, 100, 2);
        cfg.code_k = 2;
        assert_eq!(run_majority_vote_sim(&cfg).unwrap_err().field(), Some("k"));
        let mut shc = shc_config(1, 0.5, 3, 100, 2);
        shc.decoder = Decoder::Majority;
        assert!(matches!(
            run_majority_vote_sim(&shc),
            Err(Error::ConfigMismatch(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = shc_config(3, 0.5, 1, 2, 1);
        assert_eq!(cfg.validate().unwrap_err().field(), Some("n_items"));
        cfg.n_items = 10;
        cfg.n_trials = 0;
        assert_eq!(cfg.validate().unwrap_err().field(), Some("trials"));
        cfg.n_trials = 1;
        cfg.worker_model = WorkerModel::SpammerHammer { hammer_prob: 2.0 };
        assert_eq!(cfg.validate().unwrap_err().field(), Some("q"));
    }

    #[test]
    fn ci_needs_enough_trials() {
        let few = run_oracle_decoder_sim(&shc_config(2, 0.5, 1, 1000, 4)).unwrap();
        assert!(few.std_error.is_some());
        assert!(few.ci_halfwidth.is_none());
        let one = run_oracle_decoder_sim(&shc_config(2, 0.5, 1, 1000, 1)).unwrap();
        assert!(one.std_error.is_none());
        assert!(one.estimator_sigma().unwrap() > 0.0);
    }

    #[test]
    fn fillers_reported() {
        let report = run_oracle_decoder_sim(&shc_config(3, 0.5, 1, 10, 2)).unwrap();
        assert_eq!(report.filler_items, 2);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = shc_config(3, 0.3, 2, 5_000, 8);
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let mut other = cfg.clone();
        other.seed += 1;
        assert_ne!(
            simulate(&cfg).unwrap().empirical_error,
            simulate(&other).unwrap().empirical_error
        );
    }

    #[test]
    fn sweep_examples() {
        let template = shc_config(3, 0.3, 1, 5_000, 8);
        assert!(sweep(&template, &SweepAxis::QueriesPerItem(vec![])).unwrap().is_empty());
        let reports = sweep(&template, &SweepAxis::QueriesPerItem(vec![1, 2, 3])).unwrap();
        assert_eq!(reports.len(), 3);
        let predictions: Vec<f64> = reports
            .iter()
            .map(|r| r.analytic_prediction.unwrap())
            .collect();
        assert!(predictions.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(
            reports,
            sweep(&template, &SweepAxis::QueriesPerItem(vec![1, 2, 3])).unwrap()
        );
        let seeds: Vec<u64> = reports.iter().map(|r| r.seed).collect();
        assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2]);
    }

    #[test]
    fn sweep_over_hammer_prob_and_target() {
        let template = shc_config(2, 0.3, 2, 2_000, 8);
        let by_q = sweep(&template, &SweepAxis::HammerProb(vec![0.2, 0.8])).unwrap();
        assert_eq!(by_q[1].hammer_prob, Some(0.8));
        let by_target = sweep(&template, &SweepAxis::TargetError(vec![0.1, 0.01])).unwrap();
        assert!(by_target[1].queries_per_item > by_target[0].queries_per_item);
        for (r, eps) in by_target.iter().zip([0.1, 0.01]) {
            assert_eq!(r.queries_per_item, queries_for_target(2, 0.3, eps).unwrap());
        }
        let msc = msc_config(0.1, 1, 100, 2);
        assert!(sweep(&msc, &SweepAxis::TargetError(vec![0.1])).is_err());
    }

    #[test]
    fn queries_for_target_meets_threshold() {
        for k in 1..=5 {
            for &q in &[0.2, 0.5, 0.8] {
                for &eps in &[0.001, 0.01, 0.1] {
                    let r = queries_for_target(k, q, eps).unwrap();
                    let err = crate::bounds::kic_error_at_rate(k, q, f64::from(r) / k as f64).unwrap();
                    assert!(err <= eps + 1e-12, "k={k} q={q} eps={eps}");
                    if r > 1 {
                        let less = crate::bounds::kic_error_at_rate(k, q, f64::from(r - 1) / k as f64)
                            .unwrap();
                        assert!(less > eps);
                    }
                }
            }
        }
        assert!(queries_for_target(3, 0.0, 0.01).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: Vec<u64> = (0..100).map(|i| derive_seed(3, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }
}
