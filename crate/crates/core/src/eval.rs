//! Repairability curves and worst-case survival.
//!
//! Four estimators are provided:
//!
//! * [`estimate_curve_mc`]: survival of a policy over random fault
//!   sequences. Each trial draws one length-`f_max` sequence and records how
//!   many faults it survived; `RE(f)` is the fraction of trials that got at
//!   least `f` faults in, so the curve is monotone by construction.
//! * [`exact_curve_policy`]: every one of the `|N_U|^f` sequences under a
//!   deterministic policy. Decisions depend only on which spares are
//!   consumed, so the enumeration is memoized on that set.
//! * [`exact_curve_offline`]: the offline optimum. A fault multiset is
//!   repairable iff its occurrences can be matched to distinct adjacent
//!   spares, independent of order, so multisets are enumerated once and
//!   weighted by their number of orderings.
//! * [`adversarial_survival`]: the longest prefix length every sequence
//!   survives.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::SpareNetwork;
use crate::policy::{select_spare, Policy};
use crate::repair::{FaultSequence, OccurrenceMatcher};
use crate::rng::{derive_seed, Stream};
use crate::scalar::{ci95_half_width, FloatScalar, Scalar};
use crate::state::SystemState;

/// Default cap on visited enumeration nodes.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

pub const CSV_HEADER: &str = "f,repairability,ci95,trials,estimator";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    McPolicy,
    ExactPolicy,
    ExactOffline,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::McPolicy => "mc_policy",
            Estimator::ExactPolicy => "exact_policy",
            Estimator::ExactOffline => "exact_offline",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint<T> {
    pub f: usize,
    pub repairability: T,
    pub ci_half_width: T,
    /// Samples behind the point: trials for Monte Carlo, sequences for
    /// exact estimators (saturating).
    pub trials: u64,
}

/// Repairability indexed by fault count, starting at `f = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<T> {
    pub points: Vec<CurvePoint<T>>,
    pub estimator: Estimator,
}

impl<T: Scalar> Curve<T> {
    pub fn f_max(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn value(&self, f: usize) -> Option<&T> {
        self.points.get(f).map(|p| &p.repairability)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.points.iter().map(|p| &p.repairability)
    }

    /// Consecutive `f` from 0, `RE(0) = 1`, values in `[0, 1]`, non-increasing.
    pub fn is_well_formed(&self) -> bool {
        let consecutive = self.points.iter().enumerate().all(|(i, p)| p.f == i);
        let starts_at_one = self.points.first().is_none_or(|p| p.repairability == T::one());
        let bounded = self
            .values()
            .all(|v| *v >= T::zero() && *v <= T::one());
        let monotone = self
            .points
            .windows(2)
            .all(|w| w[1].repairability <= w[0].repairability);
        consecutive && starts_at_one && bounded && monotone
    }

    /// Whether the curve respects the structural points of `net`: exactly
    /// one up to the minimum unit degree and zero past the spare count.
    pub fn respects_structure(&self, net: &SpareNetwork) -> bool {
        let (hundred, zero) = structural_points(net);
        self.points.iter().all(|p| {
            (p.f > hundred || p.repairability == T::one())
                && (p.f < zero || p.repairability == T::zero())
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.f,
                p.repairability.to_f64(),
                p.ci_half_width.to_f64(),
                p.trials,
                self.estimator.name()
            );
        }
        out
    }

    fn from_counts(estimator: Estimator, counts: &[u128], denominators: &[u128]) -> Self {
        let points = counts
            .iter()
            .zip(denominators)
            .enumerate()
            .map(|(f, (&c, &d))| CurvePoint {
                f,
                repairability: T::from_counts(c, d),
                ci_half_width: T::zero(),
                trials: u64::try_from(d).unwrap_or(u64::MAX),
            })
            .collect();
        Curve { points, estimator }
    }
}

/// Raw Monte Carlo tallies for one (network, policy) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurvivalSample {
    pub trials: u64,
    /// `at_least[f]` = trials that survived at least `f` faults.
    pub at_least: Vec<u64>,
    /// Spare choices made across all trials.
    pub decisions: u64,
    /// Decisions where the first ranking stage left several candidates.
    pub primary_ties: u64,
    /// Decisions settled by the tie-break mode.
    pub final_ties: u64,
}

impl SurvivalSample {
    fn empty(f_max: usize) -> Self {
        SurvivalSample {
            trials: 0,
            at_least: vec![0; f_max + 1],
            decisions: 0,
            primary_ties: 0,
            final_ties: 0,
        }
    }

    fn merge(mut self, other: SurvivalSample) -> Self {
        self.trials += other.trials;
        for (a, b) in self.at_least.iter_mut().zip(other.at_least) {
            *a += b;
        }
        self.decisions += other.decisions;
        self.primary_ties += other.primary_ties;
        self.final_ties += other.final_ties;
        self
    }

    pub fn curve<T: FloatScalar>(&self) -> Curve<T> {
        let n = T::from(self.trials).unwrap();
        let points = self
            .at_least
            .iter()
            .enumerate()
            .map(|(f, &c)| {
                let p = T::from(c).unwrap() / n;
                CurvePoint {
                    f,
                    repairability: p,
                    ci_half_width: ci95_half_width(p, self.trials),
                    trials: self.trials,
                }
            })
            .collect();
        Curve {
            points,
            estimator: Estimator::McPolicy,
        }
    }
}

/// Seeds of the fault and tie-break streams of one trial. The fault stream
/// does not depend on the policy, so every policy sees the same sequences.
fn trial_streams(seed: u64, trial: u64) -> (Stream, Stream) {
    let base = derive_seed(seed, trial);
    (Stream::derive(base, 0), Stream::derive(base, 1))
}

/// The fault sequence trial `trial` of a run seeded with `seed` uses.
pub fn trial_sequence(net: &SpareNetwork, f_max: usize, seed: u64, trial: u64) -> FaultSequence {
    let (mut faults, _) = trial_streams(seed, trial);
    FaultSequence::random(net, f_max, &mut faults)
}

/// Runs `trials` random sequences of length `f_max` under `policy`.
///
/// Trial `i` depends only on `(seed, i)`, and tallies are integer sums, so
/// the result is identical for any thread pool size.
pub fn mc_survival(
    net: &SpareNetwork,
    policy: &Policy,
    f_max: usize,
    trials: u64,
    seed: u64,
) -> Result<SurvivalSample> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let n_units = net.n_units();
    let sample = (0..trials)
        .into_par_iter()
        .fold(
            || (SystemState::new(net), SurvivalSample::empty(f_max)),
            |(mut state, mut acc), trial| {
                state.reset();
                let (mut faults, mut ties) = trial_streams(seed, trial);
                let mut survived = 0;
                for _ in 0..f_max {
                    let unit = faults.below(n_units);
                    match select_spare(&state, unit, policy, &mut ties) {
                        Ok(d) => {
                            acc.decisions += 1;
                            acc.primary_ties += u64::from(d.tie_after_primary);
                            acc.final_ties += u64::from(policy.kind.needed_tiebreak(&d));
                            state
                                .apply_repair(unit, d.chosen_spare)
                                .expect("selected spare is live");
                            survived += 1;
                        }
                        Err(_) => break,
                    }
                }
                acc.trials += 1;
                for slot in &mut acc.at_least[..=survived] {
                    *slot += 1;
                }
                (state, acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(|| SurvivalSample::empty(f_max), SurvivalSample::merge);
    Ok(sample)
}

/// Monte Carlo repairability curve for `f = 0..=f_max` with 95% normal
/// half-widths.
pub fn estimate_curve_mc<T: FloatScalar>(
    net: &SpareNetwork,
    policy: &Policy,
    f_max: usize,
    trials: u64,
    seed: u64,
) -> Result<Curve<T>> {
    Ok(mc_survival(net, policy, f_max, trials, seed)?.curve())
}

/// Exact policy curve over all `|N_U|^f` sequences, `f = 0..=f_max`.
pub fn exact_curve_policy<T: Scalar>(
    net: &SpareNetwork,
    policy: &Policy,
    f_max: usize,
) -> Result<Curve<T>> {
    exact_curve_policy_with_budget(net, policy, f_max, DEFAULT_BUDGET)
}

pub fn exact_curve_policy_with_budget<T: Scalar>(
    net: &SpareNetwork,
    policy: &Policy,
    f_max: usize,
    budget: u64,
) -> Result<Curve<T>> {
    if !policy.is_deterministic() {
        return Err(Error::NondeterministicPolicy);
    }
    let denominators = powers(net.n_units(), f_max)?;
    let mut search = PolicySearch::new(net, policy, budget);
    let counts = search.survivors(&SystemState::new(net), f_max)?;
    Ok(Curve::from_counts(Estimator::ExactPolicy, &counts, &denominators))
}

/// Memoized enumeration of fault sequences under a deterministic policy.
struct PolicySearch<'a> {
    net: &'a SpareNetwork,
    policy: Policy,
    budget: u64,
    survivors: HashMap<Vec<u64>, Vec<u128>>,
    worst: HashMap<Vec<u64>, usize>,
    visited: u64,
    rng: Stream,
}

impl<'a> PolicySearch<'a> {
    fn new(net: &'a SpareNetwork, policy: &Policy, budget: u64) -> Self {
        PolicySearch {
            net,
            policy: *policy,
            budget,
            survivors: HashMap::new(),
            worst: HashMap::new(),
            visited: 0,
            // never drawn from: the policy breaks ties by index
            rng: Stream::new(0),
        }
    }

    fn visit(&mut self, what: &'static str) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded {
                what,
                needed: u128::from(self.visited),
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn child(&mut self, state: &SystemState<'a>, unit: usize) -> Option<SystemState<'a>> {
        let decision = select_spare(state, unit, &self.policy, &mut self.rng).ok()?;
        let mut next = state.clone();
        next.apply_repair(unit, decision.chosen_spare)
            .expect("selected spare is live");
        Some(next)
    }

    /// `out[d]` = number of length-`d` continuations from `state` that
    /// survive, for `d = 0..=depth`.
    fn survivors(&mut self, state: &SystemState<'a>, depth: usize) -> Result<Vec<u128>> {
        let key = state.consumed_key();
        if let Some(hit) = self.survivors.get(&key) {
            if hit.len() > depth {
                return Ok(hit[..=depth].to_vec());
            }
        }
        self.visit("exact policy enumeration")?;
        let mut out = vec![0u128; depth + 1];
        out[0] = 1;
        if depth > 0 {
            for unit in 0..self.net.n_units() {
                let Some(next) = self.child(state, unit) else {
                    continue;
                };
                let sub = self.survivors(&next, depth - 1)?;
                for (d, c) in sub.into_iter().enumerate() {
                    out[d + 1] = out[d + 1]
                        .checked_add(c)
                        .ok_or(Error::Overflow("policy sequences"))?;
                }
            }
        }
        self.survivors.insert(key, out.clone());
        Ok(out)
    }

    /// Largest `k` such that every length-`k` continuation survives.
    fn worst_case(&mut self, state: &SystemState<'a>) -> Result<usize> {
        let key = state.consumed_key();
        if let Some(&k) = self.worst.get(&key) {
            return Ok(k);
        }
        self.visit("adversarial search")?;
        let mut best = usize::MAX;
        for unit in 0..self.net.n_units() {
            let k = match self.child(state, unit) {
                None => 0,
                Some(next) => 1 + self.worst_case(&next)?,
            };
            best = best.min(k);
            if best == 0 {
                break;
            }
        }
        self.worst.insert(key, best);
        Ok(best)
    }
}

/// `n^0 ..= n^f_max`.
fn powers(n: usize, f_max: usize) -> Result<Vec<u128>> {
    let mut out = Vec::with_capacity(f_max + 1);
    let mut p: u128 = 1;
    for f in 0..=f_max {
        if f > 0 {
            p = p.checked_mul(n as u128).ok_or(Error::Overflow("|N_U|^f"))?;
        }
        out.push(p);
    }
    Ok(out)
}

/// Number of fault multisets of size `0..=f_max` over `n` units,
/// `C(f_max + n, f_max)`; `None` on overflow.
fn multiset_count(n: usize, f_max: usize) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..=f_max as u128 {
        c = c.checked_mul(n as u128 + i)? / i;
    }
    Some(c)
}

/// Offline-optimal curve: fraction of sequences whose faults admit a
/// global spare assignment, `f = 0..=f_max`.
pub fn exact_curve_offline<T: Scalar>(net: &SpareNetwork, f_max: usize) -> Result<Curve<T>> {
    exact_curve_offline_with_budget(net, f_max, DEFAULT_BUDGET)
}

pub fn exact_curve_offline_with_budget<T: Scalar>(
    net: &SpareNetwork,
    f_max: usize,
    budget: u64,
) -> Result<Curve<T>> {
    let needed = multiset_count(net.n_units(), f_max).unwrap_or(u128::MAX);
    if needed > u128::from(budget) {
        return Err(Error::BudgetExceeded {
            what: "offline multiset enumeration",
            needed,
            budget,
        });
    }
    let denominators = powers(net.n_units(), f_max)?;
    let mut walk = MultisetWalk {
        net,
        f_max,
        matcher: OccurrenceMatcher::new(net),
        counts: vec![0; net.n_units()],
        feasible: vec![0; f_max + 1],
    };
    walk.descend(0, 0, 1)?;
    Ok(Curve::from_counts(Estimator::ExactOffline, &walk.feasible, &denominators))
}

struct MultisetWalk<'a> {
    net: &'a SpareNetwork,
    f_max: usize,
    matcher: OccurrenceMatcher<'a>,
    counts: Vec<u128>,
    /// Ordered sequences (weighted multisets) that are repairable, per size.
    feasible: Vec<u128>,
}

impl MultisetWalk<'_> {
    /// Multisets are built in non-decreasing unit order; an infeasible
    /// multiset prunes all of its supersets.
    fn descend(&mut self, first_unit: usize, size: usize, orderings: u128) -> Result<()> {
        self.feasible[size] = self.feasible[size]
            .checked_add(orderings)
            .ok_or(Error::Overflow("offline sequences"))?;
        if size == self.f_max {
            return Ok(());
        }
        for unit in first_unit..self.net.n_units() {
            if !self.matcher.push(unit) {
                continue;
            }
            self.counts[unit] += 1;
            let next = orderings
                .checked_mul(size as u128 + 1)
                .ok_or(Error::Overflow("multinomial"))?
                / self.counts[unit];
            let res = self.descend(unit, size + 1, next);
            self.counts[unit] -= 1;
            self.matcher.pop();
            res?;
        }
        Ok(())
    }
}

/// Largest `k` such that every length-`k` fault sequence survives under a
/// deterministic policy.
///
/// An adversary that keeps hitting the weakest unit defeats any policy after
/// `MinDeg(N_U)` faults, and no repair removes more than one spare from any
/// unit, so this always equals the minimum unit degree. The informative
/// quantity is [`adversarial_survival_from`], which fixes the first faults.
pub fn adversarial_survival(net: &SpareNetwork, policy: &Policy) -> Result<usize> {
    adversarial_survival_from(net, policy, &FaultSequence::new(net, Vec::new())?)
}

/// Worst-case survival once `prefix` has happened: the largest `k` such that
/// every length-`k` sequence starting with `prefix` survives. If the prefix
/// itself fails at step `j`, returns `j - 1`.
pub fn adversarial_survival_from(
    net: &SpareNetwork,
    policy: &Policy,
    prefix: &FaultSequence,
) -> Result<usize> {
    adversarial_survival_from_with_budget(net, policy, prefix, DEFAULT_BUDGET)
}

pub fn adversarial_survival_from_with_budget(
    net: &SpareNetwork,
    policy: &Policy,
    prefix: &FaultSequence,
    budget: u64,
) -> Result<usize> {
    if !policy.is_deterministic() {
        return Err(Error::NondeterministicPolicy);
    }
    let mut search = PolicySearch::new(net, policy, budget);
    let mut state = SystemState::new(net);
    for (i, &unit) in prefix.slots().iter().enumerate() {
        match search.child(&state, unit) {
            Some(next) => state = next,
            None => return Ok(i),
        }
    }
    Ok(prefix.len() + search.worst_case(&state)?)
}

/// Worst-case survival after each possible first fault, indexed by unit.
pub fn first_fault_profile(net: &SpareNetwork, policy: &Policy) -> Result<Vec<usize>> {
    (0..net.n_units())
        .map(|u| adversarial_survival_from(net, policy, &FaultSequence::new(net, vec![u])?))
        .collect()
}

/// `(hundred_point, zero_point)`: the largest fault count every policy
/// survives (`MinDeg(N_U)`), and the smallest count no policy survives
/// (`|N_S| + 1`).
pub fn structural_points(net: &SpareNetwork) -> (usize, usize) {
    (net.min_unit_degree(), net.n_spares() + 1)
}

/// Averaging range used when none is given: `1..=|N_S|`.
pub fn default_mean_range(net: &SpareNetwork) -> RangeInclusive<usize> {
    1..=net.n_spares()
}

/// Arithmetic mean of the curve over `range`.
pub fn mean_repairability<T: Scalar>(curve: &Curve<T>, range: RangeInclusive<usize>) -> Result<T> {
    if range.is_empty() || *range.end() > curve.f_max() {
        return Err(Error::EmptyRange);
    }
    let n = range.end() - range.start() + 1;
    let sum = curve.points[range]
        .iter()
        .fold(T::zero(), |acc, p| acc + p.repairability.clone());
    Ok(sum / T::from_counts(n as u128, 1))
}
