//! Ensemble experiments: many random networks, several conditions each,
//! Monte Carlo curves per (network, condition), and CSV output.
//!
//! Output layout under the chosen directory:
//!
//! ```text
//! curves/<condition>/<network>.csv   one curve per network
//! mean_<condition>.csv               ensemble-mean curve
//! summary.csv                        one row per condition
//! ```
//!
//! All randomness is keyed off the master seed. Network `i` of size group
//! `g` is generated from `derive_seed(derive_seed(master, g), i)`, and every
//! condition on that network reuses the same fault sequences.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::enhance::{build_spectrum, enhance, EnhancementStrategy};
use crate::error::{Error, Result};
use crate::eval::{mc_survival, Curve, CurvePoint, Estimator, SurvivalSample};
use crate::network::{generate_balanced_ring, generate_random, SpareNetwork};
use crate::policy::{EssentialityMode, Policy, PolicyKind};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Five replacement policies on random networks.
    AlgoCompare,
    /// Original network against four edge-addition strategies.
    EnhanceCompare,
    /// Random through fully selected construction, plus the balanced ring.
    Spectrum,
    /// Full enhancement against the original at growing sizes.
    Scaling,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::AlgoCompare,
        Preset::EnhanceCompare,
        Preset::Spectrum,
        Preset::Scaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::AlgoCompare => "algo-compare",
            Preset::EnhanceCompare => "enhance-compare",
            Preset::Spectrum => "spectrum",
            Preset::Scaling => "scaling",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "preset",
                name: s.to_string(),
            })
    }
}

/// Network shape of one size group. `extra` is the number of added edges
/// for enhancement presets and is unused otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeSpec {
    pub n_units: usize,
    pub n_spares: usize,
    pub n_edges: usize,
    pub extra: usize,
}

impl SizeSpec {
    pub const fn new(n_units: usize, n_spares: usize, n_edges: usize, extra: usize) -> Self {
        SizeSpec {
            n_units,
            n_spares,
            n_edges,
            extra,
        }
    }

    fn label(&self) -> String {
        format!("{}x{}", self.n_units, self.n_spares)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub n_networks: usize,
    pub trials: u64,
    pub master_seed: u64,
    /// Thread count; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
    pub sizes: Vec<SizeSpec>,
    /// Selected-edge counts of the spectrum conditions, in order. The random
    /// part is `n_edges - selected`.
    pub spectrum_selected: Vec<usize>,
    /// Essentiality variant used by the policy comparison.
    pub essentiality: EssentialityMode,
}

impl ExperimentConfig {
    /// Full-scale defaults for `preset`: 100 networks, 10,000 trials.
    pub fn preset(preset: Preset) -> Self {
        let sizes = match preset {
            Preset::AlgoCompare => vec![SizeSpec::new(15, 10, 40, 0)],
            Preset::EnhanceCompare => vec![SizeSpec::new(15, 10, 20, 5)],
            Preset::Spectrum => vec![SizeSpec::new(15, 10, 45, 0)],
            Preset::Scaling => vec![
                SizeSpec::new(15, 10, 20, 5),
                SizeSpec::new(30, 20, 40, 10),
                SizeSpec::new(60, 40, 80, 20),
            ],
        };
        ExperimentConfig {
            preset,
            n_networks: 100,
            trials: 10_000,
            master_seed: 1,
            workers: None,
            sizes,
            spectrum_selected: vec![0, 10, 15, 45],
            essentiality: EssentialityMode::default(),
        }
    }

    pub fn with_scale(mut self, n_networks: usize, trials: u64) -> Self {
        self.n_networks = n_networks;
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_networks == 0 {
            return bad("networks must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        if self.sizes.is_empty() {
            return bad("at least one size is required".into());
        }
        for s in &self.sizes {
            let cap = s.n_units * s.n_spares;
            if s.n_units == 0 || s.n_spares == 0 {
                return bad(format!("size {} needs units and spares", s.label()));
            }
            if s.n_edges + s.extra > cap {
                return bad(format!(
                    "size {}: {} + {} edges exceed {cap} cells",
                    s.label(),
                    s.n_edges,
                    s.extra
                ));
            }
        }
        match self.preset {
            Preset::AlgoCompare | Preset::Spectrum if self.sizes.len() != 1 => {
                bad(format!("{} takes exactly one size", self.preset))
            }
            Preset::EnhanceCompare | Preset::Scaling
                if self.sizes.iter().any(|s| s.extra == 0) =>
            {
                bad(format!("{} needs extra edges per size", self.preset))
            }
            Preset::Spectrum
                if self.spectrum_selected.is_empty()
                    || self.spectrum_selected.iter().any(|&k| k > self.sizes[0].n_edges) =>
            {
                bad("spectrum selections must lie within the edge count".into())
            }
            _ => Ok(()),
        }
    }

    fn conditions(&self) -> Vec<Condition> {
        let random_policy = Policy::new(PolicyKind::Random);
        let mut out = Vec::new();
        match self.preset {
            Preset::AlgoCompare => {
                for kind in PolicyKind::ALL {
                    out.push(Condition {
                        name: kind.name().to_string(),
                        group: 0,
                        recipe: Recipe::Random,
                        policy: Policy::new(kind).with_essentiality(self.essentiality),
                        baseline: PolicyKind::Random.name().to_string(),
                    });
                }
            }
            Preset::EnhanceCompare => {
                out.push(Condition {
                    name: "original".into(),
                    group: 0,
                    recipe: Recipe::Random,
                    policy: random_policy,
                    baseline: "original".into(),
                });
                for strategy in EnhancementStrategy::ALL {
                    out.push(Condition {
                        name: strategy.name().to_string(),
                        group: 0,
                        recipe: Recipe::Enhanced(strategy),
                        policy: random_policy,
                        baseline: "original".into(),
                    });
                }
            }
            Preset::Spectrum => {
                let total = self.sizes[0].n_edges;
                let baseline = spectrum_name(total, 0);
                for &selected in &self.spectrum_selected {
                    out.push(Condition {
                        name: spectrum_name(total, selected),
                        group: 0,
                        recipe: Recipe::Spectrum { selected },
                        policy: random_policy,
                        baseline: baseline.clone(),
                    });
                }
                out.push(Condition {
                    name: format!("ring{total}"),
                    group: 0,
                    recipe: Recipe::Ring,
                    policy: random_policy,
                    baseline,
                });
            }
            Preset::Scaling => {
                for (group, size) in self.sizes.iter().enumerate() {
                    let original = format!("original-{}", size.label());
                    out.push(Condition {
                        name: original.clone(),
                        group,
                        recipe: Recipe::Random,
                        policy: random_policy,
                        baseline: original.clone(),
                    });
                    out.push(Condition {
                        name: format!("full-{}", size.label()),
                        group,
                        recipe: Recipe::Enhanced(EnhancementStrategy::Full),
                        policy: random_policy,
                        baseline: original,
                    });
                }
            }
        }
        out
    }
}

fn spectrum_name(total: usize, selected: usize) -> String {
    match (selected, total - selected) {
        (0, _) => format!("random{total}"),
        (s, 0) => format!("sel{s}"),
        (s, r) => format!("rand{r}+sel{s}"),
    }
}

#[derive(Debug, Clone, Copy)]
enum Recipe {
    Random,
    Enhanced(EnhancementStrategy),
    Spectrum { selected: usize },
    Ring,
}

#[derive(Debug, Clone)]
struct Condition {
    name: String,
    group: usize,
    recipe: Recipe,
    policy: Policy,
    baseline: String,
}

/// Results of one condition across the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub name: String,
    pub size: SizeSpec,
    pub policy: PolicyKind,
    pub baseline: String,
    /// One Monte Carlo sample per network, in network order.
    pub samples: Vec<SurvivalSample>,
    /// Mean over networks of each curve point; `ci_half_width` is the 95%
    /// Monte Carlo half-width of that mean given the networks.
    pub mean_curve: Curve<f64>,
    /// Mean of `mean_curve` over `f = 1..=n_spares`.
    pub mean_repairability: f64,
    pub mean_ci95: f64,
}

impl ConditionResult {
    pub fn f_range(&self) -> (usize, usize) {
        (1, self.size.n_spares)
    }

    pub fn curves(&self) -> impl Iterator<Item = Curve<f64>> + '_ {
        self.samples.iter().map(SurvivalSample::curve)
    }

    /// Fraction of decisions where the first ranking stage tied.
    pub fn primary_tie_rate(&self) -> f64 {
        let (ties, total) = self
            .samples
            .iter()
            .fold((0u64, 0u64), |(t, n), s| (t + s.primary_ties, n + s.decisions));
        if total == 0 {
            0.0
        } else {
            ties as f64 / total as f64
        }
    }

    /// Ensemble mean and 95% half-width at one fault count.
    pub fn at(&self, f: usize) -> (f64, f64) {
        let p = &self.mean_curve.points[f];
        (p.repairability, p.ci_half_width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub conditions: Vec<ConditionResult>,
}

impl ExperimentReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Mean repairability of `name` divided by that of its baseline.
    pub fn ratio_to_baseline(&self, name: &str) -> Option<f64> {
        let c = self.condition(name)?;
        let b = self.condition(&c.baseline)?;
        Some(c.mean_repairability / b.mean_repairability)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "preset,condition,policy,networks,trials,f_min,f_max,mean_repairability,ci95,\
             baseline,ratio_vs_baseline,improvement_pct,primary_tie_rate,master_seed\n",
        );
        for c in &self.conditions {
            let ratio = self.ratio_to_baseline(&c.name).unwrap_or(f64::NAN);
            let (lo, hi) = c.f_range();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.config.preset,
                c.name,
                c.policy,
                self.config.n_networks,
                self.config.trials,
                lo,
                hi,
                c.mean_repairability,
                c.mean_ci95,
                c.baseline,
                ratio,
                (ratio - 1.0) * 100.0,
                c.primary_tie_rate(),
                self.config.master_seed
            );
        }
        out
    }

    /// Writes the per-network curves, mean curves and summary under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for c in &self.conditions {
            let cdir = dir.join("curves").join(&c.name);
            fs::create_dir_all(&cdir)?;
            for (i, curve) in c.curves().enumerate() {
                fs::write(cdir.join(format!("{i:03}.csv")), curve.to_csv())?;
            }
            fs::write(dir.join(format!("mean_{}.csv", c.name)), c.mean_curve.to_csv())?;
        }
        fs::write(dir.join("summary.csv"), self.summary_csv())?;
        Ok(())
    }
}

/// Builds network `index` of a condition.
fn build_network(
    cond: &Condition,
    size: &SizeSpec,
    network_seed: u64,
) -> Result<SpareNetwork> {
    let SizeSpec {
        n_units,
        n_spares,
        n_edges,
        extra,
    } = *size;
    match cond.recipe {
        Recipe::Random => generate_random(n_units, n_spares, n_edges, network_seed),
        Recipe::Enhanced(strategy) => {
            let base = generate_random(n_units, n_spares, n_edges, network_seed)?;
            let tag = EnhancementStrategy::ALL
                .iter()
                .position(|&s| s == strategy)
                .unwrap() as u64;
            enhance(&base, extra, strategy, derive_seed(network_seed, 1 + tag))
        }
        Recipe::Spectrum { selected } => {
            build_spectrum(n_units, n_spares, n_edges - selected, selected, network_seed)
        }
        Recipe::Ring => generate_balanced_ring(n_units, n_spares, n_edges),
    }
}

/// Tag of the fault-sequence stream, distinct from the enhancement tags.
const MC_STREAM: u64 = 1000;

/// Runs every (condition, network) pair and aggregates the ensemble.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.workers {
        None => execute(config),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(|| execute(config)),
    }
}

fn execute(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let conditions = config.conditions();
    let jobs: Vec<(usize, usize)> = (0..conditions.len())
        .flat_map(|c| (0..config.n_networks).map(move |n| (c, n)))
        .collect();
    let samples: Vec<SurvivalSample> = jobs
        .par_iter()
        .map(|&(ci, ni)| {
            let cond = &conditions[ci];
            let size = &config.sizes[cond.group];
            let network_seed = derive_seed(derive_seed(config.master_seed, cond.group as u64), ni as u64);
            let net = build_network(cond, size, network_seed)?;
            mc_survival(
                &net,
                &cond.policy,
                size.n_spares,
                config.trials,
                derive_seed(network_seed, MC_STREAM),
            )
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::with_capacity(conditions.len());
    for (ci, cond) in conditions.iter().enumerate() {
        let chunk = samples[ci * config.n_networks..(ci + 1) * config.n_networks].to_vec();
        let size = config.sizes[cond.group];
        let (mean_curve, mean_repairability, mean_ci95) = aggregate(&chunk, size.n_spares, config.trials);
        results.push(ConditionResult {
            name: cond.name.clone(),
            size,
            policy: cond.policy.kind,
            baseline: cond.baseline.clone(),
            samples: chunk,
            mean_curve,
            mean_repairability,
            mean_ci95,
        });
    }
    Ok(ExperimentReport {
        config: config.clone(),
        conditions: results,
    })
}

/// Ensemble-mean curve plus the mean over `f = 1..=n_spares` with its 95%
/// half-width.
///
/// The intervals are Monte Carlo intervals conditional on the sampled
/// networks: network `i` contributes variance `v_i / trials` and the mean of
/// `n` networks has variance `sum(v_i) / (trials n^2)`. For the averaged
/// statistic the per-trial quantity is `min(T, n_spares) / n_spares` where
/// `T` is the trial's survival time, whose distribution the tallies give
/// exactly.
fn aggregate(samples: &[SurvivalSample], n_spares: usize, trials: u64) -> (Curve<f64>, f64, f64) {
    let n = samples.len() as f64;
    let t = trials as f64;
    let f_max = n_spares;
    let points = (0..=f_max)
        .map(|f| {
            let (mut sum, mut var) = (0.0, 0.0);
            for s in samples {
                let p = s.at_least[f] as f64 / t;
                sum += p;
                var += p * (1.0 - p);
            }
            CurvePoint {
                f,
                repairability: sum / n,
                ci_half_width: 1.96 * (var / t).sqrt() / n,
                trials: trials * samples.len() as u64,
            }
        })
        .collect();

    let (mut mean_sum, mut var_sum) = (0.0, 0.0);
    for s in samples {
        let (mut m1, mut m2) = (0.0, 0.0);
        for k in 0..=f_max {
            let exactly = s.at_least[k] - s.at_least.get(k + 1).copied().unwrap_or(0);
            let x = k as f64 / f_max as f64;
            let w = exactly as f64 / t;
            m1 += w * x;
            m2 += w * x * x;
        }
        mean_sum += m1;
        var_sum += (m2 - m1 * m1).max(0.0);
    }
    let curve = Curve {
        points,
        estimator: Estimator::McPolicy,
    };
    (curve, mean_sum / n, 1.96 * (var_sum / t).sqrt() / n)
}

/// Renders a curve file set in memory, keyed by relative path. Used to
/// compare runs byte for byte without touching the filesystem.
pub fn render_outputs(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for c in &report.conditions {
        for (i, curve) in c.curves().enumerate() {
            files.push((format!("curves/{}/{i:03}.csv", c.name), curve.to_csv()));
        }
        files.push((format!("mean_{}.csv", c.name), c.mean_curve.to_csv()));
    }
    files.push(("summary.csv".into(), report.summary_csv()));
    files
}

/// Number of curve rows (excluding headers) across all per-network files.
pub fn curve_row_count(report: &ExperimentReport) -> usize {
    report
        .conditions
        .iter()
        .map(|c| c.samples.len() * (c.size.n_spares + 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::mean_repairability;

    fn small(preset: Preset) -> ExperimentConfig {
        ExperimentConfig::preset(preset).with_scale(3, 200).with_seed(5)
    }

    #[test]
    fn condition_names() {
        let names = |p| {
            small(p)
                .conditions()
                .into_iter()
                .map(|c| c.name)
                .collect::<Vec<_>>()
        };
        assert_eq!(names(Preset::AlgoCompare), ["random", "pe", "pp", "pe+pp", "pp+pe"]);
        assert_eq!(
            names(Preset::EnhanceCompare),
            ["original", "rand-rand", "spare-only", "unit-only", "full"]
        );
        assert_eq!(
            names(Preset::Spectrum),
            ["random45", "rand35+sel10", "rand30+sel15", "sel45", "ring45"]
        );
        assert_eq!(names(Preset::Scaling).len(), 6);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(small(Preset::AlgoCompare).with_scale(0, 10).validate().is_err());
        assert!(small(Preset::AlgoCompare).with_scale(1, 0).validate().is_err());
        let mut c = small(Preset::EnhanceCompare);
        c.sizes[0].extra = 0;
        assert!(c.validate().is_err());
        let mut c = small(Preset::Spectrum);
        c.spectrum_selected = vec![50];
        assert!(c.validate().is_err());
        let mut c = small(Preset::AlgoCompare);
        c.sizes[0].n_edges = 151;
        assert!(run_experiment(&c).is_err());
        assert!("bogus".parse::<Preset>().is_err());
    }

    #[test]
    fn report_shape_and_aggregates() {
        let report = run_experiment(&small(Preset::EnhanceCompare)).unwrap();
        assert_eq!(report.conditions.len(), 5);
        assert_eq!(curve_row_count(&report), 3 * 5 * 11);
        for c in &report.conditions {
            assert!(c.mean_curve.is_well_formed());
            let direct = mean_repairability(&c.mean_curve, 1..=10).unwrap();
            assert!((direct - c.mean_repairability).abs() < 1e-12);
        }
        assert_eq!(report.ratio_to_baseline("original"), Some(1.0));
        let summary = report.summary_csv();
        assert_eq!(summary.lines().count(), 6);
    }

    #[test]
    fn outputs_are_reproducible() {
        let a = render_outputs(&run_experiment(&small(Preset::Spectrum)).unwrap());
        let b = render_outputs(
            &run_experiment(&small(Preset::Spectrum).with_workers(Some(2))).unwrap(),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn writes_layout() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_experiment(&small(Preset::AlgoCompare).with_scale(2, 50)).unwrap();
        report.write_to(dir.path()).unwrap();
        assert!(dir.path().join("summary.csv").exists());
        assert!(dir.path().join("mean_pe+pp.csv").exists());
        assert!(dir.path().join("curves/pp/001.csv").exists());
    }
}
