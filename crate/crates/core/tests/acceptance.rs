//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use spareshare::experiment::{render_outputs, run_experiment, ExperimentConfig, ExperimentReport, Preset};
use spareshare::{
    adversarial_survival, adversarial_survival_from, estimate_curve_mc, exact_curve_offline,
    exact_curve_policy, first_fault_profile, generate_random, is_globally_repairable,
    run_sequence, Curve, FaultSequence, Policy, PolicyKind, Rational, SpareNetwork, Stream,
};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// Collects failed sub-checks of one criterion.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }

    fn verdict(self, summary: String) -> Verdict {
        if self.0.is_empty() {
            Verdict::new(true, summary)
        } else {
            let shown: Vec<_> = self.0.iter().take(3).cloned().collect();
            Verdict::new(false, format!("{summary}; failed: {}", shown.join(" | ")))
        }
    }
}

fn n0() -> SpareNetwork {
    SpareNetwork::reference_example()
}

/// Probability that uniformly random repair survives `faults` uniformly
/// random faults, by total probability over every fault and choice.
fn random_policy_survival(net: &SpareNetwork, used: &mut Vec<bool>, faults: usize) -> f64 {
    if faults == 0 {
        return 1.0;
    }
    let n = net.n_units() as f64;
    let mut total = 0.0;
    for u in 0..net.n_units() {
        let live: Vec<usize> = net.unit_spares(u).iter().copied().filter(|&s| !used[s]).collect();
        if live.is_empty() {
            continue;
        }
        for &s in &live {
            used[s] = true;
            total += random_policy_survival(net, used, faults - 1) / live.len() as f64;
            used[s] = false;
        }
    }
    total / n
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let net = n0();
    let mut c = Checks::default();
    let offline: Curve<Rational> = exact_curve_offline(&net, 2).unwrap();
    let pp: Curve<Rational> = exact_curve_policy(&net, &Policy::lowest(PolicyKind::Pp), 2).unwrap();
    c.check(offline.value(2) == Some(&Ratio::new(14, 16)), || format!("offline(2) = {:?}", offline.value(2)));
    c.check(pp.value(2) == Some(&Ratio::new(13, 16)), || format!("pp(2) = {:?}", pp.value(2)));
    let truth = random_policy_survival(&net, &mut vec![false; net.n_spares()], 2);
    c.check((truth - 0.78125).abs() < 1e-12, || format!("random(2) by enumeration = {truth}"));
    let mc: Curve<f64> = estimate_curve_mc(&net, &Policy::new(PolicyKind::Random), 2, 10_000, 1).unwrap();
    let r = mc.points[2].repairability;
    c.check((r - 0.78125).abs() <= 0.013, || format!("mc random(2) = {r}"));
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"));
    c.verdict(format!("offline 14/16, pp 13/16, mc random {r:.4} in {elapsed:.2?}"))
}

/// Independent structure check of an exact or sampled curve.
fn structure_ok<T: spareshare::Scalar>(curve: &Curve<T>, net: &SpareNetwork) -> bool {
    let min_deg = net.min_unit_degree();
    let vals: Vec<f64> = curve.values().map(|v| v.to_f64()).collect();
    vals.iter().enumerate().all(|(f, &v)| {
        (f > min_deg || v == 1.0) && (f <= net.n_spares() || v == 0.0)
    }) && vals.windows(2).all(|w| w[1] <= w[0])
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = Stream::new(2);
    let mut c = Checks::default();
    let mut evaluated = 0;
    for i in 0..200u64 {
        let nu = 1 + rng.below(10);
        let ns = 1 + rng.below(8);
        let ne = rng.below(nu * ns + 1);
        let net = generate_random(nu, ns, ne, i).unwrap();
        let f_max = ns + 1;
        let offline: Curve<Rational> = exact_curve_offline(&net, f_max).unwrap();
        c.check(structure_ok(&offline, &net), || format!("net {i}: offline structure"));
        for kind in PolicyKind::ALL {
            let exact: Curve<Rational> = exact_curve_policy(&net, &Policy::lowest(kind), f_max).unwrap();
            c.check(structure_ok(&exact, &net), || format!("net {i} {kind}: exact structure"));
            let dominated = offline.values().zip(exact.values()).all(|(o, p)| o >= p);
            c.check(dominated, || format!("net {i} {kind}: offline below policy"));
            let mc: Curve<f64> = estimate_curve_mc(&net, &Policy::new(kind), f_max, 300, i).unwrap();
            c.check(structure_ok(&mc, &net), || format!("net {i} {kind}: mc structure"));
            evaluated += 1;
        }
    }
    let elapsed = start.elapsed();
    c.check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"));
    c.verdict(format!("200 networks, {evaluated} (network, policy) curves in {elapsed:.2?}"))
}

fn criterion_3() -> Verdict {
    let mut rng = Stream::new(3);
    let mut c = Checks::default();
    let (mut runs, mut failures, mut separated) = (0u64, 0u64, 0u64);
    while failures < 1000 || runs < 5000 {
        let nu = 2 + rng.below(5);
        let ns = 2 + rng.below(4);
        let ne = nu + rng.below(nu * ns - nu + 1);
        let net = generate_random(nu, ns, ne, rng.next_u64()).unwrap();
        let kind = PolicyKind::ALL[rng.below(5)];
        let len = 1 + rng.below(ns + 1);
        let seq = FaultSequence::random(&net, len, &mut rng);
        let outcome = run_sequence(&net, &seq, &Policy::new(kind), rng.next_u64()).unwrap();
        runs += 1;
        for k in 1..=seq.len() {
            let offline = is_globally_repairable(&net, &seq.prefix(k).counts(nu));
            let online_failed = outcome.failed_at_step.is_some_and(|j| j <= k);
            c.check(offline || online_failed, || format!("run {runs}: offline infeasible at {k} but online survived"));
        }
        if let Some(j) = outcome.failed_at_step {
            failures += 1;
            if is_globally_repairable(&net, &seq.prefix(j).counts(nu)) {
                separated += 1;
            }
        }
    }
    c.check(separated > 0, || "no globally repairable online failure".into());
    c.verdict(format!("{runs} runs, {failures} online failures, {separated} globally repairable"))
}

fn run(preset: Preset, workers: Option<usize>) -> ExperimentReport {
    run_experiment(&ExperimentConfig::preset(preset).with_workers(workers)).unwrap()
}

fn non_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 - a.1 > b.0 + b.1
}

fn criterion_4(report: &ExperimentReport) -> Verdict {
    let mut c = Checks::default();
    let get = |name: &str| report.condition(name).unwrap();
    let mean = |name: &str| (get(name).mean_repairability, get(name).mean_ci95);
    for name in ["pe", "pp", "pe+pp", "pp+pe"] {
        c.check(non_overlap(mean(name), mean("random")), || format!("{name} vs random"));
    }
    for name in ["random", "pe", "pp", "pp+pe"] {
        c.check(non_overlap(mean("pe+pp"), mean(name)), || format!("pe+pp vs {name}"));
    }
    let (pe, pp) = (get("pe"), get("pp"));
    for f in 2..=6 {
        c.check(non_overlap(pe.at(f), pp.at(f)), || format!("pe > pp at f={f}: {:?} vs {:?}", pe.at(f), pp.at(f)));
    }
    for f in [8, 9] {
        c.check(non_overlap(pp.at(f), pe.at(f)), || format!("pp > pe at f={f}: {:?} vs {:?}", pp.at(f), pe.at(f)));
    }
    let ties: u64 = [pe, pp].iter().flat_map(|r| &r.samples).map(|s| s.primary_ties).sum();
    let total: u64 = [pe, pp].iter().flat_map(|r| &r.samples).map(|s| s.decisions).sum();
    let rate = ties as f64 / total as f64;
    c.check((0.10..=0.35).contains(&rate), || format!("tie rate {rate:.3}"));
    let means: Vec<String> = PolicyKind::ALL
        .iter()
        .map(|k| format!("{}={:.4}", k, mean(k.name()).0))
        .collect();
    c.verdict(format!(
        "{}; f=8 pe {:.4} pp {:.4}; tie rate {:.3}",
        means.join(" "),
        pe.at(8).0,
        pp.at(8).0,
        rate
    ))
}

fn criterion_5(report: &ExperimentReport) -> Verdict {
    let mut c = Checks::default();
    let m = |name: &str| report.condition(name).unwrap().mean_repairability;
    let order = ["full", "unit-only", "spare-only", "rand-rand", "original"];
    for w in order.windows(2) {
        c.check(m(w[0]) > m(w[1]), || format!("{} <= {}", w[0], w[1]));
    }
    let gain = |name: &str| m(name) / m("original") - 1.0;
    c.check(m("full") / m("original") >= 1.8, || format!("full/original = {:.3}", m("full") / m("original")));
    c.check(gain("spare-only") > 0.0, || "spare-only gain not positive".into());
    c.check(gain("unit-only") > gain("spare-only"), || "unit-only gain <= spare-only gain".into());
    let reported: Vec<String> = [("full", 1.27), ("spare-only", 0.48), ("unit-only", 1.03)]
        .iter()
        .map(|&(name, reference)| {
            let g = gain(name);
            let within = ((g - reference) / reference).abs() <= 0.35;
            format!("{name} +{:.0}% (ref +{:.0}%, {})", g * 100.0, reference * 100.0, if within { "within 35%" } else { "outside 35%" })
        })
        .collect();
    c.verdict(format!("full/original {:.3}; {}", m("full") / m("original"), reported.join(", ")))
}

fn criterion_6(report: &ExperimentReport) -> Verdict {
    let mut c = Checks::default();
    let names = ["random45", "rand35+sel10", "rand30+sel15", "sel45", "ring45"];
    let means: Vec<f64> = names.iter().map(|n| report.condition(n).unwrap().mean_repairability).collect();
    let jumps: Vec<f64> = means.windows(2).map(|w| w[1] - w[0]).collect();
    for (i, j) in jumps.iter().enumerate() {
        c.check(*j >= 0.0, || format!("{} -> {} decreases", names[i], names[i + 1]));
    }
    c.check(jumps[1..].iter().all(|j| *j < jumps[0]), || "first jump not the largest".into());
    let shown: Vec<String> = names.iter().zip(&means).map(|(n, m)| format!("{n}={m:.4}")).collect();
    c.verdict(shown.join(" "))
}

fn criterion_7(report: &ExperimentReport) -> Verdict {
    let mut c = Checks::default();
    let ratios: Vec<f64> = report
        .config
        .sizes
        .iter()
        .map(|s| report.ratio_to_baseline(&format!("full-{}x{}", s.n_units, s.n_spares)).unwrap())
        .collect();
    for w in ratios.windows(2) {
        c.check(w[1] > w[0], || format!("{:.3} !< {:.3}", w[0], w[1]));
    }
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    c.verdict(format!("full/original boosts {}", shown.join(" < ")))
}

fn criterion_8() -> Verdict {
    let mut c = Checks::default();
    let mut rng = Stream::new(8);
    let mut below = Vec::new();
    for i in 0..200u64 {
        let nu = 1 + rng.below(6);
        let ns = 1 + rng.below(5);
        let ne = rng.below(nu * ns + 1);
        let net = generate_random(nu, ns, ne, i).unwrap();
        let min_deg = net.min_unit_degree();
        let pe = first_fault_profile(&net, &Policy::lowest(PolicyKind::Pe)).unwrap();
        for kind in PolicyKind::ALL {
            let policy = Policy::lowest(kind);
            let k = adversarial_survival(&net, &policy).unwrap();
            c.check(k >= min_deg, || format!("net {i} {kind}: {k} < {min_deg}"));
            if kind != PolicyKind::Pe {
                let other = first_fault_profile(&net, &policy).unwrap();
                if let Some(u) = (0..nu).find(|&u| pe[u] < other[u]) {
                    below.push(format!("net {i} vs {kind} after u{u}: {} < {}", pe[u], other[u]));
                }
            }
        }
    }
    // u0 is the weakest unit; u1 shares no spare with it.
    let net = SpareNetwork::new(3, 5, [(0, 0), (0, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4)]).unwrap();
    let pe = Policy::lowest(PolicyKind::Pe);
    let first = FaultSequence::new(&net, vec![1]).unwrap();
    let k = adversarial_survival_from(&net, &pe, &first).unwrap();
    c.check(k == net.min_unit_degree() + 1, || format!("constructed instance: {k}"));
    for line in &below {
        println!("    note: pe below another policy: {line}");
    }
    c.verdict(format!(
        "floor holds on 200 networks; constructed instance {k} = MinDeg+1; {} pe-below cases logged",
        below.len()
    ))
}

fn criterion_9(baseline: &[(Preset, ExperimentReport)]) -> Verdict {
    let mut c = Checks::default();
    let mut files = 0;
    for (preset, report) in baseline {
        let reference = render_outputs(report);
        files += reference.len();
        for workers in [Some(1), Some(4)] {
            let again = render_outputs(&run(*preset, workers));
            c.check(again == reference, || format!("{preset} differs with workers {workers:?}"));
        }
    }
    c.verdict(format!("{files} files identical across default, 1 and 4 workers"))
}

fn main() -> ExitCode {
    let mut verdicts: Vec<(usize, Verdict)> = Vec::new();
    let mut report = |n: usize, v: Verdict| {
        println!("criterion {n}: {} ({})", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        verdicts.push((n, v));
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    let presets = [Preset::AlgoCompare, Preset::EnhanceCompare, Preset::Spectrum, Preset::Scaling];
    let start = Instant::now();
    let runs: Vec<(Preset, ExperimentReport)> = presets.iter().map(|&p| (p, run(p, None))).collect();
    println!("    ensemble presets ran in {:.2?}", start.elapsed());
    report(4, criterion_4(&runs[0].1));
    report(5, criterion_5(&runs[1].1));
    report(6, criterion_6(&runs[2].1));
    report(7, criterion_7(&runs[3].1));
    report(8, criterion_8());
    report(9, criterion_9(&runs));
    let failed: Vec<usize> = verdicts.iter().filter(|(_, v)| !v.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
