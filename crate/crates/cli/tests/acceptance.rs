//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hexshuffle::arith::{BigRational, Scalar};
use hexshuffle::bulk::{bulk_kernel, bulk_params, convergence_check, BulkPoint, BulkRegime, DEFAULT_TOLERANCE};
use hexshuffle::matrices::{transition_matrix, u_product, u_time_up_shift_down, Direction};
use hexshuffle::shuffle::{exact_step_prob, rng_from_seed, sample_uniform, step_up, MarkovPlan, StepDirection};
use hexshuffle::spectral::{mc_correlations_parallel, verify_spectral, SpaceTimeKernel, SpaceTimePoint};
use hexshuffle::{enumerate, section_domain, BoxDims, PathFamily};
use rand::{Rng, SeedableRng};
use serde_json::Value;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

const SEED: u64 = 20_261_016;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hexshuffle"));
    c.env_remove("HEXSHUFFLE_SEED");
    c
}

fn sections(max_n: i64, max_t: i64) -> Vec<(BoxDims, i64)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for t in 0..=max_t {
            for s in 0..=t {
                for time in 0..=t {
                    out.push((BoxDims::new(n, t, s).unwrap(), time));
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let one = BigRational::one();
    let (mut matrices, mut bad) = (0, Vec::new());
    for (d, time) in sections(4, 6) {
        for dir in Direction::ALL {
            if dir.target(d, time).is_err() {
                continue;
            }
            let (src, dst, p) = transition_matrix::<BigRational>(d, time, dir).unwrap();
            matrices += 1;
            let stochastic = p.row_sums().iter().all(|v| *v == one);
            let preserved = p.left_apply(&src.rho_exact()) == dst.rho_exact();
            if !(stochastic && preserved) {
                bad.push(format!("{d} t={time} {dir}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{matrices} exact matrices, N<=4, T<=6; failures: {bad:?}"),
    )
}

fn criterion_2() -> Outcome {
    use Direction::*;
    let pairs = [(TimeUp, ShiftDown), (TimeDown, ShiftDown), (TimeUp, ShiftUp), (TimeDown, ShiftUp)];
    let (mut identities, mut u_entries, mut bad) = (0, 0, Vec::new());
    for (d, time) in sections(3, 5) {
        for (tdir, sdir) in pairs {
            let (Ok((d1, t1)), Ok((d2, t2))) = (tdir.target(d, time), sdir.target(d, time)) else { continue };
            let lhs = transition_matrix::<BigRational>(d, time, tdir)
                .unwrap()
                .2
                .mul(&transition_matrix::<BigRational>(d1, t1, sdir).unwrap().2);
            let rhs = transition_matrix::<BigRational>(d, time, sdir)
                .unwrap()
                .2
                .mul(&transition_matrix::<BigRational>(d2, t2, tdir).unwrap().2);
            identities += 1;
            if lhs != rhs {
                bad.push(format!("{d} t={time} {tdir}{sdir}"));
            }
        }
        if time < d.t && d.s > 0 {
            let (mid, mt) = TimeUp.target(d, time).unwrap();
            let (tgt, tt) = ShiftDown.target(mid, mt).unwrap();
            for x in section_domain(d, time).unwrap().iter() {
                for y in section_domain(tgt, tt).unwrap().iter() {
                    let c = u_time_up_shift_down(d, time, x, y).unwrap();
                    u_entries += 1;
                    if u_product(d, time, TimeUp, ShiftDown, x, y).unwrap() != c
                        || u_product(d, time, ShiftDown, TimeUp, x, y).unwrap() != c
                    {
                        bad.push(format!("U {d} t={time} ({x},{y})"));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{identities} matrix identities, {u_entries} integer U entries, N<=3, T<=5; failures: {bad:?}"),
    )
}

fn criterion_3() -> Outcome {
    const TRIALS: u64 = 100_000;
    let from = enumerate(BoxDims::new(2, 4, 1).unwrap()).unwrap();
    let to = enumerate(BoxDims::new(2, 4, 2).unwrap()).unwrap();
    let mut rng = rng_from_seed(SEED);
    let (mut pairs, mut worst, mut bad) = (0, 0.0f64, Vec::new());
    for (i, x) in from.iter().enumerate() {
        let mut counts: HashMap<Vec<Vec<i64>>, u64> = HashMap::new();
        for _ in 0..TRIALS {
            *counts.entry(step_up(x, &mut rng).unwrap().to_rows()).or_default() += 1;
        }
        for (j, y) in to.iter().enumerate() {
            let p = exact_step_prob(x, y, StepDirection::Up).unwrap().to_f64();
            let c = counts.get(&y.to_rows()).copied().unwrap_or(0);
            pairs += 1;
            let sigma = (p * (1.0 - p) / TRIALS as f64).sqrt();
            let dev = (c as f64 / TRIALS as f64 - p).abs();
            let z = if sigma > 0.0 { dev / sigma } else if c == 0 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
            if z > 3.0 {
                bad.push(format!("X#{i}->Y#{j}: p={p:.5} freq={:.5} z={z:.2}", c as f64 / TRIALS as f64));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} start states x {} targets ({pairs} pairs), 1e5 steps each; max |z| = {worst:.2}; outside 3 sigma: {bad:?}",
            from.len(),
            to.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    const SAMPLES: u64 = 100_000;
    let mut rng = rng_from_seed(SEED ^ 4);
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, t, s) in [(2, 4, 2), (2, 5, 2)] {
        let dims = BoxDims::new(n, t, s).unwrap();
        let all = enumerate(dims).unwrap();
        let index: HashMap<Vec<Vec<i64>>, usize> = all.iter().enumerate().map(|(i, pf)| (pf.to_rows(), i)).collect();
        let mut counts = vec![0u64; all.len()];
        for _ in 0..SAMPLES {
            counts[index[&sample_uniform(dims, &mut rng).unwrap().to_rows()]] += 1;
        }
        let expected = SAMPLES as f64 / all.len() as f64;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = ChiSquared::new((all.len() - 1) as f64).unwrap().sf(stat);
        pass &= p > 1e-3;
        parts.push(format!("{dims}: |Omega|={}, chi2={stat:.1}, p={p:.3}", all.len()));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let (mut count, mut worst) = (0, 0.0f64);
    for (d, time) in sections(3, 6) {
        for dir in Direction::ALL {
            if dir.target(d, time).is_ok() {
                worst = worst.max(verify_spectral(d, time, dir).unwrap());
                count += 1;
            }
        }
    }
    outcome(worst < 1e-10, format!("{count} (dims, t, direction) cases, N<=3, T<=6; max deviation {worst:.2e}"))
}

/// Admissible configuration: `r` nondecreasing, `t` nonincreasing.
fn random_configuration(plan: &MarkovPlan, rng: &mut impl Rng) -> Vec<SpaceTimePoint> {
    let k = rng.gen_range(1..=3);
    let mut r = rng.gen_range(0..=plan.len());
    let mut t = rng.gen_range(0..=plan.t());
    let mut pts: Vec<SpaceTimePoint> = Vec::new();
    while pts.len() < k {
        let dom = section_domain(plan.dims_at(r).unwrap(), t).unwrap();
        let x = rng.gen_range(dom.lo..=dom.hi);
        if !pts.iter().any(|p| p.r == r && p.t == t && p.x == x) {
            pts.push(SpaceTimePoint::new(r, t, x));
        }
        match rng.gen_range(0..3) {
            0 if r < plan.len() => r += 1,
            1 if t > 0 => t -= 1,
            _ => {}
        }
    }
    pts
}

fn criterion_6() -> Outcome {
    let dims = BoxDims::new(2, 4, 2).unwrap();
    let all = enumerate(dims).unwrap();
    let mut kernel = SpaceTimeKernel::new(MarkovPlan::new(2, 4, 2, vec![]).unwrap());
    let sites: Vec<(i64, i64)> = (0..=4)
        .flat_map(|t| section_domain(dims, t).unwrap().iter().map(move |x| (t, x)))
        .collect();
    let occupied = |pts: &[(i64, i64)]| {
        all.iter()
            .filter(|pf| pts.iter().all(|&(t, x)| pf.section(t as usize).contains(&x)))
            .count() as f64
            / all.len() as f64
    };
    let mut exact_worst = 0.0f64;
    let mut exact_count = 0;
    for (i, &a) in sites.iter().enumerate() {
        let r1 = kernel.correlation(&[SpaceTimePoint::new(0, a.0, a.1)]).unwrap();
        exact_worst = exact_worst.max((r1 - occupied(&[a])).abs());
        exact_count += 1;
        for &b in &sites[i + 1..] {
            let pts = [SpaceTimePoint::new(0, a.0, a.1), SpaceTimePoint::new(0, b.0, b.1)];
            let r2 = kernel.correlation(&pts).unwrap();
            exact_worst = exact_worst.max((r2 - occupied(&[a, b])).abs());
            exact_count += 1;
        }
    }

    const TRIALS: u64 = 100_000;
    let plan = MarkovPlan::new(3, 6, 3, vec![1, -1, -1, 1, 1]).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let configs: Vec<Vec<SpaceTimePoint>> = (0..24).map(|_| random_configuration(&plan, &mut rng)).collect();
    let mut kernel = SpaceTimeKernel::new(plan.clone());
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let est = mc_correlations_parallel(&plan, &configs, TRIALS, SEED ^ 60, jobs).unwrap();
    let (mut mc_worst, mut bad) = (0.0f64, Vec::new());
    for (c, e) in configs.iter().zip(&est) {
        let p = kernel.correlation(c).unwrap();
        let sigma = (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / TRIALS as f64).sqrt();
        let dev = (e.estimate - p).abs();
        let z = if sigma > 0.0 { dev / sigma } else if dev < 1e-12 { 0.0 } else { f64::INFINITY };
        mc_worst = mc_worst.max(z);
        if z > 3.0 {
            bad.push(format!("{c:?}: exact={p:.5} mc={:.5} z={z:.2}", e.estimate));
        }
    }
    outcome(
        exact_worst < 1e-10 && bad.is_empty(),
        format!(
            "(2,4,2): {exact_count} R1/R2 values, max error {exact_worst:.1e}; (3,6,3): {} configurations x 1e5 trajectories, max |z| = {mc_worst:.2}; outside 3 sigma: {bad:?}",
            configs.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let centre = bulk_params(&BulkRegime::new(1.0, 2.0, 1.0, 1.0, 1.0)).unwrap();
    let density = centre.density();
    let finite = SpaceTimeKernel::new(MarkovPlan::new(160, 320, 160, vec![]).unwrap())
        .correlation(&[SpaceTimePoint::new(0, 160, 160)])
        .unwrap();
    let a = (density - 2.0 / 3.0).abs() < 1e-12 && (finite - density).abs() < 2e-2;

    let mut sine_worst = 0.0f64;
    for d in -10..=10i64 {
        let k = bulk_kernel(&centre, BulkPoint::new(0, 0, d), BulkPoint::new(0, 0, 0), &[], DEFAULT_TOLERANCE).unwrap();
        let expected = if d == 0 { centre.phi / std::f64::consts::PI } else { (centre.phi * d as f64).sin() / (std::f64::consts::PI * d as f64) };
        sine_worst = sine_worst.max((k.re - expected).abs()).max(k.im.abs());
    }
    let b = sine_worst < 1e-8;

    let eps = [1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0, 1.0 / 160.0];
    let mut monotone = Vec::new();
    let mut other = Vec::new();
    for t in [0.8, 1.0, 1.2] {
        for x in [0.8, 1.0, 1.2] {
            let rows = convergence_check(&BulkRegime::new(1.0, 2.0, 1.0, t, x), &[BulkPoint::new(0, 0, 0)], &[], &eps).unwrap();
            let gaps: Vec<String> = rows.iter().map(|r| format!("{:.1e}", r.gap)).collect();
            let entry = format!("({t},{x}) [{}]", gaps.join(" "));
            if rows.windows(2).all(|w| w[1].gap < w[0].gap) {
                monotone.push(entry);
            } else {
                other.push(entry);
            }
        }
    }
    let c = monotone.len() >= 3;
    outcome(
        a && b && c,
        format!(
            "(a) phi/pi = {density:.12}, finite R1 at N=S0=T/2=160 is {finite:.6} (gap {:.1e}); (b) max sine-kernel error {sine_worst:.1e} for |d|<=10; (c) R1 gap monotone over eps=1/20..1/160 at {} of 9 grid points: {}; not monotone: {}",
            (finite - density).abs(),
            monotone.len(),
            monotone.join(", "),
            other.join(", ")
        ),
    )
}

fn max_rss_children_kib() -> i64 {
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    usage.ru_maxrss
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln() / n, b + y.ln() / n));
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        (a + (x.ln() - mx) * (y.ln() - my), b + (x.ln() - mx).powi(2))
    });
    sxy / sxx
}

/// Fastest of five runs per box, rounds interleaved so drift hits all boxes alike.
fn sweep_times(boxes: [(i64, i64, i64); 3]) -> [f64; 3] {
    let mut best = [f64::INFINITY; 3];
    for round in 0..5 {
        for (j, &(n, t, s)) in boxes.iter().enumerate() {
            let dims = BoxDims::new(n, t, s).unwrap();
            let start = Instant::now();
            sample_uniform(dims, &mut rng_from_seed(round)).unwrap();
            best[j] = best[j].min(start.elapsed().as_secs_f64());
        }
    }
    best
}

fn sweep_slope(boxes: [(i64, i64, i64); 3], pick: impl Fn((i64, i64, i64)) -> i64) -> f64 {
    let times = sweep_times(boxes);
    let pts: Vec<(f64, f64)> = boxes.iter().zip(times).map(|(&b, t)| (pick(b) as f64, t)).collect();
    slope(&pts)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("big.json");
    let start = Instant::now();
    let status = bin()
        .args(["sample", "--N", "1000", "--T", "2000", "--S", "1000", "--seed", "1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let rss_mib = max_rss_children_kib() as f64 / 1024.0;
    let valid = status.success() && {
        let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
        serde_json::from_value::<PathFamily>(v["family"].clone()).is_ok_and(|pf| pf.validate().is_ok())
    };

    let n_slope = sweep_slope([(100, 800, 200), (200, 800, 200), (400, 800, 200)], |b| b.0);
    let t_slope = sweep_slope([(200, 400, 200), (200, 800, 200), (200, 1600, 200)], |b| b.1);
    let s_slope = sweep_slope([(200, 800, 100), (200, 800, 200), (200, 800, 400)], |b| b.2);
    let slopes = [n_slope, t_slope, s_slope];
    let scaling = slopes.iter().all(|s| (s - 1.0).abs() <= 0.15);
    outcome(
        valid && secs <= 240.0 && rss_mib <= 1024.0 && scaling,
        format!(
            "sample (1000,2000,1000): {secs:.1} s ({} the 60 s target), peak RSS {rss_mib:.0} MiB, valid output {valid}; log-log slopes N {:.3}, T {:.3}, S {:.3}",
            if secs <= 60.0 { "within" } else { "above" },
            slopes[0],
            slopes[1],
            slopes[2]
        ),
    )
}

fn criterion_9() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let rendered = bin()
        .args(["render", "--paths"])
        .arg(fixtures.join("family-5-9-5.json"))
        .output()
        .unwrap();
    let golden = rendered.status.success() && rendered.stdout == std::fs::read(fixtures.join("family-5-9-5.svg")).unwrap();

    const REPLICAS: u64 = 1000;
    let profile_sections = [10i64, 25, 40];
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get()).to_string();
    let out = bin()
        .args([
            "dynamics", "--N", "50", "--T", "50", "--S0", "20", "--plan", "alternate", "--steps", "1000", "--start",
            "filled", "--snapshots", "0,20,100,1000", "--replicas", &REPLICAS.to_string(), "--profile", "10,25,40",
            "--seed", &SEED.to_string(), "--jobs", &jobs,
        ])
        .output()
        .unwrap();
    if !out.status.success() {
        return outcome(false, format!("dynamics failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut kernel = SpaceTimeKernel::new(MarkovPlan::new(50, 50, 20, vec![]).unwrap());
    let rho: HashMap<(i64, i64), f64> = profile_sections
        .iter()
        .flat_map(|&t| section_domain(BoxDims::new(50, 50, 20).unwrap(), t).unwrap().iter().map(move |x| (t, x)))
        .map(|(t, x)| ((t, x), kernel.correlation(&[SpaceTimePoint::new(0, t, x)]).unwrap()))
        .collect();
    let cells = rho.values().filter(|p| **p > 1e-12 && **p < 1.0 - 1e-12).count();
    // two-sided family-wise level 1e-3 over all cells
    let threshold = Normal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - 1e-3 / (2.0 * cells as f64));
    let mut per_snapshot = Vec::new();
    let mut final_ok = false;
    for shot in v["snapshots"].as_array().unwrap() {
        let r = shot["r"].as_u64().unwrap();
        let mut worst = 0.0f64;
        for p in shot["profiles"].as_array().unwrap() {
            let (t, lo) = (p["t"].as_i64().unwrap(), p["lo"].as_i64().unwrap());
            for (i, c) in p["counts"].as_array().unwrap().iter().enumerate() {
                let exact = rho[&(t, lo + i as i64)];
                let freq = c.as_u64().unwrap() as f64 / REPLICAS as f64;
                let sigma = (exact * (1.0 - exact) / REPLICAS as f64).sqrt();
                let z = if sigma > 0.0 { (freq - exact).abs() / sigma } else if (freq - exact).abs() < 1e-12 { 0.0 } else { f64::INFINITY };
                worst = worst.max(z);
            }
        }
        if r == 1000 {
            final_ok = worst < threshold;
        }
        per_snapshot.push(format!("r={r}: max|z|={worst:.1}"));
    }
    outcome(
        golden && final_ok,
        format!(
            "golden SVG match {golden}; (50,50,20) filled start, {REPLICAS} replicas, sections {profile_sections:?}, {cells} cells, threshold |z|<{threshold:.2} at r=1000; {}",
            per_snapshot.join(", ")
        ),
    )
}

/// Wall-clock criteria; they gate the exit status only under `ACCEPTANCE_STRICT=1`.
const TIMING: [usize; 1] = [8];

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("stochasticity and preservation", criterion_1),
        ("commutativity", criterion_2),
        ("algorithm equals matrix", criterion_3),
        ("perfect sampling", criterion_4),
        ("spectral decomposition", criterion_5),
        ("correlations", criterion_6),
        ("bulk limit", criterion_7),
        ("performance", criterion_8),
        ("figures", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let (mut failed, mut advisory) = (Vec::new(), Vec::new());
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|k| k != id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        if !o.pass {
            if TIMING.contains(&id) && !strict {
                advisory.push(id);
            } else {
                failed.push(id);
            }
        }
        println!(
            "criterion {id} {} [{name}] {} ({:.1} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if !advisory.is_empty() {
        println!("timing criteria failed on this host (advisory; set ACCEPTANCE_STRICT=1 to enforce): {advisory:?}");
    }
    if !failed.is_empty() {
        println!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
