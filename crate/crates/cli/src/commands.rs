use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use hexshuffle::bulk::{bulk_correlation, bulk_params, convergence_check, BulkPoint, BulkRegime};
use hexshuffle::render::{render_svg, Palette, RenderOptions};
use hexshuffle::shuffle::{rng_from_seed, run_chain, sample_uniform, ChainRng, JsonlWriter, MarkovPlan, Observer};
use hexshuffle::spectral::{mc_correlations_parallel, SpaceTimeKernel, SpaceTimePoint};
use hexshuffle::{enumerate_with_cap, section_domain, to_lozenges, BoxDims, Error, LozengeCounts, PathFamily, Result};
use serde::Serialize;
use serde_json::json;

use crate::output::{optional_seed, read_text, resolve_seed, write_text, Report};
use crate::{Common, PlanArgs, RenderArgs};

const FALLBACK_TRIALS: u64 = 100_000;

fn stream_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(i)` for `i in 0..count` over `jobs` threads, results in order.
fn parallel_map<T: Send>(count: usize, jobs: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let jobs = jobs.clamp(1, count.max(1));
    let chunks: Vec<Result<Vec<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                let f = &f;
                scope.spawn(move || (j..count).step_by(jobs).map(f).collect::<Result<Vec<T>>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut parts = chunks.into_iter().collect::<Result<Vec<_>>>()?;
    let mut iters: Vec<_> = parts.iter_mut().map(|p| p.drain(..)).collect();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        out.push(iters[i % jobs].next().expect("chunk length"));
    }
    Ok(out)
}

fn render_options(r: &RenderArgs) -> Result<RenderOptions> {
    Ok(RenderOptions {
        scale: r.scale,
        palette: r.palette.parse::<Palette>()?,
        paths: r.paths,
        max_cells: r.max_cells,
    })
}

fn write_svg(pf: &PathFamily, opts: &RenderOptions, path: &Path) -> Result<()> {
    let r = render_svg(pf, opts)?;
    if r.downsample > 1 {
        eprintln!(
            "warning: {} is wider than {} lozenges; drawn in {k}x{k} cells",
            pf.dims(),
            opts.max_cells,
            k = r.downsample
        );
    }
    write_text(Some(path), &r.svg)
}

pub fn sample(
    n: i64,
    t: i64,
    s: i64,
    count: usize,
    svg: Option<PathBuf>,
    render: &RenderArgs,
    common: &Common,
) -> Result<()> {
    let dims = BoxDims::new(n, t, s)?;
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let opts = render_options(render)?;
    let seed = resolve_seed(common.seed)?;
    let config = json!({"command": "sample", "N": n, "T": t, "S": s, "count": count});
    let mut report = Report::new(config, Some(seed), common.timing, common.out.clone());
    let samples = parallel_map(count, common.jobs, |i| sample_uniform(dims, &mut stream_rng(seed, i as u64)))?;
    if let Some(path) = &svg {
        write_svg(&samples[0], &opts, path)?;
    }
    report.insert("dims", dims)?;
    if count == 1 {
        report.insert("family", &samples[0])?;
    } else {
        report.insert("samples", &samples)?;
    }
    report.finish()
}

fn build_plan(p: &PlanArgs) -> Result<MarkovPlan> {
    match p.plan.as_str() {
        "grow" => MarkovPlan::grow(p.n, p.t, p.target.unwrap_or(p.s0)),
        "alternate" => MarkovPlan::alternate(p.n, p.t, p.s0, p.steps),
        list => {
            let eps = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<i8>()
                        .map_err(|_| Error::InvalidPlan(format!("step {s:?} is not +1 or -1")))
                })
                .collect::<Result<Vec<_>>>()?;
            MarkovPlan::new(p.n, p.t, p.s0, eps)
        }
    }
}

fn start_state(start: &str, dims: BoxDims, rng: &mut ChainRng) -> Result<PathFamily> {
    match start {
        "uniform" => sample_uniform(dims, rng),
        "filled" => PathFamily::highest(dims),
        "lowest" => PathFamily::lowest(dims),
        path => {
            let pf = parse_family(&read_text(Path::new(path))?)?;
            if pf.dims() != dims {
                return Err(Error::InvalidPlan(format!("start family lives in {}, plan starts at {dims}", pf.dims())));
            }
            Ok(pf)
        }
    }
}

fn parse_family(text: &str) -> Result<PathFamily> {
    serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed path-family JSON: {e}")))
}

pub struct DynamicsArgs {
    pub plan: PlanArgs,
    pub start: String,
    pub snapshots: Vec<usize>,
    pub svg_dir: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub replicas: usize,
    pub profile: Vec<i64>,
    pub families: bool,
    pub render: RenderArgs,
    pub common: Common,
}

#[derive(Serialize)]
struct Profile {
    t: i64,
    lo: i64,
    counts: Vec<u64>,
}

#[derive(Serialize)]
struct Snapshot {
    r: usize,
    #[serde(rename = "S")]
    s: i64,
    lozenges: LozengeCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<PathFamily>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    profiles: Vec<Profile>,
}

/// Occupation counts of the profiled sections at each snapshot.
fn empty_profiles(plan: &MarkovPlan, snapshots: &[usize], sections: &[i64]) -> Result<Vec<Vec<Profile>>> {
    snapshots
        .iter()
        .map(|&r| {
            let dims = plan.dims_at(r)?;
            sections
                .iter()
                .map(|&t| {
                    let dom = section_domain(dims, t)?;
                    Ok(Profile {
                        t,
                        lo: dom.lo,
                        counts: vec![0; dom.len()],
                    })
                })
                .collect()
        })
        .collect()
}

fn accumulate(profiles: &mut [Profile], pf: &PathFamily) {
    for p in profiles {
        for &x in pf.section(p.t as usize) {
            p.counts[(x - p.lo) as usize] += 1;
        }
    }
}

pub fn dynamics(a: DynamicsArgs) -> Result<()> {
    let plan = build_plan(&a.plan)?;
    let opts = render_options(&a.render)?;
    if a.replicas == 0 {
        return Err(Error::Domain("replicas must be at least 1".into()));
    }
    let mut snapshots = a.snapshots.clone();
    snapshots.sort_unstable();
    snapshots.dedup();
    if let Some(&r) = snapshots.last() {
        if r > plan.len() {
            return Err(Error::Domain(format!("snapshot r={r} beyond plan of length {}", plan.len())));
        }
    }
    for &t in &a.profile {
        if t < 0 || t > plan.t() {
            return Err(Error::Domain(format!("profile section {t} outside [0, {}]", plan.t())));
        }
    }
    if let Some(dir) = &a.svg_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    let seed = resolve_seed(a.common.seed)?;
    let config = json!({
        "command": "dynamics",
        "plan": plan,
        "start": a.start,
        "snapshots": snapshots,
        "replicas": a.replicas,
        "profile": a.profile,
    });
    let mut report = Report::new(config, Some(seed), a.common.timing, a.common.out.clone());

    let start0 = plan.dims_at(0)?;
    let run_replica = |i: usize, first: Option<&mut Vec<Snapshot>>| -> Result<(Vec<Vec<Profile>>, i64)> {
        let mut rng = stream_rng(seed, i as u64);
        let start = start_state(&a.start, start0, &mut rng)?;
        let mut profiles = empty_profiles(&plan, &snapshots, &a.profile)?;
        let mut shots = first;
        let mut watch = |r: usize, pf: &PathFamily| -> Result<()> {
            let Ok(j) = snapshots.binary_search(&r) else { return Ok(()) };
            accumulate(&mut profiles[j], pf);
            if let Some(shots) = shots.as_deref_mut() {
                let svg = match &a.svg_dir {
                    Some(dir) => {
                        let path = dir.join(format!("snapshot-r{r}.svg"));
                        write_svg(pf, &opts, &path)?;
                        Some(path)
                    }
                    None => None,
                };
                shots.push(Snapshot {
                    r,
                    s: pf.dims().s,
                    lozenges: to_lozenges(pf)?.counts(),
                    svg,
                    family: a.families.then(|| pf.clone()),
                    profiles: Vec::new(),
                });
            }
            Ok(())
        };
        let final_s = if i == 0 {
            match &a.trajectory {
                Some(path) => {
                    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let mut writer = JsonlWriter::new(BufWriter::new(file), None);
                    let end = run_chain(&plan, start, &mut rng, &mut [&mut watch, &mut writer as &mut dyn Observer])?;
                    std::io::Write::flush(&mut writer.into_inner()).map_err(|e| Error::Io(e.to_string()))?;
                    end
                }
                None => run_chain(&plan, start, &mut rng, &mut [&mut watch])?,
            }
        } else {
            run_chain(&plan, start, &mut rng, &mut [&mut watch])?
        };
        Ok((profiles, final_s.dims().s))
    };

    let mut shots = Vec::new();
    let (mut profiles, final_s) = run_replica(0, Some(&mut shots))?;
    let rest = parallel_map(a.replicas - 1, a.common.jobs, |i| run_replica(i + 1, None).map(|(p, _)| p))?;
    for other in rest {
        for (mine, theirs) in profiles.iter_mut().zip(other) {
            for (p, q) in mine.iter_mut().zip(theirs) {
                p.counts.iter_mut().zip(q.counts).for_each(|(c, d)| *c += d);
            }
        }
    }
    for (shot, p) in shots.iter_mut().zip(profiles) {
        shot.profiles = p;
    }
    report.insert("plan", &plan)?;
    report.insert("final_S", final_s)?;
    report.insert("snapshots", &shots)?;
    report.finish()
}

pub fn render(input: &Path, render: &RenderArgs, common: &Common) -> Result<()> {
    let opts = render_options(render)?;
    let pf = parse_family(&read_text(input)?)?;
    let r = render_svg(&pf, &opts)?;
    if r.downsample > 1 {
        eprintln!(
            "warning: {} is wider than {} lozenges; drawn in {k}x{k} cells",
            pf.dims(),
            opts.max_cells,
            k = r.downsample
        );
    }
    write_text(common.out.as_deref(), &r.svg)
}

fn parse_triples(text: &str) -> Result<Vec<(i64, i64, i64)>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let v = p
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Domain(format!("point {p:?} is not three integers")))?;
            match v[..] {
                [a, b, c] => Ok((a, b, c)),
                _ => Err(Error::Domain(format!("point {p:?} is not three integers"))),
            }
        })
        .collect()
}

fn nonnegative_r(r: i64) -> Result<usize> {
    usize::try_from(r).map_err(|_| Error::Domain(format!("step index r={r} is negative")))
}

#[derive(Serialize)]
struct CorrelationResult {
    points: Vec<SpaceTimePoint>,
    value: f64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

pub fn correlate(plan: &PlanArgs, points: &[String], mc: Option<u64>, mc_fallback: bool, common: &Common) -> Result<()> {
    let plan = build_plan(plan)?;
    let configs = points
        .iter()
        .map(|s| {
            parse_triples(s)?
                .into_iter()
                .map(|(r, t, x)| Ok(SpaceTimePoint::new(nonnegative_r(r)?, t, x)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let random = mc.is_some() || mc_fallback;
    let seed = if random { Some(resolve_seed(common.seed)?) } else { optional_seed(common.seed)? };
    let config = json!({
        "command": "correlate",
        "plan": plan,
        "points": configs,
        "mc": mc,
        "mc_fallback": mc_fallback,
        "jobs": if random { common.jobs } else { 1 },
    });
    let mut report = Report::new(config, seed, common.timing, common.out.clone());
    let mut kernel = SpaceTimeKernel::new(plan.clone());
    let mut results = Vec::with_capacity(configs.len());
    for (i, pts) in configs.iter().enumerate() {
        let simulate = |trials: u64, note: Option<String>| -> Result<CorrelationResult> {
            let seed = seed.expect("seed resolved for simulation") ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let est = mc_correlations_parallel(&plan, std::slice::from_ref(pts), trials, seed, common.jobs)?[0];
            Ok(CorrelationResult {
                points: pts.clone(),
                value: est.estimate,
                method: "monte_carlo",
                stderr: Some(est.stderr),
                trials: Some(est.trials),
                note,
            })
        };
        let res = match mc {
            Some(trials) => simulate(trials, None)?,
            None => match kernel.correlation(pts) {
                Ok(value) => CorrelationResult {
                    points: pts.clone(),
                    value,
                    method: "determinant",
                    stderr: None,
                    trials: None,
                    note: None,
                },
                Err(e @ Error::Unsupported(_)) if mc_fallback => simulate(FALLBACK_TRIALS, Some(e.to_string()))?,
                Err(e) => return Err(e),
            },
        };
        results.push(res);
    }
    report.insert("results", results)?;
    report.finish()
}

pub fn bulk(
    reg: BulkRegime,
    points: Option<&str>,
    eps: &[i8],
    tol: f64,
    convergence: &[f64],
    common: &Common,
) -> Result<()> {
    let pts = match points {
        Some(s) => parse_triples(s)?
            .into_iter()
            .map(|(r, t, x)| Ok(BulkPoint::new(nonnegative_r(r)?, t, x)))
            .collect::<Result<Vec<_>>>()?,
        None => vec![BulkPoint::new(0, 0, 0)],
    };
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(e) = convergence.iter().find(|e| e.is_nan() || **e <= 0.0) {
        return Err(Error::Domain(format!("scaling parameter {e} must be positive")));
    }
    let seed = optional_seed(common.seed)?;
    let config = json!({
        "command": "bulk-kernel",
        "regime": reg,
        "points": pts,
        "eps": eps,
        "tol": tol,
        "convergence": convergence,
    });
    let mut report = Report::new(config, seed, common.timing, common.out.clone());
    let params = bulk_params(&reg)?;
    let corr = bulk_correlation(&params, &pts, eps, tol)?;
    report.insert("params", params)?;
    report.insert("density", params.density())?;
    report.insert("entries", &corr.entries)?;
    report.insert("determinant", corr.determinant)?;
    report.insert("quadrature_error", corr.quadrature_error)?;
    report.insert("max_imag", corr.max_imag)?;
    if !convergence.is_empty() {
        report.insert("convergence", convergence_check(&reg, &pts, eps, convergence)?)?;
    }
    report.finish()
}

pub fn enumerate(n: i64, t: i64, s: i64, cap: usize, count_only: bool, common: &Common) -> Result<()> {
    let dims = BoxDims::new(n, t, s)?;
    let seed = optional_seed(common.seed)?;
    let config = json!({"command": "enumerate", "N": n, "T": t, "S": s, "cap": cap, "count_only": count_only});
    let mut report = Report::new(config, seed, common.timing, common.out.clone());
    let all = enumerate_with_cap(dims, cap)?;
    report.insert("count", all.len())?;
    if !count_only {
        report.insert("families", &all)?;
    }
    report.finish()
}
