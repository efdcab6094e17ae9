//! Command orchestration. Workers compute per-prime values over blocks of
//! primes; this thread owns every file write and merges results in
//! ascending order.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use log::{debug, info};
use nagaolab::curves::{self, l_polynomial_genus2_capped, normalized_angle, DEFAULT_LPOLY_CAP};
use nagaolab::finite_field::{legendre, odd_primes_up_to, primes_in};
use nagaolab::sato_tate::{
    atom_mass_gap, empirical_moments, identify_in, ks_distance, predict_rank, STMeasure1D,
    SatoTateTable,
};
use nagaolab::twist_surface::{
    self, char_sum, peterson_d, validate_grid, verify_mixed_factorization, AverageTrace,
    FactorizationReport, NagaoSeries, DEFAULT_N_CAP,
};
use nagaolab::{
    curve_from_poly, BadPrimes, BadReason, CurveSpec, Error, FiberMode, IntPolynomial, Prime,
    TraceRecord, TwistSurfaceSpec,
};
use rayon::prelude::*;

use crate::cache::TraceCache;
use crate::config::{Command, ExperimentConfig, TwistSource};
use crate::report::{Cell, Report};
use crate::CliError;

const BLOCK: usize = 4096;

/// Cooperative cancellation flag, checked between prime blocks.
#[derive(Clone, Debug, Default)]
pub struct Interrupt(Arc<AtomicBool>);

impl Interrupt {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn trigger(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_set(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

/// Runs `config` on a pool of `config.threads` workers.
pub fn run(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {}", e)))?;
    pool.install(|| match config.command {
        Command::Trace => run_trace(config, stop),
        Command::Lpoly => run_lpoly(config, stop),
        Command::Nagao => run_nagao(config, stop),
        Command::Moments => run_moments(config, stop),
        Command::StClassify => run_st_classify(config, stop),
        Command::Peterson => run_peterson(config),
        Command::FactorCheck => run_factor_check(config),
    })
}

/// Maps `work` over `items` block by block, keeping input order.
fn blocked<T: Sync, U: Send + Clone>(
    items: &[T],
    stop: &Interrupt,
    label: &str,
    work: impl Fn(&T) -> Result<U, Error> + Sync,
    mut sink: impl FnMut(&[U]) -> Result<(), CliError>,
) -> Result<Vec<U>, CliError> {
    let mut out = Vec::with_capacity(items.len());
    let total = items.len();
    for block in items.chunks(BLOCK) {
        if stop.is_set() {
            return Err(CliError::Interrupted);
        }
        let done = block.par_iter().map(&work).collect::<Result<Vec<_>, _>>()?;
        sink(&done)?;
        out.extend(done);
        debug!("{}: {}/{}", label, out.len(), total);
    }
    Ok(out)
}

fn bad_list(n: u64, reason: impl Fn(u64) -> Option<BadReason>) -> Vec<(u64, BadReason)> {
    primes_in(2, n.saturating_add(1))
        .into_iter()
        .filter_map(|p| reason(p).map(|r| (p, r)))
        .collect()
}

fn open_cache(
    config: &ExperimentConfig,
    curve: &CurveSpec,
) -> Result<Option<TraceCache>, CliError> {
    let Some(dir) = &config.cache_dir else {
        return Ok(None);
    };
    let cache = TraceCache::open(dir, curve.poly())?;
    info!(
        "cache {} holds {} traces",
        cache.path().display(),
        cache.records().len()
    );
    if config.verify_cache {
        let cache = cache.verify(curve)?;
        info!("cache verified");
        return Ok(Some(cache));
    }
    Ok(Some(cache))
}

/// `a_p` for every good `p <= n`, reading and extending the cache.
pub fn curve_traces(
    curve: &CurveSpec,
    n: u64,
    mut cache: Option<TraceCache>,
    stop: &Interrupt,
) -> Result<Vec<TraceRecord>, CliError> {
    let primes: Vec<Prime> = odd_primes_up_to(n)
        .into_iter()
        .filter(|p| curve.is_good(p.get()))
        .collect();
    let mut out = Vec::with_capacity(primes.len());
    if let Some(c) = &cache {
        let hit: Vec<TraceRecord> = c
            .records()
            .iter()
            .take_while(|r| r.p <= n)
            .copied()
            .collect();
        let aligned =
            hit.len() <= primes.len() && hit.iter().zip(&primes).all(|(r, p)| r.p == p.get());
        if !aligned {
            return Err(c.reject("cached primes are not the good primes of the curve".into()));
        }
        out.extend(hit);
    }
    let rest = &primes[out.len()..];
    if !rest.is_empty() {
        info!(
            "{}: computing {} traces up to {}",
            curve.poly(),
            rest.len(),
            n
        );
    }
    let fresh = blocked(
        rest,
        stop,
        "traces",
        |&p| curves::trace(curve, p),
        |recs| match cache.as_mut() {
            Some(c) => c.append(recs),
            None => Ok(()),
        },
    )?;
    out.extend(fresh);
    Ok(out)
}

fn traces_for(
    config: &ExperimentConfig,
    curve: &CurveSpec,
    stop: &Interrupt,
) -> Result<Vec<TraceRecord>, CliError> {
    let cache = open_cache(config, curve)?;
    curve_traces(curve, config.n, cache, stop)
}

fn run_trace(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    let curve = curve_from_poly(config.f.clone())?;
    let mut report = Report::new(&["p", "a"]);
    let records = match config.p {
        Some(p) => {
            let p = Prime::new(p)?;
            let cached = open_cache(config, &curve)?.and_then(|c| c.get(p.get()));
            let a = match cached {
                Some(a) if curve.is_good(p.get()) => a,
                _ => curves::trace(&curve, p)?.a,
            };
            report.bad_primes = bad_list(p.get(), |q| curve.bad_primes().reason(q));
            vec![TraceRecord { p: p.get(), a }]
        }
        None => {
            report.bad_primes = bad_list(config.n, |q| curve.bad_primes().reason(q));
            traces_for(config, &curve, stop)?
        }
    };
    for r in records {
        report.push(vec![r.p.into(), r.a.into()]);
    }
    Ok(report)
}

fn run_lpoly(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    let curve = curve_from_poly(config.f.clone())?;
    if curve.genus() != 2 {
        return Err(Error::WrongGenus {
            expected: 2,
            actual: curve.genus(),
        }
        .into());
    }
    let mut report = Report::new(&["p", "a", "b"]);
    let primes = match config.p {
        Some(p) => vec![Prime::new(p)?],
        None => {
            if config.n > DEFAULT_LPOLY_CAP {
                return Err(Error::CapExceeded {
                    what: "L-polynomial cutoff",
                    p: config.n,
                    cap: DEFAULT_LPOLY_CAP,
                }
                .into());
            }
            odd_primes_up_to(config.n)
                .into_iter()
                .filter(|p| curve.is_good(p.get()))
                .collect()
        }
    };
    let top = primes.last().map_or(config.n, |p| p.get());
    report.bad_primes = bad_list(top, |q| curve.bad_primes().reason(q));
    let lp = blocked(
        &primes,
        stop,
        "lpoly",
        |&p| l_polynomial_genus2_capped(&curve, p, DEFAULT_LPOLY_CAP),
        |_| Ok(()),
    )?;
    for l in lp {
        report.push(vec![l.p.into(), l.a.into(), l.b.into()]);
    }
    Ok(report)
}

fn twist_polynomial(config: &ExperimentConfig) -> Result<IntPolynomial, CliError> {
    match &config.d {
        None => Ok(config.f.clone()),
        Some(TwistSource::Poly(d)) => Ok(d.clone()),
        Some(TwistSource::AutoPeterson) => {
            let sigma = config
                .sigma
                .as_ref()
                .ok_or_else(|| CliError::Config("--D auto-peterson needs --sigma".into()))?;
            Ok(peterson_d(&config.f, sigma)?.d)
        }
    }
}

/// `sum_t chi(f(t))` recovered from `a_p(f)`.
fn char_sum_from_trace(f: &IntPolynomial, p: Prime, a: i64) -> i64 {
    match f.degree() {
        Some(d) if d % 2 == 0 => -a - legendre(f.leading(), p) as i64,
        _ => -a,
    }
}

fn run_nagao(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    let d = twist_polynomial(config)?;
    let surface = TwistSurfaceSpec::new(config.f.clone(), d.clone(), config.mode)?;
    let grid = validate_grid(config.n, &config.grid.points(config.n), DEFAULT_N_CAP)?;
    let records: Vec<AverageTrace> = match config.mode {
        FiberMode::FastTwist => {
            let traces = traces_for(config, surface.curve(), stop)?;
            let good: Vec<TraceRecord> = traces
                .into_iter()
                .filter(|r| surface.is_good(r.p))
                .collect();
            let self_twist = d == config.f;
            blocked(
                &good,
                stop,
                "twist sums",
                |r| {
                    let p = Prime::new(r.p)?;
                    let chi = if self_twist {
                        char_sum_from_trace(&config.f, p, r.a)
                    } else {
                        char_sum(&d, p)
                    };
                    Ok(AverageTrace::from_parts(r.p, r.a, chi))
                },
                |_| Ok(()),
            )?
        }
        FiberMode::Fiberwise => {
            let primes: Vec<Prime> = odd_primes_up_to(config.n)
                .into_iter()
                .filter(|p| surface.is_good(p.get()))
                .collect();
            blocked(
                &primes,
                stop,
                "fibers",
                |&p| twist_surface::average_trace(&surface, p),
                |_| Ok(()),
            )?
        }
    };
    let series = NagaoSeries::accumulate(records, &grid);
    let mut report = Report::new(&["N", "S1", "S2", "n_primes"]);
    report.bad_primes = bad_list(config.n, |p| surface.bad_reason(p));
    for pt in &series.points {
        report.push(vec![
            pt.n.into(),
            pt.s1.into(),
            pt.s2.into(),
            pt.n_primes.into(),
        ]);
    }
    if let Some(last) = series.last() {
        info!("S1({}) = {:.6}, S2 = {:.6}", last.n, last.s1, last.s2);
    }
    Ok(report)
}

const MOMENT_COLUMNS: [&str; 9] = [
    "N",
    "n_primes",
    "second_moment",
    "fourth_moment",
    "zero_fraction",
    "ks_sato_tate",
    "ks_uniform",
    "ks_half_uniform_dirac",
    "atom_mass_gap",
];

fn run_moments(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    let curve = curve_from_poly(config.f.clone())?;
    let grid = validate_grid(config.n, &config.grid.points(config.n), DEFAULT_N_CAP)?;
    let traces = traces_for(config, &curve, stop)?;
    let angles: Option<Vec<f64>> = if curve.genus() == 1 {
        Some(
            traces
                .iter()
                .map(|&r| normalized_angle(r))
                .collect::<Result<_, _>>()?,
        )
    } else {
        None
    };
    let mut report = Report::new(&MOMENT_COLUMNS);
    report.bad_primes = bad_list(config.n, |p| curve.bad_primes().reason(p));
    for &n in &grid {
        let k = traces.partition_point(|r| r.p <= n);
        if k == 0 {
            let mut row = vec![Cell::UInt(n), Cell::UInt(0)];
            row.resize(MOMENT_COLUMNS.len(), Cell::Empty);
            report.push(row);
            continue;
        }
        let m = empirical_moments(&traces[..k])?;
        let mut row: Vec<Cell> = vec![
            n.into(),
            m.n_primes.into(),
            m.second_moment.into(),
            m.fourth_moment.into(),
            m.zero_fraction.into(),
        ];
        match &angles {
            Some(all) => {
                let a = &all[..k];
                let ks = |m: STMeasure1D| -> Cell { ks_distance(a, m).ok().into() };
                row.push(ks(STMeasure1D::SatoTate));
                row.push(ks(STMeasure1D::Uniform));
                row.push(ks(STMeasure1D::HalfUniformDirac));
                row.push(atom_mass_gap(a, STMeasure1D::HalfUniformDirac)?.into());
            }
            None => row.resize(MOMENT_COLUMNS.len(), Cell::Empty),
        }
        report.push(row);
    }
    Ok(report)
}

fn run_st_classify(config: &ExperimentConfig, stop: &Interrupt) -> Result<Report, CliError> {
    let curve = curve_from_poly(config.f.clone())?;
    let table = match &config.st_table {
        Some(path) => SatoTateTable::load(path)?,
        None => SatoTateTable::embedded(),
    };
    let traces = traces_for(config, &curve, stop)?;
    let moments = empirical_moments(&traces)?;
    let class = identify_in(&table, moments.second_moment, config.tolerance)?;
    let rank = class
        .moment_class
        .and_then(|c| predict_rank(curve.poly(), c).ok());
    let names: Vec<&str> = class.candidates.iter().map(|r| r.name.as_str()).collect();
    let mut report = Report::new(&[
        "N",
        "n_primes",
        "second_moment",
        "moment_class",
        "candidates",
        "predicted_rank",
        "no_class",
    ]);
    report.bad_primes = bad_list(config.n, |p| curve.bad_primes().reason(p));
    report.push(vec![
        config.n.into(),
        moments.n_primes.into(),
        moments.second_moment.into(),
        class.moment_class.map(u64::from).into(),
        names.join(";").into(),
        rank.map(u64::from).into(),
        class.no_class().into(),
    ]);
    Ok(report)
}

fn run_peterson(config: &ExperimentConfig) -> Result<Report, CliError> {
    let sigma = config
        .sigma
        .ok_or_else(|| CliError::Config("peterson needs --sigma".into()))?;
    let tw = peterson_d(&config.f, &sigma)?;
    let mut report = Report::new(&[
        "f",
        "sigma",
        "D",
        "denominator",
        "square_multiplier",
        "D_rational",
    ]);
    report.push(vec![
        config.f.to_string().into(),
        sigma.to_string().into(),
        tw.d.display_with('T').to_string().into(),
        tw.denominator.to_string().into(),
        tw.square_multiplier().to_string().into(),
        tw.rational_display('T').into(),
    ]);
    Ok(report)
}

fn run_factor_check(config: &ExperimentConfig) -> Result<Report, CliError> {
    if config.d.is_none() {
        return Err(CliError::Config("factor-check needs --D".into()));
    }
    let d = twist_polynomial(config)?;
    let outcome = verify_mixed_factorization(&d, &config.f, config.r, &config.s_curves, config.n)?;
    let mut bads = vec![BadPrimes::of(&d)?, BadPrimes::of(&config.f)?];
    for s in &config.s_curves {
        bads.push(BadPrimes::of(s)?);
    }
    let mut report = Report::new(&[
        "D",
        "f",
        "r",
        "N",
        "result",
        "least_failing_prime",
        "lhs",
        "rhs",
        "primes_checked",
    ]);
    report.bad_primes = bad_list(config.n, |p| bads.iter().find_map(|b| b.reason(p)));
    let (result, p, lhs, rhs) = match outcome {
        FactorizationReport::Pass { .. } => ("pass", None, None, None),
        FactorizationReport::Fail { p, lhs, rhs, .. } => ("fail", Some(p), Some(lhs), Some(rhs)),
    };
    match p {
        Some(p) => info!("trace identity fails at p = {}", p),
        None => info!("trace identity holds for all good p <= {}", config.n),
    }
    report.push(vec![
        d.display_with('T').to_string().into(),
        config.f.to_string().into(),
        config.r.into(),
        config.n.into(),
        result.to_string().into(),
        p.into(),
        lhs.into(),
        rhs.into(),
        (outcome.primes_checked() as u64).into(),
    ]);
    Ok(report)
}
