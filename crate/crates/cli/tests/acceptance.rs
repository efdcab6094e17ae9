//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use nagaolab::curves::{self, normalized_angle, oracle::trace_oracle_exhaustive};
use nagaolab::finite_field::odd_primes_up_to;
use nagaolab::sato_tate::{
    empirical_moments, haar_second_moment, haar_second_moment_usp4, ks_distance, STMeasure1D,
};
use nagaolab::twist_surface::verify_factorization;
use nagaolab::{curve_from_poly, IntPolynomial};
use nagaolab_cli::{run, Command, ExperimentConfig, GridSpec, Interrupt};

type Outcome = Result<String, String>;

fn poly(s: &str) -> IntPolynomial {
    s.parse().unwrap()
}

const N: u64 = 100_000;

const ORACLE_CORPUS: &[&str] = &[
    "x^3 + x",
    "x^3 - x",
    "x^3 - x + 1",
    "x^3 + 1",
    "x^3 + 17",
    "2*x^3 - 3*x + 1",
    "x^3 + x^2 + x + 3",
    "x^5 - x",
    "x^5 + x",
    "x^5 - x + 1",
    "x^5 + 1",
    "x^5 + 9*x",
    "x^5 + x^3 + x",
    "x^5 + x^4 + x^2 - x",
    "4*x^5 - x^2 + 7",
    "x^6 + 1",
    "x^6 + 4",
    "x^6 + x^3 - 2",
    "x^6 + 3*x^4 + x^2 - 1",
    "x^6 + x^5 + x - 1",
    "x^6 - 5*x^4 + 10*x^3 - 5*x^2 + 2*x - 1",
    "3*x^6 + 2*x - 5",
];

fn oracle_equivalence() -> Outcome {
    let mut checks = 0;
    for src in ORACLE_CORPUS {
        let c = curve_from_poly(poly(src)).map_err(|e| e.to_string())?;
        for p in odd_primes_up_to(499) {
            if !c.is_good(p.get()) {
                continue;
            }
            let fast = curves::trace(&c, p).map_err(|e| e.to_string())?;
            let slow = trace_oracle_exhaustive(&c, p).map_err(|e| e.to_string())?;
            if fast != slow {
                return Err(format!("{} at p = {}: {} vs {}", src, p, fast.a, slow.a));
            }
            checks += 1;
        }
    }
    Ok(format!(
        "{} curves, {} exact matches",
        ORACLE_CORPUS.len(),
        checks
    ))
}

fn nagao_config(threads: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Command::Nagao, poly("T^3 + T"));
    c.d = Some(nagaolab_cli::TwistSource::Poly(poly("T^3 + T")));
    c.n = N;
    c.threads = threads;
    c
}

const MOMENT_TARGETS: &[(&str, f64)] = &[
    ("x^5 - x + 1", 1.0),
    ("x^5 + x", 2.0),
    ("x^6 + 1", 4.0),
    ("x^5 - x", 2.0),
];

fn moment_config(f: &str, threads: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Command::Moments, poly(f));
    c.n = N;
    c.grid = GridSpec::List(vec![N]);
    c.threads = threads;
    c
}

fn csv(config: &ExperimentConfig) -> Result<String, String> {
    run(config, &Interrupt::new())
        .map(|r| r.to_csv())
        .map_err(|e| e.to_string())
}

/// Field `name` of the last data row.
fn last_field(csv: &str, name: &str) -> Result<f64, String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().ok_or("empty report")?.split(',').collect();
    let row: Vec<&str> = lines.last().ok_or("no data rows")?.split(',').collect();
    let i = header
        .iter()
        .position(|h| *h == name)
        .ok_or(format!("no column {}", name))?;
    row[i]
        .parse()
        .map_err(|_| format!("bad {} '{}'", name, row[i]))
}

fn nagao_limit(reference: &str) -> Outcome {
    let s1 = last_field(reference, "S1")?;
    let s2 = last_field(reference, "S2")?;
    let msg = format!("S2(10^5) = {:.4}, |S1 - S2| = {:.4}", s2, (s1 - s2).abs());
    if (0.85..=1.15).contains(&s2) && (s1 - s2).abs() < 0.1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn table_moments(reference: &[String]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for ((f, want), csv) in MOMENT_TARGETS.iter().zip(reference) {
        let m = last_field(csv, "second_moment")?;
        ok &= (m - want).abs() <= 0.25;
        parts.push(format!("{} -> {:.3} (want {})", f, m, want));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn haar_oracles() -> Outcome {
    let one_d = [
        (STMeasure1D::SatoTate, 1.0),
        (STMeasure1D::Uniform, 2.0),
        (STMeasure1D::HalfUniformDirac, 1.0),
    ];
    let mut worst: f64 = 0.0;
    for (m, want) in one_d {
        worst = worst.max((haar_second_moment(m) - want).abs());
    }
    let usp4 = (haar_second_moment_usp4() - 1.0).abs();
    let msg = format!("1-D max error {:.1e}, USp(4) error {:.1e}", worst, usp4);
    if worst <= 1e-9 && usp4 <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn peterson_exactness() -> Outcome {
    let mut passed = Vec::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            let f = IntPolynomial::new(vec![1, a, b, b, a, 1]);
            if !f.is_squarefree() {
                continue;
            }
            let report = verify_factorization(&f.substitute_square(), &f, 2, 1000)
                .map_err(|e| e.to_string())?;
            if !report.passed() {
                return Err(format!(
                    "{} fails at p = {:?}",
                    f,
                    report.least_failing_prime()
                ));
            }
            passed.push(f);
        }
    }
    if passed.len() >= 5 {
        Ok(format!(
            "{} palindromic quintics pass up to 1000",
            passed.len()
        ))
    } else {
        Err(format!(
            "only {} palindromic quintics checked",
            passed.len()
        ))
    }
}

fn cm_dichotomy() -> Outcome {
    let c = curve_from_poly(poly("x^3 + x")).map_err(|e| e.to_string())?;
    let mut records = Vec::new();
    for p in odd_primes_up_to(N - 1) {
        let r = curves::trace(&c, p).map_err(|e| e.to_string())?;
        if (r.a == 0) != (p.get() % 4 == 3) {
            return Err(format!("a_{} = {} breaks the mod-4 rule", p, r.a));
        }
        records.push(r);
    }
    let zero = empirical_moments(&records)
        .map_err(|e| e.to_string())?
        .zero_fraction;
    let angles: Vec<f64> = records
        .iter()
        .filter(|r| r.a != 0)
        .map(|&r| normalized_angle(r))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let ks = ks_distance(&angles, STMeasure1D::Uniform).map_err(|e| e.to_string())?;
    let msg = format!("zero fraction {:.4}, KS to uniform {:.4}", zero, ks);
    if (0.49..=0.51).contains(&zero) && ks <= 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism(reference: &[String], configs: &dyn Fn(usize) -> Vec<ExperimentConfig>) -> Outcome {
    for threads in [4, 8] {
        for (i, config) in configs(threads).iter().enumerate() {
            if csv(config)? != reference[i] {
                return Err(format!("report {} differs with {} workers", i, threads));
            }
        }
    }
    Ok(format!(
        "{} reports identical under 1, 4 and 8 workers",
        reference.len()
    ))
}

fn main() -> ExitCode {
    let all_configs = |threads: usize| {
        let mut v = vec![nagao_config(threads)];
        v.extend(
            MOMENT_TARGETS
                .iter()
                .map(|(f, _)| moment_config(f, threads)),
        );
        v
    };
    let start = Instant::now();
    let reference: Result<Vec<String>, String> = all_configs(1).iter().map(csv).collect();

    let mut results: Vec<(&str, Outcome)> = vec![("oracle equivalence", oracle_equivalence())];
    match &reference {
        Ok(r) => {
            results.push(("Nagao limit for the CM self-twist", nagao_limit(&r[0])));
            results.push(("second moments of table curves", table_moments(&r[1..])));
        }
        Err(e) => {
            results.push(("Nagao limit for the CM self-twist", Err(e.clone())));
            results.push(("second moments of table curves", Err(e.clone())));
        }
    }
    results.push(("Haar moment integrals", haar_oracles()));
    results.push(("trace identity for f(T^2)", peterson_exactness()));
    results.push(("CM dichotomy", cm_dichotomy()));
    results.push((
        "determinism across worker counts",
        match &reference {
            Ok(r) => determinism(r, &all_configs),
            Err(e) => Err(e.clone()),
        },
    ));

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(msg) => println!("criterion {} PASS  {}: {}", i + 1, name, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {}: {}", i + 1, name, msg);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
