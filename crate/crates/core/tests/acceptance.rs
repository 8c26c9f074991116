//! Acceptance run: one line per criterion, each with its worst check and
//! runtime. All criteria run before the final assertion so a failure in one
//! does not hide the others.

use std::time::{Duration, Instant};

use minorkern::kernel::species_count;
use minorkern::validate::{
    bead_det_checks, biorthogonality_checks, discrete_limit_checks, gauge_checks, lpp_bridge_checks,
    lpp_bridge_controls, oracle_checks, sampler_checks, scaling_checks, Check, SamplerProcess, BEAD_TRIALS,
    GAUGE_PAIRS, SUP_NORM_THRESHOLD,
};
use minorkern::{EnsembleSpec, ProcessSpec, Result};

const SEED: u64 = 20_240_611;

struct Outcome {
    id: usize,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    limit: Option<Duration>,
    error: Option<String>,
}

impl Outcome {
    fn pass(&self) -> bool {
        self.error.is_none()
            && !self.checks.is_empty()
            && self.checks.iter().all(|c| c.pass)
            && self.limit.is_none_or(|l| self.elapsed < l)
    }

    fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => {
                let failed = self.checks.iter().filter(|c| !c.pass).count();
                // The check closest to its threshold.
                let tight = self
                    .checks
                    .iter()
                    .max_by(|a, b| (a.statistic / a.threshold).total_cmp(&(b.statistic / b.threshold)));
                match tight {
                    Some(c) => format!(
                        "{} checks, {failed} failed; tightest '{}' {:.3e} vs threshold {:.3e}",
                        self.checks.len(),
                        c.name,
                        c.statistic,
                        c.threshold
                    ),
                    None => "no checks".into(),
                }
            }
        };
        let limit = self.limit.map_or(String::new(), |l| format!(" (limit {} s)", l.as_secs()));
        format!(
            "criterion {:>2} {verdict}: {} | {detail} | {:.1} s{limit}",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )
    }
}

fn run(id: usize, title: &'static str, limit: Option<u64>, f: impl FnOnce() -> Result<Vec<Check>>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (checks, error) = match result {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let out = Outcome {
        id,
        title,
        checks,
        elapsed,
        limit: limit.map(Duration::from_secs),
        error,
    };
    for c in &out.checks {
        eprintln!("  [{id}] {c}");
    }
    println!("{}", out.line());
    out
}

fn ensembles() -> Result<Vec<EnsembleSpec>> {
    Ok(vec![EnsembleSpec::gaussian(), EnsembleSpec::laguerre(0.5)?, EnsembleSpec::jacobi(0.5, 1.5)?])
}

fn with_prefix(checks: Vec<Check>, prefix: &str) -> Vec<Check> {
    checks.into_iter().filter(|c| c.name.starts_with(prefix)).collect()
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();

    outcomes.push(run(1, "biorthogonality, n <= 20, three ensembles", Some(60), || {
        let mut checks = Vec::new();
        for spec in ensembles()? {
            let proc = ProcessSpec::new(spec, 20)?;
            for mut c in biorthogonality_checks(&proc)? {
                c.name = format!("{:?} {}", spec.kind, c.name);
                checks.push(c);
            }
        }
        Ok(checks)
    }));

    outcomes.push(run(2, "construction vs direct kernel up to gauge, N <= 10", Some(30), || {
        let mut checks = Vec::new();
        for spec in ensembles()? {
            for n in [4, 10] {
                checks.extend(gauge_checks(&ProcessSpec::new(spec, n)?, GAUGE_PAIRS, SEED + n as u64)?);
            }
        }
        Ok(checks)
    }));

    outcomes.push(run(3, "brute-force oracle, N = 2 all ensembles and N = 3 Gaussian", Some(300), || {
        let mut checks = Vec::new();
        let mut procs: Vec<ProcessSpec> = ensembles()?
            .into_iter()
            .map(|e| ProcessSpec::new(e, 2))
            .collect::<Result<_>>()?;
        procs.push(ProcessSpec::new(EnsembleSpec::gaussian(), 3)?);
        for proc in procs {
            for mut c in oracle_checks(&proc)? {
                c.name = format!("{:?} N={} {}", proc.ensemble.kind, proc.n, c.name);
                checks.push(c);
            }
        }
        Ok(checks)
    }));

    outcomes.push(run(4, "sampler closure at 10^6 draws, N = 4", Some(600), || {
        let samplers = [
            SamplerProcess::GueMinor { n: 4 },
            SamplerProcess::LueChain { big_n: 6, n: 4 },
            SamplerProcess::Projection {
                ensemble: EnsembleSpec::gaussian(),
                top: 4,
                depth: 3,
            },
            SamplerProcess::Projection {
                ensemble: EnsembleSpec::laguerre(1.0)?,
                top: 4,
                depth: 3,
            },
            SamplerProcess::Projection {
                ensemble: EnsembleSpec::jacobi(1.0, 1.0)?,
                top: 4,
                depth: 3,
            },
        ];
        let mut checks = Vec::new();
        for (i, s) in samplers.iter().enumerate() {
            checks.extend(sampler_checks(s, 1_000_000, SEED + i as u64, 0, SUP_NORM_THRESHOLD)?);
        }
        Ok(checks)
    }));

    outcomes.push(run(5, "species counts, s <= N <= 10", None, || {
        let mut checks = Vec::new();
        for spec in ensembles()? {
            let mut worst = 0.0f64;
            for n in 1..=10 {
                let proc = ProcessSpec::new(spec, n)?;
                for s in 1..=n {
                    worst = worst.max((species_count(&proc, s)? - s as f64).abs());
                }
            }
            checks.push(Check::below(format!("{:?} max |count - s|", spec.kind), worst, 1e-5));
        }
        Ok(checks)
    }));

    let scaling = scaling_checks();
    let part = |prefix: &'static str| {
        let s = scaling.clone();
        move || s.map(|c| with_prefix(c, prefix))
    };
    outcomes.push(run(6, "soft-edge convergence to Ai'(0)^2", None, part("soft edge")));
    outcomes.push(run(7, "bulk convergence to the sine kernel", None, part("bulk")));
    outcomes.push(run(8, "hard-edge convergence, Laguerre a = 0", None, part("hard edge")));
    outcomes.push(run(9, "extended Airy determinants, N = 100, 200, 400", None, part("extended Airy")));

    outcomes.push(run(10, "bead kernel forms give equal determinants", None, || {
        bead_det_checks(BEAD_TRIALS, SEED)
    }));

    outcomes.push(run(11, "discrete law to continuum at first order", None, discrete_limit_checks));

    outcomes.push(run(12, "LPP bridge and homogeneous limit, n = 4..10, 10^5 draws", None, || {
        let ns: Vec<usize> = (4..=10).collect();
        let mut checks = lpp_bridge_checks(&ns, 100_000, SEED)?;
        checks.extend(lpp_bridge_controls(4, 100_000, SEED)?);
        Ok(checks)
    }));

    println!();
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass()).map(|o| o.line()).collect();
    for o in &outcomes {
        println!("{}", o.line());
    }
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
