//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use relent_core::channels::{apply_channel, apply_complementary, basis_projectors, partial_trace_kraus, pinching_kraus, stinespring_isometry};
use relent_core::entropy::relative_entropy;
use relent_core::inequalities::{
    channel_complement_gap, orbit_local_min, sampled_orbit_range, superadditivity_gap, uniform_monotonicity_gap,
    unitary_orbit_extrema, violation_search, weak_superadditivity_slack, InequalityId, SearchConfig, StateClass,
    Verdict,
};
use relent_core::linalg::{max_norm, trace_distance, DensityMatrix, Subsystem};
use relent_core::states::{
    example1_states, example2_states, hayashi_pair, random_channel, random_density, random_product_sigma,
    random_unitary, SeededGenerator,
};

const TOL_CLOSED_FORM: f64 = 1e-9;
const TOL_ORACLE: f64 = 1e-12;
const TOL_REDUCTION: f64 = 1e-9;
const TOL_COMPLEMENT: f64 = 1e-10;
const TOL_HAYASHI_EQUAL: f64 = 1e-10;
const MIN_HAYASHI_DISTANCE: f64 = 1e-6;
const TOL_BRACKET: f64 = 1e-9;
const TOL_LOCAL_MIN: f64 = 1e-3;
const TOL_CAMPAIGN: f64 = 1e-9;
const TOL_PROPERTY: f64 = 1e-9;
const TOL_DILATION: f64 = 1e-10;
const TOL_VERDICT: f64 = 1e-8;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: relent_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Scalar `sum p ln(p/q)`, the oracle for commuting states.
fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(x, _)| **x > 0.0).map(|(x, y)| x * (x / y).ln()).sum()
}

fn criterion_1() -> Outcome {
    for i in 1..=9 {
        let lambda = i as f64 / 10.0;
        let pair = ok(example1_states(lambda, 2, 2))?;
        let r = ok(superadditivity_gap(&pair))?;
        let expected = -lambda.ln();
        let terms = [r.lhs.to_f64(), r.rhs[0].to_f64(), r.rhs[1].to_f64()];
        ensure(terms.iter().all(|t| (t - expected).abs() <= TOL_CLOSED_FORM), || {
            format!("lambda={lambda}: terms {terms:?} vs {expected}")
        })?;
        ensure((r.slack() - lambda.ln()).abs() <= TOL_CLOSED_FORM && r.verdict == Verdict::Violated, || {
            format!("lambda={lambda}: slack {}", r.slack())
        })?;
    }
    Ok("9 lambdas, every term = -ln(lambda), slack = ln(lambda)".into())
}

/// Diagonal weights as printed, listed over |00>, |10>, |01>, |11>.
const EX2_RHO_LISTED: [f64; 4] = [0.1568, 0.7270, 0.0804, 0.0358];
const EX2_SIGMA_LISTED: [f64; 4] = [0.3061, 0.4243, 0.1713, 0.0983];
const EX2_PRINTED_MARGINALS: [[f64; 2]; 4] = [[0.2372, 0.7628], [0.4774, 0.5226], [0.8838, 0.1162], [0.7304, 0.2696]];

fn ex2_oracle() -> (f64, [[f64; 2]; 4]) {
    // listed order (a, b): (0,0), (1,0), (0,1), (1,1)
    let marg = |w: &[f64; 4]| ([w[0] + w[2], w[1] + w[3]], [w[0] + w[1], w[2] + w[3]]);
    let (ra, rb) = marg(&EX2_RHO_LISTED);
    let (sa, sb) = marg(&EX2_SIGMA_LISTED);
    let slack = kl(&EX2_RHO_LISTED, &EX2_SIGMA_LISTED) - kl(&ra, &sa) - kl(&rb, &sb);
    (slack, [ra, sa, rb, sb])
}

fn criterion_2() -> Outcome {
    let (oracle, marginals) = ex2_oracle();
    let pair = example2_states();
    let r = ok(superadditivity_gap(&pair))?;
    ensure((r.slack() - oracle).abs() <= TOL_ORACLE, || format!("slack {} vs oracle {oracle}", r.slack()))?;
    ensure(r.verdict == Verdict::Violated, || format!("verdict {}", r.verdict))?;
    let computed = [
        ok(pair.rho.reduce(Subsystem::A))?.diagonal(),
        ok(pair.sigma.reduce(Subsystem::A))?.diagonal(),
        ok(pair.rho.reduce(Subsystem::B))?.diagonal(),
        ok(pair.sigma.reduce(Subsystem::B))?.diagonal(),
    ];
    for ((c, o), printed) in computed.iter().zip(&marginals).zip(&EX2_PRINTED_MARGINALS) {
        for k in 0..2 {
            let rounded = (c[k] * 1e4).round() / 1e4;
            ensure(rounded == printed[k] && (c[k] - o[k]).abs() <= TOL_ORACLE, || {
                format!("reduced weight {} vs printed {}", c[k], printed[k])
            })?;
        }
    }
    Ok(format!("slack {:.10} (oracle {:.10}), violated; marginals match at 4 decimals", r.slack(), oracle))
}

fn criterion_3() -> Outcome {
    let pair = example2_states();
    let base = ok(superadditivity_gap(&pair))?.slack();
    let k = ok(partial_trace_kraus([2, 2], Subsystem::B))?;
    let r = ok(channel_complement_gap(&pair.rho, &pair.sigma, &k))?;
    ensure((r.slack() - base).abs() <= TOL_REDUCTION, || format!("slack {} vs {base}", r.slack()))?;
    let rb = ok(pair.rho.reduce(Subsystem::B))?;
    let sb = ok(pair.sigma.reduce(Subsystem::B))?;
    let direct = ok(relative_entropy(&rb, &sb))?.to_f64();
    let via_w = ok(relative_entropy(&ok(apply_complementary(&k, &pair.rho))?, &ok(apply_complementary(&k, &pair.sigma))?))?
        .to_f64();
    ensure((via_w - direct).abs() <= TOL_COMPLEMENT, || format!("complement {via_w} vs {direct}"))?;
    ensure((r.rhs[1].to_f64() - direct).abs() <= TOL_COMPLEMENT, || "report term differs".into())?;
    Ok(format!("slack difference {:.1e}, complement term difference {:.1e}", (r.slack() - base).abs(), (via_w - direct).abs()))
}

fn criterion_4() -> Outcome {
    let mut min_distance = f64::INFINITY;
    for d in 2..=4usize {
        for draw in 0..100u64 {
            let mut gen = SeededGenerator::new(SEED, (d as u64) * 1000 + draw);
            let (pair, pinch) = ok(hayashi_pair(d, &mut gen))?;
            let lhs = ok(relative_entropy(&pair.rho, &pair.sigma))?.to_f64();
            let pinched = ok(relative_entropy(&ok(apply_channel(&pinch, &pair.rho))?, &ok(apply_channel(&pinch, &pair.sigma))?))?
                .to_f64();
            ensure((lhs - pinched).abs() <= TOL_HAYASHI_EQUAL, || format!("d={d} draw={draw}: {lhs} vs {pinched}"))?;
            let dist = ok(trace_distance(&ok(apply_complementary(&pinch, &pair.rho))?, &ok(apply_complementary(&pinch, &pair.sigma))?))?;
            ensure(dist > MIN_HAYASHI_DISTANCE, || format!("d={d} draw={draw}: complement distance {dist}"))?;
            min_distance = min_distance.min(dist);
        }
    }
    Ok(format!("300 pairs, smallest complement trace distance {min_distance:.3e}"))
}

fn criterion_5() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000u64 {
        let d = 2 + (i % 3) as usize;
        let mut gen = SeededGenerator::new(SEED, 50_000 + i);
        let rho = ok(random_density(d, d, &mut gen))?;
        let sigma = ok(random_density(d, d, &mut gen))?;
        let e = ok(unitary_orbit_extrema(&rho, &sigma))?;
        let (lo, hi) = ok(sampled_orbit_range(&rho, &sigma, 1000, &mut gen))?;
        worst = worst.max(e.min_value - lo).max(hi - e.max_value);
        ensure(lo >= e.min_value - TOL_BRACKET && hi <= e.max_value + TOL_BRACKET, || {
            format!("pair {i}: samples [{lo}, {hi}] outside [{}, {}]", e.min_value, e.max_value)
        })?;
    }
    let mut worst_gap: f64 = 0.0;
    for i in 0..30u64 {
        let d = 2 + (i % 3) as usize;
        let mut gen = SeededGenerator::new(SEED, 60_000 + i);
        let rho = ok(random_density(d, d, &mut gen))?;
        let sigma = ok(random_density(d, d, &mut gen))?;
        let e = ok(unitary_orbit_extrema(&rho, &sigma))?;
        let local = ok(orbit_local_min(&rho, &sigma, 3, 400, &mut gen))?;
        ensure(local >= e.min_value - TOL_BRACKET && local - e.min_value <= TOL_LOCAL_MIN, || {
            format!("pair {i}: local min {local} vs analytic {}", e.min_value)
        })?;
        worst_gap = worst_gap.max(local - e.min_value);
    }
    Ok(format!("1e6 samples bracketed (max excursion {worst:.2e}); local search within {worst_gap:.1e} of min"))
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for (dims, trials) in [([2, 2], 100_000u64), ([2, 3], 10_000)] {
        let mut config = SearchConfig::new(InequalityId::WeakSuperadditivity, dims, StateClass::FullRank, trials, SEED);
        config.tol_verdict = TOL_CAMPAIGN;
        let s = ok(violation_search(&config))?.summary;
        ensure(s.violations == 0 && s.unconfirmed == 0 && s.min_slack.0 >= -TOL_CAMPAIGN, || {
            format!("{dims:?}: {} violations, min slack {}", s.violations, s.min_slack.0)
        })?;
        lines.push(format!("{}x{} min slack {:.4}", dims[0], dims[1], s.min_slack.0));
    }

    // sorted-vector oracle on the diagonal counterexample
    let (_, [ra, sa, rb, sb]) = ex2_oracle();
    let desc = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let mut asc = EX2_SIGMA_LISTED.to_vec();
    asc.sort_by(f64::total_cmp);
    let oracle = kl(&desc(&EX2_RHO_LISTED), &asc) - kl(&desc(&ra), &desc(&sa)) - kl(&desc(&rb), &desc(&sb));
    let r = ok(weak_superadditivity_slack(&example2_states()))?;
    ensure((r.slack() - oracle).abs() <= TOL_ORACLE && r.verdict == Verdict::Holds, || {
        format!("example slack {} vs oracle {oracle}", r.slack())
    })?;
    Ok(format!("0 violations; {}; example slack {:.4}", lines.join(", "), r.slack()))
}

fn property<F>(name: &str, draws: u64, stream: u64, mut check: F) -> Result<String, String>
where
    F: FnMut(&mut SeededGenerator) -> Result<f64, String>,
{
    let mut worst = f64::INFINITY;
    for i in 0..draws {
        let mut gen = SeededGenerator::new(SEED, stream + i);
        let slack = check(&mut gen)?;
        ensure(slack >= -TOL_PROPERTY, || format!("{name}: draw {i} slack {slack}"))?;
        worst = worst.min(slack);
    }
    Ok(format!("{name} {worst:.1e}"))
}

fn random_pair(d: usize, gen: &mut SeededGenerator) -> Result<(DensityMatrix, DensityMatrix), String> {
    Ok((ok(random_density(d, d, gen))?, ok(random_density(d, d, gen))?))
}

fn criterion_7() -> Outcome {
    const N: u64 = 10_000;
    let dim = |gen: &mut SeededGenerator| 2 + (gen.seed() as usize + gen.stream() as usize) % 3;
    let results = [
        property("lindblad", N, 1 << 20, |gen| {
            let d = dim(gen);
            let (rho, sigma) = random_pair(d, gen)?;
            let k = ok(random_channel(d, 2 + d % 2, 2, gen))?;
            let before = ok(relative_entropy(&rho, &sigma))?.to_f64();
            let after = ok(relative_entropy(&ok(apply_channel(&k, &rho))?, &ok(apply_channel(&k, &sigma))?))?.to_f64();
            Ok(before - after)
        })?,
        property("klein", N, 2 << 20, |gen| {
            let d = dim(gen);
            let rank = 1 + gen.stream() as usize % d;
            let rho = ok(random_density(d, rank, gen))?;
            let sigma = ok(random_density(d, d, gen))?;
            Ok(ok(relative_entropy(&rho, &sigma))?.to_f64())
        })?,
        property("product-sigma", N, 3 << 20, |gen| {
            let dims = if gen.stream() % 2 == 0 { [2, 2] } else { [2, 3] };
            Ok(ok(superadditivity_gap(&ok(random_product_sigma(dims, gen))?))?.slack())
        })?,
        property("isometric-invariance", N, 4 << 20, |gen| {
            let d = dim(gen);
            let (rho, sigma) = random_pair(d, gen)?;
            let v = ok(stinespring_isometry(&ok(random_channel(d, 2, 2, gen))?))?;
            let before = ok(relative_entropy(&rho, &sigma))?.to_f64();
            let after = ok(relative_entropy(&ok(v.conjugate(&rho))?, &ok(v.conjugate(&sigma))?))?.to_f64();
            Ok(-(before - after).abs())
        })?,
        property("uniform", N, 5 << 20, |gen| {
            let d = dim(gen);
            let rho = ok(random_density(d, 1 + gen.stream() as usize % d, gen))?;
            let k = ok(pinching_kraus(&basis_projectors(&random_unitary(d, gen))))?;
            Ok(ok(uniform_monotonicity_gap(&rho, &k))?.slack())
        })?,
        property("stinespring", N, 6 << 20, |gen| {
            let d_in = dim(gen);
            let d_out = 2 + gen.stream() as usize % 3;
            let env = 1 + gen.stream() as usize % 4;
            let k = ok(random_channel(d_in, d_out, env, gen))?;
            let rho = ok(random_density(d_in, d_in, gen))?;
            let v = ok(stinespring_isometry(&k))?;
            let e1 = max_norm(&(ok(v.trace_env(&rho))?.matrix() - ok(apply_channel(&k, &rho))?.matrix()));
            let e2 = max_norm(&(ok(v.trace_output(&rho))?.matrix() - ok(apply_complementary(&k, &rho))?.matrix()));
            let err = e1.max(e2);
            ensure(err <= TOL_DILATION, || format!("stinespring: dilation error {err}"))?;
            Ok(TOL_DILATION - err)
        })?,
    ];
    Ok(format!("6 x {N} draws, worst slacks: {}", results.join(", ")))
}

fn criterion_8() -> Outcome {
    let config = SearchConfig::new(InequalityId::Superadditivity, [2, 2], StateClass::Diagonal, 100_000, 7);
    let stream = |c: &SearchConfig| -> Result<(String, u64), String> {
        let out = ok(violation_search(c))?;
        let text = out.reports.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
        Ok((text, out.summary.violations))
    };
    let (first, violations) = stream(&config)?;
    let (second, _) = stream(&config)?;
    ensure(violations >= 1, || "no violation found".into())?;
    ensure(first == second, || "report streams differ between runs".into())?;
    ensure(config.tol_verdict == TOL_VERDICT, || "unexpected default tolerance".into())?;
    Ok(format!("{violations} confirmed violations in 1e5 trials; {} bytes reproduced", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 example-1 closed form", criterion_1, Duration::from_secs(1)),
        ("2 example-2 violation", criterion_2, Duration::from_secs(1)),
        ("3 partial-trace reduction", criterion_3, Duration::from_secs(1)),
        ("4 pinching counterexample", criterion_4, Duration::from_secs(5)),
        ("5 unitary-orbit extrema", criterion_5, Duration::from_secs(60)),
        ("6 weak-superadditivity campaign", criterion_6, Duration::from_secs(120)),
        ("7 validity regression suite", criterion_7, Duration::from_secs(120)),
        ("8 random-search reproduction", criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}")).map(|_| detail)
        });
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({elapsed:.2?}) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({elapsed:.2?}) {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
