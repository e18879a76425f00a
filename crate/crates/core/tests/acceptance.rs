//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p qdt-core --test acceptance -- --nocapture` to see the report.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use qdt_core::attraction::{
    attraction_gap, attraction_qmax, gap_exact, ordered_uniform_gap_check, qmax_exact,
    quantized_attraction_set, quarter_law_check,
};
use qdt_core::decision::{
    compose_probabilities, enforce_bounds, predict_decoy, regularity_violation_check,
    score_against_empirical, ChoiceSet, DecoyMode,
};
use qdt_core::exact::{exact_from_f64, to_f64, Exact};
use qdt_core::experiment::{bundled, ExperimentFile};
use qdt_core::priors::{utility_factors_gains, utility_factors_losses};
use qdt_core::quantum::{
    decohere, normalize_prospect_set, prospect_probability, random_density_operator,
    sample_inconclusive, Complex64, DensityOperator, Prospect, ProspectDims,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit_secs,
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()),
    )
}

fn q(n: i64, d: i64) -> Exact {
    Exact::new(n.into(), d.into())
}

fn ids(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn decoy_case(name: &str, f: &[f64], p_expect: [Exact; 2], err_expect: f64) -> Check {
    let start = Instant::now();
    let cs = ChoiceSet::new(ids(&["A", "B"]), f, &["A", "B"]).map_err(|e| e.to_string())?;
    let report = predict_decoy(&cs, DecoyMode::Excluded).map_err(|e| e.to_string())?;
    ensure(report.p() == p_expect.to_vec(), format!("p = {:?}", report.p()))?;

    // Same numbers through the bundled experiment file.
    let file = ExperimentFile::parse(bundled(name).unwrap()).map_err(|e| e.to_string())?;
    let scored = file.predict(DecoyMode::Excluded).map_err(|e| e.to_string())?;
    ensure(scored.p() == p_expect.to_vec(), "bundled file disagrees")?;
    let err = to_f64(&scored.errors.as_ref().ok_or("no empirical data")?.max_abs_error);
    ensure((err - err_expect).abs() <= 1e-12, format!("max abs error {err}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!(
        "p = ({}, {}), max abs error {err}",
        p_expect[0], p_expect[1]
    ))
}

fn criterion_1() -> Check {
    decoy_case("microwave", &[0.4, 0.6], [q(13, 20), q(7, 20)], 0.04)
}

fn criterion_2() -> Check {
    decoy_case("frogs", &[0.35, 0.65], [q(3, 5), q(2, 5)], 0.0)
}

fn criterion_3() -> Check {
    let r = Rational64::new;
    let catalogue: [(usize, Vec<Rational64>, Rational64, Rational64); 4] = [
        (2, vec![r(1, 4), r(-1, 4)], r(1, 2), r(1, 4)),
        (3, vec![r(3, 8), r(0, 1), r(-3, 8)], r(3, 8), r(3, 8)),
        (4, vec![r(3, 8), r(1, 8), r(-1, 8), r(-3, 8)], r(1, 4), r(3, 8)),
        (5, vec![r(5, 12), r(5, 24), r(0, 1), r(-5, 24), r(-5, 12)], r(5, 24), r(5, 12)),
    ];
    for (n, values, gap, qmax) in catalogue {
        let set = quantized_attraction_set(n).map_err(|e| e.to_string())?;
        ensure(set.values() == values.as_slice(), format!("Q_{n} = {:?}", set.values()))?;
        ensure(set.gap() == gap && gap_exact(n).unwrap() == gap, format!("gap of Q_{n}"))?;
        ensure(set.q_max() == qmax && qmax_exact(n).unwrap() == qmax, format!("q_max of Q_{n}"))?;
        ensure(
            attraction_gap(n).unwrap() == *gap.numer() as f64 / *gap.denom() as f64
                && attraction_qmax(n).unwrap() == *qmax.numer() as f64 / *qmax.denom() as f64,
            format!("float accessors for Q_{n}"),
        )?;
    }
    Ok("Q_2..Q_5 with gap and q_max exact".into())
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mc = quarter_law_check(1_000_000, 0);
    let elapsed = start.elapsed();
    ensure((mc - 0.25).abs() <= 0.005, format!("monte carlo {mc}"))?;
    within(elapsed, 5.0)?;
    let quarter = Rational64::new(1, 4);
    for n in 2..=1000usize {
        let set = quantized_attraction_set(n).map_err(|e| e.to_string())?;
        let total: Rational64 = set.values().iter().map(|v| v.abs()).sum();
        let mean = total / Rational64::from_integer(n as i64);
        ensure(mean == quarter, format!("N = {n}: mean |q| = {mean}"))?;
    }
    Ok(format!("monte carlo {mc:.5} in {:.2}s; mean |q| = 1/4 exactly for N = 2..1000", elapsed.as_secs_f64()))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let gaps = ordered_uniform_gap_check(5, 100_000, 0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let hi = gaps.iter().copied().fold(f64::MIN, f64::max);
    let lo = gaps.iter().copied().fold(f64::MAX, f64::min);
    ensure(gaps.len() == 4, "expected four gaps")?;
    ensure(hi - lo < 3e-3, format!("spread {}", hi - lo))?;
    within(elapsed, 5.0)?;
    Ok(format!("spread {:.2e} in {:.2}s", hi - lo, elapsed.as_secs_f64()))
}

/// `<π_n|ρ|π_n>` and its diagonal part, summed entry by entry.
fn oracle_triple(rho: &DensityOperator, b: &[Complex64], n: usize, nb: usize) -> (f64, f64, f64) {
    let (mut p, mut f) = (Complex64::zero(), 0.0);
    for (a, ba) in b.iter().enumerate() {
        for (c, bc) in b.iter().enumerate() {
            let term = ba.conj() * bc * rho.entry(n * nb + a, n * nb + c);
            p += term;
            if a == c {
                f += term.re;
            }
        }
    }
    (p.re, f, p.re - f)
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let dims = ProspectDims::new(4, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut identity, mut oracle_gap, mut norm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let rho = random_density_operator(dims.total(), &mut rng).map_err(|e| e.to_string())?;
        let b = sample_inconclusive(dims.inconclusive, rng.next_u64()).map_err(|e| e.to_string())?;
        let mut raw = Vec::new();
        for n in 0..dims.conclusive {
            let t = prospect_probability(&rho, &Prospect::new(n, b.clone()).unwrap(), dims)
                .map_err(|e| e.to_string())?;
            let (p, f, qq) = oracle_triple(&rho, &b, n, dims.inconclusive);
            identity = identity.max((t.p - t.f - t.q).abs());
            oracle_gap = oracle_gap.max((t.p - p).abs().max((t.f - f).abs()).max((t.q - qq).abs()));
            raw.push(t);
        }
        let normed = normalize_prospect_set(&raw).map_err(|e| e.to_string())?;
        let sp: f64 = normed.iter().map(|t| t.p).sum();
        let sf: f64 = normed.iter().map(|t| t.f).sum();
        let sq: f64 = normed.iter().map(|t| t.q).sum();
        norm = norm.max((sp - 1.0).abs()).max((sf - 1.0).abs()).max(sq.abs());
    }
    let elapsed = start.elapsed();
    ensure(identity < 1e-12, format!("max |p - f - q| = {identity:e}"))?;
    ensure(oracle_gap < 1e-12, format!("oracle disagreement {oracle_gap:e}"))?;
    ensure(norm < 1e-12, format!("normalization error {norm:e}"))?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "1000 draws at (4,3): |p-f-q| <= {identity:.1e}, normalization <= {norm:.1e}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_7() -> Check {
    let mut worst_increase = 0.0f64;
    let mut worst_end = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let dims = ProspectDims::new(rng.random_range(2..=4), rng.random_range(1..=4)).unwrap();
        let rho = random_density_operator(dims.total(), &mut rng).map_err(|e| e.to_string())?;
        let b = sample_inconclusive(dims.inconclusive, rng.next_u64()).map_err(|e| e.to_string())?;
        let mut prev: Option<Vec<f64>> = None;
        for k in 0..=20 {
            let d = k as f64 / 20.0;
            let damped = decohere(&rho, d, dims).map_err(|e| e.to_string())?;
            let raw: Vec<_> = (0..dims.conclusive)
                .map(|n| prospect_probability(&damped, &Prospect::new(n, b.clone()).unwrap(), dims))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let qs: Vec<f64> = normalize_prospect_set(&raw)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|t| t.q.abs())
                .collect();
            if let Some(prev) = &prev {
                for (a, b) in prev.iter().zip(&qs) {
                    worst_increase = worst_increase.max(b - a);
                }
            }
            if k == 20 {
                worst_end = worst_end.max(qs.iter().copied().fold(0.0, f64::max));
            }
            prev = Some(qs);
        }
    }
    ensure(worst_increase <= 1e-12, format!("|q| grew by {worst_increase:e}"))?;
    ensure(worst_end <= 1e-12, format!("|q| at full damping {worst_end:e}"))?;
    Ok(format!("50 instances x 21 steps; max |q| increase {worst_increase:.1e}, |q| at damping 1 <= {worst_end:.1e}"))
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Information functional with the constant reference level set to zero.
/// Gains: `Σ f ln f + λ(Σf - 1) - α Σ f ln U`; losses: `... + γ Σ f ln|U|`.
fn oracle_functional(f: &[f64], u: &[f64], lambda: f64, coupling: f64) -> f64 {
    let gains = u[0] > 0.0;
    let total: f64 = f.iter().sum();
    let coupled: f64 = f.iter().zip(u).map(|(x, v)| x * v.abs().ln()).sum();
    let entropy: f64 = f.iter().map(|&x| xlogx(x)).sum();
    entropy + lambda * (total - 1.0) + if gains { -coupling } else { coupling } * coupled
}

fn simplex_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut margin = f64::INFINITY;
    for regime in [1.0, -1.0] {
        for _ in 0..20 {
            let n = rng.random_range(2..=6);
            let u: Vec<f64> = (0..n).map(|_| regime * rng.random_range(0.05..20.0)).collect();
            let coupling = rng.random_range(0.2..3.0);
            let lambda = rng.random_range(-1.0..1.0);
            let best = if regime > 0.0 {
                utility_factors_gains(&u, coupling)
            } else {
                utility_factors_losses(&u, coupling)
            }
            .map_err(|e| e.to_string())?;
            let at_best = oracle_functional(best.values(), &u, lambda, coupling);
            for k in 0..10_000 {
                let d = simplex_point(n, &mut rng);
                let cand: Vec<f64> = if k % 2 == 0 {
                    d
                } else {
                    let eps = 10f64.powf(-5.0 * rng.random::<f64>());
                    best.values().iter().zip(&d).map(|(b, x)| (1.0 - eps) * b + eps * x).collect()
                };
                margin = margin.min(oracle_functional(&cand, &u, lambda, coupling) - at_best);
            }

            let unit = if regime > 0.0 {
                utility_factors_gains(&u, 1.0)
            } else {
                utility_factors_losses(&u, 1.0)
            }
            .map_err(|e| e.to_string())?;
            let w: Vec<f64> = u.iter().map(|&v| if regime > 0.0 { v } else { 1.0 / v.abs() }).collect();
            let s: f64 = w.iter().sum();
            let ratio: Vec<f64> = w.iter().map(|x| x / s).collect();
            ensure(unit.values() == ratio.as_slice(), format!("unit exponent differs for {u:?}"))?;
        }
    }
    ensure(margin >= -1e-9, format!("functional margin {margin:e}"))?;
    Ok(format!("20 vectors per regime x 1e4 perturbations, margin {margin:.2e}; unit exponents match ratio forms exactly"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Scale invariance and monotonicity of utility factors.
    for _ in 0..500 {
        let n = rng.random_range(2..=8);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..100.0)).collect();
        let e = rng.random_range(0.1..4.0);
        let c = 10f64.powf(rng.random_range(-3.0..3.0));
        let f = utility_factors_gains(&u, e).unwrap();
        let scaled: Vec<f64> = u.iter().map(|x| x * c).collect();
        let g = utility_factors_gains(&scaled, e).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            ensure((a - b).abs() <= 1e-12, format!("scale invariance: {a} vs {b}"))?;
        }
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let l = utility_factors_losses(&neg, e).unwrap();
        for i in 0..n {
            for j in 0..n {
                if u[i] > u[j] {
                    ensure(f.values()[i] > f.values()[j], "gain factors not increasing")?;
                    ensure(l.values()[i] < l.values()[j], "loss factors not decreasing")?;
                }
            }
        }
    }

    // Antisymmetry and q_max = (N - 1) gap / 2.
    for n in 1..=1000usize {
        let set = quantized_attraction_set(n).unwrap();
        let v = set.values();
        for k in 0..n {
            ensure(v[k] == -v[n - 1 - k], format!("Q_{n} not antisymmetric"))?;
        }
        let half = Rational64::new(n as i64 - 1, 2);
        ensure(set.q_max() == half * set.gap(), format!("q_max identity fails for N = {n}"))?;
    }

    // Bounds idempotence on random feasible inputs.
    for _ in 0..300 {
        let n = rng.random_range(2..=6);
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..20)).collect();
        let total: i64 = w.iter().sum::<i64>().max(1);
        let mut f: Vec<Exact> = w.iter().map(|&x| q(x, total)).collect();
        if w.iter().all(|&x| x == 0) {
            f[0] = q(1, 1);
        }
        let set = quantized_attraction_set(n).unwrap();
        let qs: Vec<Exact> = set.values().iter().map(|r| q(*r.numer(), *r.denom())).collect();
        let (once, _) = enforce_bounds(&f, &qs).map_err(|e| e.to_string())?;
        let (twice, clamped) = enforce_bounds(&f, &once).map_err(|e| e.to_string())?;
        ensure(once == twice && !clamped, "enforce_bounds is not idempotent")?;
        let sum: Exact = once.iter().cloned().sum();
        ensure(sum.is_zero(), "adjusted q does not sum to zero")?;
        for (x, fx) in once.iter().zip(&f) {
            let p = x + fx;
            ensure(!p.is_negative() && p <= q(1, 1), "p outside [0, 1]")?;
        }
    }

    // Reversal iff the favoured minority has f > 1/4.
    for k in 1..200i64 {
        let fm = q(k, 400);
        let f = vec![fm.clone(), q(1, 1) - &fm];
        let cs = ChoiceSet::from_exact(ids(&["m", "M"]), f.clone(), &ids(&["m", "M"]))
            .map_err(|e| e.to_string())?;
        let report = compose_probabilities(&cs).map_err(|e| e.to_string())?;
        let check = regularity_violation_check(&f, &report.p()).map_err(|e| e.to_string())?;
        ensure(
            check.reversal == (fm > q(1, 4)),
            format!("f_minority = {fm}: reversal {}", check.reversal),
        )?;
        ensure(check.tie == (fm == q(1, 4)), format!("tie flag at f_minority = {fm}"))?;
    }

    // Scoring is plain absolute error.
    let cs = ChoiceSet::new(ids(&["A", "B"]), &[0.35, 0.65], &["A", "B"]).unwrap();
    let report = compose_probabilities(&cs).unwrap();
    let scored = score_against_empirical(&report, &[exact_from_f64(0.5).unwrap(), exact_from_f64(0.5).unwrap()])
        .map_err(|e| e.to_string())?;
    ensure(scored.errors.unwrap().max_abs_error == q(1, 10), "score of (0.6, 0.4) vs (0.5, 0.5)")?;

    Ok("scale invariance, monotonicity, antisymmetry, q_max identity, idempotence, reversal threshold".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 decoy replication: microwave ovens", criterion_1),
        ("2 decoy replication: frog mate choice", criterion_2),
        ("3 attraction-set catalogue", criterion_3),
        ("4 quarter law", criterion_4),
        ("5 equidistance of ordered uniforms", criterion_5),
        ("6 quantum identity", criterion_6),
        ("7 decoherence limit", criterion_7),
        ("8 entropy minimizers", criterion_8),
        ("9 property suite", criterion_9),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
