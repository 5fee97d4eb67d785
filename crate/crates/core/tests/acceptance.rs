//! Acceptance run: one PASS/FAIL line per criterion with its timing.
//! Exits non-zero when any criterion fails.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use betaflow::correspondence::{greedy_base, membership_a, membership_b, sft_approx_sequence, to_hole_system};
use betaflow::input::parse_params;
use betaflow::itinerary::expansion_word;
use betaflow::kneading::{
    is_sft, kneading_invariants, solve_parry_beta, system_from_kneading_pair, validate_kneading_pair, Condition,
    SftStatus, Validity,
};
use betaflow::language::{Automaton, Semantics};
use betaflow::numerics::algebraic::root_of;
use betaflow::oracles::{brute_force_language, escape_fraction};
use betaflow::sft::compile;
use betaflow::survivor::{critical_hole, dimension_sweep, k_zero_counts, HoleSpec, SurvivorConfig};
use betaflow::winning::{
    cell_itinerary, check_cylinder_lengths, check_distance_condition, check_ratio_condition, winning_report,
};
use betaflow::{AlgebraicReal, EPWord, Params, Poly, Scalar, Variant};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn w(s: &str) -> EPWord {
    s.parse().expect("word")
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn quintic_beta() -> AlgebraicReal {
    root_of(&[1, 1, -2, -1, -1, 1], (1, 1), (2, 1)).unwrap()
}

fn golden_beta() -> AlgebraicReal {
    root_of(&[-1, -1, 1], (1, 1), (2, 1)).unwrap()
}

fn quartic() -> Params {
    parse_params("poly:-1,-1,-1,0,1", "expr:1-b^2/(b+1)", 64).unwrap()
}

/// a − b is an exact zero.
fn exact_equal(a: &Scalar, b: &Scalar) -> bool {
    let d = a.sub(b);
    d.is_exact() && d.sign().ok() == Some(Ordering::Equal)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    check(t <= limit, format!("took {:.2} s, limit {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn quintic_kneading() -> Outcome {
    let start = Instant::now();
    let p = Params::greedy(&quintic_beta()).map_err(e)?;
    check(p.is_exact(), "backend is not exact")?;
    let q1 = kneading_invariants(&p).map_err(e)?.tau_minus_one();
    check(q1 == w("11(100)"), format!("τ⁻(1) = {q1}"))?;
    check(q1.pre().len() == 2 && q1.period().len() == 3, "preperiod/period")?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("τ⁻(1) = {q1}, preperiod 2, period 3"))
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let xi = w("00(011)");
    let b = membership_b(&quintic_beta(), &xi).map_err(e)?;
    let a = membership_a(&quintic_beta(), &xi).map_err(e)?;
    check(b.member(), format!("membership_B = {b:?}"))?;
    check(a == Validity::Invalid(Condition::Cond4), format!("membership_A = {a}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("ξ = {xi}: B = true, A = NO(COND4)"))
}

/// Purely periodic pairs (0u)^∞, (1v)^∞ with |u|, |v| ≤ 4 that pass validation.
fn valid_periodic_pairs(limit: usize) -> Vec<(EPWord, EPWord)> {
    let words = |len: usize| (0u32..1 << len).map(move |b| (0..len).map(|i| ((b >> i) & 1) as u8).collect::<Vec<u8>>());
    let tails: Vec<Vec<u8>> = (0..=4).flat_map(words).collect();
    let mut out = Vec::new();
    for u in &tails {
        for v in &tails {
            let lo = EPWord::periodic(&[&[0], &u[..]].concat());
            let up = EPWord::periodic(&[&[1], &v[..]].concat());
            if lo.period() != [&[0], &u[..]].concat() || up.period() != [&[1], &v[..]].concat() {
                continue;
            }
            if validate_kneading_pair(&lo, &up).is_ok_and(Validity::is_valid) {
                out.push((lo, up));
                if out.len() == limit {
                    return out;
                }
            }
        }
    }
    out
}

fn parry_inversion() -> Outcome {
    let start = Instant::now();
    let g = solve_parry_beta(&w("(10)")).map_err(e)?;
    check(g.eq_exact(&golden_beta()), format!("β = {}", g.to_f64()))?;
    let fine = g.refine(&q(1, 1_000_000_000_000));
    check(fine.width() <= q(1, 1_000_000_000_000), "interval too wide")?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let (lo, hi) = (fine.lo().clone(), fine.hi().clone());
    let to_f = |x: &BigRational| num_traits::ToPrimitive::to_f64(x).unwrap();
    check(to_f(&lo) <= phi + 1e-15 && phi - 1e-15 <= to_f(&hi), "interval misses (1+√5)/2")?;
    let pairs = valid_periodic_pairs(60);
    check(pairs.len() >= 50, format!("only {} valid pairs", pairs.len()))?;
    for (lo, up) in &pairs {
        let p = system_from_kneading_pair(lo, up).map_err(e)?;
        let k = kneading_invariants(&p).map_err(e)?;
        check(&k.lower == lo && &k.upper == up, format!("({lo}, {up}) came back as ({}, {})", k.lower, k.upper))?;
        let again = system_from_kneading_pair(&k.lower, &k.upper).map_err(e)?;
        let same_beta = again.beta_real().zip(p.beta_real()).is_some_and(|(a, b)| a.eq_exact(b));
        check(same_beta && exact_equal(again.alpha(), p.alpha()), format!("parameters of ({lo}, {up}) moved"))?;
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("(10) ↦ G exactly, width ≤ 1e-12; {} exact round trips", pairs.len()))
}

fn quartic_example() -> Outcome {
    let p = system_from_kneading_pair(&w("0(10)"), &w("1(0001)")).map_err(e)?;
    let b = p.beta_real().ok_or("β not exact")?;
    let quartic_poly = Poly::from_i64(&[-1, -1, -1, 0, 1]);
    check(quartic_poly.div_exact(b.poly()).is_some(), format!("minpoly {} does not divide x⁴−x²−x−1", b.poly()))?;
    let (beta, alpha) = (b.to_f64(), p.alpha().to_f64());
    check((beta - 1.4656).abs() < 5e-4, format!("β = {beta}"))?;
    check((alpha - 0.1288).abs() < 5e-4, format!("α = {alpha}"))?;
    check(is_sft(&p).map_err(e)? == SftStatus::Sft, "not SFT")?;
    let s = compile(&p).map_err(e)?;
    let chi = s.characteristic_polynomial();
    check(chi.div_exact(b.poly()).is_some(), format!("{} ∤ {chi}", b.poly()))?;
    check(s.perron_root_is_beta().map_err(e)?, "Perron root differs from β")?;
    Ok(format!("β = {beta:.6} (minpoly {}), α = {alpha:.6}, χ = {chi}", b.poly()))
}

fn critical_holes() -> Outcome {
    let g = Params::greedy(&golden_beta()).map_err(e)?;
    let tc = critical_hole(&g).map_err(e)?.t;
    let gg = g.beta().clone();
    let g_minus_2 = gg.pow(-2).map_err(e)?;
    check(exact_equal(&tc, &g_minus_2), format!("t_c(G) = {tc}"))?;
    check((tc.to_f64() - 0.381_966_011_250_105_1).abs() < 1e-12, "t_c(G) decimal")?;
    let word = expansion_word(&g, &tc, Variant::Lower, 4096).map_err(e)?;
    check(word == w("00(10)"), format!("τ⁻_G(t_c) = {word}"))?;

    let p = quartic();
    let tq = critical_hole(&p).map_err(e)?.t;
    let (b, a) = (p.beta(), p.alpha());
    let closed = Scalar::one().sub(a).sub(&b.mul(a)).div(&b.mul(b)).map_err(e)?;
    check(exact_equal(&tq, &closed), format!("t_c = {tq}, (1−α−βα)/β² = {closed}"))?;
    let derived = b.sub(&Scalar::one()).div(b).map_err(e)?;
    check((tq.to_f64() - derived.to_f64()).abs() < 1e-12, "t_c ≠ (β−1)/β")?;
    Ok(format!("t_c(G) = G⁻², τ⁻ = 00(10); quartic t_c = {:.12} = (β−1)/β", tq.to_f64()))
}

fn staircase() -> Outcome {
    let start = Instant::now();
    let p = quartic();
    let tc = critical_hole(&p).map_err(e)?.t.to_f64();
    let cfg = SurvivorConfig { depth: 30, ..SurvivorConfig::default() };
    let rows = dimension_sweep(&p, 200, &q(9, 10), &cfg).map_err(e)?;
    check(rows.len() == 200, "row count")?;
    check(rows[0].eta_kneading.is_some_and(|x| (x - 1.0).abs() < 1e-9), "η(0) ≠ 1")?;
    let t = |r: &betaflow::survivor::SweepRow| num_traits::ToPrimitive::to_f64(&r.t).unwrap();
    let mut last_a = f64::INFINITY;
    let mut last_b = f64::INFINITY;
    let (mut both, mut worst, mut a_fail) = (0, 0.0f64, 0);
    for r in &rows {
        if let Some(a) = r.eta_kneading {
            check(a <= last_a + 1e-9, format!("η_A rises at t = {}", t(r)))?;
            last_a = a;
        } else {
            a_fail += 1;
        }
        if let Some(b) = r.eta_counting {
            check(b <= last_b + 0.02, format!("η_B rises at t = {}", t(r)))?;
            last_b = last_b.min(b);
        }
        if t(r) >= tc {
            check(r.eta_kneading == Some(0.0), format!("η({}) = {:?} past t_c", t(r), r.eta_kneading))?;
        }
        if let (Some(a), Some(b)) = (r.eta_kneading, r.eta_counting) {
            both += 1;
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 0.02, format!("methods differ by {worst:.4}"))?;
    within(Duration::from_secs(600), start)?;
    Ok(format!("200 samples, {both} compared, max |A−B| = {worst:.4}, {a_fail} A-failures"))
}

fn correspondence() -> Outcome {
    let p = quartic();
    let g = greedy_base(&p).map_err(e)?;
    check(g.eq_exact(&golden_beta()), format!("u(β,α) = {}", g.to_f64()))?;
    let h = to_hole_system(&p).map_err(e)?;
    let gs = Scalar::from_algebraic(&h.beta_prime);
    let expected = gs.mul(&Scalar::int(3)).add(&Scalar::one()).inv().map_err(e)?;
    check(exact_equal(&h.hole_t, &expected), format!("hole_t = {}", h.hole_t))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = Scalar::from_f64(rng.random::<f64>(), 128);
        let n = rng.random_range(1..=50);
        let r = h.equivariance_residual(&x, n, 128).map_err(e)?;
        worst = worst.max(r);
    }
    check(worst < 1e-9, format!("residual {worst:e}"))?;
    Ok(format!("u = G, hole_t = 1/(3G+1), max residual {worst:.1e}"))
}

fn cylinder_lengths() -> Outcome {
    let s = compile(&quartic()).map_err(e)?;
    let r = check_cylinder_lengths(&s, 12).map_err(e)?;
    check(r.violations == 0 && r.pass, format!("{} violations", r.violations))?;
    Ok(format!("{} cylinders to depth 12, ρβ^-n ≤ |I| ≤ β^-n", r.words))
}

fn winning() -> Outcome {
    let start = Instant::now();
    let p = quartic();
    let s = compile(&p).map_err(e)?;
    let omega = cell_itinerary(&s, &Scalar::zero(), 4096).map_err(e)?;
    let ratio = check_ratio_condition(&s, &omega, 10).map_err(e)?;
    check(ratio.pass, "ratio bound β^-i/ρ fails for some i ≤ 10")?;
    let gamma = q(1, 2);
    let dist = check_distance_condition(&s, &omega, &gamma, 8).map_err(e)?;
    check(dist.pass, format!("{} distance violations", dist.violations))?;
    let report = winning_report(&p, &Scalar::zero(), &gamma, 8).map_err(e)?;
    let cert = report.certificates.first().ok_or("no certificate")?;
    let beta = p.beta().to_f64();
    let floor = cert.rho.to_f64() * beta.powi(-(cert.mixing_time_m as i32 + 1));
    check(cert.c.to_f64() >= floor * (1.0 - 1e-12), format!("c = {} < ρβ^-(m+1) = {floor}", cert.c.to_f64()))?;
    check(report.certified, "certificate not passed")?;
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "ratio to i = 10, {} pairs at depth 8, m = {}, c = {:.6}",
        dist.pairs_checked,
        cert.mixing_time_m,
        cert.c.to_f64()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut systems = vec![(w("0(10)"), w("1(0001)"))];
    for (lo, up) in valid_periodic_pairs(200) {
        let p = system_from_kneading_pair(&lo, &up).map_err(e)?;
        if p.beta().to_f64() < 1.6 && !systems.contains(&(lo.clone(), up.clone())) {
            systems.push((lo, up));
        }
        if systems.len() == 4 {
            break;
        }
    }
    check(systems.len() >= 3, "fewer than three systems")?;
    for (lo, up) in &systems {
        let p = system_from_kneading_pair(lo, up).map_err(e)?;
        let a = Automaton::omega_plus(lo, up).map_err(e)?;
        let counts = a.counts(18, Semantics::Exact);
        for n in 1..=18 {
            let brute = brute_force_language(&p, n).map_err(e)?.count() as u128;
            check(counts[n] == brute, format!("({lo}, {up}) n = {n}: automaton {} vs brute force {brute}", counts[n]))?;
        }
    }
    let p = quartic();
    let mut holes = 0;
    for hw in ["(0001)", "(001)", "(00101)", "(0010101)", "(000100101010101001001)"] {
        let hole = HoleSpec::from_word(&p, &w(hw)).map_err(e)?;
        for k in 1..=14 {
            let (k0, kp) = k_zero_counts(&hole, k).map_err(e)?;
            check(k0 <= 3 * (k as u128 + 1) * kp, format!("hole {hw}, k = {k}: |K⁰| = {k0} > 3(k+1)·{kp}"))?;
        }
        holes += 1;
    }
    Ok(format!("{} systems agree for n ≤ 18; |K⁰|_k ≤ 3(k+1)|K⁺|_k on {holes} holes, k ≤ 14", systems.len()))
}

fn sft_approximation() -> Outcome {
    let p = Params::greedy(&quintic_beta()).map_err(e)?;
    let steps = sft_approx_sequence(&p, 3).map_err(e)?;
    check(steps.len() == 3, "sequence length")?;
    let mut agreements = Vec::new();
    for (s, (need, bound)) in steps.iter().zip([(10, -9), (15, -14), (20, -19)]) {
        check(is_sft(&s.params).map_err(e)? == SftStatus::Sft, "member is not SFT")?;
        check(s.contained, "containment not certified")?;
        check(s.agreement >= need, format!("agreement {} < {need}", s.agreement))?;
        check(s.distance_exponent() <= bound, format!("distance 2^{} > 2^{bound}", s.distance_exponent()))?;
        agreements.push(s.agreement);
    }
    Ok(format!("agreements {agreements:?}, all SFT and contained"))
}

fn escape() -> Outcome {
    let g = Params::greedy(&golden_beta()).map_err(e)?;
    let f = escape_fraction(&g, &Scalar::ratio(1, 100), 100_000, 1000, 2024);
    check(f >= 0.95, format!("escape fraction {f}"))?;
    Ok(format!("escape fraction {f:.5} (statistical evidence only; not the measure-zero statement)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("quintic kneading", quintic_kneading),
        ("counterexample", counterexample),
        ("Parry inversion", parry_inversion),
        ("quartic example", quartic_example),
        ("critical hole", critical_holes),
        ("devil staircase", staircase),
        ("correspondence", correspondence),
        ("cylinder lengths", cylinder_lengths),
        ("winning certificate", winning),
        ("oracle equivalence", oracle_equivalence),
        ("SFT approximation", sft_approximation),
        ("escape statistics", escape),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("{:>2} PASS {name} ({secs:.2} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("{:>2} FAIL {name} ({secs:.2} s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
