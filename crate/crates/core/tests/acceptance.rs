//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p halfbound --test acceptance`.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use halfbound::analytic::{self, exp_well_bound_states};
use halfbound::critical::{critical_spectrum, find_critical_q};
use halfbound::scan::{scan_q, table1, TABLE_E, TABLE_Q};
use halfbound::scatter::{integrate_uv, reflect, WRONSKIAN_TOL};
use halfbound::specfun::{bessel_zero, BesselOrder};
use halfbound::{Family, GridConfig, Method, Potential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reflection of the exponential well (`a = 1`) near its first critical
/// strength, rows `TABLE_Q`, columns `TABLE_E`, as tabulated in the
/// literature.
const REFERENCE_TABLE: [[f64; 5]; 6] = [
    [0.1695e-1, 0.5423e-2, 0.1251e-1, 0.9150e-1, 0.4956e0],
    [0.1517e-1, 0.2320e-2, 0.9370e-3, 0.3335e-2, 0.2828e-1],
    [0.1482e-1, 0.1854e-2, 0.2029e-3, 0.3601e-4, 0.4372e-4],
    [0.1481e-1, 0.1843e-2, 0.1914e-3, 0.2213e-4, 0.6316e-7],
    [0.1481e-1, 0.1840e-2, 0.1886e-3, 0.1919e-4, 0.2215e-7],
    [0.1481e-1, 0.1840e-2, 0.1883e-3, 0.1890e-4, 0.1920e-7],
];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

fn cfg() -> GridConfig {
    GridConfig::default()
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let table = match table1(Method::Analytic, &cfg()) {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, format!("table1 failed: {e}")),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let mut misses = Vec::new();
    for (i, row) in REFERENCE_TABLE.iter().enumerate() {
        for (j, &expected) in row.iter().enumerate() {
            let got = table.values[i][j];
            let ok = if expected >= 1e-6 {
                ((got - expected) / expected).abs() <= 0.05
            } else {
                got / expected <= 3.0 && expected / got <= 3.0
            };
            if !ok {
                misses.push(format!(
                    "q = {}, E = {:.0e}: computed {got:.4e}, reference {expected:.4e} (ratio {:.1})",
                    TABLE_Q[i],
                    TABLE_E[j],
                    got / expected
                ));
            }
        }
    }
    let pass = misses.is_empty() && elapsed < 60.0;
    Outcome::new(
        pass,
        format!("{}/30 entries within tolerance, {elapsed:.2} s", 30 - misses.len()),
    )
    .with_details(misses)
}

fn critical_strengths() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let square = Family::square(1.0);
    for (n, bracket) in [(1, (1.0, 2.0)), (2, (2.5, 3.5)), (3, (4.0, 5.0))] {
        let expected = n as f64 * FRAC_PI_2;
        match find_critical_q(&square, bracket, &cfg()) {
            Ok(h) if (h.q_c - expected).abs() <= 1e-8 => {}
            Ok(h) => {
                pass = false;
                details.push(format!("square n = {n}: {} vs {expected}", h.q_c));
            }
            Err(e) => {
                pass = false;
                details.push(format!("square n = {n}: {e}"));
            }
        }
    }
    let exp = Family::exponential(1.0);
    let cases = [
        ((2.0, 3.0), BesselOrder::Zero, 1, 2.404826),
        ((3.0, 4.5), BesselOrder::One, 1, 3.831706),
        ((5.0, 6.0), BesselOrder::Zero, 2, 5.520078),
    ];
    for (bracket, order, n, quoted) in cases {
        let zero = bessel_zero(order, n).expect("tabulated zero");
        if (zero - quoted).abs() > 1e-5 {
            pass = false;
            details.push(format!("zero {order:?}/{n} = {zero} vs quoted {quoted}"));
        }
        match find_critical_q(&exp, bracket, &cfg()) {
            Ok(h) if (h.q_c - zero).abs() <= 1e-5 => {}
            Ok(h) => {
                pass = false;
                details.push(format!("exponential: {} vs {zero}", h.q_c));
            }
            Err(e) => {
                pass = false;
                details.push(format!("exponential {bracket:?}: {e}"));
            }
        }
    }
    Outcome::new(pass, "square {π/2, π, 3π/2} and exponential Bessel zeros").with_details(details)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn analytic_numeric_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst_square: f64 = 0.0;
    let mut worst_exp: f64 = 0.0;
    let mut details = Vec::new();
    for _ in 0..200 {
        let q = rng.gen_range(0.2..6.0);
        let a = rng.gen_range(0.5..2.0);
        let e = log_uniform(&mut rng, 1e-3, 10.0);
        let v0 = (q / a) * (q / a);

        let exact = analytic::square_well_r(e, v0, a).unwrap();
        let p = Potential::square(v0, a).unwrap();
        for method in [Method::Wronskian, Method::TransferMatrix] {
            match reflect(&p, e, method, &cfg()) {
                Ok(res) => worst_square = worst_square.max((res.reflection - exact).abs()),
                Err(err) => details.push(format!("square q={q} a={a} E={e} {method}: {err}")),
            }
        }

        let exact = analytic::exp_well_r_exact(e, v0, a).unwrap().norm_sqr();
        let p = Potential::exponential(v0, a).unwrap();
        match reflect(&p, e, Method::TransferMatrix, &cfg()) {
            Ok(res) => worst_exp = worst_exp.max((res.reflection - exact).abs()),
            Err(err) => details.push(format!("exponential q={q} a={a} E={e}: {err}")),
        }
    }
    let pass = details.is_empty() && worst_square <= 1e-6 && worst_exp <= 1e-6;
    Outcome::new(
        pass,
        format!("200 pairs; max |dR| square {worst_square:.2e}, exponential {worst_exp:.2e}"),
    )
    .with_details(details)
}

fn random_well(rng: &mut ChaCha8Rng) -> Potential {
    let a = rng.gen_range(0.5..2.0);
    let q = rng.gen_range(0.3..7.0);
    match rng.gen_range(0..6) {
        0 => Family::square(a).at(q).unwrap(),
        1 => Family::exponential(a).at(q).unwrap(),
        2 => Potential::soliton(rng.gen_range(1.1..5.0)).unwrap(),
        3 => Family::parabolic(a, a * rng.gen_range(0.8..1.3)).at(q).unwrap(),
        4 => Family::square_triangular(a, rng.gen_range(0.0..1.0)).unwrap().at(q).unwrap(),
        _ => Family::sin2(a, rng.gen_range(1..=2)).unwrap().at(q).unwrap(),
    }
}

fn unitarity_and_wronskian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut worst_unitarity: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    let mut details = Vec::new();
    for _ in 0..200 {
        let p = random_well(&mut rng);
        let e = log_uniform(&mut rng, 1e-6, 10.0);
        match reflect(&p, e, Method::TransferMatrix, &cfg()) {
            Ok(res) => worst_unitarity = worst_unitarity.max(res.unitarity_residual),
            Err(err) => details.push(format!("{:?} E={e}: {err}", p.kind())),
        }
        for energy in [0.0, e] {
            match integrate_uv(&p, energy, &cfg()) {
                Ok(bd) => worst_drift = worst_drift.max(bd.wronskian_drift),
                Err(err) => details.push(format!("{:?} E={energy}: {err}", p.kind())),
            }
        }
    }
    let pass = details.is_empty() && worst_unitarity <= 1e-8 && worst_drift <= WRONSKIAN_TOL;
    Outcome::new(
        pass,
        format!("200 wells; max |R+T-1| {worst_unitarity:.2e}, max wronskian drift {worst_drift:.2e}"),
    )
    .with_details(details)
}

fn threshold_limits() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let off_critical = [
        Potential::square(1.0, 1.0).unwrap(),
        Family::square(1.0).at(2.0).unwrap(),
        Family::exponential(1.0).at(1.0).unwrap(),
        Family::exponential(1.0).at(3.0).unwrap(),
        Family::exponential(1.0).at(4.5).unwrap(),
        Family::parabolic(1.0, 1.0).at(1.5).unwrap(),
        Family::parabolic(1.0, 1.1).at(3.0).unwrap(),
        Family::sin2(1.0, 1).unwrap().at(3.0).unwrap(),
        Family::square_triangular(1.0, 1.0).unwrap().at(2.0).unwrap(),
        Potential::soliton(2.5).unwrap(),
    ];
    let mut least: f64 = 1.0;
    for p in &off_critical {
        let r = reflect(p, 1e-8, Method::Wronskian, &cfg()).map(|s| s.reflection);
        match r {
            Ok(r) => {
                least = least.min(r);
                if r < 0.999 {
                    pass = false;
                    details.push(format!("{:?} q = {}: R(1e-8) = {r}", p.kind(), p.q()));
                }
            }
            Err(e) => {
                pass = false;
                details.push(format!("{:?}: {e}", p.kind()));
            }
        }
    }

    let j01 = bessel_zero(BesselOrder::Zero, 1).unwrap();
    let mut largest: f64 = 0.0;
    for q in [j01, 2.4048255] {
        let p = Family::exponential(1.0).at(q).unwrap();
        for method in [Method::Analytic, Method::Wronskian] {
            match reflect(&p, 1e-5, method, &cfg()) {
                Ok(res) => {
                    largest = largest.max(res.reflection);
                    if res.reflection > 1e-6 {
                        pass = false;
                        details.push(format!(
                            "exponential q = {q} ({method}): R(1e-5) = {:.4e} > 1e-6",
                            res.reflection
                        ));
                    }
                }
                Err(e) => {
                    pass = false;
                    details.push(format!("exponential q = {q}: {e}"));
                }
            }
        }
    }
    Outcome::new(
        pass,
        format!("off-critical min R(1e-8) = {least:.6}; at q_c max R(1e-5) = {largest:.4e}"),
    )
    .with_details(details)
}

fn soliton_reflectionless() -> Outcome {
    let energies: Vec<f64> = (0..=16).map(|i| 1e-3 * 10f64.powf(i as f64 * 0.25)).collect();
    let mut worst_integer: f64 = 0.0;
    let mut worst_fractional: f64 = 0.0;
    let mut details = Vec::new();
    for method in [Method::Wronskian, Method::TransferMatrix] {
        for nu in [2.0, 3.0] {
            let p = Potential::soliton(nu).unwrap();
            for &e in &energies {
                match reflect(&p, e, method, &cfg()) {
                    Ok(res) => worst_integer = worst_integer.max(res.reflection),
                    Err(err) => details.push(format!("nu = {nu}, E = {e}: {err}")),
                }
            }
        }
        let p = Potential::soliton(2.5).unwrap();
        for &e in &energies {
            let exact = analytic::soliton_r(e, 2.5).unwrap();
            match reflect(&p, e, method, &cfg()) {
                Ok(res) => worst_fractional = worst_fractional.max((res.reflection - exact).abs()),
                Err(err) => details.push(format!("nu = 2.5, E = {e}: {err}")),
            }
        }
    }
    let pass = details.is_empty() && worst_integer < 1e-8 && worst_fractional <= 1e-6;
    Outcome::new(
        pass,
        format!("max R (nu = 2, 3) {worst_integer:.2e}; nu = 2.5 max |dR| {worst_fractional:.2e}"),
    )
    .with_details(details)
}

fn node_count_law() -> Outcome {
    let spectrum = match critical_spectrum(&Family::exponential(1.0), 6.0, &cfg()) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, format!("critical spectrum failed: {e}")),
    };
    let mut details = Vec::new();
    let mut pass = spectrum.len() == 3;
    let mut pairs = Vec::new();
    for (i, h) in spectrum.iter().enumerate() {
        let count = exp_well_bound_states(h.q_c, 1.0).map(|s| s.count);
        pairs.push(format!("q_c = {:.6}: nodes {}, bound states {:?}", h.q_c, h.node_count, count));
        if count != Ok(h.node_count) || h.node_count != i + 1 {
            pass = false;
        }
    }
    details.extend(pairs);
    Outcome::new(pass, format!("{} exponential critical strengths checked", spectrum.len())).with_details(details)
}

struct ScanMin {
    x: f64,
    r: f64,
}

fn scan_minima(family: &Family, energy: f64, lo: f64, hi: f64) -> Result<Vec<ScanMin>, String> {
    let n = ((hi - lo) / 0.02).round() as usize + 1;
    let table = scan_q(family, energy, lo, hi, n, Method::TransferMatrix, &cfg()).map_err(|e| e.to_string())?;
    Ok(table.minima.iter().map(|m| ScanMin { x: m.x, r: m.reflection }).collect())
}

fn minima_near_critical() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let families = [
        (Family::square(1.0), 1.0, 5.0),
        (Family::exponential(1.0), 2.0, 6.0),
        (Family::sin2(1.0, 1).unwrap(), 1.0, 8.0),
        (Family::sin2(1.0, 2).unwrap(), 1.0, 7.0),
    ];
    for (family, lo, hi) in families {
        let criticals = match critical_spectrum(&family, hi, &cfg()) {
            Ok(c) => c,
            Err(e) => {
                pass = false;
                details.push(format!("{:?}: {e}", family.kind()));
                continue;
            }
        };
        let minima = match scan_minima(&family, 0.01, lo, hi) {
            Ok(m) => m,
            Err(e) => {
                pass = false;
                details.push(format!("{:?}: {e}", family.kind()));
                continue;
            }
        };
        for h in criticals.iter().filter(|h| h.q_c >= lo && h.q_c <= hi) {
            let hit = minima.iter().find(|m| (m.x - h.q_c).abs() <= 0.02 && m.r < 1e-2);
            match hit {
                Some(m) => details.push(format!(
                    "{:?}: q_c = {:.5}, minimum R = {:.2e} at {:.5}",
                    family.kind(),
                    h.q_c,
                    m.r,
                    m.x
                )),
                None => {
                    pass = false;
                    details.push(format!("{:?}: no minimum below 1e-2 near q_c = {:.5}", family.kind(), h.q_c));
                }
            }
        }
    }

    for (b, window, bound) in [(1.0, (2.14, 2.34), 1e-4), (1.1, (2.03, 2.23), 1e-3)] {
        match scan_minima(&Family::parabolic(1.0, b), 0.1, 1.5, 3.0) {
            Ok(minima) => {
                let best = minima
                    .iter()
                    .filter(|m| m.x >= window.0 && m.x <= window.1)
                    .min_by(|x, y| x.r.total_cmp(&y.r));
                match best {
                    Some(m) if m.r <= bound => details.push(format!(
                        "parabolic b = {b}: minimum R(0.1) = {:.2e} at {:.5}",
                        m.r, m.x
                    )),
                    _ => {
                        pass = false;
                        details.push(format!("parabolic b = {b}: no minimum <= {bound:.0e} in {window:?}"));
                    }
                }
            }
            Err(e) => {
                pass = false;
                details.push(format!("parabolic b = {b}: {e}"));
            }
        }
    }
    Outcome::new(pass, "scan-q minima near every critical strength").with_details(details)
}

fn symmetry_favours_low_reflection() -> Outcome {
    let best = |b: f64| -> Result<f64, String> {
        Ok(scan_minima(&Family::parabolic(1.0, b), 0.1, 1.5, 3.0)?
            .iter()
            .map(|m| m.r)
            .fold(f64::INFINITY, f64::min))
    };
    match (best(1.0), best(1.1)) {
        (Ok(sym), Ok(asym)) => Outcome::new(
            sym < asym,
            format!("min R(0.1): symmetric {sym:.2e} vs asymmetric {asym:.2e}"),
        ),
        (Err(e), _) | (_, Err(e)) => Outcome::new(false, e),
    }
}

fn small_energy_formula() -> Outcome {
    let mut worst_amplitude: f64 = 0.0;
    let mut worst_modulus: f64 = 0.0;
    let mut details = Vec::new();
    for i in 0..=550 {
        let q = 0.5 + 0.01 * i as f64;
        for ka in [1e-6, 1e-5, 1e-4] {
            let e = ka * ka;
            let approx = analytic::exp_well_r_threshold(e, q * q, 1.0);
            let bracket = analytic::exp_well_r_reduced(e, q * q, 1.0);
            let full = analytic::exp_well_r_exact(e, q * q, 1.0);
            match (approx, bracket, full) {
                (Ok(a), Ok(b), Ok(f)) => {
                    worst_amplitude = worst_amplitude.max((a - b).norm());
                    worst_modulus = worst_modulus.max((a.norm() - f.norm()).abs());
                }
                (a, b, f) => details.push(format!("q = {q}, ka = {ka}: {a:?} {b:?} {f:?}")),
            }
        }
    }
    let pass = details.is_empty() && worst_amplitude <= 1e-4 && worst_modulus <= 1e-4;
    Outcome::new(
        pass,
        format!("max |dr| {worst_amplitude:.2e}, max |d|r|| {worst_modulus:.2e} over q in [0.5, 6], ka <= 1e-4"),
    )
    .with_details(details)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; nothing to parse
    let criteria: [Criterion; 10] = [
        ("table reproduction", table_reproduction),
        ("critical strengths", critical_strengths),
        ("analytic vs numeric", analytic_numeric_agreement),
        ("unitarity and wronskian", unitarity_and_wronskian),
        ("threshold limits", threshold_limits),
        ("soliton reflectionless", soliton_reflectionless),
        ("node count = bound states", node_count_law),
        ("scan minima", minima_near_critical),
        ("symmetric below asymmetric", symmetry_favours_low_reflection),
        ("small-energy formula", small_energy_formula),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} [{:>2}] {name}: {} ({:.1} s)",
            i + 1,
            outcome.summary,
            start.elapsed().as_secs_f64()
        );
        for line in &outcome.details {
            println!("         {line}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
