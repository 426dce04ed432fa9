//! End-to-end acceptance checks.
//!
//! Each test covers one numbered acceptance criterion, prints exactly one
//! `PASS criterion N` / `FAIL criterion N` line (visible with
//! `cargo test --test acceptance -- --nocapture`), and asserts it.

use std::time::Instant;

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ttstar::asymmetry::{
    antisymmetry_partner, collapse_table1, cyclic_equivalent, normalize_l, reduce_system,
    TWO_UNKNOWN_CATALOG,
};
use ttstar::classify::{canonicalize_to_toda_frame, Sign};
use ttstar::frame::{build_toda_frame, verify_isomorphism};
use ttstar::identities::{exact_identity_suite, exact_twist_suite};
use ttstar::solver::{
    check_anti_symmetry, discrete_jacobian_dense, discrete_residual, extract_asymptotics,
    refinement_ratio, solve_radial_toda, AsymptoticData, GridSpec, SolverOptions,
};
use ttstar::walgebra::{ceff_consistency, minimal_model_data, minimal_model_for, RationalAsymptoticData};
use ttstar::{fixtures, SOLVER_CHECK_TOL};

fn verdict(criterion: usize, label: &str, ok: bool, details: &str) {
    let line = format!(
        "{} criterion {criterion}: {label} — {details}",
        if ok { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(ok, "{line}");
}

/// Random tuple satisfying the anti-symmetry condition for `(n, l)`.
fn random_tuple(n: usize, l: usize, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
    let dim = n + 1;
    let mut w = vec![0.0; dim];
    for j in 0..dim {
        let p = antisymmetry_partner(n, l, j);
        if j < p {
            let v = rng.gen_range(-scale..scale);
            w[j] = v;
            w[p] = -v;
        }
    }
    w
}

#[test]
fn acceptance_01_exact_operator_identities() {
    let start = Instant::now();
    let mut ok = true;
    let mut first_failure = String::new();
    for n in 1..=8 {
        for epsilon in [Sign::Minus, Sign::Plus] {
            let suite = exact_identity_suite(n, epsilon);
            if !suite.all_passed() {
                ok = false;
                if first_failure.is_empty() {
                    first_failure = format!("n={n}, epsilon={epsilon:?}: {:?}", suite.checks);
                }
            }
        }
        for l in 0..=n {
            let twist = exact_twist_suite(n, l);
            if !twist.all_passed() {
                ok = false;
                if first_failure.is_empty() {
                    first_failure = format!("twist n={n}, l={l}: {:?}", twist.checks);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 5.0;
    let details = format!(
        "shift power, diagonalization, and cyclic-conjugation identities exact for n=1..=8, both signs ({:.2}s){}",
        elapsed.as_secs_f64(),
        if first_failure.is_empty() { String::new() } else { format!("; first failure: {first_failure}") }
    );
    verdict(1, "exact operator identities", ok && in_time, &details);
}

#[test]
fn acceptance_02_index_normalization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut ok = true;
    let mut first_failure = String::new();
    let mut cases = 0usize;
    for n in 1..=8 {
        for l in 0..=n {
            for _ in 0..50 {
                cases += 1;
                let w = random_tuple(n, l, &mut rng, 2.0);
                let normalized = match normalize_l(n, l, &w) {
                    Ok(v) => v,
                    Err(e) => {
                        ok = false;
                        if first_failure.is_empty() {
                            first_failure = format!("n={n}, l={l}: {e}");
                        }
                        continue;
                    }
                };
                let expected_l = if l % 2 == 0 || n % 2 == 0 { 0 } else { 1 };
                let exact_antisymmetry = (0..=n).all(|j| {
                    let p = antisymmetry_partner(n, normalized.l, j);
                    normalized.values[j] + normalized.values[p] == 0.0
                });
                let equivalent = cyclic_equivalent(&normalized.values, &w, 0.0).is_some();
                if normalized.l != expected_l || !exact_antisymmetry || !equivalent {
                    ok = false;
                    if first_failure.is_empty() {
                        first_failure = format!(
                            "n={n}, l={l}: got l'={}, exact={exact_antisymmetry}, equivalent={equivalent}",
                            normalized.l
                        );
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 2.0;
    let details = format!(
        "{cases} random tuples normalized with exact anti-symmetry, cyclic equivalence, and the parity rule ({:.3}s){}",
        elapsed.as_secs_f64(),
        if first_failure.is_empty() { String::new() } else { format!("; first failure: {first_failure}") }
    );
    verdict(2, "index normalization", ok && in_time, &details);
}

#[test]
fn acceptance_03_two_unknown_catalog_collapse() {
    let collapse = collapse_table1();
    let classes_ok = collapse.classes == vec![(3, 0), (4, 0), (5, 1)];
    let swap_ok = collapse.swap_consistent;

    // every catalog row's boundary exponents match its class representative
    // up to the a <-> b swap
    let mut rows_ok = true;
    for (row, class) in TWO_UNKNOWN_CATALOG.iter().zip(&collapse.row_classes) {
        let reduced = reduce_system(class.0, class.1).unwrap();
        let same = (row.a, row.b) == (reduced.a, reduced.b)
            || (row.a, row.b) == (reduced.b, reduced.a);
        if !same || reduced.m != 2 {
            rows_ok = false;
        }
    }

    // the four normalized reduction families carry fixed boundary
    // exponents; each case below has exactly m independent unknowns
    let mut families_ok = true;
    for m in 2..=3usize {
        let cases = [
            (2 * m - 1, 0, 2u32, 2u32),
            (2 * m, 0, 2, 1),
            (2 * m, 1, 2, 1),
            (2 * m + 1, 1, 1, 1),
        ];
        for (n, l, a, b) in cases {
            let reduced = reduce_system(n, l).unwrap();
            if (reduced.a, reduced.b) != (a, b) || reduced.m != m {
                families_ok = false;
            }
        }
    }

    let ok = classes_ok && swap_ok && rows_ok && families_ok;
    let details = format!(
        "ten rows collapse to {:?}; swap-consistency {swap_ok}; row exponents vs class {rows_ok}; family exponents (2,2)/(2,1)/(2,1)/(1,1): {families_ok}",
        collapse.classes
    );
    verdict(3, "two-unknown catalog collapse", ok, &details);
}

#[test]
fn acceptance_04_canonicalization_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut ok = true;
    let mut first_failure = String::new();
    for case in 0..100 {
        let n = rng.gen_range(1..=6);
        let l = rng.gen_range(0..=n);
        let w = random_tuple(n, l, &mut rng, 0.9);
        let frame = build_toda_frame(n, l, &w).unwrap();
        match canonicalize_to_toda_frame(&frame, 1e-10) {
            Ok(canon) => {
                // a tuple of zeros (every index self-paired) degenerates to
                // the l = 0 representative regardless of the input index
                let expected_l = if w.iter().all(|&v| v == 0.0) {
                    0
                } else if l % 2 == 0 || n % 2 == 0 {
                    0
                } else {
                    1
                };
                let recovered = cyclic_equivalent(&canon.w, &w, 1e-8).is_some();
                if canon.l != expected_l || !recovered || canon.pattern_residual >= 1e-10 {
                    ok = false;
                    if first_failure.is_empty() {
                        first_failure = format!(
                            "case {case} (n={n}, l={l}): l'={}, recovered={recovered}, residual={:.2e}",
                            canon.l, canon.pattern_residual
                        );
                    }
                }
            }
            Err(e) => {
                ok = false;
                if first_failure.is_empty() {
                    first_failure = format!("case {case} (n={n}, l={l}): {e}");
                }
            }
        }
    }

    // the diagonal rank-two presentation maps onto the cyclic one by an
    // explicit isomorphism found by the canonicalizer
    let diag = fixtures::sinh_gordon_diagonal_frame(0.8);
    let mut iso_ok = false;
    match canonicalize_to_toda_frame(&diag, 1e-12) {
        Ok(canon) => {
            iso_ok = verify_isomorphism(&canon.transform, &canon.frame, &diag, 1e-12)
                .unwrap_or(false)
                && canon.l == 0
                && cyclic_equivalent(&canon.w, &[0.8, -0.8], 1e-12).is_some();
        }
        Err(_) => {}
    }

    let details = format!(
        "100 random frames (n <= 6) recover (l, w) with residual < 1e-10; diagonal presentation isomorphism verified at 1e-12{}",
        if first_failure.is_empty() { String::new() } else { format!("; first failure: {first_failure}") }
    );
    verdict(4, "canonicalization round trip", ok && iso_ok, &details);
}

/// Independently coded scalar BVP solve for the rank-two reduction
/// `u'' = 8 e^{2x} sinh(2u)` with `u'(x_min) = 0.5`, `u(x_max) = 0`
/// (so `u = w_0`, `w_1 = -u`): plain central differences, scalar Thomas
/// elimination, undamped Newton with step halving.
fn scalar_sinh_gordon_oracle(x_min: f64, x_max: f64, points: usize) -> Vec<f64> {
    let h = (x_max - x_min) / (points - 1) as f64;
    let unknowns = points - 1;
    let inv_h2 = 1.0 / (h * h);
    let slope = 0.5;
    let x_at = |k: usize| x_min + k as f64 * h;

    let residual = |u: &[f64]| -> Vec<f64> {
        (0..unknowns)
            .map(|k| {
                let uc = u[k];
                let up = if k + 1 < unknowns { u[k + 1] } else { 0.0 };
                // ghost node from (u_1 - u_{-1}) / 2h = slope
                let um = if k == 0 { u[1] - 2.0 * h * slope } else { u[k - 1] };
                (um - 2.0 * uc + up) * inv_h2 - 8.0 * (2.0 * x_at(k)).exp() * (2.0 * uc).sinh()
            })
            .collect()
    };

    let mut u: Vec<f64> = (0..unknowns).map(|k| slope * x_at(k).min(0.0)).collect();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut r = residual(&u);
    for _ in 0..100 {
        if sup(&r) < 3e-10 {
            break;
        }
        // scalar tridiagonal Newton step via Thomas elimination
        let mut diag: Vec<f64> = (0..unknowns)
            .map(|k| -2.0 * inv_h2 - 16.0 * (2.0 * x_at(k)).exp() * (2.0 * u[k]).cosh())
            .collect();
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let upper = |k: usize| if k == 0 { 2.0 * inv_h2 } else { inv_h2 };
        for k in 1..unknowns {
            let factor = inv_h2 / diag[k - 1];
            diag[k] -= factor * upper(k - 1);
            rhs[k] -= factor * rhs[k - 1];
        }
        let mut delta = vec![0.0; unknowns];
        delta[unknowns - 1] = rhs[unknowns - 1] / diag[unknowns - 1];
        for k in (0..unknowns - 1).rev() {
            delta[k] = (rhs[k] - upper(k) * delta[k + 1]) / diag[k];
        }
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
            let trial_r = residual(&trial);
            if sup(&trial_r) < sup(&r) || step < 1e-6 {
                u = trial;
                r = trial_r;
                break;
            }
            step *= 0.5;
        }
    }
    assert!(sup(&r) < 3e-10, "oracle failed to converge: {:.3e}", sup(&r));
    let mut full = u;
    full.push(0.0);
    full
}

#[test]
fn acceptance_05_sinh_gordon_cross_check() {
    let start = Instant::now();
    let data = AsymptoticData::new(1, 0, vec![-0.5, 0.5]).unwrap();
    let grid = GridSpec::default();
    let sol = solve_radial_toda(&data, &grid, &SolverOptions::default()).unwrap();

    let residual_ok = sol.residual_sup < 1e-10;
    let anti_ok = sol.anti_symmetry_defect() < SOLVER_CHECK_TOL;

    let oracle = scalar_sinh_gordon_oracle(grid.x_min, grid.x_max, grid.points);
    let mut oracle_gap = 0.0f64;
    for i in 0..grid.points {
        oracle_gap = oracle_gap.max((sol.w[0][i] - oracle[i]).abs());
    }
    let oracle_ok = oracle_gap < 1e-6;

    let m_hat = extract_asymptotics(&sol, 10).unwrap();
    let m_ok = (0..2).all(|j| (m_hat[j] - data.m[j]).abs() <= 0.02 * 0.5);

    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 10.0;
    let details = format!(
        "residual {:.2e}, |w0+w1| {:.2e}, scalar-oracle gap {:.2e}, m_hat ({:.4}, {:.4}) ({:.2}s)",
        sol.residual_sup,
        sol.anti_symmetry_defect(),
        oracle_gap,
        m_hat[0],
        m_hat[1],
        elapsed.as_secs_f64()
    );
    verdict(
        5,
        "rank-two solver cross-check",
        residual_ok && anti_ok && oracle_ok && m_ok && in_time,
        &details,
    );
}

#[test]
fn acceptance_06_higher_rank_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut ok = true;
    let mut lines = Vec::new();
    // healthy ordering gaps keep the left-end truncation error far below
    // the 2% exponent-recovery bar
    let cases: Vec<(usize, usize, Vec<f64>)> = vec![
        {
            let a = rng.gen_range(0.3..0.5);
            let b = rng.gen_range(0.1..a - 0.15);
            (3, 0, vec![a, b, -b, -a])
        },
        {
            let a = rng.gen_range(0.35..0.6);
            let b = rng.gen_range(0.1..a - 0.2);
            (4, 1, vec![0.0, a, b, -b, -a])
        },
    ];
    for (n, l, m) in cases {
        let start = Instant::now();
        let data = AsymptoticData::new(n, l, m.clone()).unwrap();
        assert!(data.is_strict);
        let grid = GridSpec::new(-8.0, 2.5, 2000).unwrap();
        // |w| reaches m_max * |x_min| here, so the discrete residual's
        // rounding floor eps * |w| / h^2 sits near 1e-10; ask for 1e-9
        let options = SolverOptions {
            tol: 1e-9,
            ..SolverOptions::default()
        };
        let sol = solve_radial_toda(&data, &grid, &options).unwrap();
        let anti = sol.anti_symmetry_defect();
        let sum = sol.component_sum_defect();
        let report = refinement_ratio(&data, &grid, &options).unwrap();
        let m_hat = extract_asymptotics(&sol, 10).unwrap();
        let m_ok = (0..=n).all(|j| {
            let bar = if m[j] == 0.0 { 0.02 } else { 0.02 * m[j].abs() };
            (m_hat[j] - m[j]).abs() <= bar
        });
        let elapsed = start.elapsed();
        let case_ok = check_anti_symmetry(&sol, SOLVER_CHECK_TOL)
            && anti < 1e-8
            && sum < 1e-8
            && report.ratio >= 2.5
            && report.ratio <= 6.0
            && m_ok
            && elapsed.as_secs_f64() < 60.0;
        ok &= case_ok;
        lines.push(format!(
            "n={n}: anti {anti:.2e}, sum {sum:.2e}, ratio {:.2}, worst m_hat err {:.2e} ({:.2}s)",
            report.ratio,
            (0..=n)
                .map(|j| (m_hat[j] - m[j]).abs())
                .fold(0.0f64, f64::max),
            elapsed.as_secs_f64()
        ));
    }
    verdict(6, "higher-rank solver properties", ok, &lines.join("; "));
}

#[test]
fn acceptance_07_jacobian_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut ok = true;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let l = if n % 2 == 1 && rng.gen_bool(0.5) { 1 } else { 0 };
        let m = random_tuple(n, l, &mut rng, 0.6);
        let data = AsymptoticData::new(n, l, m).unwrap();
        let points = rng.gen_range(8..=13);
        let grid = GridSpec::new(-1.8, 1.2, points).unwrap();
        let size = (points - 1) * (n + 1);
        let state: Vec<f64> = (0..size).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let jac = discrete_jacobian_dense(&data, &grid, &state).unwrap();
        let scale = jac.amax().max(1.0);
        let step = 1e-6;
        for col in 0..size {
            let mut plus = state.clone();
            let mut minus = state.clone();
            plus[col] += step;
            minus[col] -= step;
            let rp = discrete_residual(&data, &grid, &plus).unwrap();
            let rm = discrete_residual(&data, &grid, &minus).unwrap();
            for row in 0..size {
                let fd = (rp[row] - rm[row]) / (2.0 * step);
                let rel = (jac[(row, col)] - fd).abs() / scale;
                worst = worst.max(rel);
                if rel >= 1e-6 {
                    ok = false;
                }
            }
        }
    }
    let details = format!("20 random states, worst relative entry error {worst:.2e}");
    verdict(7, "analytic Jacobian matches finite differences", ok, &details);
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random exact anti-symmetric exponents with every |m_j| < 1, which keeps
/// the ordering constraint strict automatically.
fn random_rational_data(rng: &mut ChaCha8Rng) -> RationalAsymptoticData {
    loop {
        let n = rng.gen_range(1..=6);
        let l = if n % 2 == 1 && rng.gen_bool(0.5) { 1 } else { 0 };
        let dim = n + 1;
        let mut m = vec![BigRational::from_integer(BigInt::from(0)); dim];
        for j in 0..dim {
            let p = antisymmetry_partner(n, l, j);
            if j < p {
                let value = rational(rng.gen_range(-5..=5), rng.gen_range(6..=9));
                m[j] = value.clone();
                m[p] = -value;
            }
        }
        if let Ok(data) = RationalAsymptoticData::new(n, l, m) {
            return data;
        }
    }
}

#[test]
fn acceptance_08_central_charge_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut ok = true;
    let mut first_failure = String::new();

    for case in 0..200 {
        let data = random_rational_data(&mut rng);
        let model = match minimal_model_for(&data, None) {
            Ok(m) => m,
            Err(e) => {
                ok = false;
                if first_failure.is_empty() {
                    first_failure = format!("case {case}: {e}");
                }
                continue;
            }
        };
        if !ceff_consistency(&data.m, &model) {
            ok = false;
            if first_failure.is_empty() {
                first_failure = format!("case {case}: identity violated for n={}", data.n);
            }
        }
        // the effective central charge only sees the multiset of exponents
        let shift = rng.gen_range(0..=data.n);
        let dim = data.n + 1;
        let rotated: Vec<BigRational> =
            (0..dim).map(|j| data.m[(j + shift) % dim].clone()).collect();
        let rotated_model = minimal_model_data(&rotated, None).unwrap();
        if rotated_model.c_eff != model.c_eff {
            ok = false;
            if first_failure.is_empty() {
                first_failure = format!("case {case}: c_eff not rotation invariant");
            }
        }
    }

    // zero exponents give the trivial model exactly
    for n in 1..=6 {
        let zeros = vec![BigRational::from_integer(BigInt::from(0)); n + 1];
        let model = minimal_model_data(&zeros, None).unwrap();
        let one = BigRational::from_integer(BigInt::from(1));
        if model.c_eff != BigRational::from_integer(BigInt::from(n as i64))
            || model.b.iter().any(|b| *b != one)
        {
            ok = false;
            if first_failure.is_empty() {
                first_failure = format!("zero case failed at n={n}");
            }
        }
    }

    let details = format!(
        "level/central-charge identity exact on 200 random rational inputs, zero case and rotation invariance included{}",
        if first_failure.is_empty() { String::new() } else { format!("; first failure: {first_failure}") }
    );
    verdict(8, "central charge identities", ok, &details);
}
