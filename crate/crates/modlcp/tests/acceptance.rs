//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N (<name>): pass` line on success. Tolerances are pinned in
//! the constants below.

use std::time::Instant;

use modlcp::convergence::{certify, Theorem1Case, Theorem2Case};
use modlcp::lcp::{
    modulus_from_solution, solution_from_modulus, solve_enumeration, ModulusVector,
};
use modlcp::linalg::DiagonalMatrix;
use modlcp::problems::{example1, example2, random_hplus};
use modlcp::solvers::{
    solve, MethodId, RatmmsParams, SplittingSpec, Status, StoppingRule,
};

/// Allowed iteration-count drift for the method-comparison tables.
const IT_TOL_TABLES: i64 = 2;
/// Allowed drift for the larger sweeps.
const IT_TOL_SWEEPS: i64 = 3;
const ORACLE_AGREEMENT: f64 = 1e-6;
const RES_TARGET: f64 = 1e-5;

fn sor_params(p: &modlcp::lcp::LcpProblem, k: f64, alpha: f64, theta: f64, omega3_frac: f64) -> RatmmsParams {
    let n = p.dim();
    let d = p.matrix().diagonal_entries();
    RatmmsParams {
        omega1: DiagonalMatrix::scalar(n, k),
        omega2: DiagonalMatrix::positive(d.iter().map(|v| v / (2.0 * alpha)).collect()).unwrap(),
        omega3: DiagonalMatrix::nonnegative(d.iter().map(|v| v * omega3_frac).collect()).unwrap(),
        theta,
        splitting: SplittingSpec::Aor { alpha, beta: alpha },
    }
}

fn within(actual: usize, expected: i64, tol: i64) -> bool {
    (actual as i64 - expected).abs() <= tol
}

/// Runtime budgets are calibrated for optimized builds; unoptimized test
/// runs get a 10x allowance.
fn budget(seconds: f64) -> f64 {
    if cfg!(debug_assertions) {
        seconds * 10.0
    } else {
        seconds
    }
}

#[test]
fn criterion_1_method_comparison_symmetric_family() {
    let start = Instant::now();
    // (mu, per-method expected IT at m = 30 and m = 60)
    let expected: &[(f64, &[(MethodId, [i64; 2])])] = &[
        (
            1.5,
            &[
                (MethodId::Gmms, [40, 42]),
                (MethodId::Gtmms, [45, 46]),
                (MethodId::Atmms, [42, 45]),
                (MethodId::Ratmms, [30, 32]),
            ],
        ),
        (
            2.5,
            &[
                (MethodId::Gmms, [32, 33]),
                (MethodId::Gtmms, [39, 40]),
                (MethodId::Atmms, [30, 31]),
                (MethodId::Ratmms, [24, 24]),
            ],
        ),
        (
            4.0,
            &[
                (MethodId::Gmms, [25, 26]),
                (MethodId::Gtmms, [34, 36]),
                (MethodId::Atmms, [22, 23]),
                (MethodId::Ratmms, [22, 22]),
            ],
        ),
    ];
    for &(mu, rows) in expected {
        for (mi, &m) in [30usize, 60].iter().enumerate() {
            let p = example1(m, mu).unwrap();
            let params = sor_params(&p, 0.8, 1.0, 1.7, 0.5);
            for &(method, its) in rows {
                let rep = solve(&p, method, &params, &StoppingRule::default()).unwrap();
                assert_eq!(
                    rep.status,
                    Status::Converged,
                    "{} mu={mu} m={m} did not converge",
                    method.name()
                );
                assert!(
                    rep.final_residual() <= RES_TARGET,
                    "{} mu={mu} m={m}: RES {}",
                    method.name(),
                    rep.final_residual()
                );
                assert!(
                    within(rep.iterations, its[mi], IT_TOL_TABLES),
                    "{} mu={mu} m={m}: IT {} expected {}±{IT_TOL_TABLES}",
                    method.name(),
                    rep.iterations,
                    its[mi]
                );
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(5.0), "criterion 1 took {secs:.1}s, budget 5s");
    println!("criterion 1 (symmetric-family method comparison): pass");
}

#[test]
fn criterion_2_method_comparison_nonsymmetric_family() {
    let start = Instant::now();
    for (mu, expected_it) in [(1.5, [30i64, 32]), (2.5, [25, 26])] {
        for (mi, &m) in [30usize, 60].iter().enumerate() {
            let p = example2(m, mu).unwrap();
            let params = sor_params(&p, 1.0, 1.0, 1.9, 0.5);
            let rep = solve(&p, MethodId::Ratmms, &params, &StoppingRule::default()).unwrap();
            assert_eq!(rep.status, Status::Converged);
            assert!(
                within(rep.iterations, expected_it[mi], IT_TOL_TABLES),
                "RATMMS mu={mu} m={m}: IT {} expected {}±{IT_TOL_TABLES}",
                rep.iterations,
                expected_it[mi]
            );
        }
    }
    for (mi, &m) in [30usize, 60].iter().enumerate() {
        let expected_it = [49i64, 50];
        let p = example2(m, 1.5).unwrap();
        let params = sor_params(&p, 1.0, 1.0, 1.9, 0.5);
        let rep = solve(&p, MethodId::Gtmms, &params, &StoppingRule::default()).unwrap();
        assert_eq!(rep.status, Status::Converged);
        assert!(
            within(rep.iterations, expected_it[mi], IT_TOL_TABLES),
            "GTMMS mu=1.5 m={m}: IT {} expected {}±{IT_TOL_TABLES}",
            rep.iterations,
            expected_it[mi]
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(5.0), "criterion 2 took {secs:.1}s, budget 5s");
    println!("criterion 2 (nonsymmetric-family method comparison): pass");
}

#[test]
fn criterion_3_relaxation_sweep_shape() {
    let start = Instant::now();
    let p = example1(200, 2.0).unwrap();
    let sweep = [(1.1, 51i64), (1.3, 44), (1.5, 36), (1.7, 26)];
    let mut its = Vec::new();
    for &(theta, expected) in &sweep {
        let params = sor_params(&p, 0.8, 1.0, theta, 0.5);
        let rep = solve(&p, MethodId::Ratmms, &params, &StoppingRule::default()).unwrap();
        assert_eq!(rep.status, Status::Converged, "theta={theta}");
        assert!(
            within(rep.iterations, expected, IT_TOL_SWEEPS),
            "theta={theta}: IT {} expected {expected}±{IT_TOL_SWEEPS}",
            rep.iterations
        );
        its.push(rep.iterations);
    }
    assert!(
        its.windows(2).all(|w| w[1] < w[0]),
        "IT not decreasing across the sweep: {its:?}"
    );
    assert_eq!(
        its.iter().min(),
        its.last().iter().min().copied(),
        "minimum not at the largest relaxation value"
    );
    // no relaxation term, theta = 0.9
    let params = sor_params(&p, 0.8, 1.0, 0.9, 0.0);
    let rep = solve(&p, MethodId::Ratmms, &params, &StoppingRule::default()).unwrap();
    assert_eq!(rep.status, Status::Converged);
    assert!(
        within(rep.iterations, 40, IT_TOL_SWEEPS),
        "no-relaxation IT {} expected 40±{IT_TOL_SWEEPS}",
        rep.iterations
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(60.0), "criterion 3 took {secs:.1}s, budget 60s");
    println!("criterion 3 (relaxation sweep shape at n=40000): pass");
}

#[test]
fn criterion_4_overrelaxation_divergence_pattern() {
    let start = Instant::now();
    let p = example1(60, 2.0).unwrap();
    let alphas = [0.6, 0.9, 1.1, 1.3, 1.5];
    let ratmms_expected = [34i64, 25, 29, 40, 63];
    for (i, &alpha) in alphas.iter().enumerate() {
        let params = sor_params(&p, 0.8, alpha, 1.7, 0.5);
        let gm = solve(&p, MethodId::Gmms, &params, &StoppingRule::default()).unwrap();
        let gt = solve(&p, MethodId::Gtmms, &params, &StoppingRule::default()).unwrap();
        let ra = solve(&p, MethodId::Ratmms, &params, &StoppingRule::default()).unwrap();
        if alpha >= 1.3 {
            assert_ne!(gm.status, Status::Converged, "GMMS alpha={alpha} converged");
        }
        if alpha >= 1.5 {
            assert_ne!(gt.status, Status::Converged, "GTMMS alpha={alpha} converged");
        }
        assert_eq!(ra.status, Status::Converged, "RATMMS alpha={alpha}");
        assert!(
            within(ra.iterations, ratmms_expected[i], IT_TOL_SWEEPS),
            "RATMMS alpha={alpha}: IT {} expected {}±{IT_TOL_SWEEPS}",
            ra.iterations,
            ratmms_expected[i]
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(20.0), "criterion 4 took {secs:.1}s, budget 20s");
    println!("criterion 4 (overrelaxation divergence pattern): pass");
}

#[test]
fn criterion_5_oracle_equivalence() {
    let start = Instant::now();
    let stop = StoppingRule {
        res_tol: 1e-10,
        max_iter: 5000,
        divergence_cap: 1e12,
    };
    for seed in 1..=100u64 {
        let p = random_hplus(8, seed).unwrap();
        let params = sor_params(&p, 1.0, 1.0, 1.7, 0.5);
        let rep = solve(&p, MethodId::Ratmms, &params, &stop).unwrap();
        assert_eq!(rep.status, Status::Converged, "seed {seed}");
        let oracle = solve_enumeration(&p).unwrap();
        let diff = rep
            .z
            .iter()
            .zip(&oracle.z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(
            diff <= ORACLE_AGREEMENT,
            "seed {seed}: max deviation {diff:.3e}"
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(10.0), "criterion 5 took {secs:.1}s, budget 10s");
    println!("criterion 5 (oracle equivalence on 100 random instances): pass");
}

#[test]
fn criterion_6_modulus_roundtrip() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20_240_817);
    let n = 6;
    for _ in 0..1000 {
        let gamma =
            DiagonalMatrix::positive((0..n).map(|_| rng.gen_range(0.1..10.0)).collect()).unwrap();
        let omega =
            DiagonalMatrix::positive((0..n).map(|_| rng.gen_range(0.1..10.0)).collect()).unwrap();
        let mut z = vec![0.0; n];
        let mut r = vec![0.0; n];
        for i in 0..n {
            if rng.gen_bool(0.5) {
                z[i] = rng.gen_range(0.0..10.0);
            } else {
                r[i] = rng.gen_range(0.0..10.0);
            }
        }
        let x = modulus_from_solution(&z, &r, &gamma, &omega).unwrap();
        let back = solution_from_modulus(&x, &gamma, &omega);
        for i in 0..n {
            // the inactive side cancels bitwise to exactly 0.0; the active
            // side goes through one divide and one multiply by the same
            // diagonal entry, which rounds at most once
            if z[i] == 0.0 {
                assert_eq!(back.z[i], 0.0, "zero z entry not preserved at {i}");
            }
            if r[i] == 0.0 {
                assert_eq!(back.r[i], 0.0, "zero r entry not preserved at {i}");
            }
            assert!(
                (back.z[i] - z[i]).abs() <= 2.0 * f64::EPSILON * z[i].abs(),
                "z mismatch at {i}: {} vs {}",
                back.z[i],
                z[i]
            );
            assert!(
                (back.r[i] - r[i]).abs() <= 2.0 * f64::EPSILON * r[i].abs(),
                "r mismatch at {i}: {} vs {}",
                back.r[i],
                r[i]
            );
            assert_eq!(back.z[i] * back.r[i], 0.0, "complementarity at {i}");
        }

        // arbitrary x must always produce an exactly complementary pair
        let x = ModulusVector((0..n).map(|_| rng.gen_range(-50.0..50.0)).collect());
        let s = solution_from_modulus(&x, &gamma, &omega);
        for i in 0..n {
            assert_eq!(s.z[i] * s.r[i], 0.0, "complementarity violated at {i}");
        }
    }
    println!("criterion 6 (modulus transform roundtrip): pass");
}

#[test]
fn criterion_7_relaxed_method_reduces_to_accelerated() {
    for seed in 0..50u64 {
        let p = random_hplus(6, 1000 + seed).unwrap();
        let n = p.dim();
        let d = p.matrix().diagonal_entries();
        let params = RatmmsParams {
            omega1: DiagonalMatrix::scalar(n, 1.0),
            omega2: DiagonalMatrix::positive(d.iter().map(|v| v / 2.0).collect()).unwrap(),
            omega3: DiagonalMatrix::scalar(n, 0.0),
            theta: 1.0,
            splitting: SplittingSpec::Aor {
                alpha: 1.0,
                beta: 1.0,
            },
        };
        let stop = StoppingRule::default();
        let a = solve(&p, MethodId::Ratmms, &params, &stop).unwrap();
        let b = solve(&p, MethodId::Atmms, &params, &stop).unwrap();
        assert_eq!(
            a.residuals, b.residuals,
            "seed {seed}: residual histories differ"
        );
        assert_eq!(a.z, b.z, "seed {seed}: solutions differ");
    }
    println!("criterion 7 (reduction identity at theta=1, no relaxation term): pass");
}

#[test]
fn criterion_8_certificate_soundness_sweep() {
    let start = Instant::now();
    let mut certified = 0usize;
    let mut checked = 0usize;
    for family in 0..2 {
        for &m in &[4usize, 10, 30] {
            for &mu in &[1.5, 2.0, 4.0] {
                let p = if family == 0 {
                    example1(m, mu).unwrap()
                } else {
                    example2(m, mu).unwrap()
                };
                let k = if family == 0 { 0.8 } else { 1.0 };
                for &theta in &[0.5, 1.0, 1.5, 1.9] {
                    for &omega3_frac in &[0.0, 0.5] {
                        let params = sor_params(&p, k, 1.0, theta, omega3_frac);
                        let cert = certify(p.matrix(), &params).unwrap();
                        checked += 1;
                        let bound_certified = cert.rho_tilde_l <= 1.0 - 1e-6;
                        let theorem_certified = cert.theorem1_case != Theorem1Case::None
                            || cert.theorem2_case != Theorem2Case::None;
                        if theorem_certified {
                            assert!(
                                cert.rho_tilde_l < 1.0,
                                "m={m} mu={mu} theta={theta} o3={omega3_frac}: \
                                 theorem-certified but rho(L~)={}",
                                cert.rho_tilde_l
                            );
                        }
                        if bound_certified {
                            certified += 1;
                            let rep =
                                solve(&p, MethodId::Ratmms, &params, &StoppingRule::default())
                                    .unwrap();
                            assert_eq!(
                                rep.status,
                                Status::Converged,
                                "m={m} mu={mu} theta={theta} o3={omega3_frac}: \
                                 certified (rho={}) but did not converge",
                                cert.rho_tilde_l
                            );
                        }
                    }
                }
            }
        }
    }
    assert!(
        certified > 0,
        "sweep produced no certified configurations out of {checked}; vacuous test"
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < budget(60.0), "criterion 8 took {secs:.1}s, budget 60s");
    println!(
        "criterion 8 (certificate soundness, {certified}/{checked} certified configs): pass"
    );
}
