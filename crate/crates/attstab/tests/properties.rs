//! Cross-module invariants: algebraic identities of the model, agreement of
//! the predicate and numeric stability routes, completeness of the Lyapunov
//! family, and integrator behavior.

use attstab::control::{simulate, SaturatedFeedback};
use attstab::lyapunov::{
    constraint_residual, find_positive_definite, residual, solution_family, AlphaParams,
};
use attstab::model::{
    block_decompose, build_system, sigmas_from_beta, OrbitalRate, SpacecraftInertia,
};
use attstab::smallmat::{poly_roots, solve_quadratic, Complex, ComplexMatrix, Matrix, PolyCoeffs};
use attstab::stability::{classify, closed_form_eigenvalues, phis, Verdict};

use proptest::prelude::*;

fn inertia_strategy() -> impl Strategy<Value = SpacecraftInertia> {
    (10.0..1000.0f64, 10.0..1000.0f64, 10.0..1000.0f64)
        .prop_map(|(jx, jy, jz)| SpacecraftInertia::new(jx, jy, jz).unwrap())
}

/// Bodies with bounded axis ratios, where absolute 1e-12 identities are
/// meaningful (the ratios stay O(1)).
fn moderate_inertia_strategy() -> impl Strategy<Value = SpacecraftInertia> {
    (50.0..200.0f64, 50.0..200.0f64, 50.0..200.0f64)
        .prop_map(|(jx, jy, jz)| SpacecraftInertia::new(jx, jy, jz).unwrap())
}

fn square_matrix_strategy(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-3.0..3.0f64, n * n)
            .prop_map(move |data| Matrix::new(n, n, data).unwrap())
    })
}

fn greedy_match(found: &[Complex], expected: &[Complex]) -> f64 {
    assert_eq!(found.len(), expected.len());
    let mut used = vec![false; found.len()];
    let mut worst: f64 = 0.0;
    for e in expected {
        let (idx, dist) = found
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, f)| (i, (*f - *e).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        used[idx] = true;
        worst = worst.max(dist);
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn char_poly_roots_annihilate_determinant(m in square_matrix_strategy(6)) {
        prop_assume!(m.inf_norm() >= 0.5);
        let roots = poly_roots(&m.char_poly()).unwrap();
        let bound = 1e-8 * m.inf_norm().powi(m.rows() as i32);
        for r in roots {
            let det = ComplexMatrix::shifted_from_real(&m, r).det();
            prop_assert!(det.abs() <= bound, "|det| = {} > {}", det.abs(), bound);
        }
    }

    #[test]
    fn quadratic_roots_satisfy_vieta(c0 in -10.0..10.0f64, c1 in -10.0..10.0f64, c2 in 0.1..10.0f64) {
        let p = PolyCoeffs::new(vec![c0, c1, c2]).unwrap();
        let (r1, r2) = solve_quadratic(&p);
        let sum = r1 + r2;
        let prod = r1 * r2;
        let scale = (c0.abs() + c1.abs()).max(c2) / c2;
        prop_assert!((sum.re + c1 / c2).abs() <= 1e-12 * scale.max(1.0));
        prop_assert!(sum.im.abs() <= 1e-12 * scale.max(1.0));
        prop_assert!((prod.re - c0 / c2).abs() <= 1e-12 * scale.max(1.0));
        prop_assert!(prod.im.abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn rank_invariant_under_permutation_and_scaling(
        m in square_matrix_strategy(5),
        swap in (0usize..5, 0usize..5),
        c in prop_oneof![1e-3..1e-1f64, 0.5..2.0f64, 1e1..1e3f64],
    ) {
        let rank = m.numeric_rank(1e-9);
        // row permutation
        let n = m.rows();
        let (a, b) = (swap.0 % n, swap.1 % n);
        let mut permuted = m.clone();
        for j in 0..n {
            let tmp = permuted[(a, j)];
            permuted[(a, j)] = permuted[(b, j)];
            permuted[(b, j)] = tmp;
        }
        prop_assert_eq!(permuted.numeric_rank(1e-9), rank);
        // uniform scaling
        prop_assert_eq!(m.scale(c).numeric_rank(1e-9), rank);
    }

    #[test]
    fn pd_agrees_with_leading_minors_2x2(
        a in -2.0..2.0f64, b in -2.0..2.0f64, d in -2.0..2.0f64,
    ) {
        let m = Matrix::from_rows(&[&[a, b], &[b, d]]);
        let det = a * d - b * b;
        prop_assume!(a.abs() > 1e-6 && det.abs() > 1e-6);
        let minors_pd = a > 0.0 && det > 0.0;
        prop_assert_eq!(m.is_positive_definite().unwrap(), minors_pd);
    }

    #[test]
    fn pd_agrees_with_leading_minors_6x6(data in proptest::collection::vec(-1.0..1.0f64, 36), shift in -0.5..2.0f64) {
        let g = Matrix::new(6, 6, data).unwrap();
        // symmetric by construction; shift moves it across the PD boundary
        let mut m = g.transpose().mul(&g).unwrap();
        for i in 0..6 {
            m[(i, i)] += shift;
        }
        let mut minors = Vec::new();
        for k in 1..=6 {
            let mut sub = ComplexMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub[(i, j)] = Complex::from_re(m[(i, j)]);
                }
            }
            minors.push(sub.det().re);
        }
        prop_assume!(minors.iter().all(|d| d.abs() > 1e-7));
        let minors_pd = minors.iter().all(|d| *d > 0.0);
        prop_assert_eq!(m.is_positive_definite().unwrap(), minors_pd);
    }

    #[test]
    fn sigma_identities(j in inertia_strategy()) {
        let s = j.sigmas();
        let jmax = j.jx().max(j.jy()).max(j.jz());
        prop_assert!((j.jx() * s.sigma1 - j.jy() * s.sigma2 - j.jz() * s.sigma3).abs() <= 1e-12 * jmax);
        prop_assert!((s.sigma3 - 1.0 - j.jx_over_jz() * (s.sigma1 - 1.0)).abs() <= 1e-12 * (1.0 + s.sigma1.abs() * j.jx_over_jz()));
        // beta route agrees componentwise
        let b = sigmas_from_beta(j.jx() / j.jy(), j.jy() / j.jz()).unwrap();
        prop_assert!((s.sigma1 - b.sigma1).abs() <= 1e-12 * (1.0 + s.sigma1.abs()));
        prop_assert!((s.sigma2 - b.sigma2).abs() <= 1e-12 * (1.0 + s.sigma2.abs()));
        prop_assert!((s.sigma3 - b.sigma3).abs() <= 1e-12 * (1.0 + s.sigma3.abs()));
    }

    #[test]
    fn sigma_scale_invariance(j in inertia_strategy(), c in prop_oneof![Just(1e-2), Just(1.0), Just(1e2)]) {
        let s = j.sigmas();
        let scaled = SpacecraftInertia::new(c * j.jx(), c * j.jy(), c * j.jz()).unwrap().sigmas();
        prop_assert!((s.sigma1 - scaled.sigma1).abs() <= 1e-14 * (1.0 + s.sigma1.abs()));
        prop_assert!((s.sigma2 - scaled.sigma2).abs() <= 1e-14 * (1.0 + s.sigma2.abs()));
        prop_assert!((s.sigma3 - scaled.sigma3).abs() <= 1e-14 * (1.0 + s.sigma3.abs()));
        // verdicts can only depend on the ratios
        prop_assert_eq!(classify(&s, 1e-9).verdict, classify(&scaled, 1e-9).verdict);
    }

    #[test]
    fn similarity_residuals_bounded(j in inertia_strategy(), w0 in prop_oneof![1e-5..1e-2f64, 0.1..10.0f64, 10.0..100.0f64]) {
        let w = OrbitalRate::new(w0).unwrap();
        let sys = build_system(&j, &w);
        let blocks = block_decompose(&j);
        let (ra, rb) = attstab::model::verify_similarity(&sys, &blocks).unwrap();
        let bound = 1e-12 * (1.0f64).max(w0 * w0);
        prop_assert!(ra <= bound, "residual_A = {ra:e} > {bound:e}");
        prop_assert!(rb <= bound, "residual_B = {rb:e} > {bound:e}");
    }

    #[test]
    fn eigenvalues_scale_with_rate(j in inertia_strategy(), w0 in prop_oneof![Just(1e-3), Just(1.0), Just(10.0)]) {
        let sys = build_system(&j, &OrbitalRate::new(w0).unwrap());
        let blocks = block_decompose(&j);
        let roots_a = poly_roots(&sys.a().char_poly()).unwrap();
        let roots_a0 = poly_roots(&blocks.a0().char_poly()).unwrap();
        let scaled: Vec<Complex> = roots_a0.iter().map(|r| *r * w0).collect();
        let worst = greedy_match(&roots_a, &scaled);
        let mag = scaled.iter().fold(1.0f64, |m, r| m.max(r.abs()));
        prop_assert!(worst <= 1e-8 * mag, "worst mismatch {worst:e} at scale {mag:e}");
    }

    #[test]
    fn block_trace_det_match_phis(j in inertia_strategy()) {
        let s = j.sigmas();
        let p = phis(&s);
        let blocks = block_decompose(&j);
        let prod = blocks.a1().mul(blocks.a3()).unwrap();
        let trace = prod[(0, 0)] + prod[(1, 1)];
        let det = prod[(0, 0)] * prod[(1, 1)] - prod[(0, 1)] * prod[(1, 0)];
        let scale = 1.0 + p.phi2.abs().max(p.phi1.abs());
        prop_assert!((trace + p.phi2).abs() <= 1e-12 * scale);
        prop_assert!((det - 4.0 * p.phi1).abs() <= 1e-12 * scale);
    }

    #[test]
    fn numeric_spectrum_closed_under_negation(j in inertia_strategy()) {
        // the coupled roll-yaw 4x4 block inherits the +/- pairing
        let blocks = block_decompose(&j);
        let mut a13 = Matrix::zeros(4, 4);
        for i in 0..2 {
            for c in 0..2 {
                a13[(i, 2 + c)] = blocks.a1()[(i, c)];
                a13[(2 + i, c)] = blocks.a3()[(i, c)];
            }
        }
        let roots = poly_roots(&a13.char_poly()).unwrap();
        let negated: Vec<Complex> = roots.iter().map(|r| -*r).collect();
        let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.abs()));
        prop_assert!(greedy_match(&roots, &negated) <= 1e-8 * scale);
    }

    #[test]
    fn predicate_and_numeric_verdicts_agree(j in inertia_strategy()) {
        let s = j.sigmas();
        let p = phis(&s);
        let dist = s.sigma2.abs().min(p.phi1.abs()).min(p.phi2.abs()).min(p.delta.abs());
        prop_assume!(dist > 1e-6);
        let predicted = classify(&s, 1e-9).verdict;
        for w0 in [1e-3, 1.0, 1e3] {
            let sys = build_system(&j, &OrbitalRate::new(w0).unwrap());
            let numeric = attstab::stability::classify_numeric(&sys, 1e-9).unwrap();
            prop_assert_eq!(numeric.verdict, predicted, "w0 = {}", w0);
        }
    }

    #[test]
    fn closed_form_matches_root_oracle(j in inertia_strategy(), w0 in prop_oneof![Just(1e-3), Just(1.0), Just(1e3)]) {
        let s = j.sigmas();
        prop_assume!(attstab::stability::is_polynomially_stable(&s, 0.0));
        let p = phis(&s);
        let dist = s.sigma2.abs().min(p.phi1.abs()).min(p.phi2.abs()).min(p.delta.abs());
        prop_assume!(dist > 1e-6);
        let w = OrbitalRate::new(w0).unwrap();
        let closed = closed_form_eigenvalues(&s, &w).unwrap();
        let sys = build_system(&j, &w);
        let numeric = poly_roots(&sys.a().char_poly()).unwrap();
        let worst = greedy_match(&numeric, closed.values());
        prop_assert!(worst <= 1e-8 * w0, "worst {worst:e} vs {:e}", 1e-8 * w0);
    }

    #[test]
    fn family_solves_equation_and_block_identities(
        j in moderate_inertia_strategy(),
        alpha2 in -2.0..2.0f64,
        alpha3 in -2.0..2.0f64,
        alpha13 in -2.0..2.0f64,
        w0 in prop_oneof![Just(7.3e-5), Just(1e-3), Just(1.0)],
    ) {
        let s = j.sigmas();
        prop_assume!(s.sigma1.abs() > 1e-6 && s.sigma2.abs() > 1e-6 && s.sigma3.abs() > 1e-6);
        prop_assume!((1.0 - s.sigma1).abs() > 1e-3);
        let params = AlphaParams::solving_constraint(&j, alpha2, alpha3, alpha13).unwrap();
        prop_assert!(constraint_residual(&j, params.alpha1, params.alpha3, params.alpha13).abs()
            <= 1e-12 * params.max_abs().max(1.0));
        let w = OrbitalRate::new(w0).unwrap();
        let sol = solution_family(&j, &w, &params).unwrap();

        // full equation residual
        let sys = build_system(&j, &w);
        let r = residual(sol.p(), sys.a()).unwrap();
        prop_assert!(r <= 1e-11 * sol.p().inf_norm() * w0, "residual {r:e}");

        // blockwise identities
        let blocks = block_decompose(&j);
        let z22 = |m: &Matrix| m.inf_norm();
        let e1 = blocks.a2().transpose().mul(sol.p2()).unwrap()
            .add(&sol.p2().mul(blocks.a2()).unwrap()).unwrap();
        let e2 = blocks.a3().transpose().mul(sol.p3()).unwrap()
            .add(&sol.p1().mul(blocks.a1()).unwrap()).unwrap();
        let e3 = blocks.a1().transpose().mul(sol.p1()).unwrap()
            .add(&sol.p3().mul(blocks.a3()).unwrap()).unwrap();
        prop_assert!(z22(&e1) <= 1e-12, "pitch block {al:e}", al = z22(&e1));
        prop_assert!(z22(&e2) <= 1e-12, "cross block {al:e}", al = z22(&e2));
        prop_assert!(z22(&e3) <= 1e-12, "cross block {al:e}", al = z22(&e3));

        // congruence: P is PD exactly when every block is
        prop_assert_eq!(sol.p().is_positive_definite().unwrap(), sol.is_pd());

        // homogeneity in the parameters
        let c = 3.5;
        let scaled = AlphaParams::new(c * params.alpha1, c * params.alpha2, c * params.alpha3, c * params.alpha13);
        let sol_scaled = solution_family(&j, &w, &scaled).unwrap();
        let diff = sol_scaled.p().sub(&sol.p().scale(c)).unwrap().inf_norm();
        prop_assert!(diff <= 1e-12 * sol.p().inf_norm().max(1.0) * c);
    }

    #[test]
    fn pd_search_matches_lyapunov_verdict(j in moderate_inertia_strategy()) {
        let s = j.sigmas();
        let p = phis(&s);
        let dist = s.sigma2.abs().min(p.phi1.abs()).min(p.phi2.abs()).min(p.delta.abs());
        prop_assume!(dist > 1e-4);
        prop_assume!(s.sigma1.abs() > 1e-6 && s.sigma3.abs() > 1e-6);
        let w = OrbitalRate::new(1.0).unwrap();
        let found = find_positive_definite(&j, &w).unwrap().is_found();
        prop_assert_eq!(found, attstab::stability::is_lyapunov_stable(&s, 1e-9));
    }
}

#[test]
fn rk4_halving_shows_fourth_order() {
    let j = SpacecraftInertia::new(100.0, 120.0, 80.0).unwrap();
    let w = OrbitalRate::new(1e-3).unwrap();
    let sys = build_system(&j, &w);
    let sol = find_positive_definite(&j, &w).unwrap().found().unwrap();
    let p = sol.p().scale(1.0 / sol.p().inf_norm());
    // smooth run: gain small enough that the clamp never engages
    let fb = SaturatedFeedback::new(p, 1.0, [1e9; 3]).unwrap();
    let x0 = [0.01, -0.005, 0.008, 0.0, 0.0, 0.0];
    let dt = 0.01 / 1e-3;
    let horizon = 300.0 * dt;
    let run = |step: f64| {
        simulate(&sys, Some(&fb), None, x0, step, horizon)
            .unwrap()
            .states
            .last()
            .copied()
            .unwrap()
    };
    let coarse = run(dt);
    let half = run(dt / 2.0);
    let reference = run(dt / 8.0);
    let err = |a: [f64; 6], b: [f64; 6]| -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let e1 = err(coarse, reference);
    let e2 = err(half, reference);
    assert!(
        e1 / e2 >= 12.0,
        "error ratio {} (e1 = {e1:e}, e2 = {e2:e})",
        e1 / e2
    );
}

#[test]
fn unstable_body_diverges_open_loop() {
    let j = SpacecraftInertia::new(80.0, 120.0, 100.0).unwrap();
    let w0 = 1e-3;
    let sys = build_system(&j, &OrbitalRate::new(w0).unwrap());
    let x0 = [0.01, 0.01, 0.01, 0.0, 0.0, 0.0];
    let dt = 0.01 / w0;
    let horizon = 3.0 * 2.0 * std::f64::consts::PI / w0;
    let traj = simulate(&sys, None, None, x0, dt, horizon).unwrap();
    let norm = |x: &[f64; 6]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let growth = norm(traj.states.last().unwrap()) / norm(&x0);
    assert!(growth >= 10.0, "growth factor {growth}");
}

#[test]
fn pd_search_respects_route_independence_on_boundary_bodies() {
    // sigma2 = 0 exactly: the family is degenerate, not merely "not found"
    let j = SpacecraftInertia::new(100.0, 50.0, 100.0).unwrap();
    let w = OrbitalRate::new(1.0).unwrap();
    assert!(matches!(
        find_positive_definite(&j, &w),
        Err(attstab::Error::Degenerate(_))
    ));
}

#[test]
fn verdict_is_rate_invariant_for_fixed_bodies() {
    for (jx, jy, jz, want) in [
        (100.0, 120.0, 80.0, Verdict::LyapunovStable),
        (100.0, 95.0, 99.0, Verdict::LyapunovStable),
        (80.0, 120.0, 100.0, Verdict::Unstable),
    ] {
        let j = SpacecraftInertia::new(jx, jy, jz).unwrap();
        for w0 in [1e-3, 1.0, 1e3] {
            let sys = build_system(&j, &OrbitalRate::new(w0).unwrap());
            let c = attstab::stability::classify_numeric(&sys, 1e-9).unwrap();
            assert_eq!(c.verdict, want, "J = ({jx},{jy},{jz}), w0 = {w0}");
        }
    }
}
