use bayesnr::bem::{assemble, b_mg, b_mmse, b_msnr_eig, b_msnr_sherman, b_ummse, bem_mse, bem_snr, BemBasis, BemSystem};
use bayesnr::distributions::{LaplaceLaw, LaplaceMixtureLaw, ObservationModel};
use bayesnr::estimator::{report, ReportMode};
use bayesnr::numerics::{rng_uniform, SymMatrix};
use bayesnr::quantized::{q_mmse, Partition};
use proptest::prelude::*;

fn reference() -> ObservationModel {
    ObservationModel::new(
        LaplaceLaw::new(1.0).unwrap().into(),
        LaplaceMixtureLaw::two_component(4.0, 0.9, 1e-3).unwrap().into(),
    )
    .unwrap()
}

fn system_from(seed: u64, n: usize, fill: f64) -> BemSystem {
    let mut rng = rng_uniform(seed);
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()).collect();
    let r = SymMatrix::from_fn(n, |i, j| (0..n).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.05 } else { 0.0 });
    let raw: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
    let e = BemSystem::new(raw.clone(), r.clone(), 1.0).unwrap().explained().unwrap();
    let s = (fill / e).sqrt();
    BemSystem::new(raw.iter().map(|v| v * s).collect(), r, 1.0).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sherman_route_with_optimal_constant_is_b_mmse(seed in 0u64..10_000, n in 2usize..=12, fill in 0.05f64..0.95) {
        let sys = system_from(seed, n, fill);
        let g = b_mmse(&sys).unwrap().g;
        let c = sys.sigma_x2() - sys.explained().unwrap();
        let h = b_msnr_sherman(&sys, c).unwrap().g;
        let d: Vec<f64> = g.iter().zip(&h).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&d) <= 1e-10 * norm(&g));
        let h2 = b_msnr_sherman(&sys, 2.0 * c).unwrap().g;
        for (a, b) in g.iter().zip(&h2) {
            prop_assert!((2.0 * a - b).abs() <= 1e-12 * norm(&g));
        }
    }

    #[test]
    fn all_variants_share_the_snr(seed in 0u64..10_000, n in 2usize..=12, fill in 0.05f64..0.95, c in -5.0f64..5.0, p in 0.01f64..10.0) {
        prop_assume!(c.abs() > 1e-3);
        let sys = system_from(seed, n, fill);
        let g = b_mmse(&sys).unwrap().g;
        let s0 = bem_snr(&sys, &g).unwrap();
        let e = sys.explained().unwrap();
        prop_assert!(((s0 - e / (1.0 - e)) / s0).abs() < 1e-9);
        let j = bem_mse(&sys, &g);
        prop_assert!((j - (1.0 - e)).abs() < 1e-10);
        prop_assert!(((s0 - (1.0 - j) / j) / s0).abs() < 1e-9);
        let eig = b_msnr_eig(&sys).unwrap().g;
        prop_assert!((norm(&eig) - 1.0).abs() < 1e-12);
        let cos = g.iter().zip(&eig).map(|(a, b)| a * b).sum::<f64>() / norm(&g);
        prop_assert!(1.0 - cos.abs() <= 1e-10);
        for v in [b_msnr_sherman(&sys, c).unwrap().g, eig, b_ummse(&sys).unwrap().g, b_mg(&sys, p).unwrap().g] {
            prop_assert!(((bem_snr(&sys, &v).unwrap() - s0) / s0).abs() <= 1e-9);
        }
    }

    #[test]
    fn unbiased_and_power_constraints(seed in 0u64..10_000, n in 2usize..=8, fill in 0.05f64..0.95, p in 0.01f64..10.0) {
        let sys = system_from(seed, n, fill);
        let u = b_ummse(&sys).unwrap().g;
        let gain = u.iter().zip(sys.theta()).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!((gain - 1.0).abs() < 1e-10);
        let e = sys.explained().unwrap();
        prop_assert!((bem_mse(&sys, &u) - (1.0 / e - 1.0)).abs() < 1e-9 * (1.0 / e));
        let m = b_mg(&sys, p).unwrap().g;
        prop_assert!((sys.r().quad_form(&m) - p).abs() < 1e-9 * p.max(1.0));
    }

    #[test]
    fn b_mmse_is_the_global_minimum(seed in 0u64..10_000, n in 2usize..=6) {
        let sys = system_from(seed, n, 0.5);
        let g = b_mmse(&sys).unwrap().g;
        let j0 = bem_mse(&sys, &g);
        let s0 = bem_snr(&sys, &g).unwrap();
        let mut rng = rng_uniform(seed ^ 0x5eed);
        for k in 0..1000 {
            let scale = if k < 100 { 1e-3 } else { 2.0 };
            let v: Vec<f64> = g.iter().map(|x| x + scale * (2.0 * rng.next_f64() - 1.0)).collect();
            prop_assert!(bem_mse(&sys, &v) >= j0 - 1e-12);
            if k < 100 {
                prop_assert!(bem_snr(&sys, &v).unwrap() <= s0 + 1e-9);
            }
        }
    }

    #[test]
    fn snr_is_scale_invariant(seed in 0u64..10_000, n in 2usize..=6, a in prop_oneof![-10.0f64..-0.01, 0.01f64..10.0]) {
        let sys = system_from(seed, n, 0.5);
        let g = b_mmse(&sys).unwrap().g;
        let s: Vec<f64> = g.iter().map(|x| a * x).collect();
        let (s0, s1) = (bem_snr(&sys, &g).unwrap(), bem_snr(&sys, &s).unwrap());
        prop_assert!(((s1 - s0) / s0).abs() < 1e-12);
    }

    #[test]
    fn splitting_a_cell_never_hurts(seed in 0u64..10_000, cells in 2usize..20) {
        let m = reference();
        let mut rng = rng_uniform(seed);
        let mut t: Vec<f64> = (0..cells - 1).map(|_| 30.0 * rng.next_f64() - 15.0).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        let p = Partition::new(t).unwrap();
        let sys = assemble(&m, &BemBasis::Rectangular(p.clone())).unwrap();
        let j = bem_mse(&sys, &b_mmse(&sys).unwrap().g);
        let i = (rng.next_f64() * p.cells() as f64) as usize;
        let (lo, hi) = p.bounds(i);
        let at = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => lo + (hi - lo) * (0.1 + 0.8 * rng.next_f64()),
            (false, true) => hi - 1.0 - 5.0 * rng.next_f64(),
            (true, false) => lo + 1.0 + 5.0 * rng.next_f64(),
            (false, false) => 0.0,
        };
        let finer = p.split(i, at).unwrap();
        let sys2 = assemble(&m, &BemBasis::Rectangular(finer)).unwrap();
        let j2 = bem_mse(&sys2, &b_mmse(&sys2).unwrap().g);
        prop_assert!(j2 <= j + 1e-12);
    }
}

#[test]
fn rectangular_b_mmse_is_q_mmse() {
    let m = reference();
    for n in [2, 9, 65, 127] {
        let p = Partition::uniform(n, -10.0, 10.0).unwrap();
        let sys = assemble(&m, &BemBasis::Rectangular(p.clone())).unwrap();
        let g = b_mmse(&sys).unwrap().g;
        let q = q_mmse(&m, &p).unwrap();
        for (a, b) in g.iter().zip(q.levels()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{n}: {a} {b}");
        }
        // Q-MSNR: the Q-MMSE levels reach the largest SNR of the rectangular basis
        let s = bem_snr(&sys, q.levels()).unwrap();
        let e = sys.explained().unwrap();
        assert!(((s - e / (sys.sigma_x2() - e)) / s).abs() < 1e-9);
    }
}

#[test]
fn bem_mse_matches_quadrature_report() {
    let m = reference();
    let p = Partition::uniform(17, -8.0, 8.0).unwrap();
    let basis = BemBasis::Rectangular(p);
    let sys = assemble(&m, &basis).unwrap();
    let g = b_mmse(&sys).unwrap().g;
    let r = report(&m, &basis.estimator(&g).unwrap(), &ReportMode::Quadrature).unwrap();
    assert!((bem_mse(&sys, &g) - r.mse).abs() < 1e-7);
}

#[test]
fn custom_basis_b_mmse_beats_its_members() {
    // odd polynomial basis: the B-MMSE estimator must do at least as well as y alone
    use bayesnr::bem::BasisFunction;
    let m = reference();
    let basis = BemBasis::custom(vec![BasisFunction::power(1), BasisFunction::power(3)]);
    let sys = assemble(&m, &basis).unwrap();
    let g = b_mmse(&sys).unwrap().g;
    let j = bem_mse(&sys, &g);
    let lin = sys.theta()[0] / sys.r().get(0, 0);
    assert!(j <= bem_mse(&sys, &[lin, 0.0]) + 1e-12);
    let r = report(&m, &basis.estimator(&g).unwrap(), &ReportMode::Quadrature).unwrap();
    assert!((r.mse - j).abs() < 1e-6 * j, "{} {}", r.mse, j);
}
