use bayesnr::distributions::{LaplaceLaw, LaplaceMixtureLaw, ObservationModel};
use bayesnr::estimator::{mmse_closed, mmse_numeric, report, soft_limiter, table1, Estimator, ReportMode};
use bayesnr::numerics::rng_uniform;
use bayesnr::quantized::{cell_moments, d_func, oq_estimator, q_mmse, q_mmse_from_moments, q_mmse_mse, s_mmse, Partition, QuantizedEstimator, QuantizerKind};
use proptest::prelude::*;

fn model(sx: f64, sn: f64, p0: f64, r: f64) -> ObservationModel {
    ObservationModel::new(
        LaplaceLaw::new(sx).unwrap().into(),
        LaplaceMixtureLaw::two_component(sn, p0, r).unwrap().into(),
    )
    .unwrap()
}

fn rates_apart(m: &ObservationModel) -> bool {
    m.channel().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closed_form_matches_numeric(sx in 0.5f64..2.0, sn in 0.3f64..6.0, p0 in 0.5f64..0.99, r in 1e-3f64..0.5, y in -15.0f64..15.0) {
        let m = model(sx, sn, p0, r);
        prop_assume!(rates_apart(&m));
        let a = mmse_closed(&m).unwrap().eval(y);
        let b = mmse_numeric(&m).try_eval(y).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * sx, "{} {}", a, b);
        let q = m.to_quadrature();
        prop_assert!((d_func(&m, y).unwrap() - d_func(&q, y).unwrap()).abs() <= 1e-8);
        prop_assert!((m.obs_cdf(y).unwrap() - q.obs_cdf(y).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn mmse_report_obeys_the_identities(sx in 0.5f64..2.0, sn in 0.3f64..6.0, p0 in 0.5f64..0.99, r in 1e-3f64..0.5) {
        let m = model(sx, sn, p0, r);
        prop_assume!(rates_apart(&m));
        let rep = report(&m, &mmse_closed(&m).unwrap(), &ReportMode::Quadrature).unwrap();
        let t = table1(rep.gain, m.signal_variance());
        prop_assert!((0.0..=1.0).contains(&rep.gain));
        for (a, b) in [(rep.output_power, t.output_power), (rep.mse, t.mmse), (rep.output_noise_var, t.noise_power), (rep.snr, t.msnr)] {
            prop_assert!(((a - b) / b).abs() < 1e-6, "{} {}", a, b);
        }
    }

    #[test]
    fn decomposition_holds_for_any_estimator(beta in 0.1f64..20.0, a in -3.0f64..3.0, sn in 0.5f64..6.0) {
        prop_assume!(a.abs() > 1e-3);
        let m = model(1.0, sn, 0.9, 1e-3);
        let g = soft_limiter(beta).unwrap().scaled(a);
        let r = report(&m, &g, &ReportMode::Quadrature).unwrap();
        prop_assert!((r.output_power - (r.gain * r.gain + r.output_noise_var)).abs() < 1e-9 * r.output_power.max(1.0));
        let j = (1.0 - r.gain).powi(2) + r.gain * r.gain / r.snr;
        prop_assert!((r.mse - j).abs() < 1e-8 * r.mse.max(1.0));
        let mmse = report(&m, &mmse_closed(&m).unwrap(), &ReportMode::Quadrature).unwrap();
        prop_assert!(mmse.snr >= r.snr - 1e-6);
        prop_assert!(mmse.mse <= r.mse + 1e-9);
    }

    #[test]
    fn cell_sums_telescope(seed in 0u64..10_000, cells in 1usize..80, sn in 0.5f64..6.0) {
        let m = model(1.0, sn, 0.9, 1e-3);
        let mut rng = rng_uniform(seed);
        let mut t: Vec<f64> = (0..cells - 1).map(|_| 40.0 * rng.next_f64() - 20.0).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        let cm = cell_moments(&m, &Partition::new(t).unwrap()).unwrap();
        prop_assert!(cm.theta.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!((cm.r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(cm.r.iter().all(|&r| r >= 0.0));
    }

    #[test]
    fn q_mmse_is_optimal_on_its_partition(seed in 0u64..10_000, n in 3usize..40, l in 1.0f64..15.0) {
        let m = model(1.0, 4.0, 0.9, 1e-3);
        let p = Partition::symmetric_uniform(n, l).unwrap();
        let cm = cell_moments(&m, &p).unwrap();
        let q = q_mmse_from_moments(&p, &cm).unwrap();
        let jq = q.report_with(&cm, 1.0).mse;
        prop_assert!((jq - q_mmse_mse(&cm, 1.0)).abs() < 1e-12);
        let mut rng = rng_uniform(seed);
        for _ in 0..1000 {
            let levels: Vec<f64> = q.levels().iter().map(|v| v + 0.5 * (2.0 * rng.next_f64() - 1.0)).collect();
            let e = QuantizedEstimator::new(p.clone(), levels, QuantizerKind::Custom).unwrap();
            prop_assert!(e.report_with(&cm, 1.0).mse >= jq - 1e-12);
        }
        let s = s_mmse(&m, &p, &mmse_closed(&m).unwrap()).unwrap();
        prop_assert!(s.report_with(&cm, 1.0).mse >= jq - 1e-12);
        let o = oq_estimator(m.signal(), &p).unwrap();
        prop_assert!(o.report_with(&cm, 1.0).mse >= jq - 1e-12);
        // symmetric model and partition give odd levels
        for i in 0..n {
            prop_assert!((q.levels()[i] + q.levels()[n - 1 - i]).abs() < 1e-10);
        }
    }
}

#[test]
fn theorem_three_staircase_approaches_the_curve() {
    let m = model(1.0, 4.0, 0.9, 1e-3);
    let g = mmse_closed(&m).unwrap();
    let mut last = f64::INFINITY;
    for n in [9, 17, 33, 65, 129, 257] {
        let p = Partition::uniform(n, -10.0, 10.0).unwrap();
        let q = q_mmse(&m, &p).unwrap();
        let mut sup = 0.0f64;
        for i in 1..n - 1 {
            let (lo, hi) = p.bounds(i);
            for k in 0..=16 {
                sup = sup.max((q.levels()[i] - g.eval(lo + (hi - lo) * k as f64 / 16.0)).abs());
            }
        }
        assert!(sup < last, "{n}: {sup} !< {last}");
        last = sup;
    }
}

#[test]
fn s_mmse_and_q_mmse_meet_when_cells_shrink() {
    let m = model(1.0, 4.0, 0.9, 1e-3);
    let g = mmse_closed(&m).unwrap();
    let mut gaps = Vec::new();
    for n in [33, 129, 513] {
        let p = Partition::uniform(n.min(512), -8.0, 8.0).unwrap();
        let q = q_mmse(&m, &p).unwrap();
        let s = s_mmse(&m, &p, &g).unwrap();
        let gap = (1..p.cells() - 1).map(|i| (q.levels()[i] - s.levels()[i]).abs()).fold(0.0, f64::max);
        gaps.push(gap);
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn identity_and_zero_reports() {
    let m = model(1.0, 2.0, 0.9, 1e-3);
    let id = report(&m, &Estimator::Identity, &ReportMode::Quadrature).unwrap();
    assert!((id.snr - 0.25).abs() < 1e-9);
    let z = report(&m, &Estimator::Zero, &ReportMode::Quadrature).unwrap();
    assert_eq!(z.snr, 0.0);
}
