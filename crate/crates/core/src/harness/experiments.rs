use rayon::prelude::*;

use super::config::{ExperimentConfig, QuantizerKind};
use super::csv::{Cell, Table};
use super::HarnessError;
use crate::distributions::ObservationModel;
use crate::estimator::{mmse_closed, mmse_numeric, monte_carlo_report, report, ummse, Estimator, ReportMode};
use crate::quantized::{
    cell_moments, default_overload_grid, lloyd_max, optimize_overload, oq_estimator, q_mmse, q_mmse_from_moments, s_mmse,
    uniform_partition_for_overload, Partition,
};
use crate::to_db;

/// The optimal estimator for `model`: closed form when available.
pub fn mmse_for(model: &ObservationModel) -> Estimator {
    mmse_closed(model).unwrap_or_else(|_| mmse_numeric(model))
}

fn overload_grid(cfg: &ExperimentConfig, model: &ObservationModel) -> Vec<f64> {
    match &cfg.quantizer.l_grid {
        Some(g) => g.iter().map(|l| l * model.obs_std_dev()).collect(),
        None => default_overload_grid(model),
    }
}

/// Thresholds for `cells` cells according to the configured quantizer kind.
pub fn design_partition(cfg: &ExperimentConfig, model: &ObservationModel, cells: usize) -> Result<Partition, HarnessError> {
    let q = &cfg.quantizer;
    Ok(match q.kind {
        QuantizerKind::Uniform => Partition::symmetric_uniform(cells, q.y_max)?,
        QuantizerKind::LloydMax => lloyd_max(model.signal(), cells)?.partition,
        QuantizerKind::UniformOverload => uniform_partition_for_overload(model, cells, q.p_ol)?,
        QuantizerKind::Sweep => optimize_overload(model, cells, &overload_grid(cfg, model))?.estimator.partition().clone(),
    })
}

/// `y, g_mmse, g_qmmse_N<k>…, g_smmse_N<k>…` over the configured grid.
pub fn run_curve(cfg: &ExperimentConfig) -> Result<Table, HarnessError> {
    let model = cfg.model()?;
    let g = mmse_for(&model);
    let ns = &cfg.quantizer.n;
    let mut q = Vec::new();
    let mut s = Vec::new();
    for &n in ns {
        let p = design_partition(cfg, &model, n)?;
        q.push(q_mmse(&model, &p)?);
        s.push(s_mmse(&model, &p, &g)?);
    }
    let mut header = vec!["y".to_string(), "g_mmse".to_string()];
    header.extend(ns.iter().map(|n| format!("g_qmmse_N{n}")));
    header.extend(ns.iter().map(|n| format!("g_smmse_N{n}")));
    let ys = cfg.curve.points();
    let mmse = ys.par_iter().map(|&y| g.try_eval(y)).collect::<crate::Result<Vec<_>>>()?;
    let mut t = Table::new(header);
    for (&y, &m) in ys.iter().zip(&mmse) {
        let mut row = vec![y, m];
        row.extend(q.iter().map(|e| e.eval(y)));
        row.extend(s.iter().map(|e| e.eval(y)));
        t.push_nums(row);
    }
    Ok(t)
}

/// SNR gain and MSE of one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perf {
    pub gain_db: f64,
    pub mse: f64,
}

/// Uniform or Lloyd-Max thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Version {
    U,
    Nu,
}

impl Version {
    pub fn label(self) -> &'static str {
        match self {
            Version::U => "u",
            Version::Nu => "nu",
        }
    }
}

/// Quantized estimators sharing one partition at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepDesign {
    pub n: usize,
    pub version: Version,
    pub p_ol: f64,
    pub qmmse: Perf,
    pub smmse: Perf,
    pub oq: Perf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub input_snr_db: f64,
    pub mmse: Perf,
    pub designs: Vec<SweepDesign>,
    /// `(N, L, performance)` of Q-MMSE with the overload point optimized.
    pub optimized: Option<(usize, f64, Perf)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
}

impl Sweep {
    pub fn to_table(&self) -> Table {
        let mut header = vec!["input_snr_db".to_string(), "gain_db_mmse".into(), "mse_mmse".into()];
        if let Some(p) = self.points.first() {
            for d in &p.designs {
                let tag = format!("{}_N{}", d.version.label(), d.n);
                for e in ["qmmse", "smmse", "oq"] {
                    header.push(format!("gain_db_{e}_{tag}"));
                    header.push(format!("mse_{e}_{tag}"));
                }
                header.push(format!("p_ol_{tag}"));
            }
            if let Some((n, _, _)) = p.optimized {
                header.push(format!("gain_db_qmmse_opt_N{n}"));
                header.push(format!("mse_qmmse_opt_N{n}"));
                header.push(format!("L_opt_N{n}"));
            }
        }
        let mut t = Table::new(header);
        for p in &self.points {
            let mut row = vec![p.input_snr_db, p.mmse.gain_db, p.mmse.mse];
            for d in &p.designs {
                for perf in [d.qmmse, d.smmse, d.oq] {
                    row.push(perf.gain_db);
                    row.push(perf.mse);
                }
                row.push(d.p_ol);
            }
            if let Some((_, l, perf)) = p.optimized {
                row.extend([perf.gain_db, perf.mse, l]);
            }
            t.push_nums(row);
        }
        t
    }
}

fn perf(r: &crate::estimator::EstimatorReport, input_snr: f64) -> Perf {
    Perf {
        gain_db: to_db(r.snr / input_snr),
        mse: r.mse,
    }
}

fn sweep_point(cfg: &ExperimentConfig, snr_db: f64, nu: &[(usize, Partition)]) -> Result<SweepPoint, HarnessError> {
    let model = cfg.model_at_snr(snr_db)?;
    let sx2 = model.signal_variance();
    let gin = model.input_snr();
    let g = mmse_for(&model);
    let mmse = perf(&report(&model, &g, &ReportMode::Quadrature)?, gin);
    let mut designs = Vec::new();
    for (n, p_nu) in nu {
        let t = p_nu.thresholds();
        let p_u = Partition::uniform(*n, t[0], t[t.len() - 1])?;
        for (version, p) in [(Version::U, p_u), (Version::Nu, p_nu.clone())] {
            let cm = cell_moments(&model, &p)?;
            let q = q_mmse_from_moments(&p, &cm)?;
            let s = s_mmse(&model, &p, &g)?;
            let o = oq_estimator(model.signal(), &p)?;
            designs.push(SweepDesign {
                n: *n,
                version,
                p_ol: p.overload_probability(&model)?,
                qmmse: perf(&q.report_with(&cm, sx2), gin),
                smmse: perf(&s.report_with(&cm, sx2), gin),
                oq: perf(&o.report_with(&cm, sx2), gin),
            });
        }
    }
    let optimized = match cfg.quantizer.optimized_n {
        0 => None,
        n => {
            let d = optimize_overload(&model, n, &overload_grid(cfg, &model))?;
            let r = d.estimator.report(&model)?;
            Some((n, d.l, perf(&r, gin)))
        }
    };
    Ok(SweepPoint {
        input_snr_db: snr_db,
        mmse,
        designs,
        optimized,
    })
}

/// Performance against input SNR. For each configured `N` the non-uniform
/// thresholds come from Lloyd-Max on the signal density; the uniform version
/// spaces `N - 1` thresholds evenly between the same outer thresholds.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Sweep, HarnessError> {
    let signal = cfg.model()?.signal().clone();
    let nu = cfg
        .quantizer
        .n
        .par_iter()
        .map(|&n| Ok((n, lloyd_max(&signal, n)?.partition)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let points = cfg
        .sweep
        .points()
        .par_iter()
        .map(|&s| sweep_point(cfg, s, &nu))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Sweep { points })
}

/// Monte-Carlo estimates for the identity, MMSE, UMMSE and the configured
/// Q-MMSE estimators, next to their deterministic values.
pub fn run_mc(cfg: &ExperimentConfig) -> Result<Table, HarnessError> {
    if cfg.mc.samples < 1000 {
        return Err(HarnessError::Config(format!("mc.samples: at least 1000 needed, got {}", cfg.mc.samples)));
    }
    let header = [
        "input_snr_db", "estimator", "samples", "seed", "K", "K_se", "J", "J_se", "snr", "snr_se", "gain_db", "K_quad", "J_quad",
        "snr_quad",
    ];
    let mut t = Table::new(header.iter().map(|s| s.to_string()).collect());
    let points: Vec<Option<f64>> = if cfg.mc.over_sweep {
        cfg.sweep.points().into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    for snr_db in points {
        let model = match snr_db {
            Some(s) => cfg.model_at_snr(s)?,
            None => cfg.model()?,
        };
        let g = mmse_for(&model);
        let rg = report(&model, &g, &ReportMode::Quadrature)?;
        let mut list: Vec<(String, Estimator, crate::estimator::EstimatorReport)> = vec![
            ("identity".into(), Estimator::Identity, report(&model, &Estimator::Identity, &ReportMode::Quadrature)?),
            ("mmse".into(), g.clone(), rg),
        ];
        let u = ummse(g.clone(), rg.gain)?;
        let ru = report(&model, &u, &ReportMode::Quadrature)?;
        list.push(("ummse".into(), u, ru));
        for &n in &cfg.quantizer.n {
            let p = design_partition(cfg, &model, n)?;
            let q = q_mmse(&model, &p)?;
            let rq = q.report(&model)?;
            list.push((format!("qmmse_N{n}"), q.to_estimator(), rq));
        }
        let gin = model.input_snr();
        for (k, (name, est, quad)) in list.into_iter().enumerate() {
            // each estimator gets its own stream so adding one leaves the others unchanged
            let seed = cfg.mc.seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
            let mc = monte_carlo_report(&model, &est, seed, cfg.mc.samples)?;
            let r = mc.report;
            t.push(vec![
                Cell::Num(to_db(gin)),
                Cell::Text(name),
                Cell::Num(cfg.mc.samples as f64),
                Cell::Num(cfg.mc.seed as f64),
                r.gain.into(),
                mc.gain_se.into(),
                r.mse.into(),
                mc.mse_se.into(),
                r.snr.into(),
                mc.snr_se.into(),
                to_db(r.snr / gin).into(),
                quad.gain.into(),
                quad.mse.into(),
                quad.snr.into(),
            ]);
        }
    }
    Ok(t)
}

/// Thresholds of the configured design for every `N`, one row per threshold.
pub fn run_thresholds(cfg: &ExperimentConfig) -> Result<Table, HarnessError> {
    let model = cfg.model()?;
    let header = ["design", "N", "L", "p_ol", "i", "y_i"];
    let mut t = Table::new(header.iter().map(|s| s.to_string()).collect());
    let label = match cfg.quantizer.kind {
        QuantizerKind::Uniform => "uniform",
        QuantizerKind::LloydMax => "lloyd-max",
        QuantizerKind::UniformOverload => "uniform-overload",
        QuantizerKind::Sweep => "sweep",
    };
    for &n in &cfg.quantizer.n {
        let p = design_partition(cfg, &model, n)?;
        let th = p.thresholds();
        let l = th[th.len() - 1];
        let pol = p.overload_probability(&model)?;
        for (i, &y) in th.iter().enumerate() {
            t.push(vec![
                Cell::Text(label.into()),
                Cell::Num(n as f64),
                Cell::Num(l),
                Cell::Num(pol),
                Cell::Num((i + 1) as f64),
                Cell::Num(y),
            ]);
        }
    }
    Ok(t)
}
