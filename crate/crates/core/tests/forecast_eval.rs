#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use semidx_core::eval::{self, aic, aic_path, dm_test, fit_aic, mspe, relative_mspe};
use semidx_core::forecast::{
    fit_ar, fit_arx, recursive_backtest, ArxFit, BacktestConfig, BacktestData, ModelId, RwPolicy,
    TargetKind,
};

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Normal-equation OLS with standard errors, written independently of the
/// QR solver under test.
fn ols_oracle(rows: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = rows[0].len();
    let mut a = vec![vec![0.0; 2 * k]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = rows.iter().map(|r| r[i] * r[j]).sum();
        }
        a[i][k + i] = 1.0;
    }
    // Gauss-Jordan inverse of XᵀX.
    for c in 0..k {
        let p = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..k {
            if r != c {
                let f = a[r][c];
                for j in 0..2 * k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    let xty: Vec<f64> = (0..k).map(|i| rows.iter().zip(y).map(|(r, yi)| r[i] * yi).sum()).collect();
    let beta: Vec<f64> = (0..k).map(|i| (0..k).map(|j| a[i][k + j] * xty[j]).sum()).collect();
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, yi)| {
            let f: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (yi - f).powi(2)
        })
        .sum();
    let s2 = rss / (rows.len() - k) as f64;
    let se = (0..k).map(|i| (s2 * a[i][k + i]).sqrt()).collect();
    (beta, se)
}

#[test]
fn noisy_arx_matches_ols_oracle_and_recovers_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = 300;
    let x: Vec<f64> = (0..t).map(|_| normal(&mut rng)).collect();
    let mut y = vec![0.0];
    for i in 0..t - 1 {
        y.push(0.5 + 0.3 * y[i] + 0.8 * x[i] + 0.4 * normal(&mut rng));
    }
    let fit = fit_arx(&y, &x).unwrap();
    let rows: Vec<Vec<f64>> = (0..t - 1).map(|i| vec![1.0, y[i], x[i]]).collect();
    let (beta, se) = ols_oracle(&rows, &y[1..]);
    let got = [fit.alpha, fit.gamma, fit.beta.unwrap()];
    for i in 0..3 {
        assert!((got[i] - beta[i]).abs() < 1e-9);
        assert!((got[i] - [0.5, 0.3, 0.8][i]).abs() < 3.0 * se[i]);
    }
    let resid: f64 = rows
        .iter()
        .zip(&y[1..])
        .map(|(r, yi)| (yi - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>()).powi(2))
        .sum();
    assert!((fit.sigma2 - resid / (t - 1 - 3) as f64).abs() < 1e-10);
}

#[test]
fn arx_with_zero_beta_reproduces_ar() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let y: Vec<f64> = (0..40).map(|_| normal(&mut rng)).collect();
    let ar = fit_ar(&y).unwrap();
    let forced = ArxFit { beta: Some(0.0), ..ar };
    for &(yt, xt) in &[(0.3, 5.0), (-1.0, -2.0), (2.5, 0.0)] {
        assert_eq!(forced.forecast(yt, xt), ar.forecast(yt, xt));
    }
}

struct Fixture {
    target: Vec<Option<f64>>,
    scores: Vec<Vec<Option<f64>>>,
    sentiment: Vec<f64>,
}

/// Target driven by the first score column with coefficient `beta`; the
/// remaining columns are noise. Leading target value masked, as for returns.
fn fixture(seed: u64, periods: usize, columns: usize, beta: f64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<Vec<Option<f64>>> = (0..periods)
        .map(|t| {
            (0..columns)
                .map(|j| if j > 0 && (t * 7 + j) % 23 == 0 { None } else { Some(normal(&mut rng)) })
                .collect()
        })
        .collect();
    let mut y = vec![0.0; periods];
    for t in 0..periods - 1 {
        y[t + 1] = 0.2 + 0.3 * y[t] + beta * scores[t][0].unwrap() + 0.5 * normal(&mut rng);
    }
    let mut target: Vec<Option<f64>> = y.into_iter().map(Some).collect();
    target[0] = None;
    let sentiment = (0..periods).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Fixture { target, scores, sentiment }
}

fn config(first: usize, last: usize) -> BacktestConfig {
    BacktestConfig {
        first_origin: first,
        last_origin: last,
        models: ModelId::ALL.to_vec(),
        kind: TargetKind::Return,
        rw: RwPolicy::Reference,
        pls_components: 1,
    }
}

fn data(f: &Fixture) -> BacktestData<'_, Vec<Option<f64>>> {
    BacktestData { target: &f.target, scores: &f.scores, sentiment: Some(&f.sentiment) }
}

#[test]
fn one_forecast_per_origin_and_outlier_isolation() {
    let mut f = fixture(1, 100, 6, 0.8);
    let cfg = config(69, 98);
    let before = recursive_backtest(&data(&f), &cfg).unwrap();
    for run in &before.runs {
        assert_eq!(run.forecasts.len(), 30);
        assert_eq!(run.origins, (69..=98).collect::<Vec<_>>());
    }
    f.target[90] = Some(1e6);
    let after = recursive_backtest(&data(&f), &cfg).unwrap();
    for (a, b) in before.runs.iter().zip(&after.runs) {
        for (i, &o) in a.origins.iter().enumerate() {
            if o < 90 {
                assert_eq!(a.forecasts[i].to_bits(), b.forecasts[i].to_bits(), "{} at {o}", a.model);
            }
        }
        if a.model != ModelId::Rw {
            assert_ne!(a.forecasts[29], b.forecasts[29]);
        }
    }
}

#[test]
fn windows_expand_by_one_period_per_origin() {
    let f = fixture(2, 80, 5, 0.5);
    let r = recursive_backtest(&data(&f), &config(40, 70)).unwrap();
    for pair in r.vintage_fits.windows(2) {
        assert_eq!(pair[1].ar.t_eff, pair[0].ar.t_eff + 1);
        assert_eq!(pair[1].erk.t_eff, pair[0].erk.t_eff + 1);
    }
    // The target starts at period 1, so origin 40 has 39 regression pairs.
    assert_eq!(r.vintage_fits[0].ar.t_eff, 39);
    assert_eq!(r.pls.len(), 31);
}

#[test]
fn ew_is_mean_of_single_keyword_forecasts() {
    let mut f = fixture(3, 60, 4, 0.6);
    for row in &mut f.scores {
        for c in row.iter_mut() {
            c.get_or_insert(0.1);
        }
    }
    let r = recursive_backtest(&data(&f), &config(30, 45)).unwrap();
    let ew = r.run(ModelId::Ew).unwrap();
    let y: Vec<f64> = f.target[1..].iter().map(|v| v.unwrap()).collect();
    for (i, &o) in ew.origins.iter().enumerate() {
        let window = &y[..o];
        let members: Vec<f64> = (0..4)
            .map(|j| {
                let x: Vec<f64> = f.scores[1..=o].iter().map(|r| r[j].unwrap()).collect();
                fit_arx(window, &x).unwrap().forecast(window[o - 1], x[o - 1])
            })
            .collect();
        let mean = members.iter().sum::<f64>() / 4.0;
        assert!((ew.forecasts[i] - mean).abs() < 1e-12);
    }
}

#[test]
fn ew_excludes_failing_members_with_warning() {
    let mut f = fixture(8, 50, 3, 0.6);
    for row in &mut f.scores {
        row[2] = None;
    }
    let r = recursive_backtest(&data(&f), &config(30, 35)).unwrap();
    assert_eq!(r.warnings.len(), 6);
    assert!(r.warnings[0].contains("member 2"));
}

#[test]
fn rw_policies() {
    let f = fixture(5, 40, 3, 0.0);
    let mut cfg = config(20, 30);
    cfg.models = vec![ModelId::Rw];
    let zero = recursive_backtest(&data(&f), &cfg).unwrap();
    assert!(zero.runs[0].forecasts.iter().all(|&v| v == 0.0));
    cfg.kind = TargetKind::Volatility;
    let last = recursive_backtest(&data(&f), &cfg).unwrap();
    for (i, &o) in last.runs[0].origins.iter().enumerate() {
        assert_eq!(last.runs[0].forecasts[i], f.target[o].unwrap());
    }
    cfg.rw = RwPolicy::RecursiveMean;
    let mean = recursive_backtest(&data(&f), &cfg).unwrap();
    let y: Vec<f64> = f.target[1..=20].iter().map(|v| v.unwrap()).collect();
    assert!((mean.runs[0].forecasts[0] - y.iter().sum::<f64>() / 20.0).abs() < 1e-12);
}

#[test]
fn fails_fast_on_out_of_range_origins() {
    let f = fixture(6, 50, 3, 0.5);
    assert!(recursive_backtest(&data(&f), &config(30, 49)).is_err());
    assert!(recursive_backtest(&data(&f), &config(5, 20)).is_err());
    let mut g = fixture(6, 50, 3, 0.5);
    g.target[25] = None;
    assert!(recursive_backtest(&data(&g), &config(30, 40)).is_err());
}

#[test]
fn white_noise_target_gives_relative_mspe_near_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 500;
    let f = Fixture {
        target: (0..n).map(|_| Some(normal(&mut rng))).collect(),
        scores: (0..n).map(|_| (0..4).map(|_| Some(normal(&mut rng))).collect()).collect(),
        sentiment: (0..n).map(|_| normal(&mut rng)).collect(),
    };
    let mut cfg = config(100, n - 2);
    cfg.models = vec![ModelId::Rw, ModelId::Ar, ModelId::Erk];
    let r = recursive_backtest(&data(&f), &cfg).unwrap();
    let ev = eval::evaluate(&r.runs, ModelId::Rw, None).unwrap();
    for m in &ev.models {
        assert!((m.relative_mspe - 1.0).abs() < 0.1, "{}: {}", m.model, m.relative_mspe);
    }
}

#[test]
fn true_regressor_beats_random_walk() {
    let f = fixture(9, 200, 10, 1.0);
    let r = recursive_backtest(&data(&f), &config(120, 198)).unwrap();
    let ev = eval::evaluate(&r.runs, ModelId::Rw, None).unwrap();
    let erk = ev.models.iter().find(|m| m.model == ModelId::Erk).unwrap();
    assert!(erk.relative_mspe < 0.8, "{}", erk.relative_mspe);
    assert!(erk.dm.p_value < 0.05);
    // The composite puts most weight on the driving column.
    let w = r.pls.last().unwrap().fit.full_weights();
    assert!(w[0].abs() > 0.8);
}

#[test]
fn perturbing_future_data_never_changes_earlier_forecasts() {
    for seed in 0..4 {
        let base = fixture(100 + seed, 70, 5, 0.7);
        let cfg = config(35, 68);
        let r0 = recursive_backtest(&data(&base), &cfg).unwrap();
        let cut = 40 + 6 * seed as usize;
        let mut f = fixture(100 + seed, 70, 5, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in cut + 1..70 {
            f.target[t] = Some(normal(&mut rng) * 10.0);
            f.sentiment[t] = rng.gen_range(-1.0..1.0);
            for c in f.scores[t].iter_mut() {
                *c = if rng.gen_bool(0.2) { None } else { Some(normal(&mut rng)) };
            }
        }
        let r1 = recursive_backtest(&data(&f), &cfg).unwrap();
        for (a, b) in r0.runs.iter().zip(&r1.runs) {
            for i in 0..a.origins.len() {
                if a.origins[i] <= cut {
                    assert_eq!(a.forecasts[i].to_bits(), b.forecasts[i].to_bits());
                    assert_eq!(a.coefficients[i], b.coefficients[i]);
                }
            }
        }
    }
}

#[test]
fn dm_statistic_matches_step_by_step_hac() {
    // Reference values from a plain-loop Bartlett HAC computation (lag 2).
    let lm = [
        0.82, 1.37, 0.05, 2.41, 0.66, 0.19, 1.88, 0.73, 0.31, 1.12, 0.94, 0.27, 3.05, 0.58, 0.11,
        1.46, 0.87, 0.39, 2.02, 0.64,
    ];
    let lb = [
        1.10, 1.25, 0.42, 2.96, 0.71, 0.55, 1.61, 1.20, 0.35, 1.58, 0.90, 0.81, 3.40, 0.49, 0.37,
        1.92, 1.15, 0.33, 2.67, 0.95,
    ];
    let r = dm_test(&lm, &lb, None).unwrap();
    assert_eq!(r.lags, 2);
    let d: Vec<f64> = lb.iter().zip(&lm).map(|(b, m)| b - m).collect();
    assert!((eval::bartlett_lrv(&d, 2) - 0.02481708333333331).abs() < 1e-12);
    assert!((r.statistic - 6.884166589706281).abs() < 1e-8);
    assert!((r.p_value - 2.9063418338637348e-12).abs() < 1e-8);
    let swapped = dm_test(&lb, &lm, None).unwrap();
    assert_eq!(swapped.statistic, -r.statistic);
}

#[test]
fn dm_edge_cases() {
    let l = [0.4; 15];
    let r = dm_test(&l, &l, None).unwrap();
    assert_eq!((r.statistic, r.p_value), (0.0, 0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let model: Vec<f64> = (0..50).map(|_| 1.0).collect();
    let bench: Vec<f64> = (0..50).map(|_| 2.0 + 1e-6 * normal(&mut rng)).collect();
    let r = dm_test(&model, &bench, None).unwrap();
    assert!(r.statistic > 1e3 && r.p_value < 1e-12);
    assert!(dm_test(&[1.0; 5], &[2.0; 5], None).is_err());
    assert_eq!(dm_test(&l, &l, Some(7)).unwrap().lags, 7);
}

#[test]
fn mspe_scaling_and_identity() {
    let realized = [1.0, -0.5, 2.0, 0.3];
    let bench = [0.5, 0.0, 1.0, 0.1];
    let doubled: Vec<f64> = realized.iter().zip(&bench).map(|(r, b)| r - 2.0 * (r - b)).collect();
    let mb = mspe(&bench, &realized).unwrap();
    let md = mspe(&doubled, &realized).unwrap();
    assert!((relative_mspe(md, mb).unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(relative_mspe(mb, mb).unwrap(), 1.0);
}

fn ar_series(rng: &mut ChaCha8Rng, n: usize, x: &[f64], beta: f64) -> Vec<f64> {
    let mut y = vec![1.0];
    for t in 0..n - 1 {
        y.push(0.5 + 0.4 * y[t] + beta * x[t] + 0.5 * normal(rng));
    }
    y
}

#[test]
fn aic_difference_invariant_to_level_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let x: Vec<f64> = (0..80).map(|_| normal(&mut rng)).collect();
    let y = ar_series(&mut rng, 80, &x, 0.6);
    let shifted: Vec<f64> = y.iter().map(|v| v + 123.4).collect();
    let diff = |y: &[f64]| fit_aic(&fit_ar(y).unwrap()).unwrap() - fit_aic(&fit_arx(y, &x).unwrap()).unwrap();
    assert!((diff(&y) - diff(&shifted)).abs() < 1e-8);
}

#[test]
fn aic_path_signs() {
    let mut noise_medians = Vec::new();
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..60).map(|_| normal(&mut rng)).collect();
        let y = ar_series(&mut rng, 60, &x, 0.0);
        let d = fit_aic(&fit_ar(&y).unwrap()).unwrap() - fit_aic(&fit_arx(&y, &x).unwrap()).unwrap();
        noise_medians.push(d);
    }
    noise_medians.sort_by(f64::total_cmp);
    assert!(noise_medians[15] < 0.0);

    let f = fixture(33, 120, 6, 1.0);
    let r = recursive_backtest(&data(&f), &config(50, 118)).unwrap();
    let path = aic_path(&r.vintage_fits);
    assert_eq!(path.len(), 69);
    assert!(path.iter().all(|(_, d)| d.unwrap() > 0.0));
    // First point equals a standalone computation on that window.
    let first = &r.vintage_fits[0];
    let standalone = aic(first.ar.rss / first.ar.t_eff as f64, first.ar.t_eff, 2).unwrap()
        - aic(first.erk.rss / first.erk.t_eff as f64, first.erk.t_eff, 3).unwrap();
    assert_eq!(path[0].1.unwrap(), standalone);
}

proptest! {
    #[test]
    fn dm_is_antisymmetric(pairs in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 10..60)) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let ab = dm_test(&a, &b, None).unwrap();
        let ba = dm_test(&b, &a, None).unwrap();
        prop_assert_eq!(ab.statistic, -ba.statistic);
    }

    #[test]
    fn relative_mspe_of_self_is_one(v in proptest::collection::vec(-5.0f64..5.0, 1..30), shift in 0.1f64..3.0) {
        let f: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let m = mspe(&f, &v).unwrap();
        prop_assert_eq!(relative_mspe(m, m).unwrap(), 1.0);
    }
}
