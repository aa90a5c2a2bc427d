//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;

use gridspect::covariance::{joint_covariance, sample_covariance, truncated_eigenbasis};
use gridspect::estimators::{
    build_structure_maps, constrained_ls, lambda_step, map_lambda_objective, nu_step, ols_estimate, postfilter,
    recover_eigenvectors, wcwf_estimate, wiener_filter, DEFAULT_CONDITION_CEILING,
};
use gridspect::evaluation::{
    build_illconditioning_scenario, builtin_network, condition_diagnostics, covariance_sweep, dist_w,
    random_radial_network, relative_frobenius_error, run_estimator, sweep_trend, CovarianceSweepConfig, DataSettings,
    EstimatorKind, EstimatorSettings, Loading, RadialNetworkConfig, Truncation, BUILTIN_SIZES,
};
use gridspect::grid_model::{build_admittance, make_constant_xr, spectral_decompose, AdmittanceMatrix};
use gridspect::linalg::{fro, ones, CMat, CVec};
use gridspect::scenario::{
    center, simulate, standard_circular_matrix, CurrentModel, NoiseLevel, OperatingPoint, PhasorDataset,
    SimulationConfig,
};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sim_config(samples: usize, sigma: f64, balanced: bool, noise: NoiseLevel) -> SimulationConfig {
    SimulationConfig {
        samples,
        currents: CurrentModel::white(sigma, balanced).unwrap(),
        operating_point: OperatingPoint::default(),
        noise_v: noise,
        noise_i: noise,
    }
}

fn dataset(y: &AdmittanceMatrix, cfg: &SimulationConfig, seed: u64) -> PhasorDataset {
    center(&simulate(y, cfg, seed).unwrap()).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// Noise-free data satisfies I = YV exactly.
fn noise_free_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [5usize, 10, 33] {
        for seed in 0..3u64 {
            let spec = random_radial_network(&RadialNetworkConfig::new(n), 100 + seed).map_err(err)?;
            let y = build_admittance(&spec);
            let ds = dataset(&y, &sim_config(2 * n, 0.01, true, NoiseLevel::Absolute(0.0)), seed);
            let jc = joint_covariance(&ds.i_meas, &ds.v_meas).map_err(err)?;
            let estimates = [
                ols_estimate(&ds).map_err(err)?,
                wiener_filter(&jc, DEFAULT_CONDITION_CEILING).map_err(err)?.estimate,
                wcwf_estimate(&truncated_eigenbasis(&jc, n).map_err(err)?).map_err(err)?,
                constrained_ls(&ds, &build_structure_maps(n).map_err(err)?).map_err(err)?,
            ];
            for est in &estimates {
                worst = worst.max(relative_frobenius_error(est, y.matrix()).map_err(err)?);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-6 && secs < 5.0,
        format!("worst eps_F {worst:.2e} (tol 1e-6), {secs:.2} s (limit 5 s)"),
    ))
}

/// Symmetric zero-row-sum basis matrix for the bus pair (i, j).
fn pair_basis(n: usize, i: usize, j: usize) -> CMat {
    let mut e = CMat::zeros(n, n);
    let one = Complex64::new(1.0, 0.0);
    e[(i, j)] = one;
    e[(j, i)] = one;
    e[(i, i)] = -one;
    e[(j, j)] = -one;
    e
}

/// Least squares over symmetric zero-row-sum matrices, solved as a dense
/// linear system in the off-diagonal coefficients.
fn kronecker_oracle(ds: &PhasorDataset) -> CMat {
    let n = ds.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let rows = n * ds.samples();
    let mut m = CMat::zeros(rows, pairs.len());
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let col = pair_basis(n, i, j) * &ds.v_meas;
        m.column_mut(k).copy_from_slice(col.as_slice());
    }
    let rhs = CVec::from_column_slice(ds.i_meas.as_slice());
    let coef = m.svd(true, true).solve(&rhs, 1e-12).unwrap();
    let mut y = CMat::zeros(n, n);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        y += pair_basis(n, i, j) * coef[k];
    }
    y
}

fn constrained_ls_equivalence() -> Outcome {
    let (mut path_gap, mut oracle_gap): (f64, f64) = (0.0, 0.0);
    for seed in 0..20u64 {
        let n = 3 + (seed % 3) as usize;
        let samples = n + 2 + (seed % 4) as usize;
        let spec = random_radial_network(&RadialNetworkConfig::new(n), 200 + seed).map_err(err)?;
        let y = build_admittance(&spec);
        let ds = dataset(&y, &sim_config(samples, 0.01, true, NoiseLevel::PercentOfMean(1.0)), seed);
        let maps = build_structure_maps(n).map_err(err)?;
        let cls = constrained_ls(&ds, &maps).map_err(err)?;
        let pf = postfilter(&ols_estimate(&ds).map_err(err)?, &maps).map_err(err)?;
        let oracle = kronecker_oracle(&ds);
        path_gap = path_gap.max(fro(&(&cls - &pf)) / fro(&pf));
        oracle_gap = oracle_gap.max(fro(&(&cls - &oracle)) / fro(&oracle));
    }
    Ok((
        path_gap <= 1e-10 && oracle_gap <= 1e-8,
        format!("postfilter(OLS) gap {path_gap:.2e} (tol 1e-10), Kronecker-system gap {oracle_gap:.2e} (tol 1e-8)"),
    ))
}

// With noise-free data Σ_Z has rank n, so L = n retains the whole spectrum.
fn wcwf_full_retention() -> Outcome {
    let (mut worst, mut worst_rho): (f64, f64) = (0.0, 0.0);
    for seed in 0..20u64 {
        let n = 3 + (seed % 6) as usize;
        let spec = random_radial_network(&RadialNetworkConfig::new(n), 300 + seed).map_err(err)?;
        let y = build_admittance(&spec);
        let ds = dataset(&y, &sim_config(6 * n, 0.01, true, NoiseLevel::Absolute(0.0)), seed);
        let jc = joint_covariance(&ds.i_meas, &ds.v_meas).map_err(err)?;
        let tb = truncated_eigenbasis(&jc, n).map_err(err)?;
        worst_rho = worst_rho.max(tb.rho_l / tb.spectrum.iter().sum::<f64>());
        let wcwf = wcwf_estimate(&tb).map_err(err)?;
        let wiener = wiener_filter(&jc, DEFAULT_CONDITION_CEILING).map_err(err)?.estimate;
        worst = worst.max(fro(&(&wcwf - &wiener)) / fro(&wiener));
    }
    Ok((
        worst <= 1e-8,
        format!("worst relative gap {worst:.2e} (tol 1e-8), worst rho_L/trace {worst_rho:.1e}"),
    ))
}

/// Projection onto symmetric zero-row-sum matrices through the KKT system
/// of the equality-constrained quadratic program, one real part at a time.
fn qp_projection(a: &CMat) -> CMat {
    let n = a.nrows();
    let vars = n * n;
    let idx = |i: usize, j: usize| i + j * n;
    let mut constraints: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            constraints.push(vec![(idx(i, j), 1.0), (idx(j, i), -1.0)]);
        }
    }
    for i in 0..n {
        constraints.push((0..n).map(|j| (idx(i, j), 1.0)).collect());
    }
    let size = vars + constraints.len();
    let mut kkt = DMatrix::<f64>::zeros(size, size);
    for k in 0..vars {
        kkt[(k, k)] = 1.0;
    }
    for (r, row) in constraints.iter().enumerate() {
        for &(k, v) in row {
            kkt[(vars + r, k)] = v;
            kkt[(k, vars + r)] = v;
        }
    }
    let lu = kkt.lu();
    let solve = |part: &dyn Fn(Complex64) -> f64| {
        let mut rhs = nalgebra::DVector::<f64>::zeros(size);
        for (k, z) in a.as_slice().iter().enumerate() {
            rhs[k] = part(*z);
        }
        lu.solve(&rhs).unwrap()
    };
    let re = solve(&|z: Complex64| z.re);
    let im = solve(&|z: Complex64| z.im);
    CMat::from_fn(n, n, |i, j| Complex64::new(re[idx(i, j)], im[idx(i, j)]))
}

fn postfilter_optimality() -> Outcome {
    let (mut obj_gap, mut idem): (f64, f64) = (0.0, 0.0);
    for seed in 0..20u64 {
        let n = 2 + (seed % 4) as usize;
        let a = standard_circular_matrix(n, n, 400 + seed);
        let maps = build_structure_maps(n).map_err(err)?;
        let p = postfilter(&a, &maps).map_err(err)?;
        let q = qp_projection(&a);
        let f_p = fro(&(&p - &a)).powi(2);
        let f_q = fro(&(&q - &a)).powi(2);
        obj_gap = obj_gap.max((f_p - f_q).abs() / f_q.max(f64::MIN_POSITIVE));
        let pp = postfilter(&p, &maps).map_err(err)?;
        idem = idem.max(fro(&(&pp - &p)) / fro(&p));
    }
    Ok((
        obj_gap <= 1e-8 && idem <= 1e-12,
        format!("objective gap to QP oracle {obj_gap:.2e} (tol 1e-8), idempotence {idem:.2e} (tol 1e-12)"),
    ))
}

/// Minimizer of a convex quadratic in one complex variable from a central
/// finite-difference gradient and Hessian.
fn fd_minimize(f: &dyn Fn(Complex64) -> f64, scale: f64) -> Complex64 {
    let h = scale.max(1e-3);
    let at = |x: f64, y: f64| f(Complex64::new(x, y));
    let f0 = at(0.0, 0.0);
    let gx = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
    let gy = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
    let hxx = (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
    let hyy = (at(0.0, h) - 2.0 * f0 + at(0.0, -h)) / (h * h);
    let hxy = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    let det = hxx * hyy - hxy * hxy;
    Complex64::new(-(hyy * gx - hxy * gy) / det, -(hxx * gy - hxy * gx) / det)
}

fn close(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn map_closed_forms() -> Outcome {
    let (mut lambda_gap, mut nu_gap): (f64, f64) = (0.0, 0.0);
    let mut worst_rise = f64::NEG_INFINITY;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let samples = 1 + (seed % 5) as usize;
        let w = standard_circular_matrix(n, n, 500 + seed).qr().q();
        let v = standard_circular_matrix(n, samples, 600 + seed);
        let i = standard_circular_matrix(n, samples, 700 + seed);
        let ds = PhasorDataset::new(v, i, 0.0, 0.0, seed).map_err(err)?;
        let beta = 0.1 * (seed % 4) as f64;
        let nu_tilde = w.adjoint() * &ds.v_meas;
        let phi = w.adjoint() * &ds.i_meas;
        let nu = standard_circular_matrix(n, samples, 800 + seed);
        let lambda = CVec::from_iterator(n, standard_circular_matrix(n, 1, 900 + seed).iter().copied());

        let closed = lambda_step(&nu, &phi, beta);
        for k in 0..n {
            let f = |z: Complex64| {
                let mut l = lambda.clone();
                l[k] = z;
                map_lambda_objective(&ds, &w, &nu, &l, beta)
            };
            lambda_gap = lambda_gap.max(close(closed[k], fd_minimize(&f, closed[k].norm())));
        }
        let closed = nu_step(&nu_tilde, &phi, &lambda);
        for k in 0..n {
            for t in 0..samples {
                let f = |z: Complex64| {
                    let mut m = nu.clone();
                    m[(k, t)] = z;
                    map_lambda_objective(&ds, &w, &m, &lambda, beta)
                };
                nu_gap = nu_gap.max(close(closed[(k, t)], fd_minimize(&f, closed[(k, t)].norm())));
            }
        }

        let mut nu = nu_tilde.clone();
        let mut lambda = CVec::zeros(n);
        let initial = map_lambda_objective(&ds, &w, &nu, &lambda, beta);
        let mut prev = initial;
        // Rises are measured against the starting value; the objective can
        // reach rounding level when one sample fits exactly.
        for _ in 0..25 {
            lambda = lambda_step(&nu, &phi, beta);
            let after_lambda = map_lambda_objective(&ds, &w, &nu, &lambda, beta);
            nu = nu_step(&nu_tilde, &phi, &lambda);
            let after_nu = map_lambda_objective(&ds, &w, &nu, &lambda, beta);
            worst_rise = worst_rise.max((after_lambda - prev) / initial);
            worst_rise = worst_rise.max((after_nu - after_lambda) / initial);
            prev = after_nu;
        }
    }
    Ok((
        lambda_gap <= 1e-6 && nu_gap <= 1e-6 && worst_rise <= 1e-12,
        format!(
            "λ-step gap {lambda_gap:.2e}, ν-step gap {nu_gap:.2e} (tol 1e-6), largest relative objective rise {worst_rise:.1e}"
        ),
    ))
}

fn stationarity_recovery() -> Outcome {
    let start = Instant::now();
    let spec = make_constant_xr(&builtin_network("radial33").ok_or("missing radial33")?);
    let y = build_admittance(&spec);
    let truth = spectral_decompose(&y).map_err(err)?;
    let cfg = sim_config(100_000, 0.01, true, NoiseLevel::Absolute(0.0));
    let ds = dataset(&y, &cfg, 7);
    let rec = recover_eigenvectors(&sample_covariance(&ds.v_meas).map_err(err)?).map_err(err)?;
    let sampled = dist_w(y.matrix(), &rec.basis.w).map_err(err)?;

    let n = y.n();
    let pinv = y.matrix().clone().pseudo_inverse(1e-8).map_err(err)?;
    let sigma_i = cfg.currents.effective_covariance(n);
    let common = ones(n) * ones(n).adjoint() * Complex64::new(cfg.operating_point.reference_sigma.powi(2), 0.0);
    let population = &pinv * sigma_i * pinv.adjoint() + common;
    let rec = recover_eigenvectors(&population).map_err(err)?;
    let exact = dist_w(y.matrix(), &rec.basis.w).map_err(err)?;
    let alignment = dist_w(y.matrix(), &truth.w).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        sampled <= 0.02 && exact <= 1e-8 && secs < 30.0,
        format!(
            "sample dist {sampled:.2e} (tol 2e-2), population dist {exact:.2e} (tol 1e-8, true basis {alignment:.1e}), {secs:.1} s (limit 30 s)"
        ),
    ))
}

fn covariance_trend() -> Outcome {
    let spec = builtin_network("radial33").ok_or("missing radial33")?;
    let cfg = CovarianceSweepConfig::new(spec);
    let points = covariance_sweep(&cfg, 11).map_err(err)?;
    let rho = sweep_trend(&points);
    let white = &points[0];
    let ratio = white.eps_f_original / white.eps_f_constant_xr;
    Ok((
        points.len() >= 8 && rho >= 0.9 && ratio >= 3.0,
        format!(
            "{} points, Spearman {rho:.3} (min 0.9); white currents eps_F {:.2}% constant x/r vs {:.2}% original, ratio {ratio:.1} (min 3)",
            points.len(),
            100.0 * white.eps_f_constant_xr,
            100.0 * white.eps_f_original
        ),
    ))
}

fn noise_ordering() -> Outcome {
    let start = Instant::now();
    let spec = builtin_network("radial33").ok_or("missing radial33")?;
    let y = build_admittance(&spec);
    let data = DataSettings::default();
    let settings = EstimatorSettings::default();
    let mut ok = true;
    let mut violations = Vec::new();
    for pct in [0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0] {
        let ds = dataset(&y, &data.simulation_config(&spec, pct).map_err(err)?, 13);
        let eps = |kind| -> Result<f64, String> {
            let run = run_estimator(kind, &ds, &settings).map_err(err)?;
            relative_frobenius_error(&run.estimate, y.matrix()).map_err(err)
        };
        let wcwf = eps(EstimatorKind::Wcwf)?;
        let others = [
            ("map", eps(EstimatorKind::MapLambda)?),
            ("ols", eps(EstimatorKind::Ols)?),
            ("lasso", eps(EstimatorKind::Lasso)?),
        ];
        if pct >= 0.01 {
            for (name, e) in others {
                if wcwf > e {
                    ok = false;
                    violations.push(format!("{pct}%: wcwf {:.1}% > {name} {:.1}%", 100.0 * wcwf, 100.0 * e));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = if violations.is_empty() {
        "WCWF lowest at every level ≥ 0.01%".to_string()
    } else {
        violations.join("; ")
    };
    Ok((ok && secs < 300.0, format!("{detail}, {secs:.1} s (limit 300 s)")))
}

fn conditioning_direction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let noise = NoiseLevel::PercentOfMean(0.01);
    for loading in [Loading::Similar, Loading::Light] {
        let sc = build_illconditioning_scenario(loading);
        let y = build_admittance(&sc.network);
        let ds = dataset(&y, &sc.simulation_config(10_080, noise), 17);
        let d = condition_diagnostics(&ds, Truncation::BusCount).map_err(err)?;
        let xvl = d.kappa_xvl.ok_or("no truncated basis")?;
        let factor = d.kappa_sigma_v / xvl;
        ok &= factor >= 100.0;
        parts.push(format!("{} {factor:.1e}×", loading.name()));
    }
    let data = DataSettings::default();
    for n in BUILTIN_SIZES {
        let spec = builtin_network(&format!("radial{n}")).ok_or("missing builtin")?;
        let y = build_admittance(&spec);
        let ds = dataset(&y, &data.simulation_config(&spec, 0.01).map_err(err)?, 17);
        let d = condition_diagnostics(&ds, Truncation::BusCount).map_err(err)?;
        let xvl = d.kappa_xvl.ok_or("no truncated basis")?;
        ok &= xvl < d.kappa_sigma_v;
        parts.push(format!("radial{n} {:.1e} vs {:.1e}", xvl, d.kappa_sigma_v));
    }
    Ok((ok, format!("κ(Σ_V)/κ(X_VLᴴX_VL) or κ(X_VLᴴX_VL) vs κ(Σ_V): {}", parts.join(", "))))
}

fn desk_scale_table() -> Outcome {
    let spec = builtin_network("radial33").ok_or("missing radial33")?;
    let y = build_admittance(&spec);
    let ds = dataset(&y, &DataSettings::default().simulation_config(&spec, 0.01).map_err(err)?, 19);
    let settings = EstimatorSettings::default();
    let best = |kind| -> Result<(f64, f64), String> {
        let mut time = f64::INFINITY;
        let mut eps = 0.0;
        for _ in 0..3 {
            let run = run_estimator(kind, &ds, &settings).map_err(err)?;
            time = time.min(run.wall_time);
            eps = relative_frobenius_error(&run.estimate, y.matrix()).map_err(err)?;
        }
        Ok((eps, time))
    };
    let (eps, t_wcwf) = best(EstimatorKind::Wcwf)?;
    let (_, t_lasso) = best(EstimatorKind::Lasso)?;
    let speedup = t_lasso / t_wcwf;
    Ok((
        eps <= 0.05 && speedup >= 10.0,
        format!(
            "WCWF eps_F {:.2}% (max 5%), {t_wcwf:.3} s vs Lasso {t_lasso:.3} s, speedup {speedup:.1}× (min 10×)",
            100.0 * eps
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("noise-free exactness", noise_free_exactness),
        ("constrained LS equivalence", constrained_ls_equivalence),
        ("WCWF full-retention limit", wcwf_full_retention),
        ("postfilter projection optimality", postfilter_optimality),
        ("MAP closed-form updates", map_closed_forms),
        ("stationarity eigenvector recovery", stationarity_recovery),
        ("covariance sweep trend", covariance_trend),
        ("noise sweep ordering", noise_ordering),
        ("conditioning direction", conditioning_direction),
        ("desk-scale accuracy and speed", desk_scale_table),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", k + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
