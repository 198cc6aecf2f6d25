//! Acceptance suite: one test per criterion, each printing a PASS line and
//! enforcing its runtime budget. Run with `cargo test --test acceptance --
//! --nocapture` to see the lines.

use std::time::Instant;

use informativity::io::{AttackReportFile, InformativityReportFile};
use informativity::*;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rmat(rng: &mut StdRng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn rvec(rng: &mut StdRng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn finish(criterion: &str, what: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its {budget_s} s budget ({elapsed:.1} s)"
    );
    println!("acceptance criterion {criterion} ({what}): PASS [{elapsed:.1} s]");
}

/// Observable pair `(A, C)` with `B = 0`, `D = 0`, plus full-row-rank data.
fn observable_b0_instance(
    rng: &mut StdRng,
    n: usize,
    t: usize,
    input_scale: f64,
) -> (Dataset, SystemModel) {
    loop {
        let a = rmat(rng, n, n) * 0.6;
        let c = rmat(rng, 1, n);
        if numerical_rank(&model::observability_matrix(&a, &c), &tol()) < n {
            continue;
        }
        let sys = SystemModel::new(
            Some(a),
            DMatrix::zeros(n, 1),
            c,
            DMatrix::zeros(1, 1),
            DMatrix::zeros(n, 0),
            DMatrix::zeros(1, 0),
        )
        .unwrap();
        let cfg = SimConfig {
            t,
            seed: rng.random::<u64>(),
            x0: X0Mode::RandomUnit,
            input: if input_scale == 0.0 {
                InputMode::Zero
            } else {
                InputMode::Random { scale: input_scale }
            },
            noise: NoiseMode::None,
        };
        let data = simulate(&sys, &cfg).unwrap();
        if numerical_rank(&data.x_minus, &tol()) == n {
            return (data, sys);
        }
    }
}

use informativity::model;

#[test]
fn criterion_1_rank_one_map_triple() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(1001);
    let t = tol();
    let mut checked = 0;
    while checked < 500 {
        let mz = 1 + rng.random_range(0..6usize);
        let cols = 2 + rng.random_range(0..11usize); // T <= 12
        let z = rmat(&mut rng, mz, cols);
        let v = rvec(&mut rng, cols);
        let zv = &z * &v;
        if zv.norm() < 1e-2 {
            continue;
        }
        let raw_xi = rvec(&mut rng, mz);
        let pivot = raw_xi.dot(&zv);
        if pivot.abs() < 1e-2 {
            continue;
        }
        let xi = raw_xi / pivot;
        let z_tar = rvec(&mut rng, mz);
        if xi.dot(&z_tar).abs() < 1e-3 {
            continue;
        }

        let phi = rank_one_map(&z, &v, &z_tar, &xi, &t).unwrap();

        // (i) nonsingular
        assert_eq!(numerical_rank(&phi, &t), mz);
        // (ii) maps the attacked direction onto the target
        assert!((&phi * &zv - &z_tar).norm() <= 1e-8 * (1.0 + z_tar.norm()));
        // (iii) fixes Z w on the kernel of xi^T Z
        let xi_z = DMatrix::from_fn(1, cols, |_, j| {
            (0..mz).map(|i| xi[i] * z[(i, j)]).sum::<f64>()
        });
        let ker = Subspace::kernel_anchored(&xi_z, sigma_max(&z) * xi.norm(), &t);
        for k in 0..ker.dim() {
            let w = ker.basis().column(k).into_owned();
            let zw = &z * &w;
            assert!(
                (&phi * &zw - &zw).norm() <= 1e-8 * (1.0 + zw.norm()),
                "kernel direction moved"
            );
        }
        // determinant identity from the matrix determinant lemma
        let det = phi.determinant();
        let expected = xi.dot(&z_tar);
        assert!(
            (det - expected).abs() <= 1e-8 * expected.abs().max(1e-12),
            "det {det} vs xi^T z_tar {expected}"
        );
        checked += 1;
    }
    finish(
        "1",
        "rank-one map triple and determinant identity",
        started,
        10.0,
    );
}

#[test]
fn criterion_2_coefficient_space_oracle() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(2002);
    let t = tol();
    let mut done = 0;
    while done < 50 {
        let n = 2 + rng.random_range(0..4usize); // n <= 5
        let p = 1 + rng.random_range(0..2usize);
        // half the systems get a planted unobservable block
        let (a, c) = if done % 2 == 0 {
            (rmat(&mut rng, n, n) * 0.6, rmat(&mut rng, p, n))
        } else {
            let hidden = 1 + rng.random_range(0..(n - 1).max(1));
            let visible = n - hidden;
            let mut a_blocks = DMatrix::zeros(n, n);
            a_blocks
                .view_mut((0, 0), (visible, visible))
                .copy_from(&(rmat(&mut rng, visible, visible) * 0.6));
            a_blocks
                .view_mut((visible, 0), (hidden, visible))
                .copy_from(&(rmat(&mut rng, hidden, visible) * 0.6));
            a_blocks
                .view_mut((visible, visible), (hidden, hidden))
                .copy_from(&(rmat(&mut rng, hidden, hidden) * 0.6));
            let mut c_blocks = DMatrix::zeros(p, n);
            c_blocks
                .view_mut((0, 0), (p, visible))
                .copy_from(&rmat(&mut rng, p, visible));
            let basis = loop {
                let s = rmat(&mut rng, n, n);
                if numerical_rank(&s, &t) == n {
                    break s;
                }
            };
            let inv = basis.clone().try_inverse().unwrap();
            (&basis * a_blocks * &inv, c_blocks * &inv)
        };
        let sys = SystemModel::new(
            Some(a.clone()),
            DMatrix::zeros(n, 1),
            c.clone(),
            DMatrix::zeros(p, 1),
            DMatrix::zeros(n, 0),
            DMatrix::zeros(p, 0),
        )
        .unwrap();
        let cfg = SimConfig {
            t: 3 * n,
            seed: rng.random::<u64>(),
            x0: X0Mode::RandomUnit,
            input: InputMode::Zero,
            noise: NoiseMode::None,
        };
        let data = simulate(&sys, &cfg).unwrap();
        if numerical_rank(&data.x_minus, &t) < n {
            continue;
        }
        let ann = Annihilator::noise_free(n, p);
        let params = AffineSetParams::compute(&data, &sys, &ann).unwrap();
        let j_star = max_coeff_space(&params, &sys, &t);
        let image_j = if j_star.is_zero() {
            Subspace::zero(n, t)
        } else {
            Subspace::image_anchored(
                &(&data.x_minus * j_star.basis()),
                sigma_max(&data.x_minus),
                &t,
            )
        };
        let oracle = Subspace::kernel(&model::observability_matrix(&a, &c), &t);
        assert!(
            image_j.same_span(&oracle, 1e-7),
            "instance {done}: X_- J* (dim {}) != ker O (dim {})",
            image_j.dim(),
            oracle.dim()
        );
        done += 1;
    }
    finish(
        "2",
        "X_- J* matches the observability-matrix kernel",
        started,
        30.0,
    );
}

#[test]
fn criterion_3_attack_end_to_end() {
    let started = Instant::now();
    let sys = line_network_5();
    let ann = Annihilator::noise_free(5, 2);
    let t = tol();
    let spec = AttackSpec {
        lambda: 0.5014,
        x0: DVector::from_vec(vec![0.0, 0.0, -0.0194, 0.0776, 0.0004]),
        u0: DVector::zeros(1),
    };
    for seed in 0..20u64 {
        let cfg = SimConfig {
            t: 100,
            seed,
            x0: X0Mode::Given(DVector::from_element(5, 1.0 / 5f64.sqrt())),
            input: InputMode::Feedback { scale: 0.1 },
            noise: NoiseMode::None,
        };
        let data = simulate(&sys, &cfg).unwrap();
        let before = InformativityReport::evaluate(&data, &sys, &ann, &t).unwrap();
        assert!(
            before.informative,
            "seed {seed}: data must start informative"
        );

        let result = run_attack(&data, &sys, &ann, &spec, &t, seed).unwrap();
        let report = verify_attack(
            &result.attacked,
            &sys,
            &ann,
            &before.j_star,
            &result.v,
            &spec,
            &t,
        )
        .unwrap();
        assert_eq!(
            report.dim_j_after,
            report.dim_j_before + 1,
            "seed {seed}: J* must grow by exactly one"
        );
        assert!(
            report.eigen_residual <= 1e-8,
            "seed {seed}: eigen residual {}",
            report.eigen_residual
        );
        assert!(
            report.membership_residual <= 1e-8,
            "seed {seed}: membership residual {}",
            report.membership_residual
        );
        assert!(
            !report.post_attack_informative,
            "seed {seed}: informativity must flip"
        );
        assert!(report.all_passed());
    }
    finish(
        "3",
        "constructive attack verified on 20 seeds",
        started,
        60.0,
    );
}

#[test]
fn criterion_4_feasibility_equivalence_audit() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(4004);
    let t = tol();
    let floor = 100.0 * t.residual();
    for case in 0..200 {
        let n = 1 + rng.random_range(0..4usize);
        let m = 1 + rng.random_range(0..3usize);
        let p = 1 + rng.random_range(0..3usize);
        let horizon = 3 + rng.random_range(0..8usize); // T in 3..=10
        let kind = case % 4;
        let sys = SystemModel::new(
            None,
            rmat(&mut rng, n, m),
            rmat(&mut rng, p, n),
            if rng.random::<bool>() {
                DMatrix::zeros(p, m)
            } else {
                rmat(&mut rng, p, m)
            },
            DMatrix::zeros(n, 0),
            DMatrix::zeros(p, 0),
        )
        .unwrap();
        let data = match kind {
            // raw random blocks
            0 => Dataset::new(
                rmat(&mut rng, n, horizon),
                rmat(&mut rng, n, horizon),
                rmat(&mut rng, m, horizon),
                rmat(&mut rng, p, horizon),
            )
            .unwrap(),
            // one block zeroed
            1 => {
                let mut d = Dataset::new(
                    rmat(&mut rng, n, horizon),
                    rmat(&mut rng, n, horizon),
                    rmat(&mut rng, m, horizon),
                    rmat(&mut rng, p, horizon),
                )
                .unwrap();
                match rng.random_range(0..3u8) {
                    0 => d.u_minus = DMatrix::zeros(m, horizon),
                    1 => d.y_minus = DMatrix::zeros(p, horizon),
                    _ => d.x_plus = DMatrix::zeros(n, horizon),
                }
                d
            }
            // consistent open-loop trajectory of a random model
            2 => {
                let mut sim_sys = sys.clone();
                sim_sys.a_true = Some(rmat(&mut rng, n, n) * 0.6);
                let cfg = SimConfig {
                    t: horizon,
                    seed: rng.random::<u64>(),
                    x0: X0Mode::RandomUnit,
                    input: InputMode::Random { scale: 1.0 },
                    noise: NoiseMode::None,
                };
                simulate(&sim_sys, &cfg).unwrap()
            }
            // R = 0 and C P = 0: the coefficient space fills R^T
            _ => {
                let u = rmat(&mut rng, m, horizon);
                Dataset::new(
                    DMatrix::zeros(n, horizon),
                    &sys.b * &u,
                    u,
                    rmat(&mut rng, p, horizon),
                )
                .unwrap()
            }
        };
        let ann = Annihilator::noise_free(n, p);
        let params = AffineSetParams::compute(&data, &sys, &ann).unwrap();
        let j_star = max_coeff_space(&params, &sys, &t);
        let verdict = check_feasibility(&data, &j_star, &t, rng.random::<u64>());

        if verdict.all_dimensional_ok() {
            assert!(
                choose_direction(&data, &j_star, &t, case as u64).is_ok(),
                "case {case}: all blocks pass (iii) but no direction found"
            );
        } else {
            // the geometric condition must fail on every failing block for
            // every candidate direction
            let j_perp = j_star.complement();
            for bf in verdict.blocks.iter().filter(|b| !b.dimensional_ok) {
                let z = match bf.block {
                    DataBlock::XMinus => &data.x_minus,
                    DataBlock::XPlus => &data.x_plus,
                    DataBlock::UMinus => &data.u_minus,
                    DataBlock::YMinus => &data.y_minus,
                };
                let excluded = preimage(z, &pi_o(z, &j_star, &t), &t);
                let outside = excluded.complement();
                for probe in 0..1000 {
                    let raw = rvec(&mut rng, data.horizon());
                    let cand = j_perp.project(&raw);
                    if cand.norm() <= floor {
                        continue;
                    }
                    let margin = outside.project(&(cand.clone() / cand.norm())).norm();
                    assert!(
                        margin <= floor,
                        "case {case} probe {probe}: block {} fails (iii) yet admits a direction",
                        bf.block
                    );
                }
            }
        }
    }
    finish(
        "4",
        "dimension test predicts direction existence",
        started,
        60.0,
    );
}

#[test]
fn criterion_5_scaling_closed_form_optimality() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(5005);
    let t = tol();
    let mut done = 0;
    while done < 50 {
        let n = 2 + rng.random_range(0..2usize);
        let horizon = (n + 3) + rng.random_range(0..(8 - n - 2)); // T <= 8
        let (data, sys) = observable_b0_instance(&mut rng, n, horizon, 1.0);
        let ann = Annihilator::noise_free(n, 1);
        let Ok(prob) = build_problem(&data, &sys, &ann, &t) else {
            continue;
        };
        let raw = rvec(&mut rng, horizon);
        let mut v = prob.k_space.project(&raw);
        if v.norm() < 1e-6 {
            continue;
        }
        v /= v.norm();
        let Ok((zeta, xi)) = zeta_closed_form(&v, &prob, &t) else {
            continue;
        };
        let closed_value = zeta.norm_squared();

        // independent route: solve the KKT system of the constrained QP
        // min |X_+^T xi|^2 s.t. xi^T X_+ v = 1, xi^T X_+ w = 0 on J*
        let xpt = data.x_plus.transpose(); // T x n
        let n_con = 1 + prob.j_star.dim();
        let mut con = DMatrix::zeros(n_con, n);
        con.view_mut((0, 0), (1, n))
            .copy_from(&(&data.x_plus * &v).transpose());
        if prob.j_star.dim() > 0 {
            con.view_mut((1, 0), (prob.j_star.dim(), n))
                .copy_from(&(&data.x_plus * prob.j_star.basis()).transpose());
        }
        let dim = n + n_con;
        let mut kkt = DMatrix::zeros(dim, dim);
        kkt.view_mut((0, 0), (n, n))
            .copy_from(&(&data.x_plus * &xpt * 2.0));
        kkt.view_mut((0, n), (n, n_con)).copy_from(&con.transpose());
        kkt.view_mut((n, 0), (n_con, n)).copy_from(&con);
        let mut rhs = DVector::zeros(dim);
        rhs[n] = 1.0;
        let eps = t.rank_threshold(dim, dim, sigma_max(&kkt));
        let sol = kkt.svd(true, true).solve(&rhs, eps).unwrap();
        let xi_kkt = sol.rows(0, n).into_owned();
        let kkt_value = (&xpt * &xi_kkt).norm_squared();
        assert!(
            (closed_value - kkt_value).abs() <= 1e-6 * kkt_value.max(1e-12),
            "instance {done}: closed form {closed_value} vs KKT {kkt_value}"
        );

        // brute parameterization of the feasible affine set: xi + N t can
        // only increase the norm
        let null = Subspace::kernel_anchored(&con, sigma_max(&con), &t);
        for _ in 0..60 {
            let step = if null.is_zero() {
                break;
            } else {
                null.basis() * rvec(&mut rng, null.dim())
            };
            let xi_feas = &xi + step;
            // feasibility of the probe
            let probe_con = &con * &xi_feas;
            assert!((probe_con[0] - 1.0).abs() <= 1e-7);
            let value = (&xpt * xi_feas).norm_squared();
            assert!(
                value >= closed_value - 1e-6 * closed_value.max(1e-12),
                "feasible point below the closed form"
            );
        }
        done += 1;
    }
    finish("5", "inner scaling closed form is optimal", started, 30.0);
}

#[test]
fn criterion_6_alternating_matches_grid_oracle() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(6006);
    let t = tol();
    let mut done = 0;
    while done < 20 {
        let horizon = 4 + (done % 3);
        let (data, sys) = observable_b0_instance(&mut rng, 2, horizon, 1.0);
        let ann = Annihilator::noise_free(2, 1);
        let Ok(prob) = build_problem(&data, &sys, &ann, &t) else {
            continue;
        };
        let Ok(sol) = alternating_solve(&prob, &t, &MultistartConfig::default()) else {
            continue;
        };

        // exhaustive (lambda grid) x (sphere of the feasible direction space)
        let mut grid_best = f64::INFINITY;
        let dk = prob.k_space.dim();
        let dirs = if dk == 1 { 1 } else { 240 };
        for d in 0..dirs {
            let v = if dk == 1 {
                prob.k_space.basis().column(0).into_owned()
            } else {
                let theta = std::f64::consts::PI * d as f64 / dirs as f64;
                prob.k_space.basis() * DVector::from_vec(vec![theta.cos(), theta.sin()])
            };
            if objective(0.0, &v, &prob).is_err() {
                continue;
            }
            let mut lambda = -2.5;
            while lambda <= 2.5 {
                let val = objective(lambda, &v, &prob).unwrap();
                if val < grid_best {
                    grid_best = val;
                }
                lambda += 0.002;
            }
        }
        assert!(
            sol.objective_value <= grid_best * (1.0 + 1e-3) + 1e-12,
            "instance {done}: alternating {} vs grid {}",
            sol.objective_value,
            grid_best
        );
        done += 1;
    }
    finish(
        "6",
        "alternating solver meets the exhaustive grid",
        started,
        300.0,
    );
}

/// Shared driver for criteria 7 and 8: the 20-seed reproduction sweep.
fn reproduction_sweep() -> Vec<(Dataset, SystemModel, Annihilator, MinNormSolution)> {
    let sys = line_network_5();
    let ann = Annihilator::noise_free(5, 2);
    let t = tol();
    let mut out = Vec::new();
    for seed in 0..20u64 {
        let cfg = SimConfig {
            t: 100,
            seed,
            x0: X0Mode::Given(DVector::from_element(5, 1.0 / 5f64.sqrt())),
            input: InputMode::Random { scale: 0.05 },
            noise: NoiseMode::None,
        };
        let data = simulate(&sys, &cfg).unwrap();
        let prob = build_problem(&data, &sys, &ann, &t).unwrap();
        let sol = alternating_solve(&prob, &t, &MultistartConfig::default()).unwrap();
        out.push((data, sys.clone(), ann.clone(), sol));
    }
    out
}

#[test]
fn criterion_7_reproduction_sweep() {
    let started = Instant::now();
    let t = tol();
    let mut passing = 0;
    for (seed, (data, sys, ann, sol)) in reproduction_sweep().into_iter().enumerate() {
        let rel = sol.frob_norm / data.x_plus.norm();
        let in_range = (1e-4..=1e-1).contains(&rel);

        let mut attacked = data.clone();
        attacked.x_plus = &sol.phi_x_plus * &data.x_plus;
        let post = InformativityReport::evaluate(&attacked, &sys, &ann, &t).unwrap();

        let rho = &sol.rho;
        let target_mass = rho[1] + rho[2];
        let mut dominant = true;
        for i in 0..5 {
            for j in (i + 1)..5 {
                if (i, j) == (1, 2) {
                    continue;
                }
                if target_mass <= rho[i] + rho[j] {
                    dominant = false;
                }
            }
        }

        let ok = in_range && !post.informative && dominant;
        if ok {
            passing += 1;
        } else {
            eprintln!(
                "seed {seed}: rel {rel:.2e} in_range={in_range} informative={} dominant={dominant}",
                post.informative
            );
        }
    }
    assert!(
        passing >= 16,
        "only {passing}/20 seeds pass the reproduction checks"
    );
    finish(
        "7",
        &format!("order-of-magnitude reproduction ({passing}/20 seeds)"),
        started,
        300.0,
    );
}

#[test]
fn criterion_8_distance_bound_audit() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(8008);
    let t = tol();
    let grid = GridConfig::default();

    // sweep solutions from the reproduction scenario
    for (data, sys, ann, sol) in reproduction_sweep() {
        let audit = check_perturbation_bound(&sol, &data, &sys, &ann, &t, &grid).unwrap();
        assert!(audit.holds, "reproduction audit: {audit:?}");
    }

    // small instances mirroring the grid-oracle family
    let mut done = 0;
    while done < 20 {
        let horizon = 4 + (done % 3);
        let (data, sys) = observable_b0_instance(&mut rng, 2, horizon, 1.0);
        let ann = Annihilator::noise_free(2, 1);
        let Ok(prob) = build_problem(&data, &sys, &ann, &t) else {
            continue;
        };
        let Ok(sol) = alternating_solve(&prob, &t, &MultistartConfig::default()) else {
            continue;
        };
        let audit = check_perturbation_bound(&sol, &data, &sys, &ann, &t, &grid).unwrap();
        assert!(audit.holds, "small instance {done}: {audit:?}");
        done += 1;
    }

    // random observable systems up to n = 4
    let mut done = 0;
    while done < 50 {
        let n = 2 + rng.random_range(0..3usize);
        let (data, sys) = observable_b0_instance(&mut rng, n, 3 * n + 2, 1.0);
        let ann = Annihilator::noise_free(n, 1);
        let Ok(prob) = build_problem(&data, &sys, &ann, &t) else {
            continue;
        };
        let Ok(sol) = alternating_solve(&prob, &t, &MultistartConfig::default()) else {
            continue;
        };
        let audit = check_perturbation_bound(&sol, &data, &sys, &ann, &t, &grid).unwrap();
        assert!(audit.holds, "random system {done}: {audit:?}");
        done += 1;
    }

    // unobservable systems: the model-set distance vanishes
    for k in 0..5 {
        let n = 2 + (k % 3);
        let hidden = 1;
        let visible = n - hidden;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (visible, visible))
            .copy_from(&(rmat(&mut rng, visible, visible) * 0.6));
        a.view_mut((visible, 0), (hidden, visible))
            .copy_from(&(rmat(&mut rng, hidden, visible) * 0.6));
        a.view_mut((visible, visible), (hidden, hidden))
            .copy_from(&(rmat(&mut rng, hidden, hidden) * 0.6));
        let mut c = DMatrix::zeros(1, n);
        c.view_mut((0, 0), (1, visible))
            .copy_from(&rmat(&mut rng, 1, visible));
        let sys = SystemModel::new(
            Some(a),
            DMatrix::zeros(n, 1),
            c,
            DMatrix::zeros(1, 1),
            DMatrix::zeros(n, 0),
            DMatrix::zeros(1, 0),
        )
        .unwrap();
        let cfg = SimConfig {
            t: 3 * n,
            seed: 900 + k as u64,
            x0: X0Mode::RandomUnit,
            input: InputMode::Zero,
            noise: NoiseMode::None,
        };
        let data = simulate(&sys, &cfg).unwrap();
        let ann = Annihilator::noise_free(n, 1);
        let d = d_unobs_model_set(&data, &sys, &ann, &t, &grid).unwrap();
        assert!(
            d.value <= 1e-6,
            "unobservable system {k}: distance {} should vanish",
            d.value
        );
    }
    finish("8", "perturbation bound holds on every run", started, 300.0);
}

// Criterion 9 (CLI round trip) lives in the command-line crate's test suite.

#[test]
fn report_schemas_round_trip() {
    // the published report schemas stay parseable with strict field checking
    let sys = line_network_5();
    let ann = Annihilator::noise_free(5, 2);
    let t = tol();
    let cfg = SimConfig {
        t: 60,
        seed: 5,
        x0: X0Mode::RandomUnit,
        input: InputMode::Feedback { scale: 0.1 },
        noise: NoiseMode::None,
    };
    let data = simulate(&sys, &cfg).unwrap();
    let report = InformativityReport::evaluate(&data, &sys, &ann, &t).unwrap();
    let file = InformativityReportFile::from_report(&report);
    let text = serde_json::to_string(&file).unwrap();
    let back: InformativityReportFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.informative, report.informative);

    let spec = AttackSpec {
        lambda: 0.5014,
        x0: DVector::from_vec(vec![0.0, 0.0, -0.0194, 0.0776, 0.0004]),
        u0: DVector::zeros(1),
    };
    let result = run_attack(&data, &sys, &ann, &spec, &t, 3).unwrap();
    let verify = verify_attack(
        &result.attacked,
        &sys,
        &ann,
        &report.j_star,
        &result.v,
        &spec,
        &t,
    )
    .unwrap();
    let file = AttackReportFile::from_report(spec.lambda, &verify);
    let text = serde_json::to_string(&file).unwrap();
    let back: AttackReportFile = serde_json::from_str(&text).unwrap();
    assert!(back.all_passed);
}
