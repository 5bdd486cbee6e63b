//! Acceptance criteria, one line per criterion.
//!
//! `cargo test --test acceptance` runs everything (a few minutes on one
//! core); `cargo test --test acceptance -- 3 11` runs a subset. The binary
//! fails if a criterion fails that is not listed in `EXPECTED_RED`.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use qanneal::analysis::fit_one_over_t;
use qanneal::exact::{
    boltzmann_distribution, build_transition_matrix, correlation_pair, evolve_schrodinger, log_spaced, master_evolve,
    stationary_qa_trajectory, stationary_sa_trajectory, CorrelationKind, EvolveOptions, MasterOptions, OverlapTrajectory,
};
use qanneal::ising::{enumerate_ground_states, make_ea2d, make_ferromagnet, make_frustrated8, make_sk};
use qanneal::mc::{
    merge_records, quench_vs_anneal_report, run_qmc_ensemble, run_sa, trotter_coupling, McPlan, QuenchOptions,
    QuenchProcess, TrotterLattice,
};
use qanneal::rng;
use qanneal::single_spin::{ode_final_miss, ode_final_miss_tuned, SingleSpinParams, SolvableSchedule};
use qanneal::tsp::{
    exhaustive_optimal, generate_instance, held_karp_length, merge_tsp_records, qa_tsp_ensemble, random_instance,
    sa_tsp, sa_tsp_tours, tour_length, tour_spin_roundtrip, Tour, TspKind,
};
use qanneal::Schedule;
use rand::Rng as _;

/// Criteria that fail at the fixed protocol, with the reason.
const EXPECTED_RED: &[(u32, &str)] = &[(
    13,
    "on this instance and run length beta_eff = 0.5 edges out beta_eff = 1 by about 2 standard errors",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Outcome;

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u32, &str, Check); 17] = [
        (1, "heat-bath detailed balance and Boltzmann null space", c01_detailed_balance),
        (2, "master equation vs SA Monte Carlo", c02_master_vs_mc),
        (3, "single spin, c/t limit", c03_inverse_time),
        (4, "single spin, c/sqrt(t) limit", c04_inverse_sqrt),
        (5, "Landau-Zener limit", c05_landau_zener),
        (6, "tuned initial condition", c06_tuned_start),
        (7, "QA vs SA ordering and c/t trapping", c07_ordering_and_trapping),
        (8, "1/t law of 1 - P_QA", c08_one_over_t),
        (9, "quasi-static tracking, log schedule", c09_quasi_static),
        (10, "frustrated crossover", c10_frustrated_crossover),
        (11, "Trotter coupling value", c11_trotter_coupling),
        (12, "QMC vs enumeration of the effective action", c12_qmc_oracle),
        (13, "beta_eff selection", c13_beta_eff),
        (14, "quench vs anneal ordering", c14_quench),
        (15, "TSP exhaustive oracle and encoding", c15_tsp_oracle),
        (16, "TSP QA vs SA, Ulysses16 statistics", c16_tsp_qa_vs_sa),
        (17, "Trotter-number convergence", c17_trotter_convergence),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        let red = EXPECTED_RED.iter().find(|r| r.0 == id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {} ({secs:.1} s)", o.detail);
        match (o.pass, red) {
            (false, Some((_, why))) => println!("          expected: {why}"),
            (false, None) => unexpected.push(id),
            _ => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn c01_detailed_balance() -> Outcome {
    let mut worst_balance = 0f64;
    let mut worst_null = 0f64;
    for seed in 0..100u64 {
        let mut r = rng::stream(seed, 0, 0);
        let inst = make_sk(3, seed).unwrap().with_field(r.gen_range(-1.0..1.0));
        let t = r.gen_range(0.2..5.0);
        let g = build_transition_matrix(&inst, t).unwrap();
        let w = boltzmann_distribution(&inst, t).unwrap().probs;
        for i in 0..8 {
            for j in 0..8 {
                worst_balance = worst_balance.max((g.rate(i, j) * w[j] - g.rate(j, i) * w[i]).abs());
            }
        }
        let dense: DMatrix<f64> = g.to_dense();
        let svd = dense.svd(false, true);
        let k = svd.singular_values.imin();
        let v = svd.v_t.unwrap().row(k).transpose();
        let v = &v / v.sum();
        worst_null = worst_null.max((0..8).map(|i| (v[i] - w[i]).abs()).fold(0.0, f64::max));
    }
    outcome(
        worst_balance <= 1e-12 && worst_null <= 1e-10,
        format!("max balance residual {worst_balance:.1e}, max |null vector - Boltzmann| {worst_null:.1e}"),
    )
}

fn c02_master_vs_mc() -> Outcome {
    let inst = make_sk(8, 1).unwrap();
    let ground = enumerate_ground_states(&inst).unwrap().energy;
    let sched = Schedule::inverse_sqrt(3.0).unwrap();
    let steps: Vec<u64> = vec![1, 2, 3, 5, 10, 20, 50, 100, 200, 500, 1000];
    let times: Vec<f64> = steps.iter().map(|&s| s as f64).collect();
    let master = master_evolve(&inst, &sched, 1000.0, &times, &MasterOptions::default()).unwrap();
    let plan = McPlan::new(1000).with_record_at(steps).with_ground(ground);
    let mc = merge_records(&run_sa(&inst, &sched, &plan, 10_000, 77).unwrap()).unwrap();
    let mut worst = 0f64;
    for (s, p) in mc.samples.iter().zip(master.values()) {
        let bound = 3.0 * (p * (1.0 - p) / 1e4).sqrt();
        worst = worst.max((s.ground_fraction() - p).abs() / bound);
    }
    outcome(worst <= 1.0, format!("max |P_MC - P_master| / bound = {worst:.2} over 11 sample times"))
}

fn c03_inverse_time() -> Outcome {
    let mut worst = 0f64;
    for c in [0.5, 1.0, 2.0] {
        let want = (PI * c).sinh() * (-PI * c).exp() / (2.0 * PI * c).sinh();
        let got = ode_final_miss(SolvableSchedule::Inverse, SingleSpinParams::new(1.0, c).unwrap(), 1e3).unwrap();
        worst = worst.max((got / want - 1.0).abs());
    }
    outcome(worst < 0.02, format!("max relative error {:.3}%", 100.0 * worst))
}

fn c04_inverse_sqrt() -> Outcome {
    let mut worst = 0f64;
    for (h, c) in [(1.0, 3.2), (0.5, 2.5), (0.25, 2.0), (1.0, 5.0)] {
        let want = h * h / (64.0 * c * c * c * c);
        let got = ode_final_miss(SolvableSchedule::InverseSqrt, SingleSpinParams::new(h, c).unwrap(), 1e3).unwrap();
        worst = worst.max((got / want - 1.0).abs());
    }
    outcome(worst < 0.2, format!("max relative error {:.1}% over 4 (h, c) with c^2/h >= 10", 100.0 * worst))
}

fn c05_landau_zener() -> Outcome {
    let mut worst = 0f64;
    for (h, c) in [(1.0, 0.1), (1.0, 0.05), (2.0, 0.4), (0.5, 0.025)] {
        let want = c * c / (16.0 * h * h * h * h);
        let got = ode_final_miss(SolvableSchedule::LandauZener, SingleSpinParams::new(h, c).unwrap(), 0.0).unwrap();
        worst = worst.max((got / want - 1.0).abs());
    }
    outcome(worst < 0.2, format!("max relative error {:.1}% over 4 (h, c) with h^2/c >= 10", 100.0 * worst))
}

fn c06_tuned_start() -> Outcome {
    let p = SingleSpinParams::new(1.0, 1.5).unwrap();
    let tuned = ode_final_miss_tuned(p, 1e3).unwrap();
    let standard = ode_final_miss(SolvableSchedule::InverseSqrt, p, 1e3).unwrap();
    let floor = p.h * p.h / (128.0 * p.c.powi(4));
    outcome(
        tuned < 1e-3 && standard >= floor,
        format!("tuned {tuned:.1e} < 1e-3, standard {standard:.2e} >= {floor:.2e}"),
    )
}

fn ferromagnet() -> qanneal::IsingInstance {
    make_ferromagnet(8, 1.0 / 7.0).unwrap()
}

fn qa_and_sa(schedule: &Schedule, times: &[f64]) -> (OverlapTrajectory, OverlapTrajectory) {
    let inst = ferromagnet();
    let t_end = *times.last().unwrap();
    let qa = evolve_schrodinger(&inst, schedule, t_end, times, &EvolveOptions::default()).unwrap();
    let sa = master_evolve(&inst, schedule, t_end, times, &MasterOptions::default()).unwrap();
    (qa, sa)
}

fn c07_ordering_and_trapping() -> Outcome {
    let (qa, sa) = qa_and_sa(&Schedule::inverse_sqrt(3.0).unwrap(), &[10.0, 100.0, 1000.0]);
    let (pq, ps) = (qa.last().unwrap().1, sa.last().unwrap().1);
    let (qa3, sa3) = qa_and_sa(&Schedule::inverse(3.0).unwrap(), &[100.0, 300.0, 1000.0]);
    let plateau = |tr: &OverlapTrajectory| tr.values().fold(0.0, f64::max);
    let (tq, ts) = (plateau(&qa3), plateau(&sa3));
    let flat = |tr: &OverlapTrajectory| {
        let v: Vec<f64> = tr.values().collect();
        (v[2] - v[1]).abs() < 0.01
    };
    outcome(
        pq > 0.9 && pq > ps && tq < 0.9 && ts < 0.9 && flat(&qa3) && flat(&sa3),
        format!("3/sqrt t: P_QA {pq:.3}, P_SA {ps:.3}; 3/t plateaus: P_QA {tq:.3}, P_SA {ts:.3}"),
    )
}

fn c08_one_over_t() -> Outcome {
    let inst = ferromagnet();
    let times = log_spaced(100.0, 1000.0, 50).unwrap();
    let qa = evolve_schrodinger(&inst, &Schedule::inverse_sqrt(3.0).unwrap(), 1000.0, &times, &EvolveOptions::default()).unwrap();
    let fit = fit_one_over_t(&qa.samples, (100.0, 1000.0)).unwrap();
    outcome(
        (fit.slope + 1.0).abs() <= 0.15 && fit.r_squared >= 0.98,
        format!("slope {:.3}, r^2 {:.4} over {} samples", fit.slope, fit.r_squared, fit.n_points),
    )
}

fn c09_quasi_static() -> Outcome {
    let inst = ferromagnet();
    let sched = Schedule::inverse_log(3.0).unwrap();
    let times = log_spaced(100.0, 1000.0, 10).unwrap();
    let (qa, sa) = qa_and_sa(&sched, &times);
    let qa_st = stationary_qa_trajectory(&inst, &sched, &times).unwrap();
    let sa_st = stationary_sa_trajectory(&inst, &sched, &times).unwrap();
    let gap = |a: &OverlapTrajectory, b: &OverlapTrajectory| a.values().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let (dq, ds) = (gap(&qa, &qa_st), gap(&sa, &sa_st));
    outcome(dq <= 0.05 && ds <= 0.05, format!("max deviation QA {dq:.4}, SA {ds:.4} for t in [100, 1000]"))
}

fn c10_frustrated_crossover() -> Outcome {
    let inst = make_frustrated8();
    let hot = correlation_pair(&inst, 10.0, 2, 5, CorrelationKind::ThermalT).unwrap();
    let cold = correlation_pair(&inst, 0.1, 2, 5, CorrelationKind::ThermalT).unwrap();
    let gammas = log_spaced(1e-3, 1e3, 10).unwrap();
    let q: Vec<f64> = gammas
        .iter()
        .map(|&g| correlation_pair(&inst, g, 2, 5, CorrelationKind::QuantumGamma).unwrap())
        .filter(|c| *c != 0.0)
        .collect();
    let changes = q.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    outcome(
        hot < 0.0 && cold > 0.0 && changes == 1,
        format!("<s3 s6>: T=10 {hot:.3}, T=0.1 {cold:.3}; quantum sign changes over Gamma in [1e-3, 1e3]: {changes}"),
    )
}

fn c11_trotter_coupling() -> Outcome {
    let j = trotter_coupling(0.0316228, 1.0, 100).unwrap();
    outcome((j - 1.73).abs() <= 0.01, format!("{j:.4}"))
}

fn c12_qmc_oracle() -> Outcome {
    let (n, m, beta_eff, gamma) = (3usize, 4usize, 1.0, 0.7);
    let inst = make_sk(3, 2).unwrap();
    let mut weights = vec![0.0; 8];
    for state in 0..1usize << (n * m) {
        let spins: Vec<i8> = (0..n * m).map(|b| if state >> b & 1 == 1 { 1 } else { -1 }).collect();
        let lattice = TrotterLattice::from_spins(n, m, beta_eff, gamma, spins).unwrap();
        let w = (-lattice.action(&inst)).exp();
        for k in 0..m {
            weights[config_index(lattice.slice(k))] += w / m as f64;
        }
    }
    let z: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let mut lattice = TrotterLattice::random(n, m, beta_eff, gamma, 11, 0).unwrap();
    let mut r = rng::stream(11, 0, 0);
    for _ in 0..2_000 {
        lattice.sweep(&inst, &mut r);
    }
    let (batches, per_batch) = (50usize, 4_000usize);
    let mut means = vec![vec![0.0; 8]; batches];
    for batch in means.iter_mut() {
        for _ in 0..per_batch {
            lattice.sweep(&inst, &mut r);
            for k in 0..m {
                batch[config_index(lattice.slice(k))] += 1.0 / (m * per_batch) as f64;
            }
        }
    }
    let mut worst = 0f64;
    for c in 0..8 {
        let mean = means.iter().map(|b| b[c]).sum::<f64>() / batches as f64;
        let var = means.iter().map(|b| (b[c] - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt();
        worst = worst.max((mean - exact[c]).abs() / se);
    }
    outcome(worst <= 3.0, format!("max |z| {worst:.2} over 8 slice configurations, 2e5 sweeps in 50 batches"))
}

fn config_index(spins: &[i8]) -> usize {
    spins.iter().enumerate().filter(|(_, &s)| s > 0).map(|(i, _)| 1 << i).sum()
}

fn c13_beta_eff() -> Outcome {
    let inst = make_sk(8, 1).unwrap();
    let ground = enumerate_ground_states(&inst).unwrap().energy;
    let sched = Schedule::inverse_sqrt(3.0).unwrap();
    let plan = McPlan::new(10_000).with_record_at(vec![10_000]).with_ground(ground);
    let stats: Vec<(f64, f64, f64)> = [0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&be| {
            let runs = run_qmc_ensemble(&inst, &sched, be, 64, &plan, 100, 5).unwrap();
            let p: Vec<f64> = runs.iter().map(|r| r.last().unwrap().ground_fraction()).collect();
            let mean = p.iter().sum::<f64>() / p.len() as f64;
            let var = p.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (p.len() - 1) as f64;
            (be, mean, (var / p.len() as f64).sqrt())
        })
        .collect();
    let (_, p1, s1) = stats[1];
    let worst = stats
        .iter()
        .filter(|s| s.0 != 1.0)
        .map(|&(_, p, s)| (p - p1) / (s * s + s1 * s1).sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    let table: Vec<String> = stats.iter().map(|(be, p, s)| format!("{be}: {p:.3}±{s:.3}")).collect();
    outcome(worst <= 2.0, format!("P by beta_eff {}; largest lead over beta_eff = 1: {worst:.2} sigma", table.join(", ")))
}

fn c14_quench() -> Outcome {
    let inst = make_ea2d(10, true, 1).unwrap();
    let report = quench_vs_anneal_report(
        &inst,
        0.1 / 10f64.sqrt(),
        &Schedule::inverse_sqrt(10.0).unwrap(),
        100_000,
        &QuenchOptions::default(),
        3,
    )
    .unwrap();
    let e = |p| report.row(p).final_energy;
    let (sa, tq, qa, gq) =
        (e(QuenchProcess::SaAnneal), e(QuenchProcess::TQuench), e(QuenchProcess::QaAnneal), e(QuenchProcess::GammaQuench));
    let others = [sa, qa, gq];
    let hi = others.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = others.iter().copied().fold(f64::INFINITY, f64::min);
    let outlier = tq - hi > hi - lo;
    outcome(
        tq > sa && gq >= qa && outlier,
        format!("final energies: SA {sa:.2}, T-quench {tq:.2}, QA {qa:.2}, Gamma-quench {gq:.2}"),
    )
}

fn c15_tsp_oracle() -> Outcome {
    let inst = random_instance(8, 1).unwrap();
    let opt = exhaustive_optimal(&inst).unwrap();
    let plan = McPlan::new(2000).with_ground(opt.length);
    let runs = sa_tsp_tours(&inst, &Schedule::inverse_log(1.0).unwrap(), &plan, 100, 4).unwrap();
    let best = runs.iter().map(|(_, t)| tour_length(&inst, t).unwrap()).fold(f64::INFINITY, f64::min);
    let mut r = rng::stream(4, 1, 0);
    let roundtrips = (0..1000)
        .filter(|k| {
            let tour = Tour::random(3 + k % 14, &mut r);
            tour_spin_roundtrip(&tour).unwrap() == tour
        })
        .count();
    outcome(
        (best - opt.length).abs() <= 1e-9 && roundtrips == 1000,
        format!("optimum {:.6}, best SA tour {best:.6}; {roundtrips}/1000 round-trips exact", opt.length),
    )
}

fn c16_tsp_qa_vs_sa() -> Outcome {
    let sched = Schedule::inverse_sqrt(10.0).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for kind in [TspKind::Random, TspKind::Ulysses16] {
        let inst = generate_instance(kind, 1).unwrap();
        let plan = McPlan::new(10_000).with_ground(held_karp_length(&inst).unwrap());
        let sa = merge_tsp_records(&sa_tsp(&inst, &sched, &plan, 100, 3).unwrap()).unwrap();
        let qa = merge_tsp_records(&qa_tsp_ensemble(&inst, &sched, 2.0, 100, &plan, 4, 3).unwrap()).unwrap();
        let (s, q) = (sa.record.last().unwrap(), qa.record.last().unwrap());
        pass &= q.ground_fraction() >= s.ground_fraction() && q.avg_energy <= s.avg_energy;
        detail.push(format!(
            "{kind}: P QA {:.3} / SA {:.3}, <L> QA {:.4} / SA {:.4}",
            q.ground_fraction(),
            s.ground_fraction(),
            q.avg_energy,
            s.avg_energy
        ));
    }
    let (mean, sd) = generate_instance(TspKind::Ulysses16, 0).unwrap().distance_stats();
    pass &= (mean - 2.2).abs() <= 1e-3 && (sd / mean - 0.707).abs() <= 0.01;
    detail.push(format!("ulysses16 mean {mean:.4}, b/a {:.4}", sd / mean));
    outcome(pass, detail.join("; "))
}

fn c17_trotter_convergence() -> Outcome {
    let inst = make_ea2d(10, true, 1).unwrap();
    let plan = McPlan::new(10_000).with_record_at(vec![10_000]);
    let sched = Schedule::inverse_sqrt(2.0).unwrap();
    let e: Vec<f64> = [8usize, 16, 32]
        .iter()
        .map(|&m| {
            let runs = run_qmc_ensemble(&inst, &sched, 1.0, m, &plan, 24, 9).unwrap();
            runs.iter().map(|r| r.last().unwrap().avg_energy).sum::<f64>() / runs.len() as f64 / 100.0
        })
        .collect();
    let monotone = (e[0] - e[1]) * (e[1] - e[2]) > 0.0;
    let shrinking = (e[2] - e[1]).abs() < (e[1] - e[0]).abs();
    outcome(
        monotone && shrinking,
        format!("energy per spin at M = 8/16/32: {:.4} / {:.4} / {:.4}", e[0], e[1], e[2]),
    )
}
