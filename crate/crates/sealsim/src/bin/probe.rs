// Temporary exploration harness; removed before release.
use std::time::Instant;

use sealsim::reynolds::{
    assemble, assemble_with, l2_error, pressure_force, solve_pressure, FilmSnapshot,
};
use sealsim::{AnnulusMesh, BearingConfig};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "conv".into());
    match which.as_str() {
        "conv" => convergence(),
        "manu" => manufactured(),
        "ex1" => example1(),
        "ex2" => example2(),
        "crit" => critical(),
        "trace" => trace(),
        "scan" => scan(),
        _ => eprintln!("unknown probe"),
    }
}

fn scan() {
    use sealsim::{run_transient, RotorMotion};
    for (p_o, sigma) in [(1.0, 12.0)] {
        for alpha in [10.0, 20.0, 50.0] {
            for k_z in [20.0, 50.0] {
                for d_a in [5.0, 10.0, 20.0] {
                    let mut peaks = Vec::new();
                    let mut gmins = Vec::new();
                    let mut contact = false;
                    for beta in [0.0, 0.1, 0.2] {
                        let mut cfg = BearingConfig::default();
                        cfg.beta = beta;
                        cfg.alpha = alpha;
                        cfg.d_a = d_a;
                        cfg.k_z = k_z;
                        cfg.p_outer = p_o;
                        cfg.sigma_t = sigma;
                        match run_transient(&cfg, RotorMotion::Bump { eps: 1.2 }, 5.0, &mut ()) {
                            Ok(res) => {
                                contact |= res.contact.is_some();
                                let (tp, _fp) = res
                                    .records
                                    .iter()
                                    .map(|r| (r.t, r.force))
                                    .fold((0.0, f64::NEG_INFINITY), |acc, (t, f)| {
                                        if f > acc.1 {
                                            (t, f)
                                        } else {
                                            acc
                                        }
                                    });
                                let gm =
                                    res.records.iter().map(|r| r.g).fold(f64::INFINITY, f64::min);
                                peaks.push(tp);
                                gmins.push(gm);
                            }
                            Err(_) => contact = true,
                        }
                    }
                    if contact || peaks.len() < 3 {
                        continue;
                    }
                    let earlier = peaks[0] > peaks[1] && peaks[1] > peaks[2];
                    println!(
                        "pO {p_o} sig {sigma} alpha {alpha:4} K {k_z:4} D {d_a:4}: peaks {:.3?} gmin {:.3?} {}",
                        peaks,
                        gmins,
                        if earlier { "<<< EARLIER" } else { "" }
                    );
                }
            }
        }
    }
}

fn trace() {
    use sealsim::{run_transient, RotorMotion};
    // Overridable dynamics via args: alpha d_a k_z
    let arg = |i: usize, d: f64| {
        std::env::args()
            .nth(i)
            .and_then(|s| s.parse().ok())
            .unwrap_or(d)
    };
    let alpha = arg(2, 1.0);
    let d_a = arg(3, 0.5);
    let k_z = arg(4, 5.0);
    let p_o = arg(5, 2.0);
    for beta in [0.0, 0.1, 0.2] {
        let mut cfg = BearingConfig::default();
        cfg.beta = beta;
        cfg.alpha = alpha;
        cfg.d_a = d_a;
        cfg.k_z = k_z;
        cfg.p_outer = p_o;
        let res = run_transient(&cfg, RotorMotion::Bump { eps: 1.2 }, 8.0, &mut ()).unwrap();
        let (tp, fp) = res
            .records
            .iter()
            .map(|r| (r.t, r.force))
            .fold((0.0, f64::NEG_INFINITY), |acc, (t, f)| if f > acc.1 { (t, f) } else { acc });
        let (tg, gm) = res
            .records
            .iter()
            .map(|r| (r.t, r.g))
            .fold((0.0, f64::INFINITY), |acc, (t, g)| if g < acc.1 { (t, g) } else { acc });
        print!(
            "beta {beta}: h_eq {:.4} peakF {fp:.4}@{tp:.3} g_min {gm:.4}@{tg:.3} contact {:?} F(t): ",
            res.h_s_eq,
            res.contact.is_some()
        );
        for r in res.records.iter().step_by(16) {
            print!("({:.2},{:.3}) ", r.t, r.force);
        }
        println!();
    }
}

fn example1() {
    use sealsim::{run_transient, RotorMotion};
    let t0 = Instant::now();
    for beta in [0.0, 0.1, 0.2] {
        let mut cfg = BearingConfig::default();
        cfg.beta = beta;
        let t1 = Instant::now();
        let res = run_transient(&cfg, RotorMotion::Bump { eps: 1.2 }, 20.0, &mut ()).unwrap();
        let g_min = res.records.iter().map(|r| r.g).fold(f64::INFINITY, f64::min);
        let (tp, fp) = res
            .records
            .iter()
            .map(|r| (r.t, r.force))
            .fold((0.0, f64::NEG_INFINITY), |acc, (t, f)| {
                if f > acc.1 {
                    (t, f)
                } else {
                    acc
                }
            });
        let last = res.records.last().unwrap();
        let max_cells = res.records.iter().map(|r| r.n_cells).max().unwrap();
        println!(
            "beta {beta}: h_eq {:.6} g_min {:.5} peakF {:.4}@t={:.4} |hs(20)-heq| {:.2e} steps {} max_cells {} contact {:?} time {:?}",
            res.h_s_eq,
            g_min,
            fp,
            tp,
            (last.h_s - res.h_s_eq).abs(),
            res.records.len(),
            max_cells,
            res.contact.is_some(),
            t1.elapsed()
        );
    }
    println!("total {:?}", t0.elapsed());
}

fn example2() {
    use sealsim::diagnostics::{period_closures, period_min_g, phase_points};
    use sealsim::{run_transient, RotorMotion};
    let t0 = Instant::now();
    let mut cfg = BearingConfig::default();
    cfg.beta = 0.25;
    let t_end = 5.0 * std::f64::consts::TAU;
    let res = run_transient(&cfg, RotorMotion::Sinusoidal { eps: 1.2 }, t_end, &mut ()).unwrap();
    let points = phase_points(&res.records, RotorMotion::Sinusoidal { eps: 1.2 });
    let closures = period_closures(&points, std::f64::consts::TAU);
    let mins = period_min_g(&points, std::f64::consts::TAU);
    let max_cells = res.records.iter().map(|r| r.n_cells).max().unwrap();
    println!("h_eq {:.6} steps {} contact {:?}", res.h_s_eq, res.records.len(), res.contact);
    println!("closures {closures:?}");
    println!("period min g {mins:?}");
    println!("max cells {max_cells}");
    println!("total {:?}", t0.elapsed());
}

fn critical() {
    use sealsim::classify_contact;
    let which: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.3);
    let cfg = BearingConfig::default();
    for beta in [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4] {
        let t1 = Instant::now();
        match classify_contact(&cfg, which, beta, 5) {
            Ok(p) => println!(
                "eps {which} beta {beta}: contact {} t_contact {:?} g_min {:.3e} time {:?}",
                p.contact,
                p.t_contact,
                p.g_min,
                t1.elapsed()
            ),
            Err(e) => println!("eps {which} beta {beta}: error {e} time {:?}", t1.elapsed()),
        }
    }
}

fn convergence() {
    // Criterion 1: log profile, a = 0.2, p 1 -> 2, h = 1.
    let a = 0.2f64;
    let cfg = BearingConfig::default();
    let exact = move |r: f64, _t: f64| 1.0 + (r / a).ln() / (1.0f64 / a).ln();
    let f_exact = std::f64::consts::TAU / (1.0f64 / a).ln()
        * (0.5 * (1.0f64 / a).ln() - (1.0 - a * a) / 4.0);
    println!("F_exact = {f_exact}");
    let mut errs = Vec::new();
    let t0 = Instant::now();
    for lvl in 0..4 {
        let mut mesh = AnnulusMesh::build_coarse_annulus(a, 8, 40).unwrap();
        mesh.refine_uniform(lvl);
        let snap = FilmSnapshot::from_config(&cfg, 1.0, 0.0, 0.0);
        let t1 = Instant::now();
        let sys = assemble(&mesh, &snap, 1.0, 2.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        let err = l2_error(&mesh, &field, exact);
        let force = pressure_force(&mesh, &field, 1.0);
        println!(
            "lvl {lvl}: cells {:6} err {err:.6e} force {force:.8} relF {:.3e} time {:?}",
            mesh.n_active(),
            (force - f_exact).abs() / f_exact,
            t1.elapsed()
        );
        errs.push(err);
    }
    for w in errs.windows(2) {
        println!("rate: {:.3}", (w[0] / w[1]).log2());
    }
    println!("total {:?}", t0.elapsed());
}

fn manufactured() {
    // Criterion 2: p_ex = (r - a)(1 - r) cos theta, h = 1 + 0.3 r sin theta.
    let a = 0.2f64;
    let exact = move |r: f64, t: f64| (r - a) * (1.0 - r) * t.cos();
    let h_fn = |r: f64, t: f64| 1.0 + 0.3 * r * t.sin();
    let f_fn = |r: f64, t: f64| {
        let s = t.sin();
        let c = t.cos();
        (3.0 * r * s + 10.0).powi(2) * (45.0 * r.powi(3) * s + 75.0 * r * r - 6.0 * r * s - 5.0)
            * c
            / (2500.0 * r * r)
    };
    let mut errs = Vec::new();
    let t0 = Instant::now();
    for lvl in 0..4 {
        let mut mesh = AnnulusMesh::build_coarse_annulus(a, 8, 40).unwrap();
        mesh.refine_uniform(lvl);
        let t1 = Instant::now();
        let sys = assemble_with(&mesh, h_fn, f_fn, 0.0, 0.0).unwrap();
        let field = solve_pressure(&sys, 1e-12).unwrap();
        let err = l2_error(&mesh, &field, exact);
        println!(
            "lvl {lvl}: cells {:6} err {err:.6e} time {:?}",
            mesh.n_active(),
            t1.elapsed()
        );
        errs.push(err);
    }
    // least squares slope
    let n = errs.len() as f64;
    let ys: Vec<f64> = errs.iter().map(|e| e.log2()).collect();
    let xm = (n - 1.0) / 2.0;
    let ym = ys.iter().sum::<f64>() / n;
    let num: f64 = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (i as f64 - xm) * (y - ym))
        .sum();
    let den: f64 = (0..errs.len())
        .map(|i| (i as f64 - xm) * (i as f64 - xm))
        .sum();
    println!("ls slope = {:.4}", -num / den);
    println!("total {:?}", t0.elapsed());
}
