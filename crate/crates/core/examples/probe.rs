//! Development probe: per-preset equilibrium parameters, tails, runtimes.

use std::sync::Arc;
use std::time::Instant;

use kaclab_core::analysis::{
    fit_decay_rate, monitor_conservation_and_entropy, DecayQuantity, MonitorTolerances,
};
use kaclab_core::equilibrium::{bose_eval, fit_bose, sample};
use kaclab_core::grid::VelocityGrid;
use kaclab_core::moments::compute_moments;
use kaclab_core::presets::{preset_defaults, preset_initial};
use kaclab_core::scheme::{run, suggest_dt, NullSink, SchemeConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which: Vec<u32> = if args.len() > 1 {
        args[1..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        vec![1, 2, 3, 4, 5]
    };
    for k in which {
        let d = preset_defaults(k).unwrap();
        let grid = Arc::new(VelocityGrid::new(d.v_max, d.n_cells).unwrap());
        let initial = preset_initial(k, Arc::clone(&grid)).unwrap();
        let ms = compute_moments(&initial).unwrap();
        let p = fit_bose(ms.m, ms.e, 1e-10).unwrap();
        let tail = bose_eval(&p, d.v_max);
        let eq = sample(&p, Arc::clone(&grid));
        println!(
            "preset {k}: m={:.6} e={:.6} m3/e={:.4} -> lambda1={:.6} z={:.6} tail(vmax={})={:.3e} f_inf(0)={:.4}",
            ms.m, ms.e, ms.m.powi(3) / ms.e, p.lambda1(), p.fugacity(), d.v_max, tail,
            p.fugacity() / (1.0 - p.fugacity())
        );
        let cfg = SchemeConfig {
            dt_initial: suggest_dt(&initial, &SchemeConfig::default()).min(d.dt_max),
            dt_max: d.dt_max,
            t_end: d.t_end,
            output_interval: d.output_interval,
            ..SchemeConfig::default()
        };
        println!("  dt_initial={:.3e} dt_max={:.3e}", cfg.dt_initial, cfg.dt_max);
        let t0 = Instant::now();
        match run(&initial, &cfg, &p, &mut NullSink) {
            Ok(out) => {
                let wall = t0.elapsed().as_secs_f64();
                let n_rec = out.series.len();
                let last = out.series.last().unwrap();
                let l1 = out.final_state.l1_distance(&eq);
                println!(
                    "  steps={} rejects={} wall={:.1}s records={} L1(final)={:.3e} ({:.2e} of m)",
                    out.total_accepted, out.total_rejected, wall, n_rec, l1, l1 / ms.m
                );
                println!(
                    "  H: {:.6} -> {:.6}; H_rel: {:.3e} -> {:.3e}; D: {:.3e} -> {:.3e}",
                    out.series[0].entropy.h, last.entropy.h,
                    out.series[0].entropy.h_rel, last.entropy.h_rel,
                    out.series[0].entropy.d, last.entropy.d,
                );
                let h0 = out.series[0].entropy.h_rel;
                for frac in [1e-3, 1e-6, 1e-9, 1e-12] {
                    if let Some(r) = out.series.iter().find(|r| r.entropy.h_rel < h0 * frac) {
                        print!("  H_rel<{:.0e}·H0 at t={:.3}", frac, r.time);
                    }
                }
                println!();
                for q in [DecayQuantity::RelativeEntropy, DecayQuantity::L1Distance] {
                    match fit_decay_rate(&out.series, q, d.fit_window) {
                        Ok(f) => println!(
                            "  fit {:?}: alpha={:.4} r2={:.6} n={}",
                            q, f.alpha_hat, f.r_squared, f.n_points
                        ),
                        Err(e) => println!("  fit {q:?}: ERR {e}"),
                    }
                }
                let tol = MonitorTolerances::default();
                let report =
                    monitor_conservation_and_entropy(&out.series, &out.series[0].moments, &tol);
                if report.all_pass() {
                    println!("  monitors: all pass");
                } else {
                    for name in report.failing() {
                        let c = &report.checks[name];
                        println!(
                            "  monitor FAIL {name}: worst {:.3e} at t={:.3} (tol {:.1e})",
                            c.worst_value, c.worst_time, c.tolerance
                        );
                    }
                }
            }
            Err(e) => println!("  RUN ERROR: {e}"),
        }
    }
}
