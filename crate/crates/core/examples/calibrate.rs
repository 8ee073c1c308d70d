//! Prints the headline numbers of the three sweeps for a candidate energy
//! model, used to pick the default per-sample energies.
//!
//! ```text
//! cargo run --release -p edsa-core --example calibrate -- 25 10,20,30,40,50 [iterations]
//! ```

use edsa_core::sim::{
    linear_fit, sweep_battery, sweep_demands, sweep_device_split, BatterySplit, SimConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let base = SimConfig::default();
    let overhead = args.first().map(|s| s.parse()).transpose()?.unwrap_or(base.overhead_energy);
    let sense = match args.get(1) {
        Some(s) => s.split(',').map(str::parse).collect::<Result<Vec<f64>, _>>()?,
        None => base.sense_energy.clone(),
    };
    let iterations = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(base.iterations);
    let tune = |c: SimConfig| SimConfig {
        overhead_energy: overhead,
        sense_energy: sense.clone(),
        iterations,
        ..c
    };

    let grid: Vec<usize> = (10..=250).step_by(20).collect();
    let d = sweep_demands(&tune(SimConfig::demand_sweep()), &grid)?;
    println!("demands:");
    for p in &d.points {
        println!("  {:>4} revenue {:>10.1} residual {:>6.1}% selected {:>6.1}", p.label, p.mean_revenue, p.mean_residual_pct, p.mean_selected);
    }
    let r = d.revenues();
    let nondecreasing = r.windows(2).all(|w| w[1] >= w[0]);
    let tail = (r[r.len() - 1] - r[r.len() - 2]) / r[r.len() - 2] * 100.0;
    println!("  nondecreasing {nondecreasing}, 230->250 growth {tail:.2}%");

    let batteries: Vec<f64> = (500..=3000).step_by(250).map(f64::from).collect();
    let b = sweep_battery(&tune(SimConfig::single_device()), &batteries)?;
    println!("battery:");
    for p in &b.points {
        println!("  {:>5} revenue {:>10.1} residual {:>6.1} ({:.2}%)", p.label, p.mean_revenue, p.mean_residual_abs, p.mean_residual_pct);
    }
    let pct: Vec<f64> = b.points.iter().map(|p| p.mean_residual_pct).collect();
    let fit = linear_fit(&batteries, &b.revenues()).unwrap();
    println!(
        "  r {:.5}, pct strictly decreasing {}",
        fit.r,
        pct.windows(2).all(|w| w[1] < w[0])
    );

    let splits = [(10, 300.0), (5, 600.0), (2, 1500.0), (1, 3000.0)]
        .map(|(devices, battery)| BatterySplit { devices, battery });
    let s = sweep_device_split(&tune(SimConfig::default()), &splits)?;
    println!("splits:");
    for p in &s.points {
        println!("  {:>7} revenue {:>10.1} residual {:>6.1}", p.label, p.mean_revenue, p.mean_residual_abs);
    }
    Ok(())
}
