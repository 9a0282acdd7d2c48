//! Runs the bound checks on the unit sphere and writes the reports.

use geoknot::geometry::Curvature;
use geoknot::surfaces::{SamplingMode, SurfaceSpec};
use geoknot::validation::{
    verify_constrained_lower, verify_unconstrained_lower, verify_unconstrained_upper, BoundReport, RadiusRule,
    RunOptions, SampleConfig,
};
use geoknot::Result;

fn show(report: &BoundReport) {
    let s = &report.summary;
    println!(
        "{:<20} pairs {:>3}, violations {}, ratio {:.4}..{:.4}, {:.2}s",
        report.experiment,
        s.pairs,
        s.violations,
        s.min_ratio.unwrap_or(f64::NAN),
        s.max_ratio.unwrap_or(f64::NAN),
        s.runtime_seconds
    );
    for (k, v) in &s.fitted {
        println!("    {k} = {v:.4}");
    }
    for c in &s.checks {
        println!("    {} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
}

fn main() -> Result<()> {
    let cfg = SampleConfig::new(SurfaceSpec::sphere(1.0), SamplingMode::Grid, 2000, 42);
    let opts = RunOptions { pairs: 100, ..RunOptions::default() };

    let upper = verify_unconstrained_upper(&cfg, RadiusRule::EpsilonMultiple(4.0), &opts)?;
    show(&upper);
    let lower = verify_unconstrained_lower(&cfg, RadiusRule::Fixed(0.3), &opts)?;
    show(&lower);
    let curv = verify_constrained_lower(&cfg, &[1000, 4000], 0.25, 0.25, Curvature::new(1.0)?, 20.0, &opts)?;
    show(&curv);

    let out = std::env::temp_dir();
    upper.write_csv(&out.join("unconstrained_upper.csv"))?;
    upper.write_summary(&out.join("unconstrained_upper.json"))?;
    println!("reports written to {}", out.display());
    Ok(())
}
