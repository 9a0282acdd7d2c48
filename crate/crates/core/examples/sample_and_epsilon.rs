//! Sample each test surface and estimate how densely the sample covers it.

use geoknot::surfaces::{hausdorff_epsilon, sample_surface, SamplingMode, SurfaceSpec};
use geoknot::Result;

fn main() -> Result<()> {
    let surfaces = [
        SurfaceSpec::sphere(1.0),
        SurfaceSpec::disk(1.0),
        SurfaceSpec::cylinder(1.0, 2.0),
        SurfaceSpec::circle(1.0),
    ];
    for spec in &surfaces {
        for mode in [SamplingMode::Grid, SamplingMode::Uniform] {
            let sample = sample_surface(spec, mode, 1000, 42)?;
            let eps = hausdorff_epsilon(&sample, 10 * sample.len())?;
            println!(
                "{spec:<24} {mode:?}: N = {:>5}, eps = {:.4} (reference {} points, resolution {:.4})",
                sample.len(),
                eps.epsilon,
                eps.reference_size,
                eps.resolution
            );
        }
    }
    Ok(())
}
