//! Measurement of the frozen constants on a fixed corpus: library initial
//! data at unit amplitude, snapshots of the default run, and a rough-data
//! run for the H2 smoothing bound.

use crate::config::RunConfig;
use crate::domain::{DomainConfig, SpectralField};
use crate::dynamics::simulate;
use crate::error::Result;
use crate::functionals::{cubic_gradient_ratio, interpolation_ratio, product_ratio, Constants};
use crate::initial::InitialData;
use crate::trajectory::DiagnosticLevel;

/// Time at which the H2 norm of the rough-data run is measured.
pub const SMOOTHING_TIME: f64 = 0.1;

/// The library fields of the corpus, all with `max |u| = 1`.
pub fn corpus_fields(d: &DomainConfig) -> Result<Vec<SpectralField>> {
    let mut data = vec![
        InitialData::Eigenmode { l: 1 },
        InitialData::Eigenmode { l: 2 },
        InitialData::TravelingMode { j: 4, l: 1 },
        InitialData::TravelingMode { j: 16, l: 2 },
        InitialData::GaussianBump {
            x0: 0.0,
            sigma_x: 2.0,
            l: 1,
        },
        InitialData::GaussianBump {
            x0: 5.0,
            sigma_x: 4.0,
            l: 2,
        },
    ];
    data.extend((1..=4).map(|seed| InitialData::RandomBand { seed, jmax: 8, lmax: 4 }));
    data.iter().map(|g| g.spectral(1.0, d)).collect()
}

/// Data whose second derivatives dominate its first: random coefficients
/// spread over a wide band.
pub fn rough_data() -> InitialData {
    InitialData::RandomBand {
        seed: 11,
        jmax: 80,
        lmax: 40,
    }
}

/// Measure every constant on the corpus for the default configuration.
pub fn measure() -> Result<Constants> {
    let cfg = RunConfig::default();
    let d = cfg.domain()?;
    let run = simulate(
        &cfg.init.grid(cfg.amplitude, &d)?,
        cfg.t_end,
        &cfg.stepper(DiagnosticLevel::H2),
        cfg.flux()?,
        &d,
    )?;
    let mut fields = corpus_fields(&d)?;
    fields.extend(run.snapshots.iter().map(|s| s.field.clone()));

    let mut c = Constants {
        interpolation_c: 0.0,
        product_c: 0.0,
        c1: 0.0,
        c2: 0.0,
        h2_smoothing_bound: 0.0,
    };
    for u in &fields {
        c.interpolation_c = c.interpolation_c.max(interpolation_ratio(u, 0, 1, 4.0, &d)?);
        c.product_c = c.product_c.max(product_ratio(u, &d)?);
        c.c1 = c.c1.max(cubic_gradient_ratio(u, &d)?);
    }
    for g in &run.diagnostics {
        let (Some(e2), Some(s2)) = (g.energy2, g.source2) else {
            continue;
        };
        if e2 > 0.0 {
            c.c2 = c.c2.max(s2.max(0.0) / (g.h1_functional() * e2));
        }
    }
    c.h2_smoothing_bound = smoothing_norm(&d, &cfg)?;
    Ok(c)
}

/// H2 norm at [`SMOOTHING_TIME`] of the run from [`rough_data`].
pub fn smoothing_norm(d: &DomainConfig, cfg: &RunConfig) -> Result<f64> {
    let u0 = rough_data().grid(1.0, d)?;
    let run = simulate(&u0, SMOOTHING_TIME, &cfg.stepper(DiagnosticLevel::L2), cfg.flux()?, d)?;
    Ok(run.diagnostics.last().map_or(f64::NAN, |g| g.h2))
}
