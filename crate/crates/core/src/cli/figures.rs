use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::csv::{emit_csv, write_atomic};
use super::svg::{render_svg, Overlay, PANELS};
use crate::error::Result;
use crate::experiments::{run_sweep, Measure, Pipeline, SweepOptions, SweepResult};
use crate::model::{linear_grid, Family, Scenario, SpectralDensity};

/// Initial-state weights drawn in every figure: the Bell state and α = 1/√10, β = 3/√10.
pub const OVERLAYS: [(&str, f64, f64); 2] = [
    ("bell", FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    ("sqrt10", 0.316_227_766_016_837_94, 0.948_683_298_050_513_8),
];

pub const LORENTZ_W_OVER_LAMBDA_SQ: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureSpec {
    pub number: u8,
    pub family: Family,
    pub spectral: SpectralDensity,
    pub time_end: f64,
    pub time_steps: usize,
}

impl FigureSpec {
    pub fn title(&self) -> String {
        let spectrum = match self.spectral {
            SpectralDensity::Flat { .. } => "flat spectrum".to_string(),
            SpectralDensity::Lorentz { .. } => "Lorentz W/λ = √200".to_string(),
        };
        format!("Fig. {}: Q and C, {}, {}", self.number, self.family.label(), spectrum)
    }

    pub fn scenario(&self, overlay: usize) -> Result<Scenario> {
        let (_, a, b) = OVERLAYS[overlay];
        Scenario::new(
            self.family,
            Complex64::new(a, 0.0),
            Complex64::new(b, 0.0),
            self.spectral,
            linear_grid(0.0, self.time_end, self.time_steps),
        )
    }

    pub fn csv_name(&self, overlay: usize) -> String {
        format!("fig{}_{}.csv", self.number, OVERLAYS[overlay].0)
    }

    pub fn svg_name(&self) -> String {
        format!("fig{}.svg", self.number)
    }
}

/// Figs. 1-4: {two_exc, one_exc} × {flat, Lorentz W/λ = √200}. Time is γt on
/// [0, 5] (51 points) for the flat spectrum and λt on [0, 2] (201 points) for the Lorentz one.
pub fn figure_specs() -> [FigureSpec; 4] {
    let flat = SpectralDensity::Flat { gamma: 1.0 };
    let lorentz = SpectralDensity::Lorentz {
        w: LORENTZ_W_OVER_LAMBDA_SQ.sqrt(),
        lambda: 1.0,
    };
    let spec = |number, family, spectral| {
        let (time_end, time_steps) = if spectral == flat { (5.0, 51) } else { (2.0, 201) };
        FigureSpec {
            number,
            family,
            spectral,
            time_end,
            time_steps,
        }
    };
    [
        spec(1, Family::TwoExcitation, flat),
        spec(2, Family::TwoExcitation, lorentz),
        spec(3, Family::OneExcitation, flat),
        spec(4, Family::OneExcitation, lorentz),
    ]
}

pub fn figure_spec(number: u8) -> Option<FigureSpec> {
    figure_specs().into_iter().find(|f| f.number == number)
}

/// Sweeps both overlays of one figure on the four panel partitions.
pub fn sweep_figure(spec: &FigureSpec, options: SweepOptions) -> Result<Vec<SweepResult>> {
    (0..OVERLAYS.len())
        .map(|k| run_sweep(&spec.scenario(k)?, &PANELS, Pipeline::Both, options))
        .collect()
}

/// Writes one CSV per (figure, overlay) and one SVG per figure; returns the paths.
pub fn emit_figures(out_dir: &Path, options: SweepOptions) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for spec in figure_specs() {
        let results = sweep_figure(&spec, options)?;
        for (k, res) in results.iter().enumerate() {
            let path = out_dir.join(spec.csv_name(k));
            emit_csv(res, &path)?;
            written.push(path);
        }
        let overlays: Vec<Overlay<'_>> = results
            .iter()
            .zip(OVERLAYS)
            .map(|(result, (label, _, _))| Overlay { label, result })
            .collect();
        let doc = render_svg(&spec.title(), &overlays, &[Measure::Quantum, Measure::Classical])?;
        let path = out_dir.join(spec.svg_name());
        write_atomic(&path, doc.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
