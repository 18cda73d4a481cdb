//! Synthetic stand-ins for molecular autocorrelation spectra.
//!
//! Both fixtures place four dominant lines inside a band `[lo, hi)` of the
//! normalized frequency axis and add a weak background. Physical energies are
//! `E = 2π ω / dt` (atomic units); `dt` is chosen so the band spans a stated
//! Hartree range.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Real;
use crate::spectrum::{rng_from_seed, Component, SparseSpectrum};

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY_HA: f64 = 1.6e-3;

/// Mapping between normalized frequencies and energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    /// Time step in atomic units.
    pub dt: f64,
}

impl PhysicalUnits {
    /// Units in which a normalized band of width `band` spans `hartree` Ha.
    pub fn for_band(band: f64, hartree: f64) -> Self {
        Self { dt: 2.0 * std::f64::consts::PI * band / hartree }
    }

    pub fn energy(&self, omega: f64) -> f64 {
        2.0 * std::f64::consts::PI * omega / self.dt
    }

    pub fn omega_tolerance(&self, hartree: f64) -> f64 {
        hartree * self.dt / (2.0 * std::f64::consts::PI)
    }

    /// Chemical accuracy expressed on the normalized frequency axis.
    pub fn chemical_accuracy_omega(&self) -> f64 {
        self.omega_tolerance(CHEMICAL_ACCURACY_HA)
    }

    pub fn describe(&self) -> String {
        format!(
            "E = 2*pi*omega/dt, dt = {:.6} a.u.; chemical accuracy {} Ha = {:.3e} in omega",
            self.dt,
            CHEMICAL_ACCURACY_HA,
            self.chemical_accuracy_omega()
        )
    }
}

/// A truth spectrum with its dominant lines and unit mapping.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Fixture<T: Real> {
    pub name: String,
    pub spectrum: SparseSpectrum<T>,
    /// Frequencies of the lines the experiment tries to recover.
    pub dominant: Vec<T>,
    pub units: PhysicalUnits,
}

impl<T: Real> Fixture<T> {
    /// Dominant lines shifted by `+offset, -offset, ...` with equal weights:
    /// the stand-in for a cheap classical estimate.
    pub fn guess(&self, offset: f64) -> Result<SparseSpectrum<T>> {
        let s = self.dominant.len();
        let pairs: Vec<(f64, f64)> = self
            .dominant
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                ((w.as_f64() + sign * offset).rem_euclid(1.0), 1.0 / s as f64)
            })
            .collect();
        SparseSpectrum::from_pairs(&pairs)
    }
}

const BAND: (f64, f64) = (0.10, 0.40);
/// Hartree range the dominant band is mapped onto.
const BAND_HARTREE: f64 = 1.0;

/// Four lines at fixed positions inside the band (minimum gap 0.05).
const DOMINANT: [f64; 4] = [0.12, 0.19, 0.27, 0.36];

/// Background line positions spread over `[0, 1)` away from the dominant
/// lines, with a minimum mutual gap of `min_gap`.
pub fn background_lines(count: usize, min_gap: f64, seed: u64, exclude: &[f64]) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let mut out: Vec<f64> = Vec::with_capacity(count);
    let far = |a: f64, b: f64, gap: f64| {
        let d = (a - b).abs();
        d.min(1.0 - d) >= gap
    };
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        let gap = if attempts > 100_000 { min_gap / 2.0 } else { min_gap };
        let w: f64 = rng.random();
        if exclude.iter().all(|&e| far(w, e, 4.0 * min_gap.max(1e-3))) && out.iter().all(|&o| far(w, o, gap)) {
            out.push(w);
        }
    }
    out
}

fn build<T: Real>(name: &str, dominant_weight: f64, lines: usize, background_total: f64, min_gap: f64) -> Result<Fixture<T>> {
    let mut comps: Vec<Component<T>> =
        DOMINANT.iter().map(|&w| Component { omega: T::lit(w), weight: T::lit(dominant_weight) }).collect();
    for w in background_lines(lines, min_gap, 0xbac6_7012, &DOMINANT) {
        comps.push(Component { omega: T::lit(w), weight: T::lit(background_total / lines as f64) });
    }
    Ok(Fixture {
        name: name.to_string(),
        spectrum: SparseSpectrum::new(comps, Some(name.to_string()))?,
        dominant: DOMINANT.iter().map(|&w| T::lit(w)).collect(),
        units: PhysicalUnits::for_band(BAND.1 - BAND.0, BAND_HARTREE),
    })
}

/// Four dominant weights of 0.24 and 4% background over 20 lines.
pub fn weak_correlation<T: Real>() -> Result<Fixture<T>> {
    build("weak-correlation", 0.24, 20, 0.04, 0.02)
}

/// Four dominant weights of 0.13 and 45% background over 200 lines whose
/// minimum gap is about `1 / n_total`.
pub fn strong_correlation<T: Real>(n_total: usize) -> Result<Fixture<T>> {
    build("strong-correlation", 0.13, 200, 0.45, 1.0 / n_total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_weights() {
        let w = weak_correlation::<f64>().unwrap();
        assert_eq!(w.spectrum.len(), 24);
        assert!((w.spectrum.total_weight() - 1.0).abs() < 1e-12);
        let s = strong_correlation::<f64>(801).unwrap();
        assert_eq!(s.spectrum.len(), 204);
        assert!((s.spectrum.total_weight() - 0.97).abs() < 1e-12);
        let f = s.spectrum.frequencies();
        let gap = f.windows(2).map(|p| p[1] - p[0]).fold(1.0, f64::min);
        assert!(gap >= 0.5 / 801.0 && gap < 4.0 / 801.0, "{gap}");
    }

    #[test]
    fn unit_mapping_round_trip() {
        let u = PhysicalUnits::for_band(0.3, 1.0);
        assert!((u.energy(0.4) - u.energy(0.1) - 1.0).abs() < 1e-12);
        assert!((u.energy(u.chemical_accuracy_omega()) - CHEMICAL_ACCURACY_HA).abs() < 1e-15);
    }

    #[test]
    fn guess_is_offset_truth() {
        let w = weak_correlation::<f64>().unwrap();
        let g = w.guess(0.003).unwrap();
        assert_eq!(g.len(), 4);
        for (a, b) in g.frequencies().iter().zip(&w.dominant) {
            assert!(((a - b).abs() - 0.003).abs() < 1e-12);
        }
        assert!(g.weights().iter().all(|&c| c == 0.25));
    }
}
