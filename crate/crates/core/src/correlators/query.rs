use num_complex::Complex;
use rayon::prelude::*;

use super::berezin::{check_km, k_npoint_berezin, kappa_pair_berezin};
use super::closed::{kappa_low_codim_closed, kappa_point_closed};
use crate::error::{Error, Result};
use crate::kernel::PointConfig;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry<T> {
    /// General configuration of `n` points in `C^m`.
    Points(PointConfig<T>),
    /// The standard pair at distance `r` in `C^m`.
    Pair { r: T, m: usize },
}

/// Which correlation function to evaluate and where.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationQuery<T> {
    pub k: usize,
    pub geometry: Geometry<T>,
}

impl<T: Real> CorrelationQuery<T> {
    pub fn pair(r: T, k: usize, m: usize) -> Result<Self> {
        check_km(k, m)?;
        if !(r > T::zero()) {
            return Err(Error::domain(format!("need r > 0, got r = {r}")));
        }
        Ok(Self {
            k,
            geometry: Geometry::Pair { r, m },
        })
    }

    pub fn points(points: Vec<Vec<Complex<T>>>, k: usize) -> Result<Self> {
        let cfg = PointConfig::new(points)?;
        check_km(k, cfg.m())?;
        Ok(Self {
            k,
            geometry: Geometry::Points(cfg),
        })
    }

    pub fn n(&self) -> usize {
        match &self.geometry {
            Geometry::Points(cfg) => cfg.n(),
            Geometry::Pair { .. } => 2,
        }
    }

    pub fn m(&self) -> usize {
        match &self.geometry {
            Geometry::Points(cfg) => cfg.m(),
            Geometry::Pair { m, .. } => *m,
        }
    }

    /// The point configuration, materializing the standard pair if needed.
    pub fn config(&self) -> Result<PointConfig<T>> {
        match &self.geometry {
            Geometry::Points(cfg) => Ok(cfg.clone()),
            Geometry::Pair { r, m } => PointConfig::standard_pair(*r, *m),
        }
    }

    /// Deterministic value: closed form where one exists, Berezin otherwise.
    pub fn evaluate(&self) -> Result<T> {
        let (k, m) = (self.k, self.m());
        match &self.geometry {
            Geometry::Pair { r, .. } if k == m => kappa_point_closed(*r, m),
            Geometry::Pair { r, .. } if k <= 3 => kappa_low_codim_closed(*r, k, m),
            Geometry::Pair { r, .. } => kappa_pair_berezin(*r, k, m),
            Geometry::Points(cfg) => k_npoint_berezin(cfg, k),
        }
    }
}

/// Pair correlation on the uniform grid of `steps` radii from `rmin` to
/// `rmax` inclusive, in grid order.
pub fn kappa_curve<T: Real>(k: usize, m: usize, rmin: T, rmax: T, steps: usize) -> Result<Vec<(T, T)>> {
    check_km(k, m)?;
    if !(rmin > T::zero() && rmin < rmax) {
        return Err(Error::domain(format!("need 0 < rmin < rmax, got rmin = {rmin}, rmax = {rmax}")));
    }
    if steps < 2 {
        return Err(Error::domain(format!("need steps >= 2, got {steps}")));
    }
    let h = (rmax - rmin) / T::lit((steps - 1) as f64);
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let r = if i + 1 == steps { rmax } else { rmin + h * T::lit(i as f64) };
            CorrelationQuery::pair(r, k, m)?.evaluate().map(|v| (r, v))
        })
        .collect()
}
