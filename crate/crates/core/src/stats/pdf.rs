use std::io::Write;

use super::burn_in_start;
use crate::integrator::Trajectory;
use crate::{Error, Result, Scalar};

/// Piecewise-constant density of `r = |x|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPdf<T> {
    pub bin_edges: Vec<T>,
    pub density: Vec<T>,
    /// Samples that fell inside the edges and make up the density.
    pub sample_count: usize,
    /// Samples beyond the last edge, left out of the normalization.
    pub outside_count: usize,
    pub burn_in_time: T,
}

impl<T: Scalar> RadialPdf<T> {
    /// Histogram of non-negative `radii` over increasing `bin_edges`
    /// starting at zero or above.
    pub fn from_radii(radii: impl IntoIterator<Item = T>, bin_edges: Vec<T>, burn_in_time: T) -> Result<Self> {
        if bin_edges.len() < 3 {
            return Err(Error::config("stats.bins", "need at least 2 bins"));
        }
        if bin_edges.windows(2).any(|w| !(w[0] < w[1])) || !bin_edges.iter().all(|e| e.is_finite()) {
            return Err(Error::config("stats.bins", "bin edges must be finite and increasing"));
        }
        let bins = bin_edges.len() - 1;
        let mut counts = vec![0usize; bins];
        let (lo, hi) = (bin_edges[0], bin_edges[bins]);
        let mut outside = 0;
        for r in radii {
            if !(r >= lo && r <= hi) {
                outside += 1;
                continue;
            }
            let i = bin_edges.partition_point(|&e| e <= r).saturating_sub(1).min(bins - 1);
            counts[i] += 1;
        }
        let inside: usize = counts.iter().sum();
        if inside == 0 {
            return Err(Error::Precondition(format!(
                "none of the {outside} samples fall inside [{lo}, {hi}]"
            )));
        }
        let n = T::of_usize(inside);
        let density = counts
            .iter()
            .zip(bin_edges.windows(2))
            .map(|(&c, w)| T::of_usize(c) / (n * (w[1] - w[0])))
            .collect();
        Ok(Self {
            bin_edges,
            density,
            sample_count: inside,
            outside_count: outside,
            burn_in_time,
        })
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn width(&self, i: usize) -> T {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    pub fn midpoint(&self, i: usize) -> T {
        T::lit(0.5) * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// `sum density_i * width_i`.
    pub fn total_mass(&self) -> T {
        (0..self.bins()).map(|i| self.density[i] * self.width(i)).sum()
    }

    /// Mean and standard deviation of the histogram, bins at midpoints.
    pub fn mean_std(&self) -> (T, T) {
        let mass = |f: &dyn Fn(T) -> T| -> T {
            (0..self.bins()).map(|i| self.density[i] * self.width(i) * f(self.midpoint(i))).sum()
        };
        let mean = mass(&|r| r);
        let var = mass(&|r| (r - mean) * (r - mean));
        (mean, var.max(T::zero()).sqrt())
    }

    /// Number of maxima of the density, smoothed by a centred moving
    /// average over `2 * half_width + 1` bins, whose prominence exceeds
    /// `min_prominence` times the largest smoothed value.
    pub fn prominent_modes(&self, half_width: usize, min_prominence: T) -> usize {
        let n = self.bins();
        let smooth: Vec<T> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(half_width);
                let hi = (i + half_width).min(n - 1);
                self.density[lo..=hi].iter().copied().sum::<T>() / T::of_usize(hi - lo + 1)
            })
            .collect();
        let top = smooth.iter().copied().fold(T::zero(), T::max);
        if top <= T::zero() {
            return 0;
        }
        let mut modes = 0;
        let mut i = 0;
        while i < n {
            // a plateau counts once
            let mut j = i;
            while j + 1 < n && smooth[j + 1] == smooth[i] {
                j += 1;
            }
            let left_lower = i == 0 || smooth[i - 1] < smooth[i];
            let right_lower = j == n - 1 || smooth[j + 1] < smooth[i];
            if left_lower && right_lower && smooth[i] > T::zero() {
                let height = smooth[i];
                let saddle = |range: &mut dyn Iterator<Item = usize>| -> T {
                    let mut low = height;
                    for k in range {
                        if smooth[k] > height {
                            return low;
                        }
                        low = low.min(smooth[k]);
                    }
                    // reached the boundary without finding higher ground
                    T::zero().max(low)
                };
                let left = saddle(&mut (0..i).rev());
                let right = saddle(&mut (j + 1..n));
                let prominence = height - left.max(right);
                let is_highest = height >= top;
                let prominence = if is_highest { height } else { prominence };
                if prominence >= min_prominence * top {
                    modes += 1;
                }
            }
            i = j + 1;
        }
        modes
    }

    /// One mode after light smoothing, ignoring ripples below 10% of the
    /// peak height.
    pub fn is_unimodal(&self) -> bool {
        self.prominent_modes(2, T::lit(0.1)) == 1
    }

    /// `r_lo,r_hi,density` rows under a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r_lo,r_hi,density")?;
        for i in 0..self.bins() {
            writeln!(out, "{},{},{}", self.bin_edges[i], self.bin_edges[i + 1], self.density[i])?;
        }
        Ok(())
    }
}

/// Density of `|x|` over the post-burn-in samples of `traj`, in `bins`
/// equal bins on `[0, r_max]`.
pub fn radial_pdf<T: Scalar>(traj: &Trajectory<T>, burn_in_fraction: T, bins: usize, r_max: T) -> Result<RadialPdf<T>> {
    if bins < 2 {
        return Err(Error::config("stats.bins", "need at least 2 bins"));
    }
    if !(r_max > T::zero() && r_max.is_finite()) {
        return Err(Error::config("stats.r_max", "must be finite and > 0"));
    }
    let (start, cut) = burn_in_start(traj, burn_in_fraction)?;
    let edges = (0..=bins).map(|i| r_max * T::of_usize(i) / T::of_usize(bins)).collect();
    RadialPdf::from_radii(traj.positions[start..].iter().map(|x| x.norm()), edges, cut)
}

/// Standard deviation of `|x|` over the post-burn-in samples.
pub fn radius_std<T: Scalar>(traj: &Trajectory<T>, burn_in_fraction: T) -> Result<T> {
    let (start, _) = burn_in_start(traj, burn_in_fraction)?;
    let radii: Vec<T> = traj.positions[start..].iter().map(|x| x.norm()).collect();
    let n = T::of_usize(radii.len());
    let mean = radii.iter().copied().sum::<T>() / n;
    let var = radii.iter().map(|&r| (r - mean) * (r - mean)).sum::<T>() / n;
    Ok(var.sqrt())
}

/// `sum |p_i - q_i| width_i`, in `[0, 2]`.
pub fn pdf_l1_distance<T: Scalar>(p: &RadialPdf<T>, q: &RadialPdf<T>) -> Result<T> {
    if p.bin_edges != q.bin_edges {
        return Err(Error::Precondition("densities are binned on different edges".into()));
    }
    Ok((0..p.bins()).map(|i| (p.density[i] - q.density[i]).abs() * p.width(i)).sum())
}

/// Location of the maximum: midpoint of the highest bin, moved to the
/// vertex of the parabola through it and its neighbours. Among equal
/// maxima the one at smaller `r` is taken.
pub fn peak_location<T: Scalar>(pdf: &RadialPdf<T>) -> Result<T> {
    let d = &pdf.density;
    let mut best = 0;
    for i in 1..d.len() {
        if d[i] > d[best] {
            best = i;
        }
    }
    if !(d[best] > T::zero()) {
        return Err(Error::Precondition("density is identically zero".into()));
    }
    let mid = pdf.midpoint(best);
    if best == 0 || best + 1 == d.len() {
        return Ok(mid);
    }
    let (a, b, c) = (d[best - 1], d[best], d[best + 1]);
    let curvature = a - T::lit(2.0) * b + c;
    if curvature >= T::zero() {
        return Ok(mid);
    }
    let half = T::lit(0.5);
    let offset = (half * (a - c) / curvature).max(-half).min(half);
    Ok(mid + offset * pdf.width(best))
}
