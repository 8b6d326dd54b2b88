use crate::{Error, Result, Scalar};

/// Ordinary least-squares line with a standard error for the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub slope_se: T,
}

impl<T: Scalar> LinearFit<T> {
    /// Two-sided 95% interval for the slope, normal quantile.
    pub fn slope_ci95(&self) -> (T, T) {
        let half = T::lit(1.959_963_984_540_054) * self.slope_se;
        (self.slope - half, self.slope + half)
    }
}

fn centred<T: Scalar>(x: &[T], y: &[T]) -> Result<(T, T, Vec<T>, Vec<T>)> {
    if x.len() != y.len() {
        return Err(Error::Precondition("x and y differ in length".into()));
    }
    if x.len() < 3 {
        return Err(Error::Precondition("a line fit with an error estimate needs 3 points".into()));
    }
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let dx: Vec<T> = x.iter().map(|&v| v - mx).collect();
    let sxx: T = dx.iter().map(|&d| d * d).sum();
    if !(sxx > T::zero()) {
        return Err(Error::Precondition("all x values coincide".into()));
    }
    let sxy: T = dx.iter().zip(y).map(|(&d, &v)| d * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = x.iter().zip(y).map(|(&a, &b)| b - intercept - slope * a).collect();
    Ok((slope, intercept, dx, resid))
}

/// OLS with the textbook independent-errors standard error.
pub fn linear_fit<T: Scalar>(x: &[T], y: &[T]) -> Result<LinearFit<T>> {
    linear_fit_hac(x, y, 0)
}

/// Rule-of-thumb Newey–West truncation lag `floor(4 (n/100)^(2/9))`.
pub fn newey_west_lag(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// OLS with a Newey–West (Bartlett kernel) standard error, robust to
/// residual autocorrelation up to `max_lag` samples. `max_lag = 0` gives
/// the heteroskedasticity-robust form with a small-sample factor.
pub fn linear_fit_hac<T: Scalar>(x: &[T], y: &[T], max_lag: usize) -> Result<LinearFit<T>> {
    let (slope, intercept, dx, resid) = centred(x, y)?;
    let n = dx.len();
    let sxx: T = dx.iter().map(|&d| d * d).sum();
    let score: Vec<T> = dx.iter().zip(&resid).map(|(&d, &e)| d * e).collect();
    let var_score = if max_lag == 0 {
        // classical: sigma^2 * sxx
        let s2 = resid.iter().map(|&e| e * e).sum::<T>() / T::of_usize(n - 2);
        s2 * sxx
    } else {
        let mut s = score.iter().map(|&u| u * u).sum::<T>();
        for lag in 1..=max_lag.min(n - 1) {
            let w = T::one() - T::of_usize(lag) / T::of_usize(max_lag + 1);
            let gamma: T = (lag..n).map(|t| score[t] * score[t - lag]).sum();
            s += T::lit(2.0) * w * gamma;
        }
        s.max(T::zero()) * T::of_usize(n) / T::of_usize(n - 2)
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: var_score.sqrt() / sxx,
    })
}
