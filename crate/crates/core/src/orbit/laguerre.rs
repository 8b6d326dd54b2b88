//! Gauss–Laguerre rules for `int_0^inf f(z) e^{-z} dz`.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Nodes and weights of an `n`-point rule, nodes ascending.
#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const MIN_NODES: usize = 64;
pub const MAX_NODES: usize = 1024;
const LEVELS: usize = 5;

static RULES: [OnceLock<LaguerreRule>; LEVELS] = [const { OnceLock::new() }; LEVELS];

/// Cached rule for `n = 64 * 2^k`, `n <= 1024`.
pub fn cached_rule(n: usize) -> &'static LaguerreRule {
    let level = (n / MIN_NODES).trailing_zeros() as usize;
    assert!(
        n >= MIN_NODES && n.is_power_of_two() && level < LEVELS,
        "unsupported node count {n}"
    );
    RULES[level].get_or_init(|| LaguerreRule::new(n).expect("Laguerre nodes converge for n <= 1024"))
}

impl LaguerreRule {
    /// Eigenvalues of the Jacobi matrix (diagonal `2i+1`, off-diagonal `i`),
    /// polished by Newton on `L_n`; weights `1 / (x L_n'(x)^2)` with
    /// `x L_n' = n (L_n - L_{n-1})`, which stays accurate when the node is
    /// slightly off the root.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a quadrature rule needs at least one node".into()));
        }
        let mut diag: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64).collect();
        let mut off: Vec<f64> = (1..=n).map(|i| if i < n { i as f64 } else { 0.0 }).collect();
        tridiagonal_eigenvalues(&mut diag, &mut off)?;
        diag.sort_by(f64::total_cmp);

        let mut weights = Vec::with_capacity(n);
        for x in diag.iter_mut() {
            for _ in 0..8 {
                let (ln, lm, _) = laguerre_pair(n, *x);
                let step = *x * ln / (n as f64 * (ln - lm));
                *x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * *x {
                    break;
                }
            }
            let (ln, lm, log_scale) = laguerre_pair(n, *x);
            let log_w = x.ln() - 2.0 * ((n as f64).ln() + (ln - lm).abs().ln() + log_scale);
            weights.push(log_w.exp());
        }
        Ok(Self { nodes: diag, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(x_i)`; nodes whose weight underflowed are skipped.
    pub fn integrate<const K: usize>(&self, mut f: impl FnMut(f64) -> [f64; K]) -> [f64; K] {
        let mut acc = [0.0; K];
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let v = f(x);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc
    }
}

/// `(L_n(x), L_{n-1}(x))`, both divided by `exp(log_scale)`.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64, f64) {
    const BIG: f64 = 1e150;
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    let mut log_scale = 0.0;
    if n == 1 {
        return (cur, prev, 0.0);
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
    }
    (cur, prev, log_scale)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix;
/// `off[i]` couples rows `i` and `i + 1`. Eigenvalues replace `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NoConvergence(format!(
                    "tridiagonal QL stalled on eigenvalue {l} of {n}"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn integrates_monomials_exactly() {
        for n in [1, 2, 5, 64] {
            let rule = LaguerreRule::new(n).unwrap();
            for k in 0..(2 * n as u32).min(20) {
                let [got] = rule.integrate(|x| [x.powi(k as i32)]);
                let want = factorial(k);
                assert!((got - want).abs() <= 1e-12 * want, "n={n} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn two_point_rule_matches_closed_form() {
        let rule = LaguerreRule::new(2).unwrap();
        let s = 2f64.sqrt();
        assert!((rule.nodes[0] - (2.0 - s)).abs() < 1e-15);
        assert!((rule.nodes[1] - (2.0 + s)).abs() < 1e-14);
        assert!((rule.weights[0] - (2.0 + s) / 4.0).abs() < 1e-15);
        assert!((rule.weights[1] - (2.0 - s) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn large_rules_are_normalized_and_accurate() {
        for n in [256, 1024] {
            let rule = cached_rule(n);
            assert_eq!(rule.len(), n);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            let [mass, mean] = rule.integrate(|x| [1.0, x]);
            assert!((mass - 1.0).abs() < 5e-13, "n={n}: {mass}");
            assert!((mean - 1.0).abs() < 5e-13, "n={n}: {mean}");
            // int cos(z) e^{-z} dz = 1/2
            let [c] = rule.integrate(|x| [x.cos()]);
            assert!((c - 0.5).abs() < 5e-13, "n={n}: {c}");
        }
    }
}
