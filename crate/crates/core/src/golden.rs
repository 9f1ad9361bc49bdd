//! Golden-section search for unimodal scalar functions.

/// `(sqrt(5) - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenSection {
    /// Stop once the bracket is narrower than `rel_tol * (1 + initial width)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for GoldenSection {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    /// Midpoint of the final bracket.
    pub x: f64,
    pub fx: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl GoldenSection {
    pub fn new(rel_tol: f64, max_iter: usize) -> Self {
        Self { rel_tol, max_iter }
    }

    /// Minimizes `f` on `[lo, hi]`. The function is assumed unimodal on the
    /// bracket; otherwise a local minimum is returned.
    pub fn minimize<F>(&self, mut f: F, lo: f64, hi: f64) -> Minimum
    where
        F: FnMut(f64) -> f64,
    {
        self.minimize_bracketed(|x, _| f(x), lo, hi)
    }

    /// Like [`minimize`](Self::minimize), but `f` also receives the current
    /// lower end of the bracket. Every later evaluation point lies at or
    /// above it.
    pub fn minimize_bracketed<F>(&self, mut f: F, lo: f64, hi: f64) -> Minimum
    where
        F: FnMut(f64, f64) -> f64,
    {
        let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let tol = self.rel_tol * (1.0 + (b - a));
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = f(c, a);
        let mut fd = f(d, a);
        let mut evaluations = 2;
        let mut iterations = 0;

        while b - a > tol && iterations < self.max_iter {
            iterations += 1;
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = f(c, a);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = f(d, a);
            }
            evaluations += 1;
        }

        let x = 0.5 * (a + b);
        let fx = f(x, a);
        Minimum { x, fx, lo: a, hi: b, iterations, evaluations: evaluations + 1 }
    }
}
