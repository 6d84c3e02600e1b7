//! Composite Gauss–Legendre rules with explicit panel breaks.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

pub struct Composite {
    rule: GaussLegendre,
    subpanels: usize,
}

impl Composite {
    pub fn new(degree: usize, subpanels: usize) -> Self {
        let degree = NonZeroUsize::new(degree.max(1)).expect("nonzero");
        Self { rule: GaussLegendre::new(degree), subpanels: subpanels.max(1) }
    }

    /// `∫_{breaks[0]}^{breaks[last]} f`, each panel split into equal subpanels.
    pub fn integrate(&self, breaks: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / self.subpanels as f64;
            for j in 0..self.subpanels {
                let a = w[0] + j as f64 * h;
                total += self.rule.integrate(a, a + h, &mut f);
            }
        }
        total
    }

    /// Quadrature nodes of [`integrate`](Self::integrate), for pointwise checks.
    pub fn nodes(&self, breaks: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / self.subpanels as f64;
            for j in 0..self.subpanels {
                let a = w[0] + j as f64 * h;
                out.extend(self.rule.nodes().map(|x| a + 0.5 * h * (x + 1.0)));
            }
        }
        out
    }
}
