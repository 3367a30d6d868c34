//! ln|S(z)/(z − λ_i)| on a small disc around a node, by splitting the
//! nodes into a near set multiplied out directly and a far set whose
//! contribution is a short Taylor series about λ_i.

use num_complex::Complex64;

use super::GenFnEvaluator;

/// Far-field Taylor order. With disc radius ρ ≤ NEAR_RADIUS/10 the
/// truncation error is below (1/10)^{ORDER+1} per unit of far-node density.
const ORDER: usize = 14;
const NEAR_RADIUS: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct LocalExpansion<'a> {
    ev: &'a GenFnEvaluator,
    centre: Complex64,
    near: Vec<Complex64>,
    /// Far-field value at the centre, less the ln|λ| normalisations of the
    /// near factors and of the cancelled one.
    constant: f64,
    /// c_m = −(1/m) Σ_far (λ_k − centre)^{−m}, m = 1..=ORDER.
    coeffs: [Complex64; ORDER],
    radius: f64,
}

impl<'a> LocalExpansion<'a> {
    /// Expansion about node `i` valid for |z − λ_i| ≤ `radius`.
    pub fn new(ev: &'a GenFnEvaluator, i: usize, radius: f64) -> Self {
        let nodes = ev.sequence().nodes();
        let centre = nodes[i].position;
        let near_radius = NEAR_RADIUS.max(10.0 * radius);
        let mut near = Vec::new();
        let mut constant = 0.0;
        let mut coeffs = [Complex64::new(0.0, 0.0); ORDER];
        for (k, n) in nodes.iter().enumerate() {
            let lambda = n.position;
            let at_origin = lambda == Complex64::new(0.0, 0.0);
            let diff = lambda - centre;
            if k == i || diff.norm() < near_radius {
                if !at_origin {
                    constant -= lambda.norm().ln();
                }
                if k != i {
                    near.push(lambda);
                }
                continue;
            }
            // ln|λ − c| − ln|λ|, kept small by forming it as one ratio.
            constant += if at_origin {
                centre.norm().ln()
            } else {
                (diff / lambda).norm().ln()
            };
            let inv = 1.0 / diff;
            let mut pow = inv;
            for (m, c) in coeffs.iter_mut().enumerate() {
                *c -= pow / (m as f64 + 1.0);
                pow *= inv;
            }
        }
        LocalExpansion {
            ev,
            centre,
            near,
            constant,
            coeffs,
            radius,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// ln|S(z)/(z − λ_i)| for |z − λ_i| ≤ radius.
    pub fn ln_abs_cancelled(&self, z: Complex64) -> f64 {
        let h = z - self.centre;
        // Forming z = centre + h rounds at the scale of |centre|.
        debug_assert!(
            h.norm() <= self.radius * (1.0 + 1e-12) + 8.0 * f64::EPSILON * self.centre.norm()
        );
        let mut series = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            series = (series + c) * h;
        }
        // The near factors are multiplied in pieces to stay in range.
        let mut near = 0.0;
        let mut prod = 1.0;
        for (t, &lambda) in self.near.iter().enumerate() {
            prod *= (lambda - z).norm();
            if t % 32 == 31 {
                near += prod.ln();
                prod = 1.0;
            }
        }
        near += prod.ln();
        let tail = self
            .ev
            .tail
            .as_ref()
            .and_then(|t| t.log_tail(z))
            .map_or(0.0, |w| w.re);
        self.constant + series.re + near + tail
    }
}
