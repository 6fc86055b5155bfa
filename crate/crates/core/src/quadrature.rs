//! Gauss–Legendre rules: single panel, composite, and a mapped rule for the
//! half line. "Order" throughout means the total number of nodes.

use serde::{Deserialize, Serialize};

/// Nodes per panel in composite rules.
pub const PANEL_ORDER: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// How a rule was built; recorded in kernel/report metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    Composite { lower: f64, upper: f64, panels: usize, per_panel: usize },
    HalfLine { start: f64, scale: f64, panels: usize, per_panel: usize },
    /// Composite rule with panel edges at supplied breakpoints, optionally
    /// continued by a half-line rule from `upper`.
    Graded { upper: f64, panels: usize, per_panel: usize, half_line_tail: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl Rule {
    /// Composite Gauss–Legendre on `[a, b]` with about `order` nodes in total.
    pub fn composite(a: f64, b: f64, order: usize) -> Self {
        let per_panel = order.clamp(1, PANEL_ORDER);
        let panels = order.div_ceil(per_panel).max(1);
        let (x, w) = gauss_legendre(per_panel);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * per_panel);
        let mut weights = Vec::with_capacity(panels * per_panel);
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights, kind: RuleKind::Composite { lower: a, upper: b, panels, per_panel } }
    }

    /// Rule for `∫₀^∞`, via `ω = s·u/(1 − u)` with composite Gauss–Legendre in
    /// `u ∈ [0, 1]`. Suited to smooth, non-oscillatory integrands decaying at
    /// least like ω⁻².
    pub fn half_line(scale: f64, order: usize) -> Self {
        Self::half_line_from(0.0, scale, order)
    }

    /// Half-line rule for `∫_start^∞`.
    pub fn half_line_from(start: f64, scale: f64, order: usize) -> Self {
        let base = Self::composite(0.0, 1.0, order);
        let (panels, per_panel) = match base.kind {
            RuleKind::Composite { panels, per_panel, .. } => (panels, per_panel),
            _ => unreachable!(),
        };
        let mut nodes = Vec::with_capacity(base.nodes.len());
        let mut weights = Vec::with_capacity(base.nodes.len());
        for (u, w) in base.nodes.iter().zip(&base.weights) {
            let one_minus = 1.0 - u;
            nodes.push(start + scale * u / one_minus);
            weights.push(w * scale / (one_minus * one_minus));
        }
        Self { nodes, weights, kind: RuleKind::HalfLine { start, scale, panels, per_panel } }
    }

    /// Composite rule on `[0, upper]` whose panel edges include every
    /// breakpoint inside the interval. Panels have width at most
    /// `upper·PANEL_ORDER/order`, so `order` is a lower bound on the node count.
    pub fn graded(breakpoints: &[f64], upper: f64, order: usize) -> Self {
        let mut edges: Vec<f64> = breakpoints.iter().copied().filter(|b| *b > 0.0 && *b < upper).collect();
        edges.push(0.0);
        edges.push(upper);
        edges.sort_by(|a, b| a.total_cmp(b));
        edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * upper);
        let per_panel = PANEL_ORDER;
        let h_max = upper * per_panel as f64 / order.max(per_panel) as f64;
        let (x, w) = gauss_legendre(per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut panels = 0;
        for seg in edges.windows(2) {
            let n = ((seg[1] - seg[0]) / h_max).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / n as f64;
            for p in 0..n {
                let lo = seg[0] + h * p as f64;
                for (xi, wi) in x.iter().zip(&w) {
                    nodes.push(lo + 0.5 * h * (xi + 1.0));
                    weights.push(0.5 * h * wi);
                }
            }
            panels += n;
        }
        Self { nodes, weights, kind: RuleKind::Graded { upper, panels, per_panel, half_line_tail: false } }
    }

    /// `graded` on `[0, upper]` followed by a half-line rule on `[upper, ∞)`.
    pub fn graded_with_tail(breakpoints: &[f64], upper: f64, order: usize) -> Self {
        let mut rule = Self::graded(breakpoints, upper, order);
        let tail = Self::half_line_from(upper, upper, order / 2);
        rule.nodes.extend(tail.nodes);
        rule.weights.extend(tail.weights);
        if let RuleKind::Graded { half_line_tail, .. } = &mut rule.kind {
            *half_line_tail = true;
        }
        rule
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Settings for adaptive frequency quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Stop doubling once the relative change drops below this.
    pub rtol: f64,
    pub start_order: usize,
    pub max_order: usize,
    /// Explicit upper frequency; otherwise taken from the model.
    pub cutoff: Option<f64>,
    /// Upper frequency as a multiple of the model frequency scale, for models
    /// without finite support.
    pub cutoff_factor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rtol: 1e-7, start_order: 512, max_order: 8192, cutoff: None, cutoff_factor: 50.0 }
    }
}

/// `∫_z^∞ sin(x)/x dx` for `z ≥ 0`.
pub fn sine_integral_tail(z: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    if z <= 0.0 {
        return FRAC_PI_2;
    }
    if z < 4.0 {
        // Si(z) by its power series.
        let mut term = z;
        let mut sum = z;
        let z2 = z * z;
        for n in 1..60 {
            let nf = n as f64;
            term *= -z2 / ((2.0 * nf) * (2.0 * nf + 1.0));
            let add = term / (2.0 * nf + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return FRAC_PI_2 - sum;
    }
    // E1(iz) by its continued fraction (modified Lentz); the tail is -Im E1(iz).
    use num_complex::Complex64;
    let w = Complex64::new(0.0, z);
    let tiny = Complex64::new(1e-300, 0.0);
    let mut b = w + 1.0;
    let mut cc = Complex64::new(1e300, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        if d.norm() == 0.0 {
            d = tiny;
        }
        cc = b + a / cc;
        if cc.norm() == 0.0 {
            cc = tiny;
        }
        let del = cc * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let e1 = Complex64::from_polar(1.0, -z) * h;
    -e1.im
}

/// `∫_Ω^∞ sin(ωt)/ω³ dω`.
pub fn sin_tail_cubic(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let z = omega * t.abs();
    let s = t.signum();
    s * t * t * (z.sin() / (2.0 * z * z) + z.cos() / (2.0 * z) - 0.5 * sine_integral_tail(z))
}

/// `∫_Ω^∞ cos(ωt)/ω² dω`.
pub fn cos_tail_square(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0 / omega;
    }
    let z = omega * t.abs();
    t.abs() * (z.cos() / z - sine_integral_tail(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_nodes() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-16);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials() {
        for n in [1usize, 4, 17, 32, 64] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_oscillatory() {
        let r = Rule::composite(0.0, 10.0, 512);
        let v = r.integrate(|x| (20.0 * x).sin());
        let exact = (1.0 - (200.0f64).cos()) / 20.0;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn sine_integral_values() {
        // Si(1) = 0.946083070367183, Si(10) = 1.658347594218874
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((half_pi - sine_integral_tail(1.0) - 0.946083070367183).abs() < 1e-14);
        assert!((half_pi - sine_integral_tail(10.0) - 1.658347594218874).abs() < 1e-14);
        assert!((sine_integral_tail(3.999999) - sine_integral_tail(4.000001)).abs() < 1e-6);
    }

    #[test]
    fn trig_tails_match_quadrature() {
        for t in [0.0, 0.01, 0.7, 3.0] {
            let omega = 5.0;
            let far = 2.0e4;
            let r = Rule::composite(omega, far, 1 << 18);
            // Leading asymptotic remainder beyond `far`.
            let (cos_rest, sin_rest) = if t == 0.0 {
                (1.0 / far, 0.0)
            } else {
                (-(far * t).sin() / (t * far * far) + 2.0 * (far * t).cos() / (t * t * far.powi(3)), (far * t).cos() / (t * far.powi(3)))
            };
            let direct = r.integrate(|w| (w * t).cos() / (w * w)) + cos_rest;
            assert!((direct - cos_tail_square(omega, t)).abs() < 1e-9, "t={t}");
            let direct = r.integrate(|w| (w * t).sin() / (w * w * w)) + sin_rest;
            assert!((direct - sin_tail_cubic(omega, t)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn graded_rule_respects_breakpoints() {
        let r = Rule::graded(&[1.0, 1.05, 7.0], 10.0, 256);
        let v = r.integrate(|x| 0.05 / ((x - 1.02).powi(2) + 0.0025));
        let exact = (8.98f64 / 0.05).atan() + (1.02f64 / 0.05).atan();
        assert!((v - exact).abs() < 1e-10);
        let r = Rule::graded_with_tail(&[1.0], 4.0, 512);
        let v = r.integrate(|x| 1.0 / (1.0 + x * x));
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn half_line_lorentzian() {
        let r = Rule::half_line(1.0, 256);
        let v = r.integrate(|x| 1.0 / (1.0 + x * x));
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
