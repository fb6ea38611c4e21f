//! Quadrature rules for the boundary and volume integrals.
//!
//! Everything is assembled from Gauss rules on an interval.  Spheres use
//! the classical product construction: with u = (sqrt(1-t^2) w, t) for
//! w in S^{m-2},
//!
//! ```text
//! ∫_{S^{m-1}} f dS = ∫_{-1}^{1} (1-t^2)^{(m-3)/2} ∫_{S^{m-2}} f(sqrt(1-t^2) w, t) dS(w) dt,
//! ```
//!
//! so a Gauss-Jacobi rule in t (weight exponents (m-3)/2 on both ends)
//! stacked over a recursive S^{m-2} rule integrates every polynomial up to
//! the requested degree exactly.  The recursion bottoms out at the circle,
//! where equally spaced points are Gauss-optimal, and at S^0 = {-1, +1}.
//!
//! Hyperplane integrals over R^{m-1} go through polar coordinates with the
//! radial map r = s/(1-s), which takes Gauss-Legendre nodes on [0,1] to a
//! rule that handles algebraically decaying integrands; the ball uses a
//! Gauss-Jacobi radial factor carrying the r^{m-1} weight exactly.
//!
//! Every integration happens by evaluating all nodes (in parallel) into an
//! index-ordered buffer and then summing pairwise in a fixed order, so
//! results are bit-identical across thread counts.  Rule sizes are capped
//! by a node budget, overridable through the `BOSONIC_BVP_BUDGET`
//! environment variable.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonic::gamma_half;

const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Node cap for rule construction, from `BOSONIC_BVP_BUDGET` when set.
pub fn node_budget() -> Result<usize> {
    match std::env::var("BOSONIC_BVP_BUDGET") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("BOSONIC_BVP_BUDGET must be an integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn check_budget(needed: usize, budget: usize) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Nodes and weights for one integral; nodes are stored flat with stride
/// `dim`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    description: String,
}

impl QuadratureRule {
    fn with_capacity(dim: usize, n: usize, description: String) -> Self {
        QuadratureRule {
            dim,
            nodes: Vec::with_capacity(dim * n),
            weights: Vec::with_capacity(n),
            description,
        }
    }

    fn push(&mut self, node: &[f64], weight: f64) {
        debug_assert_eq!(node.len(), self.dim);
        self.nodes.extend_from_slice(node);
        self.weights.push(weight);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        (0..self.len()).map(move |i| (self.node(i), self.weights[i]))
    }
}

fn as_doubled_half_integer(x: f64, what: &str) -> Result<i64> {
    let d = (2.0 * x).round();
    if (2.0 * x - d).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "{what} must be a half-integer, got {x}"
        )));
    }
    Ok(d as i64)
}

/// Gauss-Jacobi rule on [-1, 1] with weight (1-x)^alpha (1+x)^beta, by
/// Golub-Welsch on the symmetrized recurrence matrix.  Exponents are
/// restricted to half-integers > -1 so the weight-function mass comes out
/// of exact Gamma recurrences instead of a Gamma approximation; every rule
/// in this crate has integer or half-integer exponents.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Config("quadrature order must be positive".into()));
    }
    let a2 = as_doubled_half_integer(alpha, "jacobi exponent alpha")?;
    let b2 = as_doubled_half_integer(beta, "jacobi exponent beta")?;
    if a2 <= -2 || b2 <= -2 {
        return Err(Error::Config(format!(
            "jacobi exponents must exceed -1, got ({alpha}, {beta})"
        )));
    }
    // mu_0 = 2^(a+b+1) Gamma(a+1) Gamma(b+1) / Gamma(a+b+2).
    let mu0 = 2f64.powf(alpha + beta + 1.0) * gamma_half((a2 + 2) as u64)
        * gamma_half((b2 + 2) as u64)
        / gamma_half((a2 + b2 + 4) as u64);

    let ab = alpha + beta;
    let diag = |k: usize| -> f64 {
        if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            let kf = k as f64;
            let d = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
            (beta * beta - alpha * alpha) / d
        }
    };
    let off = |k: usize| -> f64 {
        // b_k for the monic recurrence; the matrix entry is its square root.
        let kf = k as f64;
        let b = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
        };
        b.sqrt()
    };

    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = diag(k);
        if k + 1 < n {
            let o = off(k + 1);
            jacobi[(k, k + 1)] = o;
            jacobi[(k + 1, k)] = o;
        }
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let first = eig.eigenvectors[(0, j)];
            (node, mu0 * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Rule on S^{m-1} exact for polynomials of total degree <= `degree`.
pub fn sphere_rule(m: usize, degree: u32) -> Result<QuadratureRule> {
    sphere_rule_with_budget(m, degree, node_budget()?)
}

pub(crate) fn sphere_rule_with_budget(
    m: usize,
    degree: u32,
    budget: usize,
) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::DimensionOutOfRange { m, min: 1, max: 16 });
    }
    if m == 1 {
        let mut rule =
            QuadratureRule::with_capacity(1, 2, "S^0 two-point rule".to_string());
        rule.push(&[-1.0], 1.0);
        rule.push(&[1.0], 1.0);
        return Ok(rule);
    }
    if m == 2 {
        // N equally spaced points integrate trigonometric degree N-1.
        let n = degree as usize + 1;
        check_budget(n, budget)?;
        let mut rule = QuadratureRule::with_capacity(
            2,
            n,
            format!("S^1 equispaced rule, degree {degree} ({n} points)"),
        );
        let w = 2.0 * std::f64::consts::PI / n as f64;
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            rule.push(&[theta.cos(), theta.sin()], w);
        }
        return Ok(rule);
    }

    let nt = (degree as usize + 2) / 2; // ceil((degree+1)/2): exactness 2nt-1 >= degree
    let exponent = (m as f64 - 3.0) / 2.0;
    let (tn, tw) = gauss_jacobi(nt, exponent, exponent)?;
    let sub = sphere_rule_with_budget(m - 1, degree, budget)?;
    let total = nt * sub.len();
    check_budget(total, budget)?;

    let mut rule = QuadratureRule::with_capacity(
        m,
        total,
        format!("S^{} product rule, degree {degree} ({total} points)", m - 1),
    );
    let mut node = vec![0.0; m];
    for (i, &t) in tn.iter().enumerate() {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for j in 0..sub.len() {
            let w = sub.node(j);
            for (slot, &wc) in node[..m - 1].iter_mut().zip(w) {
                *slot = s * wc;
            }
            node[m - 1] = t;
            rule.push(&node, tw[i] * sub.weight(j));
        }
    }
    Ok(rule)
}

/// Rule on the unit ball B^m exact for polynomials of degree <= `degree`.
/// The radial factor r^{m-1} is carried by a Gauss-Jacobi weight.
pub fn ball_rule(m: usize, degree: u32) -> Result<QuadratureRule> {
    let budget = node_budget()?;
    let nr = (degree as usize + 2) / 2;
    // ∫_0^1 r^{m-1} g(r) dr = 2^{-m} ∫_{-1}^1 (1+x)^{m-1} g((1+x)/2) dx.
    let (xn, xw) = gauss_jacobi(nr, 0.0, (m - 1) as f64)?;
    let sphere = sphere_rule_with_budget(m, degree, budget)?;
    let total = nr * sphere.len();
    check_budget(total, budget)?;

    let scale = 2f64.powi(-(m as i32));
    let mut rule = QuadratureRule::with_capacity(
        m,
        total,
        format!("B^{m} product rule, degree {degree} ({total} points)"),
    );
    let mut node = vec![0.0; m];
    for (i, &x) in xn.iter().enumerate() {
        let r = (x + 1.0) / 2.0;
        let wr = xw[i] * scale;
        for j in 0..sphere.len() {
            let omega = sphere.node(j);
            for (slot, &oc) in node.iter_mut().zip(omega) {
                *slot = r * oc;
            }
            rule.push(&node, wr * sphere.weight(j));
        }
    }
    Ok(rule)
}

/// Rule over R^{m-1} (the flat boundary of the upper half-space in R^m)
/// in polar coordinates, with the radial half-line mapped by r = s/(1-s).
/// Suited to smooth integrands decaying at least like |t|^{-(m-1)-eps}.
pub fn hyperplane_rule(m: usize, radial_order: usize, angular_degree: u32) -> Result<QuadratureRule> {
    if m < 2 {
        return Err(Error::DimensionOutOfRange { m, min: 2, max: 16 });
    }
    let budget = node_budget()?;
    let (sn, sw) = gauss_legendre(radial_order)?;
    let angular = sphere_rule_with_budget(m - 1, angular_degree, budget)?;
    let total = radial_order * angular.len();
    check_budget(total, budget)?;

    let d = m - 1;
    let mut rule = QuadratureRule::with_capacity(
        d,
        total,
        format!("R^{d} polar rule, radial {radial_order} x angular degree {angular_degree} ({total} points)"),
    );
    let mut node = vec![0.0; d];
    for (i, &x) in sn.iter().enumerate() {
        let s = (x + 1.0) / 2.0;
        let r = s / (1.0 - s);
        // dt = r^{m-2} dr dS(w), dr = ds/(1-s)^2, ds = dx/2.
        let wr = 0.5 * sw[i] * r.powi(m as i32 - 2) / ((1.0 - s) * (1.0 - s));
        for j in 0..angular.len() {
            let w = angular.node(j);
            for (slot, &wc) in node.iter_mut().zip(w) {
                *slot = r * wc;
            }
            rule.push(&node, wr * angular.weight(j));
        }
    }
    Ok(rule)
}

/// Sum in a fixed pairwise order; deterministic and accurate to O(log n)
/// rounding growth.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn find_non_finite(rule: &QuadratureRule, values: &[f64], stride: usize) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        let index = pos / stride;
        return Err(Error::NonFiniteSample {
            index,
            coords: rule.node(index).to_vec(),
        });
    }
    Ok(())
}

/// Integrate a scalar integrand.  Nodes are evaluated in parallel into an
/// index-ordered buffer; the reduction is sequential pairwise summation.
pub fn integrate<F>(rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = (0..rule.len())
        .into_par_iter()
        .map(|i| f(rule.node(i)) * rule.weight(i))
        .collect();
    find_non_finite(rule, &values, 1)?;
    Ok(pairwise_sum(&values))
}

/// Integrate an R^nout-valued integrand componentwise, sharing one
/// evaluation sweep.  The closure writes into a zeroed output slice.
pub fn integrate_vec<F>(rule: &QuadratureRule, nout: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let values: Vec<f64> = (0..rule.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = vec![0.0; nout];
            f(rule.node(i), &mut out);
            let w = rule.weight(i);
            out.iter_mut().for_each(|v| *v *= w);
            out
        })
        .collect();
    find_non_finite(rule, &values, nout)?;
    let mut component = vec![0.0; rule.len()];
    let mut result = vec![0.0; nout];
    for (c, slot) in result.iter_mut().enumerate() {
        for i in 0..rule.len() {
            component[i] = values[i * nout + c];
        }
        *slot = pairwise_sum(&component);
    }
    Ok(result)
}
