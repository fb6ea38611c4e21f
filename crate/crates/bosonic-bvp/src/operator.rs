//! The second order operator D_k acting on H_k-valued fields.
//!
//! Writing <u, D_x> = sum_i u_i d/dx_i and <D_u, D_x> = sum_i d^2/du_i dx_i,
//! the operator is
//!
//! ```text
//! D_k = Delta_x - 4 <u,D_x><D_u,D_x> / (m+2k-2)
//!               + 4 |u|^2 <D_u,D_x>^2 / ((m+2k-2)(m+2k-4)),
//! ```
//!
//! mapping functions F: Omega -> H_k to functions of the same kind.  At
//! k = 0 the u-derivatives die and D_0 = Delta_x; at k = 1 the third term
//! dies on linear-in-u values and D_1 = Delta_x - (4/m) <u,D_x><D_u,D_x>.
//! The denominator m+2k-4 vanishes at (m, k) = (4, 0), where the third
//! term must be structurally zero for the expression to make sense; the
//! code enforces exactly that.
//!
//! Two routes are provided.  [`apply_dk_poly`] applies D_k symbolically to
//! a polynomial in (x, u) and is exact.  [`apply_dk_fd`] acts on a
//! [`FieldHk`], a field known only through its coefficient vector in an
//! orthonormal H_k basis: the x-Hessian of the coefficients comes from
//! central differences on a 1 + 2m^2 point stencil, while all u-structure
//! is evaluated through precomputed derivative polynomials, so the only
//! error is the O(h^2) finite-difference truncation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonic::{expand_in_basis, shared_basis, HarmonicBasis, MultiPoly};
use crate::quadrature::integrate_vec;

/// Apply D_k symbolically.  The ambient dimension is read off the
/// polynomial; k sets the operator constants.
pub fn apply_dk_poly(p: &MultiPoly, k: usize) -> Result<MultiPoly> {
    let m = p.vars();
    if !(3..=8).contains(&m) {
        return Err(Error::DimensionOutOfRange { m, min: 3, max: 8 });
    }
    let d1 = (m + 2 * k) as f64 - 2.0;
    let d2 = (m + 2 * k) as f64 - 4.0;

    let lap = p.laplacian_x();

    let mut mixed = MultiPoly::zero(m);
    for i in 0..m {
        mixed = mixed.add(&p.partial_x(i).partial_u(i));
    }

    let mut term2 = MultiPoly::zero(m);
    for l in 0..m {
        term2 = term2.add(&MultiPoly::u_var(m, l).mul(&mixed.partial_x(l)));
    }

    let mut mixed2 = MultiPoly::zero(m);
    for i in 0..m {
        mixed2 = mixed2.add(&mixed.partial_x(i).partial_u(i));
    }
    let mut u_norm2 = MultiPoly::zero(m);
    for i in 0..m {
        u_norm2 = u_norm2.add(&MultiPoly::u_var(m, i).mul(&MultiPoly::u_var(m, i)));
    }
    let term3 = u_norm2.mul(&mixed2);

    if d2 == 0.0 && !term3.is_zero() {
        return Err(Error::DegenerateOperator { m, k });
    }

    let mut out = lap.sub(&term2.scaled(4.0 / d1));
    if !term3.is_zero() {
        out = out.add(&term3.scaled(4.0 / (d1 * d2)));
    }
    Ok(out)
}

/// Where a field lives; membership is checked before every evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    AllSpace,
    UpperHalfSpace,
    Ball { radius: f64 },
}

impl Domain {
    /// Membership with a required distance to the boundary.
    pub fn contains_with_clearance(&self, x: &[f64], clearance: f64) -> bool {
        match self {
            Domain::AllSpace => true,
            Domain::UpperHalfSpace => x[x.len() - 1] > clearance,
            Domain::Ball { radius } => {
                let r: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                r < radius - clearance
            }
        }
    }
}

type CoefficientFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;

/// An H_k-valued field F(x, u) = sum_j c_j(x) phi_j(u), represented by its
/// coefficient vector in a shared orthonormal basis.
#[derive(Clone)]
pub struct FieldHk {
    basis: Arc<HarmonicBasis>,
    domain: Domain,
    coeffs: Arc<CoefficientFn>,
}

impl FieldHk {
    pub fn from_fn<F>(basis: Arc<HarmonicBasis>, domain: Domain, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        FieldHk {
            basis,
            domain,
            coeffs: Arc::new(f),
        }
    }

    /// Field with x-independent coefficients.
    pub fn constant(basis: Arc<HarmonicBasis>, domain: Domain, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: basis.dimension(),
                got: coeffs.len(),
            });
        }
        Ok(Self::from_fn(basis, domain, move |_| Ok(coeffs.clone())))
    }

    /// Field defined by a polynomial whose u-slices all lie in H_k, with
    /// k read off the u-degree.  The slices are expanded in the basis once,
    /// symbolically, so evaluation is exact.
    pub fn from_poly(p: &MultiPoly, domain: Domain) -> Result<Self> {
        let m = p.vars();
        let k = p.degree_u() as usize;
        let basis = shared_basis(m, k);

        // Group terms by x-exponent and expand each u-slice.
        let mut slices: std::collections::BTreeMap<Box<[u8]>, MultiPoly> =
            std::collections::BTreeMap::new();
        for (mono, &c) in p.terms() {
            let slice = slices
                .entry(mono.x.clone())
                .or_insert_with(|| MultiPoly::zero(m));
            slice.add_term(
                crate::harmonic::Monomial {
                    x: vec![0; m].into_boxed_slice(),
                    u: mono.u.clone(),
                },
                c,
            );
        }
        let t = basis.dimension();
        let mut coeff_polys = vec![MultiPoly::zero(m); t];
        for (x_exp, slice) in &slices {
            let expansion = expand_in_basis(slice, &basis)?;
            for (j, &e) in expansion.iter().enumerate() {
                if e != 0.0 {
                    coeff_polys[j].add_term(
                        crate::harmonic::Monomial {
                            x: x_exp.clone(),
                            u: vec![0; m].into_boxed_slice(),
                        },
                        e,
                    );
                }
            }
        }
        let zero_u = vec![0.0; m];
        Ok(Self::from_fn(basis, domain, move |x| {
            Ok(coeff_polys.iter().map(|cp| cp.eval(x, &zero_u)).collect())
        }))
    }

    pub fn m(&self) -> usize {
        self.basis.m()
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    pub fn basis(&self) -> &Arc<HarmonicBasis> {
        &self.basis
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coefficients_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: x.len(),
            });
        }
        if !self.domain.contains_with_clearance(x, 0.0) {
            return Err(Error::GuardViolation {
                what: "field evaluation point",
                detail: format!("{x:?} lies outside {:?}", self.domain),
            });
        }
        let c = (self.coeffs)(x)?;
        if c.len() != self.basis.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dimension(),
                got: c.len(),
            });
        }
        Ok(c)
    }

    pub fn value_at(&self, x: &[f64], nu: &[f64]) -> Result<f64> {
        let c = self.coefficients_at(x)?;
        let phi = self.basis.eval_all(nu);
        Ok(c.iter().zip(&phi).map(|(a, b)| a * b).sum())
    }

    /// The field x -> F(s x, .), a null solution whenever F is: D_k
    /// commutes with dilations up to the positive factor s^2.
    pub fn scale_argument(&self, s: f64) -> Result<Self> {
        if s <= 0.0 {
            return Err(Error::Config(format!(
                "argument scale must be positive, got {s}"
            )));
        }
        let domain = match self.domain {
            Domain::Ball { radius } => Domain::Ball { radius: radius / s },
            other => other,
        };
        let inner = self.coeffs.clone();
        Ok(FieldHk {
            basis: self.basis.clone(),
            domain,
            coeffs: Arc::new(move |x: &[f64]| {
                let scaled: Vec<f64> = x.iter().map(|a| s * a).collect();
                inner(&scaled)
            }),
        })
    }
}

/// First and second u-derivatives of every basis element, precomputed for
/// the finite-difference route.
pub struct BasisDerivatives {
    m: usize,
    k: usize,
    first: Vec<Vec<MultiPoly>>,
    second: Vec<Vec<Vec<MultiPoly>>>,
}

impl BasisDerivatives {
    pub fn new(basis: &HarmonicBasis) -> Self {
        let m = basis.m();
        let first: Vec<Vec<MultiPoly>> = basis
            .elements()
            .iter()
            .map(|p| (0..m).map(|i| p.partial_u(i)).collect())
            .collect();
        let second = basis
            .elements()
            .iter()
            .enumerate()
            .map(|(j, _)| {
                (0..m)
                    .map(|i| (0..m).map(|l| first[j][i].partial_u(l)).collect())
                    .collect()
            })
            .collect();
        BasisDerivatives {
            m,
            k: basis.k(),
            first,
            second,
        }
    }
}

/// The x-Hessians of every coefficient, from central differences.
fn coefficient_hessians(field: &FieldHk, x: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = field.m();
    if h <= 0.0 {
        return Err(Error::Config(format!("step size must be positive, got {h}")));
    }
    if !field.domain().contains_with_clearance(x, 2.0 * h) {
        return Err(Error::GuardViolation {
            what: "finite-difference stencil",
            detail: format!(
                "point {x:?} is within 2h = {} of the boundary of {:?}",
                2.0 * h,
                field.domain()
            ),
        });
    }
    let t = field.basis().dimension();
    let center = field.coefficients_at(x)?;
    let offset = |di: usize, si: f64, dl: usize, sl: f64| -> Result<Vec<f64>> {
        let mut p = x.to_vec();
        p[di] += si * h;
        p[dl] += sl * h;
        field.coefficients_at(&p)
    };

    let mut hess = vec![vec![vec![0.0; m]; m]; t];
    for i in 0..m {
        let plus = offset(i, 1.0, i, 0.0)?;
        let minus = offset(i, -1.0, i, 0.0)?;
        for j in 0..t {
            hess[j][i][i] = (plus[j] - 2.0 * center[j] + minus[j]) / (h * h);
        }
    }
    for i in 0..m {
        for l in (i + 1)..m {
            let pp = offset(i, 1.0, l, 1.0)?;
            let pm = offset(i, 1.0, l, -1.0)?;
            let mp = offset(i, -1.0, l, 1.0)?;
            let mm = offset(i, -1.0, l, -1.0)?;
            for j in 0..t {
                let v = (pp[j] - pm[j] - mp[j] + mm[j]) / (4.0 * h * h);
                hess[j][i][l] = v;
                hess[j][l][i] = v;
            }
        }
    }
    Ok(hess)
}

fn dk_from_hessians(
    derivs: &BasisDerivatives,
    hess: &[Vec<Vec<f64>>],
    basis: &HarmonicBasis,
    nu: &[f64],
    d1: f64,
    d2: f64,
) -> f64 {
    let m = derivs.m;
    let nu_norm2: f64 = nu.iter().map(|a| a * a).sum();
    let phi = basis.eval_all(nu);
    let mut acc = 0.0;
    for (j, hj) in hess.iter().enumerate() {
        let trace: f64 = (0..m).map(|i| hj[i][i]).sum();
        acc += trace * phi[j];

        let mut t2 = 0.0;
        for l in 0..m {
            for i in 0..m {
                if hj[l][i] != 0.0 {
                    t2 += hj[l][i] * nu[l] * derivs.first[j][i].eval_u(nu);
                }
            }
        }
        acc -= 4.0 / d1 * t2;

        if derivs.k >= 2 {
            let mut t3 = 0.0;
            for i in 0..m {
                for l in 0..m {
                    if hj[i][l] != 0.0 {
                        t3 += hj[i][l] * derivs.second[j][i][l].eval_u(nu);
                    }
                }
            }
            acc += 4.0 / (d1 * d2) * nu_norm2 * t3;
        }
    }
    acc
}

fn operator_denominators(m: usize, k: usize) -> Result<(f64, f64)> {
    let d1 = (m + 2 * k) as f64 - 2.0;
    let d2 = (m + 2 * k) as f64 - 4.0;
    if d2 == 0.0 && k >= 2 {
        return Err(Error::DegenerateOperator { m, k });
    }
    Ok((d1, d2))
}

/// (D_k F)(x, nu) with finite-difference x-derivatives and exact
/// u-structure.  Truncation error is O(h^2).
pub fn apply_dk_fd(
    field: &FieldHk,
    derivs: &BasisDerivatives,
    x: &[f64],
    nu: &[f64],
    h: f64,
) -> Result<f64> {
    assert_eq!(derivs.m, field.m(), "derivative table dimension mismatch");
    assert_eq!(derivs.k, field.k(), "derivative table degree mismatch");
    let (d1, d2) = operator_denominators(field.m(), field.k())?;
    let hess = coefficient_hessians(field, x, h)?;
    Ok(dk_from_hessians(derivs, &hess, field.basis(), nu, d1, d2))
}

/// Coefficient vector of (D_k F)(x, .) in the field's basis, obtained by
/// projecting over a direction sphere rule exact on H_k pairings.
pub fn apply_dk_fd_coeffs(
    field: &FieldHk,
    derivs: &BasisDerivatives,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    assert_eq!(derivs.m, field.m(), "derivative table dimension mismatch");
    assert_eq!(derivs.k, field.k(), "derivative table degree mismatch");
    let (d1, d2) = operator_denominators(field.m(), field.k())?;
    let hess = coefficient_hessians(field, x, h)?;
    let basis = field.basis();
    let rule = crate::kernels::direction_rule(field.m(), field.k())?;
    let t = basis.dimension();
    integrate_vec(&rule, t, |nu, out| {
        let value = dk_from_hessians(derivs, &hess, basis, nu, d1, d2);
        let phi = basis.eval_all(nu);
        for (o, p) in out.iter_mut().zip(&phi) {
            *o = value * p;
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u_var(m: usize, i: usize) -> MultiPoly {
        MultiPoly::u_var(m, i)
    }

    fn x_var(m: usize, i: usize) -> MultiPoly {
        MultiPoly::x_var(m, i)
    }

    #[test]
    fn hand_value_k1() {
        // D_1 (x_1^2 u_1) = -(2/3) u_1 in dimension 3, and 0 in dimension 4.
        let p3 = x_var(3, 0).mul(&x_var(3, 0)).mul(&u_var(3, 0));
        let d3 = apply_dk_poly(&p3, 1).unwrap();
        let expected = u_var(3, 0).scaled(-2.0 / 3.0);
        assert!(d3.sub(&expected).max_abs_coeff() < 1e-14);

        let p4 = x_var(4, 0).mul(&x_var(4, 0)).mul(&u_var(4, 0));
        let d4 = apply_dk_poly(&p4, 1).unwrap();
        assert!(d4.is_zero());
    }

    #[test]
    fn hand_value_k2_engages_all_terms() {
        // D_2 (x_1 x_2 u_1 u_2) in dimension 3:
        //   -(4/15) u_1^2 - (4/15) u_2^2 + (8/15) u_3^2.
        let m = 3;
        let p = x_var(m, 0)
            .mul(&x_var(m, 1))
            .mul(&u_var(m, 0))
            .mul(&u_var(m, 1));
        let d = apply_dk_poly(&p, 2).unwrap();
        let expected = u_var(m, 0)
            .mul(&u_var(m, 0))
            .scaled(-4.0 / 15.0)
            .add(&u_var(m, 1).mul(&u_var(m, 1)).scaled(-4.0 / 15.0))
            .add(&u_var(m, 2).mul(&u_var(m, 2)).scaled(8.0 / 15.0));
        assert!(d.sub(&expected).max_abs_coeff() < 1e-14);
        // The result is again harmonic in u, up to the rounding of the
        // 1/15 coefficients.
        assert!(d.laplacian_u().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn x_constant_fields_are_annihilated() {
        let p = u_var(4, 0).mul(&u_var(4, 1)).scaled(2.5);
        assert!(apply_dk_poly(&p, 2).unwrap().is_zero());
    }

    #[test]
    fn disjoint_variable_null_solution() {
        // (x_1^2 - x_2^2) u_3 u_4 in dimension 5: harmonic in x, and the
        // mixed term dies because the x- and u-variables are disjoint.
        let m = 5;
        let p = x_var(m, 0)
            .mul(&x_var(m, 0))
            .sub(&x_var(m, 1).mul(&x_var(m, 1)))
            .mul(&u_var(m, 2))
            .mul(&u_var(m, 3));
        assert!(apply_dk_poly(&p, 2).unwrap().is_zero());
    }

    #[test]
    fn maxwell_reduction_at_k1() {
        // On linear-in-u values D_1 = Delta_x - (4/m) <u,D_x><D_u,D_x>.
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for m in 3..=5 {
            for _ in 0..10 {
                let mut p = MultiPoly::zero(m);
                for _ in 0..6 {
                    let mut term = u_var(m, rng.gen_range(0..m));
                    for _ in 0..rng.gen_range(0..4usize) {
                        term = term.mul(&x_var(m, rng.gen_range(0..m)));
                    }
                    p = p.add(&term.scaled(rng.gen_range(-1.0..1.0)));
                }
                let full = apply_dk_poly(&p, 1).unwrap();
                let mut mixed = MultiPoly::zero(m);
                for i in 0..m {
                    mixed = mixed.add(&p.partial_x(i).partial_u(i));
                }
                let mut advect = MultiPoly::zero(m);
                for l in 0..m {
                    advect = advect.add(&u_var(m, l).mul(&mixed.partial_x(l)));
                }
                let reduced = p.laplacian_x().sub(&advect.scaled(4.0 / m as f64));
                assert!(full.sub(&reduced).max_abs_coeff() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_denominator_is_refused() {
        // (m, k) = (4, 0) kills m+2k-4; fine on u-constant polynomials,
        // refused when the third term would actually fire.
        let constant_in_u = x_var(4, 0).mul(&x_var(4, 0));
        assert!(apply_dk_poly(&constant_in_u, 0).is_ok());

        let coupled = x_var(4, 0)
            .mul(&x_var(4, 1))
            .mul(&u_var(4, 0))
            .mul(&u_var(4, 1));
        assert!(matches!(
            apply_dk_poly(&coupled, 0),
            Err(Error::DegenerateOperator { m: 4, k: 0 })
        ));
    }

    #[test]
    fn operator_is_linear() {
        let m = 3;
        let p = x_var(m, 0).mul(&x_var(m, 2)).mul(&u_var(m, 1));
        let q = x_var(m, 1)
            .mul(&x_var(m, 1))
            .mul(&x_var(m, 1))
            .mul(&u_var(m, 0));
        let lhs = apply_dk_poly(&p.scaled(2.0).add(&q.scaled(-3.0)), 1).unwrap();
        let rhs = apply_dk_poly(&p, 1)
            .unwrap()
            .scaled(2.0)
            .add(&apply_dk_poly(&q, 1).unwrap().scaled(-3.0));
        assert!(lhs.sub(&rhs).max_abs_coeff() < 1e-12);
    }

    #[test]
    fn field_from_poly_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let m = 3;
        // (x_1^2 - x_3^2) (u_1 u_2) + x_2 (u_1^2 - u_3^2): all slices in H_2.
        let p = x_var(m, 0)
            .mul(&x_var(m, 0))
            .sub(&x_var(m, 2).mul(&x_var(m, 2)))
            .mul(&u_var(m, 0))
            .mul(&u_var(m, 1))
            .add(
                &x_var(m, 1).mul(&u_var(m, 0).mul(&u_var(m, 0)).sub(&u_var(m, 2).mul(&u_var(m, 2)))),
            );
        let field = FieldHk::from_poly(&p, Domain::AllSpace).unwrap();
        assert_eq!(field.k(), 2);
        for _ in 0..20 {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let nu: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert_relative_eq!(
                field.value_at(&x, &nu).unwrap(),
                p.eval(&x, &nu),
                epsilon = 1e-11,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn field_from_poly_rejects_bad_slices() {
        let m = 3;
        // |u|^2 slice is not harmonic.
        let mut p = MultiPoly::zero(m);
        for i in 0..m {
            p = p.add(&u_var(m, i).mul(&u_var(m, i)));
        }
        p = p.mul(&x_var(m, 0));
        assert!(matches!(
            FieldHk::from_poly(&p, Domain::AllSpace),
            Err(Error::NotInSpan { .. })
        ));
    }

    #[test]
    fn field_domain_guards() {
        let basis = shared_basis(3, 1);
        let field = FieldHk::constant(
            basis,
            Domain::Ball { radius: 1.0 },
            vec![1.0, 0.0, 0.0],
        )
        .unwrap();
        assert!(field.value_at(&[0.2, 0.0, 0.0], &[1.0, 0.0, 0.0]).is_ok());
        assert!(matches!(
            field.value_at(&[1.2, 0.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::GuardViolation { .. })
        ));
    }

    #[test]
    fn fd_matches_symbolic_operator() {
        let m = 3;
        // A non-null field with genuine fourth order x-dependence.
        let p = x_var(m, 0)
            .mul(&x_var(m, 0))
            .mul(&x_var(m, 0))
            .mul(&x_var(m, 0))
            .mul(&u_var(m, 1))
            .add(&x_var(m, 0).mul(&x_var(m, 1)).mul(&u_var(m, 2)));
        let field = FieldHk::from_poly(&p, Domain::AllSpace).unwrap();
        let derivs = BasisDerivatives::new(field.basis());
        let exact_poly = apply_dk_poly(&p, 1).unwrap();

        let x = [0.7, -0.3, 0.4];
        let nu = [0.5, 0.2, -0.8];
        let exact = exact_poly.eval(&x, &nu);
        let coarse = apply_dk_fd(&field, &derivs, &x, &nu, 0.02).unwrap();
        let fine = apply_dk_fd(&field, &derivs, &x, &nu, 0.01).unwrap();
        let ratio = (coarse - exact).abs() / (fine - exact).abs();
        assert!(
            (3.5..=4.5).contains(&ratio),
            "second order convergence broken: ratio {ratio}"
        );
        assert_relative_eq!(fine, exact, epsilon = 1e-3, max_relative = 1e-3);
    }

    #[test]
    fn fd_coeffs_vanish_on_structural_null_solution() {
        // Null solution of x-degree 2: central differences are exact, so
        // the coefficient residual is rounding noise.
        let m = 3;
        let p = x_var(m, 0)
            .mul(&x_var(m, 0))
            .sub(&x_var(m, 1).mul(&x_var(m, 1)))
            .mul(&u_var(m, 2));
        assert!(apply_dk_poly(&p, 1).unwrap().is_zero());
        let field = FieldHk::from_poly(&p, Domain::AllSpace).unwrap();
        let derivs = BasisDerivatives::new(field.basis());
        let coeffs = apply_dk_fd_coeffs(&field, &derivs, &[0.3, -0.6, 0.2], 0.05).unwrap();
        let norm: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(norm < 1e-10, "residual norm {norm:e}");
    }

    #[test]
    fn fd_stencil_respects_domain_clearance() {
        let basis = shared_basis(3, 1);
        let field = FieldHk::constant(basis, Domain::UpperHalfSpace, vec![1.0, 0.0, 0.0]).unwrap();
        let derivs = BasisDerivatives::new(field.basis());
        let low = apply_dk_fd(&field, &derivs, &[0.0, 0.0, 0.015], &[1.0, 0.0, 0.0], 0.01);
        assert!(matches!(low, Err(Error::GuardViolation { .. })));
        let ok = apply_dk_fd(&field, &derivs, &[0.0, 0.0, 0.5], &[1.0, 0.0, 0.0], 0.01);
        assert_relative_eq!(ok.unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn scaled_argument_stays_null() {
        let m = 3;
        let p = x_var(m, 0)
            .mul(&x_var(m, 0))
            .sub(&x_var(m, 1).mul(&x_var(m, 1)))
            .mul(&u_var(m, 2));
        let field = FieldHk::from_poly(&p, Domain::Ball { radius: 1.0 }).unwrap();
        let shrunk = field.scale_argument(2.0).unwrap();
        assert_eq!(shrunk.domain(), Domain::Ball { radius: 0.5 });
        let x = [0.1, 0.05, -0.2];
        let nu = [0.4, 0.1, 0.6];
        let direct = p.eval(&[0.2, 0.1, -0.4], &nu);
        assert_relative_eq!(shrunk.value_at(&x, &nu).unwrap(), direct, epsilon = 1e-12);
    }
}
