//! Poisson kernels on the upper half-space and the unit ball.
//!
//! With x = (x', y) in the open upper half-space, t = (t', 0) on its
//! boundary, u on the unit sphere, and v in the closed unit ball, the
//! half-space kernel is
//!
//! ```text
//! P_H(x, t, u, v) = c_{m,k} (y / |x-t|^m) Z_k( (x-t) u (x-t) / |x-t|^2, v ),
//! c_{m,k} = 2 (m + 2k - 2) / ((m-2) omega_m),
//! ```
//!
//! where the inner argument is the Clifford sandwich, i.e. the reflection
//! of u across x - t.  Its two moment identities are the load-bearing
//! facts checked here by quadrature:
//!
//! * reproducing: c_{m,k} ∫ (y/|x|^m) p((x u x)/|x|^2) dx' = p(u) for
//!   every p in H_k, independently of the height y,
//! * zonal mass: ∫ P_H(x, t, u, v) dt' = Z_k(u, v).
//!
//! The ball kernel is the conformal image of P_H under the Cayley
//! transform and carries half the constant:
//!
//! ```text
//! P_B(x, zeta, omega, v) = (c_{m,k}/2) ((1-|x|^2)/|x-zeta|^m)
//!                          Z_k( (x-zeta) omega (x-zeta) / |x-zeta|^2, v ).
//! ```
//!
//! At k = 0 both collapse (after the direction-sphere integration) to the
//! classical harmonic Poisson kernels, which pins the constants.

use crate::clifford::sandwich;
use crate::error::{Error, Result};
use crate::harmonic::{surface_area, MultiPoly};
use crate::quadrature::{gauss_legendre, integrate, sphere_rule, QuadratureRule};
use crate::zonal::ZonalKernel;

/// Closest approach to the kernel singularity before evaluation refuses.
const SINGULARITY_EPS: f64 = 1e-12;

/// Default clearance from the sphere for ball-kernel evaluation points.
pub const DEFAULT_BALL_MARGIN: f64 = 1e-3;

/// The constants shared by both kernels.
#[derive(Clone, Copy, Debug)]
pub struct KernelConstants {
    m: usize,
    k: usize,
    omega_m: f64,
    c_mk: f64,
}

impl KernelConstants {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        if !(3..=8).contains(&m) {
            return Err(Error::DimensionOutOfRange { m, min: 3, max: 8 });
        }
        let (mf, kf) = (m as f64, k as f64);
        let omega_m = surface_area(m);
        Ok(KernelConstants {
            m,
            k,
            omega_m,
            c_mk: 2.0 * (mf + 2.0 * kf - 2.0) / ((mf - 2.0) * omega_m),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    /// c_{m,k} = 2(m+2k-2) / ((m-2) omega_m).
    pub fn c_mk(&self) -> f64 {
        self.c_mk
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Poisson kernel of the upper half-space.
pub struct PoissonHalf {
    constants: KernelConstants,
    zonal: ZonalKernel,
}

impl PoissonHalf {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        Ok(PoissonHalf {
            constants: KernelConstants::new(m, k)?,
            zonal: ZonalKernel::new(m, k)?,
        })
    }

    pub fn constants(&self) -> &KernelConstants {
        &self.constants
    }

    /// P_H(x, (t', 0), u, v) for x strictly above the boundary.
    pub fn eval(&self, x: &[f64], t_prime: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let m = self.constants.m;
        if x.len() != m || u.len() != m || v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: x.len().max(u.len()).max(v.len()),
            });
        }
        if t_prime.len() != m - 1 {
            return Err(Error::DimensionMismatch {
                expected: m - 1,
                got: t_prime.len(),
            });
        }
        let y = x[m - 1];
        if y <= 0.0 {
            return Err(Error::GuardViolation {
                what: "half-space evaluation point",
                detail: format!("height {y} is not positive"),
            });
        }
        let mut w: Vec<f64> = x.to_vec();
        for (wi, ti) in w[..m - 1].iter_mut().zip(t_prime) {
            *wi -= ti;
        }
        let wn = norm(&w);
        if wn < SINGULARITY_EPS {
            return Err(Error::NearZeroInverse {
                what: "kernel displacement x - t",
                norm: wn,
            });
        }
        let reflected = sandwich(&w, u)?;
        Ok(self.constants.c_mk * y / wn.powi(m as i32) * self.zonal.eval(&reflected, v))
    }

    /// ∫ P_H(x, t, u, v) dt' by quadrature, recentered at x' so the polar
    /// rule sees a radially concentrated integrand.  Equals Z_k(u, v).
    pub fn boundary_integral(
        &self,
        x: &[f64],
        u: &[f64],
        v: &[f64],
        radial_order: usize,
        angular_degree: u32,
    ) -> Result<f64> {
        let m = self.constants.m;
        let rule = crate::quadrature::hyperplane_rule(m, radial_order, angular_degree)?;
        let y = x[m - 1];
        if y <= 0.0 {
            return Err(Error::GuardViolation {
                what: "half-space evaluation point",
                detail: format!("height {y} is not positive"),
            });
        }
        let c = self.constants.c_mk;
        integrate(&rule, |s| {
            // t' = x' + s, so the displacement is (-s, y).
            let mut w = vec![0.0; m];
            for (wi, si) in w.iter_mut().zip(s) {
                *wi = -si;
            }
            w[m - 1] = y;
            let wn = norm(&w);
            let reflected = sandwich(&w, u).expect("w has positive height");
            c * y / wn.powi(m as i32) * self.zonal.eval(&reflected, v)
        })
    }

    /// Mass of |P_H(x, ., u, v)|, u-averaged, over the far boundary region
    /// {|t' - a| > delta}: the quantity that must vanish as x approaches
    /// (a, 0).  The radial half-line (delta, infinity) is mapped by
    /// r = delta + s/(1-s).
    pub fn tail_mass(
        &self,
        x: &[f64],
        a: &[f64],
        delta: f64,
        v: &[f64],
        radial_order: usize,
        sphere_degree: u32,
    ) -> Result<f64> {
        let m = self.constants.m;
        if delta <= 0.0 {
            return Err(Error::Config("tail radius delta must be positive".into()));
        }
        let (sn, sw) = gauss_legendre(radial_order)?;
        let angular = sphere_rule(m - 1, sphere_degree)?;
        let directions = sphere_rule(m, sphere_degree)?;
        let mut total = Vec::with_capacity(sn.len() * angular.len());
        for (&xi, &wi) in sn.iter().zip(&sw) {
            let s = (xi + 1.0) / 2.0;
            let r = delta + s / (1.0 - s);
            let radial_weight = 0.5 * wi * r.powi(m as i32 - 2) / ((1.0 - s) * (1.0 - s));
            for (wdir, wang) in angular.iter() {
                let t_prime: Vec<f64> = a
                    .iter()
                    .zip(wdir)
                    .map(|(ai, di)| ai + r * di)
                    .collect();
                let inner = integrate(&directions, |u| {
                    self.eval(x, &t_prime, u, v).expect("interior point").abs()
                })?;
                total.push(radial_weight * wang * inner);
            }
        }
        Ok(crate::quadrature::pairwise_sum(&total))
    }
}

/// c_{m,k} ∫ (y/|x|^m) p(x u x / |x|^2) dx' with x = (x', y), evaluated in
/// the plain boundary coordinates.  Reproduces p(u) for p in H_k at every
/// height, so running it at several heights measures quadrature health.
pub fn reproducing_integral(
    constants: &KernelConstants,
    p: &MultiPoly,
    u: &[f64],
    y: f64,
    radial_order: usize,
    angular_degree: u32,
) -> Result<f64> {
    let m = constants.m;
    if y <= 0.0 {
        return Err(Error::GuardViolation {
            what: "half-space evaluation point",
            detail: format!("height {y} is not positive"),
        });
    }
    let rule = crate::quadrature::hyperplane_rule(m, radial_order, angular_degree)?;
    let value = integrate(&rule, |x_prime| {
        let mut x = vec![0.0; m];
        x[..m - 1].copy_from_slice(x_prime);
        x[m - 1] = y;
        let xn = norm(&x);
        let reflected = sandwich(&x, u).expect("x has positive height");
        y / xn.powi(m as i32) * p.eval_u(&reflected)
    })?;
    Ok(constants.c_mk * value)
}

/// Poisson kernel of the unit ball.
pub struct PoissonBall {
    constants: KernelConstants,
    zonal: ZonalKernel,
    margin: f64,
}

impl PoissonBall {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        Self::with_margin(m, k, DEFAULT_BALL_MARGIN)
    }

    /// Margin is the required clearance 1 - |x| of evaluation points; the
    /// kernel grows like margin^{1-m} so callers lowering it own the
    /// conditioning.
    pub fn with_margin(m: usize, k: usize, margin: f64) -> Result<Self> {
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::Config(format!(
                "ball margin must lie in (0, 1), got {margin}"
            )));
        }
        Ok(PoissonBall {
            constants: KernelConstants::new(m, k)?,
            zonal: ZonalKernel::new(m, k)?,
            margin,
        })
    }

    pub fn constants(&self) -> &KernelConstants {
        &self.constants
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// P_B(x, zeta, omega, v) for x inside the ball with the configured
    /// clearance and zeta on the sphere.
    pub fn eval(&self, x: &[f64], zeta: &[f64], omega: &[f64], v: &[f64]) -> Result<f64> {
        let m = self.constants.m;
        if x.len() != m || zeta.len() != m || omega.len() != m || v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: x.len().max(zeta.len()).max(omega.len()).max(v.len()),
            });
        }
        let r = norm(x);
        if 1.0 - r < self.margin {
            return Err(Error::GuardViolation {
                what: "ball evaluation point",
                detail: format!("|x| = {r} leaves less than the margin {}", self.margin),
            });
        }
        let w: Vec<f64> = x.iter().zip(zeta).map(|(a, b)| a - b).collect();
        let wn = norm(&w);
        if wn < SINGULARITY_EPS {
            return Err(Error::NearZeroInverse {
                what: "kernel displacement x - zeta",
                norm: wn,
            });
        }
        let reflected = sandwich(&w, omega)?;
        Ok(self.constants.c_mk / 2.0 * (1.0 - r * r) / wn.powi(m as i32)
            * self.zonal.eval(&reflected, v))
    }

    /// ∫∫ P_B(x, zeta, omega, v) dS(omega) dS(zeta) over both spheres.
    /// At k = 0 this is the classical Poisson mass, identically 1.
    pub fn double_mass(&self, x: &[f64], v: &[f64], boundary_degree: u32) -> Result<f64> {
        let m = self.constants.m;
        let boundary = sphere_rule(m, boundary_degree)?;
        let directions = sphere_rule(m, (2 * self.constants.k).max(2) as u32)?;
        let outer_vals: Result<Vec<f64>> = boundary
            .iter()
            .map(|(zeta, wz)| {
                let inner = integrate(&directions, |omega| {
                    self.eval(x, zeta, omega, v).expect("guards hold")
                })?;
                Ok(wz * inner)
            })
            .collect();
        Ok(crate::quadrature::pairwise_sum(&outer_vals?))
    }
}

/// Shared construction for the ball boundary rule paired with a direction
/// rule exact on H_k pairings; several solver paths need the two together.
pub(crate) fn direction_rule(m: usize, k: usize) -> Result<QuadratureRule> {
    sphere_rule(m, (2 * k).max(2) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::MoebiusTransform;
    use crate::harmonic::harmonic_basis;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_vector(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> Vec<f64> {
        (0..m).map(|_| rng.gen_range(-scale..scale)).collect()
    }

    fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
        loop {
            let v = random_vector(rng, m, 1.0);
            let n = norm(&v);
            if n > 0.3 {
                return v.iter().map(|a| a / n).collect();
            }
        }
    }

    #[test]
    fn constant_values() {
        let c31 = KernelConstants::new(3, 1).unwrap();
        assert_relative_eq!(
            c31.c_mk(),
            3.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-14
        );
        for m in 3..=6 {
            let c = KernelConstants::new(m, 0).unwrap();
            // k = 0 collapse: c_{m,0} omega_m / 2 = 1.
            assert_relative_eq!(c.c_mk() * c.omega_m() / 2.0, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn reproducing_integral_recovers_harmonics() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for (m, k) in [(3usize, 1usize), (3, 2), (4, 1)] {
            let constants = KernelConstants::new(m, k).unwrap();
            let basis = harmonic_basis(m, k).unwrap();
            let u = random_unit(&mut rng, m);
            for p in basis.elements().iter().take(3) {
                let exact = p.eval_u(&u);
                for y in [0.5, 1.0] {
                    let value =
                        reproducing_integral(&constants, p, &u, y, 140, 24).unwrap();
                    assert_relative_eq!(value, exact, epsilon = 1e-9, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn boundary_integral_equals_zonal_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for (m, k) in [(3usize, 1usize), (3, 2)] {
            let ph = PoissonHalf::new(m, k).unwrap();
            let zk = ZonalKernel::new(m, k).unwrap();
            for _ in 0..3 {
                let mut x = random_vector(&mut rng, m, 0.5);
                x[m - 1] = rng.gen_range(0.4..1.2);
                let u = random_unit(&mut rng, m);
                let v = random_vector(&mut rng, m, 0.7);
                let integral = ph.boundary_integral(&x, &u, &v, 140, 30).unwrap();
                assert_relative_eq!(
                    integral,
                    zk.eval(&u, &v),
                    epsilon = 1e-8,
                    max_relative = 1e-7
                );
            }
        }
    }

    #[test]
    fn half_kernel_at_k0_has_unit_mass() {
        // With a datum constant in both arguments, the full Poisson
        // integral at k = 0 is the classical one: total mass 1.
        let ph = PoissonHalf::new(3, 0).unwrap();
        let x = [0.2, -0.1, 0.8];
        let u = [1.0, 0.0, 0.0];
        let v = [0.3, 0.3, 0.1];
        let z_mass = ph.boundary_integral(&x, &u, &v, 100, 16).unwrap();
        // ∫ P_H dt' = Z_0 = 1/omega_m; times the dS(u) sphere mass gives 1.
        assert_relative_eq!(
            z_mass * surface_area(3),
            1.0,
            epsilon = 1e-10,
            max_relative = 1e-10
        );
    }

    #[test]
    fn ball_kernel_double_mass_is_one_at_k0() {
        let pb = PoissonBall::new(3, 0).unwrap();
        let x = [0.25, -0.2, 0.1];
        let v = [0.0, 0.5, 0.2];
        let mass = pb.double_mass(&x, &v, 50).unwrap();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn zonal_argument_transport_under_moebius() {
        // For a Moebius transform T and points x, zeta, the reflected-slot
        // argument transports through the denominator actions:
        // Z_k(D u D/|D|^2, v) at the image equals Z_k(d w d/|d|^2, nu) at
        // the source, with D = T(x)-T(zeta), d = x-zeta,
        // w = action_zeta(u), nu = action_x(v).
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for m in 3..=4 {
            let zk = ZonalKernel::new(m, 2).unwrap();
            let mut checked = 0;
            while checked < 40 {
                let mut t = MoebiusTransform::identity(m);
                for _ in 0..rng.gen_range(1..=4) {
                    let step = match rng.gen_range(0..4) {
                        0 => MoebiusTransform::translation(&random_vector(&mut rng, m, 1.0)),
                        1 => MoebiusTransform::dilation(m, rng.gen_range(0.5..2.0)).unwrap(),
                        2 => MoebiusTransform::reflection(&random_unit(&mut rng, m)).unwrap(),
                        _ => MoebiusTransform::inversion(m),
                    };
                    t = step.compose(&t);
                }
                let x = random_vector(&mut rng, m, 1.2);
                let zeta = random_vector(&mut rng, m, 1.2);
                let sep: f64 = norm(&x.iter().zip(&zeta).map(|(a, b)| a - b).collect::<Vec<_>>());
                if sep < 0.3 || t.denominator_norm(&x) < 0.2 || t.denominator_norm(&zeta) < 0.2 {
                    continue;
                }
                let (Ok(tx), Ok(tz)) = (t.eval(&x), t.eval(&zeta)) else {
                    continue;
                };
                let u = random_unit(&mut rng, m);
                let v = random_vector(&mut rng, m, 0.8);

                let image_disp: Vec<f64> = tx.iter().zip(&tz).map(|(a, b)| a - b).collect();
                let lhs = zk.eval(&sandwich(&image_disp, &u).unwrap(), &v);

                let source_disp: Vec<f64> = x.iter().zip(&zeta).map(|(a, b)| a - b).collect();
                let omega = t.denominator_action(&zeta).unwrap().apply(&u).unwrap();
                let nu = t.denominator_action(&x).unwrap().apply(&v).unwrap();
                let rhs = zk.eval(&sandwich(&source_disp, &omega).unwrap(), &nu);

                assert_relative_eq!(lhs, rhs, epsilon = 1e-9, max_relative = 1e-8);
                checked += 1;
            }
        }
    }

    #[test]
    fn tail_mass_vanishes_toward_boundary_point() {
        let ph = PoissonHalf::new(3, 1).unwrap();
        let a = [0.0, 0.0];
        let v = [0.2, 0.1, 0.4];
        let masses: Vec<f64> = [0.5, 0.1, 0.02]
            .iter()
            .map(|&y| {
                let x = [0.0, 0.0, y];
                ph.tail_mass(&x, &a, 0.5, &v, 40, 14).unwrap()
            })
            .collect();
        assert!(masses[0] > masses[1] && masses[1] > masses[2]);
        assert!(masses[2] < 0.1 * masses[0]);
    }

    #[test]
    fn kernel_guards_fire() {
        let ph = PoissonHalf::new(3, 1).unwrap();
        let below = ph.eval(&[0.0, 0.0, -0.5], &[1.0, 0.0], &[1.0, 0.0, 0.0], &[0.1; 3]);
        assert!(matches!(below, Err(Error::GuardViolation { .. })));

        let pb = PoissonBall::new(3, 1).unwrap();
        let hugging = pb.eval(
            &[0.9995, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.1; 3],
        );
        assert!(matches!(hugging, Err(Error::GuardViolation { .. })));

        // On the ball the margin guard subsumes the collision guard, since
        // |x - zeta| >= 1 - |x|; the collision is reachable on the
        // half-space at heights below the singularity cutoff.
        let colliding = ph.eval(&[0.2, 0.3, 1e-13], &[0.2, 0.3], &[1.0, 0.0, 0.0], &[0.1; 3]);
        assert!(matches!(colliding, Err(Error::NearZeroInverse { .. })));

        assert!(PoissonBall::with_margin(3, 1, 0.0).is_err());
    }

    #[test]
    fn ball_kernel_positive_scalar_factor() {
        // The scalar factor (1-|x|^2)/|x-zeta|^m is positive inside the
        // ball; sign structure of P_B comes only from the zonal part.
        let pb = PoissonBall::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..20 {
            let x = random_vector(&mut rng, 3, 0.55);
            let zeta = random_unit(&mut rng, 3);
            let omega = random_unit(&mut rng, 3);
            // Pair omega with its own reflected image: the zonal part sits
            // on its diagonal, a sum of squares, so P_B must be positive.
            let w: Vec<f64> = x.iter().zip(&zeta).map(|(a, b)| a - b).collect();
            let nu = sandwich(&w, &omega).unwrap();
            let value = pb.eval(&x, &zeta, &omega, &nu).unwrap();
            assert!(value > 0.0);
        }
    }
}
