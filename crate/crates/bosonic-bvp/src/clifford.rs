//! Clifford algebra Cl(m) over R^m and the Moebius transforms built on it.
//!
//! The algebra is generated by e_1, ..., e_m subject to
//!
//! ```text
//! e_i e_j + e_j e_i = -2 delta_ij
//! ```
//!
//! so every vector squares to minus its Euclidean length: x^2 = -|x|^2.
//! A basis blade e_A is indexed by the bitmask A (bit i set means e_{i+1}
//! participates), and a general element is stored densely as 2^m
//! coefficients.  Products of invertible vectors (versors) act on vectors by
//! the sandwich a x a / |a|^2, which is the reflection of x across the
//! hyperplane orthogonal to a.
//!
//! Moebius transforms of R^m ∪ {∞} are represented by Vahlen matrices
//! [[a, b], [c, d]] with Clifford entries, acting as
//!
//! ```text
//! x  ->  (a x + b)(c x + d)^{-1}.
//! ```
//!
//! Composition is the Clifford matrix product.  Transforms are only ever
//! assembled from the four conformal primitives (translation, dilation,
//! reflection, inversion), so the factor list doubles as an evaluation
//! oracle: applying the primitives one by one must agree with the Vahlen
//! evaluation.
//!
//! The Cayley transform
//!
//! ```text
//! phi(x) = -(x + e_m)(e_m x + 1)^{-1} / 2
//! ```
//! maps the unit ball onto a half-space bounded by {z_m = 0} and factors as
//! translation(e_m/2) ∘ inversion ∘ reflection(e_m) ∘ translation(-e_m).
//! Direct evaluation sends the ball interior to {z_m < 0}; the `cayley_upper`
//! variant post-composes with the reflection z_m -> -z_m so that interior
//! points land in the upper half-space used by the half-space solver.  Both
//! variants restrict to the same map on the unit sphere.

use crate::error::{Error, Result};

const MAX_GENERATORS: usize = 16;

/// Threshold below which a norm is treated as zero when inverting.
const INVERT_EPS: f64 = 1e-12;

/// Dense multivector in Cl(m): coefficient `coeffs[A]` multiplies the blade
/// with bitmask `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    m: usize,
    coeffs: Vec<f64>,
}

/// Sign from reordering the concatenation e_A e_B into canonical ascending
/// order, ignoring the metric.
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Multivector {
    pub fn zero(m: usize) -> Self {
        assert!(
            (1..=MAX_GENERATORS).contains(&m),
            "Cl(m) needs 1 <= m <= {MAX_GENERATORS}, got {m}"
        );
        Multivector {
            m,
            coeffs: vec![0.0; 1 << m],
        }
    }

    pub fn scalar(m: usize, value: f64) -> Self {
        let mut mv = Self::zero(m);
        mv.coeffs[0] = value;
        mv
    }

    /// Basis vector e_{i+1} (zero-based coordinate index).
    pub fn basis_vector(m: usize, i: usize) -> Self {
        assert!(i < m, "coordinate index {i} out of range for m = {m}");
        let mut mv = Self::zero(m);
        mv.coeffs[1 << i] = 1.0;
        mv
    }

    pub fn from_vector(v: &[f64]) -> Self {
        let m = v.len();
        let mut mv = Self::zero(m);
        for (i, &c) in v.iter().enumerate() {
            mv.coeffs[1 << i] = c;
        }
        mv
    }

    pub fn generators(&self) -> usize {
        self.m
    }

    pub fn coeff(&self, blade: usize) -> f64 {
        self.coeffs[blade]
    }

    pub fn set_coeff(&mut self, blade: usize, value: f64) {
        self.coeffs[blade] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Grade-1 coefficients as a coordinate vector.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Projection onto grade r.
    pub fn grade(&self, r: u32) -> Self {
        let mut out = Self::zero(self.m);
        for (blade, &c) in self.coeffs.iter().enumerate() {
            if blade.count_ones() == r {
                out.coeffs[blade] = c;
            }
        }
        out
    }

    /// Largest coefficient magnitude outside grade r.
    pub fn off_grade_norm(&self, r: u32) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(blade, _)| blade.count_ones() != r)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Multivector {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Euclidean norm of the coefficient array.  For versors this coincides
    /// with the Clifford group norm sqrt(conj(a) a).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Reversion: blades of grade r pick up (-1)^{r(r-1)/2}.
    pub fn reversion(&self) -> Self {
        let mut out = self.clone();
        for (blade, c) in out.coeffs.iter_mut().enumerate() {
            let r = blade.count_ones();
            if (r * (r.wrapping_sub(1)) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Clifford conjugation (reversion composed with the grade involution):
    /// grade r picks up (-1)^{r(r+1)/2}.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for (blade, c) in out.coeffs.iter_mut().enumerate() {
            let r = blade.count_ones();
            if (r * (r + 1) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    pub fn geometric_product(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.m, rhs.m,
            "geometric product across Cl({}) and Cl({})",
            self.m, rhs.m
        );
        let mut out = Self::zero(self.m);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for (b, &cb) in rhs.coeffs.iter().enumerate() {
                if cb == 0.0 {
                    continue;
                }
                // Common generators contribute e_i e_i = -1 each.
                let metric = if (a & b).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                out.coeffs[a ^ b] += ca * cb * reorder_sign(a, b) * metric;
            }
        }
        out
    }

    /// Inverse of a versor: conj(a) / (conj(a) a).  Fails if conj(a) a has a
    /// non-scalar part, which certifies the input was not a versor.
    pub fn versor_inverse(&self) -> Result<Self> {
        let conj = self.conjugate();
        let prod = conj.geometric_product(self);
        let s = prod.scalar_part();
        let scale = self.norm();
        if scale < INVERT_EPS {
            return Err(Error::NearZeroInverse {
                what: "versor",
                norm: scale,
            });
        }
        let residual = prod.off_grade_norm(0) / (scale * scale);
        if residual > 1e-10 {
            return Err(Error::NotAVersor { residual });
        }
        Ok(conj.scaled(1.0 / s))
    }
}

impl std::ops::Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.m, rhs.m, "adding Cl({}) to Cl({})", self.m, rhs.m);
        Multivector {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.m, rhs.m, "subtracting Cl({}) from Cl({})", rhs.m, self.m);
        Multivector {
            m: self.m,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs)
    }
}

impl std::ops::Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(-1.0)
    }
}

/// Inverse of a nonzero vector: x^{-1} = -x / |x|^2.
pub fn vector_inverse(x: &[f64]) -> Result<Vec<f64>> {
    let n2: f64 = x.iter().map(|c| c * c).sum();
    if n2.sqrt() < INVERT_EPS {
        return Err(Error::NearZeroInverse {
            what: "vector",
            norm: n2.sqrt(),
        });
    }
    Ok(x.iter().map(|c| -c / n2).collect())
}

/// Sandwich a u a / |a|^2 of vectors, i.e. the reflection of u across the
/// hyperplane orthogonal to a:  u - 2 <u, a> a / |a|^2.
pub fn sandwich(a: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let mut out = u.to_vec();
    sandwich_into(a, u, &mut out)?;
    Ok(out)
}

/// Allocation-free sandwich for quadrature inner loops.
pub fn sandwich_into(a: &[f64], u: &[f64], out: &mut [f64]) -> Result<()> {
    if a.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: u.len(),
        });
    }
    let n2: f64 = a.iter().map(|c| c * c).sum();
    if n2.sqrt() < INVERT_EPS {
        return Err(Error::NearZeroInverse {
            what: "sandwich vector",
            norm: n2.sqrt(),
        });
    }
    let dot: f64 = a.iter().zip(u).map(|(ai, ui)| ai * ui).sum();
    let s = 2.0 * dot / n2;
    for ((o, &ui), &ai) in out.iter_mut().zip(u).zip(a) {
        *o = ui - s * ai;
    }
    Ok(())
}

/// Point in the open upper half-space: (horizontal, height) with height > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PointHalfSpace {
    horizontal: Vec<f64>,
    height: f64,
}

impl PointHalfSpace {
    pub fn new(horizontal: Vec<f64>, height: f64) -> Result<Self> {
        if !(height > 0.0) {
            return Err(Error::GuardViolation {
                what: "half-space point",
                detail: format!("height {height} is not positive"),
            });
        }
        Ok(PointHalfSpace { horizontal, height })
    }

    pub fn horizontal(&self) -> &[f64] {
        &self.horizontal
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Ambient dimension m (horizontal part has m-1 coordinates).
    pub fn ambient_dim(&self) -> usize {
        self.horizontal.len() + 1
    }

    /// Full coordinate vector (x', y) in R^m.
    pub fn full(&self) -> Vec<f64> {
        let mut v = self.horizontal.clone();
        v.push(self.height);
        v
    }
}

/// Conformal primitive, recorded in application order.
#[derive(Clone, Debug)]
pub enum MoebiusFactor {
    Translation(Vec<f64>),
    Dilation(f64),
    Reflection(Vec<f64>),
    Inversion,
}

/// Moebius transform of R^m ∪ {∞} as a Vahlen matrix plus the primitive
/// factors it was assembled from.
#[derive(Clone, Debug)]
pub struct MoebiusTransform {
    m: usize,
    a: Multivector,
    b: Multivector,
    c: Multivector,
    d: Multivector,
    factors: Vec<MoebiusFactor>,
}

impl MoebiusTransform {
    pub fn identity(m: usize) -> Self {
        MoebiusTransform {
            m,
            a: Multivector::scalar(m, 1.0),
            b: Multivector::zero(m),
            c: Multivector::zero(m),
            d: Multivector::scalar(m, 1.0),
            factors: Vec::new(),
        }
    }

    /// x -> x + b.
    pub fn translation(b: &[f64]) -> Self {
        let m = b.len();
        let mut t = Self::identity(m);
        t.b = Multivector::from_vector(b);
        t.factors = vec![MoebiusFactor::Translation(b.to_vec())];
        t
    }

    /// x -> lambda x with lambda > 0.  Stored as (sqrt(l), 0, 0, 1/sqrt(l))
    /// so every primitive has pseudo-determinant of modulus one, which the
    /// conformal distance identity relies on.
    pub fn dilation(m: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::GuardViolation {
                what: "dilation",
                detail: format!("scale {lambda} is not positive"),
            });
        }
        let mut t = Self::identity(m);
        t.a = Multivector::scalar(m, lambda.sqrt());
        t.d = Multivector::scalar(m, 1.0 / lambda.sqrt());
        t.factors = vec![MoebiusFactor::Dilation(lambda)];
        Ok(t)
    }

    /// x -> a x a / |a|^2, reflection across the hyperplane orthogonal to a.
    /// The Vahlen entries use the normalized vector; the map itself is
    /// independent of |a|.
    pub fn reflection(a: &[f64]) -> Result<Self> {
        let m = a.len();
        let norm: f64 = a.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < INVERT_EPS {
            return Err(Error::NearZeroInverse {
                what: "reflection vector",
                norm,
            });
        }
        let unit: Vec<f64> = a.iter().map(|c| c / norm).collect();
        let av = Multivector::from_vector(&unit);
        let mut t = Self::identity(m);
        t.a = av.clone();
        t.d = av.scaled(-1.0);
        t.factors = vec![MoebiusFactor::Reflection(a.to_vec())];
        Ok(t)
    }

    /// x -> x^{-1} = -x / |x|^2.
    pub fn inversion(m: usize) -> Self {
        let mut t = Self::identity(m);
        t.a = Multivector::zero(m);
        t.b = Multivector::scalar(m, 1.0);
        t.c = Multivector::scalar(m, 1.0);
        t.d = Multivector::zero(m);
        t.factors = vec![MoebiusFactor::Inversion];
        t
    }

    /// self ∘ other: apply `other` first.  Vahlen matrices multiply.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m, "composing transforms of different dimension");
        let mut factors = other.factors.clone();
        factors.extend(self.factors.iter().cloned());
        MoebiusTransform {
            m: self.m,
            a: &(&self.a * &other.a) + &(&self.b * &other.c),
            b: &(&self.a * &other.b) + &(&self.b * &other.d),
            c: &(&self.c * &other.a) + &(&self.d * &other.c),
            d: &(&self.c * &other.b) + &(&self.d * &other.d),
            factors,
        }
    }

    /// Inverse transform, assembled by inverting the primitive factors in
    /// reverse order.
    pub fn inverse(&self) -> Self {
        let mut out = Self::identity(self.m);
        for factor in self.factors.iter().rev() {
            let step = match factor {
                MoebiusFactor::Translation(b) => {
                    Self::translation(&b.iter().map(|c| -c).collect::<Vec<_>>())
                }
                MoebiusFactor::Dilation(lambda) => {
                    Self::dilation(self.m, 1.0 / lambda).expect("positive scale")
                }
                MoebiusFactor::Reflection(a) => Self::reflection(a).expect("nonzero vector"),
                MoebiusFactor::Inversion => Self::inversion(self.m),
            };
            out = step.compose(&out);
        }
        out
    }

    /// The Cayley transform phi(x) = -(x + e_m)(e_m x + 1)^{-1} / 2, built
    /// from primitives.  Maps the unit sphere onto {z_m = 0} and the open
    /// ball onto {z_m < 0}.
    pub fn cayley(m: usize) -> Self {
        let mut em = vec![0.0; m];
        em[m - 1] = 1.0;
        let mut minus_em = vec![0.0; m];
        minus_em[m - 1] = -1.0;
        let mut half_em = vec![0.0; m];
        half_em[m - 1] = 0.5;
        let refl = Self::reflection(&em).expect("unit vector");
        Self::translation(&half_em)
            .compose(&Self::inversion(m))
            .compose(&refl)
            .compose(&Self::translation(&minus_em))
    }

    /// Cayley transform post-composed with z_m -> -z_m, so the open ball maps
    /// onto the upper half-space {z_m > 0}.  Restricts to the same boundary
    /// map as `cayley`.
    pub fn cayley_upper(m: usize) -> Self {
        let mut em = vec![0.0; m];
        em[m - 1] = 1.0;
        Self::reflection(&em)
            .expect("unit vector")
            .compose(&Self::cayley(m))
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn vahlen(&self) -> (&Multivector, &Multivector, &Multivector, &Multivector) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn factors(&self) -> &[MoebiusFactor] {
        &self.factors
    }

    /// |c x + d|, the denominator norm appearing in the conformal distance
    /// identity |T(x) - T(z)| = |x - z| / (|c x + d| |c z + d|).
    pub fn denominator_norm(&self, x: &[f64]) -> f64 {
        let xm = Multivector::from_vector(x);
        (&(&self.c * &xm) + &self.d).norm()
    }

    /// The orthogonal map u -> (cp+d)~ u (cp+d) / |cp+d|^2 attached to the
    /// transform at a base point p.  For a Vahlen matrix the factor cp+d is
    /// a versor, so the map is a composition of reflections; it is how
    /// direction vectors transport when the transform moves p.
    pub fn denominator_action(&self, p: &[f64]) -> Result<DenominatorAction> {
        if p.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: p.len(),
            });
        }
        let pm = Multivector::from_vector(p);
        let q = &(&self.c * &pm) + &self.d;
        let norm = q.norm();
        if norm < 1e-10 {
            return Err(Error::Pole { norm });
        }
        Ok(DenominatorAction {
            q_rev: q.reversion(),
            norm2: norm * norm,
            q,
        })
    }

    /// Evaluate via the Vahlen matrix: (a x + b)(c x + d)^{-1}.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        let xm = Multivector::from_vector(x);
        let num = &(&self.a * &xm) + &self.b;
        let den = &(&self.c * &xm) + &self.d;
        let den_norm = den.norm();
        if den_norm < 1e-10 {
            return Err(Error::Pole { norm: den_norm });
        }
        let y = &num * &den.versor_inverse()?;
        debug_assert!(
            y.off_grade_norm(1) <= 1e-9 * (1.0 + y.norm()),
            "Moebius image has non-vector part {:e}",
            y.off_grade_norm(1)
        );
        Ok(y.vector_part())
    }

    /// Evaluate by applying the primitive factors one at a time.  Slower
    /// than `eval`, used as an independent check on the Vahlen composition.
    pub fn eval_factored(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: x.len(),
            });
        }
        let mut y = x.to_vec();
        for factor in &self.factors {
            y = match factor {
                MoebiusFactor::Translation(b) => {
                    y.iter().zip(b).map(|(yi, bi)| yi + bi).collect()
                }
                MoebiusFactor::Dilation(lambda) => y.iter().map(|yi| yi * lambda).collect(),
                MoebiusFactor::Reflection(a) => sandwich(a, &y)?,
                MoebiusFactor::Inversion => {
                    let n: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
                    if n < 1e-10 {
                        return Err(Error::Pole { norm: n });
                    }
                    vector_inverse(&y)?
                }
            };
        }
        Ok(y)
    }
}

/// The map u -> q~ u q / |q|^2 for the denominator versor q = cp + d of a
/// Moebius transform at a fixed base point; see
/// [`MoebiusTransform::denominator_action`].
pub struct DenominatorAction {
    q: Multivector,
    q_rev: Multivector,
    norm2: f64,
}

impl DenominatorAction {
    pub fn norm(&self) -> f64 {
        self.norm2.sqrt()
    }

    fn conjugate(&self, left: &Multivector, u: &[f64], right: &Multivector) -> Result<Vec<f64>> {
        let um = Multivector::from_vector(u);
        let moved = (&(left * &um) * right).scaled(1.0 / self.norm2);
        let residual = moved.off_grade_norm(1);
        if residual > 1e-9 * (1.0 + moved.norm()) {
            return Err(Error::NotAVersor { residual });
        }
        Ok(moved.vector_part())
    }

    /// q~ u q / |q|^2.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.conjugate(&self.q_rev, u, &self.q)
    }

    /// q u q~ / |q|^2, the inverse orthogonal map.
    pub fn apply_inverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.conjugate(&self.q, u, &self.q_rev)
    }
}

/// |e_m z + 1| for a coordinate vector z.  Expands to sqrt(2 (1 - z_m)) on
/// the unit sphere but is valid everywhere.
pub fn cayley_denominator_norm(z: &[f64]) -> f64 {
    let m = z.len();
    let zm = z[m - 1];
    let horiz: f64 = z[..m - 1].iter().map(|c| c * c).sum();
    ((1.0 - zm) * (1.0 - zm) + horiz).sqrt()
}

/// Surface distortion of the Cayley boundary map at a unit vector zeta:
/// J(phi, zeta) = |e_m zeta + 1|^{-2m + 2}.
pub fn cayley_boundary_jacobian(zeta: &[f64]) -> Result<f64> {
    let m = zeta.len();
    let q = cayley_denominator_norm(zeta);
    if q < 1e-6 {
        return Err(Error::GuardViolation {
            what: "Cayley jacobian",
            detail: format!("boundary point within {q:e} of the pole e_m"),
        });
    }
    Ok(q.powi(2 - 2 * m as i32))
}

/// Finite-difference oracle for `cayley_boundary_jacobian`: push an
/// orthonormal tangent frame at zeta through the boundary map and measure
/// the Gram determinant of the image frame.  Independent of the closed form.
pub fn cayley_boundary_jacobian_fd(zeta: &[f64], h: f64) -> Result<f64> {
    let m = zeta.len();
    let phi = MoebiusTransform::cayley_upper(m);
    let frame = tangent_frame(zeta);
    let mut jacobian = nalgebra::DMatrix::<f64>::zeros(m, m - 1);
    for (j, t) in frame.iter().enumerate() {
        let plus = phi.eval(&normalize(&offset(zeta, t, h)))?;
        let minus = phi.eval(&normalize(&offset(zeta, t, -h)))?;
        for i in 0..m {
            jacobian[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    let gram = jacobian.transpose() * jacobian;
    Ok(gram.determinant().sqrt())
}

fn offset(zeta: &[f64], t: &[f64], h: f64) -> Vec<f64> {
    zeta.iter().zip(t).map(|(z, ti)| z + h * ti).collect()
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    v.iter().map(|c| c / n).collect()
}

/// Orthonormal basis of the tangent space of S^{m-1} at a unit vector.
fn tangent_frame(zeta: &[f64]) -> Vec<Vec<f64>> {
    let m = zeta.len();
    let pivot = (0..m)
        .max_by(|&i, &j| zeta[i].abs().total_cmp(&zeta[j].abs()))
        .unwrap();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
    for i in (0..m).filter(|&i| i != pivot) {
        let mut t: Vec<f64> = (0..m).map(|j| if j == i { 1.0 } else { 0.0 }).collect();
        let dot: f64 = t.iter().zip(zeta).map(|(a, b)| a * b).sum();
        for (tj, zj) in t.iter_mut().zip(zeta) {
            *tj -= dot * zj;
        }
        for prev in &frame {
            let dot: f64 = t.iter().zip(prev).map(|(a, b)| a * b).sum();
            for (tj, pj) in t.iter_mut().zip(prev) {
                *tj -= dot * pj;
            }
        }
        let n: f64 = t.iter().map(|c| c * c).sum::<f64>().sqrt();
        for tj in &mut t {
            *tj /= n;
        }
        frame.push(t);
    }
    frame
}
