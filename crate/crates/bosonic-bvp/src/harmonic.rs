//! Harmonic polynomials in the u variable and the machinery around them.
//!
//! H_k denotes the space of degree-k polynomials p(u) on R^m with
//! Delta_u p = 0.  Its dimension is
//!
//! ```text
//! dim H_k = C(m+k-1, m-1) - C(m+k-3, m-1),
//! ```
//!
//! and the crate works with bases of H_k that are orthonormal with respect
//! to the unnormalized surface measure dS on S^{m-1}.  Inner products of
//! monomials against dS have the classical closed form
//!
//! ```text
//! ∫_{S^{m-1}} u^alpha dS = 2 prod_i Gamma((alpha_i+1)/2) / Gamma((|alpha|+m)/2)
//! ```
//!
//! when every exponent is even, and vanish otherwise.  All Gamma arguments
//! are half-integers, so the moments are evaluated by exact recurrences
//! rather than a general Gamma approximation.
//!
//! Basis construction runs in two stages.  The kernel of Delta_u on the
//! degree-k monomials is computed over exact rationals and scaled to
//! primitive integer coefficient vectors, so harmonicity of the raw basis
//! is checked exactly, coefficient by coefficient, in integer arithmetic.
//! The raw basis is then orthonormalized against the analytic moment inner
//! product in double precision; orthonormalized elements remain harmonic by
//! linearity, with a recorded floating-point defect on the order of
//! rounding error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vectors for one monomial x^a u^b; both arrays have length m.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub x: Box<[u8]>,
    pub u: Box<[u8]>,
}

impl Monomial {
    fn u_only(u: Vec<u8>) -> Self {
        let m = u.len();
        Monomial {
            x: vec![0; m].into_boxed_slice(),
            u: u.into_boxed_slice(),
        }
    }

    pub fn degree_x(&self) -> u32 {
        self.x.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_u(&self) -> u32 {
        self.u.iter().map(|&e| e as u32).sum()
    }
}

/// Polynomial in the 2m variables (x_1..x_m, u_1..u_m) with f64
/// coefficients.  Canonical form: zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    m: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl MultiPoly {
    pub fn zero(m: usize) -> Self {
        MultiPoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        let mut p = Self::zero(m);
        if c != 0.0 {
            p.terms.insert(Monomial::u_only(vec![0; m]), c);
        }
        p
    }

    /// The coordinate monomial x_i.
    pub fn x_var(m: usize, i: usize) -> Self {
        assert!(i < m);
        let mut x = vec![0u8; m];
        x[i] = 1;
        let mut p = Self::zero(m);
        p.terms.insert(
            Monomial {
                x: x.into_boxed_slice(),
                u: vec![0; m].into_boxed_slice(),
            },
            1.0,
        );
        p
    }

    /// The coordinate monomial u_i.
    pub fn u_var(m: usize, i: usize) -> Self {
        assert!(i < m);
        let mut u = vec![0u8; m];
        u[i] = 1;
        let mut p = Self::zero(m);
        p.terms.insert(Monomial::u_only(u), 1.0);
        p
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0.0 {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.m);
        let mut out = self.clone();
        for (mono, &c) in &rhs.terms {
            out.add_term(mono.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.m);
        }
        MultiPoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.clone(), c * s))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.m, rhs.m);
        let mut out = Self::zero(self.m);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                let x: Vec<u8> = ma
                    .x
                    .iter()
                    .zip(mb.x.iter())
                    .map(|(a, b)| a.checked_add(*b).expect("x-degree overflow"))
                    .collect();
                let u: Vec<u8> = ma
                    .u
                    .iter()
                    .zip(mb.u.iter())
                    .map(|(a, b)| a.checked_add(*b).expect("u-degree overflow"))
                    .collect();
                out.add_term(
                    Monomial {
                        x: x.into_boxed_slice(),
                        u: u.into_boxed_slice(),
                    },
                    ca * cb,
                );
            }
        }
        out
    }

    pub fn partial_x(&self, i: usize) -> Self {
        assert!(i < self.m);
        let mut out = Self::zero(self.m);
        for (mono, &c) in &self.terms {
            let e = mono.x[i];
            if e == 0 {
                continue;
            }
            let mut x = mono.x.clone();
            x[i] -= 1;
            out.add_term(
                Monomial {
                    x,
                    u: mono.u.clone(),
                },
                c * e as f64,
            );
        }
        out
    }

    pub fn partial_u(&self, i: usize) -> Self {
        assert!(i < self.m);
        let mut out = Self::zero(self.m);
        for (mono, &c) in &self.terms {
            let e = mono.u[i];
            if e == 0 {
                continue;
            }
            let mut u = mono.u.clone();
            u[i] -= 1;
            out.add_term(
                Monomial {
                    x: mono.x.clone(),
                    u,
                },
                c * e as f64,
            );
        }
        out
    }

    pub fn laplacian_u(&self) -> Self {
        let mut out = Self::zero(self.m);
        for i in 0..self.m {
            out = out.add(&self.partial_u(i).partial_u(i));
        }
        out
    }

    pub fn laplacian_x(&self) -> Self {
        let mut out = Self::zero(self.m);
        for i in 0..self.m {
            out = out.add(&self.partial_x(i).partial_x(i));
        }
        out
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(Monomial::degree_x).max().unwrap_or(0)
    }

    pub fn degree_u(&self) -> u32 {
        self.terms.keys().map(Monomial::degree_u).max().unwrap_or(0)
    }

    pub fn depends_on_x(&self) -> bool {
        self.terms.keys().any(|mono| mono.degree_x() > 0)
    }

    pub fn is_homogeneous_u(&self, k: u32) -> bool {
        self.terms.keys().all(|mono| mono.degree_u() == k)
    }

    pub fn eval(&self, x: &[f64], u: &[f64]) -> f64 {
        assert_eq!(x.len(), self.m);
        assert_eq!(u.len(), self.m);
        let mut acc = 0.0;
        for (mono, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in mono.x.iter().enumerate() {
                if e > 0 {
                    t *= x[i].powi(e as i32);
                }
            }
            for (i, &e) in mono.u.iter().enumerate() {
                if e > 0 {
                    t *= u[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluate a polynomial that does not involve x.
    pub fn eval_u(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.m);
        let mut acc = 0.0;
        for (mono, &c) in &self.terms {
            debug_assert!(mono.degree_x() == 0, "x-dependent term in eval_u");
            let mut t = c;
            for (i, &e) in mono.u.iter().enumerate() {
                if e > 0 {
                    t *= u[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute u -> A u, i.e. u_i -> sum_j A[i][j] u_j, leaving x alone.
    pub fn substitute_linear_u(&self, a: &[Vec<f64>]) -> Self {
        assert_eq!(a.len(), self.m);
        let forms: Vec<MultiPoly> = (0..self.m)
            .map(|i| {
                let mut form = MultiPoly::zero(self.m);
                for j in 0..self.m {
                    form = form.add(&MultiPoly::u_var(self.m, j).scaled(a[i][j]));
                }
                form
            })
            .collect();
        let mut out = MultiPoly::zero(self.m);
        for (mono, &c) in &self.terms {
            let mut term = MultiPoly::constant(self.m, c);
            let mut xpart = MultiPoly::zero(self.m);
            xpart.terms.insert(
                Monomial {
                    x: mono.x.clone(),
                    u: vec![0; self.m].into_boxed_slice(),
                },
                1.0,
            );
            term = term.mul(&xpart);
            for (i, &e) in mono.u.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&forms[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// Gamma(n/2) for n >= 1, by exact half-integer recurrences.
pub fn gamma_half(n: u64) -> f64 {
    assert!(n >= 1);
    if n % 2 == 0 {
        // Gamma(j) = (j-1)!
        let j = n / 2;
        (1..j).map(|i| i as f64).product()
    } else {
        // Gamma(j + 1/2) = sqrt(pi) (2j-1)!! / 2^j  with n = 2j + 1.
        let j = (n - 1) / 2;
        let mut acc = std::f64::consts::PI.sqrt();
        let mut odd = 1u64;
        for _ in 0..j {
            acc *= odd as f64 / 2.0;
            odd += 2;
        }
        acc
    }
}

/// Surface measure of the unit sphere S^{m-1}: omega_m = 2 pi^{m/2} / Gamma(m/2).
pub fn surface_area(m: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(m as f64 / 2.0) / gamma_half(m as u64)
}

/// ∫_{S^{m-1}} u^alpha dS:  2 prod Gamma((a_i+1)/2) / Gamma((|a|+m)/2) when
/// every exponent is even, zero otherwise.
pub fn sphere_moment(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|&a| a % 2 == 1) {
        return 0.0;
    }
    let m = alpha.len() as u64;
    let total: u64 = alpha.iter().map(|&a| a as u64).sum();
    let mut num = 2.0;
    for &a in alpha {
        num *= gamma_half(a as u64 + 1);
    }
    num / gamma_half(total + m)
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// dim H_k on R^m.
pub fn hk_dim(m: usize, k: usize) -> usize {
    let (m, k) = (m as u64, k as u64);
    (binomial(m + k - 1, m - 1) - binomial(m + k - 3, m - 1)) as usize
}

/// Monomial exponent vectors of total degree k in m variables, in
/// lexicographic order.  Deterministic; basis construction depends on it.
pub(crate) fn monomials_of_degree(m: usize, k: u32) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current = vec![0u8; m];
    fn recurse(m: usize, pos: usize, left: u32, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == m - 1 {
            current[pos] = left as u8;
            out.push(current.clone());
            return;
        }
        for e in (0..=left).rev() {
            current[pos] = e as u8;
            recurse(m, pos + 1, left - e, current, out);
        }
    }
    recurse(m, 0, k, &mut current, &mut out);
    out
}

/// Inner product of two u-polynomials against dS on S^{m-1}, from the
/// analytic moments.
pub fn sphere_inner_product(p: &MultiPoly, q: &MultiPoly) -> f64 {
    assert_eq!(p.m, q.m);
    let mut acc = 0.0;
    for (ma, &ca) in &p.terms {
        debug_assert!(ma.degree_x() == 0);
        for (mb, &cb) in &q.terms {
            let gamma: Vec<u32> = ma
                .u
                .iter()
                .zip(mb.u.iter())
                .map(|(a, b)| *a as u32 + *b as u32)
                .collect();
            if gamma.iter().any(|g| g % 2 == 1) {
                continue;
            }
            acc += ca * cb * sphere_moment(&gamma);
        }
    }
    acc
}

/// Orthonormal basis of H_k with respect to dS on S^{m-1}.
pub struct HarmonicBasis {
    m: usize,
    k: usize,
    elements: Vec<MultiPoly>,
    gram_defect: f64,
    laplacian_defect: f64,
}

impl HarmonicBasis {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, j: usize) -> &MultiPoly {
        &self.elements[j]
    }

    pub fn elements(&self) -> &[MultiPoly] {
        &self.elements
    }

    /// Largest off-identity entry of the Gram matrix, recomputed at
    /// construction time from the analytic moments.
    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    /// Largest coefficient of Delta_u applied to the orthonormalized
    /// elements.  The integer-basis Laplacian is exactly zero; this records
    /// the rounding dust introduced by orthonormalization.
    pub fn laplacian_defect(&self) -> f64 {
        self.laplacian_defect
    }

    pub fn evaluator(&self) -> BasisEvaluator {
        BasisEvaluator::new(self)
    }

    /// Evaluate every basis element at u.
    pub fn eval_all(&self, u: &[f64]) -> Vec<f64> {
        self.elements.iter().map(|p| p.eval_u(u)).collect()
    }
}

/// Flattened representation of a basis for quadrature inner loops: shared
/// power table per point, then one fused multiply-add pass per element.
pub struct BasisEvaluator {
    m: usize,
    max_exp: usize,
    elements: Vec<Vec<(Box<[u8]>, f64)>>,
}

impl BasisEvaluator {
    fn new(basis: &HarmonicBasis) -> Self {
        let max_exp = basis
            .elements
            .iter()
            .flat_map(|p| p.terms.keys())
            .flat_map(|mono| mono.u.iter())
            .map(|&e| e as usize)
            .max()
            .unwrap_or(0);
        let elements = basis
            .elements
            .iter()
            .map(|p| {
                p.terms
                    .iter()
                    .map(|(mono, &c)| (mono.u.clone(), c))
                    .collect()
            })
            .collect();
        BasisEvaluator {
            m: basis.m,
            max_exp,
            elements,
        }
    }

    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    /// Scratch buffer of the right size for `eval_into`.
    pub fn power_table(&self) -> Vec<f64> {
        vec![0.0; self.m * (self.max_exp + 1)]
    }

    pub fn eval_into(&self, u: &[f64], powers: &mut [f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.m);
        debug_assert_eq!(out.len(), self.elements.len());
        let width = self.max_exp + 1;
        for i in 0..self.m {
            powers[i * width] = 1.0;
            for e in 1..width {
                powers[i * width + e] = powers[i * width + e - 1] * u[i];
            }
        }
        for (j, terms) in self.elements.iter().enumerate() {
            let mut acc = 0.0;
            for (exps, c) in terms {
                let mut t = *c;
                for (i, &e) in exps.iter().enumerate() {
                    if e > 0 {
                        t *= powers[i * width + e as usize];
                    }
                }
                acc += t;
            }
            out[j] = acc;
        }
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut powers = self.power_table();
        let mut out = vec![0.0; self.elements.len()];
        self.eval_into(u, &mut powers, &mut out);
        out
    }
}

/// Kernel of Delta_u on the degree-k monomials, as primitive integer
/// coefficient vectors over the lexicographic monomial list.
fn harmonic_kernel_integer(m: usize, k: u32) -> Vec<(Vec<Vec<u8>>, Vec<i128>)> {
    let cols = monomials_of_degree(m, k);
    if k < 2 {
        // Every polynomial of degree < 2 is harmonic.
        return cols
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let mut v = vec![0i128; cols.len()];
                v[j] = 1;
                (cols.clone(), v)
            })
            .collect();
    }
    let rows = monomials_of_degree(m, k - 2);
    let row_index: BTreeMap<&Vec<u8>, usize> =
        rows.iter().enumerate().map(|(i, r)| (r, i)).collect();

    // a[row][col] = coefficient of the row monomial in Delta(col monomial).
    let mut a = vec![vec![BigRational::zero(); cols.len()]; rows.len()];
    for (j, beta) in cols.iter().enumerate() {
        for i in 0..m {
            let e = beta[i] as i64;
            if e >= 2 {
                let mut gamma = beta.clone();
                gamma[i] -= 2;
                let r = row_index[&gamma];
                a[r][j] += BigRational::from(BigInt::from(e * (e - 1)));
            }
        }
    }

    // Reduced row echelon form over exact rationals.
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols.len() {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot_row);
        let inv = a[rank][col].recip();
        for c in col..cols.len() {
            let v = &a[rank][c] * &inv;
            a[rank][c] = v;
        }
        for r in 0..rows.len() {
            if r != rank && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..cols.len() {
                    let v = &a[r][c] - &factor * &a[rank][c];
                    a[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }

    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in (0..cols.len()).filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![BigRational::zero(); cols.len()];
        v[free] = BigRational::one();
        for (r, &p) in pivot_cols.iter().enumerate() {
            v[p] = -a[r][free].clone();
        }
        // Clear denominators and divide out the content.
        let mut lcm = BigInt::one();
        for entry in &v {
            if !entry.is_zero() {
                lcm = num_integer_lcm(&lcm, entry.denom());
            }
        }
        let ints: Vec<BigInt> = v
            .iter()
            .map(|entry| (entry * BigRational::from(lcm.clone())).to_integer())
            .collect();
        let mut gcd = BigInt::zero();
        for entry in &ints {
            gcd = num_integer_gcd(&gcd, entry);
        }
        let sign = ints
            .iter()
            .find(|e| !e.is_zero())
            .map(|e| if e.is_negative() { -1 } else { 1 })
            .unwrap_or(1);
        let scaled: Vec<i128> = ints
            .iter()
            .map(|e| {
                let reduced = e / &gcd * BigInt::from(sign);
                i128::try_from(&reduced).expect("kernel coefficient exceeds i128")
            })
            .collect();
        kernel.push((cols.clone(), scaled));
    }
    kernel
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a * b).abs() / num_integer_gcd(a, b)
}

/// Exact coefficient-level check that an integer vector lies in the kernel
/// of Delta_u: for every degree-(k-2) monomial gamma the contributions
/// sum to zero in integer arithmetic.
fn check_kernel_exact(m: usize, k: u32, cols: &[Vec<u8>], v: &[i128]) -> bool {
    if k < 2 {
        return true;
    }
    let mut sums: BTreeMap<Vec<u8>, i128> = BTreeMap::new();
    for (j, beta) in cols.iter().enumerate() {
        if v[j] == 0 {
            continue;
        }
        for i in 0..m {
            let e = beta[i] as i128;
            if e >= 2 {
                let mut gamma = beta.clone();
                gamma[i] -= 2;
                *sums.entry(gamma).or_insert(0) += e * (e - 1) * v[j];
            }
        }
    }
    sums.values().all(|&s| s == 0)
}

/// Construct the dS-orthonormal basis of H_k.  Budgeted: the monomial count
/// C(m+k-1, m-1) must stay at desk scale.
pub fn harmonic_basis(m: usize, k: usize) -> Result<HarmonicBasis> {
    if !(2..=8).contains(&m) {
        return Err(Error::DimensionOutOfRange { m, min: 2, max: 8 });
    }
    let monomial_count = binomial((m + k - 1) as u64, (m - 1) as u64);
    if monomial_count > 3000 {
        return Err(Error::BudgetExceeded {
            needed: monomial_count as usize,
            budget: 3000,
        });
    }

    let kernel = harmonic_kernel_integer(m, k as u32);
    let expected = hk_dim(m, k);
    assert_eq!(
        kernel.len(),
        expected,
        "harmonic kernel rank disagrees with the dimension formula"
    );

    let mut raw: Vec<MultiPoly> = Vec::with_capacity(kernel.len());
    for (cols, v) in &kernel {
        assert!(
            check_kernel_exact(m, k as u32, cols, v),
            "integer kernel vector fails the exact harmonicity check"
        );
        let mut p = MultiPoly::zero(m);
        for (j, &c) in v.iter().enumerate() {
            if c != 0 {
                assert!(
                    c.unsigned_abs() < (1u128 << 53),
                    "kernel coefficient not exactly representable"
                );
                p.add_term(Monomial::u_only(cols[j].clone()), c as f64);
            }
        }
        // Integer arithmetic is exact in f64 at this scale, so the raw
        // Laplacian must cancel to literal zero.
        assert!(p.laplacian_u().is_zero());
        raw.push(p);
    }

    // Modified Gram-Schmidt against the moment inner product, with one
    // re-orthogonalization pass for stability.
    let mut elements: Vec<MultiPoly> = Vec::with_capacity(raw.len());
    for p in &raw {
        let mut v = p.clone();
        for _ in 0..2 {
            for q in &elements {
                let proj = sphere_inner_product(&v, q);
                v = v.sub(&q.scaled(proj));
            }
        }
        let norm = sphere_inner_product(&v, &v).sqrt();
        assert!(norm > 1e-8, "degenerate vector in Gram-Schmidt");
        elements.push(v.scaled(1.0 / norm));
    }

    let mut gram_defect: f64 = 0.0;
    for i in 0..elements.len() {
        for j in i..elements.len() {
            let g = sphere_inner_product(&elements[i], &elements[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            gram_defect = gram_defect.max((g - target).abs());
        }
    }
    let laplacian_defect = elements
        .iter()
        .map(|p| p.laplacian_u().max_abs_coeff())
        .fold(0.0, f64::max);

    Ok(HarmonicBasis {
        m,
        k,
        elements,
        gram_defect,
        laplacian_defect,
    })
}

/// Shared basis cache keyed by (m, k); suites and solvers reuse bases.
pub fn shared_basis(m: usize, k: usize) -> std::sync::Arc<HarmonicBasis> {
    use std::sync::{Arc, LazyLock, Mutex};
    static CACHE: LazyLock<Mutex<BTreeMap<(usize, usize), Arc<HarmonicBasis>>>> =
        LazyLock::new(|| Mutex::new(BTreeMap::new()));
    let mut cache = CACHE.lock().unwrap();
    cache
        .entry((m, k))
        .or_insert_with(|| Arc::new(harmonic_basis(m, k).expect("basis within budget")))
        .clone()
}

/// Coefficients of p in the basis, with a residual guard: p must lie in the
/// span up to 1e-10 coefficient-wise.
pub fn expand_in_basis(p: &MultiPoly, basis: &HarmonicBasis) -> Result<Vec<f64>> {
    assert_eq!(p.vars(), basis.m);
    let coeffs: Vec<f64> = basis
        .elements
        .iter()
        .map(|phi| sphere_inner_product(p, phi))
        .collect();
    let mut residual = p.clone();
    for (c, phi) in coeffs.iter().zip(&basis.elements) {
        residual = residual.sub(&phi.scaled(*c));
    }
    let defect = residual.max_abs_coeff();
    if defect > 1e-10 {
        return Err(Error::NotInSpan { residual: defect });
    }
    Ok(coeffs)
}
