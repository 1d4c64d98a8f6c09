//! Householder reflectors `I − 2uuᵀ` and dictionaries built as products of
//! them, `U = U_m ⋯ U_2 U_1`.
//!
//! Reflectors are stored in application order: `u_1` acts first when
//! computing `U x`. Every application goes through the rank-one update
//! `x − 2u(uᵀx)`, which costs `4n` scalar operations per reflector and
//! column; the dense matrix is only formed on request.

use crate::complexity::OpTally;
use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2, DenseMatrix};

/// Tolerance on `‖u‖ ∈ {0, 1}`.
pub const UNIT_TOL: f64 = 1e-12;
/// Computed reflector vectors (or residual tails) below this relative size
/// collapse to the identity reflector.
pub const ZERO_TOL: f64 = 1e-12;
/// Tolerance on mutual orthogonality of an orthogonal reflector set.
pub const ORTHOGONAL_SET_TOL: f64 = 1e-10;
/// Input orthonormality accepted by the factorizations.
pub const ORTHONORMAL_INPUT_TOL: f64 = 1e-8;

/// A Householder reflector. The zero vector encodes the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflector {
    u: Vec<f64>,
}

impl Reflector {
    /// Wraps a vector that is already unit norm or exactly zero.
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("reflector has non-finite entries".into()));
        }
        let norm = norm2(&u);
        if norm != 0.0 && (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("reflector norm {norm} is neither 0 nor 1")));
        }
        Ok(Self { u })
    }

    /// Normalizes `v`; vectors shorter than [`ZERO_TOL`] become the identity.
    pub fn from_direction(v: &[f64]) -> Self {
        let norm = norm2(v);
        if !(norm >= ZERO_TOL) {
            return Self::identity(v.len());
        }
        Self {
            u: v.iter().map(|x| x / norm).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self { u: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn vector(&self) -> &[f64] {
        &self.u
    }

    pub fn is_identity(&self) -> bool {
        self.u.iter().all(|&x| x == 0.0)
    }

    /// `I − 2uuᵀ`.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - 2.0 * self.u[i] * self.u[j]
        })
    }
}

/// `x − 2u(uᵀx)`.
pub fn reflect_vector(r: &Reflector, x: &[f64]) -> Result<Vec<f64>> {
    check_len(r.dim(), x.len())?;
    let mut out = x.to_vec();
    reflect_in_place(r.vector(), &mut out, &mut ());
    Ok(out)
}

#[inline]
pub(crate) fn reflect_in_place(u: &[f64], x: &mut [f64], tally: &mut impl OpTally) {
    let mut acc = 0.0;
    for (ui, xi) in u.iter().zip(x.iter()) {
        acc += ui * xi;
    }
    let nu = 2.0 * acc;
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi -= nu * ui;
    }
    tally.tally(4 * u.len() as u64);
}

/// `U X = X − u vᵀ` with `v = 2Xᵀu`.
pub fn reflect_matrix_left(r: &Reflector, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_len(r.dim(), x.rows())?;
    let mut out = x.clone();
    reflect_rows_in_place(r.vector(), &mut out, &mut ());
    Ok(out)
}

/// Row-oriented left application. Per column this performs the same
/// floating-point operations in the same order as [`reflect_in_place`].
pub(crate) fn reflect_rows_in_place(u: &[f64], x: &mut DenseMatrix, tally: &mut impl OpTally) {
    let cols = x.cols();
    let mut nu = vec![0.0; cols];
    for (i, &ui) in u.iter().enumerate() {
        for (acc, &xv) in nu.iter_mut().zip(x.row(i)) {
            *acc += ui * xv;
        }
    }
    for v in nu.iter_mut() {
        *v *= 2.0;
    }
    for (i, &ui) in u.iter().enumerate() {
        for (xv, &vk) in x.row_mut(i).iter_mut().zip(&nu) {
            *xv -= vk * ui;
        }
    }
    tally.tally(4 * (u.len() * cols) as u64);
}

/// `R U = R − 2(Ru)uᵀ`.
pub fn reflect_matrix_right(m: &DenseMatrix, r: &Reflector) -> Result<DenseMatrix> {
    check_len(r.dim(), m.cols())?;
    let mut out = m.clone();
    let u = r.vector();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let nu = 2.0 * dot(row, u);
        for (x, ui) in row.iter_mut().zip(u) {
            *x -= nu * ui;
        }
    }
    Ok(out)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::dims(format!("dimension {expected}"), format!("{got}")));
    }
    Ok(())
}

/// Diagonal matrix with ±1 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SignDiagonal {
    signs: Vec<f64>,
}

impl SignDiagonal {
    pub fn new(signs: Vec<f64>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::Domain("sign diagonal entries must be ±1".into()));
        }
        Ok(Self { signs })
    }

    pub fn identity(n: usize) -> Self {
        Self { signs: vec![1.0; n] }
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_diag(&self.signs)
    }
}

/// Product `U = U_m ⋯ U_1` of reflectors on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderDictionary {
    n: usize,
    reflectors: Vec<Reflector>,
    orthogonal_set: bool,
}

impl HouseholderDictionary {
    /// Validates dimensions and, for orthogonal sets, pairwise orthogonality.
    pub fn new(n: usize, reflectors: Vec<Reflector>, orthogonal_set: bool) -> Result<Self> {
        if let Some(bad) = reflectors.iter().position(|r| r.dim() != n) {
            return Err(Error::dims(format!("reflectors of dimension {n}"), format!("reflector {bad} of dimension {}", reflectors[bad].dim())));
        }
        let d = Self {
            n,
            reflectors,
            orthogonal_set,
        };
        if orthogonal_set {
            let drift = d.orthogonality_drift();
            if drift > ORTHOGONAL_SET_TOL {
                return Err(Error::Domain(format!("reflector set is not orthogonal (max |uᵢᵀuⱼ| = {drift:e})")));
            }
        }
        Ok(d)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            reflectors: Vec::new(),
            orthogonal_set: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of reflectors `m`, zero ones included.
    pub fn len(&self) -> usize {
        self.reflectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reflectors.is_empty()
    }

    pub fn reflectors(&self) -> &[Reflector] {
        &self.reflectors
    }

    pub fn orthogonal_set(&self) -> bool {
        self.orthogonal_set
    }

    /// Reflectors that are not the identity.
    pub fn effective_len(&self) -> usize {
        self.reflectors.iter().filter(|r| !r.is_identity()).count()
    }

    /// Largest `|uᵢᵀuⱼ|` over distinct pairs.
    pub fn orthogonality_drift(&self) -> f64 {
        let mut drift = 0.0f64;
        for (i, a) in self.reflectors.iter().enumerate() {
            for b in &self.reflectors[i + 1..] {
                drift = drift.max(dot(a.vector(), b.vector()).abs());
            }
        }
        drift
    }

    fn check_rows(&self, x: &DenseMatrix) -> Result<()> {
        check_len(self.n, x.rows())
    }

    /// `U X`, applying `u_1` first.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_rows(x)?;
        let mut out = x.clone();
        self.apply_in_place(&mut out, &mut ());
        Ok(out)
    }

    /// `Uᵀ Y`, applying `u_m` first.
    pub fn apply_adjoint(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_rows(y)?;
        let mut out = y.clone();
        self.apply_adjoint_in_place(&mut out, &mut ());
        Ok(out)
    }

    pub fn apply_in_place(&self, x: &mut DenseMatrix, tally: &mut impl OpTally) {
        for r in &self.reflectors {
            reflect_rows_in_place(r.vector(), x, tally);
        }
    }

    pub fn apply_adjoint_in_place(&self, y: &mut DenseMatrix, tally: &mut impl OpTally) {
        for r in self.reflectors.iter().rev() {
            reflect_rows_in_place(r.vector(), y, tally);
        }
    }

    pub fn apply_vector(&self, x: &[f64], tally: &mut impl OpTally) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        let mut out = x.to_vec();
        for r in &self.reflectors {
            reflect_in_place(r.vector(), &mut out, tally);
        }
        Ok(out)
    }

    pub fn apply_adjoint_vector(&self, y: &[f64], tally: &mut impl OpTally) -> Result<Vec<f64>> {
        check_len(self.n, y.len())?;
        let mut out = y.to_vec();
        for r in self.reflectors.iter().rev() {
            reflect_in_place(r.vector(), &mut out, tally);
        }
        Ok(out)
    }

    /// Dense `n × n` matrix. Orthogonal sets use the symmetric closed form
    /// `I − 2 Σ u_j u_jᵀ`.
    pub fn to_dense(&self) -> DenseMatrix {
        if self.orthogonal_set {
            let n = self.n;
            let mut out = DenseMatrix::identity(n);
            for r in &self.reflectors {
                let u = r.vector();
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] -= 2.0 * u[i] * u[j];
                    }
                }
            }
            out.symmetrize_sum().scale(0.5)
        } else {
            let mut out = DenseMatrix::identity(self.n);
            self.apply_in_place(&mut out, &mut ());
            out
        }
    }
}

/// Reflector sending `x` (restricted to entries `start..`) to a multiple of
/// `e_start`, with the cancellation-free sign. Returns the identity when the
/// entries below `start` are already negligible.
fn annihilator(x: &[f64], start: usize) -> Reflector {
    let n = x.len();
    let head = x[start];
    let tail: f64 = x[start + 1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm = head.hypot(tail);
    if norm == 0.0 || tail <= ZERO_TOL * norm {
        return Reflector::identity(n);
    }
    let mut v = vec![0.0; n];
    v[start..].copy_from_slice(&x[start..]);
    v[start] += if head >= 0.0 { norm } else { -norm };
    Reflector::from_direction(&v)
}

/// Factors an orthonormal `Q` as `U_{n−1} ⋯ U_1 D`. Reflector `j` (1-based)
/// has its first `j − 1` entries equal to zero.
pub fn factorize_orthonormal(q: &DenseMatrix) -> Result<(HouseholderDictionary, SignDiagonal)> {
    if !q.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", q.rows(), q.cols())));
    }
    q.check_finite()?;
    let deviation = q.orthonormality_deviation();
    if deviation > ORTHONORMAL_INPUT_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let n = q.rows();
    if n == 0 {
        return Ok((HouseholderDictionary::identity(0), SignDiagonal::identity(0)));
    }
    // QR of Qᵀ: H_{n−1} ⋯ H_1 Qᵀ = D, hence Q = D H_{n−1} ⋯ H_1
    // = (D H_{n−1} D) ⋯ (D H_1 D) D.
    let mut a = q.transpose();
    let mut raw = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n - 1 {
        let h = annihilator(&a.column(j), j);
        reflect_rows_in_place(h.vector(), &mut a, &mut ());
        raw.push(h);
    }
    let signs: Vec<f64> = (0..n).map(|i| if a[(i, i)] < 0.0 { -1.0 } else { 1.0 }).collect();
    let reflectors = raw
        .into_iter()
        .map(|h| {
            let u: Vec<f64> = h.vector().iter().zip(&signs).map(|(x, s)| x * s).collect();
            Reflector { u }
        })
        .collect();
    Ok((HouseholderDictionary::new(n, reflectors, false)?, SignDiagonal { signs }))
}

/// Reflectors `u_1 … u_m` that reduce the first `m` columns of the
/// orthonormal-column matrix `q` to upper-triangular form. The reflector that
/// annihilates the first column is `u_m`, so `Uᵀ q = U_1 ⋯ U_m q` is the
/// triangularized matrix and the leading columns of `U` reproduce those of
/// `q` up to sign.
pub fn triangularize_basis(q: &DenseMatrix, m: usize) -> Result<Vec<Reflector>> {
    q.check_finite()?;
    if m > q.cols() {
        return Err(Error::Domain(format!("{m} reflectors requested for {} columns", q.cols())));
    }
    let deviation = q.orthonormality_deviation();
    if deviation > ORTHONORMAL_INPUT_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let n = q.rows();
    let mut a = q.clone();
    let mut qr_order = Vec::with_capacity(m);
    for j in 0..m {
        let h = if j + 1 < n {
            annihilator(&a.column(j), j)
        } else {
            Reflector::identity(n)
        };
        reflect_rows_in_place(h.vector(), &mut a, &mut ());
        qr_order.push(h);
    }
    qr_order.reverse();
    Ok(qr_order)
}
