use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2};

/// A vector whose norm drops below this fraction of its original norm during
/// orthogonalization is treated as dependent.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormalizes `vectors` in order (Gram-Schmidt with one full
/// re-orthogonalization pass). The output spans the same subspace and has
/// the same ordering; vector `i` of the output only depends on inputs `0..=i`.
pub fn qr_orthonormalize(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::dims(format!("vector length {n}"), format!("vector {index} of length {}", v.len())));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("vector {index} has non-finite entries")));
        }
        match orthogonalize_against(v, &basis) {
            Some(q) => basis.push(q),
            None => return Err(Error::Degenerate { index }),
        }
    }
    Ok(basis)
}

/// Projects `v` off the orthonormal `basis` twice and normalizes. Returns
/// `None` when what is left is numerically zero.
pub(crate) fn orthogonalize_against(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let original = norm2(v);
    if original == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
    let norm = norm2(&w);
    if norm <= RANK_TOL * original {
        return None;
    }
    w.iter_mut().for_each(|x| *x /= norm);
    Some(w)
}

/// Orthonormalizes in order and replaces any dependent vector by the first
/// standard basis vector that is independent of what has been kept so far.
pub(crate) fn orthonormalize_completing(vectors: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let mut next_unit = 0;
    for v in vectors {
        if let Some(q) = orthogonalize_against(v, &basis) {
            basis.push(q);
            continue;
        }
        loop {
            assert!(next_unit < n, "cannot complete more than n orthonormal vectors");
            let mut e = vec![0.0; n];
            e[next_unit] = 1.0;
            next_unit += 1;
            if let Some(q) = orthogonalize_against(&e, &basis) {
                basis.push(q);
                break;
            }
        }
    }
    basis
}
