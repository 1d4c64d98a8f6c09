//! Operation-count models for applying the different dictionaries, and the
//! counter used to check the reflector cost empirically.

use crate::error::{Error, Result};
use crate::householder::HouseholderDictionary;
use crate::linalg::random::{gaussian_vector, seeded_rng};

/// Sink for scalar-operation counts. The unit impl discards them and
/// compiles away.
pub trait OpTally {
    fn tally(&mut self, ops: u64);
}

impl OpTally for () {
    #[inline(always)]
    fn tally(&mut self, _ops: u64) {}
}

/// Counts multiply, add and scale operations on vector entries. The single
/// per-column doubling `ν = 2uᵀx` is a scalar bookkeeping step and is not
/// counted, matching `N_op = 4n` per reflector.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub ops: u64,
}

impl OpTally for OpCounter {
    #[inline]
    fn tally(&mut self, ops: u64) {
        self.ops += ops;
    }
}

/// Problem size for the cost formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    pub n: u64,
    pub m: u64,
    pub s: u64,
}

impl CostModel {
    pub fn new(n: u64, m: u64, s: u64) -> Result<Self> {
        if n == 0 || m == 0 || s == 0 || m > n || s > n {
            return Err(Error::Domain(format!("invalid cost model n={n}, m={m}, s={s}")));
        }
        Ok(Self { n, m, s })
    }

    /// `4nm`: one application of an `m`-reflector dictionary to a vector.
    pub fn householder_apply(&self) -> u64 {
        4 * self.n * self.m
    }

    /// `(2n − 1)n`: dense matrix-vector product.
    pub fn dense_apply(&self) -> u64 {
        (2 * self.n - 1) * self.n
    }

    pub fn omp(&self) -> u64 {
        omp_cost(self.n, self.s)
    }
}

/// Speed-up of an `m`-reflector dictionary over a dense orthonormal one.
pub fn speedup_qdla(n: u64, m: u64) -> f64 {
    assert!(m >= 1, "m must be positive");
    ((2 * n - 1) * n) as f64 / (4 * n * m) as f64
}

/// Fast cosine transform cost `5/2 n log₂n − 3n + 6`.
pub fn fct_cost(n: u64) -> Result<f64> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("FCT length {n} is not a power of two")));
    }
    let nf = n as f64;
    Ok(2.5 * nf * nf.log2() - 3.0 * nf + 6.0)
}

/// Speed-up of an `m`-reflector dictionary over the fast cosine transform.
pub fn speedup_fct(n: u64, m: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    Ok(fct_cost(n)? / (4 * n * m) as f64)
}

/// Table-style rendering: values ≥ 2 to the nearest integer, smaller values
/// to one decimal with a trailing `.0` dropped.
pub fn display_speedup(rho: f64) -> String {
    let text = if rho >= 2.0 {
        format!("{}", rho.round() as i64)
    } else {
        format!("{:.1}", (rho * 10.0).round() / 10.0)
    };
    match text.strip_suffix(".0") {
        Some(int) => format!("{int}x"),
        None => format!("{text}x"),
    }
}

/// `2sn² + 2s²n + 4sn + s³`.
pub fn omp_cost(n: u64, s: u64) -> u64 {
    2 * s * n * n + 2 * s * s * n + 4 * s * n + s * s * s
}

/// Applies `d` to `trials` seeded random vectors through the counting path
/// and returns the operations per column. Needs the `instrument` feature.
pub fn measure_apply_cost(d: &HouseholderDictionary, trials: usize) -> Result<u64> {
    if !cfg!(feature = "instrument") {
        return Err(Error::Unsupported("built without the `instrument` feature".into()));
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let mut rng = seeded_rng(0x5eed);
    let mut counter = OpCounter::default();
    for _ in 0..trials {
        let x = gaussian_vector(&mut rng, d.dim());
        d.apply_adjoint_vector(&x, &mut counter)?;
    }
    let per_column = counter.ops / trials as u64;
    debug_assert_eq!(per_column * trials as u64, counter.ops);
    Ok(per_column)
}

/// One row of the speed-up table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub m: u64,
    pub qdla: f64,
    pub fct: f64,
}

/// Reflector counts printed in the reference table.
pub const TABLE_M: [u64; 10] = [1, 2, 3, 4, 6, 8, 12, 16, 20, 24];

pub fn speedup_table(n: u64, ms: &[u64]) -> Result<Vec<SpeedupRow>> {
    ms.iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::Domain("m must be positive".into()));
            }
            Ok(SpeedupRow {
                m,
                qdla: speedup_qdla(n, m),
                fct: speedup_fct(n, m)?,
            })
        })
        .collect()
}
