//! Alternating-minimization trainers for orthonormal sparsifying
//! dictionaries: unstructured (`qdla`), orthogonal reflector sets (`qhm`) and
//! general reflector products (`hm`), plus the optimality diagnostics.

mod diagnostics;
mod hm;
mod qdla;
mod qhm;
mod report;

use std::fmt;
use std::str::FromStr;

pub use diagnostics::{
    gershgorin_check, local_min_check, reflector_psd_check, spectrum_report, GershgorinReport, LocalMinReport,
    ReflectorPsdReport, Spectrum,
};
pub use hm::{hm_build_z, hm_sweep, hm_train, SweepStep};
pub use qdla::{qdla_init, qdla_train, PARTIAL_COMPONENTS};
pub use qhm::{build_z_orthogonal, qhm_dictionary_update, qhm_train, QhUpdate};
pub use report::{FinalDiagnostics, ReportFlags, TrainReport};

use crate::complexity::OpTally;
use crate::error::{Error, Result};
use crate::householder::HouseholderDictionary;
use crate::linalg::matrix::DenseMatrix;
use crate::sparse::{hard_threshold_top_s, SparseCodeMatrix};

/// Relative objective change that counts as stalled.
pub const STALL_TOL: f64 = 1e-10;
/// Consecutive stalled iterations before stopping early.
pub const STALL_PATIENCE: usize = 3;
/// Eigenvalues below `−NEGATIVE_TOL · ‖Z̃‖_F` count as negative.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Orthogonality drift of a `qhm` reflector set that gets flagged.
pub const DRIFT_FLAG_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Qdla,
    Qhm,
    Hm,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Qdla => "qdla",
            Variant::Qhm => "qhm",
            Variant::Hm => "hm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qdla" => Ok(Variant::Qdla),
            "qhm" => Ok(Variant::Qhm),
            "hm" => Ok(Variant::Hm),
            other => Err(Error::Domain(format!("unknown variant `{other}`"))),
        }
    }
}

/// Order in which `hm` visits the reflectors within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    #[default]
    Sequential,
    /// Seeded random permutation per iteration.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Data-driven start: partial principal components for `qdla`,
    /// triangularized leading singular vectors for the reflector variants.
    Svd,
    Random,
    Given(Dictionary),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub variant: Variant,
    /// Reflector count; ignored by `qdla`.
    pub m: usize,
    pub s: usize,
    /// Maximum number of iterations.
    pub iterations: usize,
    pub seed: u64,
    pub update_order: UpdateOrder,
    pub init: Init,
    /// Stop before `iterations` once the objective stalls.
    pub early_stop: bool,
    /// Keep the normalized `Z̃` spectrum of every iteration, not only the last.
    pub record_spectra: bool,
}

impl TrainConfig {
    pub fn new(variant: Variant, m: usize, s: usize, iterations: usize) -> Self {
        Self {
            variant,
            m,
            s,
            iterations,
            seed: 0,
            update_order: UpdateOrder::Sequential,
            init: Init::Svd,
            early_stop: true,
            record_spectra: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_update_order(mut self, order: UpdateOrder) -> Self {
        self.update_order = order;
        self
    }

    pub fn with_early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.s == 0 || self.s > n {
            return Err(Error::Domain(format!("sparsity {} out of range 1..={n}", self.s)));
        }
        if self.iterations == 0 {
            return Err(Error::Domain("at least one iteration is required".into()));
        }
        if self.variant != Variant::Qdla && self.m == 0 {
            return Err(Error::Domain("reflector variants need m ≥ 1".into()));
        }
        if self.variant == Variant::Qhm && self.m > n {
            return Err(Error::Domain(format!("an orthogonal reflector set holds at most {n} reflectors")));
        }
        if let Init::Given(d) = &self.init {
            if d.dim() != n {
                return Err(Error::dims(format!("initial dictionary of dimension {n}"), format!("{}", d.dim())));
            }
        }
        Ok(())
    }
}

/// An orthonormal dictionary in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Dictionary {
    Dense(DenseMatrix),
    Householder(HouseholderDictionary),
}

impl Dictionary {
    pub fn dim(&self) -> usize {
        match self {
            Dictionary::Dense(q) => q.rows(),
            Dictionary::Householder(h) => h.dim(),
        }
    }

    pub fn reflector_count(&self) -> Option<usize> {
        match self {
            Dictionary::Dense(_) => None,
            Dictionary::Householder(h) => Some(h.len()),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Dictionary::Dense(q) => q.clone(),
            Dictionary::Householder(h) => h.to_dense(),
        }
    }

    /// `D X`.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Dictionary::Dense(q) => q.matmul(x),
            Dictionary::Householder(h) => h.apply(x),
        }
    }

    /// `Dᵀ Y`.
    pub fn apply_adjoint(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        self.apply_adjoint_tallied(y, &mut ())
    }

    pub fn apply_adjoint_tallied(&self, y: &DenseMatrix, tally: &mut impl OpTally) -> Result<DenseMatrix> {
        if y.rows() != self.dim() {
            return Err(Error::dims(format!("{} rows", self.dim()), format!("{}", y.rows())));
        }
        match self {
            Dictionary::Dense(q) => {
                let n = q.rows() as u64;
                tally.tally((2 * n - 1) * n * y.cols() as u64);
                q.matmul_tn(y)
            }
            Dictionary::Householder(h) => {
                let mut out = y.clone();
                h.apply_adjoint_in_place(&mut out, tally);
                Ok(out)
            }
        }
    }

    /// `D X` for sparse codes.
    pub fn apply_sparse(&self, x: &SparseCodeMatrix) -> Result<DenseMatrix> {
        if x.rows() != self.dim() {
            return Err(Error::dims(format!("{} code rows", self.dim()), format!("{}", x.rows())));
        }
        match self {
            Dictionary::Dense(q) => x.left_mul_dense(q),
            Dictionary::Householder(h) => {
                let mut out = x.to_dense();
                h.apply_in_place(&mut out, &mut ());
                Ok(out)
            }
        }
    }

    /// Short label used in metrics output.
    pub fn kind(&self) -> &'static str {
        match self {
            Dictionary::Dense(_) => "dense",
            Dictionary::Householder(h) if h.orthogonal_set() => "qhm",
            Dictionary::Householder(_) => "hm",
        }
    }
}

/// A trained dictionary and the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnedDictionary {
    pub dictionary: Dictionary,
    pub config: TrainConfig,
}

/// Output of every trainer.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub learned: LearnedDictionary,
    pub codes: SparseCodeMatrix,
    pub report: TrainReport,
}

/// Dispatches on `cfg.variant`.
pub fn train(y: &DenseMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    match cfg.variant {
        Variant::Qdla => qdla_train(y, cfg),
        Variant::Qhm => qhm_train(y, cfg),
        Variant::Hm => hm_train(y, cfg),
    }
}

/// `‖Y − D X‖_F²`, never densifying a reflector dictionary.
pub fn objective(y: &DenseMatrix, d: &Dictionary, x: &SparseCodeMatrix) -> Result<f64> {
    if x.cols() != y.cols() || y.rows() != d.dim() {
        return Err(Error::dims(
            format!("{}x{} codes", d.dim(), y.cols()),
            format!("{}x{}", x.rows(), x.cols()),
        ));
    }
    let approx = d.apply_sparse(x)?;
    Ok(y.sub(&approx)?.frobenius_sq())
}

/// `T_s(Dᵀ Y)`, the optimal codes for a fixed orthonormal dictionary.
pub fn sparse_step(y: &DenseMatrix, d: &Dictionary, s: usize) -> Result<SparseCodeMatrix> {
    hard_threshold_top_s(&d.apply_adjoint(y)?, s)
}

pub(crate) fn sparse_step_tallied(
    y: &DenseMatrix,
    d: &Dictionary,
    s: usize,
    tally: &mut impl OpTally,
) -> Result<SparseCodeMatrix> {
    hard_threshold_top_s(&d.apply_adjoint_tallied(y, tally)?, s)
}

/// Tracks the stall criterion over successive objectives.
#[derive(Debug, Default)]
pub(crate) struct StallDetector {
    stalled: usize,
}

impl StallDetector {
    pub(crate) fn update(&mut self, previous: f64, current: f64) -> bool {
        let scale = previous.abs().max(f64::MIN_POSITIVE);
        if (previous - current).abs() / scale < STALL_TOL || previous == current {
            self.stalled += 1;
        } else {
            self.stalled = 0;
        }
        self.stalled >= STALL_PATIENCE
    }
}

pub(crate) fn negative_threshold(z: &DenseMatrix) -> f64 {
    -NEGATIVE_TOL * z.frobenius_norm()
}
