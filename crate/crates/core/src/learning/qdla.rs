use std::time::Instant;

use crate::complexity::OpCounter;
use crate::error::{Error, Result};
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::pca::partial_principal_components;
use crate::linalg::qr::{orthonormalize_completing, qr_orthonormalize};
use crate::linalg::random::{gaussian_vector, random_orthonormal, seeded_rng};
use crate::linalg::svd::procrustes;

use super::qhm::finish;
use super::{
    objective, sparse_step_tallied, Dictionary, Init, StallDetector,
    TrainConfig, TrainOutcome, TrainReport, Variant,
};

/// Upper bound on the number of principal components used to seed `qdla`.
pub const PARTIAL_COMPONENTS: usize = 16;

/// Leading principal directions of `y`, completed with seeded Gaussian
/// columns and orthonormalized.
pub fn qdla_init(y: &DenseMatrix, seed: u64) -> Result<DenseMatrix> {
    let n = y.rows();
    let k = n.min(PARTIAL_COMPONENTS);
    let pcs = partial_principal_components(y, k, seed)?;
    let mut columns = pcs.columns();
    let mut rng = seeded_rng(seed.wrapping_add(1));
    columns.extend((k..n).map(|_| gaussian_vector(&mut rng, n)));
    let basis = match qr_orthonormalize(&columns) {
        Ok(b) => b,
        Err(Error::Degenerate { .. }) => orthonormalize_completing(&columns, n),
        Err(e) => return Err(e),
    };
    DenseMatrix::from_columns(&basis)
}

pub fn qdla_train(y: &DenseMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if cfg.variant != Variant::Qdla {
        return Err(Error::Domain(format!("qdla trainer called with variant {}", cfg.variant)));
    }
    let n = y.rows();
    cfg.validate(n)?;
    y.check_finite()?;
    let started = Instant::now();
    let energy = y.frobenius_sq();

    let mut q = match &cfg.init {
        Init::Svd => qdla_init(y, cfg.seed)?,
        Init::Random => random_orthonormal(&mut seeded_rng(cfg.seed), n),
        Init::Given(d) => d.to_dense(),
    };
    let mut report = TrainReport::new(Variant::Qdla);
    let mut counter = OpCounter::default();
    let mut dict = Dictionary::Dense(q.clone());
    let mut x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
    report.push_objective(objective(y, &dict, &x)?, energy);

    let mut stall = StallDetector::default();
    for _ in 0..cfg.iterations {
        let yxt = x.mul_dense_t(y)?.transpose();
        q = procrustes(&yxt)?;
        dict = Dictionary::Dense(q.clone());
        report.dictionary_step_objectives.push(objective(y, &dict, &x)?);
        report.effective_m.push(n);

        x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
        let previous = report.final_objective();
        let current = objective(y, &dict, &x)?;
        report.push_objective(current, energy);
        report.iterations_run += 1;
        log::debug!("qdla iteration {}: objective {current:e}", report.iterations_run);
        if stall.update(previous, current) && cfg.early_stop {
            report.flags.early_stopped = report.iterations_run < cfg.iterations;
            break;
        }
    }

    finish(y, dict, x, cfg, report, counter, started)
}
