use std::time::Instant;

use rand::seq::SliceRandom;

use crate::complexity::OpCounter;
use crate::error::{Error, Result};
use crate::householder::{reflect_in_place, reflect_rows_in_place, HouseholderDictionary, Reflector};
use crate::linalg::eigen::sym_eig_smallest;
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::random::{seeded_rng, SeededRng};
use crate::sparse::SparseCodeMatrix;

use super::diagnostics::spectrum_report;
use super::qhm::{finish, reflector_init};
use super::{
    negative_threshold, objective, sparse_step_tallied, Dictionary, StallDetector, TrainConfig, TrainOutcome,
    TrainReport, UpdateOrder, Variant,
};

/// `Z̃ = R_j + R_jᵀ` with `R_j = (U_{j−1} ⋯ U_1) X Yᵀ (U_m ⋯ U_{j+1})`, for
/// 1-based `j`. Built from reflector applications only.
pub fn hm_build_z(y: &DenseMatrix, x: &SparseCodeMatrix, reflectors: &[Reflector], j: usize) -> Result<DenseMatrix> {
    let m = reflectors.len();
    if j == 0 || j > m {
        return Err(Error::Domain(format!("reflector index {j} out of range 1..={m}")));
    }
    if let Some(bad) = reflectors.iter().find(|r| r.dim() != y.rows()) {
        return Err(Error::dims(format!("reflectors of dimension {}", y.rows()), format!("{}", bad.dim())));
    }
    Ok(direct_r(&x.mul_dense_t(y)?, reflectors, j - 1).symmetrize_sum())
}

/// `R_j` for 0-based `j` from `XYᵀ`.
fn direct_r(xyt: &DenseMatrix, reflectors: &[Reflector], j: usize) -> DenseMatrix {
    let mut r = xyt.clone();
    for u in &reflectors[..j] {
        reflect_rows_in_place(u.vector(), &mut r, &mut ());
    }
    for u in reflectors[j + 1..].iter().rev() {
        reflect_right(&mut r, u.vector());
    }
    r
}

/// `r ← r U` for the reflector `U = I − 2uuᵀ`.
fn reflect_right(r: &mut DenseMatrix, u: &[f64]) {
    for i in 0..r.rows() {
        reflect_in_place(u, r.row_mut(i), &mut ());
    }
}

/// Best single reflector for `z`: the eigenvector of `λ_min` when it is
/// negative, else zero. Returns the reflector and the eigenvalue it realizes.
fn min_eig_reflector(z: &DenseMatrix) -> Result<(Reflector, f64)> {
    let eig = sym_eig_smallest(z, 1)?;
    let lambda = eig.values[0];
    if lambda < negative_threshold(z) {
        Ok((Reflector::from_direction(&eig.vector(0)), lambda))
    } else {
        Ok((Reflector::identity(z.rows()), 0.0))
    }
}

/// One reflector update inside a sweep.
#[derive(Debug, Clone)]
pub struct SweepStep {
    /// 0-based reflector index.
    pub index: usize,
    /// `Z̃` the update was computed from.
    pub z: DenseMatrix,
    /// Eigenvalue realized by the new reflector (0 when it is zero).
    pub lambda: f64,
    /// Objective after the update, from `‖Y‖² + ‖X‖² − 2 tr(R_j) + 2λ`.
    pub objective: f64,
}

/// Updates every reflector once for fixed codes. The sequential order
/// carries `R_j` forward as `R_{j+1} = U_j R_j U_{j+1}`; the random order
/// recomputes it for each visited index.
pub fn hm_sweep(
    y: &DenseMatrix,
    x: &SparseCodeMatrix,
    reflectors: &mut [Reflector],
    update_order: UpdateOrder,
    order: &mut [usize],
    rng: &mut SeededRng,
) -> Result<Vec<SweepStep>> {
    let m = reflectors.len();
    if order.len() != m {
        return Err(Error::dims(format!("order of length {m}"), format!("{}", order.len())));
    }
    let xyt = x.mul_dense_t(y)?;
    let base = y.frobenius_sq() + x.frobenius_sq();
    let mut steps = Vec::with_capacity(m);
    let mut record = |index: usize, r: &DenseMatrix, reflectors: &mut [Reflector]| -> Result<()> {
        let z = r.symmetrize_sum();
        let (u, lambda) = min_eig_reflector(&z)?;
        reflectors[index] = u;
        steps.push(SweepStep {
            index,
            z,
            lambda,
            objective: base - 2.0 * r.trace() + 2.0 * lambda,
        });
        Ok(())
    };
    match update_order {
        UpdateOrder::Sequential => {
            if m == 0 {
                return Ok(Vec::new());
            }
            let mut r = direct_r(&xyt, reflectors, 0);
            for j in 0..m {
                record(j, &r, reflectors)?;
                if j + 1 < m {
                    // U_j is the new reflector, U_{j+1} still the old one.
                    reflect_rows_in_place(reflectors[j].vector(), &mut r, &mut ());
                    reflect_right(&mut r, reflectors[j + 1].vector());
                }
            }
        }
        UpdateOrder::Random => {
            order.shuffle(rng);
            for &j in order.iter() {
                let r = direct_r(&xyt, reflectors, j);
                record(j, &r, reflectors)?;
            }
        }
    }
    Ok(steps)
}

pub fn hm_train(y: &DenseMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if cfg.variant != Variant::Hm {
        return Err(Error::Domain(format!("hm trainer called with variant {}", cfg.variant)));
    }
    let n = y.rows();
    let m = cfg.m;
    cfg.validate(n)?;
    y.check_finite()?;
    let started = Instant::now();
    let energy = y.frobenius_sq();

    let mut reflectors = reflector_init(y, cfg, false)?;
    let mut report = TrainReport::new(Variant::Hm);
    let mut counter = OpCounter::default();
    let mut dict = Dictionary::Householder(HouseholderDictionary::new(n, reflectors.clone(), false)?);
    let mut x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
    report.push_objective(objective(y, &dict, &x)?, energy);

    let mut order_rng = seeded_rng(cfg.seed.wrapping_add(2));
    let mut order: Vec<usize> = (0..m).collect();
    let mut stall = StallDetector::default();
    for _ in 0..cfg.iterations {
        let steps = hm_sweep(y, &x, &mut reflectors, cfg.update_order, &mut order, &mut order_rng)?;
        report.dictionary_step_objectives.extend(steps.iter().map(|st| st.objective));
        let last_z = steps.into_iter().last().map(|st| st.z);
        if cfg.record_spectra {
            if let Some(z) = &last_z {
                report.eigen_snapshots.push(spectrum_report(z)?);
            }
        }
        let effective = reflectors.iter().filter(|r| !r.is_identity()).count();
        report.effective_m.push(effective);
        report.flags.identity_fixed_point = effective == 0;
        dict = Dictionary::Householder(HouseholderDictionary::new(n, reflectors.clone(), false)?);

        x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
        let previous = report.final_objective();
        let current = objective(y, &dict, &x)?;
        report.push_objective(current, energy);
        report.iterations_run += 1;
        log::debug!("hm iteration {}: objective {current:e}, effective m {effective}", report.iterations_run);
        if stall.update(previous, current) && cfg.early_stop {
            report.flags.early_stopped = report.iterations_run < cfg.iterations;
            break;
        }
    }
    report.eigen_snapshots.push(spectrum_report(&hm_build_z(y, &x, &reflectors, 1)?)?);
    finish(y, dict, x, cfg, report, counter, started)
}
