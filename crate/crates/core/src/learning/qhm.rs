use std::time::Instant;

use crate::complexity::OpCounter;
use crate::error::{Error, Result};
use crate::householder::{triangularize_basis, HouseholderDictionary, Reflector, ORTHOGONAL_SET_TOL};
use crate::linalg::eigen::sym_eig_smallest;
use crate::linalg::matrix::DenseMatrix;
use crate::linalg::qr::orthogonalize_against;
use crate::linalg::random::{random_unit_vector, seeded_rng};
use crate::linalg::svd::economy_svd;
use crate::sparse::SparseCodeMatrix;

use super::diagnostics::{gershgorin_check, local_min_check, spectrum_report};
use super::{
    negative_threshold, objective, sparse_step_tallied, Dictionary, FinalDiagnostics, Init, LearnedDictionary,
    StallDetector, TrainConfig, TrainOutcome, TrainReport, Variant, DRIFT_FLAG_TOL,
};

/// `Z̃ = XYᵀ + YXᵀ`, exactly symmetric.
pub fn build_z_orthogonal(y: &DenseMatrix, x: &SparseCodeMatrix) -> Result<DenseMatrix> {
    Ok(x.mul_dense_t(y)?.symmetrize_sum())
}

/// Result of one orthogonal-set dictionary update.
#[derive(Debug, Clone)]
pub struct QhUpdate {
    pub dictionary: HouseholderDictionary,
    /// Negative eigenvalues whose eigenvectors became reflectors, ascending.
    pub selected_eigenvalues: Vec<f64>,
    pub effective_m: usize,
    /// Pairwise orthogonality drift of the eigenvectors before any repair.
    pub drift: f64,
}

impl QhUpdate {
    /// Objective drop relative to `U = I` for the codes that produced `Z̃`.
    pub fn predicted_decrease(&self) -> f64 {
        -2.0 * self.selected_eigenvalues.iter().sum::<f64>()
    }
}

/// Best orthogonal set of at most `m` reflectors for fixed codes: the
/// eigenvectors of the negative eigenvalues among the `m` smallest of `z`.
/// The lowest eigenvalue goes to `u_m`; reflectors without a negative
/// eigenvalue are zero, starting from `u_1`.
pub fn qhm_dictionary_update(z: &DenseMatrix, m: usize) -> Result<QhUpdate> {
    let n = z.rows();
    let eig = sym_eig_smallest(z, m)?;
    let threshold = negative_threshold(z);
    let mut reflectors = vec![Reflector::identity(n); m];
    let mut selected = Vec::new();
    for (i, &lambda) in eig.values.iter().enumerate() {
        if lambda < threshold {
            reflectors[m - 1 - i] = Reflector::from_direction(&eig.vector(i));
            selected.push(lambda);
        }
    }
    let effective_m = selected.len();
    let (reflectors, drift) = enforce_orthogonal(reflectors);
    Ok(QhUpdate {
        dictionary: HouseholderDictionary::new(n, reflectors, true)?,
        selected_eigenvalues: selected,
        effective_m,
        drift,
    })
}

fn pairwise_drift(reflectors: &[Reflector]) -> f64 {
    let mut drift = 0.0f64;
    for (i, a) in reflectors.iter().enumerate() {
        for b in &reflectors[i + 1..] {
            drift = drift.max(crate::linalg::dot(a.vector(), b.vector()).abs());
        }
    }
    drift
}

/// Gram-Schmidt over the non-zero reflectors in order `u_1 … u_m` when the
/// set is not already orthogonal. Dependent reflectors become zero.
fn enforce_orthogonal(reflectors: Vec<Reflector>) -> (Vec<Reflector>, f64) {
    let drift = pairwise_drift(&reflectors);
    if drift <= ORTHOGONAL_SET_TOL {
        return (reflectors, drift);
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let out = reflectors
        .into_iter()
        .map(|r| {
            if r.is_identity() {
                return r;
            }
            match orthogonalize_against(r.vector(), &basis) {
                Some(v) => {
                    let refl = Reflector::from_direction(&v);
                    basis.push(v);
                    refl
                }
                None => Reflector::identity(r.dim()),
            }
        })
        .collect();
    (out, drift)
}

/// Initial reflectors shared by the reflector trainers.
pub(crate) fn reflector_init(y: &DenseMatrix, cfg: &TrainConfig, orthogonal: bool) -> Result<Vec<Reflector>> {
    let n = y.rows();
    let m = cfg.m;
    let reflectors = match &cfg.init {
        Init::Svd => {
            let k = (m + 1).min(n).min(y.cols());
            let svd = economy_svd(y, k)?;
            let used = m.min(k);
            let mut r = vec![Reflector::identity(n); m - used];
            r.extend(triangularize_basis(&svd.u, used)?);
            r
        }
        Init::Random => {
            let mut rng = seeded_rng(cfg.seed);
            (0..m)
                .map(|_| Reflector::from_direction(&random_unit_vector(&mut rng, n)))
                .collect()
        }
        Init::Given(Dictionary::Householder(h)) => {
            if h.len() != m {
                return Err(Error::dims(format!("{m} initial reflectors"), format!("{}", h.len())));
            }
            h.reflectors().to_vec()
        }
        Init::Given(Dictionary::Dense(_)) => {
            return Err(Error::Unsupported(
                "reflector trainers need a reflector dictionary as the initial value".into(),
            ))
        }
    };
    Ok(if orthogonal {
        enforce_orthogonal(reflectors).0
    } else {
        reflectors
    })
}

pub fn qhm_train(y: &DenseMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    if cfg.variant != Variant::Qhm {
        return Err(Error::Domain(format!("qhm trainer called with variant {}", cfg.variant)));
    }
    let n = y.rows();
    cfg.validate(n)?;
    y.check_finite()?;
    let started = Instant::now();
    let energy = y.frobenius_sq();

    let init = HouseholderDictionary::new(n, reflector_init(y, cfg, true)?, true)?;
    let mut report = TrainReport::new(Variant::Qhm);
    report.flags.max_orthogonality_drift = init.orthogonality_drift();
    let mut counter = OpCounter::default();
    let mut dict = Dictionary::Householder(init);
    let mut x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
    report.push_objective(objective(y, &dict, &x)?, energy);

    let mut stall = StallDetector::default();
    for _ in 0..cfg.iterations {
        let z = build_z_orthogonal(y, &x)?;
        let update = qhm_dictionary_update(&z, cfg.m)?;
        if cfg.record_spectra {
            report.eigen_snapshots.push(spectrum_report(&z)?);
        }
        report.flags.identity_fixed_point = update.effective_m == 0;
        report.flags.max_orthogonality_drift = report.flags.max_orthogonality_drift.max(update.drift);
        report.effective_m.push(update.effective_m);
        dict = Dictionary::Householder(update.dictionary);
        report.dictionary_step_objectives.push(objective(y, &dict, &x)?);

        x = sparse_step_tallied(y, &dict, cfg.s, &mut counter)?;
        let previous = report.final_objective();
        let current = objective(y, &dict, &x)?;
        report.push_objective(current, energy);
        report.iterations_run += 1;
        log::debug!(
            "qhm iteration {}: objective {current:e}, effective m {}",
            report.iterations_run,
            report.effective_m.last().unwrap()
        );
        if stall.update(previous, current) && cfg.early_stop {
            report.flags.early_stopped = report.iterations_run < cfg.iterations;
            break;
        }
    }
    report.flags.drift_flagged = report.flags.max_orthogonality_drift > DRIFT_FLAG_TOL;
    if report.flags.drift_flagged {
        log::warn!("reflector set drifted from orthogonality by {:e}", report.flags.max_orthogonality_drift);
    }
    report.eigen_snapshots.push(spectrum_report(&build_z_orthogonal(y, &x)?)?);
    finish(y, dict, x, cfg, report, counter, started)
}

pub(crate) fn finish(
    y: &DenseMatrix,
    dict: Dictionary,
    x: SparseCodeMatrix,
    cfg: &TrainConfig,
    mut report: TrainReport,
    counter: OpCounter,
    started: Instant,
) -> Result<TrainOutcome> {
    let g = gershgorin_check(y, &dict, &x)?;
    let lm = local_min_check(y, &dict, &x)?;
    report.diagnostics = Some(FinalDiagnostics {
        gershgorin_psd: g.diagonally_dominant_psd,
        min_gershgorin_margin: g.min_margin(),
        nuclear_gap: lm.nuclear_gap,
    });
    report.apply_ops = counter.ops;
    report.wall_time = started.elapsed();
    Ok(TrainOutcome {
        learned: LearnedDictionary {
            dictionary: dict,
            config: cfg.clone(),
        },
        codes: x,
        report,
    })
}
