use std::fmt::Write as _;
use std::time::Duration;

use super::diagnostics::Spectrum;
use super::Variant;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportFlags {
    /// The final reflector update found no negative eigenvalue and returned
    /// the identity.
    pub identity_fixed_point: bool,
    /// Largest pairwise `|uᵢᵀuⱼ|` seen in an orthogonal reflector set.
    pub max_orthogonality_drift: f64,
    pub drift_flagged: bool,
    pub early_stopped: bool,
}

/// Optimality checks evaluated on the final `(dictionary, codes)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalDiagnostics {
    pub gershgorin_psd: bool,
    pub min_gershgorin_margin: f64,
    pub nuclear_gap: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub variant: Variant,
    /// Entry 0 is the objective right after initialization (codes from the
    /// initial dictionary); entry `k` follows iteration `k`.
    pub objective_per_iteration: Vec<f64>,
    pub relative_error_per_iteration: Vec<f64>,
    /// Objective after every dictionary update; one entry per reflector for
    /// `hm`, one per iteration otherwise.
    pub dictionary_step_objectives: Vec<f64>,
    /// Non-identity reflectors after each iteration's dictionary update.
    pub effective_m: Vec<usize>,
    /// Normalized `Z̃` spectra: one per iteration with `record_spectra`,
    /// otherwise only the final one. Empty for `qdla`.
    pub eigen_snapshots: Vec<Spectrum>,
    pub flags: ReportFlags,
    pub diagnostics: Option<FinalDiagnostics>,
    pub iterations_run: usize,
    pub wall_time: Duration,
    /// Scalar operations spent applying the dictionary adjoint in sparse steps.
    pub apply_ops: u64,
}

impl TrainReport {
    pub(crate) fn new(variant: Variant) -> Self {
        Self {
            variant,
            objective_per_iteration: Vec::new(),
            relative_error_per_iteration: Vec::new(),
            dictionary_step_objectives: Vec::new(),
            effective_m: Vec::new(),
            eigen_snapshots: Vec::new(),
            flags: ReportFlags::default(),
            diagnostics: None,
            iterations_run: 0,
            wall_time: Duration::ZERO,
            apply_ops: 0,
        }
    }

    pub(crate) fn push_objective(&mut self, objective: f64, energy: f64) {
        self.objective_per_iteration.push(objective);
        self.relative_error_per_iteration
            .push(if energy > 0.0 { objective / energy } else { 0.0 });
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_per_iteration.last().unwrap_or(&f64::NAN)
    }

    pub fn final_relative_error(&self) -> f64 {
        *self.relative_error_per_iteration.last().unwrap_or(&f64::NAN)
    }

    /// Every objective value in evaluation order, interleaving dictionary
    /// and sparse steps. Used to check monotonicity.
    pub fn objective_trace(&self) -> Vec<f64> {
        let per_iter = if self.iterations_run == 0 {
            0
        } else {
            self.dictionary_step_objectives.len() / self.iterations_run
        };
        let mut out = Vec::with_capacity(self.objective_per_iteration.len() + self.dictionary_step_objectives.len());
        for (k, &obj) in self.objective_per_iteration.iter().enumerate() {
            if k > 0 {
                out.extend_from_slice(&self.dictionary_step_objectives[(k - 1) * per_iter..k * per_iter]);
            }
            out.push(obj);
        }
        out
    }

    /// `iter,objective,relative_error`, one row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,objective,relative_error\n");
        for (k, (obj, rel)) in self
            .objective_per_iteration
            .iter()
            .zip(&self.relative_error_per_iteration)
            .enumerate()
        {
            let _ = writeln!(out, "{k},{obj:.17e},{rel:.17e}");
        }
        out
    }
}
