use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the pipeline. Relative entries are
/// multiplied by the Frobenius norm of the Hamilton map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Floor of the cluster radius, relative to ‖S‖.
    pub cluster_rel: f64,
    /// Eigenvalues with |Im λ| below this (times ‖S‖) count as real.
    pub real_rel: f64,
    /// Absolute slack of semidefiniteness tests.
    pub psd: f64,
    /// Residual allowed for membership in sp(n), relative to 1 + ‖S‖.
    pub sp_rel: f64,
    /// Residual of structural identities, relative to ‖S‖ (or its square).
    pub structure_rel: f64,
    /// Largest principal-angle sine accepted as subspace equality.
    pub subspace: f64,
    /// Relative threshold for numerical nilpotency.
    pub nilpotent_rel: f64,
    /// Guard on |det cos| near focal times.
    pub det_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cluster_rel: 1e-6,
            real_rel: 1e-8,
            psd: 1e-9,
            sp_rel: 1e-10,
            structure_rel: 1e-8,
            subspace: 1e-6,
            nilpotent_rel: 1e-8,
            det_guard: 1e-8,
        }
    }
}
