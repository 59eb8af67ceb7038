/// Numerical thresholds shared by every analysis.
///
/// `rank_tol` is relative to `max(1, σ_max)` of the matrix whose
/// kernel is being computed. `eq_tol` is scaled by `max(1, norm)` of the
/// quantity being compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rank_tol: f64,
    pub eq_tol: f64,
    pub psd_tol: f64,
    /// Largest operator dimension accepted (superoperators have `dim^4` entries).
    pub max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank_tol: 1e-10, eq_tol: 1e-9, psd_tol: 1e-9, max_dim: 32 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("rank_tol", self.rank_tol), ("eq_tol", self.eq_tol), ("psd_tol", self.psd_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(crate::Error::Input(format!("tolerance {name} must be strictly positive, got {v}")));
            }
        }
        if self.max_dim == 0 {
            return Err(crate::Error::Input("max_dim must be positive".into()));
        }
        Ok(())
    }

    /// `residual <= eq_tol * max(1, scale)`.
    pub fn close(&self, residual: f64, scale: f64) -> bool {
        residual <= self.eq_tol * scale.max(1.0)
    }

    pub fn check_dim(&self, dim: usize) -> crate::Result<()> {
        if dim == 0 {
            return Err(crate::Error::Input("dimension must be positive".into()));
        }
        if dim > self.max_dim {
            return Err(crate::Error::DimensionTooLarge { dim, cap: self.max_dim });
        }
        Ok(())
    }
}

pub const DEFAULT_TIMES: [f64; 6] = [0.0, 0.1, 0.5, 1.0, 2.0, 10.0];
pub const DEFAULT_SEED: u64 = 0x5eed_0f_7e57;

/// Tolerances plus the knobs of every sampled check.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub tol: Tolerances,
    pub seed: u64,
    pub samples: usize,
    pub k_max: usize,
    pub times: Vec<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            seed: DEFAULT_SEED,
            samples: 200,
            k_max: 2,
            times: DEFAULT_TIMES.to_vec(),
        }
    }
}

impl AnalysisOptions {
    /// Sample times with `t = 0` removed (it is trivially satisfied by every clause).
    pub fn positive_times(&self) -> Vec<f64> {
        self.times.iter().copied().filter(|&t| t > 0.0).collect()
    }
}
