//! Watts threshold contagions and the maps built from them.

mod io;
mod map;
mod wtm;

pub use io::{load_map, map_sidecar_path, save_map, write_telemetry_csv, MapSidecar, StoredMap};
pub use map::{contagion_map, ContagionMap, MapMode};
pub use wtm::{cluster_seed, wtm_run, ActivationRecord, EdgeCounts};

use serde::{Deserialize, Serialize};

/// Critical thresholds `(T_wfp, T_anc)` for a noisy ring lattice of noisiness
/// `alpha`: wavefront propagation needs `T < 1/(2 + 2α)`, new clusters appear
/// only for `T < α/(1 + α)`.
pub fn critical_thresholds(alpha: f64) -> (f64, f64) {
    (1.0 / (2.0 + 2.0 * alpha), alpha / (1.0 + alpha))
}

/// Qualitative contagion regime of a noisy ring lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    WfpAndAnc,
    WfpOnly,
    AncOnly,
    Neither,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::WfpAndAnc => "wfp+anc",
            Regime::WfpOnly => "wfp",
            Regime::AncOnly => "anc",
            Regime::Neither => "none",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `(alpha, threshold)`. A threshold equal to a critical value
/// counts as the phenomenon not occurring.
pub fn regime(alpha: f64, threshold: f64) -> Regime {
    let (t_wfp, t_anc) = critical_thresholds(alpha);
    match (threshold < t_wfp, threshold < t_anc) {
        (true, true) => Regime::WfpAndAnc,
        (true, false) => Regime::WfpOnly,
        (false, true) => Regime::AncOnly,
        (false, false) => Regime::Neither,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_at_one_third() {
        assert_eq!(critical_thresholds(1.0 / 3.0), (0.375, 0.25));
        assert_eq!(critical_thresholds(0.0), (0.5, 0.0));
        let (w, a) = critical_thresholds(0.5);
        assert!((w - 1.0 / 3.0).abs() < 1e-12 && (a - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn regimes() {
        let alpha = 1.0 / 3.0;
        assert_eq!(regime(alpha, 0.3), Regime::WfpOnly);
        assert_eq!(regime(alpha, 0.05), Regime::WfpAndAnc);
        assert_eq!(regime(alpha, 0.2), Regime::WfpAndAnc);
        assert_eq!(regime(alpha, 0.45), Regime::Neither);
        assert_eq!(regime(1.0, 0.3), Regime::AncOnly);
        // boundaries do not count
        assert_eq!(regime(alpha, 0.25), Regime::WfpOnly);
        assert_eq!(regime(alpha, 0.375), Regime::Neither);
        assert_eq!(regime(0.0, 0.0), Regime::WfpOnly);
    }
}
