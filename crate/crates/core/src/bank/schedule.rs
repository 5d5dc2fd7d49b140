//! Warm-start and alignment schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitSource {
    KMeans,
    Prototype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alignment {
    Soft,
    Slot,
}

/// What one epoch (or evaluation) does with the bank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseConfig {
    pub init_source: InitSource,
    pub alignment: Alignment,
    /// Gate threshold; `None` disables gating.
    pub tau: Option<f64>,
    pub prototypes_frozen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleState {
    pub current_epoch: u32,
    pub warm_start_epoch: u32,
    pub alignment_switch_epoch: u32,
    pub total_epochs: u32,
    /// Gate threshold at the warm-start epoch.
    pub tau_start: f64,
}

impl Default for ScheduleState {
    fn default() -> Self {
        Self::new(5, 20, 100, 0.1)
    }
}

impl ScheduleState {
    pub fn new(warm_start_epoch: u32, alignment_switch_epoch: u32, total_epochs: u32, tau_start: f64) -> Self {
        Self {
            current_epoch: 0,
            warm_start_epoch,
            alignment_switch_epoch,
            total_epochs,
            tau_start,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.warm_start_epoch <= self.alignment_switch_epoch && self.alignment_switch_epoch <= self.total_epochs) {
            return Err(Error::InvalidConfig(format!(
                "schedule needs warm_start_epoch <= alignment_switch_epoch <= total_epochs, got {} / {} / {}",
                self.warm_start_epoch, self.alignment_switch_epoch, self.total_epochs
            )));
        }
        let tau = self.tau_start;
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidConfig(format!("tau_start must be >= 0, got {tau}")));
        }
        Ok(())
    }

    /// Linear decay from `tau_start` at the warm-start epoch to 0 at
    /// `total_epochs`, clamped at 0 afterwards.
    pub fn tau(&self, epoch: u32) -> f64 {
        let warm = self.warm_start_epoch;
        if epoch >= self.total_epochs || self.total_epochs <= warm {
            return 0.0;
        }
        let progress = f64::from(epoch.saturating_sub(warm)) / f64::from(self.total_epochs - warm);
        (self.tau_start * (1.0 - progress)).max(0.0)
    }

    /// Training phase for an epoch.
    pub fn phase(&self, epoch: u32) -> PhaseConfig {
        if epoch < self.warm_start_epoch {
            return PhaseConfig {
                init_source: InitSource::KMeans,
                alignment: Alignment::Soft,
                tau: None,
                prototypes_frozen: false,
            };
        }
        let alignment = if epoch < self.alignment_switch_epoch {
            Alignment::Soft
        } else {
            Alignment::Slot
        };
        PhaseConfig {
            init_source: InitSource::Prototype,
            alignment,
            tau: Some(self.tau(epoch)),
            prototypes_frozen: false,
        }
    }

    /// Evaluation: prototype initialization from the global set, bank frozen.
    pub fn eval_phase(&self) -> PhaseConfig {
        PhaseConfig {
            init_source: InitSource::Prototype,
            alignment: Alignment::Slot,
            tau: None,
            prototypes_frozen: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_table() {
        let s = ScheduleState::default();
        let p0 = s.phase(0);
        assert_eq!((p0.init_source, p0.alignment, p0.tau), (InitSource::KMeans, Alignment::Soft, None));
        assert_eq!(s.phase(4).init_source, InitSource::KMeans);
        let p5 = s.phase(5);
        assert_eq!((p5.init_source, p5.alignment), (InitSource::Prototype, Alignment::Soft));
        assert_eq!(p5.tau, Some(0.1));
        assert_eq!(s.phase(19).alignment, Alignment::Soft);
        assert_eq!(s.phase(20).alignment, Alignment::Slot);
        assert_eq!(s.phase(100).tau, Some(0.0));
        assert_eq!(s.phase(150).tau, Some(0.0));
        assert!((s.tau(52) - 0.1 * (1.0 - 47.0 / 95.0)).abs() < 1e-12);
        assert!(s.eval_phase().prototypes_frozen);
    }

    #[test]
    fn invalid_ordering_is_rejected() {
        assert!(ScheduleState::new(10, 5, 100, 0.1).validate().is_err());
        assert!(ScheduleState::new(5, 20, 10, 0.1).validate().is_err());
        assert!(ScheduleState::new(5, 20, 100, -1.0).validate().is_err());
    }
}
