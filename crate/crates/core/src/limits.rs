use crate::error::{Error, Result};

pub const MAX_CELLS_ENV: &str = "CONTCALC_MAX_CELLS";

/// Size bounds for exhaustive constructions.
///
/// `max_objects` and `max_morphisms` bound user-supplied groupoids. Derived
/// constructions are bounded by `max_cells`, and the source of a functor
/// groupoid by `max_fun_source_objects`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_objects: usize,
    pub max_morphisms: usize,
    pub max_fun_source_objects: usize,
    pub max_cells: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_objects: 12,
            max_morphisms: 48,
            max_fun_source_objects: 3,
            max_cells: 200_000,
        }
    }
}

impl Limits {
    /// Defaults, with `max_cells` overridden by `CONTCALC_MAX_CELLS` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(n) = std::env::var(MAX_CELLS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            limits.max_cells = n;
        }
        limits
    }

    pub fn with_max_size(mut self, n: usize) -> Self {
        self.max_objects = n;
        self.max_morphisms = n.saturating_mul(4);
        self
    }

    pub fn check_cells(&self, what: &str, actual: usize) -> Result<()> {
        if actual > self.max_cells {
            return Err(Error::SizeLimit {
                what: what.to_string(),
                actual,
                limit: self.max_cells,
            });
        }
        Ok(())
    }
}
