use crate::analysis::norms::{lp_norm, mass, Norm};
use crate::error::AnalysisError;
use crate::grid::StaggeredGrid;
use crate::momentum::velocity_l2;
use crate::state::State;

/// Diagnostics of one recorded time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRecord {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    /// Signed integral of `c`.
    pub mass: f64,
    pub u_l2: f64,
    /// `max |div u|` over cells.
    pub div_residual: f64,
    /// `-d/dt log ||c||_1`, filled in by [`NormSeries::fill_lambda_num`].
    pub lambda_num: Option<f64>,
    /// Smallest cell value of `c`.
    pub c_min: f64,
}

impl NormRecord {
    pub fn from_state(state: &State, grid: &StaggeredGrid) -> Self {
        NormRecord {
            t: state.t,
            l1: lp_norm(&state.c, grid, Norm::L1),
            l2: lp_norm(&state.c, grid, Norm::L2),
            linf: lp_norm(&state.c, grid, Norm::Linf),
            mass: mass(&state.c, grid),
            u_l2: velocity_l2(&state.u, &state.v, grid),
            div_residual: grid.max_divergence(&state.u, &state.v),
            lambda_num: None,
            c_min: state.c.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn norm(&self, p: Norm) -> f64 {
        match p {
            Norm::L1 => self.l1,
            Norm::L2 => self.l2,
            Norm::Linf => self.linf,
        }
    }
}

/// Time-ordered diagnostics of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormSeries {
    records: Vec<NormRecord>,
}

impl NormSeries {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; times must be strictly increasing.
    pub fn push(&mut self, record: NormRecord) -> Result<(), AnalysisError> {
        if let Some(last) = self.records.last() {
            if !(record.t > last.t) {
                return Err(AnalysisError::Invalid(format!(
                    "record time {} does not follow {}",
                    record.t, last.t
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[NormRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first(&self) -> Option<&NormRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&NormRecord> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, p: Norm) -> Vec<f64> {
        self.records.iter().map(|r| r.norm(p)).collect()
    }

    /// Fills the `lambda_num` column when the `L1` norm stays positive;
    /// otherwise leaves it empty.
    pub fn fill_lambda_num(&mut self) {
        if let Ok(rates) = super::numerical_decay_rate(self) {
            for (record, (_, rate)) in self.records.iter_mut().zip(rates) {
                record.lambda_num = Some(rate);
            }
        }
    }
}

impl FromIterator<NormRecord> for Result<NormSeries, AnalysisError> {
    fn from_iter<I: IntoIterator<Item = NormRecord>>(iter: I) -> Self {
        let mut series = NormSeries::new();
        for record in iter {
            series.push(record)?;
        }
        Ok(series)
    }
}
