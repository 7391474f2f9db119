//! Per-iteration run records and the empirical rate estimate.

use crate::error::{OtError, Result};

/// How the working set of an iteration was chosen (or which baseline
/// produced the record).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionKind {
    Uniform,
    Band,
    Submatrix,
    Momentum,
    Sinkhorn,
}

impl SelectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionKind::Uniform => "uniform",
            SelectionKind::Band => "band",
            SelectionKind::Submatrix => "submatrix",
            SelectionKind::Momentum => "momentum",
            SelectionKind::Sinkhorn => "sinkhorn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: u64,
    pub objective: f64,
    pub feasibility_error: f64,
    /// Support cardinality of the iterate.
    pub support: usize,
    pub kind: SelectionKind,
    /// Wall time since the run started, in seconds.
    pub elapsed_secs: f64,
}

/// Ordered per-iteration history of one solver run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    records: Vec<IterationRecord>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; iteration indices must strictly increase.
    pub fn push(&mut self, record: IterationRecord) {
        if let Some(last) = self.records.last() {
            assert!(
                record.iteration > last.iteration,
                "trajectory iterations must strictly increase ({} after {})",
                record.iteration,
                last.iteration
            );
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Per-iteration geometric decay estimate of the optimality gap over a block
/// of `span` iterations: `1 - (gap_b / gap_a)^(1/span)`.
pub fn estimate_vhat(gap_a: f64, gap_b: f64, span: u64) -> Result<f64> {
    if !(gap_a > 0.0) || !(gap_b > 0.0) {
        return Err(OtError::InvalidParameter(format!(
            "gaps must be positive, got {gap_a} and {gap_b}"
        )));
    }
    if gap_b > gap_a {
        return Err(OtError::InvalidParameter(format!(
            "gap did not decrease over the block: {gap_b} > {gap_a}"
        )));
    }
    if span == 0 {
        return Err(OtError::InvalidParameter("span must be positive".into()));
    }
    Ok(1.0 - (gap_b / gap_a).powf(1.0 / span as f64))
}
