//! Tabular results shared by sweeps, optimizers and figure drivers.

/// One value cell; failed solves are kept in place and flagged.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(f64),
    Divergent(String),
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Divergent(_) => None,
        }
    }
}

/// What the value column holds, which fixes its natural colour range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// σ_abs/σ under coherent drive, bounded by 1/4.
    CoherentAbsorption,
    /// σ_abs^inc/σ, a branching fraction bounded by 1.
    IncoherentAbsorption,
    /// Collective over independent-emitter absorption.
    Ratio,
    /// Any other quantity.
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub keys: Vec<f64>,
    pub value: Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub key_columns: Vec<String>,
    pub value_column: String,
    pub kind: ValueKind,
    pub rows: Vec<Row>,
    /// Present for full 2-D grids: rows are then axis-1-outer.
    pub grid: Option<(Axis, Axis)>,
}

impl SweepTable {
    pub fn new(name: &str, key_columns: &[&str], value_column: &str, kind: ValueKind) -> Self {
        Self {
            name: name.to_string(),
            metadata: Vec::new(),
            key_columns: key_columns.iter().map(|s| s.to_string()).collect(),
            value_column: value_column.to_string(),
            kind,
            rows: Vec::new(),
            grid: None,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, keys: Vec<f64>, value: Cell) {
        self.rows.push(Row { keys, value });
    }

    /// Finite values in row order.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(|r| r.value.value())
    }

    /// Value at grid position (i, j), axis 1 index first.
    pub fn at(&self, i: usize, j: usize) -> Option<&Cell> {
        let (_, a2) = self.grid.as_ref()?;
        self.rows.get(i * a2.values.len() + j).map(|r| &r.value)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.values()
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}
