//! Tabular data model, CSV ingestion and the bundled planning dataset.

use crate::DatasetError;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Measurement scale of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementScale {
    Nominal,
    Ordinal,
    Interval,
    Ratio,
}

/// Operations a scale supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capability {
    Counting,
    Ordination,
    EquidistantRanges,
    AddSub,
    Division,
}

impl MeasurementScale {
    pub fn is_numeric(self) -> bool {
        matches!(self, Self::Interval | Self::Ratio)
    }

    pub fn capabilities(self) -> Vec<Capability> {
        scale_capabilities(self)
    }
}

/// Capability set of each scale.
pub fn scale_capabilities(scale: MeasurementScale) -> Vec<Capability> {
    use Capability::*;
    match scale {
        MeasurementScale::Nominal => vec![Counting],
        MeasurementScale::Ordinal => vec![Counting, Ordination],
        MeasurementScale::Interval => vec![Counting, Ordination, EquidistantRanges],
        MeasurementScale::Ratio => vec![Counting, Ordination, EquidistantRanges, AddSub, Division],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "lowercase")]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            Self::Numeric(v) => v.len(),
            Self::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub scale: MeasurementScale,
    pub values: ColumnValues,
}

impl Column {
    pub fn numeric(name: &str, scale: MeasurementScale, values: Vec<f64>) -> Self {
        debug_assert!(scale.is_numeric());
        Self {
            name: name.to_string(),
            scale,
            values: ColumnValues::Numeric(values),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: &str,
        scale: MeasurementScale,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        debug_assert!(!scale.is_numeric());
        Self {
            name: name.to_string(),
            scale,
            values: ColumnValues::Categorical(values.into_iter().map(Into::into).collect()),
        }
    }
}

/// A rectangular table; every column holds exactly `row_count` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    columns: Vec<Column>,
    row_count: usize,
}

impl Dataset {
    pub fn new(columns: Vec<Column>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(DatasetError::DuplicateHeader(c.name.clone()));
            }
        }
        let row_count = columns.first().map_or(0, |c| c.values.len());
        for c in &columns {
            if c.values.len() != row_count {
                return Err(DatasetError::RaggedRow {
                    row: c.values.len().min(row_count) + 1,
                    expected: row_count,
                    found: c.values.len(),
                });
            }
        }
        Ok(Self { columns, row_count })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column(&self, name: &str) -> Result<&Column, DatasetError> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64], DatasetError> {
        match &self.column(name)?.values {
            ColumnValues::Numeric(v) => Ok(v),
            ColumnValues::Categorical(_) => Err(DatasetError::NotNumeric(name.to_string())),
        }
    }

    /// Sample made of every value of a numeric column.
    pub fn sample(&self, name: &str) -> Result<Sample, DatasetError> {
        Ok(Sample::new(name, self.numeric(name)?.to_vec()))
    }

    /// Re-types a numeric column as categorical, labels being the shortest
    /// round-trip decimal rendering of each value.
    pub fn cast_to_categorical(
        mut self,
        name: &str,
        scale: MeasurementScale,
    ) -> Result<Self, DatasetError> {
        if scale.is_numeric() {
            return Err(DatasetError::NumericFactor(name.to_string()));
        }
        let col = self
            .columns
            .iter_mut()
            .find(|c| c.name == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))?;
        if let ColumnValues::Numeric(v) = &col.values {
            col.values = ColumnValues::Categorical(v.iter().map(|x| x.to_string()).collect());
        }
        col.scale = scale;
        Ok(self)
    }
}

/// Ordered measurements for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `f` to every value, keeping the label.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.label.clone(), self.values.iter().map(|&x| f(x)).collect())
    }
}

impl From<&[f64]> for Sample {
    fn from(v: &[f64]) -> Self {
        Sample::new("", v.to_vec())
    }
}

impl From<Vec<f64>> for Sample {
    fn from(v: Vec<f64>) -> Self {
        Sample::new("", v)
    }
}

/// Response values partitioned by the levels of one factor.
///
/// Groups keep first-appearance order; labels are unique and no group is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedSample {
    pub response_name: String,
    pub factor_name: String,
    groups: Vec<Sample>,
}

impl GroupedSample {
    pub fn new(
        response_name: impl Into<String>,
        factor_name: impl Into<String>,
        groups: Vec<Sample>,
    ) -> Result<Self, DatasetError> {
        let factor_name = factor_name.into();
        if groups.len() < 2 {
            return Err(DatasetError::TooFewTreatments {
                factor: factor_name,
                levels: groups.len(),
            });
        }
        let mut seen = HashSet::new();
        for g in &groups {
            if g.is_empty() {
                return Err(DatasetError::EmptyGroup(g.label.clone()));
            }
            if !seen.insert(g.label.as_str()) {
                return Err(DatasetError::DuplicateLabel(g.label.clone()));
            }
        }
        Ok(Self {
            response_name: response_name.into(),
            factor_name,
            groups,
        })
    }

    /// Convenience constructor from `(label, values)` pairs.
    pub fn from_pairs<L: Into<String>>(
        response_name: &str,
        factor_name: &str,
        pairs: impl IntoIterator<Item = (L, Vec<f64>)>,
    ) -> Result<Self, DatasetError> {
        Self::new(
            response_name,
            factor_name,
            pairs.into_iter().map(|(l, v)| Sample::new(l, v)).collect(),
        )
    }

    pub fn groups(&self) -> &[Sample] {
        &self.groups
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn total_n(&self) -> usize {
        self.groups.iter().map(Sample::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Sample::len).collect()
    }

    pub fn group(&self, label: &str) -> Option<&Sample> {
        self.groups.iter().find(|g| g.label == label)
    }

    /// Applies `f(group_index, value)` to every observation.
    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        Self {
            response_name: self.response_name.clone(),
            factor_name: self.factor_name.clone(),
            groups: self
                .groups
                .iter()
                .enumerate()
                .map(|(i, g)| g.map(|x| f(i, x)))
                .collect(),
        }
    }
}

/// Splits a numeric response column by the levels of a categorical factor.
pub fn select_response_factor(
    dataset: &Dataset,
    response: &str,
    factor: &str,
) -> Result<GroupedSample, DatasetError> {
    let values = dataset.numeric(response)?;
    let levels = match &dataset.column(factor)?.values {
        ColumnValues::Categorical(v) => v,
        ColumnValues::Numeric(_) => return Err(DatasetError::NumericFactor(factor.to_string())),
    };
    let mut groups: IndexMap<&str, Vec<f64>> = IndexMap::new();
    for (level, &x) in levels.iter().zip(values) {
        groups.entry(level.as_str()).or_default().push(x);
    }
    GroupedSample::new(
        response,
        factor,
        groups.into_iter().map(|(l, v)| Sample::new(l, v)).collect(),
    )
}

/// Column scales to apply at ingestion; unlisted columns are inferred
/// (numeric when every cell parses as a finite number, nominal otherwise).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestConfig {
    pub scales: IndexMap<String, MeasurementScale>,
}

impl IngestConfig {
    pub fn with_scale(mut self, column: &str, scale: MeasurementScale) -> Self {
        self.scales.insert(column.to_string(), scale);
        self
    }

    /// Config reproducing the scales of an existing dataset.
    pub fn from_dataset(d: &Dataset) -> Self {
        Self {
            scales: d.columns.iter().map(|c| (c.name.clone(), c.scale)).collect(),
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses comma-separated text with a mandatory header row.
pub fn parse_csv(text: &str, config: &IngestConfig) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(DatasetError::DuplicateHeader(h.clone()));
        }
    }
    let width = headers.len();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); width];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| DatasetError::Csv(e.to_string()))?;
        if record.len() != width {
            return Err(DatasetError::RaggedRow {
                row,
                expected: width,
                found: record.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            if field.trim().is_empty() {
                return Err(DatasetError::MissingCell {
                    row,
                    column: headers[j].clone(),
                });
            }
            cells[j].push(field.to_string());
        }
    }

    let mut columns = Vec::with_capacity(width);
    for (name, raw) in headers.into_iter().zip(cells) {
        let scale = match config.scales.get(&name) {
            Some(&s) => s,
            None if !raw.is_empty() && raw.iter().all(|c| parse_number(c).is_some()) => {
                MeasurementScale::Interval
            }
            None => MeasurementScale::Nominal,
        };
        let values = if scale.is_numeric() {
            let mut v = Vec::with_capacity(raw.len());
            for (i, cell) in raw.iter().enumerate() {
                v.push(parse_number(cell).ok_or_else(|| DatasetError::NonNumeric {
                    row: i + 1,
                    column: name.clone(),
                    value: cell.clone(),
                })?);
            }
            ColumnValues::Numeric(v)
        } else {
            ColumnValues::Categorical(raw)
        };
        columns.push(Column {
            name,
            scale,
            values,
        });
    }
    Dataset::new(columns)
}

/// Renders a dataset as RFC 4180 CSV; numbers use the shortest round-trip form.
pub fn render_csv(d: &Dataset) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(d.columns.iter().map(|c| c.name.as_str()))
        .expect("in-memory write");
    for r in 0..d.row_count {
        let row: Vec<String> = d
            .columns
            .iter()
            .map(|c| match &c.values {
                ColumnValues::Numeric(v) => v[r].to_string(),
                ColumnValues::Categorical(v) => v[r].clone(),
            })
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub const YEAR_MONTH: &str = "Year/Month";
pub const HELD_HOURS: &str = "Held Hours";
pub const EXPECTED_HOURS: &str = "Expected Hours";
pub const NUMBER_OF_CASES: &str = "Number of Cases";
pub const CASES_SIZE: &str = "Cases Size";
pub const DIFFERENCE: &str = "Difference (Expected - Held)";
pub const MOMENT: &str = "Moment";

/// Monthly change-request planning data: held vs expected hours before and
/// after an automated estimation plugin was adopted (16 months).
///
/// Cases Size labels are kept as recorded even where they disagree with the
/// case-count thresholds (2015/02: 65 cases, labelled L).
pub fn builtin_table2() -> Dataset {
    #[rustfmt::skip]
    const ROWS: [(&str, f64, f64, f64, &str, f64, &str); 16] = [
        ("2013/12", 259.878, 100.000, 36.0, "M", -159.878, "Before"),
        ("2014/01", 749.272, 580.000, 84.0, "L", -169.272, "Before"),
        ("2014/02", 570.343, 480.000, 74.0, "L", -90.343, "Before"),
        ("2014/03", 535.014, 480.000, 74.0, "L", -55.014, "Before"),
        ("2014/04", 311.262, 90.000, 33.0, "S", -221.262, "Before"),
        ("2014/05", 285.988, 80.000, 28.0, "S", -205.988, "Before"),
        ("2014/06", 279.633, 80.000, 28.0, "S", -199.633, "Before"),
        ("2014/07", 256.495, 480.000, 52.0, "M", 223.505, "Before"),
        ("2014/08", 437.427, 680.000, 52.0, "M", 242.573, "After"),
        ("2014/09", 450.845, 395.367, 58.0, "M", -55.478, "After"),
        ("2014/10", 225.472, 517.222, 75.0, "L", 291.750, "After"),
        ("2014/11", 602.305, 791.996, 95.0, "L", 189.691, "After"),
        ("2014/12", 450.147, 452.305, 62.0, "M", 2.158, "After"),
        ("2015/01", 327.089, 516.024, 70.0, "L", 188.935, "After"),
        ("2015/02", 258.536, 503.461, 65.0, "L", 244.925, "After"),
        ("2015/03", 310.315, 620.772, 80.0, "L", 310.457, "After"),
    ];
    use MeasurementScale::*;
    let columns = vec![
        Column::categorical(YEAR_MONTH, Ordinal, ROWS.iter().map(|r| r.0)),
        Column::numeric(HELD_HOURS, Ratio, ROWS.iter().map(|r| r.1).collect()),
        Column::numeric(EXPECTED_HOURS, Ratio, ROWS.iter().map(|r| r.2).collect()),
        Column::numeric(NUMBER_OF_CASES, Ratio, ROWS.iter().map(|r| r.3).collect()),
        Column::categorical(CASES_SIZE, Ordinal, ROWS.iter().map(|r| r.4)),
        Column::numeric(DIFFERENCE, Interval, ROWS.iter().map(|r| r.5).collect()),
        Column::categorical(MOMENT, Nominal, ROWS.iter().map(|r| r.6)),
    ];
    Dataset::new(columns).expect("bundled table is rectangular")
}
