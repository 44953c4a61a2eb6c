//! The ERD-based student dataset: embedded records, CSV ingestion and the
//! train/test split used by the recorded experiments.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// CSV header accepted by [`load_dataset`] and written by [`Dataset::to_csv`].
pub const CSV_HEADER: &str = "serial,tcoe,tcoa,tcor,cgpa,rde";

/// Upper bound of the grade-point scale.
pub const CGPA_MAX: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("serial {serial}: {field} {message}")]
    Validation {
        serial: u32,
        field: &'static str,
        message: String,
    },
    #[error("duplicate serial {0}")]
    DuplicateSerial(u32),
    #[error("dataset is missing serial {0} required by the split")]
    MissingSerial(u32),
    #[error("split list `{0}` is empty")]
    EmptySplit(&'static str),
    #[error("cannot normalize an empty dataset")]
    EmptyDataset,
    #[error("feature `{0}` is constant over the training set")]
    ConstantFeature(&'static str),
}

/// One student project row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectRecord {
    pub serial: u32,
    /// Total count of entities.
    pub tcoe: u32,
    /// Total count of attributes.
    pub tcoa: u32,
    /// Total count of relationships.
    pub tcor: u32,
    pub cgpa: f64,
    /// Redistributed development effort, weeks.
    pub rde: f64,
}

impl ProjectRecord {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |field, message: String| DatasetError::Validation {
            serial: self.serial,
            field,
            message,
        };
        if self.serial < 1 {
            return Err(fail("serial", "must be >= 1".into()));
        }
        for (field, v) in [("tcoe", self.tcoe), ("tcoa", self.tcoa), ("tcor", self.tcor)] {
            if v < 1 {
                return Err(fail(field, format!("must be a count >= 1 (got {v})")));
            }
        }
        if !(self.cgpa > 0.0 && self.cgpa <= CGPA_MAX) {
            return Err(fail("cgpa", format!("must lie in (0, {CGPA_MAX}] (got {})", self.cgpa)));
        }
        if !(self.rde > 0.0 && self.rde.is_finite()) {
            return Err(fail("rde", format!("must be > 0 (got {})", self.rde)));
        }
        Ok(())
    }

    pub fn feature(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Tcoe => f64::from(self.tcoe),
            Feature::Tcoa => f64::from(self.tcoa),
            Feature::Tcor => f64::from(self.tcor),
            Feature::Cgpa => self.cgpa,
        }
    }
}

/// Explanatory variables of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Tcoe,
    Tcoa,
    Tcor,
    Cgpa,
}

impl Feature {
    pub const ALL: [Feature; 4] = [Feature::Tcoe, Feature::Tcoa, Feature::Tcor, Feature::Cgpa];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Tcoe => "tcoe",
            Feature::Tcoa => "tcoa",
            Feature::Tcor => "tcor",
            Feature::Cgpa => "cgpa",
        }
    }

    pub fn parse(s: &str) -> Option<Feature> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
    }

    /// Parses a comma separated list such as `tcoe,cgpa`.
    pub fn parse_list(s: &str) -> Option<Vec<Feature>> {
        let list: Option<Vec<_>> = s.split(',').map(Feature::parse).collect();
        list.filter(|l| !l.is_empty())
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    Embedded,
    File(String),
    Derived(String),
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Embedded => f.write_str("embedded"),
            DataSource::File(p) => write!(f, "file:{p}"),
            DataSource::Derived(d) => f.write_str(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<ProjectRecord>,
    pub source: DataSource,
}

impl Dataset {
    /// Validates every record and serial uniqueness.
    pub fn new(records: Vec<ProjectRecord>, source: DataSource) -> Result<Self, DatasetError> {
        let mut seen = std::collections::HashSet::new();
        for r in &records {
            r.validate()?;
            if !seen.insert(r.serial) {
                return Err(DatasetError::DuplicateSerial(r.serial));
            }
        }
        Ok(Dataset { records, source })
    }

    pub fn records(&self) -> &[ProjectRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, serial: u32) -> Option<&ProjectRecord> {
        self.records.iter().find(|r| r.serial == serial)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.serial, r.tcoe, r.tcoa, r.tcor, r.cgpa, r.rde
            ));
        }
        out
    }
}

// serial, tcoe, tcoa, tcor, cgpa, rde
const TABLE: [(u32, u32, u32, u32, f64, f64); 41] = [
    (1, 24, 70, 29, 6.219, 75.0),
    (2, 24, 70, 29, 8.012, 75.0),
    (3, 24, 70, 29, 7.733, 75.0),
    (4, 10, 56, 9, 7.564, 70.0),
    (5, 5, 44, 5, 5.519, 55.0),
    (6, 19, 47, 11, 7.507, 70.0),
    (7, 8, 33, 9, 6.171, 75.0),
    (8, 8, 33, 9, 6.705, 75.0),
    (9, 17, 53, 7, 7.629, 75.0),
    (10, 9, 37, 7, 8.130, 70.0),
    (11, 10, 36, 8, 8.083, 65.0),
    (12, 10, 36, 8, 8.126, 65.0),
    (13, 10, 36, 8, 7.202, 65.0),
    (14, 5, 17, 5, 8.417, 65.0),
    (15, 5, 16, 7, 7.757, 70.0),
    (16, 4, 26, 4, 7.431, 70.0),
    (17, 4, 26, 4, 7.121, 70.0),
    (18, 4, 26, 4, 7.660, 70.0),
    (19, 7, 34, 6, 8.017, 75.0),
    (20, 7, 34, 6, 9.076, 75.0),
    (21, 7, 27, 5, 7.550, 70.0),
    (22, 6, 37, 5, 6.583, 65.0),
    (23, 6, 27, 12, 7.276, 65.0),
    (24, 6, 27, 12, 8.124, 65.0),
    (25, 5, 26, 4, 6.530, 75.0),
    (26, 5, 26, 4, 6.685, 70.0),
    (27, 6, 28, 6, 7.843, 65.0),
    (28, 7, 38, 9, 9.160, 70.0),
    (29, 7, 38, 9, 8.617, 75.0),
    (30, 6, 18, 3, 8.719, 80.0),
    (31, 4, 22, 3, 8.860, 65.0),
    (32, 5, 18, 5, 7.664, 75.0),
    (33, 16, 85, 15, 6.795, 65.0),
    (34, 16, 85, 15, 6.757, 65.0),
    (35, 9, 36, 9, 6.207, 70.0),
    (36, 9, 36, 9, 6.636, 70.0),
    (37, 9, 36, 9, 6.790, 70.0),
    (38, 8, 24, 7, 8.095, 65.0),
    (39, 20, 115, 22, 7.990, 75.0),
    (40, 20, 115, 22, 8.095, 75.0),
    (41, 15, 60, 9, 6.340, 75.0),
];

/// The 41-record student dataset.
pub fn builtin_dataset() -> Dataset {
    let records = TABLE
        .iter()
        .map(|&(serial, tcoe, tcoa, tcor, cgpa, rde)| ProjectRecord {
            serial,
            tcoe,
            tcoa,
            tcor,
            cgpa,
            rde,
        })
        .collect();
    Dataset {
        records,
        source: DataSource::Embedded,
    }
}

/// Parses CSV text with header `serial,tcoe,tcoa,tcor,cgpa,rde`.
///
/// Counts must be integral. Row order is preserved.
pub fn load_dataset(csv_text: &str, source: DataSource) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(csv_text.as_bytes());

    let mut records = Vec::new();
    let mut header_seen = false;
    for row in reader.records() {
        let row = row.map_err(|e| DatasetError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            let header: Vec<&str> = row.iter().collect();
            if header.join(",") != CSV_HEADER {
                return Err(DatasetError::Parse {
                    line,
                    message: format!("expected header `{CSV_HEADER}`"),
                });
            }
            header_seen = true;
            continue;
        }
        if row.len() != 6 {
            return Err(DatasetError::Parse {
                line,
                message: format!("expected 6 fields, found {}", row.len()),
            });
        }
        let num = |idx: usize, name: &str| -> Result<f64, DatasetError> {
            row[idx]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::Parse {
                    line,
                    message: format!("field `{name}` is not a number: `{}`", &row[idx]),
                })
        };
        let serial_raw = num(0, "serial")?;
        let serial = as_count(serial_raw, line, "serial")?;
        let count = |idx: usize, name: &'static str| -> Result<u32, DatasetError> {
            let v = num(idx, name)?;
            if v < 1.0 {
                return Err(DatasetError::Validation {
                    serial,
                    field: name,
                    message: format!("must be a count >= 1 (got {v})"),
                });
            }
            as_count(v, line, name)
        };
        let record = ProjectRecord {
            serial,
            tcoe: count(1, "tcoe")?,
            tcoa: count(2, "tcoa")?,
            tcor: count(3, "tcor")?,
            cgpa: num(4, "cgpa")?,
            rde: num(5, "rde")?,
        };
        records.push(record);
    }
    if !header_seen {
        return Err(DatasetError::Parse {
            line: 1,
            message: format!("missing header `{CSV_HEADER}`"),
        });
    }
    Dataset::new(records, source)
}

fn as_count(v: f64, line: u64, name: &str) -> Result<u32, DatasetError> {
    if v.fract() != 0.0 || v < 0.0 || v > f64::from(u32::MAX) {
        return Err(DatasetError::Parse {
            line,
            message: format!("field `{name}` must be a non-negative integer (got {v})"),
        });
    }
    Ok(v as u32)
}

/// Serial lists selecting a train and a test subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_serials: Vec<u32>,
    pub test_serials: Vec<u32>,
}

impl SplitSpec {
    /// Train on serials 1-31, test on 31-41. Serial 31 is shared.
    pub fn recorded() -> Self {
        SplitSpec {
            train_serials: (1..=31).collect(),
            test_serials: (31..=41).collect(),
        }
    }

    /// Serials present in both lists.
    pub fn overlap(&self) -> Vec<u32> {
        self.train_serials
            .iter()
            .copied()
            .filter(|s| self.test_serials.contains(s))
            .collect()
    }

    pub fn apply(&self, dataset: &Dataset) -> Result<(Dataset, Dataset), DatasetError> {
        if self.train_serials.is_empty() {
            return Err(DatasetError::EmptySplit("train"));
        }
        if self.test_serials.is_empty() {
            return Err(DatasetError::EmptySplit("test"));
        }
        for s in self.train_serials.iter().chain(&self.test_serials) {
            if dataset.get(*s).is_none() {
                return Err(DatasetError::MissingSerial(*s));
            }
        }
        let pick = |serials: &[u32], label: &str| Dataset {
            records: dataset
                .records
                .iter()
                .filter(|r| serials.contains(&r.serial))
                .copied()
                .collect(),
            source: DataSource::Derived(format!("{} ({label})", dataset.source)),
        };
        Ok((pick(&self.train_serials, "train"), pick(&self.test_serials, "test")))
    }
}

/// Serials 1-31 for training and 31-41 for testing, in dataset order.
pub fn recorded_split(dataset: &Dataset) -> Result<(Dataset, Dataset), DatasetError> {
    SplitSpec::recorded().apply(dataset)
}

/// Train-set extrema of one feature or the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub fn forward(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn inverse(&self, z: f64) -> f64 {
        self.min + z * (self.max - self.min)
    }
}

/// Min-max scaling fitted on a training set. Values outside the training
/// range map outside `[0, 1]`; nothing is clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxParams {
    pub features: Vec<(Feature, Range)>,
    pub target: Range,
}

impl MinMaxParams {
    pub fn fit(train: &Dataset, features: &[Feature]) -> Result<Self, DatasetError> {
        if train.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        let range_of = |name: &'static str, f: &dyn Fn(&ProjectRecord) -> f64| {
            let (min, max) = train
                .records()
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if max > min {
                Ok(Range { min, max })
            } else {
                Err(DatasetError::ConstantFeature(name))
            }
        };
        let features = features
            .iter()
            .map(|&feat| Ok((feat, range_of(feat.name(), &|r| r.feature(feat))?)))
            .collect::<Result<Vec<_>, DatasetError>>()?;
        let target = range_of("rde", &|r| r.rde)?;
        Ok(MinMaxParams { features, target })
    }

    pub fn transform(&self, record: &ProjectRecord) -> Vec<f64> {
        self.features
            .iter()
            .map(|(feat, range)| range.forward(record.feature(*feat)))
            .collect()
    }

    pub fn transform_target(&self, rde: f64) -> f64 {
        self.target.forward(rde)
    }

    pub fn inverse_target(&self, z: f64) -> f64 {
        self.target.inverse(z)
    }

    pub fn feature_list(&self) -> Vec<Feature> {
        self.features.iter().map(|(f, _)| *f).collect()
    }
}

/// Fits min-max parameters over all four features and the target.
pub fn min_max_normalize(train: &Dataset) -> Result<MinMaxParams, DatasetError> {
    MinMaxParams::fit(train, &Feature::ALL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rows() {
        let d = builtin_dataset();
        assert_eq!(d.len(), 41);
        let r1 = d.get(1).unwrap();
        assert_eq!((r1.tcoe, r1.tcoa, r1.tcor, r1.cgpa, r1.rde), (24, 70, 29, 6.219, 75.0));
        assert_eq!(d.get(30).unwrap().rde, 80.0);
        assert_eq!(d.get(5).unwrap().rde, 55.0);
        let extremes: Vec<_> = d
            .records()
            .iter()
            .filter(|r| r.rde == 80.0 || r.rde == 55.0)
            .map(|r| r.serial)
            .collect();
        assert_eq!(extremes, vec![5, 30]);
        for (i, r) in d.records().iter().enumerate() {
            assert_eq!(r.serial as usize, i + 1);
            assert!([55.0, 65.0, 70.0, 75.0, 80.0].contains(&r.rde));
            r.validate().unwrap();
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = builtin_dataset();
        let back = load_dataset(&d.to_csv(), DataSource::Embedded).unwrap();
        assert_eq!(back, d);
        let crlf = d.to_csv().replace('\n', "\r\n");
        assert_eq!(
            load_dataset(&crlf, DataSource::Embedded).unwrap().records(),
            d.records()
        );
    }

    #[test]
    fn csv_bounds() {
        let err = load_dataset(&format!("{CSV_HEADER}\n1,4,5,6,11.2,70\n"), DataSource::Embedded).unwrap_err();
        assert!(
            matches!(
                err,
                DatasetError::Validation {
                    field: "cgpa",
                    serial: 1,
                    ..
                }
            ),
            "{err}"
        );

        let err = load_dataset(&format!("{CSV_HEADER}\n7,-3,5,6,7.2,70\n"), DataSource::Embedded).unwrap_err();
        assert!(
            matches!(
                err,
                DatasetError::Validation {
                    field: "tcoe",
                    serial: 7,
                    ..
                }
            ),
            "{err}"
        );
        assert!(err.to_string().contains(">= 1"));

        let err = load_dataset(&format!("{CSV_HEADER}\n2,4,5,6,7.2,0\n"), DataSource::Embedded).unwrap_err();
        assert!(matches!(err, DatasetError::Validation { field: "rde", .. }));
    }

    #[test]
    fn csv_malformed_rows_report_line() {
        let err = load_dataset(
            &format!("{CSV_HEADER}\n1,4,5,6,7.2,70\n2,4,x,6,7.2,70\n"),
            DataSource::Embedded,
        )
        .unwrap_err();
        assert_eq!(
            err,
            DatasetError::Parse {
                line: 3,
                message: "field `tcoa` is not a number: `x`".into()
            }
        );
        let err = load_dataset(&format!("{CSV_HEADER}\n1,4,5\n"), DataSource::Embedded).unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 2, .. }));
        let err = load_dataset(&format!("{CSV_HEADER}\n1,4.5,5,6,7,70\n"), DataSource::Embedded).unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 2, .. }));
        assert!(load_dataset("a,b\n", DataSource::Embedded).is_err());
        let dup = format!("{CSV_HEADER}\n1,4,5,6,7,70\n1,4,5,6,7,70\n");
        assert_eq!(
            load_dataset(&dup, DataSource::Embedded),
            Err(DatasetError::DuplicateSerial(1))
        );
    }

    #[test]
    fn split_shapes() {
        let (train, test) = recorded_split(&builtin_dataset()).unwrap();
        assert_eq!(train.len(), 31);
        assert_eq!(test.len(), 11);
        assert_eq!(train.records().last().unwrap().serial, 31);
        assert_eq!(test.records()[0].serial, 31);
        assert_eq!(SplitSpec::recorded().overlap(), vec![31]);
    }

    #[test]
    fn split_requires_all_serials() {
        let d = builtin_dataset();
        let short = Dataset::new(d.records()[..40].to_vec(), DataSource::Embedded).unwrap();
        assert_eq!(recorded_split(&short), Err(DatasetError::MissingSerial(41)));
    }

    #[test]
    fn normalization() {
        let (train, test) = recorded_split(&builtin_dataset()).unwrap();
        let p = min_max_normalize(&train).unwrap();
        let tcoe = p.features[0].1;
        assert_eq!((tcoe.min, tcoe.max), (4.0, 24.0));
        assert_eq!(tcoe.forward(14.0), 0.5);
        assert_eq!(tcoe.forward(4.0), 0.0);
        for r in train.records() {
            assert!(p.transform(r).iter().all(|z| (0.0..=1.0).contains(z)));
        }
        // serial 39 has tcoa 115, above the train max of 70
        let z = p.transform(test.get(39).unwrap());
        assert!(z[1] > 1.0);
        for r in builtin_dataset().records() {
            let back = p.inverse_target(p.transform_target(r.rde));
            assert!(((back - r.rde) / r.rde).abs() <= 1e-12);
            for ((feat, range), zi) in p.features.iter().zip(p.transform(r)) {
                let orig = r.feature(*feat);
                assert!(((range.inverse(zi) - orig) / orig).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_feature_is_rejected() {
        let d = builtin_dataset();
        let same: Vec<_> = d.records()[15..18].to_vec(); // serials 16-18 share tcoe 4
        let ds = Dataset::new(same, DataSource::Embedded).unwrap();
        assert_eq!(
            MinMaxParams::fit(&ds, &[Feature::Tcoe]),
            Err(DatasetError::ConstantFeature("tcoe"))
        );
        assert_eq!(
            min_max_normalize(&Dataset::new(vec![], DataSource::Embedded).unwrap()),
            Err(DatasetError::EmptyDataset)
        );
    }
}
