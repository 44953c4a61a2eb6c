//! Recorded predictions and aggregates, transcribed at printed precision.

use serde::{Deserialize, Serialize};

/// Neural-network predictions for the test serials 31-41, with the printed
/// 2-decimal MREs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub serial: u32,
    pub actual: f64,
    pub ffbpnn: f64,
    pub ffbpnn_mre: f64,
    pub cascaded: f64,
    pub cascaded_mre: f64,
    pub lrnn: f64,
    pub lrnn_mre: f64,
}

/// Mamdani FIS prediction per record, with the printed 3-decimal MRE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table4Row {
    pub serial: u32,
    pub tcoe: u32,
    pub cgpa: f64,
    pub actual: f64,
    pub fis: f64,
    pub mre: f64,
}

/// One model column of the neural-network table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NnColumn {
    Ffbpnn,
    Cascaded,
    Lrnn,
}

impl NnColumn {
    pub const ALL: [NnColumn; 3] = [NnColumn::Ffbpnn, NnColumn::Cascaded, NnColumn::Lrnn];

    pub fn label(self) -> &'static str {
        match self {
            NnColumn::Ffbpnn => "FFBPNN",
            NnColumn::Cascaded => "Cascaded FFBPNN",
            NnColumn::Lrnn => "LRNN",
        }
    }

    pub fn predicted(self, row: &Table2Row) -> f64 {
        match self {
            NnColumn::Ffbpnn => row.ffbpnn,
            NnColumn::Cascaded => row.cascaded,
            NnColumn::Lrnn => row.lrnn,
        }
    }

    pub fn printed_mre(self, row: &Table2Row) -> f64 {
        match self {
            NnColumn::Ffbpnn => row.ffbpnn_mre,
            NnColumn::Cascaded => row.cascaded_mre,
            NnColumn::Lrnn => row.lrnn_mre,
        }
    }

    /// The "MRE VALUES" footer row.
    pub fn printed_mre_sum(self) -> f64 {
        match self {
            NnColumn::Ffbpnn => 1.43,
            NnColumn::Cascaded => 1.49,
            NnColumn::Lrnn => 1.26,
        }
    }

    /// The "% MMRE VALUES" footer row.
    pub fn printed_mmre_percent(self) -> f64 {
        match self {
            NnColumn::Ffbpnn => 12.96,
            NnColumn::Cascaded => 13.59,
            NnColumn::Lrnn => 11.45,
        }
    }
}

pub const MAMDANI_LABEL: &str = "Mamdani FIS";

/// Printed MMRE% per model, in table order.
pub const TABLE1: [(&str, f64); 4] = [
    ("FFBPNN", 12.96),
    ("Cascaded FFBPNN", 13.59),
    ("LRNN", 11.45),
    (MAMDANI_LABEL, 3.89),
];

pub fn table1_reported(label: &str) -> Option<f64> {
    TABLE1.iter().find(|(l, _)| *l == label).map(|(_, v)| *v)
}

macro_rules! t2 {
    ($($s:expr, $a:expr, $f:expr, $fm:expr, $c:expr, $cm:expr, $l:expr, $lm:expr;)*) => {
        [$(Table2Row { serial: $s, actual: $a, ffbpnn: $f, ffbpnn_mre: $fm, cascaded: $c, cascaded_mre: $cm, lrnn: $l, lrnn_mre: $lm }),*]
    };
}

pub const TABLE2: [Table2Row; 11] = t2![
    31, 65.0, 69.39, 0.07, 79.71, 0.23, 79.73, 0.23;
    32, 75.0, 67.73, 0.10, 66.26, 0.12, 69.17, 0.08;
    33, 65.0, 79.03, 0.22, 55.06, 0.15, 80.0, 0.23;
    34, 65.0, 79.03, 0.22, 55.05, 0.15, 80.0, 0.23;
    35, 70.0, 55.0, 0.21, 77.46, 0.11, 69.11, 0.01;
    36, 70.0, 55.21, 0.21, 74.66, 0.07, 69.39, 0.01;
    37, 70.0, 60.07, 0.14, 72.86, 0.04, 69.44, 0.01;
    38, 65.0, 58.85, 0.09, 62.28, 0.04, 67.77, 0.04;
    39, 75.0, 79.16, 0.06, 61.54, 0.18, 68.31, 0.09;
    40, 75.0, 79.16, 0.06, 64.05, 0.15, 70.04, 0.07;
    41, 75.0, 79.2, 0.06, 55.14, 0.26, 55.06, 0.27;
];

macro_rules! t4 {
    ($($s:expr, $e:expr, $g:expr, $a:expr, $p:expr, $m:expr;)*) => {
        [$(Table4Row { serial: $s, tcoe: $e, cgpa: $g, actual: $a, fis: $p, mre: $m }),*]
    };
}

pub const TABLE4: [Table4Row; 41] = t4![
    1, 24, 6.219, 75.0, 75.0, 0.000;
    2, 24, 8.012, 75.0, 75.0, 0.000;
    3, 24, 7.733, 75.0, 75.0, 0.000;
    4, 10, 7.564, 70.0, 75.0, 0.071;
    5, 5, 5.519, 55.0, 64.3, 0.169;
    6, 19, 7.507, 70.0, 75.0, 0.071;
    7, 8, 6.171, 75.0, 65.0, 0.133;
    8, 8, 6.705, 75.0, 65.0, 0.133;
    9, 17, 7.629, 75.0, 75.0, 0.000;
    10, 9, 8.13, 70.0, 75.0, 0.071;
    11, 10, 8.083, 65.0, 75.0, 0.154;
    12, 10, 8.126, 65.0, 75.0, 0.154;
    13, 10, 7.202, 65.0, 75.0, 0.154;
    14, 5, 8.417, 65.0, 71.0, 0.092;
    15, 5, 7.757, 70.0, 71.0, 0.014;
    16, 4, 7.431, 70.0, 70.0, 0.000;
    17, 4, 7.121, 70.0, 70.0, 0.000;
    18, 4, 7.66, 70.0, 70.0, 0.000;
    19, 7, 8.017, 75.0, 73.4, 0.021;
    20, 7, 9.076, 75.0, 72.8, 0.029;
    21, 7, 7.55, 70.0, 73.2, 0.046;
    22, 6, 6.583, 65.0, 64.4, 0.009;
    23, 6, 7.276, 65.0, 71.3, 0.097;
    24, 6, 8.124, 65.0, 72.1, 0.109;
    25, 5, 6.53, 75.0, 64.4, 0.141;
    26, 5, 6.685, 70.0, 64.5, 0.079;
    27, 6, 7.843, 65.0, 72.1, 0.109;
    28, 7, 9.16, 70.0, 72.7, 0.039;
    29, 7, 8.617, 75.0, 73.3, 0.023;
    30, 6, 8.719, 80.0, 71.9, 0.101;
    31, 4, 8.86, 65.0, 70.0, 0.077;
    32, 5, 7.664, 75.0, 71.0, 0.053;
    33, 16, 6.795, 65.0, 70.0, 0.077;
    34, 16, 6.757, 65.0, 70.4, 0.083;
    35, 9, 6.207, 70.0, 67.1, 0.041;
    36, 9, 6.636, 70.0, 68.6, 0.020;
    37, 9, 6.79, 70.0, 70.0, 0.000;
    38, 8, 8.095, 65.0, 75.0, 0.154;
    39, 20, 7.99, 75.0, 75.0, 0.000;
    40, 20, 8.095, 75.0, 75.0, 0.000;
    41, 15, 6.34, 75.0, 71.0, 0.053;
];

/// Recorded predictions as CSV: `serial,actual,ffbpnn,ffbpnn_mre,...`.
pub fn table2_csv() -> String {
    let mut out = String::from("serial,actual,ffbpnn,ffbpnn_mre,cascaded,cascaded_mre,lrnn,lrnn_mre\n");
    for r in &TABLE2 {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.serial, r.actual, r.ffbpnn, r.ffbpnn_mre, r.cascaded, r.cascaded_mre, r.lrnn, r.lrnn_mre
        ));
    }
    out
}

/// Recorded FIS predictions as CSV: `serial,tcoe,cgpa,rde,fis,mre`.
pub fn table4_csv() -> String {
    let mut out = String::from("serial,tcoe,cgpa,rde,fis,mre\n");
    for r in &TABLE4 {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.serial, r.tcoe, r.cgpa, r.actual, r.fis, r.mre
        ));
    }
    out
}
