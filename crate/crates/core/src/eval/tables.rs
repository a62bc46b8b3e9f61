//! Published confusion matrices, metric tables and action mappings,
//! compiled in from the workspace `tables/` directory.

use super::{ConfusionMatrix, LabelMapping, ReferenceRow};

macro_rules! table {
    ($file:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../tables/", $file))
    };
}

/// A published confusion matrix paired with its published metrics table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TablePair {
    pub matrix_table: u32,
    pub metrics_table: u32,
    pub description: &'static str,
}

pub const TABLE_PAIRS: [TablePair; 8] = [
    TablePair { matrix_table: 4, metrics_table: 16, description: "svm only - enacted corpus" },
    TablePair { matrix_table: 10, metrics_table: 17, description: "svm only - MSRC-12" },
    TablePair { matrix_table: 11, metrics_table: 18, description: "svm only - UCFKinect" },
    TablePair { matrix_table: 12, metrics_table: 19, description: "svm only - MSR Action 3D" },
    TablePair { matrix_table: 6, metrics_table: 20, description: "svm + rules - enacted corpus" },
    TablePair { matrix_table: 13, metrics_table: 21, description: "svm + rules - MSRC-12" },
    TablePair { matrix_table: 14, metrics_table: 22, description: "svm + rules - UCFKinect" },
    TablePair { matrix_table: 15, metrics_table: 23, description: "svm + rules - MSR Action 3D" },
];

/// Raw CSV text of a published table, if it exists.
pub fn table_text(number: u32) -> Option<&'static str> {
    Some(match number {
        4 => table!("table4.csv"),
        6 => table!("table6.csv"),
        10 => table!("table10.csv"),
        11 => table!("table11.csv"),
        12 => table!("table12.csv"),
        13 => table!("table13.csv"),
        14 => table!("table14.csv"),
        15 => table!("table15.csv"),
        16 => table!("table16.csv"),
        17 => table!("table17.csv"),
        18 => table!("table18.csv"),
        19 => table!("table19.csv"),
        20 => table!("table20.csv"),
        21 => table!("table21.csv"),
        22 => table!("table22.csv"),
        23 => table!("table23.csv"),
        _ => return None,
    })
}

pub fn published_matrix(number: u32) -> Option<ConfusionMatrix> {
    TABLE_PAIRS.iter().find(|p| p.matrix_table == number)?;
    ConfusionMatrix::read_csv(table_text(number)?.as_bytes()).ok()
}

pub fn published_metrics(number: u32) -> Option<Vec<ReferenceRow>> {
    TABLE_PAIRS.iter().find(|p| p.metrics_table == number)?;
    super::read_reference_csv(table_text(number)?.as_bytes()).ok()
}

/// Names accepted by [`builtin_mapping`].
pub const MAPPING_NAMES: [&str; 3] = ["msrc12", "ucfkinect", "msraction"];

pub fn builtin_mapping_text(name: &str) -> Option<&'static str> {
    Some(match name.to_ascii_lowercase().as_str() {
        "msrc12" | "msrc-12" => table!("mapping_msrc12.csv"),
        "ucfkinect" => table!("mapping_ucfkinect.csv"),
        "msraction" | "msraction3d" => table!("mapping_msraction.csv"),
        _ => return None,
    })
}

pub fn builtin_mapping(name: &str) -> Option<LabelMapping> {
    LabelMapping::read_csv(builtin_mapping_text(name)?.as_bytes()).ok()
}
