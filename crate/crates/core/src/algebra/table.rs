//! Itô multiplication tables derived from first principles.

use serde::Serialize;

use super::families::{recognize, Family, FamilyInstance, Recognized};
use super::ito::ito_product;
use super::term::{PositionId, Region};
use super::AlgebraError;

pub type TableEntry = Recognized;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItoTable {
    pub families: Vec<Family>,
    pub rows: Vec<FamilyInstance>,
    pub cols: Vec<FamilyInstance>,
    /// `entries[i][j]` is `rows[i] · cols[j]`.
    pub entries: Vec<Vec<TableEntry>>,
}

#[derive(Serialize)]
struct JsonEntry {
    row: String,
    col: String,
    result: String,
    recognized: bool,
}

fn label(inst: &FamilyInstance) -> String {
    if inst.family == Family::Dt {
        "dt".to_string()
    } else {
        inst.to_string()
    }
}

impl ItoTable {
    pub fn get(&self, row: Family, col: Family) -> Option<&TableEntry> {
        let i = self.families.iter().position(|f| *f == row)?;
        let j = self.families.iter().position(|f| *f == col)?;
        Some(&self.entries[i][j])
    }

    pub fn all_recognized(&self) -> bool {
        self.entries.iter().flatten().all(|e| !matches!(e, Recognized::Unrecognized(_)))
    }

    /// One line per entry, `row * col = result`, in row-major order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.cols.iter().enumerate() {
                s.push_str(&format!("{} * {} = {}\n", label(r), label(c), self.entries[i][j]));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.cols.iter().enumerate() {
                let e = &self.entries[i][j];
                out.push(JsonEntry {
                    row: label(r),
                    col: label(c),
                    result: e.to_string(),
                    recognized: !matches!(e, Recognized::Unrecognized(_)),
                });
            }
        }
        let mut s = serde_json::to_string_pretty(&out).expect("plain data serializes");
        s.push('\n');
        s
    }
}

/// Multiply every pair of families over a common cell and express each
/// product as a family instance where possible.
pub fn derive_table(families: &[Family]) -> Result<ItoTable, AlgebraError> {
    let pos = PositionId(0);
    let inst = |f: Family, row: bool| {
        let (r, c) = f.table_symbols();
        let k = if row { r } else { c };
        FamilyInstance::new(f, &vec![k; f.kernel_count()])
    };
    let rows: Vec<FamilyInstance> = families.iter().map(|f| inst(*f, true)).collect();
    let cols: Vec<FamilyInstance> = families.iter().map(|f| inst(*f, false)).collect();
    let region = Region::Infinitesimal(pos);
    let mut entries = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut line = Vec::with_capacity(cols.len());
        for c in &cols {
            let prod = ito_product(&r.to_expr(region), &c.to_expr(region))?;
            line.push(recognize(&prod, families));
        }
        entries.push(line);
    }
    Ok(ItoTable { families: families.to_vec(), rows, cols, entries })
}

/// [`derive_table`] from family names such as `"Lambda"` or `"B2"`.
pub fn table_for(names: &[&str]) -> Result<ItoTable, AlgebraError> {
    let fams = names.iter().map(|n| n.parse()).collect::<Result<Vec<Family>, _>>()?;
    derive_table(&fams)
}
