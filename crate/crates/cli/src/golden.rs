//! Checked-in reference data with per-cell trust markers.

use std::collections::BTreeMap;

use serde::Deserialize;

const TABLE: &str = include_str!("../fixtures/table.json");
const WORKED: &str = include_str!("../fixtures/worked.json");

#[derive(Clone, Debug, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub triples: usize,
    pub p: u64,
    pub count: u64,
    pub b: u64,
    /// "1", "-1" or "zeta_d".
    pub zeta: String,
    pub vj: String,
    pub degree: usize,
    /// Cell name to marker; absent cells are trusted.
    #[serde(default)]
    pub trust: BTreeMap<String, String>,
}

impl TableRow {
    pub fn d(&self) -> u64 {
        match self.zeta.as_str() {
            "1" => 1,
            "-1" => 2,
            z => z.trim_start_matches("zeta_").parse().expect("fixture zeta label"),
        }
    }

    pub fn trust(&self, cell: &str) -> &str {
        self.trust.get(cell).map(String::as_str).unwrap_or("reference")
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct WorkedBad {
    pub p: u64,
    pub vj: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WorkedJ {
    pub p: u64,
    pub value: String,
    pub trust: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct WorkedOrder {
    pub n: u64,
    pub triples: Vec<[u64; 3]>,
    pub bad: Vec<WorkedBad>,
    #[serde(default)]
    pub j: Option<WorkedJ>,
    #[serde(default)]
    pub j_denominator: Option<String>,
}

#[derive(Deserialize)]
struct TableFile {
    rows: Vec<TableRow>,
}

#[derive(Deserialize)]
struct WorkedFile {
    orders: Vec<WorkedOrder>,
}

pub fn table_rows() -> Vec<TableRow> {
    serde_json::from_str::<TableFile>(TABLE).expect("table fixture parses").rows
}

pub fn worked_orders() -> Vec<WorkedOrder> {
    serde_json::from_str::<WorkedFile>(WORKED).expect("worked fixture parses").orders
}

pub fn table_row(n: u64, p: u64, b: u64) -> Option<TableRow> {
    table_rows().into_iter().find(|r| (r.n, r.p, r.b) == (n, p, b))
}

pub fn worked_order(n: u64) -> Option<WorkedOrder> {
    worked_orders().into_iter().find(|w| w.n == n)
}

/// Orders covered by either fixture.
pub fn has_golden(n: u64) -> bool {
    worked_order(n).is_some() || table_rows().iter().any(|r| r.n == n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let rows = table_rows();
        assert_eq!(rows.len(), 44);
        let disputed: Vec<_> = rows.iter().filter(|r| r.trust("degree") != "reference").collect();
        assert_eq!(disputed.len(), 1);
        assert_eq!((disputed[0].n, disputed[0].p, disputed[0].b), (13, 3, 2));
        assert_eq!(table_row(20, 3, 4).unwrap().d(), 4);
        assert_eq!(worked_orders().len(), 6);
        assert_eq!(worked_order(11).unwrap().triples.len(), 5);
        assert!(has_golden(5) && has_golden(20) && !has_golden(21));
    }
}
