//! `RunRecord`: the serialisable outcome of one CLI invocation.
//!
//! JSON field names are stable:
//!
//! ```json
//! {
//!   "command": "nk",
//!   "parameters": { "hard_cap": "4096", "init": "2", "k": "6" },
//!   "index_name": "k",
//!   "value_name": "n_k",
//!   "results": [ { "index": "6", "value": "19" } ],
//!   "certificates": [
//!     { "index": "6", "p": 19, "r": 3, "n": 19, "trace_digest": "1c1337…988d" }
//!   ],
//!   "notes": [],
//!   "wall_time_ms": 3
//! }
//! ```
//!
//! Values are exact decimal strings (`num/den` for non-integral rationals).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    pub index: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRow {
    /// The result row this certificate belongs to.
    pub index: String,
    pub p: u64,
    pub r: u32,
    pub n: u64,
    pub trace_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub index_name: String,
    pub value_name: String,
    pub results: Vec<ResultRow>,
    pub certificates: Vec<CertificateRow>,
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
}

impl RunRecord {
    pub fn new(command: &str, index_name: &str, value_name: &str) -> Self {
        Self {
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            index_name: index_name.to_owned(),
            value_name: value_name.to_owned(),
            results: Vec::new(),
            certificates: Vec::new(),
            notes: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn push(&mut self, index: impl ToString, value: impl ToString) {
        self.results.push(ResultRow {
            index: index.to_string(),
            value: value.to_string(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunRecord is always serialisable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One `index,value` row per result; rows with a certificate gain
    /// `p=<p>,n=<n>` columns. Cells are quoted where needed, e.g. `"{28,2}"`.
    pub fn to_csv(&self) -> String {
        let certs: BTreeMap<&str, &CertificateRow> = self.certificates.iter().map(|c| (c.index.as_str(), c)).collect();
        let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut header = vec![self.index_name.clone(), self.value_name.clone()];
        if !certs.is_empty() {
            header.extend(["certificate_prime".into(), "certificate_index".into()]);
        }
        writer.write_record(&header).expect("in-memory write");
        for row in &self.results {
            let mut cells = vec![row.index.clone(), row.value.clone()];
            if let Some(c) = certs.get(row.index.as_str()) {
                cells.extend([format!("p={}", c.p), format!("n={}", c.n)]);
            } else if !certs.is_empty() {
                cells.extend([String::new(), String::new()]);
            }
            writer.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("UTF-8 input")
    }
}

/// `(index, value)` pairs read back from [`RunRecord::to_csv`] output.
pub fn csv_pairs(text: &str) -> Result<Vec<(String, String)>, csv::Error> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok((
                rec.get(0).unwrap_or_default().to_owned(),
                rec.get(1).unwrap_or_default().to_owned(),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> RunRecord {
        let mut r = RunRecord::new("nk", "k", "n_k").param("hard_cap", 4096);
        r.push(6, 19);
        r.push(7, 239);
        r.certificates.push(CertificateRow {
            index: "6".into(),
            p: 19,
            r: 1,
            n: 19,
            trace_digest: "00".into(),
        });
        r
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().to_csv(),
            "k,n_k,certificate_prime,certificate_index\n6,19,p=19,n=19\n7,239,,\n"
        );
        let mut plain = RunRecord::new("seq", "n", "g");
        plain.push(0, 1);
        assert_eq!(plain.to_csv(), "n,g\n0,1\n");
        let mut residues = RunRecord::new("modseq", "n", "residue");
        residues.push(5, "{28,2}");
        assert_eq!(residues.to_csv(), "n,residue\n5,\"{28,2}\"\n");
        assert_eq!(
            csv_pairs(&residues.to_csv()).unwrap(),
            vec![("5".into(), "{28,2}".into())]
        );
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(RunRecord::from_json(&r.to_json()).unwrap(), r);
    }

    proptest! {
        #[test]
        fn csv_and_json_carry_the_same_pairs(
            rows in proptest::collection::vec((0u64..10_000, "[0-9]{1,30}(/[1-9][0-9]{0,5})?|\\{[0-9]{1,4},[0-9]\\}|F"), 0..30),
            wall in any::<u64>(),
        ) {
            let mut r = RunRecord::new("seq", "n", "g");
            r.wall_time_ms = wall;
            for (i, v) in &rows {
                r.push(i, v);
            }
            let back = RunRecord::from_json(&r.to_json()).unwrap();
            prop_assert_eq!(&back, &r);
            let mut from_json: Vec<(String, String)> =
                back.results.iter().map(|row| (row.index.clone(), row.value.clone())).collect();
            let mut from_csv = csv_pairs(&r.to_csv()).unwrap();
            from_json.sort();
            from_csv.sort();
            prop_assert_eq!(from_json, from_csv);
        }
    }
}
