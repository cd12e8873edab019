//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any check fails. Runs without the libtest harness so the
//! lines always reach the console.
//!
//! The golden files are checked against matrices typed in here, so that a
//! corrupted golden file cannot make criteria 1 and 2 pass by agreeing with
//! a wrong computation.

use genvar::acceptance::{Golden, Suite, CRITERIA};
use genvar::config::Config;
use genvar::kronecker::BaseChangeMatrix;
use serde_json::json;

const SEED: u64 = 2010;

fn matrix(from: &str, to: &str, rows: &[[i64; 7]]) -> BaseChangeMatrix {
    BaseChangeMatrix::from_json(&json!({"from": from, "to": to, "matrix": rows})).unwrap()
}

fn typed_golden() -> Golden {
    let sz = matrix("SZ", "G", &[
        [1, 0, 2, 0, 6, 0, 20],
        [0, 1, 0, 3, 0, 10, 0],
        [0, 0, 1, 0, 4, 0, 15],
        [0, 0, 0, 1, 0, 5, 0],
        [0, 0, 0, 0, 1, 0, 6],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1],
    ]);
    let sz_inv = matrix("G", "SZ", &[
        [1, 0, -2, 0, 2, 0, -2],
        [0, 1, 0, -3, 0, 5, 0],
        [0, 0, 1, 0, -4, 0, 9],
        [0, 0, 0, 1, 0, -5, 0],
        [0, 0, 0, 0, 1, 0, -6],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1],
    ]);
    let cz = matrix("CZ", "G", &[
        [1, 0, 1, 0, 2, 0, 5],
        [0, 1, 0, 2, 0, 5, 0],
        [0, 0, 1, 0, 3, 0, 9],
        [0, 0, 0, 1, 0, 4, 0],
        [0, 0, 0, 0, 1, 0, 5],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1],
    ]);
    let cz_inv = matrix("G", "CZ", &[
        [1, 0, -1, 0, 1, 0, -1],
        [0, 1, 0, -2, 0, 3, 0],
        [0, 0, 1, 0, -3, 0, 6],
        [0, 0, 0, 1, 0, -4, 0],
        [0, 0, 0, 0, 1, 0, -5],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1],
    ]);
    Golden { sz: (sz, sz_inv), cz: (cz, cz_inv) }
}

/// Negative control: a single wrong golden entry must fail criterion 1 and
/// name the entry.
fn corrupted_golden_fails_with_diff() -> bool {
    let mut g = typed_golden();
    let mut v = g.sz.0.to_json();
    v["matrix"][2][6] = json!(16);
    g.sz.0 = BaseChangeMatrix::from_json(&v).unwrap();
    let r = Suite::new(Config::with_seed(SEED), g).run(1);
    !r.passed && r.detail.contains("(2,6): 16 -> 15")
}

fn main() {
    let mut failed = Vec::new();
    if Golden::builtin().unwrap() != typed_golden() {
        println!("FAIL golden files differ from the typed matrices");
        failed.push("golden files".to_string());
    }

    let suite = Suite::new(Config::with_seed(SEED), typed_golden());
    for id in 1..=CRITERIA.len() {
        let r = suite.run(id);
        println!("{}", r.line());
        if !r.passed {
            failed.push(format!("criterion {id}"));
        }
    }

    if corrupted_golden_fails_with_diff() {
        println!("ok   negative control: a corrupted golden entry is reported");
    } else {
        println!("FAIL negative control: a corrupted golden entry went unnoticed");
        failed.push("negative control".to_string());
    }

    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        std::process::exit(1);
    }
}
