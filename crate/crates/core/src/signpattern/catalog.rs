//! Base witnesses for every pattern in dimensions 3 and 4.
//!
//! The checked-in table is the output of [`regenerate`], a bounded exhaustive
//! search over small products of dilated Reeve tetrahedra, intervals and
//! 2-dimensional Eulerian simplices; a test keeps the two in sync.

use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{verify_ehrhart, Pattern};
use crate::ehrhart_algebra::{expr_ehrhart, Block, Factor, PolytopeExpr};

const CATALOG_JSON: &str = include_str!("../../data/base_catalog.json");

/// Largest Reeve height searched.
pub const MAX_REEVE_M: u64 = 64;
/// Largest dilation exponent searched.
pub const MAX_DILATION_BITS: u32 = 10;
/// Largest interval length or Eulerian-simplex scale searched.
pub const MAX_SIDE: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub pattern: String,
    pub expr: PolytopeExpr,
    /// Informational rendering of the Ehrhart polynomial.
    pub ehrhart: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn lookup(&self, p: &Pattern) -> Option<&PolytopeExpr> {
        let key = p.to_string();
        self.entries.iter().find(|e| e.pattern == key).map(|e| &e.expr)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes") + "\n"
    }
}

/// The checked-in catalog.
pub fn base_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| serde_json::from_str(CATALOG_JSON).expect("base_catalog.json is well formed"))
}

fn dilations() -> impl Iterator<Item = BigInt> {
    (0..=MAX_DILATION_BITS).map(|e| BigInt::from(1u64 << e))
}

/// Candidates of one dimension, simplest first.
fn candidates(dim: usize) -> Vec<PolytopeExpr> {
    let mut out = Vec::new();
    match dim {
        3 => {
            for r in dilations() {
                for m in 1..=MAX_REEVE_M {
                    out.push(PolytopeExpr { factors: vec![Factor::new(r.clone(), Block::reeve(m))] });
                }
            }
        }
        4 => {
            let unit = || Factor::new(1, Block::interval(1));
            out.push(PolytopeExpr { factors: vec![unit(), unit(), unit(), unit()] });
            for a in 1..=MAX_SIDE {
                for b in a..=MAX_SIDE {
                    out.push(PolytopeExpr {
                        factors: vec![Factor::new(1, Block::eulerian_s(2, a)), Factor::new(1, Block::eulerian_s(2, b))],
                    });
                }
            }
            for r in dilations() {
                for m in 1..=MAX_REEVE_M {
                    for len in 1..=MAX_SIDE {
                        out.push(PolytopeExpr {
                            factors: vec![
                                Factor::new(r.clone(), Block::reeve(m)),
                                Factor::new(1, Block::interval(len)),
                            ],
                        });
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// First candidate, in search order, realizing each pattern of length 1 and 2.
pub fn regenerate() -> Catalog {
    let mut entries = Vec::new();
    for dim in [3, 4] {
        let pool: Vec<_> = candidates(dim)
            .into_iter()
            .map(|e| {
                let ehr = expr_ehrhart(&e).expect("candidate is valid");
                (e, ehr)
            })
            .collect();
        for p in Pattern::all(dim - 2) {
            let (expr, ehr) = pool
                .iter()
                .find(|(_, ehr)| verify_ehrhart(ehr, &p))
                .unwrap_or_else(|| panic!("no base witness for {p} within the search bounds"));
            entries.push(CatalogEntry { pattern: p.to_string(), expr: expr.clone(), ehrhart: ehr.to_string() });
        }
    }
    Catalog { entries }
}
