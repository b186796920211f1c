use std::fs::File;
use std::io::Read;
use std::path::Path as FsPath;

use log::warn;

use crate::error::{Error, Result};

use super::{NodeId, Topology};

/// A bidirectional traffic request between two nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub src: NodeId,
    pub dst: NodeId,
    pub rate_gbps: f64,
}

impl Demand {
    /// Creates a demand with endpoints normalized so `src < dst`.
    pub fn new(a: NodeId, b: NodeId, rate_gbps: f64) -> Result<Self> {
        if a == b {
            return Err(Error::Domain(format!("demand endpoints are equal ({a})")));
        }
        if !(rate_gbps.is_finite() && rate_gbps > 0.0) {
            return Err(Error::Domain(format!(
                "demand rate must be positive, got {rate_gbps}"
            )));
        }
        Ok(Demand {
            src: a.min(b),
            dst: a.max(b),
            rate_gbps,
        })
    }
}

const DEMAND_COLUMNS: [&str; 3] = ["src", "dst", "gbps"];

/// Parses `src,dst,gbps` CSV (with header). Unknown columns are ignored
/// with a warning.
pub fn parse_demands<R: Read>(reader: R, topo: &Topology) -> Result<Vec<Demand>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut cols = [usize::MAX; 3];
    for (i, h) in headers.iter().enumerate() {
        match DEMAND_COLUMNS.iter().position(|c| *c == h) {
            Some(k) => cols[k] = i,
            None => warn!("demands: ignoring unknown column `{h}`"),
        }
    }
    if let Some(k) = cols.iter().position(|&c| c == usize::MAX) {
        return Err(Error::InvalidDemand {
            record: 0,
            reason: format!("missing column `{}`", DEMAND_COLUMNS[k]),
        });
    }

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let record = i + 1;
        let rec = rec?;
        let field = |k: usize| {
            rec.get(cols[k]).ok_or_else(|| Error::InvalidDemand {
                record,
                reason: format!("missing `{}`", DEMAND_COLUMNS[k]),
            })
        };
        let bad = |reason: String| Error::InvalidDemand { record, reason };
        let src = topo.node_index(field(0)?).map_err(|e| bad(e.to_string()))?;
        let dst = topo.node_index(field(1)?).map_err(|e| bad(e.to_string()))?;
        let rate: f64 = field(2)?
            .parse()
            .map_err(|e| bad(format!("bad rate: {e}")))?;
        out.push(Demand::new(src, dst, rate).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub fn load_demands(path: impl AsRef<FsPath>, topo: &Topology) -> Result<Vec<Demand>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_demands(f, topo)
}
