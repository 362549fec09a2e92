//! Frame CSV and result JSON formats.
//!
//! Frames CSV: header `frame,pq,qr,rs,sp`, one row per frame, projected
//! distances (not squared). Values are written in shortest round-trip form,
//! so reading back is lossless.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FrameObservation;
use crate::solver::RecoveryResult;

pub const FRAMES_HEADER: [&str; 5] = ["frame", "pq", "qr", "rs", "sp"];

pub fn write_frames_csv<W: Write>(frames: &[FrameObservation], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FRAMES_HEADER)?;
    for f in frames {
        let d = f.as_quad()?.map(f64::sqrt);
        write_distance_row(&mut w, f.frame_index, &d)?;
    }
    w.flush()?;
    Ok(())
}

/// Write distances exactly as given (no squaring round trip).
pub fn write_distances_csv<W: Write>(rows: &[(usize, [f64; 4])], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FRAMES_HEADER)?;
    for (idx, d) in rows {
        write_distance_row(&mut w, *idx, d)?;
    }
    w.flush()?;
    Ok(())
}

fn write_distance_row<W: Write>(w: &mut csv::Writer<W>, idx: usize, d: &[f64; 4]) -> Result<()> {
    w.write_record([
        idx.to_string(),
        d[0].to_string(),
        d[1].to_string(),
        d[2].to_string(),
        d[3].to_string(),
    ])?;
    Ok(())
}

/// Read `(frame, distances)` rows.
pub fn read_distances_csv<R: Read>(reader: R) -> Result<Vec<(usize, [f64; 4])>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(FRAMES_HEADER) {
        return Err(Error::Parse(format!(
            "expected header {:?}, got {:?}",
            FRAMES_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse(format!("row {}: {what}", line + 1));
        let idx: usize = rec[0]
            .parse()
            .map_err(|_| bad("frame must be a positive integer"))?;
        let mut d = [0.0; 4];
        for k in 0..4 {
            d[k] = rec[k + 1]
                .parse()
                .map_err(|_| bad(&format!("bad value {:?}", &rec[k + 1])))?;
        }
        out.push((idx, d));
    }
    Ok(out)
}

pub fn read_frames_csv<R: Read>(reader: R) -> Result<Vec<FrameObservation>> {
    read_distances_csv(reader)?
        .into_iter()
        .map(|(idx, d)| FrameObservation::from_distances(idx, &d))
        .collect()
}

/// JSON document written by `solve`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultDocument {
    pub x: Vec<f64>,
    /// `null` entries where the squared length is not positive.
    pub lengths: Vec<Option<f64>>,
    pub sq_lengths: Vec<f64>,
    pub condition_number: f64,
    pub residual_norm: f64,
    pub rank_deficient: bool,
    pub consistency: Vec<f64>,
    /// `null` where a radicand is negative.
    pub per_frame_closure: Vec<Option<f64>>,
    pub rank: usize,
    pub non_physical: bool,
}

impl From<&RecoveryResult> for ResultDocument {
    fn from(r: &RecoveryResult) -> Self {
        Self {
            x: r.x.to_vec(),
            lengths: r
                .sq_lengths
                .iter()
                .map(|v| (*v > 0.0).then(|| v.sqrt()))
                .collect(),
            sq_lengths: r.sq_lengths.to_vec(),
            condition_number: r.condition_number,
            residual_norm: r.residual_norm,
            rank_deficient: r.rank_deficient,
            consistency: r.consistency.to_vec(),
            per_frame_closure: r.per_frame_closure.clone(),
            rank: r.rank,
            non_physical: r.non_physical,
        }
    }
}

pub fn write_result_json<W: Write>(result: &RecoveryResult, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, &ResultDocument::from(result))?;
    writer.write_all(b"\n")?;
    Ok(())
}
