//! Exchange formats: the `{"dim": d, "rows": [[...], ...]}` JSON schema and
//! CSV layouts for matrices, traces, cone projections, and accuracy rows.

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::midrange::{ActiveDataReport, ImrTrace};
use crate::spd::{cone_projection, SpdMatrix};
use crate::thompson::thompson_distance;
use crate::Dataset;

impl Serialize for SpdMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| self.matrix()[(i, j)]).collect()).collect();
        let mut st = serializer.serialize_struct("SpdMatrix", 2)?;
        st.serialize_field("dim", &d)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SpdMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            rows: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.rows.len() != raw.dim || raw.rows.iter().any(|r| r.len() != raw.dim) {
            return Err(D::Error::custom(format!(
                "expected {0}x{0} rows matching dim",
                raw.dim
            )));
        }
        let m = DMatrix::from_fn(raw.dim, raw.dim, |i, j| raw.rows[i][j]);
        SpdMatrix::new(m).map_err(D::Error::custom)
    }
}

pub fn matrix_to_json(a: &SpdMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(a)?)
}

pub fn matrix_from_json(s: &str) -> Result<SpdMatrix> {
    Ok(serde_json::from_str(s)?)
}

/// Matrix CSV: a single header line holding the dimension, then d rows of d
/// comma-separated entries.
pub fn matrix_to_csv(a: &SpdMatrix) -> String {
    let d = a.dim();
    let mut out = format!("{d}\n");
    for i in 0..d {
        let row: Vec<String> = (0..d).map(|j| format!("{}", a.matrix()[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(s: &str) -> Result<SpdMatrix> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let d: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix CSV".into()))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension header: {e}")))?;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {d} rows, found {i}")))?;
        let entries: Vec<&str> = line.split(',').collect();
        if entries.len() != d {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {d}",
                entries.len()
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = e
                .trim()
                .parse()
                .map_err(|err| Error::Parse(format!("row {i} entry {j}: {err}")))?;
        }
    }
    SpdMatrix::new(m)
}

pub fn dataset_to_json(data: &Dataset) -> Result<String> {
    Ok(serde_json::to_string_pretty(data)?)
}

pub fn model_to_json(model: &crate::clustering::ClusterModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(model)?)
}

pub fn model_from_json(s: &str) -> Result<crate::clustering::ClusterModel> {
    Ok(serde_json::from_str(s)?)
}

pub fn dataset_from_json(s: &str) -> Result<Dataset> {
    Ok(serde_json::from_str(s)?)
}

/// IMR trace CSV with one row per step: the step index, the targeted data
/// index, the step distance, and the Thompson distance from the iterate at
/// that step to the final iterate.
pub fn trace_to_csv(trace: &ImrTrace) -> Result<String> {
    let final_x = trace.final_iterate();
    let mut out = String::from("k,target_index,step_distance,d_to_final\n");
    for (i, (&target, &step)) in
        trace.targets().iter().zip(trace.step_distances().iter()).enumerate()
    {
        let d_final = thompson_distance(&trace.iterates()[i], final_x)?;
        out.push_str(&format!("{},{},{},{}\n", i + 1, target, step, d_final));
    }
    Ok(out)
}

/// Cone-projection CSV of a d = 2 dataset, optionally with IMR trace
/// iterates and active/external/internal role tags.
pub fn cone_export_csv(
    data: &Dataset,
    trace: Option<&ImrTrace>,
    roles: Option<&ActiveDataReport>,
) -> Result<String> {
    let mut out = String::from("kind,index,role,x,y,z\n");
    for (i, p) in data.points().iter().enumerate() {
        let (x, y, z) = cone_projection(p)?;
        let role = match roles {
            Some(r) if r.active.contains(&i) => "active",
            Some(r) if r.external.contains(&i) => "external",
            Some(_) => "internal",
            None => "",
        };
        out.push_str(&format!("data,{i},{role},{x},{y},{z}\n"));
    }
    if let Some(trace) = trace {
        for (k, it) in trace.iterates().iter().enumerate() {
            let (x, y, z) = cone_projection(it)?;
            out.push_str(&format!("iterate,{},,{x},{y},{z}\n", k + 1));
        }
    }
    Ok(out)
}

/// Accuracy report as a CSV row.
pub fn accuracy_to_csv(report: &crate::clustering::AccuracyReport) -> String {
    format!(
        "points_identified,clusters_identified,clusters_lost\n{},{},{}\n",
        report.points_identified, report.clusters_identified, report.clusters_lost
    )
}
