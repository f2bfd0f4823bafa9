//! Instance files: a single JSON document
//!
//! ```json
//! {"K":2, "N":2, "L":4, "B":[[..],..], "C":[[..],..], "y":[..], "s":[..],
//!  "seed":7, "noise":{"kind":"none","alpha":0.0}, "truth":{..optional..}}
//! ```
//!
//! with matrices row-major and every float written with 17 significant
//! digits (`{:.16e}`), so a parsed value reproduces the original bit
//! pattern in any IEEE-754 reader.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{GroundTruth, NoiseModel, ProblemInstance};

/// An instance plus the generation metadata carried by the file format.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDocument {
    pub instance: ProblemInstance,
    pub truth: Option<GroundTruth>,
    pub seed: u64,
    pub noise: NoiseModel,
}

fn f64_17(v: f64) -> serde_json::Number {
    serde_json::Number::from_str(&format!("{v:.16e}")).expect("finite float formats as a number")
}

fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    f64_17(*v).serialize(s)
}

fn ser_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&f64_17(*x))?;
    }
    seq.end()
}

#[allow(clippy::ptr_arg)]
fn ser_mat<S: Serializer>(m: &Vec<Vec<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    struct Row<'a>(&'a [f64]);
    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_vec(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for row in m {
        seq.serialize_element(&Row(row))?;
    }
    seq.end()
}

#[derive(Serialize, Deserialize)]
struct WireNoise {
    kind: String,
    #[serde(serialize_with = "ser_f64")]
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct WireTruth {
    #[serde(serialize_with = "ser_vec")]
    h_nat: Vec<f64>,
    #[serde(serialize_with = "ser_vec")]
    m_nat: Vec<f64>,
    #[serde(serialize_with = "ser_vec")]
    xi: Vec<f64>,
    #[serde(serialize_with = "ser_vec")]
    y_hat: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WireDoc {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "B", serialize_with = "ser_mat")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C", serialize_with = "ser_mat")]
    c: Vec<Vec<f64>>,
    #[serde(serialize_with = "ser_vec")]
    y: Vec<f64>,
    s: Vec<i8>,
    seed: u64,
    noise: WireNoise,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<WireTruth>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn noise_to_wire(n: &NoiseModel) -> WireNoise {
    let (kind, alpha) = match n {
        NoiseModel::None => ("none", 0.0),
        NoiseModel::UniformSymmetric { alpha } => ("uniform-symmetric", *alpha),
        NoiseModel::OneSidedUniform { alpha } => ("one-sided-uniform", *alpha),
    };
    WireNoise {
        kind: kind.to_string(),
        alpha,
    }
}

fn noise_from_wire(w: &WireNoise) -> Result<NoiseModel> {
    match w.kind.as_str() {
        "none" => Ok(NoiseModel::None),
        "uniform-symmetric" => Ok(NoiseModel::UniformSymmetric { alpha: w.alpha }),
        "one-sided-uniform" => Ok(NoiseModel::OneSidedUniform { alpha: w.alpha }),
        other => Err(Error::InvalidArgument(format!("unknown noise kind {other:?}"))),
    }
}

fn to_wire(doc: &InstanceDocument) -> WireDoc {
    let inst = &doc.instance;
    WireDoc {
        k: inst.k(),
        n: inst.n(),
        l: inst.l(),
        b: matrix_rows(inst.b()),
        c: matrix_rows(inst.c()),
        y: inst.y().as_slice().to_vec(),
        s: inst.s().to_vec(),
        seed: doc.seed,
        noise: noise_to_wire(&doc.noise),
        truth: doc.truth.as_ref().map(|t| WireTruth {
            h_nat: t.h_nat.as_slice().to_vec(),
            m_nat: t.m_nat.as_slice().to_vec(),
            xi: t.xi.as_slice().to_vec(),
            y_hat: t.y_hat.as_slice().to_vec(),
        }),
    }
}

fn from_wire(w: WireDoc) -> Result<InstanceDocument> {
    let check = |name: &str, rows: usize, cols: usize, m: &[Vec<f64>]| -> Result<()> {
        if m.len() != rows || m.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDimension(format!(
                "{name} is not {rows} x {cols}"
            )));
        }
        Ok(())
    };
    check("B", w.l, w.k, &w.b)?;
    check("C", w.l, w.n, &w.c)?;
    let b = DMatrix::from_row_iterator(w.l, w.k, w.b.into_iter().flatten());
    let c = DMatrix::from_row_iterator(w.l, w.n, w.c.into_iter().flatten());
    let instance = ProblemInstance::new(b, c, DVector::from_vec(w.y), w.s)?;
    let truth = match w.truth {
        None => None,
        Some(t) => {
            if t.h_nat.len() != w.k || t.m_nat.len() != w.n || t.xi.len() != w.l || t.y_hat.len() != w.l {
                return Err(Error::InvalidDimension("truth block dimensions disagree".into()));
            }
            Some(GroundTruth {
                h_nat: DVector::from_vec(t.h_nat),
                m_nat: DVector::from_vec(t.m_nat),
                xi: DVector::from_vec(t.xi),
                y_hat: DVector::from_vec(t.y_hat),
            })
        }
    };
    Ok(InstanceDocument {
        instance,
        truth,
        seed: w.seed,
        noise: noise_from_wire(&w.noise)?,
    })
}

pub fn write_instance<W: Write>(writer: W, doc: &InstanceDocument) -> Result<()> {
    serde_json::to_writer_pretty(writer, &to_wire(doc))?;
    Ok(())
}

pub fn instance_to_string(doc: &InstanceDocument) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_wire(doc))?)
}

pub fn read_instance<R: Read>(reader: R) -> Result<InstanceDocument> {
    from_wire(serde_json::from_reader(reader)?)
}

pub fn instance_from_str(text: &str) -> Result<InstanceDocument> {
    from_wire(serde_json::from_str(text)?)
}

pub fn write_instance_path<P: AsRef<Path>>(path: P, doc: &InstanceDocument) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_instance(BufWriter::new(file), doc)
}

pub fn read_instance_path<P: AsRef<Path>>(path: P) -> Result<InstanceDocument> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_instance(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, Target};

    #[test]
    fn round_trip_preserves_bits() {
        let (instance, truth) = generate_instance(
            3,
            2,
            9,
            NoiseModel::UniformSymmetric { alpha: 0.5 },
            Target::Gaussian,
            123,
        )
        .unwrap();
        let doc = InstanceDocument {
            instance,
            truth: Some(truth),
            seed: 123,
            noise: NoiseModel::UniformSymmetric { alpha: 0.5 },
        };
        let text = instance_to_string(&doc).unwrap();
        let back = instance_from_str(&text).unwrap();
        assert_eq!(doc, back);
        // emission is deterministic
        assert_eq!(text, instance_to_string(&doc).unwrap());
    }

    #[test]
    fn floats_carry_17_significant_digits() {
        let (instance, _) =
            generate_instance(1, 1, 1, NoiseModel::None, Target::Gaussian, 4).unwrap();
        let doc = InstanceDocument {
            instance,
            truth: None,
            seed: 4,
            noise: NoiseModel::None,
        };
        let text = instance_to_string(&doc).unwrap();
        // every float is rendered as d.dddddddddddddddde[+-]dd
        assert!(text.contains("e0") || text.contains("e-") || text.contains("e1"));
        let back = instance_from_str(&text).unwrap();
        assert_eq!(doc.instance, back.instance);
    }

    #[test]
    fn truth_block_is_optional() {
        let (instance, _) =
            generate_instance(2, 2, 3, NoiseModel::None, Target::StandardBasis, 9).unwrap();
        let doc = InstanceDocument {
            instance,
            truth: None,
            seed: 9,
            noise: NoiseModel::None,
        };
        let text = instance_to_string(&doc).unwrap();
        assert!(!text.contains("truth"));
        assert!(instance_from_str(&text).unwrap().truth.is_none());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let text = r#"{"K":2,"N":1,"L":1,"B":[[1.0]],"C":[[1.0]],"y":[1.0],"s":[1],"seed":0,"noise":{"kind":"none","alpha":0.0}}"#;
        assert!(instance_from_str(text).is_err());
    }
}
