//! Text persistence for fitted classifiers.
//!
//! One `key=value` pair per line, numbers in scientific notation with 17
//! significant digits, vectors and matrices as comma-separated row-major
//! lists. Lines starting with `#` and blank lines are ignored.
//!
//! ```text
//! format_version=1
//! n=2
//! mode=trace
//! p1=5.0000000000000000e-1
//! p2=5.0000000000000000e-1
//! P1=1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0
//! trK1=6.0000000000000000e0
//! trK2=2.0000000000000000e0
//! m1=2.0000000000000000e0,0.0000000000000000e0
//! m2=0.0000000000000000e0,0.0000000000000000e0
//! spectrum=1.6666666666666666e-1,-1.6666666666666666e-1
//! ```
//!
//! Every stored value parses back to the identical bit pattern, and `P₂` is
//! rebuilt as `I − P₁` the same way fitting builds it, so a reloaded model
//! makes exactly the same decisions.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::classifier::{EnergyClassifier, NormalizationMode};
use crate::datasets::{fmt_real, ClassLabel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SymMatrix;

pub const FORMAT_VERSION: u32 = 1;

const KEYS: [&str; 11] = [
    "format_version",
    "n",
    "mode",
    "p1",
    "p2",
    "P1",
    "trK1",
    "trK2",
    "m1",
    "m2",
    "spectrum",
];

fn join<T: Real>(values: &[T]) -> String {
    values
        .iter()
        .map(|&v| fmt_real(v))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn to_model_string<T: Real>(clf: &EnergyClassifier<T>) -> String {
    let [p1, p2] = clf.priors();
    let [tr1, tr2] = clf.traces();
    let mut out = String::from("# qenergy model\n");
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    line("format_version", FORMAT_VERSION.to_string());
    line("n", clf.dim().to_string());
    line("mode", clf.mode().to_string());
    line("p1", fmt_real(p1));
    line("p2", fmt_real(p2));
    line(
        "P1",
        join(clf.projector(ClassLabel::One).matrix().as_slice()),
    );
    line("trK1", fmt_real(tr1));
    line("trK2", fmt_real(tr2));
    line("m1", join(clf.mean(ClassLabel::One)));
    line("m2", join(clf.mean(ClassLabel::Two)));
    line("spectrum", join(clf.spectrum()));
    out
}

pub fn parse_model<T: Real>(text: &str) -> Result<EnergyClassifier<T>> {
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ParseError {
            line: line_no,
            msg: "expected key=value".into(),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::ParseError {
                line: line_no,
                msg: format!("unknown key `{key}`"),
            });
        }
        if fields.insert(key, (line_no, value.trim())).is_some() {
            return Err(Error::ParseError {
                line: line_no,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }
    let get = |key: &str| -> Result<(usize, &str)> {
        fields.get(key).copied().ok_or_else(|| Error::ParseError {
            line: 0,
            msg: format!("missing key `{key}`"),
        })
    };
    let scalar = |key: &str| -> Result<T> {
        let (line, v) = get(key)?;
        parse_num(v, line)
    };
    let vector = |key: &str, len: usize| -> Result<Vec<T>> {
        let (line, v) = get(key)?;
        let values = if v.is_empty() {
            Vec::new()
        } else {
            v.split(',')
                .map(|s| parse_num(s.trim(), line))
                .collect::<Result<Vec<T>>>()?
        };
        if values.len() != len {
            return Err(Error::ParseError {
                line,
                msg: format!("`{key}` has {} values, expected {len}", values.len()),
            });
        }
        Ok(values)
    };

    let (line, version) = get("format_version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::ParseError {
            line,
            msg: format!("unsupported format_version `{version}`"),
        });
    }
    let (line, n) = get("n")?;
    let n: usize = n.parse().map_err(|_| Error::ParseError {
        line,
        msg: format!("bad dimension `{n}`"),
    })?;
    let (line, mode) = get("mode")?;
    let mode: NormalizationMode = mode.parse().map_err(|e: Error| Error::ParseError {
        line,
        msg: e.to_string(),
    })?;

    let p1 = SymMatrix::new(n, vector("P1", n * n)?)?;
    EnergyClassifier::from_parts(
        mode,
        p1,
        [scalar("p1")?, scalar("p2")?],
        [scalar("trK1")?, scalar("trK2")?],
        [vector("m1", n)?, vector("m2", n)?],
        vector("spectrum", n)?,
    )
}

fn parse_num<T: Real>(s: &str, line: usize) -> Result<T> {
    s.parse::<T>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::ParseError {
            line,
            msg: format!("`{s}` is not a finite number"),
        })
}

pub fn save_model<T: Real>(clf: &EnergyClassifier<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_model_string(clf))?;
    Ok(())
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<EnergyClassifier<T>> {
    let mut text = String::new();
    fs::File::open(path)?.read_to_string(&mut text)?;
    parse_model(&text)
}
