//! Dataset ingestion: JSON (canonical) and CSV (points with optional values).
//!
//! JSON datasets look like `{"schema": 1, "points": [[...], ...], "values": [...]}`.
//! Exact scalars are strings such as `"5/3"` or `"1/2-3 i"`; integers and
//! decimal numbers are read by their decimal text. Float scalars are numbers,
//! strings, or `[re, im]` pairs.

use std::fmt;
use std::fs;
use std::marker::PhantomData;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num::complex::Complex64;
use serde::de::{self, DeserializeOwned, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};
use whitney_core::scalar::parse_gaussian;
use whitney_core::{Field, GaussianRational};

pub const SCHEMA: u32 = 1;

/// A scalar type that can be read from dataset files.
pub trait InputScalar: Field + Serialize + DeserializeOwned {
    fn parse_text(s: &str) -> Result<Self, String>;
    fn from_number(x: f64) -> Result<Self, String>;
    /// Text that [`InputScalar::parse_text`] reads back.
    fn show(&self) -> String;
}

impl InputScalar for GaussianRational {
    fn parse_text(s: &str) -> Result<Self, String> {
        parse_gaussian(s).map_err(|e| e.to_string())
    }

    fn from_number(x: f64) -> Result<Self, String> {
        if !x.is_finite() {
            return Err(format!("non-finite number {x}"));
        }
        // Shortest round-trip decimal, so 0.1 reads as 1/10.
        parse_gaussian(&format!("{x:e}")).map_err(|e| e.to_string())
    }

    fn show(&self) -> String {
        self.to_string()
    }
}

impl InputScalar for Complex64 {
    fn parse_text(s: &str) -> Result<Self, String> {
        parse_gaussian(s).map(|g| g.to_c64()).map_err(|e| e.to_string())
    }

    fn from_number(x: f64) -> Result<Self, String> {
        Ok(Complex64::new(x, 0.0))
    }

    fn show(&self) -> String {
        if self.im == 0.0 {
            format!("{:?}", self.re)
        } else {
            let sign = if self.im.is_sign_negative() { '-' } else { '+' };
            format!("{:?}{sign}{:?} i", self.re, self.im.abs())
        }
    }
}

/// One scalar cell of a JSON dataset.
pub struct Cell<T>(pub T);

impl<'de, T: InputScalar> Deserialize<'de> for Cell<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(CellVisitor(PhantomData))
    }
}

struct CellVisitor<T>(PhantomData<T>);

impl<'de, T: InputScalar> Visitor<'de> for CellVisitor<T> {
    type Value = Cell<T>;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a scalar: number, string such as \"5/3\", or [re, im] pair")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
        T::parse_text(v).map(Cell).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
        Ok(Cell(T::from_i64(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
        T::parse_text(&v.to_string()).map(Cell).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
        T::from_number(v).map(Cell).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let part = |c: Option<Cell<T>>, which: &str| match c {
            Some(Cell(v)) if v.is_real() => Ok(v),
            Some(_) => Err(de::Error::custom(format!("{which} part of a pair must be real"))),
            None => Err(de::Error::custom("a complex pair needs two entries [re, im]")),
        };
        let re = part(seq.next_element()?, "real")?;
        let im = part(seq.next_element()?, "imaginary")?;
        if seq.next_element::<de::IgnoredAny>()?.is_some() {
            return Err(de::Error::custom("a complex pair has exactly two entries [re, im]"));
        }
        Ok(Cell(re + T::imag_unit() * im))
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: InputScalar"))]
struct RawPoints<T> {
    schema: Option<u32>,
    points: Vec<Vec<Cell<T>>>,
    #[serde(default)]
    values: Option<Vec<Cell<T>>>,
}

/// Points with optional values, as read from a file.
#[derive(Debug)]
pub struct PointSet<T> {
    pub points: Vec<Vec<T>>,
    pub values: Option<Vec<T>>,
}

pub fn check_schema(schema: Option<u32>) -> Result<()> {
    match schema {
        None | Some(SCHEMA) => Ok(()),
        Some(other) => bail!("unsupported schema version {other}; this build reads schema {SCHEMA}"),
    }
}

pub fn parse_json<T: InputScalar>(text: &str) -> Result<PointSet<T>> {
    let raw: RawPoints<T> = serde_json::from_str(text)?;
    check_schema(raw.schema)?;
    Ok(PointSet {
        points: raw.points.into_iter().map(|p| p.into_iter().map(|c| c.0).collect()).collect(),
        values: raw.values.map(|v| v.into_iter().map(|c| c.0).collect()),
    })
}

/// CSV with a header row `x1, …, xn[, y_re[, y_im]]`.
pub fn parse_csv<T: InputScalar>(text: &str) -> Result<PointSet<T>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().context("reading the CSV header")?.clone();
    let mut dim = 0;
    let (mut y_re, mut y_im) = (None, None);
    for (k, h) in headers.iter().enumerate() {
        match h {
            "y_re" => y_re = Some(k),
            "y_im" => y_im = Some(k),
            _ if h == format!("x{}", dim + 1) && k == dim => dim += 1,
            _ => bail!("line 1: unexpected column {h:?}; expected x1..xn, y_re, y_im"),
        }
    }
    if dim == 0 {
        bail!("line 1: no coordinate columns x1..xn");
    }
    if y_im.is_some() && y_re.is_none() {
        bail!("line 1: column y_im without y_re");
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |k: usize| -> Result<T> {
            let s = record.get(k).unwrap_or("");
            T::parse_text(s).map_err(|e| anyhow::anyhow!("line {line}, column {}: {e}", &headers[k]))
        };
        points.push((0..dim).map(cell).collect::<Result<Vec<T>>>()?);
        if let Some(k) = y_re {
            let re = cell(k)?;
            let im = match y_im {
                Some(k) => cell(k)?,
                None => T::zero(),
            };
            if !re.is_real() || !im.is_real() {
                bail!("line {line}: y_re and y_im must be real");
            }
            values.push(re + T::imag_unit() * im);
        }
    }
    Ok(PointSet {
        points,
        values: y_re.map(|_| values),
    })
}

pub fn read_points<T: InputScalar>(path: &Path) -> Result<PointSet<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv { parse_csv(&text) } else { parse_json(&text) };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use whitney_core::scalar::ratio;

    fn q(a: i64, b: i64) -> GaussianRational {
        GaussianRational::real(ratio(a, b))
    }

    #[test]
    fn exact_json_reads_strings_numbers_and_pairs() {
        let set: PointSet<GaussianRational> =
            parse_json(r#"{"schema": 1, "points": [["5/3", 0, 0.5, [1, "1/2"]]], "values": ["1-2 i"]}"#).unwrap();
        assert_eq!(
            set.points[0],
            vec![q(5, 3), q(0, 1), q(1, 2), GaussianRational::from_ratios(1, 1, 1, 2)]
        );
        assert_eq!(set.values.unwrap()[0], GaussianRational::from_ratios(1, 1, -2, 1));
    }

    #[test]
    fn float_json_reads_pairs() {
        let set: PointSet<Complex64> = parse_json(r#"{"points": [[0.25, [1, 2]]]}"#).unwrap();
        assert_eq!(set.points[0], vec![Complex64::new(0.25, 0.0), Complex64::new(1.0, 2.0)]);
        assert!(set.values.is_none());
    }

    #[test]
    fn json_errors_carry_line_numbers() {
        let err = parse_json::<GaussianRational>("{\"points\": [\n[1, 2],\n[\"x/y\", 0]\n], \"values\": [1, 2]}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn shown_scalars_parse_back() {
        for z in [Complex64::new(0.1, 0.0), Complex64::new(-1.5, -2e-7), Complex64::new(3.0, 0.25)] {
            assert_eq!(Complex64::parse_text(&z.show()).unwrap(), z);
        }
        let g = GaussianRational::from_ratios(-5, 3, 1, 7);
        assert_eq!(GaussianRational::parse_text(&g.show()).unwrap(), g);
    }

    #[test]
    fn other_schema_is_rejected() {
        assert!(parse_json::<Complex64>(r#"{"schema": 2, "points": [[1]]}"#).is_err());
    }

    #[test]
    fn csv_points_and_values() {
        let set: PointSet<GaussianRational> = parse_csv("x1,x2,y_re,y_im\n1,0,3/4,0\n0,1,1,-1\n").unwrap();
        assert_eq!(set.points, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert_eq!(set.values.unwrap(), vec![q(3, 4), GaussianRational::from_ratios(1, 1, -1, 1)]);
        let bare: PointSet<Complex64> = parse_csv("x1\n0.5\n").unwrap();
        assert!(bare.values.is_none());
    }

    #[test]
    fn csv_errors_name_line_and_column() {
        let err = parse_csv::<GaussianRational>("x1,y_re\n1,2\n1/0,3\n").unwrap_err();
        assert!(err.to_string().contains("line 3, column x1"), "{err}");
        assert!(parse_csv::<GaussianRational>("x2,y_re\n1,2\n").is_err());
    }
}
