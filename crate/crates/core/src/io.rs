//! File formats: the TOML config (pencil, search, gap parameters), lattice
//! instance files, and point CSV files.
//!
//! Rationals are always written as `"num/den"` strings. Reading also accepts a
//! bare integer, either quoted or as a TOML integer.

use crate::arith::{format_rational, parse_rational, BigInt, BigRational, RatPoly};
use crate::gap::{GapError, GapParams, GramLattice, Vector};
use crate::pencil::{PencilError, PencilSpec};
use crate::points::{PointRecord, SearchConfig};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed TOML: {0}")]
    Toml(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("bad rational in {field}: {text:?}")]
    Rational { field: String, text: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Serde adapter writing a `BigInt` as a plain JSON number of any size.
pub mod json_int {
    use crate::arith::BigInt;
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let num: serde_json::Number = n.to_string().parse().map_err(S::Error::custom)?;
        num.serialize(s)
    }

    pub(crate) fn from_value<E: serde::de::Error>(v: Value) -> Result<BigInt, E> {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            other => return Err(E::custom(format!("expected an integer, got {other}"))),
        };
        text.parse().map_err(|_| E::custom(format!("not an integer: {text}")))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_value(Value::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            let nums = v
                .iter()
                .map(|n| n.to_string().parse::<serde_json::Number>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(S::Error::custom)?;
            nums.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<Value>::deserialize(d)?.into_iter().map(from_value).collect()
        }
    }
}

/// Serde adapter for `"num/den"` strings.
pub mod json_rational {
    use crate::arith::{format_rational, parse_rational, BigRational};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(|e| D::Error::custom(format!("{text:?}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum RatText {
    Int(i64),
    Text(String),
}

impl RatText {
    fn parse(&self, field: &str) -> Result<BigRational, IoError> {
        match self {
            RatText::Int(n) => Ok(BigRational::from_integer((*n).into())),
            RatText::Text(t) => parse_rational(t).map_err(|_| IoError::Rational { field: field.into(), text: t.clone() }),
        }
    }

    fn of(r: &BigRational) -> Self {
        RatText::Text(format_rational(r))
    }
}

fn parse_all(items: &[RatText], field: &str) -> Result<Vec<BigRational>, IoError> {
    items.iter().enumerate().map(|(i, t)| t.parse(&format!("{field}[{i}]"))).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PencilSection {
    coefficients: Vec<RatText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchSection {
    height_bound: u64,
    #[serde(default = "yes")]
    use_sieve: bool,
    #[serde(default = "yes")]
    count_negatives: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sieve_primes: Option<Vec<u64>>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapSection {
    c: RatText,
    #[serde(rename = "deg_C")]
    deg_c: u32,
    kappa: RatText,
    c3: RatText,
    c2_ball: RatText,
}

impl GapSection {
    fn to_params(&self) -> Result<GapParams, IoError> {
        Ok(GapParams::new(
            self.c.parse("c")?,
            self.deg_c,
            self.kappa.parse("kappa")?,
            self.c3.parse("c3")?,
            self.c2_ball.parse("c2_ball")?,
        )?)
    }

    fn from_params(p: &GapParams) -> Self {
        GapSection {
            c: RatText::of(&p.c),
            deg_c: p.deg_c,
            kappa: RatText::of(&p.kappa),
            c3: RatText::of(&p.c3),
            c2_ball: RatText::of(&p.c2_ball),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    pencil: PencilSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    search: Option<SearchSection>,
    #[serde(default, rename = "gap-params", skip_serializing_if = "Option::is_none")]
    gap_params: Option<GapSection>,
}

/// A parsed config file. `coefficients` are those of `Q`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub coefficients: Vec<BigRational>,
    pub search: Option<SearchConfig>,
    pub gap_params: Option<GapParams>,
}

impl Config {
    pub fn for_pencil(spec: &PencilSpec) -> Self {
        Config { coefficients: spec.q_poly().coeffs().to_vec(), search: None, gap_params: None }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let raw: ConfigFile = toml::from_str(text).map_err(|e| IoError::Toml(e.to_string()))?;
        let search = match raw.search {
            None => None,
            Some(s) => {
                if s.height_bound == 0 {
                    return Err(IoError::Format("search.height_bound must be at least 1".into()));
                }
                Some(SearchConfig {
                    height_bound: s.height_bound,
                    sieve_primes: s.sieve_primes,
                    use_sieve: s.use_sieve,
                    count_negatives: s.count_negatives,
                })
            }
        };
        Ok(Config {
            coefficients: parse_all(&raw.pencil.coefficients, "pencil.coefficients")?,
            search,
            gap_params: raw.gap_params.as_ref().map(GapSection::to_params).transpose()?,
        })
    }

    pub fn render(&self) -> String {
        let raw = ConfigFile {
            pencil: PencilSection { coefficients: self.coefficients.iter().map(RatText::of).collect() },
            search: self.search.as_ref().map(|s| SearchSection {
                height_bound: s.height_bound,
                use_sieve: s.use_sieve,
                count_negatives: s.count_negatives,
                sieve_primes: s.sieve_primes.clone(),
            }),
            gap_params: self.gap_params.as_ref().map(GapSection::from_params),
        };
        toml::to_string(&raw).expect("config serializes")
    }

    pub fn pencil(&self) -> Result<PencilSpec, IoError> {
        Ok(PencilSpec::new(RatPoly::new(self.coefficients.clone()))?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeFileRaw {
    rho: usize,
    gram: Vec<Vec<RatText>>,
    #[serde(default)]
    vectors: Vec<Vec<RatText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stab_classes: Option<Vec<Vec<usize>>>,
    #[serde(default, rename = "gap-params", skip_serializing_if = "Option::is_none")]
    gap_params: Option<GapSection>,
}

/// A gap-simulation instance: Gram form, point vectors, optional stabilizer
/// classes and optional parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeInstance {
    pub lattice: GramLattice,
    pub vectors: Vec<Vector>,
    pub stab_classes: Option<Vec<Vec<usize>>>,
    pub gap_params: Option<GapParams>,
}

impl LatticeInstance {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let raw: LatticeFileRaw = toml::from_str(text).map_err(|e| IoError::Toml(e.to_string()))?;
        if raw.gram.len() != raw.rho {
            return Err(IoError::Format(format!("rho = {} but gram has {} rows", raw.rho, raw.gram.len())));
        }
        let gram = raw
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| parse_all(row, &format!("gram[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let lattice = GramLattice::new(gram)?;
        let vectors = raw
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| parse_all(v, &format!("vectors[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        for v in &vectors {
            lattice.check_dim(v)?;
        }
        Ok(LatticeInstance {
            lattice,
            vectors,
            stab_classes: raw.stab_classes,
            gap_params: raw.gap_params.as_ref().map(GapSection::to_params).transpose()?,
        })
    }

    pub fn render(&self) -> String {
        let rows = |m: &[Vec<BigRational>]| m.iter().map(|r| r.iter().map(RatText::of).collect()).collect();
        let raw = LatticeFileRaw {
            rho: self.lattice.rho(),
            gram: rows(self.lattice.gram()),
            vectors: rows(&self.vectors),
            stab_classes: self.stab_classes.clone(),
            gap_params: self.gap_params.as_ref().map(GapSection::from_params),
        };
        toml::to_string(&raw).expect("lattice serializes")
    }
}

pub const POINTS_CSV_HEADER: [&str; 5] = ["x_num", "x_den", "y_num", "y_den", "is_weierstrass"];

/// One row per point; with `count_negatives` the mirror `(x, -y)` follows each
/// non-Weierstrass point.
pub fn write_points_csv<W: Write>(out: W, records: &[PointRecord], count_negatives: bool) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| IoError::Csv(e.to_string());
    w.write_record(POINTS_CSV_HEADER).map_err(csv_err)?;
    for r in records {
        let mut ys = vec![r.y.clone()];
        if count_negatives && !r.is_weierstrass {
            ys.push(-r.y.clone());
        }
        for y in ys {
            w.write_record([
                r.x.numer().to_string(),
                r.x.denom().to_string(),
                y.numer().to_string(),
                y.denom().to_string(),
                r.is_weierstrass.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a points CSV back into records, dropping mirror rows with `y < 0`.
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<PointRecord>, IoError> {
    let mut rd = csv::Reader::from_reader(input);
    let csv_err = |e: csv::Error| IoError::Csv(e.to_string());
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(POINTS_CSV_HEADER) {
        return Err(IoError::Csv(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let int = |i: usize| -> Result<BigInt, IoError> {
            row[i].parse().map_err(|_| IoError::Csv(format!("bad integer {:?} in {}", &row[i], POINTS_CSV_HEADER[i])))
        };
        let rat = |n: usize, d: usize| -> Result<BigRational, IoError> {
            let den = int(d)?;
            if den.is_zero() {
                return Err(IoError::Csv("zero denominator".into()));
            }
            Ok(BigRational::new(int(n)?, den))
        };
        let x = rat(0, 1)?;
        let y = rat(2, 3)?;
        let is_weierstrass: bool = row[4]
            .parse()
            .map_err(|_| IoError::Csv(format!("bad flag {:?}", &row[4])))?;
        if y.is_negative() {
            continue;
        }
        let x_height = x.numer().abs().max(x.denom().clone());
        out.push(PointRecord { x, y, is_weierstrass, x_height });
    }
    Ok(out)
}
