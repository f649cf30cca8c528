//! File formats: key and group JSON, trajectory and profile CSV, frame
//! text, and parsers for matrix/vector arguments.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codec::{ChannelFrame, ProfileRow};
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, RatMatrix};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::sync::ObserverKey;
use crate::tiling::{builtin_group, DomainSource, FundamentalDomain, GroupSpec, Isometry};

pub const KEY_FILE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetFile {
    #[serde(rename = "Q")]
    pub q: Vec<Vec<i64>>,
    #[serde(deserialize_with = "rational_texts")]
    pub v: Vec<String>,
}

/// Rational entries may be written as JSON integers or as strings such as
/// `"1/2"`.
#[derive(Deserialize)]
#[serde(untagged)]
enum RationalText {
    Int(i64),
    Text(String),
}

impl From<RationalText> for String {
    fn from(t: RationalText) -> String {
        match t {
            RationalText::Int(i) => i.to_string(),
            RationalText::Text(s) => s,
        }
    }
}

fn rational_texts<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<String>, D::Error> {
    let v: Vec<RationalText> = Deserialize::deserialize(d)?;
    Ok(v.into_iter().map(String::from).collect())
}

fn rational_text_rows<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<String>>, D::Error> {
    let v: Vec<Vec<RationalText>> = Deserialize::deserialize(d)?;
    Ok(v.into_iter().map(|r| r.into_iter().map(String::from).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainFile {
    /// `"builtin:<name>"`
    Builtin(String),
    Box {
        #[serde(deserialize_with = "rational_texts")]
        lo: Vec<String>,
        #[serde(deserialize_with = "rational_texts")]
        hi: Vec<String>,
        closed_hi: Vec<bool>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpecFile {
    pub name: String,
    pub n: usize,
    #[serde(rename = "U", deserialize_with = "rational_text_rows")]
    pub u: Vec<Vec<String>>,
    pub cosets: Vec<CosetFile>,
    pub domain: DomainFile,
    pub radius: usize,
}

/// A group in a file: a builtin name or a full description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupFile {
    Name(String),
    Spec(GroupSpecFile),
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn rationals(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn group_to_file(g: &GroupSpec) -> GroupFile {
    if builtin_group(g.name()).is_ok_and(|b| &b == g) {
        return GroupFile::Name(g.name().to_string());
    }
    let domain = match g.domain().source() {
        DomainSource::Builtin(name) => DomainFile::Builtin(format!("builtin:{name}")),
        DomainSource::Box { lo, hi, closed_hi } => {
            DomainFile::Box { lo: strings(lo), hi: strings(hi), closed_hi: closed_hi.clone() }
        }
    };
    GroupFile::Spec(GroupSpecFile {
        name: g.name().to_string(),
        n: g.dim(),
        u: g.basis().rows().iter().map(|r| strings(r)).collect(),
        cosets: g
            .cosets()
            .iter()
            .map(|c| CosetFile {
                q: c.linear().rows().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect(),
                v: strings(c.offset()),
            })
            .collect(),
        domain,
        radius: g.radius(),
    })
}

pub fn group_from_file(f: &GroupFile) -> Result<GroupSpec> {
    let spec = match f {
        GroupFile::Name(name) => return builtin_group(name),
        GroupFile::Spec(s) => s,
    };
    let basis = RatMatrix::from_rows(spec.u.iter().map(|r| rationals(r)).collect::<Result<_>>()?)?;
    if basis.dim() != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, got: basis.dim() });
    }
    let cosets = spec
        .cosets
        .iter()
        .map(|c| {
            let q = c.q.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
            Isometry::new(IntMatrix::from_rows(q)?, rationals(&c.v)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let domain = match &spec.domain {
        DomainFile::Box { lo, hi, closed_hi } => FundamentalDomain::boxed(rationals(lo)?, rationals(hi)?, closed_hi.clone())?,
        DomainFile::Builtin(tag) => {
            let name = tag
                .strip_prefix("builtin:")
                .ok_or_else(|| Error::Parse(format!("domain `{tag}` is neither builtin:<name> nor a box")))?;
            let group_name = if name == "torus" { format!("torus({})", spec.n) } else { name.to_string() };
            builtin_group(&group_name)?.domain().clone()
        }
    };
    GroupSpec::new(spec.name.clone(), basis, cosets, domain, spec.radius)
}

pub fn group_from_json(text: &str) -> Result<GroupSpec> {
    let f: GroupFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    group_from_file(&f)
}

pub fn group_to_json(g: &GroupSpec) -> String {
    serde_json::to_string_pretty(&group_to_file(g)).expect("group serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFile {
    pub version: u32,
    pub n: usize,
    pub group: GroupFile,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i128>>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
    #[serde(rename = "C")]
    pub c: Vec<i128>,
    #[serde(rename = "L")]
    pub l: Vec<i128>,
    #[serde(rename = "M")]
    pub m: Vec<i128>,
    #[serde(rename = "T")]
    pub t: Vec<Vec<i128>>,
    pub alphas: Vec<i128>,
}

pub fn key_to_json(key: &ObserverKey) -> String {
    let f = KeyFile {
        version: KEY_FILE_VERSION,
        n: key.n(),
        group: group_to_file(key.group()),
        a: key.a().rows(),
        b: strings(key.b()),
        c: key.c().to_vec(),
        l: key.l().to_vec(),
        m: key.m().to_vec(),
        t: key.t().rows(),
        alphas: key.alphas().to_vec(),
    };
    serde_json::to_string_pretty(&f).expect("key serializes")
}

/// Parses a key and re-derives `L`, `M` and `alphas`, which must match the
/// stored ones.
pub fn key_from_json(text: &str) -> Result<ObserverKey> {
    let f: KeyFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if f.version != KEY_FILE_VERSION {
        return Err(Error::Parse(format!("unsupported key file version {}", f.version)));
    }
    let key = ObserverKey::from_parts(
        IntMatrix::from_rows(f.a)?,
        rationals(&f.b)?,
        f.c,
        IntMatrix::from_rows(f.t)?,
        group_from_file(&f.group)?,
    )?;
    if key.n() != f.n || key.l() != f.l || key.m() != f.m || key.alphas() != f.alphas {
        return Err(Error::InternalInconsistency("stored n, L, M or alphas disagree with A, C, T".into()));
    }
    Ok(key)
}

/// `k,x1,...,xN`, one row per state; exact values as `p/q`, floats with
/// `precision` decimals.
pub fn trajectory_csv<S: Scalar>(traj: &[Vec<S>], precision: usize) -> String {
    let n = traj.first().map_or(0, Vec::len);
    let mut out = String::from("k");
    for i in 1..=n {
        write!(out, ",x{i}").expect("write to string");
    }
    out.push('\n');
    for (k, x) in traj.iter().enumerate() {
        write!(out, "{k}").expect("write to string");
        for c in x {
            out.push(',');
            out.push_str(&render(c, precision));
        }
        out.push('\n');
    }
    out
}

fn render<S: Scalar>(c: &S, precision: usize) -> String {
    if S::EXACT {
        c.to_exact().map(|r| format_rational(&r)).unwrap_or_default()
    } else {
        format!("{:.*}", precision, c.to_f64())
    }
}

/// Columns `k,e_k,u_minus_uhat,sent,recovered`.
pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from("k,e_k,u_minus_uhat,sent,recovered\n");
    let opt = |v: Option<u8>| v.map(|b| b.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(out, "{},{:e},{:e},{},{}", r.k, r.state_error, r.input_error, opt(r.sent), opt(r.recovered))
            .expect("write to string");
    }
    out
}

pub fn frames_to_text(frames: &[ChannelFrame]) -> String {
    frames.iter().map(|f| format!("{f}\n")).collect()
}

/// One frame per non-empty line.
pub fn frames_from_text(text: &str) -> Result<Vec<ChannelFrame>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}

/// `"1,-7,-3"`
pub fn parse_int_list(s: &str) -> Result<Vec<i128>> {
    s.split(',')
        .map(|t| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("not an integer: `{t}`"))))
        .collect()
}

/// `"1/2,-3.2"`
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

/// Rows separated by `;`, entries by `,`: `"2,1;1,1"`.
pub fn parse_int_matrix(s: &str) -> Result<IntMatrix> {
    let rows = s.split(';').map(parse_int_list).collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}
