//! Prescription text format, report emission, and the command surface.
//!
//! The file format is line-oriented; `#` starts a comment and keys inside a
//! directive may come in any order:
//!
//! ```text
//! unit m|mm
//! medium <name> mean=<num> [red=<num>] [violet=<num>]
//! law linear|power ref=<medium-name>
//! object distance=<num>|inf
//! surface radius=<num>|flat thickness=<num> medium=<name> aperture=<num>
//! ```
//!
//! Numbers are decimals or exact rationals `p/q`; rational literals stay
//! exact all the way into the rational arithmetic path, decimals take the
//! float path. Lengths are in the declared unit; everything is normalized
//! to meters when a document is compiled. Reports are CSV with 17
//! significant digits, so every value round-trips bitwise.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::achromat::{self, AchromatError, AchromatTarget, DegeneracyCheck};
use crate::exact;
use crate::media::{self, DispersionLaw, LawKind, OpticalMedium, RefractionPair, SpectralLine};
use crate::paraxial::{CompoundObjective, ImagingQuery, ObjectDistance, ParaxialError};
use crate::raytrace::{self, Prescription, SurfaceSpec, AMBIENT};

/// Default seed of the `duel` command's random draws; printed in the
/// report so runs are reproducible by construction.
pub const DEFAULT_DUEL_SEED: u64 = 1752;

/// Exit code for parse, validation and usage failures.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit code for mathematical degeneracies (degenerate law, afocal system).
pub const EXIT_DEGENERATE: i32 = 2;

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

/// A parsed numeric literal: always carries the float value, and the exact
/// rational when the source was written `p/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Number {
    pub value: f64,
    pub exact: Option<BigRational>,
}

impl Number {
    pub fn from_f64(value: f64) -> Self {
        Number { value, exact: None }
    }

    pub fn from_rational(numer: i64, denom: i64) -> Self {
        let exact = BigRational::new(BigInt::from(numer), BigInt::from(denom));
        Number {
            value: numer as f64 / denom as f64,
            exact: Some(exact),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        if let Some((p, q)) = text.split_once('/') {
            let numer: i64 = p
                .parse()
                .map_err(|_| format!("bad rational numerator `{p}`"))?;
            let denom: i64 = q
                .parse()
                .map_err(|_| format!("bad rational denominator `{q}`"))?;
            if denom == 0 {
                return Err(format!("zero denominator in `{text}`"));
            }
            Ok(Number::from_rational(numer, denom))
        } else {
            let value: f64 = text.parse().map_err(|_| format!("bad number `{text}`"))?;
            if !value.is_finite() {
                return Err(format!("number `{text}` is not finite"));
            }
            Ok(Number::from_f64(value))
        }
    }

    /// Canonical text: the reduced rational when exact, otherwise the
    /// shortest decimal that reparses to the same 64-bit value.
    pub fn emit(&self) -> String {
        match &self.exact {
            Some(r) => format!("{}/{}", r.numer(), r.denom()),
            None => format!("{}", self.value),
        }
    }
}

/// 17-significant-digit decimal used in every CSV report; reparsing yields
/// the identical 64-bit value.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV emission: header row, comma separator, `\n` line ends.
pub fn emit_report(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitDecl {
    Meters,
    Millimeters,
}

impl UnitDecl {
    /// Factor from declared lengths to meters.
    pub fn to_meters(self) -> f64 {
        match self {
            UnitDecl::Meters => 1.0,
            UnitDecl::Millimeters => 1e-3,
        }
    }
}

impl fmt::Display for UnitDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitDecl::Meters => "m",
            UnitDecl::Millimeters => "mm",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MediumBlock {
    pub name: String,
    pub mean: Number,
    pub red: Option<Number>,
    pub violet: Option<Number>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawBlock {
    pub kind: LawKind,
    pub reference: String,
}

/// `object distance=<num>|inf`; a missing distance key is rejected, a
/// missing block means an infinite object.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectBlock {
    pub distance: Option<Number>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceBlock {
    /// `None` encodes a flat face (`radius=flat`).
    pub radius: Option<Number>,
    pub thickness: Number,
    pub medium: String,
    pub aperture: Number,
}

/// Parsed prescription text, lengths still in the declared unit.
#[derive(Clone, Debug, PartialEq)]
pub struct PrescriptionDocument {
    pub unit: UnitDecl,
    pub media: Vec<MediumBlock>,
    pub law: Option<LawBlock>,
    pub object: Option<ObjectBlock>,
    pub surfaces: Vec<SurfaceBlock>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("missing unit declaration (`unit m` or `unit mm`)")]
    MissingUnit,
    #[error("duplicate `{0}` block")]
    Duplicate(&'static str),
    #[error("medium `{0}` is not defined before use")]
    UndefinedMedium(String),
    #[error("medium `{0}` is defined twice")]
    DuplicateMedium(String),
    #[error("`{0}` is the ambient medium and cannot be redefined")]
    ReservedMediumName(String),
    #[error("{0}")]
    BadNumber(String),
    #[error("expected `key=value`, got `{0}`")]
    BadKeyValue(String),
    #[error("unknown key `{0}` for this directive")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("aperture must be positive")]
    NonPositiveAperture,
    #[error("{0}")]
    Invalid(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Splits `key=value` tokens into an ordered list, rejecting duplicates.
fn key_values(tokens: &[&str], line: usize) -> Result<Vec<(String, String)>, ParseError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err(line, ParseErrorKind::BadKeyValue(tok.to_string())))?;
        if value.is_empty() || key.is_empty() {
            return Err(err(line, ParseErrorKind::BadKeyValue(tok.to_string())));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(err(line, ParseErrorKind::DuplicateKey(key.to_string())));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

fn parse_number(text: &str, line: usize) -> Result<Number, ParseError> {
    Number::parse(text).map_err(|msg| err(line, ParseErrorKind::BadNumber(msg)))
}

pub fn parse_prescription(text: &str) -> Result<PrescriptionDocument, ParseError> {
    let mut unit: Option<UnitDecl> = None;
    let mut media: Vec<MediumBlock> = Vec::new();
    let mut law: Option<LawBlock> = None;
    let mut object: Option<ObjectBlock> = None;
    let mut surfaces: Vec<SurfaceBlock> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "unit" => {
                if unit.is_some() {
                    return Err(err(line_no, ParseErrorKind::Duplicate("unit")));
                }
                match tokens.get(1) {
                    Some(&"m") if tokens.len() == 2 => unit = Some(UnitDecl::Meters),
                    Some(&"mm") if tokens.len() == 2 => unit = Some(UnitDecl::Millimeters),
                    _ => {
                        return Err(err(
                            line_no,
                            ParseErrorKind::Invalid("unit must be `m` or `mm`".to_string()),
                        ))
                    }
                }
            }
            "medium" => {
                let name = tokens
                    .get(1)
                    .filter(|t| !t.contains('='))
                    .ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("medium name")))?
                    .to_string();
                if name == AMBIENT {
                    return Err(err(line_no, ParseErrorKind::ReservedMediumName(name)));
                }
                if media.iter().any(|m| m.name == name) {
                    return Err(err(line_no, ParseErrorKind::DuplicateMedium(name)));
                }
                let mut mean = None;
                let mut red = None;
                let mut violet = None;
                for (key, value) in key_values(&tokens[2..], line_no)? {
                    let number = parse_number(&value, line_no)?;
                    match key.as_str() {
                        "mean" => mean = Some(number),
                        "red" => red = Some(number),
                        "violet" => violet = Some(number),
                        other => {
                            return Err(err(line_no, ParseErrorKind::UnknownKey(other.to_string())))
                        }
                    }
                }
                let mean = mean.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("mean")))?;
                let block = MediumBlock {
                    name,
                    mean,
                    red,
                    violet,
                };
                block
                    .to_medium()
                    .validate()
                    .map_err(|e| err(line_no, ParseErrorKind::Invalid(e.to_string())))?;
                media.push(block);
            }
            "law" => {
                if law.is_some() {
                    return Err(err(line_no, ParseErrorKind::Duplicate("law")));
                }
                let kind = tokens
                    .get(1)
                    .and_then(|t| LawKind::from_str(t).ok())
                    .ok_or_else(|| {
                        err(
                            line_no,
                            ParseErrorKind::Invalid("law must be `linear` or `power`".to_string()),
                        )
                    })?;
                let mut reference = None;
                for (key, value) in key_values(&tokens[2..], line_no)? {
                    match key.as_str() {
                        "ref" => reference = Some(value),
                        other => {
                            return Err(err(line_no, ParseErrorKind::UnknownKey(other.to_string())))
                        }
                    }
                }
                let reference =
                    reference.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("ref")))?;
                let block = media.iter().find(|m| m.name == reference).ok_or_else(|| {
                    err(line_no, ParseErrorKind::UndefinedMedium(reference.clone()))
                })?;
                if block.red.is_none() {
                    return Err(err(
                        line_no,
                        ParseErrorKind::Invalid(format!(
                            "reference medium `{reference}` must carry a red ratio"
                        )),
                    ));
                }
                law = Some(LawBlock { kind, reference });
            }
            "object" => {
                if object.is_some() {
                    return Err(err(line_no, ParseErrorKind::Duplicate("object")));
                }
                let mut distance: Option<Option<Number>> = None;
                for (key, value) in key_values(&tokens[1..], line_no)? {
                    match key.as_str() {
                        "distance" => {
                            if value == "inf" {
                                distance = Some(None);
                            } else {
                                let number = parse_number(&value, line_no)?;
                                if !(number.value > 0.0) {
                                    return Err(err(
                                        line_no,
                                        ParseErrorKind::Invalid(
                                            "object distance must be positive".to_string(),
                                        ),
                                    ));
                                }
                                distance = Some(Some(number));
                            }
                        }
                        other => {
                            return Err(err(line_no, ParseErrorKind::UnknownKey(other.to_string())))
                        }
                    }
                }
                let distance =
                    distance.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("distance")))?;
                object = Some(ObjectBlock { distance });
            }
            "surface" => {
                let mut radius: Option<Option<Number>> = None;
                let mut thickness = None;
                let mut medium = None;
                let mut aperture = None;
                for (key, value) in key_values(&tokens[1..], line_no)? {
                    match key.as_str() {
                        "radius" => {
                            if value == "flat" {
                                radius = Some(None);
                            } else {
                                let number = parse_number(&value, line_no)?;
                                if number.value == 0.0 {
                                    return Err(err(
                                        line_no,
                                        ParseErrorKind::Invalid(
                                            "radius must be nonzero (use `flat`)".to_string(),
                                        ),
                                    ));
                                }
                                radius = Some(Some(number));
                            }
                        }
                        "thickness" => {
                            let number = parse_number(&value, line_no)?;
                            if !(number.value >= 0.0) {
                                return Err(err(
                                    line_no,
                                    ParseErrorKind::Invalid(
                                        "thickness must be non-negative".to_string(),
                                    ),
                                ));
                            }
                            thickness = Some(number);
                        }
                        "medium" => medium = Some(value),
                        "aperture" => {
                            let number = parse_number(&value, line_no)?;
                            if !(number.value > 0.0) {
                                return Err(err(line_no, ParseErrorKind::NonPositiveAperture));
                            }
                            aperture = Some(number);
                        }
                        other => {
                            return Err(err(line_no, ParseErrorKind::UnknownKey(other.to_string())))
                        }
                    }
                }
                let radius =
                    radius.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("radius")))?;
                let thickness = thickness
                    .ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("thickness")))?;
                let medium =
                    medium.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("medium")))?;
                let aperture =
                    aperture.ok_or_else(|| err(line_no, ParseErrorKind::MissingKey("aperture")))?;
                if medium != AMBIENT && !media.iter().any(|m| m.name == medium) {
                    return Err(err(line_no, ParseErrorKind::UndefinedMedium(medium)));
                }
                surfaces.push(SurfaceBlock {
                    radius,
                    thickness,
                    medium,
                    aperture,
                });
            }
            other => {
                return Err(err(
                    line_no,
                    ParseErrorKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }

    let unit = unit.ok_or_else(|| err(0, ParseErrorKind::MissingUnit))?;
    Ok(PrescriptionDocument {
        unit,
        media,
        law,
        object,
        surfaces,
    })
}

/// Canonical emission; `parse(emit(parse(t)))` equals `parse(t)`.
pub fn emit_prescription(doc: &PrescriptionDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("unit {}\n", doc.unit));
    for m in &doc.media {
        out.push_str(&format!("medium {} mean={}", m.name, m.mean.emit()));
        if let Some(red) = &m.red {
            out.push_str(&format!(" red={}", red.emit()));
        }
        if let Some(violet) = &m.violet {
            out.push_str(&format!(" violet={}", violet.emit()));
        }
        out.push('\n');
    }
    if let Some(law) = &doc.law {
        out.push_str(&format!("law {} ref={}\n", law.kind, law.reference));
    }
    if let Some(object) = &doc.object {
        match &object.distance {
            Some(d) => out.push_str(&format!("object distance={}\n", d.emit())),
            None => out.push_str("object distance=inf\n"),
        }
    }
    for s in &doc.surfaces {
        let radius = match &s.radius {
            Some(r) => r.emit(),
            None => "flat".to_string(),
        };
        out.push_str(&format!(
            "surface radius={} thickness={} medium={} aperture={}\n",
            radius,
            s.thickness.emit(),
            s.medium,
            s.aperture.emit()
        ));
    }
    out
}

impl MediumBlock {
    pub fn to_medium(&self) -> OpticalMedium {
        let mut medium = OpticalMedium::new(self.name.clone(), self.mean.value);
        if let Some(red) = &self.red {
            medium = medium.with_line(SpectralLine::Red, red.value);
        }
        if let Some(violet) = &self.violet {
            medium = medium.with_line(SpectralLine::Violet, violet.value);
        }
        medium
    }

    /// The exact (mean, red) pair when both literals were rational.
    pub fn exact_red_pair(&self) -> Option<(BigRational, BigRational)> {
        match (&self.mean.exact, &self.red) {
            (Some(mean), Some(red)) => red.exact.clone().map(|r| (mean.clone(), r)),
            _ => None,
        }
    }
}

/// A law choice resolved against a document: the anchored red law plus the
/// violet law when the reference medium measures violet too.
#[derive(Clone, Debug)]
pub struct LawChoice {
    pub kind: LawKind,
    pub reference_name: String,
    pub red: DispersionLaw,
    pub violet: Option<DispersionLaw>,
}

impl PrescriptionDocument {
    /// Media table in core form (ratios are unit-free).
    pub fn media_table(&self) -> BTreeMap<String, OpticalMedium> {
        self.media
            .iter()
            .map(|m| (m.name.clone(), m.to_medium()))
            .collect()
    }

    pub fn object_distance(&self) -> ObjectDistance {
        match &self.object {
            Some(ObjectBlock { distance: Some(d) }) => {
                ObjectDistance::Finite(d.value * self.unit.to_meters())
            }
            _ => ObjectDistance::Infinite,
        }
    }

    /// The traceable system in meters.
    pub fn to_prescription(&self) -> Prescription {
        let scale = self.unit.to_meters();
        let surfaces = self
            .surfaces
            .iter()
            .map(|s| SurfaceSpec {
                curvature: match &s.radius {
                    Some(r) => 1.0 / (r.value * scale),
                    None => 0.0,
                },
                thickness_after: s.thickness.value * scale,
                medium_after: s.medium.clone(),
                semi_aperture: s.aperture.value * scale,
            })
            .collect();
        Prescription {
            surfaces,
            object_distance: self.object_distance(),
            media: self.media_table(),
        }
    }

    /// Resolves the law kind (document block, overridable) and its anchor
    /// (the block's reference, else the first medium carrying a red ratio).
    pub fn law_choice(&self, kind_override: Option<LawKind>) -> Result<LawChoice, String> {
        let (kind, reference_name) = match (&self.law, kind_override) {
            (Some(block), kind) => (kind.unwrap_or(block.kind), block.reference.clone()),
            (None, kind) => {
                let anchor = self
                    .media
                    .iter()
                    .find(|m| m.red.is_some())
                    .ok_or("no law block and no medium carries a red ratio to anchor one")?;
                (kind.unwrap_or(LawKind::Linear), anchor.name.clone())
            }
        };
        let block = self
            .media
            .iter()
            .find(|m| m.name == reference_name)
            .ok_or_else(|| format!("reference medium `{reference_name}` is not defined"))?;
        let mean = block.mean.value;
        let red_ratio = block
            .red
            .as_ref()
            .ok_or_else(|| format!("reference medium `{reference_name}` has no red ratio"))?
            .value;
        let red = DispersionLaw::new(
            kind,
            RefractionPair {
                mean_ratio: mean,
                line_ratio: red_ratio,
            },
        )
        .map_err(|e| e.to_string())?;
        let violet = match &block.violet {
            Some(v) => Some(
                DispersionLaw::new(
                    kind,
                    RefractionPair {
                        mean_ratio: mean,
                        line_ratio: v.value,
                    },
                )
                .map_err(|e| e.to_string())?,
            ),
            None => None,
        };
        Ok(LawChoice {
            kind,
            reference_name,
            red,
            violet,
        })
    }

    /// Interprets the document as the thin four-surface compound objective
    /// (glass, water, glass, ambient at zero thickness).
    pub fn to_objective(&self) -> Result<CompoundObjective, String> {
        let rx = self.to_prescription();
        if rx.surfaces.len() != 4 {
            return Err(format!(
                "expected the four-surface compound objective, found {} surfaces",
                rx.surfaces.len()
            ));
        }
        if rx.surfaces.iter().any(|s| s.thickness_after != 0.0) {
            return Err("the compound objective model is thin: all thicknesses must be 0".into());
        }
        let names: Vec<&str> = rx
            .surfaces
            .iter()
            .map(|s| s.medium_after.as_str())
            .collect();
        if names[0] != names[2] || names[0] == AMBIENT || names[1] == AMBIENT || names[3] != AMBIENT
        {
            return Err(
                "surfaces must run glass, water, glass, air (first and third media equal)".into(),
            );
        }
        let glass = rx
            .media
            .get(names[0])
            .cloned()
            .ok_or("glass medium missing")?;
        let water = rx
            .media
            .get(names[1])
            .cloned()
            .ok_or("water medium missing")?;
        CompoundObjective::new(
            [
                rx.surfaces[0].curvature,
                rx.surfaces[1].curvature,
                rx.surfaces[2].curvature,
                rx.surfaces[3].curvature,
            ],
            glass,
            water,
        )
        .map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "lensduel",
    about = "Glass/water compound objectives under competing dispersion laws",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First-order analysis of a thin four-surface objective file
    Analyze {
        file: PathBuf,
        /// Override the law kind (linear or power)
        #[arg(long)]
        law: Option<String>,
        /// Spectral line for the focal distance (mean, red or violet)
        #[arg(long, default_value = "mean")]
        line: String,
    },
    /// Solve for an achromatic layout at a target power
    Solve {
        /// Law kind (linear or power); linear is degenerate at nonzero power
        #[arg(long)]
        law: String,
        /// Target mean-line power, 1/m
        #[arg(long)]
        power: f64,
        /// Front face curvature, 1/m
        #[arg(long, default_value_t = 0.0)]
        cf: f64,
        /// Second interior curvature; defaults to the symmetric split
        #[arg(long)]
        cg: Option<f64>,
        /// Prescription file supplying `glass` and `water` media
        #[arg(long)]
        media: Option<PathBuf>,
    },
    /// Linear-law degeneracy check beside the power-law solution
    Duel {
        #[arg(long, default_value_t = 1000)]
        samples: u32,
        #[arg(long, default_value_t = DEFAULT_DUEL_SEED)]
        seed: u64,
    },
    /// Exact-trace aberration scan of a prescription file
    Trace {
        file: PathBuf,
        /// Comma-separated ray heights in meters (default spans the focal
        /// length: 1e-4, 0.01, 0.02, 0.05 of it)
        #[arg(long)]
        heights: Option<String>,
        /// Comma-separated spectral lines
        #[arg(long, default_value = "mean,red")]
        lines: String,
    },
}

enum CommandError {
    Validation(String),
    Degenerate(String),
}

impl CommandError {
    fn validation(msg: impl Into<String>) -> Self {
        CommandError::Validation(msg.into())
    }

    fn exit_code(&self) -> i32 {
        match self {
            CommandError::Validation(_) => EXIT_VALIDATION,
            CommandError::Degenerate(_) => EXIT_DEGENERATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CommandError::Validation(m) | CommandError::Degenerate(m) => m,
        }
    }
}

fn load_document(path: &PathBuf) -> Result<PrescriptionDocument, CommandError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandError::validation(format!("{}: {e}", path.display())))?;
    parse_prescription(&text).map_err(|e| CommandError::validation(e.to_string()))
}

fn parse_law_kind(text: &str) -> Result<LawKind, CommandError> {
    LawKind::from_str(text)
        .map_err(|_| CommandError::validation(format!("unknown law `{text}` (linear or power)")))
}

fn parse_line(text: &str) -> Result<SpectralLine, CommandError> {
    SpectralLine::from_str(text).map_err(|e| CommandError::validation(e.to_string()))
}

/// The per-line water/glass power of an objective, when derivable.
fn violet_law_or_explicit(
    objective: &CompoundObjective,
    choice: &LawChoice,
) -> Option<DispersionLaw> {
    let explicit = |m: &OpticalMedium| m.explicit_lines.contains_key(&SpectralLine::Violet);
    if explicit(&objective.glass) && explicit(&objective.water) {
        // Any law instance works: explicit values win.
        return Some(choice.red);
    }
    choice.violet
}

fn cmd_analyze(
    file: &PathBuf,
    law_flag: Option<&str>,
    line_flag: &str,
) -> Result<String, CommandError> {
    let doc = load_document(file)?;
    let kind_override = law_flag.map(parse_law_kind).transpose()?;
    let line = parse_line(line_flag)?;
    let choice = doc
        .law_choice(kind_override)
        .map_err(CommandError::Validation)?;
    let objective = doc.to_objective().map_err(CommandError::Validation)?;
    let object_distance = doc.object_distance();

    let (x, y) = objective.aggregates();
    let power_mean = objective
        .system_power(SpectralLine::Mean, &choice.red)
        .map_err(|e| CommandError::validation(e.to_string()))?;
    let power_red = objective
        .system_power(SpectralLine::Red, &choice.red)
        .map_err(|e| CommandError::validation(e.to_string()))?;
    let shift = power_mean - power_red;

    let mut rows: Vec<Vec<String>> = vec![
        vec!["law".into(), choice.kind.to_string()],
        vec!["reference".into(), choice.reference_name.clone()],
        vec!["line".into(), line.to_string()],
        vec![
            "object_distance".into(),
            match object_distance {
                ObjectDistance::Infinite => "inf".to_string(),
                ObjectDistance::Finite(a) => fmt_value(a),
            },
        ],
        vec!["x".into(), fmt_value(x)],
        vec!["y".into(), fmt_value(y)],
        vec!["power_mean".into(), fmt_value(power_mean)],
        vec!["power_red".into(), fmt_value(power_red)],
        vec!["chromatic_shift_red".into(), fmt_value(shift)],
    ];

    if let Some(violet_law) = violet_law_or_explicit(&objective, &choice) {
        if let Ok(power_violet) = objective.system_power(SpectralLine::Violet, &violet_law) {
            rows.push(vec!["power_violet".into(), fmt_value(power_violet)]);
        }
    }

    let line_law = match line {
        SpectralLine::Violet => violet_law_or_explicit(&objective, &choice).ok_or_else(|| {
            CommandError::validation("no violet data: add violet ratios or a violet-capable law")
        })?,
        _ => choice.red,
    };
    let query = ImagingQuery {
        object_distance,
        line,
        law: line_law,
    };
    match objective.euler_focal_distance(&query) {
        Ok(distance) => {
            rows.push(vec!["focal_distance".into(), fmt_value(distance)]);
            if let ObjectDistance::Finite(a) = object_distance {
                if distance == -a {
                    rows.push(vec![
                        "note".into(),
                        "zero power: the image is the object itself".into(),
                    ]);
                }
            }
            Ok(emit_report(&["key", "value"], &rows))
        }
        Err(ParaxialError::AfocalOrConjugateAtInfinity { power }) => {
            rows.push(vec![
                "note".into(),
                "afocal_or_conjugate_at_infinity".into(),
            ]);
            rows.push(vec!["denominator_power".into(), fmt_value(power)]);
            rows.push(vec![
                "statement".into(),
                "zero power: emergent rays parallel to incident; the image is the object itself"
                    .into(),
            ]);
            Err(CommandError::Degenerate(emit_report(
                &["key", "value"],
                &rows,
            )))
        }
        Err(e) => Err(CommandError::validation(e.to_string())),
    }
}

/// Curvature to an emitted surface radius (`flat` for zero curvature).
fn radius_block(curvature: f64) -> Option<Number> {
    if curvature == 0.0 {
        None
    } else {
        Some(Number::from_f64(1.0 / curvature))
    }
}

fn cmd_solve(
    law_flag: &str,
    power: f64,
    cf: f64,
    cg: Option<f64>,
    media_file: Option<&PathBuf>,
) -> Result<String, CommandError> {
    let kind = parse_law_kind(law_flag)?;

    // Media come from the bundled constants unless a file supplies its own
    // `glass` and `water`.
    let (glass_block, water_block, law) = match media_file {
        None => {
            let glass = MediumBlock {
                name: "glass".into(),
                mean: Number::from_rational(31, 20),
                red: Some(Number::from_rational(77, 50)),
                violet: None,
            };
            let water = MediumBlock {
                name: "water".into(),
                mean: Number::from_rational(4, 3),
                red: None,
                violet: None,
            };
            let law = DispersionLaw::new(kind, media::bundled::glass_red_pair())
                .map_err(|e| CommandError::validation(e.to_string()))?;
            (glass, water, law)
        }
        Some(path) => {
            let doc = load_document(path)?;
            let find = |name: &str| {
                doc.media
                    .iter()
                    .find(|m| m.name == name)
                    .cloned()
                    .ok_or_else(|| {
                        CommandError::validation(format!(
                            "media file must define a medium named `{name}`"
                        ))
                    })
            };
            let glass = find("glass")?;
            let water = find("water")?;
            let choice = doc
                .law_choice(Some(kind))
                .map_err(CommandError::Validation)?;
            (glass, water, choice.red)
        }
    };

    let target = AchromatTarget {
        target_power: power,
        law,
        glass: glass_block.to_medium(),
        water: water_block.to_medium(),
        free_c_f: cf,
        free_c_g: cg,
    };
    let solution = match achromat::solve_achromat(&target) {
        Ok(s) => s,
        Err(e @ AchromatError::DegenerateLaw { .. }) => {
            return Err(CommandError::Degenerate(format!(
                "{e}\n(the linear proportion ties the achromatic condition to zero power; \
                 only target power 0 is achromatizable)"
            )))
        }
        Err(e) => return Err(CommandError::validation(e.to_string())),
    };

    let severity = match achromat::interior_curvature_report(&solution) {
        Ok(s) => fmt_value(s),
        Err(AchromatError::NotApplicable) => "not_applicable".to_string(),
        Err(e) => return Err(CommandError::validation(e.to_string())),
    };

    // Semi-apertures: a quarter of the focal scale, capped below each
    // curved surface's own geometric limit.
    let focal_scale = if power == 0.0 { 1.0 } else { 1.0 / power.abs() };
    let aperture = |curvature: f64| -> Number {
        let budget = 0.0625 * focal_scale;
        let value = if curvature == 0.0 {
            budget
        } else {
            budget.min(0.98 / curvature.abs())
        };
        Number::from_f64(value)
    };

    let o = &solution.objective;
    let doc = PrescriptionDocument {
        unit: UnitDecl::Meters,
        media: vec![glass_block, water_block],
        law: Some(LawBlock {
            kind,
            reference: "glass".into(),
        }),
        object: Some(ObjectBlock { distance: None }),
        surfaces: vec![
            SurfaceBlock {
                radius: radius_block(o.c_f),
                thickness: Number::from_f64(0.0),
                medium: "glass".into(),
                aperture: aperture(o.c_f),
            },
            SurfaceBlock {
                radius: radius_block(o.c_g),
                thickness: Number::from_f64(0.0),
                medium: "water".into(),
                aperture: aperture(o.c_g),
            },
            SurfaceBlock {
                radius: radius_block(o.c_h),
                thickness: Number::from_f64(0.0),
                medium: "glass".into(),
                aperture: aperture(o.c_h),
            },
            SurfaceBlock {
                radius: radius_block(o.c_k),
                thickness: Number::from_f64(0.0),
                medium: AMBIENT.into(),
                aperture: aperture(o.c_k),
            },
        ],
    };

    let mut out = String::new();
    out.push_str(&format!(
        "# achromatic solution: law={kind} target_power={}\n",
        fmt_value(power)
    ));
    out.push_str(&format!(
        "# x={} y={}\n",
        fmt_value(solution.x),
        fmt_value(solution.y)
    ));
    out.push_str(&format!(
        "# curvatures: c_f={} c_g={} c_h={} c_k={}\n",
        fmt_value(o.c_f),
        fmt_value(o.c_g),
        fmt_value(o.c_h),
        fmt_value(o.c_k)
    ));
    out.push_str(&format!("# residual={}\n", fmt_value(solution.residual)));
    out.push_str(&format!("# severity={severity}\n"));
    out.push_str(&format!(
        "# x moves by {} per unit error in the derived water red ratio\n",
        fmt_value(solution.red_ratio_sensitivity)
    ));
    out.push_str("# apertures are capped below each curved surface's geometric limit\n");
    out.push_str(&emit_prescription(&doc));
    Ok(out)
}

fn cmd_duel(samples: u32, seed: u64) -> Result<String, CommandError> {
    let mut rows: Vec<Vec<String>> = Vec::new();

    // Linear law: achromatism forces zero power on every random sample.
    let check = DegeneracyCheck::with_bundled_media(media::bundled::linear_law(), samples, seed);
    let report = achromat::dollond_degeneracy_check(&check)
        .map_err(|e| CommandError::validation(e.to_string()))?;
    rows.push(vec!["degeneracy".into(), "law".into(), "linear".into()]);
    rows.push(vec![
        "degeneracy".into(),
        "samples".into(),
        report.samples.to_string(),
    ]);
    rows.push(vec![
        "degeneracy".into(),
        "seed".into(),
        report.seed.to_string(),
    ]);
    rows.push(vec![
        "degeneracy".into(),
        "max_abs_power".into(),
        fmt_value(report.max_abs_power),
    ]);
    rows.push(vec![
        "degeneracy".into(),
        "max_scaled_power".into(),
        fmt_value(report.max_scaled_power),
    ]);
    rows.push(vec![
        "degeneracy".into(),
        "bound".into(),
        fmt_value(achromat::DEGENERACY_POWER_BOUND),
    ]);
    rows.push(vec![
        "degeneracy".into(),
        "verdict".into(),
        "achromatism forces zero power".into(),
    ]);

    // The same identity in exact rational arithmetic.
    let exact_report = exact::degeneracy_check(samples, seed);
    rows.push(vec![
        "exact".into(),
        "max_abs_power".into(),
        exact_report.max_abs_power.to_string(),
    ]);
    rows.push(vec![
        "exact".into(),
        "identically_zero".into(),
        exact_report.identically_zero().to_string(),
    ]);

    // The power law escapes the degeneracy: exhibit one counterexample.
    let counter =
        DegeneracyCheck::with_bundled_media(media::bundled::power_law(), samples.min(16), seed);
    match achromat::dollond_degeneracy_check(&counter) {
        Err(AchromatError::DegeneracyViolation { power, .. }) => {
            rows.push(vec!["counterexample".into(), "law".into(), "power".into()]);
            rows.push(vec![
                "counterexample".into(),
                "abs_power".into(),
                fmt_value(power.abs()),
            ]);
        }
        _ => {
            rows.push(vec![
                "counterexample".into(),
                "law".into(),
                "power (no violation found)".into(),
            ]);
        }
    }

    // And the solver inverts it: the unit-power achromat.
    let target = AchromatTarget::with_bundled_media(1.0, media::bundled::power_law());
    let solution =
        achromat::solve_achromat(&target).map_err(|e| CommandError::validation(e.to_string()))?;
    let severity = achromat::interior_curvature_report(&solution)
        .map_err(|e| CommandError::validation(e.to_string()))?;
    let o = &solution.objective;
    for (key, value) in [
        ("law", "power".to_string()),
        ("target_power", fmt_value(solution.target_power)),
        ("x", fmt_value(solution.x)),
        ("y", fmt_value(solution.y)),
        ("c_f", fmt_value(o.c_f)),
        ("c_g", fmt_value(o.c_g)),
        ("c_h", fmt_value(o.c_h)),
        ("c_k", fmt_value(o.c_k)),
        (
            "interior_curvature_max",
            fmt_value(solution.interior_curvature_max),
        ),
        ("severity", fmt_value(severity)),
        ("residual", fmt_value(solution.residual)),
        (
            "red_ratio_sensitivity",
            fmt_value(solution.red_ratio_sensitivity),
        ),
    ] {
        rows.push(vec!["achromat".into(), key.into(), value]);
    }

    Ok(emit_report(&["section", "key", "value"], &rows))
}

fn cmd_trace(
    file: &PathBuf,
    heights_flag: Option<&str>,
    lines_flag: &str,
) -> Result<String, CommandError> {
    let doc = load_document(file)?;
    let rx = doc.to_prescription();
    rx.validate()
        .map_err(|e| CommandError::validation(e.to_string()))?;
    let choice = doc.law_choice(None).map_err(CommandError::Validation)?;

    let mut lines = Vec::new();
    for token in lines_flag.split(',') {
        let line = parse_line(token.trim())?;
        if !lines.contains(&line) {
            lines.push(line);
        }
    }
    if lines.is_empty() {
        return Err(CommandError::validation("no spectral lines requested"));
    }

    // One law instance anchors one non-mean line; pick the anchor the
    // requested lines actually need.
    let scan_law = match raytrace::law_derived_lines(&rx, &lines).as_slice() {
        [] | [SpectralLine::Red] => choice.red,
        [SpectralLine::Violet] => choice.violet.ok_or_else(|| {
            CommandError::validation(
                "no violet anchor: the law reference medium carries no violet ratio",
            )
        })?,
        _ => {
            return Err(CommandError::validation(
                "tracing red and violet together needs explicit violet ratios on every medium",
            ))
        }
    };

    let heights: Vec<f64> = match heights_flag {
        Some(text) => {
            let mut hs = Vec::new();
            for token in text.split(',') {
                let h: f64 = token
                    .trim()
                    .parse()
                    .map_err(|_| CommandError::validation(format!("bad height `{token}`")))?;
                hs.push(h);
            }
            hs
        }
        None => {
            let bfd = rx
                .paraxial_bfd(SpectralLine::Mean, &choice.red)
                .map_err(|e| CommandError::validation(e.to_string()))?
                .ok_or_else(|| {
                    CommandError::Degenerate(
                        "afocal system: default heights scale with the focal length, \
                         pass --heights explicitly"
                            .into(),
                    )
                })?;
            raytrace::default_report_heights(1.0 / bfd)
        }
    };

    let report = raytrace::aberration_scan(&rx, &heights, &lines, &scan_law)
        .map_err(|e| CommandError::validation(e.to_string()))?;

    let header = [
        "row",
        "height",
        "line",
        "status",
        "surface",
        "back_focal_distance",
        "longitudinal_shift",
    ];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (line, bfd) in &report.axial {
        rows.push(vec![
            "ray".into(),
            fmt_value(0.0),
            line.to_string(),
            "ok".into(),
            String::new(),
            bfd.map(fmt_value).unwrap_or_default(),
            fmt_value(0.0),
        ]);
    }
    for row in &report.rows {
        rows.push(vec![
            "ray".into(),
            fmt_value(row.height),
            row.line.to_string(),
            row.outcome.status.label().into(),
            row.outcome
                .status
                .surface()
                .map(|s| s.to_string())
                .unwrap_or_default(),
            row.outcome
                .back_focal_distance
                .map(fmt_value)
                .unwrap_or_default(),
            row.longitudinal_shift.map(fmt_value).unwrap_or_default(),
        ]);
    }
    for row in &report.chromatic {
        rows.push(vec![
            "chromatic".into(),
            fmt_value(row.height),
            "red-mean".into(),
            String::new(),
            String::new(),
            String::new(),
            row.shift.map(fmt_value).unwrap_or_default(),
        ]);
    }
    Ok(emit_report(&header, &rows))
}

/// Runs one command line; report text goes to `out`, diagnostics to `err`.
/// Exit codes: 0 success, 1 parse/validation, 2 mathematical degeneracy.
pub fn run<I, T, O, E>(args: I, out: &mut O, err_sink: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => EXIT_VALIDATION,
            };
            let _ = write!(err_sink, "{e}");
            return code;
        }
    };

    let result = match &cli.command {
        Command::Analyze { file, law, line } => cmd_analyze(file, law.as_deref(), line),
        Command::Solve {
            law,
            power,
            cf,
            cg,
            media,
        } => cmd_solve(law, *power, *cf, *cg, media.as_ref()),
        Command::Duel { samples, seed } => cmd_duel(*samples, *seed),
        Command::Trace {
            file,
            heights,
            lines,
        } => cmd_trace(file, heights.as_deref(), lines),
    };

    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            // An analyze report on a degenerate system still prints what it
            // computed before the note rows.
            if let CommandError::Degenerate(text) = &e {
                if text.contains('\n') && text.starts_with("key,value") {
                    let _ = out.write_all(text.as_bytes());
                    return EXIT_DEGENERATE;
                }
            }
            let _ = writeln!(err_sink, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn run_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
