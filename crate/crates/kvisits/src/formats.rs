//! Line-oriented text formats for instances, schedules, and matching
//! problems.
//!
//! Every file holds one object: a `tag version` header line, then one field
//! per line (`name value...`), whitespace-separated, with `#` starting a
//! comment anywhere on a line and blank lines ignored. Serialization is
//! deterministic with LF endings, so parse/serialize round-trips are exact.

use crate::instances::{InstanceError, KVisitsInstance, Schedule, VarKVisitsInstance};
use crate::pm::{PmError, PositionMatchingInstance};
use crate::reductions::{
    In3dmInstance, ReductionError, Rn3dmInstance, ThresholdPinwheelInstance,
};

/// Format tags and their current versions, in the order they are printed by
/// tooling.
pub const FORMAT_VERSIONS: &[(&str, u32)] = &[
    ("kvisits", 1),
    ("varkvisits", 1),
    ("schedule", 1),
    ("pm", 1),
    ("rn3dm", 1),
    ("in3dm", 1),
    ("tpws", 1),
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("empty input: expected a `tag version` header line")]
    MissingHeader,
    #[error("unknown format tag {got:?}")]
    UnknownTag { got: String },
    #[error("line {line}: expected header {expected:?}, found {got:?}")]
    WrongTag { line: usize, expected: String, got: String },
    #[error("line {line}: unsupported {tag} version {got:?} (supported: {supported})")]
    UnsupportedVersion { line: usize, tag: String, got: String, supported: u32 },
    #[error("line {line}: expected field {expected:?}, found {got:?}")]
    WrongField { line: usize, expected: String, got: String },
    #[error("missing field {field:?} at end of input")]
    MissingField { field: String },
    #[error("line {line}: cannot parse {token:?} as an integer")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: expected exactly one value for field {field:?}")]
    NotSingleValue { line: usize, field: String },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
    #[error("row count {got} does not match declared n {expected}")]
    RowCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Matching(#[from] PmError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// Any object the text formats can carry, dispatched on the header tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceFile {
    KVisits(KVisitsInstance),
    VarKVisits(VarKVisitsInstance),
    Schedule(Schedule),
    Pm(PositionMatchingInstance),
    Rn3dm(Rn3dmInstance),
    In3dm(In3dmInstance),
    Tpws(ThresholdPinwheelInstance),
}

impl InstanceFile {
    pub fn tag(&self) -> &'static str {
        match self {
            InstanceFile::KVisits(_) => "kvisits",
            InstanceFile::VarKVisits(_) => "varkvisits",
            InstanceFile::Schedule(_) => "schedule",
            InstanceFile::Pm(_) => "pm",
            InstanceFile::Rn3dm(_) => "rn3dm",
            InstanceFile::In3dm(_) => "in3dm",
            InstanceFile::Tpws(_) => "tpws",
        }
    }
}

struct Lines<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let content = raw.split('#').next().unwrap_or("").trim();
                if content.is_empty() {
                    None
                } else {
                    Some((i + 1, content.split_whitespace().collect()))
                }
            })
            .collect();
        Self { lines, pos: 0 }
    }

    fn peek_tag(&self) -> Result<&'a str, ParseError> {
        self.lines
            .first()
            .map(|(_, tokens)| tokens[0])
            .ok_or(ParseError::MissingHeader)
    }

    fn header(&mut self, tag: &str) -> Result<(), ParseError> {
        let Some((line, tokens)) = self.lines.get(self.pos) else {
            return Err(ParseError::MissingHeader);
        };
        let line = *line;
        if tokens[0] != tag {
            return Err(ParseError::WrongTag {
                line,
                expected: tag.to_string(),
                got: tokens[0].to_string(),
            });
        }
        let version = tokens.get(1).copied().unwrap_or("");
        if version != "1" || tokens.len() != 2 {
            return Err(ParseError::UnsupportedVersion {
                line,
                tag: tag.to_string(),
                got: tokens[1..].join(" "),
                supported: 1,
            });
        }
        self.pos += 1;
        Ok(())
    }

    fn field(&mut self, name: &str) -> Result<(usize, &[&'a str]), ParseError> {
        let Some((line, tokens)) = self.lines.get(self.pos) else {
            return Err(ParseError::MissingField { field: name.to_string() });
        };
        if tokens[0] != name {
            return Err(ParseError::WrongField {
                line: *line,
                expected: name.to_string(),
                got: tokens[0].to_string(),
            });
        }
        self.pos += 1;
        Ok((*line, &tokens[1..]))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.lines.get(self.pos) {
            Some((line, _)) => Err(ParseError::TrailingContent { line: *line }),
            None => Ok(()),
        }
    }
}

fn ints(line: usize, tokens: &[&str]) -> Result<Vec<i64>, ParseError> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| ParseError::InvalidNumber { line, token: t.to_string() })
        })
        .collect()
}

fn single(line: usize, field: &str, tokens: &[&str]) -> Result<i64, ParseError> {
    if tokens.len() != 1 {
        return Err(ParseError::NotSingleValue { line, field: field.to_string() });
    }
    tokens[0]
        .parse::<i64>()
        .map_err(|_| ParseError::InvalidNumber { line, token: tokens[0].to_string() })
}

fn join(values: &[i64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn parse_kvisits(text: &str) -> Result<KVisitsInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("kvisits")?;
    let (line, tokens) = lines.field("k")?;
    let k = single(line, "k", tokens)?;
    let (line, tokens) = lines.field("deadlines")?;
    let deadlines = ints(line, tokens)?;
    lines.finish()?;
    if k < 1 {
        return Err(ParseError::InvalidNumber { line, token: k.to_string() });
    }
    Ok(KVisitsInstance::new(deadlines, k as usize)?)
}

pub fn serialize_kvisits(instance: &KVisitsInstance) -> String {
    format!("kvisits 1\nk {}\ndeadlines {}\n", instance.k(), join(instance.deadlines()))
}

pub fn parse_var_kvisits(text: &str) -> Result<VarKVisitsInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("varkvisits")?;
    let (line, tokens) = lines.field("n")?;
    let n = single(line, "n", tokens)?;
    let (line, tokens) = lines.field("k")?;
    let k = single(line, "k", tokens)?;
    if n < 1 {
        return Err(ParseError::InvalidNumber { line, token: n.to_string() });
    }
    if k < 1 {
        return Err(ParseError::InvalidNumber { line, token: k.to_string() });
    }
    let mut rows = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (line, tokens) = lines
            .field("row")
            .map_err(|e| match e {
                ParseError::MissingField { .. } => ParseError::RowCountMismatch {
                    expected: n as usize,
                    got: rows.len(),
                },
                other => other,
            })?;
        rows.push(ints(line, tokens)?);
    }
    lines.finish()?;
    Ok(VarKVisitsInstance::new(rows, k as usize)?)
}

pub fn serialize_var_kvisits(instance: &VarKVisitsInstance) -> String {
    let mut out = format!("varkvisits 1\nn {}\nk {}\n", instance.n(), instance.k());
    for node in 1..=instance.n() {
        let row: Vec<i64> = (1..=instance.k()).map(|j| instance.deadline(node, j)).collect();
        out.push_str(&format!("row {}\n", join(&row)));
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("schedule")?;
    let (line, tokens) = lines.field("entries")?;
    let entries = ints(line, tokens)?;
    lines.finish()?;
    let entries = entries
        .into_iter()
        .map(|v| {
            usize::try_from(v)
                .ok()
                .filter(|&v| v > 0)
                .ok_or(ParseError::InvalidNumber { line, token: v.to_string() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Schedule::new(entries))
}

pub fn serialize_schedule(schedule: &Schedule) -> String {
    let entries: Vec<i64> = schedule.entries().iter().map(|&e| e as i64).collect();
    format!("schedule 1\nentries {}\n", join(&entries))
}

pub fn parse_pm(text: &str) -> Result<PositionMatchingInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("pm")?;
    let (line_d, tokens) = lines.field("D")?;
    let deadlines = ints(line_d, tokens)?;
    let (line_a, tokens) = lines.field("A")?;
    let positions = ints(line_a, tokens)?;
    let (line_t, tokens) = lines.field("T")?;
    let targets = ints(line_t, tokens)?;
    lines.finish()?;
    Ok(PositionMatchingInstance::new(deadlines, positions, targets)?)
}

pub fn serialize_pm(instance: &PositionMatchingInstance) -> String {
    format!(
        "pm 1\nD {}\nA {}\nT {}\n",
        join(instance.deadlines()),
        join(instance.positions()),
        join(instance.targets())
    )
}

pub fn parse_rn3dm(text: &str) -> Result<Rn3dmInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("rn3dm")?;
    let (line, tokens) = lines.field("A")?;
    let a = ints(line, tokens)?;
    let (line, tokens) = lines.field("sigma")?;
    let sigma = single(line, "sigma", tokens)?;
    lines.finish()?;
    Ok(Rn3dmInstance::new(a, sigma)?)
}

pub fn serialize_rn3dm(instance: &Rn3dmInstance) -> String {
    format!("rn3dm 1\nA {}\nsigma {}\n", join(instance.a()), instance.sigma())
}

pub fn parse_in3dm(text: &str) -> Result<In3dmInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("in3dm")?;
    let (line, tokens) = lines.field("A")?;
    let a = ints(line, tokens)?;
    let (line, tokens) = lines.field("T")?;
    let t = ints(line, tokens)?;
    lines.finish()?;
    Ok(In3dmInstance::new(a, t)?)
}

pub fn serialize_in3dm(instance: &In3dmInstance) -> String {
    format!("in3dm 1\nA {}\nT {}\n", join(instance.a()), join(instance.t()))
}

pub fn parse_tpws(text: &str) -> Result<ThresholdPinwheelInstance, ParseError> {
    let mut lines = Lines::new(text);
    lines.header("tpws")?;
    let (line, tokens) = lines.field("d1")?;
    let d1 = ints(line, tokens)?;
    let (line, tokens) = lines.field("d2")?;
    let d2 = ints(line, tokens)?;
    let (line, tokens) = lines.field("t")?;
    let t = ints(line, tokens)?;
    lines.finish()?;
    Ok(ThresholdPinwheelInstance::new(d1, d2, t)?)
}

pub fn serialize_tpws(instance: &ThresholdPinwheelInstance) -> String {
    format!(
        "tpws 1\nd1 {}\nd2 {}\nt {}\n",
        join(instance.d1()),
        join(instance.d2()),
        join(instance.thresholds())
    )
}

/// Parses any supported format, dispatching on the header tag.
pub fn parse_any(text: &str) -> Result<InstanceFile, ParseError> {
    let tag = Lines::new(text).peek_tag()?;
    match tag {
        "kvisits" => parse_kvisits(text).map(InstanceFile::KVisits),
        "varkvisits" => parse_var_kvisits(text).map(InstanceFile::VarKVisits),
        "schedule" => parse_schedule(text).map(InstanceFile::Schedule),
        "pm" => parse_pm(text).map(InstanceFile::Pm),
        "rn3dm" => parse_rn3dm(text).map(InstanceFile::Rn3dm),
        "in3dm" => parse_in3dm(text).map(InstanceFile::In3dm),
        "tpws" => parse_tpws(text).map(InstanceFile::Tpws),
        other => Err(ParseError::UnknownTag { got: other.to_string() }),
    }
}

/// Serializes any supported object into its text format.
pub fn serialize_any(file: &InstanceFile) -> String {
    match file {
        InstanceFile::KVisits(v) => serialize_kvisits(v),
        InstanceFile::VarKVisits(v) => serialize_var_kvisits(v),
        InstanceFile::Schedule(v) => serialize_schedule(v),
        InstanceFile::Pm(v) => serialize_pm(v),
        InstanceFile::Rn3dm(v) => serialize_rn3dm(v),
        InstanceFile::In3dm(v) => serialize_in3dm(v),
        InstanceFile::Tpws(v) => serialize_tpws(v),
    }
}
