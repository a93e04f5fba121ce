//! Stage manifests and their canonical byte-exact serialization.
//!
//! A manifest is the unit of hashing and signing: one text file per pipeline
//! stage whose serialization is canonical, so the same logical content always
//! produces identical bytes and therefore an identical SHA-256.
//!
//! Text format (UTF-8, LF line endings, no trailing whitespace):
//!
//! ```text
//! pbench/1 <stage>
//! prev <64-hex | ->
//! <record lines, TAB-separated fields, sorted ascending by id, bytewise>
//! root <64-hex | ->
//! ```
//!
//! Record line shapes per stage:
//!
//! | stage      | fields                          |
//! |------------|---------------------------------|
//! | raw        | `id  h_raw`                     |
//! | annotation | `id  label  h_raw  h_feat`      |
//! | features   | `id  label  h_raw  h_feat`      |
//! | splits     | `id  train|test`                |
//! | model      | `name  sha256`                  |
//!
//! `prev` is `-` only for the raw stage; `root` is present only for stages
//! from `features` on (the committed dataset root, echoed downstream).
//! Record ids forbid control characters, which makes TAB/LF delimiting
//! injective. Digests are lowercase hex in text form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::digest::Digest;

/// Format-version token fixed in the header line. Any future change to the
/// canonical form must bump this so old hashes cannot be silently altered.
pub const MANIFEST_VERSION: &str = "pbench/1";

/// The five pipeline stages, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Raw,
    Annotation,
    Features,
    Splits,
    Model,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Raw,
        Stage::Annotation,
        Stage::Features,
        Stage::Splits,
        Stage::Model,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Annotation => "annotation",
            Stage::Features => "features",
            Stage::Splits => "splits",
            Stage::Model => "model",
        }
    }

    /// Stage that produces the input of this stage, if any.
    pub fn upstream(self) -> Option<Stage> {
        match self {
            Stage::Raw => None,
            Stage::Annotation => Some(Stage::Raw),
            Stage::Features => Some(Stage::Annotation),
            Stage::Splits => Some(Stage::Features),
            Stage::Model => Some(Stage::Splits),
        }
    }

    /// Whether this stage's manifest carries the committed dataset root.
    pub fn carries_root(self) -> bool {
        self >= Stage::Features
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "raw" => Ok(Stage::Raw),
            "annotation" => Ok(Stage::Annotation),
            "features" => Ok(Stage::Features),
            "splits" => Ok(Stage::Splits),
            "model" => Ok(Stage::Model),
            _ => Err(()),
        }
    }
}

/// Train/test partition of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Train,
    Test,
}

impl Partition {
    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Test => "test",
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One dataset row: sample id, class label, and the digests of the raw
/// source file and the feature file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub id: String,
    pub label: String,
    pub h_raw: Digest,
    pub h_feat: Digest,
}

/// Raw-stage record: a source file before annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub id: String,
    pub h_raw: Digest,
}

/// Split-stage record: a sample's partition assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub id: String,
    pub partition: Partition,
}

/// Model-stage record: a named training artifact and its digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtifactRecord {
    pub name: String,
    pub digest: Digest,
}

/// Stage-specific record list. The variant fixes the stage.
#[derive(Debug, Clone, PartialEq)]
pub enum Records {
    Raw(Vec<RawRecord>),
    Annotation(Vec<SampleRecord>),
    Features(Vec<SampleRecord>),
    Splits(Vec<SplitRecord>),
    Model(Vec<ArtifactRecord>),
}

impl Records {
    fn stage(&self) -> Stage {
        match self {
            Records::Raw(_) => Stage::Raw,
            Records::Annotation(_) => Stage::Annotation,
            Records::Features(_) => Stage::Features,
            Records::Splits(_) => Stage::Splits,
            Records::Model(_) => Stage::Model,
        }
    }

    fn len(&self) -> usize {
        match self {
            Records::Raw(r) => r.len(),
            Records::Annotation(r) | Records::Features(r) => r.len(),
            Records::Splits(r) => r.len(),
            Records::Model(r) => r.len(),
        }
    }
}

/// Rejected manifest content (construction-time invariant violation).
#[derive(Debug, Error, PartialEq)]
pub enum ManifestError {
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("invalid {field} `{value}`: {reason}")]
    BadToken {
        field: &'static str,
        value: String,
        reason: &'static str,
    },
}

/// Parse failure, naming the 1-based line number.
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("manifest is not valid UTF-8")]
    InvalidUtf8,
    #[error("missing or malformed header, expected `pbench/1 <stage>`")]
    BadHeader,
    #[error("unknown stage `{0}`")]
    UnknownStage(String),
    #[error("malformed `prev` line")]
    BadPrev,
    #[error("`prev` must be `-` for the raw stage")]
    PrevForbidden,
    #[error("`prev` digest required for this stage")]
    PrevRequired,
    #[error("missing `root` line")]
    MissingRoot,
    #[error("malformed `root` line")]
    BadRoot,
    #[error("`root` must be `-` before the features stage")]
    RootForbidden,
    #[error("`root` digest required for this stage")]
    RootRequired,
    #[error("expected {expected} TAB-separated fields, got {got}")]
    WrongFieldCount { expected: usize, got: usize },
    #[error("bad digest: {0}")]
    BadDigest(#[from] crate::digest::DigestParseError),
    #[error("unknown partition `{0}`, expected `train` or `test`")]
    BadPartition(String),
    #[error("unsorted at line {0}: record ids must ascend bytewise")]
    Unsorted(usize),
    #[error("{0}")]
    BadRecord(ManifestError),
    #[error("content after `root` line")]
    TrailingContent,
    #[error("missing trailing newline")]
    MissingNewline,
}

/// Canonical, hashable serialization of one pipeline stage's output.
#[derive(Debug, Clone, PartialEq)]
pub struct StageManifest {
    prev: Option<Digest>,
    root: Option<Digest>,
    records: Records,
}

fn check_token(field: &'static str, value: &str) -> Result<(), ManifestError> {
    if value.is_empty() {
        return Err(ManifestError::BadToken {
            field,
            value: value.to_string(),
            reason: "must be nonempty",
        });
    }
    if value.bytes().any(|b| b < 0x20 || b == 0x7f) {
        return Err(ManifestError::BadToken {
            field,
            value: value.to_string(),
            reason: "control characters are forbidden",
        });
    }
    Ok(())
}

fn sort_and_check<T>(
    records: &mut [T],
    id: impl Fn(&T) -> &str,
    check: impl Fn(&T) -> Result<(), ManifestError>,
) -> Result<(), ManifestError> {
    for r in records.iter() {
        check(r)?;
    }
    records.sort_by(|a, b| id(a).as_bytes().cmp(id(b).as_bytes()));
    for pair in records.windows(2) {
        if id(&pair[0]) == id(&pair[1]) {
            return Err(ManifestError::DuplicateId(id(&pair[0]).to_string()));
        }
    }
    Ok(())
}

fn check_sample(r: &SampleRecord) -> Result<(), ManifestError> {
    check_token("id", &r.id)?;
    check_token("label", &r.label)
}

impl StageManifest {
    pub fn raw(mut records: Vec<RawRecord>) -> Result<Self, ManifestError> {
        sort_and_check(&mut records, |r| &r.id, |r| check_token("id", &r.id))?;
        Ok(StageManifest {
            prev: None,
            root: None,
            records: Records::Raw(records),
        })
    }

    pub fn annotation(prev: Digest, mut records: Vec<SampleRecord>) -> Result<Self, ManifestError> {
        sort_and_check(&mut records, |r| &r.id, check_sample)?;
        Ok(StageManifest {
            prev: Some(prev),
            root: None,
            records: Records::Annotation(records),
        })
    }

    pub fn features(
        prev: Digest,
        root: Digest,
        mut records: Vec<SampleRecord>,
    ) -> Result<Self, ManifestError> {
        sort_and_check(&mut records, |r| &r.id, check_sample)?;
        Ok(StageManifest {
            prev: Some(prev),
            root: Some(root),
            records: Records::Features(records),
        })
    }

    pub fn splits(
        prev: Digest,
        root: Digest,
        mut records: Vec<SplitRecord>,
    ) -> Result<Self, ManifestError> {
        sort_and_check(&mut records, |r| &r.id, |r| check_token("id", &r.id))?;
        Ok(StageManifest {
            prev: Some(prev),
            root: Some(root),
            records: Records::Splits(records),
        })
    }

    pub fn model(
        prev: Digest,
        root: Digest,
        mut records: Vec<ArtifactRecord>,
    ) -> Result<Self, ManifestError> {
        sort_and_check(&mut records, |r| &r.name, |r| check_token("name", &r.name))?;
        Ok(StageManifest {
            prev: Some(prev),
            root: Some(root),
            records: Records::Model(records),
        })
    }

    pub fn stage(&self) -> Stage {
        self.records.stage()
    }

    pub fn prev(&self) -> Option<Digest> {
        self.prev
    }

    pub fn root(&self) -> Option<Digest> {
        self.root
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.len() == 0
    }

    /// Sample records, for the annotation and features stages.
    pub fn samples(&self) -> Option<&[SampleRecord]> {
        match &self.records {
            Records::Annotation(r) | Records::Features(r) => Some(r),
            _ => None,
        }
    }

    pub fn raw_records(&self) -> Option<&[RawRecord]> {
        match &self.records {
            Records::Raw(r) => Some(r),
            _ => None,
        }
    }

    pub fn split_records(&self) -> Option<&[SplitRecord]> {
        match &self.records {
            Records::Splits(r) => Some(r),
            _ => None,
        }
    }

    pub fn artifact_records(&self) -> Option<&[ArtifactRecord]> {
        match &self.records {
            Records::Model(r) => Some(r),
            _ => None,
        }
    }

    /// Canonical bytes. Deterministic; round-trips through [`parse_manifest`].
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        out.push_str(MANIFEST_VERSION);
        out.push(' ');
        out.push_str(self.stage().name());
        out.push('\n');
        out.push_str("prev ");
        match self.prev {
            Some(d) => out.push_str(&d.to_hex()),
            None => out.push('-'),
        }
        out.push('\n');
        match &self.records {
            Records::Raw(rs) => {
                for r in rs {
                    out.push_str(&r.id);
                    out.push('\t');
                    out.push_str(&r.h_raw.to_hex());
                    out.push('\n');
                }
            }
            Records::Annotation(rs) | Records::Features(rs) => {
                for r in rs {
                    out.push_str(&r.id);
                    out.push('\t');
                    out.push_str(&r.label);
                    out.push('\t');
                    out.push_str(&r.h_raw.to_hex());
                    out.push('\t');
                    out.push_str(&r.h_feat.to_hex());
                    out.push('\n');
                }
            }
            Records::Splits(rs) => {
                for r in rs {
                    out.push_str(&r.id);
                    out.push('\t');
                    out.push_str(r.partition.name());
                    out.push('\n');
                }
            }
            Records::Model(rs) => {
                for r in rs {
                    out.push_str(&r.name);
                    out.push('\t');
                    out.push_str(&r.digest.to_hex());
                    out.push('\n');
                }
            }
        }
        out.push_str("root ");
        match self.root {
            Some(d) => out.push_str(&d.to_hex()),
            None => out.push('-'),
        }
        out.push('\n');
        out.into_bytes()
    }

    /// SHA-256 of the canonical bytes.
    pub fn content_hash(&self) -> Digest {
        Digest::of(&self.to_bytes())
    }
}

/// Alias for [`StageManifest::to_bytes`] as a free function.
pub fn serialize_manifest(m: &StageManifest) -> Vec<u8> {
    m.to_bytes()
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_digest_or_dash(s: &str, line: usize) -> Result<Option<Digest>, ParseError> {
    if s == "-" {
        Ok(None)
    } else {
        Digest::from_hex(s)
            .map(Some)
            .map_err(|e| err(line, ParseErrorKind::BadDigest(e)))
    }
}

/// Parse canonical manifest bytes. Inverse of [`serialize_manifest`] on
/// valid input; rejects anything not in canonical form.
pub fn parse_manifest(bytes: &[u8]) -> Result<StageManifest, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        err(line, ParseErrorKind::InvalidUtf8)
    })?;
    if !text.is_empty() && !text.ends_with('\n') {
        let line = text.lines().count();
        return Err(err(line, ParseErrorKind::MissingNewline));
    }

    // `split` yields a final empty element for the trailing newline.
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    // Header.
    let (hline, header) = lines.next().unwrap_or((1, ""));
    if header.is_empty() {
        return Err(err(hline, ParseErrorKind::BadHeader));
    }
    let stage = match header.split_once(' ') {
        Some((version, stage_name)) if version == MANIFEST_VERSION => {
            Stage::from_str(stage_name)
                .map_err(|_| err(hline, ParseErrorKind::UnknownStage(stage_name.to_string())))?
        }
        _ => return Err(err(hline, ParseErrorKind::BadHeader)),
    };

    // Prev line.
    let (pline, prev_line) = lines.next().ok_or_else(|| err(2, ParseErrorKind::BadPrev))?;
    let prev = match prev_line.strip_prefix("prev ") {
        Some(rest) => parse_digest_or_dash(rest, pline)?,
        None => return Err(err(pline, ParseErrorKind::BadPrev)),
    };
    match (stage, prev) {
        (Stage::Raw, Some(_)) => return Err(err(pline, ParseErrorKind::PrevForbidden)),
        (s, None) if s != Stage::Raw => return Err(err(pline, ParseErrorKind::PrevRequired)),
        _ => {}
    }

    // Record lines until the root line.
    let mut raw_records = Vec::new();
    let mut sample_records = Vec::new();
    let mut split_records = Vec::new();
    let mut artifact_records = Vec::new();
    let mut last_id: Option<String> = None;
    let mut root: Option<Option<Digest>> = None;
    let mut root_line = 0usize;

    let mut lines_seen = pline;
    loop {
        let (lno, line) = match lines.next() {
            Some(x) => x,
            None => return Err(err(lines_seen + 1, ParseErrorKind::MissingRoot)),
        };
        lines_seen = lno;
        if let Some(rest) = line.strip_prefix("root ") {
            root = Some(parse_digest_or_dash(rest, lno)?);
            root_line = lno;
            break;
        }
        if line.is_empty() {
            // Blank line before `root`: not canonical.
            return Err(err(lno, ParseErrorKind::MissingRoot));
        }

        let fields: Vec<&str> = line.split('\t').collect();
        let expected = match stage {
            Stage::Raw => 2,
            Stage::Annotation | Stage::Features => 4,
            Stage::Splits => 2,
            Stage::Model => 2,
        };
        if fields.len() != expected {
            return Err(err(
                lno,
                ParseErrorKind::WrongFieldCount {
                    expected,
                    got: fields.len(),
                },
            ));
        }

        let id = fields[0];
        check_token(if stage == Stage::Model { "name" } else { "id" }, id)
            .map_err(|e| err(lno, ParseErrorKind::BadRecord(e)))?;
        if let Some(prev_id) = &last_id {
            if prev_id.as_bytes() >= id.as_bytes() {
                return Err(err(lno, ParseErrorKind::Unsorted(lno)));
            }
        }
        last_id = Some(id.to_string());

        match stage {
            Stage::Raw => {
                let h_raw = Digest::from_hex(fields[1])
                    .map_err(|e| err(lno, ParseErrorKind::BadDigest(e)))?;
                raw_records.push(RawRecord {
                    id: id.to_string(),
                    h_raw,
                });
            }
            Stage::Annotation | Stage::Features => {
                check_token("label", fields[1])
                    .map_err(|e| err(lno, ParseErrorKind::BadRecord(e)))?;
                let h_raw = Digest::from_hex(fields[2])
                    .map_err(|e| err(lno, ParseErrorKind::BadDigest(e)))?;
                let h_feat = Digest::from_hex(fields[3])
                    .map_err(|e| err(lno, ParseErrorKind::BadDigest(e)))?;
                sample_records.push(SampleRecord {
                    id: id.to_string(),
                    label: fields[1].to_string(),
                    h_raw,
                    h_feat,
                });
            }
            Stage::Splits => {
                let partition = match fields[1] {
                    "train" => Partition::Train,
                    "test" => Partition::Test,
                    other => {
                        return Err(err(lno, ParseErrorKind::BadPartition(other.to_string())))
                    }
                };
                split_records.push(SplitRecord {
                    id: id.to_string(),
                    partition,
                });
            }
            Stage::Model => {
                let digest = Digest::from_hex(fields[1])
                    .map_err(|e| err(lno, ParseErrorKind::BadDigest(e)))?;
                artifact_records.push(ArtifactRecord {
                    name: id.to_string(),
                    digest,
                });
            }
        }
    }

    // Nothing may follow the root line except the final empty split element.
    match lines.next() {
        Some((_, "")) => {}
        Some((lno, _)) => return Err(err(lno, ParseErrorKind::TrailingContent)),
        None => return Err(err(root_line, ParseErrorKind::MissingNewline)),
    }
    if let Some((lno, _)) = lines.next() {
        return Err(err(lno, ParseErrorKind::TrailingContent));
    }

    let root = root.expect("loop exits only after root line");
    match (stage.carries_root(), root) {
        (false, Some(_)) => return Err(err(root_line, ParseErrorKind::RootForbidden)),
        (true, None) => return Err(err(root_line, ParseErrorKind::RootRequired)),
        _ => {}
    }

    let records = match stage {
        Stage::Raw => Records::Raw(raw_records),
        Stage::Annotation => Records::Annotation(sample_records),
        Stage::Features => Records::Features(sample_records),
        Stage::Splits => Records::Splits(split_records),
        Stage::Model => Records::Model(artifact_records),
    };
    Ok(StageManifest {
        prev,
        root,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(byte: u8) -> Digest {
        Digest([byte; 32])
    }

    fn sample(id: &str, label: &str) -> SampleRecord {
        SampleRecord {
            id: id.to_string(),
            label: label.to_string(),
            h_raw: Digest::of(format!("raw-{id}").as_bytes()),
            h_feat: Digest::of(format!("feat-{id}").as_bytes()),
        }
    }

    #[test]
    fn empty_manifest_round_trips() {
        let m = StageManifest::raw(vec![]).unwrap();
        let bytes = m.to_bytes();
        assert_eq!(
            String::from_utf8(bytes.clone()).unwrap(),
            "pbench/1 raw\nprev -\nroot -\n"
        );
        assert_eq!(parse_manifest(&bytes).unwrap(), m);
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let a = StageManifest::annotation(d(1), vec![sample("a", "Car"), sample("b", "Tram")]);
        let b = StageManifest::annotation(d(1), vec![sample("b", "Tram"), sample("a", "Car")]);
        assert_eq!(a.unwrap().to_bytes(), b.unwrap().to_bytes());
    }

    #[test]
    fn duplicate_id_rejected_with_id() {
        let e = StageManifest::annotation(d(1), vec![sample("a", "Car"), sample("a", "Tram")])
            .unwrap_err();
        assert_eq!(e, ManifestError::DuplicateId("a".to_string()));
    }

    #[test]
    fn control_characters_rejected() {
        let mut r = sample("a\tb", "Car");
        let e = StageManifest::annotation(d(1), vec![r.clone()]).unwrap_err();
        assert!(matches!(e, ManifestError::BadToken { field: "id", .. }));
        r.id = "ok".into();
        r.label = "Ca\nr".into();
        let e = StageManifest::annotation(d(1), vec![r]).unwrap_err();
        assert!(matches!(e, ManifestError::BadToken { field: "label", .. }));
    }

    #[test]
    fn unsorted_input_names_line() {
        let good = StageManifest::annotation(d(1), vec![sample("a", "Car"), sample("b", "Tram")])
            .unwrap()
            .to_bytes();
        let text = String::from_utf8(good).unwrap();
        // Swap the two record lines (lines 3 and 4).
        let mut lines: Vec<&str> = text.split('\n').collect();
        lines.swap(2, 3);
        let bad = lines.join("\n");
        let e = parse_manifest(bad.as_bytes()).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::Unsorted(4)));
    }

    #[test]
    fn short_digest_rejected() {
        let m = StageManifest::annotation(d(1), vec![sample("a", "Car")]).unwrap();
        let text = String::from_utf8(m.to_bytes()).unwrap();
        // Drop one hex character from the record's h_raw field.
        let truncated = text.replacen(&sample("a", "Car").h_raw.to_hex(), &sample("a", "Car").h_raw.to_hex()[..63], 1);
        let e = parse_manifest(truncated.as_bytes()).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::BadDigest(_)));
    }

    #[test]
    fn prev_and_root_presence_rules() {
        // raw must have prev `-`.
        let text = format!("pbench/1 raw\nprev {}\nroot -\n", d(2).to_hex());
        assert!(matches!(
            parse_manifest(text.as_bytes()).unwrap_err().kind,
            ParseErrorKind::PrevForbidden
        ));
        // annotation must not carry a root digest.
        let text = format!(
            "pbench/1 annotation\nprev {}\nroot {}\n",
            d(2).to_hex(),
            d(3).to_hex()
        );
        assert!(matches!(
            parse_manifest(text.as_bytes()).unwrap_err().kind,
            ParseErrorKind::RootForbidden
        ));
        // features must carry one.
        let text = format!("pbench/1 features\nprev {}\nroot -\n", d(2).to_hex());
        assert!(matches!(
            parse_manifest(text.as_bytes()).unwrap_err().kind,
            ParseErrorKind::RootRequired
        ));
    }

    #[test]
    fn trailing_content_rejected() {
        let m = StageManifest::raw(vec![]).unwrap();
        let mut bytes = m.to_bytes();
        bytes.extend_from_slice(b"extra\n");
        assert!(matches!(
            parse_manifest(&bytes).unwrap_err().kind,
            ParseErrorKind::TrailingContent
        ));
    }

    #[test]
    fn splits_and_model_round_trip() {
        let splits = StageManifest::splits(
            d(1),
            d(2),
            vec![
                SplitRecord {
                    id: "b".into(),
                    partition: Partition::Test,
                },
                SplitRecord {
                    id: "a".into(),
                    partition: Partition::Train,
                },
            ],
        )
        .unwrap();
        assert_eq!(parse_manifest(&splits.to_bytes()).unwrap(), splits);

        let model = StageManifest::model(
            d(3),
            d(2),
            vec![ArtifactRecord {
                name: "checkpoint".into(),
                digest: d(9),
            }],
        )
        .unwrap();
        assert_eq!(parse_manifest(&model.to_bytes()).unwrap(), model);
    }
}
