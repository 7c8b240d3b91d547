//! Line-delimited sequence files.
//!
//! The first line is a header `{"format":"mocap-sequences","version":1}`.
//! Each following line holds one sequence as a JSON object with `id`,
//! `joint_count`, `num_frames`, row-major `frames` (unobserved cells written
//! as `null`) and `labels` (0/1 per frame, or `null`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MotionSequence;
use crate::error::{Error, Result};

pub const SEQUENCE_FORMAT: &str = "mocap-sequences";
pub const SEQUENCE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    joint_count: usize,
    num_frames: usize,
    frames: Vec<Option<f64>>,
    labels: Option<Vec<u8>>,
}

pub fn render_sequences(seqs: &[MotionSequence]) -> String {
    let header = Header {
        format: SEQUENCE_FORMAT.into(),
        version: SEQUENCE_VERSION,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for s in seqs {
        let rec = Record {
            id: s.id.clone(),
            joint_count: s.joint_count,
            num_frames: s.num_frames,
            frames: s
                .frames
                .iter()
                .zip(&s.mask)
                .map(|(v, m)| m.then_some(*v))
                .collect(),
            labels: s
                .labels
                .as_ref()
                .map(|l| l.iter().map(|&b| b as u8).collect()),
        };
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_sequences(text: &str) -> Result<Vec<MotionSequence>> {
    let mut lines = text.lines().enumerate();
    let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
    let (_, first) = lines.next().ok_or_else(|| parse_err(0, "empty file".into()))?;
    let header: Header =
        serde_json::from_str(first).map_err(|e| parse_err(0, format!("bad header: {e}")))?;
    if header.format != SEQUENCE_FORMAT || header.version != SEQUENCE_VERSION {
        return Err(Error::Version {
            found: format!("{}/{}", header.format, header.version),
            expected: format!("{SEQUENCE_FORMAT}/{SEQUENCE_VERSION}"),
        });
    }
    let mut seqs = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).map_err(|e| parse_err(n, e.to_string()))?;
        let labels = match rec.labels {
            Some(l) => {
                if let Some(bad) = l.iter().find(|&&v| v > 1) {
                    return Err(parse_err(n, format!("label {bad} is not 0 or 1")));
                }
                Some(l.into_iter().map(|v| v == 1).collect())
            }
            None => None,
        };
        let seq = MotionSequence {
            id: rec.id,
            joint_count: rec.joint_count,
            num_frames: rec.num_frames,
            mask: rec.frames.iter().map(Option::is_some).collect(),
            frames: rec.frames.iter().map(|v| v.unwrap_or(0.0)).collect(),
            labels,
        };
        seq.validate().map_err(|e| parse_err(n, e.to_string()))?;
        seqs.push(seq);
    }
    Ok(seqs)
}

pub fn save_sequences(seqs: &[MotionSequence], path: &Path) -> Result<()> {
    std::fs::write(path, render_sequences(seqs))?;
    Ok(())
}

pub fn load_sequences(path: &Path) -> Result<Vec<MotionSequence>> {
    parse_sequences(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{corrupt_sequence, generate_clean, CorruptionSpec, DatasetProfile};

    fn dataset() -> Vec<MotionSequence> {
        let mut p = DatasetProfile::builtin("orthopedic-desk").unwrap();
        p.num_sequences = 3;
        p.sequence_length = 20;
        generate_clean(&p, 5).unwrap()
    }

    #[test]
    fn round_trip() {
        let d = dataset();
        assert_eq!(parse_sequences(&render_sequences(&d)).unwrap(), d);
    }

    #[test]
    fn nulls_rebuild_the_mask() {
        let spec = CorruptionSpec {
            occlusion_fraction: 0.2,
            ..CorruptionSpec::default()
        };
        let d: Vec<_> = dataset().iter().map(|s| corrupt_sequence(s, &spec).unwrap()).collect();
        let text = render_sequences(&d);
        assert!(text.contains("null"));
        let back = parse_sequences(&text).unwrap();
        for (a, b) in d.iter().zip(&back) {
            assert_eq!(a.mask, b.mask);
        }
        assert_eq!(back, d);
    }

    #[test]
    fn truncated_file_names_the_line() {
        let text = render_sequences(&dataset());
        let cut = &text[..text.len() - 40];
        match parse_sequences(cut) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = render_sequences(&dataset()).replacen("\"version\":1", "\"version\":7", 1);
        assert!(matches!(parse_sequences(&text), Err(Error::Version { .. })));
    }

    #[test]
    fn inconsistent_record_is_rejected() {
        let text = "{\"format\":\"mocap-sequences\",\"version\":1}\n\
                    {\"id\":\"a\",\"joint_count\":1,\"num_frames\":2,\"frames\":[1,2,3],\"labels\":null}\n";
        assert!(matches!(parse_sequences(text), Err(Error::Parse { line: 2, .. })));
    }
}
