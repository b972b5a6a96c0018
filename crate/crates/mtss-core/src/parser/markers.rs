//! Inline timestamp markers inside description text.
//!
//! Grammar: `[t=<seconds>]` or `[t=<mm>:<ss.fff>]`, e.g. `[t=3.2]` or
//! `[t=01:02.5]`. Anything else in brackets is ordinary text; only a
//! bracket opening with `[t=` must parse as a marker.

use crate::schema::quantize_time;

/// One extracted marker. `text_offset` is the character index into the
/// *stripped* description at which the marker stood; `raw` is the verbatim
/// marker text including brackets, so extraction is inverse-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct InlineTimestamp {
    pub text_offset: usize,
    pub time: f64,
    pub raw: String,
}

/// A malformed marker: something opened with `[t=` but did not parse as a
/// time. Offsets are character indices into the original description.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad inline timestamp `{snippet}` at character {char_offset}")]
pub struct MarkerError {
    pub char_offset: usize,
    pub snippet: String,
}

/// Extract every inline timestamp marker, in order, returning the markers
/// and the text with markers removed. Non-marker brackets are untouched.
pub fn extract_inline_timestamps(
    text: &str,
) -> Result<(Vec<InlineTimestamp>, String), MarkerError> {
    let chars: Vec<char> = text.chars().collect();
    let mut stripped = String::new();
    let mut stripped_len = 0usize; // in chars
    let mut markers = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        if chars[i] == '[' && chars.get(i + 1) == Some(&'t') && chars.get(i + 2) == Some(&'=') {
            let start = i;
            let body_start = i + 3;
            let close = (body_start..chars.len()).find(|&j| chars[j] == ']');
            let Some(close) = close else {
                return Err(MarkerError {
                    char_offset: start,
                    snippet: chars[start..].iter().collect(),
                });
            };
            let body: String = chars[body_start..close].iter().collect();
            let Some(time) = parse_marker_time(&body) else {
                return Err(MarkerError {
                    char_offset: start,
                    snippet: chars[start..=close].iter().collect(),
                });
            };
            markers.push(InlineTimestamp {
                text_offset: stripped_len,
                time: quantize_time(time),
                raw: chars[start..=close].iter().collect(),
            });
            i = close + 1;
        } else {
            stripped.push(chars[i]);
            stripped_len += 1;
            i += 1;
        }
    }
    Ok((markers, stripped))
}

/// Re-insert markers at their offsets into stripped text, reproducing the
/// original description. Inverse of [`extract_inline_timestamps`].
pub fn reinsert_markers(stripped: &str, markers: &[InlineTimestamp]) -> String {
    let chars: Vec<char> = stripped.chars().collect();
    let mut out = String::new();
    let mut next = 0usize;
    for m in markers {
        let to = m.text_offset.min(chars.len());
        out.extend(&chars[next..to]);
        out.push_str(&m.raw);
        next = to;
    }
    out.extend(&chars[next..]);
    out
}

/// Strip all markers, ignoring malformed ones (they stay in the text).
/// Render paths use this after validation has already rejected bad markers.
pub fn strip_markers_lossy(text: &str) -> (Vec<InlineTimestamp>, String) {
    match extract_inline_timestamps(text) {
        Ok(pair) => pair,
        Err(_) => (Vec::new(), text.to_string()),
    }
}

fn parse_marker_time(body: &str) -> Option<f64> {
    if body.is_empty() {
        return None;
    }
    if let Some((mm, ss)) = body.split_once(':') {
        if mm.is_empty() || !mm.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let minutes: f64 = mm.parse().ok()?;
        let seconds = parse_plain_seconds(ss)?;
        if seconds >= 60.0 {
            return None;
        }
        Some(minutes * 60.0 + seconds)
    } else {
        parse_plain_seconds(body)
    }
}

fn parse_plain_seconds(s: &str) -> Option<f64> {
    if s.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if let Some(f) = frac_part {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_marker() {
        let (markers, stripped) = extract_inline_timestamps("He turns [t=3.2] and smiles.").unwrap();
        assert_eq!(stripped, "He turns  and smiles.");
        assert_eq!(markers.len(), 1);
        assert_eq!(markers[0].text_offset, 9);
        assert_eq!(markers[0].time, 3.2);
        assert_eq!(markers[0].raw, "[t=3.2]");
    }

    #[test]
    fn minutes_seconds_form() {
        // hand oracle: 1 * 60 + 2.5 = 62.5
        let (markers, stripped) = extract_inline_timestamps("[t=01:02.5] door slams").unwrap();
        assert_eq!(markers, vec![InlineTimestamp {
            text_offset: 0,
            time: 62.5,
            raw: "[t=01:02.5]".to_string(),
        }]);
        assert_eq!(stripped, " door slams");
    }

    #[test]
    fn non_marker_brackets_untouched() {
        let (markers, stripped) = extract_inline_timestamps("array[i] is set").unwrap();
        assert!(markers.is_empty());
        assert_eq!(stripped, "array[i] is set");
    }

    #[test]
    fn malformed_markers_error() {
        for bad in ["x [t=] y", "a [t=abc]", "[t=1:99]", "[t=3.2", "[t= 3]", "[t=-1]", "[t=1.]"] {
            assert!(extract_inline_timestamps(bad).is_err(), "should reject {bad:?}");
        }
    }

    #[test]
    fn multiple_markers_and_reinsertion() {
        let original = "a [t=1]b cd [t=01:05] e [x] f";
        let (markers, stripped) = extract_inline_timestamps(original).unwrap();
        assert_eq!(markers.len(), 2);
        assert_eq!(markers[1].time, 65.0);
        assert_eq!(reinsert_markers(&stripped, &markers), original);
    }

    #[test]
    fn reinsertion_with_unicode_text() {
        let original = "café [t=2.5] 🎬 done [t=9]";
        let (markers, stripped) = extract_inline_timestamps(original).unwrap();
        assert_eq!(reinsert_markers(&stripped, &markers), original);
    }

    #[test]
    fn integer_seconds() {
        let (markers, _) = extract_inline_timestamps("[t=12]").unwrap();
        assert_eq!(markers[0].time, 12.0);
    }
}
