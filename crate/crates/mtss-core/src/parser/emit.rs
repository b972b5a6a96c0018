//! Canonical document emitter.
//!
//! The output contract is bit-exact: fixed field order, canonicalized
//! streams, 2-space indentation, times printed with exactly 3 decimal
//! places, minimal string escaping, LF newlines, trailing newline.

use crate::schema::{AudioEvent, ReferenceEntity, Script, Shot, TimeRange};

/// Serialize a script to the canonical textual document form.
///
/// Deterministic: two serializations of equal scripts are byte-identical,
/// and `parse(serialize(s))` equals `canonicalize(s)`.
pub fn serialize(script: &Script) -> String {
    let s = script.canonicalize();
    let mut w = JsonWriter::new();
    w.open_object();
    w.key("meta");
    w.open_object();
    w.key("duration");
    w.number(s.meta().duration);
    if let Some(fps) = s.meta().fps {
        w.key("fps");
        w.number(fps);
    }
    w.close_object();

    w.key("global");
    w.open_object();
    w.key("scene_description");
    w.string(&s.global().scene_description);
    w.key("global_style");
    w.string(&s.global().global_style);
    w.key("global_audio");
    w.string(&s.global().global_audio);
    w.close_object();

    w.key("references");
    w.open_array();
    for r in s.references() {
        emit_reference(&mut w, r);
    }
    w.close_array();

    w.key("shots");
    w.open_array();
    for shot in s.shots() {
        emit_shot(&mut w, shot);
    }
    w.close_array();

    w.key("events");
    w.open_array();
    for ev in s.events() {
        emit_event(&mut w, ev);
    }
    w.close_array();

    w.close_object();
    w.finish()
}

fn emit_reference(w: &mut JsonWriter, r: &ReferenceEntity) {
    w.open_object();
    w.key("id");
    w.string(&r.id.to_string());
    w.key("category");
    w.string(r.category().as_str());
    w.key("semantic_description");
    w.string(&r.semantic_description);
    w.key("timestamp");
    w.number(r.timestamp);
    w.key("appearance_anchor");
    w.open_object();
    w.key("detail_description");
    w.string(&r.appearance_anchor.detail_description);
    for (key, value) in [
        ("clothing", &r.appearance_anchor.clothing),
        ("accessories", &r.appearance_anchor.accessories),
        ("hairstyle", &r.appearance_anchor.hairstyle),
    ] {
        if let Some(v) = value {
            w.key(key);
            w.string(v);
        }
    }
    w.close_object();
    w.close_object();
}

fn emit_shot(w: &mut JsonWriter, s: &Shot) {
    w.open_object();
    w.key("id");
    w.string(&s.id.to_string());
    w.key("time_range");
    w.time_range(s.time_range);
    w.key("visual_description");
    w.string(&s.visual_description);
    w.key("camera");
    w.open_object();
    for (key, value) in [
        ("movement", &s.camera.movement),
        ("perspective", &s.camera.perspective),
        ("scale", &s.camera.scale),
    ] {
        if let Some(v) = value {
            w.key(key);
            w.string(v);
        }
    }
    w.close_object();
    w.key("references_in_shot");
    w.inline_strings(s.references_in_shot.iter().map(|id| id.to_string()));
    w.key("active_events");
    w.inline_strings(s.active_events.iter().map(|id| id.to_string()));
    w.close_object();
}

fn emit_event(w: &mut JsonWriter, e: &AudioEvent) {
    w.open_object();
    w.key("id");
    w.string(&e.id.to_string());
    w.key("type");
    w.string(e.event_type.as_str());
    w.key("time_range");
    w.time_range(e.time_range);
    if let Some(speaker) = e.speaker {
        w.key("speaker");
        w.string(&speaker.to_string());
    }
    if let Some(line) = &e.line {
        w.key("line");
        w.string(line);
    }
    w.key("description");
    w.string(&e.description);
    w.close_object();
}

/// Format a time or rate with exactly three decimal places.
pub fn format_number(v: f64) -> String {
    format!("{v:.3}")
}

/// Escape a string into a JSON literal (without surrounding quotes):
/// the minimal escapes `\"`, `\\`, `\n`, `\r`, `\t`, and `\u00XX` for
/// remaining control characters; everything else is raw UTF-8.
pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Indentation-aware writer for the canonical dialect. Containers opened
/// with `open_*` are laid out one entry per line; `inline_strings` and
/// `time_range` emit compact single-line arrays.
pub(crate) struct JsonWriter {
    out: String,
    indent: usize,
    // whether the current container already has at least one entry
    has_entry: Vec<bool>,
    // true right after a key, i.e. the next value continues the line
    after_key: bool,
}

impl JsonWriter {
    pub fn new() -> JsonWriter {
        JsonWriter {
            out: String::new(),
            indent: 0,
            has_entry: Vec::new(),
            after_key: false,
        }
    }

    pub fn finish(mut self) -> String {
        self.out.push('\n');
        self.out
    }

    fn begin_entry(&mut self) {
        if self.after_key {
            self.after_key = false;
            return;
        }
        if let Some(has) = self.has_entry.last_mut() {
            if *has {
                self.out.push(',');
            }
            *has = true;
            self.out.push('\n');
            for _ in 0..self.indent {
                self.out.push_str("  ");
            }
        }
    }

    pub fn key(&mut self, name: &str) {
        self.begin_entry();
        self.out.push('"');
        self.out.push_str(&escape_string(name));
        self.out.push_str("\": ");
        self.after_key = true;
    }

    pub fn open_object(&mut self) {
        self.begin_entry();
        self.out.push('{');
        self.indent += 1;
        self.has_entry.push(false);
    }

    pub fn close_object(&mut self) {
        let had = self.has_entry.pop().unwrap_or(false);
        self.indent -= 1;
        if had {
            self.out.push('\n');
            for _ in 0..self.indent {
                self.out.push_str("  ");
            }
        }
        self.out.push('}');
    }

    pub fn open_array(&mut self) {
        self.begin_entry();
        self.out.push('[');
        self.indent += 1;
        self.has_entry.push(false);
    }

    pub fn close_array(&mut self) {
        let had = self.has_entry.pop().unwrap_or(false);
        self.indent -= 1;
        if had {
            self.out.push('\n');
            for _ in 0..self.indent {
                self.out.push_str("  ");
            }
        }
        self.out.push(']');
    }

    pub fn string(&mut self, v: &str) {
        self.begin_entry();
        self.out.push('"');
        self.out.push_str(&escape_string(v));
        self.out.push('"');
    }

    pub fn number(&mut self, v: f64) {
        self.begin_entry();
        self.out.push_str(&format_number(v));
    }

    pub fn integer(&mut self, v: u64) {
        self.begin_entry();
        self.out.push_str(&v.to_string());
    }

    pub fn time_range(&mut self, r: TimeRange) {
        self.begin_entry();
        self.out
            .push_str(&format!("[{}, {}]", format_number(r.start), format_number(r.end)));
    }

    pub fn inline_strings(&mut self, items: impl Iterator<Item = String>) {
        self.begin_entry();
        let parts: Vec<String> = items.map(|s| format!("\"{}\"", escape_string(&s))).collect();
        self.out.push('[');
        self.out.push_str(&parts.join(", "));
        self.out.push(']');
    }
}
