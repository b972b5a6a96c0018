//! Mapping from a spanned JSON value tree to a typed [`Script`], with
//! multi-diagnostic reporting. Every schema invariant checked by
//! [`Script::build`] is mirrored here so diagnostics carry the span of
//! the offending construct; a clean mapping therefore always builds.

use std::collections::HashMap;
use std::str::FromStr;

use super::json::{JsonField, JsonValue};
use super::markers::extract_inline_timestamps;
use super::{ParseCode, ParseDiagnostic, SourceSpan};
use crate::schema::{
    quantize_time, AppearanceAnchor, AudioEvent, Camera, EntityCategory, EntityId, EventId,
    EventType, GlobalContext, MediaMeta, ReferenceEntity, Script, Shot, ShotId, TimeRange,
    TIME_EPSILON,
};

pub(crate) fn map_document(root: &JsonValue) -> Result<Script, Vec<ParseDiagnostic>> {
    let mut cx = Context::default();
    let JsonValue::Object(fields, _) = root else {
        cx.push(
            ParseCode::P003,
            root.span(),
            format!("expected the document root to be an object, found {}", root.type_name()),
        );
        return Err(cx.diags);
    };

    let reader = ObjectReader::new(
        fields,
        &["meta", "global", "references", "shots", "events"],
        &mut cx,
    );

    let meta = reader
        .get("meta")
        .map(|v| map_meta(v, &mut cx))
        .unwrap_or_else(|| {
            cx.missing(root.span(), "meta");
            None
        });
    let global = reader
        .get("global")
        .map(|v| map_global(v, &mut cx))
        .unwrap_or_else(|| {
            cx.missing(root.span(), "global");
            None
        });

    let duration = meta.as_ref().map(|m| m.duration).unwrap_or(0.0);

    let mut references = Vec::new();
    if let Some(v) = reader.get("references") {
        for item in expect_record_array(v, "references", &mut cx) {
            if let Some(r) = map_reference(item, duration, &mut cx) {
                references.push(r);
            }
        }
    }
    let mut shots = Vec::new();
    if let Some(v) = reader.get("shots") {
        for item in expect_record_array(v, "shots", &mut cx) {
            if let Some(s) = map_shot(item, &mut cx) {
                shots.push(s);
            }
        }
    }
    let mut events = Vec::new();
    if let Some(v) = reader.get("events") {
        for item in expect_record_array(v, "events", &mut cx) {
            if let Some(e) = map_event(item, &mut cx) {
                events.push(e);
            }
        }
    }

    check_stream_unique(
        "references",
        references.iter().map(|(r, sp)| (r.id.to_string(), *sp)),
        &mut cx,
    );
    check_stream_unique(
        "shots",
        shots.iter().map(|(s, sp)| (s.id.to_string(), *sp)),
        &mut cx,
    );
    check_stream_unique(
        "events",
        events.iter().map(|(e, sp)| (e.id.to_string(), *sp)),
        &mut cx,
    );

    if !cx.diags.is_empty() {
        let mut diags = cx.diags;
        diags.sort_by(|a, b| {
            a.span
                .byte_offset_start
                .cmp(&b.span.byte_offset_start)
                .then(a.code.cmp(&b.code))
                .then(a.message.cmp(&b.message))
        });
        return Err(diags);
    }

    let (Some(meta), Some(global)) = (meta, global) else {
        unreachable!("missing sections always push a diagnostic");
    };
    match Script::build(
        meta,
        global,
        references.into_iter().map(|(r, _)| r).collect(),
        shots.into_iter().map(|(s, _)| s).collect(),
        events.into_iter().map(|(e, _)| e).collect(),
    ) {
        Ok(script) => Ok(script),
        Err(err) => Err(vec![ParseDiagnostic {
            code: ParseCode::P004,
            message: err.to_string(),
            span: root.span(),
        }]),
    }
}

#[derive(Default)]
struct Context {
    diags: Vec<ParseDiagnostic>,
}

impl Context {
    fn push(&mut self, code: ParseCode, span: SourceSpan, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            code,
            message: message.into(),
            span,
        });
    }

    fn missing(&mut self, span: SourceSpan, path: impl std::fmt::Display) {
        self.push(
            ParseCode::P004,
            span,
            format!("missing required field `{path}`"),
        );
    }
}

/// Closed-schema object access: flags unknown and duplicate keys, serves
/// the first occurrence of each known key.
struct ObjectReader<'a> {
    fields: HashMap<&'a str, &'a JsonValue>,
}

impl<'a> ObjectReader<'a> {
    fn new(fields: &'a [JsonField], known: &[&str], cx: &mut Context) -> ObjectReader<'a> {
        let mut map = HashMap::new();
        for f in fields {
            if !known.contains(&f.key.as_str()) {
                cx.push(
                    ParseCode::P002,
                    f.key_span,
                    format!("unknown field `{}`", f.key),
                );
                continue;
            }
            if map.insert(f.key.as_str(), &f.value).is_some() {
                cx.push(
                    ParseCode::P002,
                    f.key_span,
                    format!("duplicate field `{}`", f.key),
                );
            }
        }
        ObjectReader { fields: map }
    }

    fn get(&self, key: &str) -> Option<&'a JsonValue> {
        self.fields.get(key).copied()
    }
}

fn expect_object<'a>(
    v: &'a JsonValue,
    what: &str,
    cx: &mut Context,
) -> Option<&'a [JsonField]> {
    match v {
        JsonValue::Object(fields, _) => Some(fields),
        other => {
            cx.push(
                ParseCode::P003,
                other.span(),
                format!("expected {what} to be an object, found {}", other.type_name()),
            );
            None
        }
    }
}

fn expect_record_array<'a>(
    v: &'a JsonValue,
    what: &str,
    cx: &mut Context,
) -> Vec<&'a JsonValue> {
    match v {
        JsonValue::Array(items, _) => items.iter().collect(),
        other => {
            cx.push(
                ParseCode::P003,
                other.span(),
                format!("expected {what} to be an array, found {}", other.type_name()),
            );
            Vec::new()
        }
    }
}

fn expect_string<'a>(v: &'a JsonValue, what: &str, cx: &mut Context) -> Option<&'a str> {
    match v {
        JsonValue::String(s, _) => Some(s),
        other => {
            cx.push(
                ParseCode::P003,
                other.span(),
                format!("expected {what} to be a string, found {}", other.type_name()),
            );
            None
        }
    }
}

fn expect_number(v: &JsonValue, what: &str, cx: &mut Context) -> Option<f64> {
    match v {
        JsonValue::Number(n, _) => Some(*n),
        other => {
            cx.push(
                ParseCode::P003,
                other.span(),
                format!("expected {what} to be a number, found {}", other.type_name()),
            );
            None
        }
    }
}

fn nonempty_string(
    v: &JsonValue,
    path: &str,
    cx: &mut Context,
) -> Option<String> {
    let s = expect_string(v, path, cx)?;
    if s.is_empty() {
        cx.push(
            ParseCode::P004,
            v.span(),
            format!("missing required field `{path}`: must not be empty"),
        );
        return None;
    }
    Some(s.to_string())
}

fn map_meta(v: &JsonValue, cx: &mut Context) -> Option<MediaMeta> {
    let fields = expect_object(v, "meta", cx)?;
    let reader = ObjectReader::new(fields, &["duration", "fps"], cx);
    let duration = match reader.get("duration") {
        Some(d) => {
            let n = expect_number(d, "meta/duration", cx)?;
            let q = quantize_time(n);
            if !q.is_finite() || q < 0.0 {
                cx.push(
                    ParseCode::P004,
                    d.span(),
                    "duration must be a finite non-negative number",
                );
                return None;
            }
            q
        }
        None => {
            cx.missing(v.span(), "meta/duration");
            return None;
        }
    };
    let fps = match reader.get("fps") {
        Some(f) => {
            let n = expect_number(f, "meta/fps", cx)?;
            let q = quantize_time(n);
            if !q.is_finite() || q <= 0.0 {
                cx.push(ParseCode::P004, f.span(), "fps must be a finite positive number");
                return None;
            }
            Some(q)
        }
        None => None,
    };
    Some(MediaMeta { duration, fps })
}

fn map_global(v: &JsonValue, cx: &mut Context) -> Option<GlobalContext> {
    let fields = expect_object(v, "global", cx)?;
    let reader = ObjectReader::new(
        fields,
        &["scene_description", "global_style", "global_audio"],
        cx,
    );
    let scene_description = match reader.get("scene_description") {
        Some(s) => nonempty_string(s, "global/scene_description", cx)?,
        None => {
            cx.missing(v.span(), "global/scene_description");
            return None;
        }
    };
    let global_style = match reader.get("global_style") {
        Some(s) => expect_string(s, "global/global_style", cx)?.to_string(),
        None => String::new(),
    };
    let global_audio = match reader.get("global_audio") {
        Some(s) => expect_string(s, "global/global_audio", cx)?.to_string(),
        None => String::new(),
    };
    Some(GlobalContext {
        scene_description,
        global_style,
        global_audio,
    })
}

fn map_id<T: FromStr<Err = crate::schema::StructureError>>(
    v: &JsonValue,
    what: &str,
    cx: &mut Context,
) -> Option<T> {
    let s = expect_string(v, what, cx)?;
    match s.parse::<T>() {
        Ok(id) => Some(id),
        Err(err) => {
            cx.push(ParseCode::P004, v.span(), err.to_string());
            None
        }
    }
}

fn map_reference(
    v: &JsonValue,
    duration: f64,
    cx: &mut Context,
) -> Option<(ReferenceEntity, SourceSpan)> {
    let fields = expect_object(v, "reference record", cx)?;
    let reader = ObjectReader::new(
        fields,
        &[
            "id",
            "category",
            "semantic_description",
            "timestamp",
            "appearance_anchor",
        ],
        cx,
    );
    let id: EntityId = match reader.get("id") {
        Some(idv) => map_id(idv, "reference id", cx)?,
        None => {
            cx.missing(v.span(), "references/*/id");
            return None;
        }
    };
    let id_span = reader.get("id").map(|x| x.span()).unwrap_or(v.span());

    match reader.get("category") {
        Some(cv) => {
            let name = expect_string(cv, "category", cx)?;
            match EntityCategory::parse_name(name) {
                Some(cat) if cat == id.category() => {}
                Some(cat) => {
                    cx.push(
                        ParseCode::P004,
                        cv.span(),
                        format!("id `{id}` prefix does not match category `{cat}`"),
                    );
                    return None;
                }
                None => {
                    cx.push(
                        ParseCode::P003,
                        cv.span(),
                        format!("expected category to be one of person|object|animal|scene, found `{name}`"),
                    );
                    return None;
                }
            }
        }
        None => {
            cx.missing(v.span(), format!("references/{id}/category"));
            return None;
        }
    }

    let semantic_description = match reader.get("semantic_description") {
        Some(s) => nonempty_string(s, &format!("references/{id}/semantic_description"), cx)?,
        None => {
            cx.missing(v.span(), format!("references/{id}/semantic_description"));
            return None;
        }
    };

    let timestamp = match reader.get("timestamp") {
        Some(t) => {
            let n = expect_number(t, "timestamp", cx)?;
            let q = quantize_time(n);
            if !q.is_finite() || q < 0.0 {
                cx.push(
                    ParseCode::P004,
                    t.span(),
                    "timestamp must be a finite non-negative number",
                );
                return None;
            }
            if duration > 0.0 && q > duration + TIME_EPSILON {
                cx.push(
                    ParseCode::P004,
                    t.span(),
                    format!("timestamp {q} exceeds media duration {duration}"),
                );
                return None;
            }
            q
        }
        None => {
            cx.missing(v.span(), format!("references/{id}/timestamp"));
            return None;
        }
    };

    let appearance_anchor = match reader.get("appearance_anchor") {
        Some(a) => map_anchor(a, id, cx)?,
        None => {
            cx.missing(v.span(), format!("references/{id}/appearance_anchor"));
            return None;
        }
    };

    Some((
        ReferenceEntity {
            id,
            semantic_description,
            timestamp,
            appearance_anchor,
        },
        id_span,
    ))
}

fn map_anchor(v: &JsonValue, id: EntityId, cx: &mut Context) -> Option<AppearanceAnchor> {
    let fields = expect_object(v, "appearance_anchor", cx)?;
    let reader = ObjectReader::new(
        fields,
        &["detail_description", "clothing", "accessories", "hairstyle"],
        cx,
    );
    let detail_description = match reader.get("detail_description") {
        Some(d) => nonempty_string(
            d,
            &format!("references/{id}/appearance_anchor/detail_description"),
            cx,
        )?,
        None => {
            cx.missing(
                v.span(),
                format!("references/{id}/appearance_anchor/detail_description"),
            );
            return None;
        }
    };
    let mut person_field = |key: &str| -> Option<Option<String>> {
        match reader.get(key) {
            Some(val) => {
                let s = expect_string(val, key, cx)?;
                if id.category() != EntityCategory::Person {
                    cx.push(
                        ParseCode::P004,
                        val.span(),
                        format!("field `{key}` is not allowed on `{id}`"),
                    );
                    return None;
                }
                Some(Some(s.to_string()))
            }
            None => Some(None),
        }
    };
    let clothing = person_field("clothing")?;
    let accessories = person_field("accessories")?;
    let hairstyle = person_field("hairstyle")?;
    Some(AppearanceAnchor {
        detail_description,
        clothing,
        accessories,
        hairstyle,
    })
}

fn map_time_range(v: &JsonValue, owner: &str, cx: &mut Context) -> Option<TimeRange> {
    let JsonValue::Array(items, span) = v else {
        cx.push(
            ParseCode::P003,
            v.span(),
            format!("expected time_range to be a two-element array, found {}", v.type_name()),
        );
        return None;
    };
    if items.len() != 2 {
        cx.push(
            ParseCode::P003,
            *span,
            format!("expected time_range to have exactly 2 elements, found {}", items.len()),
        );
        return None;
    }
    let start = expect_number(&items[0], "time_range start", cx)?;
    let end = expect_number(&items[1], "time_range end", cx)?;
    let range = TimeRange::new(start, end);
    if !(range.start >= 0.0 && range.start < range.end && range.end.is_finite()) {
        cx.push(
            ParseCode::P004,
            *span,
            format!(
                "bad time range on `{owner}`: [{}, {}) is not a valid non-empty range",
                range.start, range.end
            ),
        );
        return None;
    }
    Some(range)
}

fn map_id_list<T: FromStr<Err = crate::schema::StructureError> + std::fmt::Display + PartialEq>(
    v: &JsonValue,
    path: &str,
    cx: &mut Context,
) -> Option<Vec<T>> {
    let JsonValue::Array(items, span) = v else {
        cx.push(
            ParseCode::P003,
            v.span(),
            format!("expected {path} to be an array of ids, found {}", v.type_name()),
        );
        return None;
    };
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for item in items {
        let id: T = map_id(item, path, cx)?;
        if out.contains(&id) {
            cx.push(
                ParseCode::P004,
                item.span(),
                format!("duplicate id `{id}` in {path}"),
            );
            return None;
        }
        out.push(id);
    }
    let _ = span;
    Some(out)
}

fn map_shot(v: &JsonValue, cx: &mut Context) -> Option<(Shot, SourceSpan)> {
    let fields = expect_object(v, "shot record", cx)?;
    let reader = ObjectReader::new(
        fields,
        &[
            "id",
            "time_range",
            "visual_description",
            "camera",
            "references_in_shot",
            "active_events",
        ],
        cx,
    );
    let id: ShotId = match reader.get("id") {
        Some(idv) => map_id(idv, "shot id", cx)?,
        None => {
            cx.missing(v.span(), "shots/*/id");
            return None;
        }
    };
    let id_span = reader.get("id").map(|x| x.span()).unwrap_or(v.span());

    let time_range = match reader.get("time_range") {
        Some(t) => map_time_range(t, &id.to_string(), cx)?,
        None => {
            cx.missing(v.span(), format!("shots/{id}/time_range"));
            return None;
        }
    };

    let visual_description = match reader.get("visual_description") {
        Some(d) => {
            let text = nonempty_string(d, &format!("shots/{id}/visual_description"), cx)?;
            if let Err(err) = extract_inline_timestamps(&text) {
                cx.push(ParseCode::P005, d.span(), err.to_string());
                return None;
            }
            text
        }
        None => {
            cx.missing(v.span(), format!("shots/{id}/visual_description"));
            return None;
        }
    };

    let camera = match reader.get("camera") {
        Some(c) => map_camera(c, id, cx)?,
        None => {
            cx.missing(v.span(), format!("shots/{id}/camera"));
            return None;
        }
    };

    let references_in_shot = match reader.get("references_in_shot") {
        Some(l) => map_id_list(l, &format!("shots/{id}/references_in_shot"), cx)?,
        None => Vec::new(),
    };
    let active_events = match reader.get("active_events") {
        Some(l) => map_id_list(l, &format!("shots/{id}/active_events"), cx)?,
        None => Vec::new(),
    };

    Some((
        Shot {
            id,
            time_range,
            visual_description,
            camera,
            references_in_shot,
            active_events,
        },
        id_span,
    ))
}

fn map_camera(v: &JsonValue, id: ShotId, cx: &mut Context) -> Option<Camera> {
    let fields = expect_object(v, "camera", cx)?;
    let reader = ObjectReader::new(fields, &["movement", "perspective", "scale"], cx);
    let field = |key: &str, cx: &mut Context| -> Option<Option<String>> {
        match reader.get(key) {
            Some(val) => Some(Some(expect_string(val, key, cx)?.to_string())),
            None => Some(None),
        }
    };
    let movement = field("movement", cx)?;
    let perspective = field("perspective", cx)?;
    let scale = field("scale", cx)?;
    let camera = Camera {
        movement,
        perspective,
        scale,
    };
    let all_empty = [&camera.movement, &camera.perspective, &camera.scale]
        .iter()
        .all(|f| f.as_deref().map_or(true, str::is_empty));
    if all_empty {
        cx.missing(v.span(), format!("shots/{id}/camera"));
        return None;
    }
    Some(camera)
}

fn map_event(v: &JsonValue, cx: &mut Context) -> Option<(AudioEvent, SourceSpan)> {
    let fields = expect_object(v, "event record", cx)?;
    let reader = ObjectReader::new(
        fields,
        &["id", "type", "time_range", "speaker", "line", "description"],
        cx,
    );
    let id: EventId = match reader.get("id") {
        Some(idv) => map_id(idv, "event id", cx)?,
        None => {
            cx.missing(v.span(), "events/*/id");
            return None;
        }
    };
    let id_span = reader.get("id").map(|x| x.span()).unwrap_or(v.span());

    let event_type = match reader.get("type") {
        Some(tv) => {
            let name = expect_string(tv, "event type", cx)?;
            match EventType::parse_name(name) {
                Some(t) => t,
                None => {
                    cx.push(
                        ParseCode::P003,
                        tv.span(),
                        format!("expected type to be one of dialogue|sfx|music, found `{name}`"),
                    );
                    return None;
                }
            }
        }
        None => {
            cx.missing(v.span(), format!("events/{id}/type"));
            return None;
        }
    };

    let time_range = match reader.get("time_range") {
        Some(t) => map_time_range(t, &id.to_string(), cx)?,
        None => {
            cx.missing(v.span(), format!("events/{id}/time_range"));
            return None;
        }
    };

    let speaker: Option<EntityId> = match reader.get("speaker") {
        Some(sv) => Some(map_id(sv, "speaker", cx)?),
        None => None,
    };
    let line: Option<String> = match reader.get("line") {
        Some(lv) => Some(expect_string(lv, "line", cx)?.to_string()),
        None => None,
    };
    let description = match reader.get("description") {
        Some(d) => expect_string(d, "description", cx)?.to_string(),
        None => {
            cx.missing(v.span(), format!("events/{id}/description"));
            return None;
        }
    };

    // mirror the event-type field rules so the diagnostic lands on the record
    match event_type {
        EventType::Dialogue => {
            if speaker.is_none() {
                cx.missing(v.span(), format!("events/{id}/speaker"));
                return None;
            }
            if line.is_none() {
                cx.missing(v.span(), format!("events/{id}/line"));
                return None;
            }
        }
        EventType::Sfx => {
            if line.is_some() {
                cx.push(
                    ParseCode::P004,
                    reader.get("line").map(|x| x.span()).unwrap_or(v.span()),
                    format!("field `line` is not allowed on `{id}`"),
                );
                return None;
            }
        }
        EventType::Music => {
            if let Some(sv) = reader.get("speaker") {
                cx.push(
                    ParseCode::P004,
                    sv.span(),
                    format!("field `speaker` is not allowed on `{id}`"),
                );
                return None;
            }
            if let Some(lv) = reader.get("line") {
                cx.push(
                    ParseCode::P004,
                    lv.span(),
                    format!("field `line` is not allowed on `{id}`"),
                );
                return None;
            }
        }
    }

    Some((
        AudioEvent {
            id,
            event_type,
            time_range,
            speaker,
            line,
            description,
        },
        id_span,
    ))
}

/// Parse one reference record in the document dialect (for edit scripts).
pub(crate) fn parse_reference_record(text: &str) -> Result<ReferenceEntity, String> {
    let v = super::json::parse_value(text).map_err(|d| d.message)?;
    let mut cx = Context::default();
    let parsed = map_reference(&v, 0.0, &mut cx);
    match cx.diags.first() {
        Some(d) => Err(d.message.clone()),
        None => parsed
            .map(|(r, _)| r)
            .ok_or_else(|| "invalid reference record".to_string()),
    }
}

/// Parse one event record in the document dialect (for edit scripts).
pub(crate) fn parse_event_record(text: &str) -> Result<AudioEvent, String> {
    let v = super::json::parse_value(text).map_err(|d| d.message)?;
    let mut cx = Context::default();
    let parsed = map_event(&v, &mut cx);
    match cx.diags.first() {
        Some(d) => Err(d.message.clone()),
        None => parsed
            .map(|(e, _)| e)
            .ok_or_else(|| "invalid event record".to_string()),
    }
}

fn check_stream_unique(
    stream: &str,
    ids: impl Iterator<Item = (String, SourceSpan)>,
    cx: &mut Context,
) {
    let mut seen: HashMap<String, ()> = HashMap::new();
    for (id, span) in ids {
        if seen.insert(id.clone(), ()).is_some() {
            cx.push(
                ParseCode::P004,
                span,
                format!("duplicate id `{id}` in {stream}"),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_str, ParseCode};

    const MINIMAL: &str = r#"{
  "meta": {"duration": 10},
  "global": {"scene_description": "A room."},
  "references": [],
  "shots": [],
  "events": []
}"#;

    #[test]
    fn minimal_document_parses() {
        let s = parse_str(MINIMAL).unwrap();
        assert_eq!(s.meta().duration, 10.0);
        assert_eq!(s.meta().fps, None);
        assert_eq!(s.meta().fps_or_default(), 25.0);
        assert!(s.references().is_empty() && s.shots().is_empty() && s.events().is_empty());
    }

    #[test]
    fn omitted_streams_default_to_empty() {
        let s = parse_str(
            r#"{"meta": {"duration": 10}, "global": {"scene_description": "A room."}}"#,
        )
        .unwrap();
        assert!(s.shots().is_empty());
    }

    #[test]
    fn inverted_time_range_is_p004_on_the_range() {
        let doc = MINIMAL.replace(
            "\"shots\": []",
            r#""shots": [{"id": "SHOT_1", "time_range": [5, 2], "visual_description": "x", "camera": {"movement": "static"}, "references_in_shot": [], "active_events": []}]"#,
        );
        let diags = parse_str(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, ParseCode::P004);
        assert!(diags[0].message.contains("SHOT_1"));
        let span_text = &doc[diags[0].span.byte_offset_start..diags[0].span.byte_offset_end];
        assert_eq!(span_text, "[5, 2]");
    }

    #[test]
    fn unknown_field_is_p002_on_the_key() {
        let doc = MINIMAL.replace(
            "\"shots\": []",
            r#""shots": [{"id": "SHOT_1", "time_range": [0, 2], "visual_description": "x", "camera": {"movement": "static"}, "colour_grade": "teal"}]"#,
        );
        let diags = parse_str(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, ParseCode::P002);
        let span_text = &doc[diags[0].span.byte_offset_start..diags[0].span.byte_offset_end];
        assert_eq!(span_text, "\"colour_grade\"");
    }

    #[test]
    fn bad_marker_is_p005() {
        let doc = MINIMAL.replace(
            "\"shots\": []",
            r#""shots": [{"id": "SHOT_1", "time_range": [0, 2], "visual_description": "a [t=oops] b", "camera": {"movement": "static"}}]"#,
        );
        let diags = parse_str(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, ParseCode::P005);
    }

    #[test]
    fn duplicate_record_id_is_p004_on_second() {
        let doc = MINIMAL.replace(
            "\"events\": []",
            r#""events": [
    {"id": "EVENT_1", "type": "music", "time_range": [0, 1], "description": "a"},
    {"id": "EVENT_1", "type": "music", "time_range": [2, 3], "description": "b"}
  ]"#,
        );
        let diags = parse_str(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, ParseCode::P004);
        assert!(diags[0].message.contains("duplicate id `EVENT_1`"));
        assert_eq!(diags[0].span.line, 8);
    }

    #[test]
    fn multiple_diagnostics_reported_in_document_order() {
        let doc = r#"{
  "meta": {"duration": -4},
  "global": {"scene_description": ""},
  "shots": "nope"
}"#;
        let diags = parse_str(doc).unwrap_err();
        assert!(diags.len() >= 3);
        assert!(diags.windows(2).all(|w| w[0].span.byte_offset_start <= w[1].span.byte_offset_start));
    }

    #[test]
    fn music_with_speaker_rejected() {
        let doc = MINIMAL.replace(
            "\"events\": []",
            r#""events": [{"id": "EVENT_1", "type": "music", "time_range": [0, 1], "speaker": "PERSON_1", "description": "a"}]"#,
        );
        let diags = parse_str(&doc).unwrap_err();
        assert_eq!(diags[0].code, ParseCode::P004);
        assert!(diags[0].message.contains("speaker"));
    }
}
