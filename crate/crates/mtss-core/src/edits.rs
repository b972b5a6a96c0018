//! Local-edit engine with change-footprint tracking.
//!
//! Edits consume an immutable script and produce a new one. The footprint
//! of an edit is the set of canonical field paths whose serialization
//! changed, computed by diffing the canonical documents before and after —
//! an implementation-independent measure of edit locality. Referential
//! integrity is enforced on the way in: an edit can never introduce a
//! dangling identity link that the pre-edit script did not have.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::parser::json::{JsonField, JsonValue};
use crate::parser::{extract_inline_timestamps, reinsert_markers, serialize};
use crate::schema::{
    quantize_time, AudioEvent, EntityId, EventId, EventType, ReferenceEntity, Script, Shot,
    ShotId, StructureError, TimeRange, TIME_EPSILON,
};
use crate::timeline::overlaps;
use crate::validator::{validate, DiagnosticSet, RuleCode};

/// A value assignable through [`Edit::SetField`].
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValue {
    Text(String),
    Number(f64),
    Range(TimeRange),
    /// Clears an optional field.
    Null,
}

/// One local edit.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit {
    /// Assign one field addressed by its canonical document path,
    /// e.g. `shots/SHOT_1/visual_description`.
    SetField { path: String, value: FieldValue },
    AddEntity(ReferenceEntity),
    RemoveEntity { id: EntityId, cascade: bool },
    AddEvent(AudioEvent),
    RemoveEvent { id: EventId, cascade: bool },
    RebindSpeaker { event: EventId, speaker: EntityId },
    RetimeShot {
        shot: ShotId,
        range: TimeRange,
        /// Recompute the shot's active_events from temporal overlap
        /// (default workflow); `false` leaves links untouched so the
        /// validator can show the damage.
        relink: bool,
    },
    SplitShot { shot: ShotId, at: f64 },
    MergeShots { first: ShotId, second: ShotId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("unknown id `{id}`")]
    UnknownId { id: String },
    #[error("removal would dangle: {}", paths.join(", "))]
    WouldDangle { paths: Vec<String> },
    #[error("invalid path `{path}`: {reason}")]
    InvalidPath { path: String, reason: String },
    #[error("type mismatch at `{path}`: {reason}")]
    TypeMismatch { path: String, reason: String },
    #[error("cut {at} is outside shot `{shot}`")]
    CutOutsideRange { shot: ShotId, at: f64 },
    #[error("shots `{first}` and `{second}` are not adjacent: {reason}")]
    NotAdjacent {
        first: ShotId,
        second: ShotId,
        reason: String,
    },
    #[error("edit would break the script structure: {0}")]
    Structure(#[from] StructureError),
}

/// What one edit touched.
#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    /// Canonical field paths whose serialization changed: exactly the
    /// path-level diff between serialize(before) and serialize(after).
    pub changed_paths: BTreeSet<String>,
    /// Lint rules whose outcome the edit could have affected.
    pub revalidated: BTreeSet<RuleCode>,
    /// Findings present after the edit that were not present before.
    pub new_diagnostics: DiagnosticSet,
}

impl fmt::Display for Footprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "changed paths: {}", self.changed_paths.len())?;
        for p in &self.changed_paths {
            writeln!(f, "  {p}")?;
        }
        let codes: Vec<&str> = self.revalidated.iter().map(|c| c.as_str()).collect();
        writeln!(f, "revalidated: {}", codes.join(" "))?;
        write!(f, "new findings: {}", self.new_diagnostics.len())?;
        for d in self.new_diagnostics.iter() {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

/// Apply one edit, returning the edited script and its footprint.
pub fn apply(script: &Script, edit: &Edit) -> Result<(Script, Footprint), EditError> {
    let after = transform(script, edit)?;
    Ok(finish(script, after, affected_rules(edit)))
}

/// Apply a sequence of edits, returning the final script and the overall
/// footprint (diffed from the original document).
pub fn apply_all(script: &Script, edits: &[Edit]) -> Result<(Script, Footprint), EditError> {
    let mut current = script.clone();
    let mut rules = BTreeSet::new();
    for edit in edits {
        current = transform(&current, edit)?;
        rules.extend(affected_rules(edit));
    }
    Ok(finish(script, current, rules))
}

/// Split a shot at an interior cut point. The shot is replaced by two
/// fresh-id halves; inline timestamps are partitioned at the cut, link
/// lists are copied, and active events are recomputed per half.
pub fn split_shot(
    script: &Script,
    shot: ShotId,
    at: f64,
) -> Result<(Script, Footprint), EditError> {
    apply(script, &Edit::SplitShot { shot, at })
}

/// Merge two shots adjacent in canonical order (gap within tolerance).
/// The merged shot keeps the first id; descriptions are concatenated with
/// a single space, reference lists unioned, active events recomputed.
pub fn merge_shots(
    script: &Script,
    first: ShotId,
    second: ShotId,
) -> Result<(Script, Footprint), EditError> {
    apply(script, &Edit::MergeShots { first, second })
}

fn finish(before: &Script, after: Script, rules: BTreeSet<RuleCode>) -> (Script, Footprint) {
    let changed_paths = diff_documents(&serialize(before), &serialize(&after));
    let new_diagnostics = validate(&after).delta_from(&validate(before));
    debug_assert!(
        new_diagnostics.iter().all(|d| rules.contains(&d.code)),
        "new finding outside the revalidated rule set: {:?}",
        new_diagnostics
            .iter()
            .filter(|d| !rules.contains(&d.code))
            .collect::<Vec<_>>()
    );
    (
        after,
        Footprint {
            changed_paths,
            revalidated: rules,
            new_diagnostics,
        },
    )
}

/// Rules whose outcome an edit of this kind could change.
fn affected_rules(edit: &Edit) -> BTreeSet<RuleCode> {
    use RuleCode::*;
    let codes: &[RuleCode] = match edit {
        Edit::SetField { path, .. } => {
            let segments: Vec<&str> = path.split('/').collect();
            match segments.as_slice() {
                ["meta", "duration"] => &[E007],
                ["shots", _, "visual_description"] => &[E005],
                ["shots", _, "time_range"] => &[E004, E005, E006, E007, W102, W103, W104],
                ["events", _, "time_range"] => &[E006, E007, W102, W103],
                ["events", _, "speaker"] => &[E002, W101, W103, W105],
                ["events", _, "line"] => &[E008],
                ["references", _, "timestamp"] => &[E007],
                _ => &[],
            }
        }
        Edit::AddEntity(_) => &[W101],
        Edit::RemoveEntity { .. } => &[E001, E002, W101, W103, W105],
        Edit::AddEvent(_) => &[E007, W102, W103, W105],
        Edit::RemoveEvent { .. } => &[E003, E006, W101, W102, W103],
        Edit::RebindSpeaker { .. } => &[E002, W101, W103, W105],
        Edit::RetimeShot { .. } => &[E004, E005, E006, E007, W102, W103, W104],
        Edit::SplitShot { .. } | Edit::MergeShots { .. } => {
            &[E001, E003, E004, E005, E006, E007, W102, W103, W104]
        }
    };
    codes.iter().copied().collect()
}

fn transform(script: &Script, edit: &Edit) -> Result<Script, EditError> {
    let (meta, global, references, shots, events) = script.clone().into_parts();
    let mut parts = Parts {
        meta,
        global,
        references,
        shots,
        events,
    };
    match edit {
        Edit::SetField { path, value } => set_field(&mut parts, path, value)?,
        Edit::AddEntity(entity) => {
            if parts.references.iter().any(|r| r.id == entity.id) {
                return Err(StructureError::DuplicateId {
                    scope: "references".to_string(),
                    id: entity.id.to_string(),
                }
                .into());
            }
            parts.references.push(entity.clone());
        }
        Edit::RemoveEntity { id, cascade } => remove_entity(&mut parts, *id, *cascade)?,
        Edit::AddEvent(event) => {
            if parts.events.iter().any(|e| e.id == event.id) {
                return Err(StructureError::DuplicateId {
                    scope: "events".to_string(),
                    id: event.id.to_string(),
                }
                .into());
            }
            if let Some(speaker) = event.speaker {
                if !parts.references.iter().any(|r| r.id == speaker) {
                    return Err(EditError::UnknownId {
                        id: speaker.to_string(),
                    });
                }
            }
            parts.events.push(event.clone());
        }
        Edit::RemoveEvent { id, cascade } => remove_event(&mut parts, *id, *cascade)?,
        Edit::RebindSpeaker { event, speaker } => {
            if !parts.references.iter().any(|r| r.id == *speaker) {
                return Err(EditError::UnknownId {
                    id: speaker.to_string(),
                });
            }
            let ev = parts
                .events
                .iter_mut()
                .find(|e| e.id == *event)
                .ok_or_else(|| EditError::UnknownId {
                    id: event.to_string(),
                })?;
            ev.speaker = Some(*speaker);
        }
        Edit::RetimeShot {
            shot,
            range,
            relink,
        } => retime_shot(&mut parts, *shot, *range, *relink)?,
        Edit::SplitShot { shot, at } => split_in_parts(&mut parts, *shot, *at)?,
        Edit::MergeShots { first, second } => merge_in_parts(&mut parts, *first, *second)?,
    }
    Script::build(
        parts.meta,
        parts.global,
        parts.references,
        parts.shots,
        parts.events,
    )
    .map_err(EditError::from)
}

struct Parts {
    meta: crate::schema::MediaMeta,
    global: crate::schema::GlobalContext,
    references: Vec<ReferenceEntity>,
    shots: Vec<Shot>,
    events: Vec<AudioEvent>,
}

fn remove_entity(parts: &mut Parts, id: EntityId, cascade: bool) -> Result<(), EditError> {
    if !parts.references.iter().any(|r| r.id == id) {
        return Err(EditError::UnknownId { id: id.to_string() });
    }
    let mut dependents = Vec::new();
    for s in &parts.shots {
        if s.references_in_shot.contains(&id) {
            dependents.push(format!("shots/{}/references_in_shot", s.id));
        }
    }
    let mut dialogue_dependents = Vec::new();
    for e in &parts.events {
        if e.speaker == Some(id) {
            let path = format!("events/{}/speaker", e.id);
            if e.event_type == EventType::Dialogue {
                dialogue_dependents.push(path.clone());
            }
            dependents.push(path);
        }
    }
    if !cascade && !dependents.is_empty() {
        return Err(EditError::WouldDangle { paths: dependents });
    }
    // cascade clears removable bindings; a dialogue speaker must stay bound
    if !dialogue_dependents.is_empty() {
        return Err(EditError::WouldDangle {
            paths: dialogue_dependents,
        });
    }
    for s in &mut parts.shots {
        s.references_in_shot.retain(|r| *r != id);
    }
    for e in &mut parts.events {
        if e.speaker == Some(id) {
            e.speaker = None;
        }
    }
    parts.references.retain(|r| r.id != id);
    Ok(())
}

fn remove_event(parts: &mut Parts, id: EventId, cascade: bool) -> Result<(), EditError> {
    if !parts.events.iter().any(|e| e.id == id) {
        return Err(EditError::UnknownId { id: id.to_string() });
    }
    let dependents: Vec<String> = parts
        .shots
        .iter()
        .filter(|s| s.active_events.contains(&id))
        .map(|s| format!("shots/{}/active_events", s.id))
        .collect();
    if !cascade && !dependents.is_empty() {
        return Err(EditError::WouldDangle { paths: dependents });
    }
    for s in &mut parts.shots {
        s.active_events.retain(|e| *e != id);
    }
    parts.events.retain(|e| e.id != id);
    Ok(())
}

fn retime_shot(
    parts: &mut Parts,
    id: ShotId,
    range: TimeRange,
    relink: bool,
) -> Result<(), EditError> {
    let range = TimeRange::new(range.start, range.end);
    if !(range.start >= 0.0 && range.start < range.end && range.end.is_finite()) {
        return Err(StructureError::BadTimeRange {
            id: id.to_string(),
            start: range.start,
            end: range.end,
        }
        .into());
    }
    let events = parts.events.clone();
    let shot = parts
        .shots
        .iter_mut()
        .find(|s| s.id == id)
        .ok_or_else(|| EditError::UnknownId { id: id.to_string() })?;
    shot.time_range = range;
    if relink {
        shot.active_events = infer_for_range(&events, range);
    }
    Ok(())
}

/// Events overlapping `range` by more than the tolerance, ordered by
/// (start, id) — the canonical active-event list for that range.
fn infer_for_range(events: &[AudioEvent], range: TimeRange) -> Vec<EventId> {
    let mut hits: Vec<&AudioEvent> = events
        .iter()
        .filter(|e| overlaps(e.time_range, range))
        .collect();
    hits.sort_by(|a, b| {
        a.time_range
            .start
            .total_cmp(&b.time_range.start)
            .then(a.id.cmp(&b.id))
    });
    hits.iter().map(|e| e.id).collect()
}

fn split_in_parts(parts: &mut Parts, id: ShotId, at: f64) -> Result<(), EditError> {
    let at = quantize_time(at);
    let pos = parts
        .shots
        .iter()
        .position(|s| s.id == id)
        .ok_or_else(|| EditError::UnknownId { id: id.to_string() })?;
    let shot = parts.shots[pos].clone();
    let range = shot.time_range;
    if !(range.start < at && at < range.end) {
        return Err(EditError::CutOutsideRange { shot: id, at });
    }
    let (markers, stripped) = match extract_inline_timestamps(&shot.visual_description) {
        Ok(pair) => pair,
        Err(err) => {
            return Err(EditError::TypeMismatch {
                path: format!("shots/{id}/visual_description"),
                reason: err.to_string(),
            })
        }
    };
    let next = parts.shots.iter().map(|s| s.id.number()).max().unwrap_or(0);
    let first_range = TimeRange::new(range.start, at);
    let second_range = TimeRange::new(at, range.end);
    // markers split at the cut: earlier times stay with the first half
    let first_markers: Vec<_> = markers.iter().filter(|m| m.time < at).cloned().collect();
    let second_markers: Vec<_> = markers.iter().filter(|m| m.time >= at).cloned().collect();
    let first = Shot {
        id: ShotId::new(next + 1),
        time_range: first_range,
        visual_description: reinsert_markers(&stripped, &first_markers),
        camera: shot.camera.clone(),
        references_in_shot: shot.references_in_shot.clone(),
        active_events: infer_for_range(&parts.events, first_range),
    };
    let second = Shot {
        id: ShotId::new(next + 2),
        time_range: second_range,
        visual_description: reinsert_markers(&stripped, &second_markers),
        camera: shot.camera,
        references_in_shot: shot.references_in_shot,
        active_events: infer_for_range(&parts.events, second_range),
    };
    parts.shots.splice(pos..=pos, [first, second]);
    Ok(())
}

fn merge_in_parts(parts: &mut Parts, first: ShotId, second: ShotId) -> Result<(), EditError> {
    let not_adjacent = |reason: &str| EditError::NotAdjacent {
        first,
        second,
        reason: reason.to_string(),
    };
    let find = |id: ShotId| -> Result<usize, EditError> {
        parts
            .shots
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| EditError::UnknownId { id: id.to_string() })
    };
    let first_pos = find(first)?;
    let second_pos = find(second)?;

    // adjacency is judged in canonical order
    let mut order: Vec<(f64, ShotId)> = parts
        .shots
        .iter()
        .map(|s| (s.time_range.start, s.id))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let rank = |id: ShotId| order.iter().position(|(_, x)| *x == id).expect("present");
    if rank(first) + 1 != rank(second) {
        return Err(not_adjacent("not consecutive in canonical order"));
    }
    let a = parts.shots[first_pos].clone();
    let b = parts.shots[second_pos].clone();
    let gap = b.time_range.start - a.time_range.end;
    if gap.abs() > TIME_EPSILON {
        return Err(not_adjacent(&format!("gap of {gap:.3}s between them")));
    }

    let merged_range = TimeRange::new(a.time_range.start, b.time_range.end.max(a.time_range.end));
    let mut references = a.references_in_shot.clone();
    for id in &b.references_in_shot {
        if !references.contains(id) {
            references.push(*id);
        }
    }
    references.sort_by_key(|id| (id.number(), id.category()));
    let merged = Shot {
        id: a.id,
        time_range: merged_range,
        visual_description: format!("{} {}", a.visual_description, b.visual_description),
        camera: crate::schema::Camera {
            movement: a.camera.movement.or(b.camera.movement),
            perspective: a.camera.perspective.or(b.camera.perspective),
            scale: a.camera.scale.or(b.camera.scale),
        },
        references_in_shot: references,
        active_events: infer_for_range(&parts.events, merged_range),
    };
    parts.shots[first_pos] = merged;
    parts.shots.remove(second_pos);
    Ok(())
}

fn set_field(parts: &mut Parts, path: &str, value: &FieldValue) -> Result<(), EditError> {
    let invalid = |reason: &str| EditError::InvalidPath {
        path: path.to_string(),
        reason: reason.to_string(),
    };
    let mismatch = |reason: &str| EditError::TypeMismatch {
        path: path.to_string(),
        reason: reason.to_string(),
    };
    let text = |value: &FieldValue| -> Result<String, EditError> {
        match value {
            FieldValue::Text(s) => Ok(s.clone()),
            other => Err(mismatch(&format!("expected text, got {}", value_kind(other)))),
        }
    };
    let opt_text = |value: &FieldValue| -> Result<Option<String>, EditError> {
        match value {
            FieldValue::Text(s) => Ok(Some(s.clone())),
            FieldValue::Null => Ok(None),
            other => Err(mismatch(&format!(
                "expected text or null, got {}",
                value_kind(other)
            ))),
        }
    };
    let number = |value: &FieldValue| -> Result<f64, EditError> {
        match value {
            FieldValue::Number(n) => Ok(*n),
            other => Err(mismatch(&format!(
                "expected a number, got {}",
                value_kind(other)
            ))),
        }
    };
    let range = |value: &FieldValue| -> Result<TimeRange, EditError> {
        match value {
            FieldValue::Range(r) => Ok(*r),
            other => Err(mismatch(&format!(
                "expected a [start, end] range, got {}",
                value_kind(other)
            ))),
        }
    };

    let segments: Vec<&str> = path.split('/').collect();
    match segments.as_slice() {
        ["meta", "duration"] => parts.meta.duration = number(value)?,
        ["meta", "fps"] => {
            parts.meta.fps = match value {
                FieldValue::Number(n) => Some(*n),
                FieldValue::Null => None,
                other => {
                    return Err(mismatch(&format!(
                        "expected a number or null, got {}",
                        value_kind(other)
                    )))
                }
            }
        }
        ["global", field @ ("scene_description" | "global_style" | "global_audio")] => {
            let v = text(value)?;
            match *field {
                "scene_description" => parts.global.scene_description = v,
                "global_style" => parts.global.global_style = v,
                _ => parts.global.global_audio = v,
            }
        }
        ["references", id, rest @ ..] => {
            let entity_id: EntityId = id.parse().map_err(|_| invalid("not a valid entity id"))?;
            let entity = parts
                .references
                .iter_mut()
                .find(|r| r.id == entity_id)
                .ok_or_else(|| EditError::UnknownId { id: id.to_string() })?;
            match rest {
                ["semantic_description"] => entity.semantic_description = text(value)?,
                ["timestamp"] => entity.timestamp = number(value)?,
                ["appearance_anchor", "detail_description"] => {
                    entity.appearance_anchor.detail_description = text(value)?
                }
                ["appearance_anchor", "clothing"] => {
                    entity.appearance_anchor.clothing = opt_text(value)?
                }
                ["appearance_anchor", "accessories"] => {
                    entity.appearance_anchor.accessories = opt_text(value)?
                }
                ["appearance_anchor", "hairstyle"] => {
                    entity.appearance_anchor.hairstyle = opt_text(value)?
                }
                ["id"] | ["category"] => {
                    return Err(invalid("ids are persistent identities and cannot be reassigned"))
                }
                _ => return Err(invalid("no such editable field")),
            }
        }
        ["shots", id, rest @ ..] => {
            let shot_id: ShotId = id.parse().map_err(|_| invalid("not a valid shot id"))?;
            let shot = parts
                .shots
                .iter_mut()
                .find(|s| s.id == shot_id)
                .ok_or_else(|| EditError::UnknownId { id: id.to_string() })?;
            match rest {
                ["visual_description"] => {
                    let v = text(value)?;
                    if let Err(err) = extract_inline_timestamps(&v) {
                        return Err(mismatch(&err.to_string()));
                    }
                    shot.visual_description = v;
                }
                ["time_range"] => shot.time_range = range(value)?,
                ["camera", "movement"] => shot.camera.movement = opt_text(value)?,
                ["camera", "perspective"] => shot.camera.perspective = opt_text(value)?,
                ["camera", "scale"] => shot.camera.scale = opt_text(value)?,
                ["id"] => {
                    return Err(invalid("ids are persistent identities and cannot be reassigned"))
                }
                ["references_in_shot"] | ["active_events"] => {
                    return Err(invalid(
                        "link lists are edited through add/remove/rebind operations",
                    ))
                }
                _ => return Err(invalid("no such editable field")),
            }
        }
        ["events", id, rest @ ..] => {
            let event_id: EventId = id.parse().map_err(|_| invalid("not a valid event id"))?;
            let speaker_value = match rest {
                ["speaker"] => match value {
                    FieldValue::Text(s) => {
                        let speaker: EntityId =
                            s.parse().map_err(|_| mismatch("expected an entity id"))?;
                        if !parts.references.iter().any(|r| r.id == speaker) {
                            return Err(EditError::UnknownId { id: s.clone() });
                        }
                        Some(Some(speaker))
                    }
                    FieldValue::Null => Some(None),
                    other => {
                        return Err(mismatch(&format!(
                            "expected an entity id or null, got {}",
                            value_kind(other)
                        )))
                    }
                },
                _ => None,
            };
            let event = parts
                .events
                .iter_mut()
                .find(|e| e.id == event_id)
                .ok_or_else(|| EditError::UnknownId { id: id.to_string() })?;
            match rest {
                ["time_range"] => event.time_range = range(value)?,
                ["speaker"] => event.speaker = speaker_value.expect("resolved above"),
                ["line"] => event.line = opt_text(value)?,
                ["description"] => event.description = text(value)?,
                ["id"] | ["type"] => {
                    return Err(invalid("ids and types are fixed; add a new event instead"))
                }
                _ => return Err(invalid("no such editable field")),
            }
        }
        _ => return Err(invalid("no such editable field")),
    }
    Ok(())
}

fn value_kind(v: &FieldValue) -> &'static str {
    match v {
        FieldValue::Text(_) => "text",
        FieldValue::Number(_) => "a number",
        FieldValue::Range(_) => "a range",
        FieldValue::Null => "null",
    }
}

// ---------------------------------------------------------------------
// Canonical-document path diff
// ---------------------------------------------------------------------

/// Path-level diff between two canonical documents. Stream arrays are
/// keyed by record id; scalar arrays (time ranges, link lists) are leaves.
pub fn diff_documents(before: &str, after: &str) -> BTreeSet<String> {
    let a = crate::parser::json::parse_value(before).expect("canonical document parses");
    let b = crate::parser::json::parse_value(after).expect("canonical document parses");
    let mut out = BTreeSet::new();
    diff_roots(&a, &b, &mut out);
    out
}

/// Every leaf field path in a script's canonical document.
pub fn canonical_leaf_paths(script: &Script) -> Vec<String> {
    let text = serialize(script);
    let v = crate::parser::json::parse_value(&text).expect("canonical document parses");
    let mut out = Vec::new();
    collect_leaves(&v, "", &mut out);
    out
}

const STREAM_KEYS: [&str; 3] = ["references", "shots", "events"];

fn diff_roots(a: &JsonValue, b: &JsonValue, out: &mut BTreeSet<String>) {
    let (JsonValue::Object(af, _), JsonValue::Object(bf, _)) = (a, b) else {
        out.insert(String::new());
        return;
    };
    for key in union_keys(af, bf) {
        match (field(af, key), field(bf, key)) {
            (Some(av), Some(bv)) if STREAM_KEYS.contains(&key) => {
                diff_stream(key, av, bv, out);
            }
            (Some(av), Some(bv)) => diff_values(key, av, bv, out),
            (Some(_), None) | (None, Some(_)) => {
                out.insert(key.to_string());
            }
            (None, None) => unreachable!(),
        }
    }
}

fn diff_stream(stream: &str, a: &JsonValue, b: &JsonValue, out: &mut BTreeSet<String>) {
    let (JsonValue::Array(ai, _), JsonValue::Array(bi, _)) = (a, b) else {
        out.insert(stream.to_string());
        return;
    };
    let key_of = |v: &JsonValue, idx: usize| -> String {
        if let JsonValue::Object(fields, _) = v {
            if let Some(JsonValue::String(id, _)) = field(fields, "id") {
                return id.clone();
            }
        }
        format!("#{idx}")
    };
    let amap: Vec<(String, &JsonValue)> = ai
        .iter()
        .enumerate()
        .map(|(i, v)| (key_of(v, i), v))
        .collect();
    let bmap: Vec<(String, &JsonValue)> = bi
        .iter()
        .enumerate()
        .map(|(i, v)| (key_of(v, i), v))
        .collect();
    for (id, av) in &amap {
        match bmap.iter().find(|(bid, _)| bid == id) {
            Some((_, bv)) => diff_values(&format!("{stream}/{id}"), av, bv, out),
            None => {
                out.insert(format!("{stream}/{id}"));
            }
        }
    }
    for (id, _) in &bmap {
        if !amap.iter().any(|(aid, _)| aid == id) {
            out.insert(format!("{stream}/{id}"));
        }
    }
}

fn diff_values(path: &str, a: &JsonValue, b: &JsonValue, out: &mut BTreeSet<String>) {
    match (a, b) {
        (JsonValue::Object(af, _), JsonValue::Object(bf, _)) => {
            for key in union_keys(af, bf) {
                let sub = format!("{path}/{key}");
                match (field(af, key), field(bf, key)) {
                    (Some(av), Some(bv)) => diff_values(&sub, av, bv, out),
                    (Some(_), None) | (None, Some(_)) => {
                        out.insert(sub);
                    }
                    (None, None) => unreachable!(),
                }
            }
        }
        _ => {
            if !json_eq(a, b) {
                out.insert(path.to_string());
            }
        }
    }
}

fn collect_leaves(v: &JsonValue, path: &str, out: &mut Vec<String>) {
    match v {
        JsonValue::Object(fields, _) => {
            for f in fields {
                let sub = if path.is_empty() {
                    f.key.clone()
                } else {
                    format!("{path}/{}", f.key)
                };
                if path.is_empty() && STREAM_KEYS.contains(&f.key.as_str()) {
                    if let JsonValue::Array(items, _) = &f.value {
                        for (i, item) in items.iter().enumerate() {
                            let id = match item {
                                JsonValue::Object(rf, _) => match field(rf, "id") {
                                    Some(JsonValue::String(id, _)) => id.clone(),
                                    _ => format!("#{i}"),
                                },
                                _ => format!("#{i}"),
                            };
                            collect_leaves(item, &format!("{sub}/{id}"), out);
                        }
                        continue;
                    }
                }
                collect_leaves(&f.value, &sub, out);
            }
        }
        _ => out.push(path.to_string()),
    }
}

fn union_keys<'a>(a: &'a [JsonField], b: &'a [JsonField]) -> Vec<&'a str> {
    let mut keys: Vec<&str> = a.iter().map(|f| f.key.as_str()).collect();
    for f in b {
        if !keys.contains(&f.key.as_str()) {
            keys.push(f.key.as_str());
        }
    }
    keys
}

fn field<'a>(fields: &'a [JsonField], key: &str) -> Option<&'a JsonValue> {
    fields.iter().find(|f| f.key == key).map(|f| &f.value)
}

/// Structural equality ignoring spans.
fn json_eq(a: &JsonValue, b: &JsonValue) -> bool {
    match (a, b) {
        (JsonValue::Null(_), JsonValue::Null(_)) => true,
        (JsonValue::Bool(x, _), JsonValue::Bool(y, _)) => x == y,
        (JsonValue::Number(x, _), JsonValue::Number(y, _)) => x.total_cmp(y).is_eq(),
        (JsonValue::String(x, _), JsonValue::String(y, _)) => x == y,
        (JsonValue::Array(x, _), JsonValue::Array(y, _)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(a, b)| json_eq(a, b))
        }
        (JsonValue::Object(x, _), JsonValue::Object(y, _)) => {
            x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|(a, b)| a.key == b.key && json_eq(&a.value, &b.value))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------
// Edit scripts: one edit per line
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Error)]
#[error("edit script line {line}: {message}")]
pub struct EditScriptError {
    pub line: usize,
    pub message: String,
}

/// Parse the line-oriented edit-script format. Blank lines and lines
/// starting with `#` are ignored. Forms:
///
/// ```text
/// set <path> <json value>
/// add-entity <json record>
/// add-event <json record>
/// remove-entity <ENTITY_ID> [cascade]
/// remove-event <EVENT_ID> [cascade]
/// rebind-speaker <EVENT_ID> <ENTITY_ID>
/// retime-shot <SHOT_ID> <start> <end> [no-relink]
/// split-shot <SHOT_ID> <at>
/// merge-shots <FIRST_ID> <SECOND_ID>
/// ```
pub fn parse_edit_script(text: &str) -> Result<Vec<Edit>, EditScriptError> {
    let mut edits = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| EditScriptError { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (op, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed, ""));
        let rest = rest.trim();
        let edit = match op {
            "set" => {
                let (path, value_text) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| err("set needs a path and a value".to_string()))?;
                let value = parse_field_value(value_text.trim())
                    .map_err(|e| err(format!("bad value: {e}")))?;
                Edit::SetField {
                    path: path.to_string(),
                    value,
                }
            }
            "add-entity" => {
                Edit::AddEntity(crate::parser::parse_reference_record(rest).map_err(err)?)
            }
            "add-event" => Edit::AddEvent(crate::parser::parse_event_record(rest).map_err(err)?),
            "remove-entity" | "remove-event" => {
                let mut words = rest.split_whitespace();
                let id = words.next().ok_or_else(|| err("missing id".to_string()))?;
                let cascade = match words.next() {
                    None => false,
                    Some("cascade") => true,
                    Some(other) => return Err(err(format!("unexpected token `{other}`"))),
                };
                if op == "remove-entity" {
                    Edit::RemoveEntity {
                        id: id.parse().map_err(|e| err(format!("{e}")))?,
                        cascade,
                    }
                } else {
                    Edit::RemoveEvent {
                        id: id.parse().map_err(|e| err(format!("{e}")))?,
                        cascade,
                    }
                }
            }
            "rebind-speaker" => {
                let mut words = rest.split_whitespace();
                let event = words
                    .next()
                    .ok_or_else(|| err("missing event id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                let speaker = words
                    .next()
                    .ok_or_else(|| err("missing entity id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                Edit::RebindSpeaker { event, speaker }
            }
            "retime-shot" => {
                let mut words = rest.split_whitespace();
                let shot = words
                    .next()
                    .ok_or_else(|| err("missing shot id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                let start: f64 = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("missing or bad start time".to_string()))?;
                let end: f64 = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("missing or bad end time".to_string()))?;
                let relink = match words.next() {
                    None => true,
                    Some("no-relink") => false,
                    Some(other) => return Err(err(format!("unexpected token `{other}`"))),
                };
                Edit::RetimeShot {
                    shot,
                    range: TimeRange::new(start, end),
                    relink,
                }
            }
            "split-shot" => {
                let mut words = rest.split_whitespace();
                let shot = words
                    .next()
                    .ok_or_else(|| err("missing shot id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                let at: f64 = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("missing or bad cut time".to_string()))?;
                Edit::SplitShot { shot, at }
            }
            "merge-shots" => {
                let mut words = rest.split_whitespace();
                let first = words
                    .next()
                    .ok_or_else(|| err("missing first shot id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                let second = words
                    .next()
                    .ok_or_else(|| err("missing second shot id".to_string()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                Edit::MergeShots { first, second }
            }
            other => return Err(err(format!("unknown edit operation `{other}`"))),
        };
        edits.push(edit);
    }
    Ok(edits)
}

fn parse_field_value(text: &str) -> Result<FieldValue, String> {
    let v = crate::parser::json::parse_value(text).map_err(|d| d.message)?;
    match v {
        JsonValue::String(s, _) => Ok(FieldValue::Text(s)),
        JsonValue::Number(n, _) => Ok(FieldValue::Number(n)),
        JsonValue::Null(_) => Ok(FieldValue::Null),
        JsonValue::Array(items, _) => {
            let nums: Option<Vec<f64>> = items
                .iter()
                .map(|i| match i {
                    JsonValue::Number(n, _) => Some(*n),
                    _ => None,
                })
                .collect();
            match nums.as_deref() {
                Some([start, end]) => Ok(FieldValue::Range(TimeRange::new(*start, *end))),
                _ => Err("arrays must be a [start, end] pair of numbers".to_string()),
            }
        }
        other => Err(format!("unsupported value type {}", other.type_name())),
    }
}
