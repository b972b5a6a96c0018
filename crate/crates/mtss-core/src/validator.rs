//! Relational-grounding lint engine: checks identity links and temporal
//! links across streams and emits coded, severity-tagged diagnostics.
//!
//! Every rule in the catalog is evaluated on every run; all violations are
//! reported, not just the first. Findings are data, not failures. Overlap
//! is defined on half-open ranges with a 1 ms tolerance, so touching
//! shots never overlap and a boundary-touching event is not "active".

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::parser::extract_inline_timestamps;
use crate::schema::{EntityId, EventId, EventType, Script, TIME_EPSILON};
use crate::timeline::{overlap, TimelineIndex};

/// Severity of a lint finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Lint rule codes. `E` rules are errors, `W` rules warnings (a strict
/// mode that promotes warnings is a presentation concern, not a catalog
/// change).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleCode {
    /// references_in_shot id not in the reference stream.
    E001,
    /// Event speaker id not in the reference stream.
    E002,
    /// active_events id not in the event stream.
    E003,
    /// Shots overlap, or are not ordered by start in canonical form.
    E004,
    /// Inline timestamp outside the owning shot's time range.
    E005,
    /// A listed active event has zero temporal overlap with the shot.
    E006,
    /// A time range or timestamp exceeds the media duration.
    E007,
    /// Dialogue missing speaker or line; music carrying speaker or line.
    E008,
    /// Entity never referenced by any shot or event.
    W101,
    /// An event overlaps a shot but is absent from its active_events.
    W102,
    /// Speaker of an overlapping dialogue event not visible in the shot.
    W103,
    /// Gap between consecutive shots greater than the tolerance.
    W104,
    /// Sfx event with no source binding.
    W105,
}

impl RuleCode {
    pub const ALL: [RuleCode; 13] = [
        RuleCode::E001,
        RuleCode::E002,
        RuleCode::E003,
        RuleCode::E004,
        RuleCode::E005,
        RuleCode::E006,
        RuleCode::E007,
        RuleCode::E008,
        RuleCode::W101,
        RuleCode::W102,
        RuleCode::W103,
        RuleCode::W104,
        RuleCode::W105,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleCode::E001 => "E001",
            RuleCode::E002 => "E002",
            RuleCode::E003 => "E003",
            RuleCode::E004 => "E004",
            RuleCode::E005 => "E005",
            RuleCode::E006 => "E006",
            RuleCode::E007 => "E007",
            RuleCode::E008 => "E008",
            RuleCode::W101 => "W101",
            RuleCode::W102 => "W102",
            RuleCode::W103 => "W103",
            RuleCode::W104 => "W104",
            RuleCode::W105 => "W105",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            RuleCode::E001
            | RuleCode::E002
            | RuleCode::E003
            | RuleCode::E004
            | RuleCode::E005
            | RuleCode::E006
            | RuleCode::E007
            | RuleCode::E008 => Severity::Error,
            _ => Severity::Warning,
        }
    }

    /// Catalog text: what the rule checks.
    pub fn summary(self) -> &'static str {
        match self {
            RuleCode::E001 => {
                "a shot's references_in_shot names an id that is not in the reference stream"
            }
            RuleCode::E002 => "an event's speaker names an id that is not in the reference stream",
            RuleCode::E003 => "a shot's active_events names an id that is not in the event stream",
            RuleCode::E004 => "shots overlap, or are not ordered by start in canonical form",
            RuleCode::E005 => {
                "an inline timestamp in a shot's visual_description falls outside that shot's time range"
            }
            RuleCode::E006 => {
                "an event listed in a shot's active_events has zero temporal overlap with the shot"
            }
            RuleCode::E007 => {
                "a time range or timestamp exceeds the media duration (when the duration is known)"
            }
            RuleCode::E008 => {
                "a dialogue event is missing its speaker or line, or a music event carries one"
            }
            RuleCode::W101 => "an entity is never referenced by any shot or event",
            RuleCode::W102 => {
                "an event overlaps a shot in time but is absent from that shot's active_events"
            }
            RuleCode::W103 => {
                "the speaker of a dialogue event overlapping a shot is not in that shot's references_in_shot"
            }
            RuleCode::W104 => "the gap between consecutive shots exceeds the tolerance",
            RuleCode::W105 => "an sfx event has no source binding",
        }
    }

    /// Why the rule exists: the discipline it enforces.
    pub fn rationale(self) -> &'static str {
        match self {
            RuleCode::E001 | RuleCode::E002 => {
                "streams cite persistent reference ids instead of repeating descriptions; a dangling id breaks identity grounding"
            }
            RuleCode::E003 => "active_events links a shot to concurrent auditory occurrences",
            RuleCode::E004 => "the shot stream is a sequence of cinematic segments on one time axis",
            RuleCode::E005 => "inline timestamps anchor micro-actions to the global timeline",
            RuleCode::E006 | RuleCode::W102 => {
                "an active event must actually be concurrent with the shot that lists it"
            }
            RuleCode::E007 => "times must stay on the media's time axis",
            RuleCode::E008 => "dialogue carries verbatim text from a bound speaker; music carries neither",
            RuleCode::W101 => "the entity bank holds subjects integral to the plot; an unused entity suggests drift",
            RuleCode::W103 => {
                "sounds couple to visible subjects; off-screen speech exists, hence a warning"
            }
            RuleCode::W104 => "a coverage hint: the shot sequence left part of the timeline undescribed",
            RuleCode::W105 => "sound effects should bind to a visible source when one exists",
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown rule code `{0}`")]
pub struct UnknownRuleCode(pub String);

/// Look up a rule's catalog entry by code string.
pub fn explain_rule(code: &str) -> Result<RuleCode, UnknownRuleCode> {
    RuleCode::ALL
        .into_iter()
        .find(|r| r.as_str() == code)
        .ok_or_else(|| UnknownRuleCode(code.to_string()))
}

/// One lint finding.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: RuleCode,
    pub severity: Severity,
    /// Field path of the construct at fault, e.g. `shots/SHOT_2/references_in_shot`.
    pub subject: String,
    pub message: String,
    /// Ids involved besides the subject.
    pub related: Vec<String>,
}

impl Diagnostic {
    fn new(code: RuleCode, subject: String, message: String, related: Vec<String>) -> Diagnostic {
        Diagnostic {
            code,
            severity: code.severity(),
            subject,
            message,
            related,
        }
    }

    /// One-line machine form: `code<TAB>severity<TAB>path<TAB>message`.
    pub fn machine_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.code, self.severity, self.subject, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.subject, self.message
        )
    }
}

/// The lint engine's output: deterministic, complete, ordered by
/// (subject path, code, message).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticSet {
    items: Vec<Diagnostic>,
}

impl DiagnosticSet {
    fn from_items(mut items: Vec<Diagnostic>) -> DiagnosticSet {
        items.sort_by(|a, b| {
            a.subject
                .cmp(&b.subject)
                .then(a.code.cmp(&b.code))
                .then(a.message.cmp(&b.message))
        });
        DiagnosticSet { items }
    }

    pub fn items(&self) -> &[Diagnostic] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn error_count(&self) -> usize {
        self.items
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .count()
    }

    pub fn warning_count(&self) -> usize {
        self.items
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count()
    }

    pub fn has_code(&self, code: RuleCode) -> bool {
        self.items.iter().any(|d| d.code == code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter()
    }

    /// Findings present here but not in `before` (matched on code,
    /// subject, and message).
    pub fn delta_from(&self, before: &DiagnosticSet) -> DiagnosticSet {
        let old: HashSet<(&RuleCode, &str, &str)> = before
            .items
            .iter()
            .map(|d| (&d.code, d.subject.as_str(), d.message.as_str()))
            .collect();
        DiagnosticSet {
            items: self
                .items
                .iter()
                .filter(|d| !old.contains(&(&d.code, d.subject.as_str(), d.message.as_str())))
                .cloned()
                .collect(),
        }
    }
}

impl<'a> IntoIterator for &'a DiagnosticSet {
    type Item = &'a Diagnostic;
    type IntoIter = std::slice::Iter<'a, Diagnostic>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Run every catalog rule over a script.
pub fn validate(script: &Script) -> DiagnosticSet {
    let mut out = Vec::new();
    let index = TimelineIndex::build(script);

    let entity_ids: HashSet<EntityId> = script.references().iter().map(|r| r.id).collect();
    let event_ids: HashSet<EventId> = script.events().iter().map(|e| e.id).collect();
    let event_by_id: HashMap<EventId, &crate::schema::AudioEvent> =
        script.events().iter().map(|e| (e.id, e)).collect();
    let duration = script.meta().duration;

    // E001: dangling references_in_shot
    for shot in script.shots() {
        for id in &shot.references_in_shot {
            if !entity_ids.contains(id) {
                out.push(Diagnostic::new(
                    RuleCode::E001,
                    format!("shots/{}/references_in_shot", shot.id),
                    format!("references `{id}` which is not in the reference stream"),
                    vec![id.to_string()],
                ));
            }
        }
    }

    // E002: dangling speaker
    for ev in script.events() {
        if let Some(speaker) = ev.speaker {
            if !entity_ids.contains(&speaker) {
                out.push(Diagnostic::new(
                    RuleCode::E002,
                    format!("events/{}/speaker", ev.id),
                    format!("speaker `{speaker}` is not in the reference stream"),
                    vec![speaker.to_string()],
                ));
            }
        }
    }

    // E003: dangling active_events
    for shot in script.shots() {
        for id in &shot.active_events {
            if !event_ids.contains(id) {
                out.push(Diagnostic::new(
                    RuleCode::E003,
                    format!("shots/{}/active_events", shot.id),
                    format!("lists `{id}` which is not in the event stream"),
                    vec![id.to_string()],
                ));
            }
        }
    }

    // E004: overlapping shots, and stored order deviating from canonical
    let shots = script.shots();
    for i in 0..shots.len() {
        for j in (i + 1)..shots.len() {
            let (a, b) = (&shots[i], &shots[j]);
            if overlap(a.time_range, b.time_range).length > TIME_EPSILON {
                let (first, second) = if (a.time_range.start, a.id) <= (b.time_range.start, b.id) {
                    (a, b)
                } else {
                    (b, a)
                };
                out.push(Diagnostic::new(
                    RuleCode::E004,
                    format!("shots/{}/time_range", second.id),
                    format!("overlaps shot `{}`", first.id),
                    vec![first.id.to_string()],
                ));
            }
        }
    }
    for pair in shots.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let key = |s: &crate::schema::Shot| (s.time_range.start, s.id);
        if key(b) < key(a) {
            out.push(Diagnostic::new(
                RuleCode::E004,
                format!("shots/{}/time_range", b.id),
                format!("out of canonical order: starts before preceding shot `{}`", a.id),
                vec![a.id.to_string()],
            ));
        }
    }

    // E005: inline timestamps outside the shot range
    for shot in script.shots() {
        match extract_inline_timestamps(&shot.visual_description) {
            Ok((markers, _)) => {
                for m in markers {
                    let r = shot.time_range;
                    if m.time < r.start - TIME_EPSILON || m.time > r.end + TIME_EPSILON {
                        out.push(Diagnostic::new(
                            RuleCode::E005,
                            format!("shots/{}/visual_description", shot.id),
                            format!(
                                "inline timestamp {} falls outside the shot's time range [{}, {})",
                                m.raw, r.start, r.end
                            ),
                            vec![],
                        ));
                    }
                }
            }
            Err(err) => {
                // parse would have rejected this; surface it as the
                // inline-timestamp rule so in-memory scripts get covered too
                out.push(Diagnostic::new(
                    RuleCode::E005,
                    format!("shots/{}/visual_description", shot.id),
                    err.to_string(),
                    vec![],
                ));
            }
        }
    }

    // E006: listed event with zero overlap
    for shot in script.shots() {
        for id in &shot.active_events {
            if let Some(ev) = event_by_id.get(id) {
                if overlap(shot.time_range, ev.time_range).length <= TIME_EPSILON {
                    out.push(Diagnostic::new(
                        RuleCode::E006,
                        format!("shots/{}/active_events", shot.id),
                        format!("`{id}` has zero temporal overlap with this shot"),
                        vec![id.to_string()],
                    ));
                }
            }
        }
    }

    // E007: times beyond the media duration
    if duration > 0.0 {
        let limit = duration + TIME_EPSILON;
        for shot in script.shots() {
            if shot.time_range.end > limit {
                out.push(Diagnostic::new(
                    RuleCode::E007,
                    format!("shots/{}/time_range", shot.id),
                    format!("ends at {} beyond the media duration {duration}", shot.time_range.end),
                    vec![],
                ));
            }
        }
        for ev in script.events() {
            if ev.time_range.end > limit {
                out.push(Diagnostic::new(
                    RuleCode::E007,
                    format!("events/{}/time_range", ev.id),
                    format!("ends at {} beyond the media duration {duration}", ev.time_range.end),
                    vec![],
                ));
            }
        }
        for r in script.references() {
            if r.timestamp > limit {
                out.push(Diagnostic::new(
                    RuleCode::E007,
                    format!("references/{}/timestamp", r.id),
                    format!("timestamp {} beyond the media duration {duration}", r.timestamp),
                    vec![],
                ));
            }
        }
    }

    // E008: event-type field rules (re-checked here so lint tooling can
    // report on scripts assembled outside the checked constructor)
    for ev in script.events() {
        match ev.event_type {
            EventType::Dialogue => {
                if ev.speaker.is_none() {
                    out.push(Diagnostic::new(
                        RuleCode::E008,
                        format!("events/{}/speaker", ev.id),
                        "dialogue event is missing its speaker".to_string(),
                        vec![],
                    ));
                }
                if ev.line.is_none() {
                    out.push(Diagnostic::new(
                        RuleCode::E008,
                        format!("events/{}/line", ev.id),
                        "dialogue event is missing its line".to_string(),
                        vec![],
                    ));
                }
            }
            EventType::Music => {
                if ev.speaker.is_some() {
                    out.push(Diagnostic::new(
                        RuleCode::E008,
                        format!("events/{}/speaker", ev.id),
                        "music event must not carry a speaker".to_string(),
                        vec![],
                    ));
                }
                if ev.line.is_some() {
                    out.push(Diagnostic::new(
                        RuleCode::E008,
                        format!("events/{}/line", ev.id),
                        "music event must not carry a line".to_string(),
                        vec![],
                    ));
                }
            }
            EventType::Sfx => {
                if ev.line.is_some() {
                    out.push(Diagnostic::new(
                        RuleCode::E008,
                        format!("events/{}/line", ev.id),
                        "sfx event must not carry a line".to_string(),
                        vec![],
                    ));
                }
            }
        }
    }

    // W101: unreferenced entities
    let mut referenced: HashSet<EntityId> = HashSet::new();
    for shot in script.shots() {
        referenced.extend(shot.references_in_shot.iter().copied());
    }
    for ev in script.events() {
        if let Some(s) = ev.speaker {
            referenced.insert(s);
        }
    }
    for r in script.references() {
        if !referenced.contains(&r.id) {
            out.push(Diagnostic::new(
                RuleCode::W101,
                format!("references/{}", r.id),
                "entity is never referenced by any shot or event".to_string(),
                vec![],
            ));
        }
    }

    // W102: overlapping event absent from active_events
    // W103: overlapping dialogue speaker not visible in the shot
    for shot in script.shots() {
        let listed: HashSet<EventId> = shot.active_events.iter().copied().collect();
        let overlapping = index.events_overlapping(shot.time_range);
        for id in overlapping {
            if !listed.contains(&id) {
                out.push(Diagnostic::new(
                    RuleCode::W102,
                    format!("shots/{}/active_events", shot.id),
                    format!("event `{id}` overlaps this shot but is not listed"),
                    vec![id.to_string()],
                ));
            }
            let ev = event_by_id[&id];
            if ev.event_type == EventType::Dialogue {
                if let Some(speaker) = ev.speaker {
                    if !shot.references_in_shot.contains(&speaker) {
                        out.push(Diagnostic::new(
                            RuleCode::W103,
                            format!("shots/{}/references_in_shot", shot.id),
                            format!(
                                "speaker `{speaker}` of overlapping dialogue `{id}` is not visible in this shot"
                            ),
                            vec![speaker.to_string(), id.to_string()],
                        ));
                    }
                }
            }
        }
    }

    // W104: gaps between consecutive shots (in canonical time order)
    let mut ordered: Vec<&crate::schema::Shot> = script.shots().iter().collect();
    ordered.sort_by(|a, b| {
        a.time_range
            .start
            .total_cmp(&b.time_range.start)
            .then(a.id.cmp(&b.id))
    });
    for pair in ordered.windows(2) {
        let gap = pair[1].time_range.start - pair[0].time_range.end;
        if gap > TIME_EPSILON {
            out.push(Diagnostic::new(
                RuleCode::W104,
                format!("shots/{}/time_range", pair[1].id),
                format!(
                    "gap of {gap:.3}s after shot `{}` leaves the timeline uncovered",
                    pair[0].id
                ),
                vec![pair[0].id.to_string()],
            ));
        }
    }

    // W105: unbound sfx
    for ev in script.events() {
        if ev.event_type == EventType::Sfx && ev.speaker.is_none() {
            out.push(Diagnostic::new(
                RuleCode::W105,
                format!("events/{}/speaker", ev.id),
                "sfx event has no source binding".to_string(),
                vec![],
            ));
        }
    }

    DiagnosticSet::from_items(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{
        AppearanceAnchor, AudioEvent, Camera, EntityCategory, GlobalContext, MediaMeta,
        ReferenceEntity, Shot, ShotId, TimeRange,
    };

    fn person(n: u32) -> ReferenceEntity {
        ReferenceEntity {
            id: EntityId::new(EntityCategory::Person, n),
            semantic_description: format!("person {n}"),
            timestamp: 0.0,
            appearance_anchor: AppearanceAnchor::new("tall"),
        }
    }

    fn shot(n: u32, start: f64, end: f64) -> Shot {
        Shot {
            id: ShotId::new(n),
            time_range: TimeRange::new(start, end),
            visual_description: "Something happens.".to_string(),
            camera: Camera::movement("static"),
            references_in_shot: vec![],
            active_events: vec![],
        }
    }

    fn dialogue(n: u32, start: f64, end: f64, speaker: u32) -> AudioEvent {
        AudioEvent {
            id: EventId::new(n),
            event_type: EventType::Dialogue,
            time_range: TimeRange::new(start, end),
            speaker: Some(EntityId::new(EntityCategory::Person, speaker)),
            line: Some("Hello.".to_string()),
            description: "calm".to_string(),
        }
    }

    #[test]
    fn dangling_reference_is_exactly_one_e001() {
        let mut sh = shot(1, 0.0, 4.0);
        sh.references_in_shot = vec![EntityId::new(EntityCategory::Person, 2)];
        let s = Script::build(
            MediaMeta::new(4.0),
            GlobalContext::new("A room."),
            vec![person(1)],
            vec![sh],
            vec![],
        )
        .unwrap();
        let diags = validate(&s);
        let e001: Vec<_> = diags.iter().filter(|d| d.code == RuleCode::E001).collect();
        assert_eq!(e001.len(), 1);
        assert!(e001[0].message.contains("PERSON_2"));
        assert_eq!(e001[0].related, vec!["PERSON_2".to_string()]);
    }

    #[test]
    fn zero_overlap_listed_event_is_e006() {
        // hand oracle: max(0, min(4,6) - max(0,5)) = max(0, 4 - 5) = 0
        let mut sh = shot(1, 0.0, 4.0);
        sh.active_events = vec![EventId::new(1)];
        let ev = AudioEvent {
            id: EventId::new(1),
            event_type: EventType::Music,
            time_range: TimeRange::new(5.0, 6.0),
            speaker: None,
            line: None,
            description: "m".to_string(),
        };
        let s = Script::build(
            MediaMeta::new(6.0),
            GlobalContext::new("A room."),
            vec![],
            vec![sh],
            vec![ev],
        )
        .unwrap();
        let diags = validate(&s);
        assert!(diags.has_code(RuleCode::E006));
    }

    #[test]
    fn unlisted_overlapping_dialogue_is_w102() {
        let mut sh = shot(1, 0.0, 4.0);
        sh.references_in_shot = vec![EntityId::new(EntityCategory::Person, 1)];
        let s = Script::build(
            MediaMeta::new(4.0),
            GlobalContext::new("A room."),
            vec![person(1)],
            vec![sh],
            vec![dialogue(1, 1.0, 3.0, 1)],
        )
        .unwrap();
        let diags = validate(&s);
        assert!(diags.has_code(RuleCode::W102));
        assert!(!diags.has_code(RuleCode::E006));
    }

    #[test]
    fn clean_two_shot_two_event_fixture_is_empty() {
        let mut sh1 = shot(1, 0.0, 4.0);
        sh1.references_in_shot = vec![EntityId::new(EntityCategory::Person, 1)];
        sh1.active_events = vec![EventId::new(1)];
        let mut sh2 = shot(2, 4.0, 8.0);
        sh2.references_in_shot = vec![
            EntityId::new(EntityCategory::Person, 1),
            EntityId::new(EntityCategory::Person, 2),
        ];
        sh2.active_events = vec![EventId::new(2)];
        let s = Script::build(
            MediaMeta::new(8.0),
            GlobalContext::new("A room."),
            vec![person(1), person(2)],
            vec![sh1, sh2],
            vec![dialogue(1, 1.0, 3.0, 1), dialogue(2, 4.5, 6.0, 2)],
        )
        .unwrap();
        let diags = validate(&s);
        assert!(diags.is_empty(), "expected clean, got: {:?}", diags.items());
    }

    #[test]
    fn retiming_removes_e006_monotonically() {
        let mut sh = shot(1, 0.0, 4.0);
        sh.active_events = vec![EventId::new(1)];
        let make = |ev_start: f64, ev_end: f64| {
            Script::build(
                MediaMeta::new(10.0),
                GlobalContext::new("A room."),
                vec![],
                vec![sh.clone()],
                vec![AudioEvent {
                    id: EventId::new(1),
                    event_type: EventType::Music,
                    time_range: TimeRange::new(ev_start, ev_end),
                    speaker: None,
                    line: None,
                    description: "m".to_string(),
                }],
            )
            .unwrap()
        };
        assert!(validate(&make(5.0, 6.0)).has_code(RuleCode::E006));
        assert!(!validate(&make(3.0, 6.0)).has_code(RuleCode::E006));
    }

    #[test]
    fn explain_rule_lookup() {
        assert_eq!(explain_rule("E001").unwrap(), RuleCode::E001);
        assert_eq!(explain_rule("E001").unwrap().severity(), Severity::Error);
        assert_eq!(explain_rule("W102").unwrap().severity(), Severity::Warning);
        assert_eq!(
            explain_rule("E999"),
            Err(UnknownRuleCode("E999".to_string()))
        );
    }

    #[test]
    fn validate_is_deterministic() {
        let mut sh = shot(1, 0.0, 4.0);
        sh.references_in_shot = vec![EntityId::new(EntityCategory::Person, 9)];
        sh.active_events = vec![EventId::new(7)];
        let s = Script::build(
            MediaMeta::new(2.0),
            GlobalContext::new("A room."),
            vec![person(1)],
            vec![sh],
            vec![dialogue(1, 0.5, 1.0, 3)],
        )
        .unwrap();
        assert_eq!(validate(&s), validate(&s));
    }
}
