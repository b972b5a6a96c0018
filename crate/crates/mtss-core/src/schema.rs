//! Typed in-memory model of a multi-stream scene script and its structural
//! invariants, independent of any serialization.
//!
//! A [`Script`] carries four streams over a shared time axis: a reference
//! stream (persistent entities), a shot stream (time-bounded visual
//! segments), an event stream (time-bounded audio occurrences), and a
//! global context block. Cross-stream *links* (reference ids inside shots,
//! speaker bindings on events, active-event lists) are plain data here;
//! checking that they resolve is the lint engine's job (see `validator`).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tolerance for temporal overlap and containment checks, in seconds.
/// One millisecond absorbs rounding at the 3-printed-digit time precision.
pub const TIME_EPSILON: f64 = 0.001;

/// Times above this magnitude are beyond millisecond resolution in f64;
/// quantization is skipped for them.
const QUANTIZE_LIMIT: f64 = 4_294_967_296.0; // 2^32 seconds

/// Snap a time to millisecond resolution. Negative zero normalizes to zero;
/// non-finite and very large values pass through unchanged.
pub fn quantize_time(t: f64) -> f64 {
    if !t.is_finite() || t.abs() >= QUANTIZE_LIMIT {
        return t;
    }
    let n = (t * 1000.0).round();
    if n == 0.0 {
        0.0
    } else {
        n / 1000.0
    }
}

/// Names of the three element streams, used in error and diagnostic paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamName {
    References,
    Shots,
    Events,
}

impl fmt::Display for StreamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamName::References => "references",
            StreamName::Shots => "shots",
            StreamName::Events => "events",
        })
    }
}

/// Structural (type-level) invariant violations reported by [`Script::build`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("duplicate id `{id}` in {scope}")]
    DuplicateId { scope: String, id: String },
    #[error("malformed id `{id}`: {reason}")]
    BadIdPattern { id: String, reason: String },
    #[error("bad time range on `{id}`: [{start}, {end}) is not a valid non-empty range")]
    BadTimeRange { id: String, start: f64, end: f64 },
    #[error("field `{field}` is not allowed on `{id}`")]
    FieldOnWrongCategory { id: String, field: &'static str },
    #[error("missing required field `{path}`")]
    MissingRequiredField { path: String },
    #[error("id `{id}` prefix does not match category `{category}`")]
    CategoryMismatch { id: String, category: String },
    #[error("invalid value at `{path}`: {reason}")]
    InvalidValue { path: String, reason: String },
}

/// Category of a reference entity. The declaration order is the canonical
/// ordering of the reference stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityCategory {
    Person,
    Object,
    Animal,
    Scene,
}

impl EntityCategory {
    pub const ALL: [EntityCategory; 4] = [
        EntityCategory::Person,
        EntityCategory::Object,
        EntityCategory::Animal,
        EntityCategory::Scene,
    ];

    /// Lower-case name as it appears in documents.
    pub fn as_str(self) -> &'static str {
        match self {
            EntityCategory::Person => "person",
            EntityCategory::Object => "object",
            EntityCategory::Animal => "animal",
            EntityCategory::Scene => "scene",
        }
    }

    /// Upper-case id prefix (`PERSON`, `OBJECT`, ...).
    pub fn prefix(self) -> &'static str {
        match self {
            EntityCategory::Person => "PERSON",
            EntityCategory::Object => "OBJECT",
            EntityCategory::Animal => "ANIMAL",
            EntityCategory::Scene => "SCENE",
        }
    }

    pub fn parse_name(s: &str) -> Option<EntityCategory> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for EntityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parse the `_N` numeric suffix of an id: a positive integer with no
/// leading zeros.
fn parse_suffix(id: &str, digits: &str) -> Result<u32, StructureError> {
    let bad = |reason: &str| StructureError::BadIdPattern {
        id: id.to_string(),
        reason: reason.to_string(),
    };
    if digits.is_empty() {
        return Err(bad("missing numeric suffix"));
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad("suffix is not a number"));
    }
    if digits.starts_with('0') {
        return Err(bad("suffix has a leading zero or is zero"));
    }
    digits
        .parse::<u32>()
        .map_err(|_| bad("suffix is out of range"))
}

/// Identity of a reference entity, e.g. `PERSON_1` or `SCENE_2`.
///
/// Pattern validity (`PREFIX_N`, N a positive integer without leading
/// zeros) holds by construction. Ordering is (category, numeric suffix),
/// the canonical reference-stream order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    category: EntityCategory,
    number: u32,
}

impl EntityId {
    pub fn new(category: EntityCategory, number: u32) -> EntityId {
        assert!(number > 0, "entity id suffix must be positive");
        EntityId { category, number }
    }

    pub fn category(self) -> EntityCategory {
        self.category
    }

    pub fn number(self) -> u32 {
        self.number
    }
}

impl FromStr for EntityId {
    type Err = StructureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        for cat in EntityCategory::ALL {
            if let Some(rest) = s.strip_prefix(cat.prefix()) {
                if let Some(digits) = rest.strip_prefix('_') {
                    return Ok(EntityId {
                        category: cat,
                        number: parse_suffix(s, digits)?,
                    });
                }
            }
        }
        Err(StructureError::BadIdPattern {
            id: s.to_string(),
            reason: "expected PERSON_N, OBJECT_N, ANIMAL_N, or SCENE_N".to_string(),
        })
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.category.prefix(), self.number)
    }
}

macro_rules! numbered_id {
    ($name:ident, $prefix:literal, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(u32);

        impl $name {
            pub fn new(number: u32) -> $name {
                assert!(number > 0, "id suffix must be positive");
                $name(number)
            }

            pub fn number(self) -> u32 {
                self.0
            }
        }

        impl FromStr for $name {
            type Err = StructureError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let digits = s
                    .strip_prefix(concat!($prefix, "_"))
                    .ok_or_else(|| StructureError::BadIdPattern {
                        id: s.to_string(),
                        reason: concat!("expected ", $prefix, "_N").to_string(),
                    })?;
                Ok($name(parse_suffix(s, digits)?))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "_{}"), self.0)
            }
        }
    };
}

numbered_id!(ShotId, "SHOT", "Identity of a shot, e.g. `SHOT_1`.");
numbered_id!(EventId, "EVENT", "Identity of an audio event, e.g. `EVENT_1`.");

/// Media-level metadata: total duration and frame rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediaMeta {
    /// Total duration in seconds. Zero means unknown; containment checks
    /// against the duration are skipped in that case.
    pub duration: f64,
    /// Frames per second. Defaults to 25 when absent.
    pub fps: Option<f64>,
}

impl MediaMeta {
    pub const DEFAULT_FPS: f64 = 25.0;

    pub fn new(duration: f64) -> MediaMeta {
        MediaMeta {
            duration,
            fps: None,
        }
    }

    pub fn with_fps(duration: f64, fps: f64) -> MediaMeta {
        MediaMeta {
            duration,
            fps: Some(fps),
        }
    }

    /// The effective frame rate: the stored value or the default of 25.
    pub fn fps_or_default(&self) -> f64 {
        self.fps.unwrap_or(Self::DEFAULT_FPS)
    }
}

/// A half-open time interval `[start, end)` in seconds.
///
/// Adjacent shots ("end of A = start of B") are non-overlapping by
/// definition. Zero-length ranges are rejected at script construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeRange {
    pub start: f64,
    pub end: f64,
}

impl TimeRange {
    /// Construct a range with both endpoints snapped to millisecond
    /// resolution. Validity (`0 <= start < end`) is checked when the
    /// owning script is built.
    pub fn new(start: f64, end: f64) -> TimeRange {
        TimeRange {
            start: quantize_time(start),
            end: quantize_time(end),
        }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }

    fn is_valid(&self) -> bool {
        self.start >= 0.0 && self.start < self.end && self.end.is_finite()
    }
}

/// Visual identity anchor of a reference entity. The person-only fields
/// must be absent on other categories.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AppearanceAnchor {
    pub detail_description: String,
    pub clothing: Option<String>,
    pub accessories: Option<String>,
    pub hairstyle: Option<String>,
}

impl AppearanceAnchor {
    pub fn new(detail_description: impl Into<String>) -> AppearanceAnchor {
        AppearanceAnchor {
            detail_description: detail_description.into(),
            ..Default::default()
        }
    }
}

/// A persistent identity in the entity bank.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntity {
    pub id: EntityId,
    pub semantic_description: String,
    /// An anchor time in seconds. Stored uninterpreted and only
    /// range-checked against the media duration.
    pub timestamp: f64,
    pub appearance_anchor: AppearanceAnchor,
}

impl ReferenceEntity {
    pub fn category(&self) -> EntityCategory {
        self.id.category()
    }
}

/// Cinematic camera language for one shot. At least one of the three
/// fields must be present and non-empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Camera {
    pub movement: Option<String>,
    pub perspective: Option<String>,
    pub scale: Option<String>,
}

impl Camera {
    pub fn movement(m: impl Into<String>) -> Camera {
        Camera {
            movement: Some(m.into()),
            ..Default::default()
        }
    }

    fn is_empty(&self) -> bool {
        [&self.movement, &self.perspective, &self.scale]
            .iter()
            .all(|f| f.as_deref().map_or(true, str::is_empty))
    }
}

/// A time-bounded visual segment.
///
/// `visual_description` is annotated text: it may carry inline timestamp
/// markers (`[t=...]`) anchoring micro-actions to the global timeline, and
/// bare entity-id tokens (`PERSON_1 opens the door`) resolved by renderers.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub id: ShotId,
    pub time_range: TimeRange,
    pub visual_description: String,
    pub camera: Camera,
    pub references_in_shot: Vec<EntityId>,
    pub active_events: Vec<EventId>,
}

/// Kind of an audio event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventType {
    Dialogue,
    Sfx,
    Music,
}

impl EventType {
    pub const ALL: [EventType; 3] = [EventType::Dialogue, EventType::Sfx, EventType::Music];

    pub fn as_str(self) -> &'static str {
        match self {
            EventType::Dialogue => "dialogue",
            EventType::Sfx => "sfx",
            EventType::Music => "music",
        }
    }

    pub fn parse_name(s: &str) -> Option<EventType> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A time-bounded auditory occurrence.
///
/// Field rules by type: dialogue requires both `speaker` and `line`;
/// sfx may carry a `speaker` (the visible source entity) but no `line`;
/// music carries neither.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioEvent {
    pub id: EventId,
    pub event_type: EventType,
    pub time_range: TimeRange,
    pub speaker: Option<EntityId>,
    pub line: Option<String>,
    pub description: String,
}

/// Macro-level context shared by the whole script.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalContext {
    pub scene_description: String,
    pub global_style: String,
    pub global_audio: String,
}

impl GlobalContext {
    pub fn new(scene_description: impl Into<String>) -> GlobalContext {
        GlobalContext {
            scene_description: scene_description.into(),
            global_style: String::new(),
            global_audio: String::new(),
        }
    }
}

/// A full four-stream script document.
///
/// Immutable after construction; all mutation happens by producing new
/// values (see the `edits` module). [`Script::build`] checks every
/// type-level invariant; relational link checks live in `validator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    meta: MediaMeta,
    global: GlobalContext,
    references: Vec<ReferenceEntity>,
    shots: Vec<Shot>,
    events: Vec<AudioEvent>,
}

impl Script {
    /// Build a script, verifying every type-level invariant. Canonical
    /// ordering is *not* applied; see [`Script::canonicalize`].
    ///
    /// All times (duration, fps, timestamps, ranges) are snapped to
    /// millisecond resolution first.
    pub fn build(
        meta: MediaMeta,
        global: GlobalContext,
        references: Vec<ReferenceEntity>,
        shots: Vec<Shot>,
        events: Vec<AudioEvent>,
    ) -> Result<Script, StructureError> {
        let mut script = Script {
            meta,
            global,
            references,
            shots,
            events,
        };
        script.quantize();
        script.check()?;
        Ok(script)
    }

    /// Assemble a script without checking invariants.
    ///
    /// Intended for lint tooling and tests that need to represent broken
    /// scripts (the validator reports on whatever it is given). Everything
    /// else should use [`Script::build`].
    pub fn from_parts_unchecked(
        meta: MediaMeta,
        global: GlobalContext,
        references: Vec<ReferenceEntity>,
        shots: Vec<Shot>,
        events: Vec<AudioEvent>,
    ) -> Script {
        Script {
            meta,
            global,
            references,
            shots,
            events,
        }
    }

    pub fn meta(&self) -> &MediaMeta {
        &self.meta
    }

    pub fn global(&self) -> &GlobalContext {
        &self.global
    }

    pub fn references(&self) -> &[ReferenceEntity] {
        &self.references
    }

    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }

    pub fn events(&self) -> &[AudioEvent] {
        &self.events
    }

    pub fn reference(&self, id: EntityId) -> Option<&ReferenceEntity> {
        self.references.iter().find(|r| r.id == id)
    }

    pub fn shot(&self, id: ShotId) -> Option<&Shot> {
        self.shots.iter().find(|s| s.id == id)
    }

    pub fn event(&self, id: EventId) -> Option<&AudioEvent> {
        self.events.iter().find(|e| e.id == id)
    }

    /// Decompose into parts, for rebuilding an edited variant.
    pub fn into_parts(
        self,
    ) -> (
        MediaMeta,
        GlobalContext,
        Vec<ReferenceEntity>,
        Vec<Shot>,
        Vec<AudioEvent>,
    ) {
        (
            self.meta,
            self.global,
            self.references,
            self.shots,
            self.events,
        )
    }

    fn quantize(&mut self) {
        self.meta.duration = quantize_time(self.meta.duration);
        self.meta.fps = self.meta.fps.map(quantize_time);
        for r in &mut self.references {
            r.timestamp = quantize_time(r.timestamp);
        }
        for s in &mut self.shots {
            s.time_range = TimeRange::new(s.time_range.start, s.time_range.end);
        }
        for e in &mut self.events {
            e.time_range = TimeRange::new(e.time_range.start, e.time_range.end);
        }
    }

    fn check(&self) -> Result<(), StructureError> {
        let meta = &self.meta;
        if !meta.duration.is_finite() || meta.duration < 0.0 {
            return Err(StructureError::InvalidValue {
                path: "meta/duration".to_string(),
                reason: "duration must be a finite non-negative number".to_string(),
            });
        }
        if let Some(fps) = meta.fps {
            if !fps.is_finite() || fps <= 0.0 {
                return Err(StructureError::InvalidValue {
                    path: "meta/fps".to_string(),
                    reason: "fps must be a finite positive number".to_string(),
                });
            }
        }
        if self.global.scene_description.is_empty() {
            return Err(StructureError::MissingRequiredField {
                path: "global/scene_description".to_string(),
            });
        }

        check_unique(
            "references",
            self.references.iter().map(|r| r.id.to_string()),
        )?;
        check_unique("shots", self.shots.iter().map(|s| s.id.to_string()))?;
        check_unique("events", self.events.iter().map(|e| e.id.to_string()))?;

        for r in &self.references {
            self.check_reference(r)?;
        }
        for s in &self.shots {
            self.check_shot(s)?;
        }
        for e in &self.events {
            self.check_event(e)?;
        }
        Ok(())
    }

    fn check_reference(&self, r: &ReferenceEntity) -> Result<(), StructureError> {
        if r.semantic_description.is_empty() {
            return Err(StructureError::MissingRequiredField {
                path: format!("references/{}/semantic_description", r.id),
            });
        }
        if r.appearance_anchor.detail_description.is_empty() {
            return Err(StructureError::MissingRequiredField {
                path: format!("references/{}/appearance_anchor/detail_description", r.id),
            });
        }
        if r.category() != EntityCategory::Person {
            let anchor = &r.appearance_anchor;
            for (field, value) in [
                ("clothing", &anchor.clothing),
                ("accessories", &anchor.accessories),
                ("hairstyle", &anchor.hairstyle),
            ] {
                if value.is_some() {
                    return Err(StructureError::FieldOnWrongCategory {
                        id: r.id.to_string(),
                        field,
                    });
                }
            }
        }
        if !r.timestamp.is_finite() || r.timestamp < 0.0 {
            return Err(StructureError::InvalidValue {
                path: format!("references/{}/timestamp", r.id),
                reason: "timestamp must be a finite non-negative number".to_string(),
            });
        }
        if self.meta.duration > 0.0 && r.timestamp > self.meta.duration + TIME_EPSILON {
            return Err(StructureError::InvalidValue {
                path: format!("references/{}/timestamp", r.id),
                reason: format!(
                    "timestamp {} exceeds media duration {}",
                    r.timestamp, self.meta.duration
                ),
            });
        }
        Ok(())
    }

    fn check_shot(&self, s: &Shot) -> Result<(), StructureError> {
        if !s.time_range.is_valid() {
            return Err(StructureError::BadTimeRange {
                id: s.id.to_string(),
                start: s.time_range.start,
                end: s.time_range.end,
            });
        }
        if s.visual_description.is_empty() {
            return Err(StructureError::MissingRequiredField {
                path: format!("shots/{}/visual_description", s.id),
            });
        }
        if s.camera.is_empty() {
            return Err(StructureError::MissingRequiredField {
                path: format!("shots/{}/camera", s.id),
            });
        }
        check_unique(
            &format!("shots/{}/references_in_shot", s.id),
            s.references_in_shot.iter().map(|e| e.to_string()),
        )?;
        check_unique(
            &format!("shots/{}/active_events", s.id),
            s.active_events.iter().map(|e| e.to_string()),
        )?;
        Ok(())
    }

    fn check_event(&self, e: &AudioEvent) -> Result<(), StructureError> {
        if !e.time_range.is_valid() {
            return Err(StructureError::BadTimeRange {
                id: e.id.to_string(),
                start: e.time_range.start,
                end: e.time_range.end,
            });
        }
        match e.event_type {
            EventType::Dialogue => {
                if e.speaker.is_none() {
                    return Err(StructureError::MissingRequiredField {
                        path: format!("events/{}/speaker", e.id),
                    });
                }
                if e.line.is_none() {
                    return Err(StructureError::MissingRequiredField {
                        path: format!("events/{}/line", e.id),
                    });
                }
            }
            EventType::Sfx => {
                if e.line.is_some() {
                    return Err(StructureError::FieldOnWrongCategory {
                        id: e.id.to_string(),
                        field: "line",
                    });
                }
            }
            EventType::Music => {
                if e.speaker.is_some() {
                    return Err(StructureError::FieldOnWrongCategory {
                        id: e.id.to_string(),
                        field: "speaker",
                    });
                }
                if e.line.is_some() {
                    return Err(StructureError::FieldOnWrongCategory {
                        id: e.id.to_string(),
                        field: "line",
                    });
                }
            }
        }
        Ok(())
    }

    /// Produce the canonically ordered form of this script: shots and
    /// events sorted by (start, numeric suffix), references by (category,
    /// numeric suffix), and link lists sorted by numeric suffix.
    ///
    /// Idempotent, and preserves the multiset of elements in every stream.
    pub fn canonicalize(&self) -> Script {
        let mut out = self.clone();
        out.references
            .sort_by(|a, b| a.id.cmp(&b.id));
        out.shots.sort_by(|a, b| {
            a.time_range
                .start
                .total_cmp(&b.time_range.start)
                .then(a.id.cmp(&b.id))
        });
        out.events.sort_by(|a, b| {
            a.time_range
                .start
                .total_cmp(&b.time_range.start)
                .then(a.id.cmp(&b.id))
        });
        for s in &mut out.shots {
            s.references_in_shot
                .sort_by_key(|id| (id.number(), id.category()));
            s.active_events.sort();
        }
        out
    }

    /// True when already in canonical order.
    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }
}

fn check_unique(scope: &str, ids: impl Iterator<Item = String>) -> Result<(), StructureError> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            return Err(StructureError::DuplicateId {
                scope: scope.to_string(),
                id,
            });
        }
    }
    Ok(())
}
