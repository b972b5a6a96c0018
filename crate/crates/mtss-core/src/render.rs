//! Deterministic flattening of a script to two downstream text interfaces:
//! a monolithic narrative caption (the entangled single-paragraph form,
//! produced deliberately for comparison and export) and self-contained
//! per-shot prompt records.
//!
//! Renderers are pure functions of the canonicalized script and require a
//! script with no error-severity lint findings.

use std::collections::HashSet;

use thiserror::Error;

use crate::edits::{apply, canonical_leaf_paths, Edit, FieldValue};
use crate::parser::emit::JsonWriter;
use crate::parser::strip_markers_lossy;
use crate::schema::{
    AudioEvent, EntityId, EventId, EventType, ReferenceEntity, Script, Shot, ShotId, TimeRange,
};
use crate::timeline::TimelineIndex;
use crate::validator::validate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("script has {errors} error-severity lint finding(s); fix them before rendering")]
    ValidationErrorsPresent { errors: usize },
}

/// How entity mentions are expanded with their appearance detail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MentionStyle {
    /// First occurrence gets the appearance detail in parentheses;
    /// later mentions are bare names.
    FirstMention,
    /// Every occurrence carries the appearance detail (the redundant
    /// form monolithic captions are stuck with absent identity links).
    EveryMention,
    /// Names only, never the detail.
    NameOnly,
}

/// One per-shot prompt record: the self-contained conditioning unit for
/// shot-partitioned downstream consumers.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotPrompt {
    pub id: ShotId,
    pub time_range: TimeRange,
    pub prompt_text: String,
    /// Disagreements between stored active_events and temporal inference.
    pub warnings: Vec<String>,
}

/// Render the whole script as a single narrative paragraph: global scene
/// description, then each shot's stripped visual description with entity
/// ids replaced by display names and event text interleaved at event start
/// times, then the global style and audio lines.
///
/// With `expand_first_mention`, an entity's first occurrence is followed
/// by its appearance detail in parentheses and later mentions are bare.
pub fn render_monolithic(script: &Script, expand_first_mention: bool) -> Result<String, RenderError> {
    render_monolithic_with(
        script,
        if expand_first_mention {
            MentionStyle::FirstMention
        } else {
            MentionStyle::NameOnly
        },
    )
}

/// As [`render_monolithic`], with full control over mention expansion.
pub fn render_monolithic_with(script: &Script, style: MentionStyle) -> Result<String, RenderError> {
    check_clean(script)?;
    let s = script.canonicalize();
    let mut state = MentionState::new(&s, style);
    let mut parts: Vec<String> = Vec::new();
    parts.push(s.global().scene_description.clone());

    let mut rendered: HashSet<EventId> = HashSet::new();
    for shot in s.shots() {
        let mut events: Vec<&AudioEvent> = shot
            .active_events
            .iter()
            .filter_map(|id| s.event(*id))
            .filter(|e| !rendered.contains(&e.id))
            .collect();
        events.sort_by(|a, b| {
            a.time_range
                .start
                .total_cmp(&b.time_range.start)
                .then(a.id.cmp(&b.id))
        });
        rendered.extend(events.iter().map(|e| e.id));
        parts.push(shot_block(shot, &events, &mut state));
    }

    // events no shot lists still belong to the narrative
    let mut stray: Vec<&AudioEvent> = s
        .events()
        .iter()
        .filter(|e| !rendered.contains(&e.id))
        .collect();
    stray.sort_by(|a, b| {
        a.time_range
            .start
            .total_cmp(&b.time_range.start)
            .then(a.id.cmp(&b.id))
    });
    for ev in stray {
        parts.push(event_text(ev, &mut state));
    }

    if !s.global().global_style.is_empty() {
        parts.push(s.global().global_style.clone());
    }
    if !s.global().global_audio.is_empty() {
        parts.push(s.global().global_audio.clone());
    }
    Ok(join_nonempty(&parts))
}

/// Render one self-contained prompt per shot, in canonical shot order.
/// Entity mentions are expanded per prompt (no cross-prompt state); the
/// stored active_events list wins, with a warning attached when it
/// disagrees with temporal inference.
pub fn render_shot_prompts(script: &Script) -> Result<Vec<ShotPrompt>, RenderError> {
    check_clean(script)?;
    let s = script.canonicalize();
    let index = TimelineIndex::build(&s);
    let mut prompts = Vec::with_capacity(s.shots().len());
    for shot in s.shots() {
        let mut state = MentionState::new(&s, MentionStyle::FirstMention);
        let mut events: Vec<&AudioEvent> = shot
            .active_events
            .iter()
            .filter_map(|id| s.event(*id))
            .collect();
        events.sort_by(|a, b| {
            a.time_range
                .start
                .total_cmp(&b.time_range.start)
                .then(a.id.cmp(&b.id))
        });

        let mut parts = Vec::new();
        let (_, stripped) = strip_markers_lossy(&shot.visual_description);
        parts.push(state.expand_text(stripped.trim()));
        if let Some(camera) = camera_line(shot) {
            parts.push(camera);
        }
        for ev in &events {
            parts.push(event_text(ev, &mut state));
        }

        let mut warnings = Vec::new();
        let inferred = index.events_overlapping(shot.time_range);
        let stored: HashSet<EventId> = shot.active_events.iter().copied().collect();
        let missing: Vec<String> = inferred
            .iter()
            .filter(|id| !stored.contains(id))
            .map(|id| id.to_string())
            .collect();
        if !missing.is_empty() {
            warnings.push(format!("overlapping events not listed: {}", missing.join(", ")));
        }
        let extra: Vec<String> = shot
            .active_events
            .iter()
            .filter(|id| !inferred.contains(id))
            .map(|id| id.to_string())
            .collect();
        if !extra.is_empty() {
            warnings.push(format!("listed events without overlap: {}", extra.join(", ")));
        }

        prompts.push(ShotPrompt {
            id: shot.id,
            time_range: shot.time_range,
            prompt_text: join_nonempty(&parts),
            warnings,
        });
    }
    Ok(prompts)
}

/// Serialize shot prompts as an array of records in the document dialect.
pub fn shot_prompts_to_json(prompts: &[ShotPrompt]) -> String {
    let mut w = JsonWriter::new();
    w.open_array();
    for p in prompts {
        w.open_object();
        w.key("id");
        w.string(&p.id.to_string());
        w.key("time_range");
        w.time_range(p.time_range);
        w.key("prompt_text");
        w.string(&p.prompt_text);
        w.key("warnings");
        w.inline_strings(p.warnings.iter().cloned());
        w.close_object();
    }
    w.close_array();
    w.finish()
}

fn check_clean(script: &Script) -> Result<(), RenderError> {
    let errors = validate(script).error_count();
    if errors > 0 {
        return Err(RenderError::ValidationErrorsPresent { errors });
    }
    Ok(())
}

fn join_nonempty(parts: &[String]) -> String {
    parts
        .iter()
        .filter(|p| !p.is_empty())
        .cloned()
        .collect::<Vec<_>>()
        .join(" ")
}

fn camera_line(shot: &Shot) -> Option<String> {
    let parts: Vec<&str> = [&shot.camera.movement, &shot.camera.perspective, &shot.camera.scale]
        .into_iter()
        .filter_map(|f| f.as_deref())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        None
    } else {
        Some(format!("Camera: {}.", parts.join(", ")))
    }
}

/// Display name of an entity: the head phrase of its semantic description
/// (first clause, at most six words).
pub fn display_name(entity: &ReferenceEntity) -> String {
    let clause = entity
        .semantic_description
        .split(&[',', ';', '.', ':', '!', '?'][..])
        .find(|c| !c.trim().is_empty())
        .unwrap_or(&entity.semantic_description);
    let words: Vec<&str> = clause.split_whitespace().take(6).collect();
    if words.is_empty() {
        entity.id.to_string()
    } else {
        words.join(" ")
    }
}

struct MentionState<'a> {
    script: &'a Script,
    style: MentionStyle,
    expanded: HashSet<EntityId>,
}

impl<'a> MentionState<'a> {
    fn new(script: &'a Script, style: MentionStyle) -> MentionState<'a> {
        MentionState {
            script,
            style,
            expanded: HashSet::new(),
        }
    }

    /// Emit the display form of one entity mention, advancing the
    /// first-mention state.
    fn mention(&mut self, id: EntityId) -> Option<String> {
        let entity = self.script.reference(id)?;
        let name = display_name(entity);
        let with_detail = match self.style {
            MentionStyle::EveryMention => true,
            MentionStyle::NameOnly => false,
            MentionStyle::FirstMention => self.expanded.insert(id),
        };
        if with_detail {
            Some(format!(
                "{name} ({})",
                entity.appearance_anchor.detail_description
            ))
        } else {
            Some(name)
        }
    }

    /// Replace every bare entity-id token in `text` with its display form.
    /// Tokens that do not resolve to a bank entry stay verbatim.
    fn expand_text(&mut self, text: &str) -> String {
        let bytes = text.as_bytes();
        let mut out = String::with_capacity(text.len());
        let mut copied = 0usize;
        let mut i = 0usize;
        let is_word = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
        while i < bytes.len() {
            let boundary = i == 0 || !is_word(bytes[i - 1]);
            let matched = boundary
                .then(|| {
                    ["PERSON_", "OBJECT_", "ANIMAL_", "SCENE_"]
                        .iter()
                        .find(|p| bytes[i..].starts_with(p.as_bytes()))
                })
                .flatten();
            if let Some(prefix) = matched {
                let digits_start = i + prefix.len();
                let mut j = digits_start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let after_ok = j == bytes.len() || !is_word(bytes[j]);
                if j > digits_start && after_ok {
                    let token = &text[i..j];
                    if let Ok(id) = token.parse::<EntityId>() {
                        if let Some(rendered) = self.mention(id) {
                            out.push_str(&text[copied..i]);
                            out.push_str(&rendered);
                            copied = j;
                            i = j;
                            continue;
                        }
                    }
                }
            }
            i += 1;
        }
        out.push_str(&text[copied..]);
        out
    }
}

/// One shot's contribution to the monolithic paragraph: the expanded
/// description with event text inserted after the sentence whose nearest
/// preceding inline timestamp is at or before the event start; events
/// with no such anchor are appended at the shot end.
fn shot_block(shot: &Shot, events: &[&AudioEvent], state: &mut MentionState<'_>) -> String {
    let (markers, stripped) = strip_markers_lossy(&shot.visual_description);
    let chars: Vec<char> = stripped.chars().collect();

    let insertion_point = |t: f64| -> usize {
        let anchor = markers
            .iter()
            .filter(|m| m.time <= t)
            .map(|m| m.text_offset)
            .next_back();
        match anchor {
            None => chars.len(),
            Some(offset) => {
                let mut j = offset.min(chars.len());
                while j < chars.len() {
                    if matches!(chars[j], '.' | '!' | '?') {
                        return j + 1;
                    }
                    j += 1;
                }
                chars.len()
            }
        }
    };

    // (position, event) in output order; the event list is already sorted
    let placed: Vec<(usize, &AudioEvent)> =
        events.iter().map(|e| (insertion_point(e.time_range.start), *e)).collect();
    let mut cuts: Vec<usize> = placed.iter().map(|(p, _)| *p).collect();
    cuts.sort_unstable();
    cuts.dedup();

    let mut out_parts: Vec<String> = Vec::new();
    let mut prev = 0usize;
    for cut in cuts.iter().chain(std::iter::once(&chars.len())) {
        let cut = (*cut).min(chars.len());
        if cut > prev {
            let segment: String = chars[prev..cut].iter().collect();
            out_parts.push(state.expand_text(segment.trim()));
        }
        prev = cut;
        for (p, ev) in &placed {
            if (*p).min(chars.len()) == cut {
                out_parts.push(event_text(ev, state));
            }
        }
        if cut == chars.len() {
            break;
        }
    }
    join_nonempty(&out_parts)
}

fn event_text(ev: &AudioEvent, state: &mut MentionState<'_>) -> String {
    match ev.event_type {
        EventType::Dialogue => {
            let speaker = ev
                .speaker
                .and_then(|id| state.mention(id))
                .unwrap_or_else(|| "Someone".to_string());
            let line = ev.line.as_deref().unwrap_or("");
            format!("{speaker} says: \"{line}\"")
        }
        EventType::Sfx | EventType::Music => ev.description.clone(),
    }
}

// ---------------------------------------------------------------------
// Locality contrast: script paths vs monolithic character positions
// ---------------------------------------------------------------------

/// Figures contrasting edit footprints in the script (field paths) with
/// the monolithic rendering (character positions).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityStats {
    /// Leaf field paths in the canonical document.
    pub script_paths: usize,
    /// Characters in the first-mention monolithic rendering.
    pub monolithic_chars: usize,
    /// Characters when every mention carries the appearance detail.
    pub monolithic_chars_every_mention: usize,
    /// Per-shot probe results.
    pub probes: Vec<ShotProbe>,
    /// Mean of the probe ratios; `None` when no probe applied.
    pub mean_footprint_ratio: Option<f64>,
}

/// One description-rewrite probe: replace a shot's visual description and
/// measure how far the change spreads in each representation.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotProbe {
    pub shot: ShotId,
    pub changed_paths: usize,
    pub changed_chars: usize,
    /// (changed paths / total paths) / (changed chars / total chars).
    pub footprint_ratio: f64,
}

const PROBE_TEXT: &str = "The action continues.";

/// Measure edit locality by rewriting each shot's description in turn and
/// diffing both the canonical document (paths) and the monolithic text
/// (character window). A low ratio means the structured form localizes
/// changes that smear across the flat paragraph.
pub fn locality_contrast(script: &Script) -> Result<LocalityStats, RenderError> {
    let s = script.canonicalize();
    let base_paths = canonical_leaf_paths(&s).len();
    let base_text = render_monolithic(&s, true)?;
    let every_text = render_monolithic_with(&s, MentionStyle::EveryMention)?;

    let mut probes = Vec::new();
    for shot in s.shots() {
        if shot.visual_description == PROBE_TEXT {
            continue;
        }
        let edit = Edit::SetField {
            path: format!("shots/{}/visual_description", shot.id),
            value: FieldValue::Text(PROBE_TEXT.to_string()),
        };
        let Ok((edited, footprint)) = apply(&s, &edit) else {
            continue;
        };
        let edited_text = render_monolithic(&edited, true)?;
        let window = changed_window(&base_text, &edited_text);
        if window == 0 {
            continue;
        }
        let total_chars = base_text.chars().count().max(edited_text.chars().count());
        let path_fraction = footprint.changed_paths.len() as f64 / base_paths.max(1) as f64;
        let char_fraction = window as f64 / total_chars.max(1) as f64;
        probes.push(ShotProbe {
            shot: shot.id,
            changed_paths: footprint.changed_paths.len(),
            changed_chars: window,
            footprint_ratio: path_fraction / char_fraction,
        });
    }
    let mean = if probes.is_empty() {
        None
    } else {
        Some(probes.iter().map(|p| p.footprint_ratio).sum::<f64>() / probes.len() as f64)
    };
    Ok(LocalityStats {
        script_paths: base_paths,
        monolithic_chars: base_text.chars().count(),
        monolithic_chars_every_mention: every_text.chars().count(),
        probes,
        mean_footprint_ratio: mean,
    })
}

/// Width of the changed window between two texts: total length minus the
/// common prefix and suffix, in characters.
pub fn changed_window(before: &str, after: &str) -> usize {
    let a: Vec<char> = before.chars().collect();
    let b: Vec<char> = after.chars().collect();
    let prefix = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let suffix = a[prefix..]
        .iter()
        .rev()
        .zip(b[prefix..].iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    a.len().max(b.len()) - prefix - suffix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{
        AppearanceAnchor, Camera, EntityCategory, GlobalContext, MediaMeta,
    };

    fn entity(n: u32, semantic: &str, detail: &str) -> ReferenceEntity {
        ReferenceEntity {
            id: EntityId::new(EntityCategory::Person, n),
            semantic_description: semantic.to_string(),
            timestamp: 0.0,
            appearance_anchor: AppearanceAnchor::new(detail),
        }
    }

    fn fixture() -> Script {
        let p1 = entity(1, "a tall detective, weary and sharp", "gray coat, tired eyes");
        let p2 = entity(2, "a young clerk", "green apron");
        let shot1 = Shot {
            id: ShotId::new(1),
            time_range: TimeRange::new(0.0, 4.0),
            visual_description: "PERSON_1 enters the office. [t=2.0] PERSON_1 sits down.".to_string(),
            camera: Camera {
                movement: Some("slow push-in".to_string()),
                perspective: None,
                scale: Some("medium".to_string()),
            },
            references_in_shot: vec![EntityId::new(EntityCategory::Person, 1)],
            active_events: vec![EventId::new(1)],
        };
        let shot2 = Shot {
            id: ShotId::new(2),
            time_range: TimeRange::new(4.0, 8.0),
            visual_description: "PERSON_2 hands PERSON_1 a folder.".to_string(),
            camera: Camera::movement("static"),
            references_in_shot: vec![
                EntityId::new(EntityCategory::Person, 1),
                EntityId::new(EntityCategory::Person, 2),
            ],
            active_events: vec![EventId::new(2)],
        };
        let ev1 = AudioEvent {
            id: EventId::new(1),
            event_type: EventType::Dialogue,
            time_range: TimeRange::new(2.5, 3.5),
            speaker: Some(EntityId::new(EntityCategory::Person, 1)),
            line: "Long night.".to_string().into(),
            description: "muttered".to_string(),
        };
        let ev2 = AudioEvent {
            id: EventId::new(2),
            event_type: EventType::Dialogue,
            time_range: TimeRange::new(4.5, 6.0),
            speaker: Some(EntityId::new(EntityCategory::Person, 2)),
            line: "Here you go.".to_string().into(),
            description: "brisk".to_string(),
        };
        Script::build(
            MediaMeta::new(8.0),
            GlobalContext {
                scene_description: "A dim office at night.".to_string(),
                global_style: "noir, high contrast".to_string(),
                global_audio: "rain on the windows".to_string(),
            },
            vec![p1, p2],
            vec![shot1, shot2],
            vec![ev1, ev2],
        )
        .unwrap()
    }

    #[test]
    fn display_name_head_phrase() {
        let e = entity(1, "a tall detective in his fifties, weary", "x");
        assert_eq!(display_name(&e), "a tall detective in his fifties");
        let long = entity(3, "a very tall and weary municipal detective, beloved", "x");
        assert_eq!(display_name(&long), "a very tall and weary municipal");
        let short = entity(2, "a cat", "x");
        assert_eq!(display_name(&short), "a cat");
    }

    #[test]
    fn monolithic_composition_and_first_mention() {
        let text = render_monolithic(&fixture(), true).unwrap();
        assert!(text.starts_with("A dim office at night."));
        assert!(text.ends_with("rain on the windows"));
        // first mention expanded once, later mentions bare
        assert_eq!(text.matches("(gray coat, tired eyes)").count(), 1);
        assert!(text.contains("a tall detective"));
        // dialogue rendered with the speaker's head phrase
        assert!(text.contains("says: \"Long night.\""));
        assert!(text.contains("says: \"Here you go.\""));
        // interleaving: EVENT_1 starts after the [t=2.0] marker, so its
        // line lands after the second sentence, not before the first
        let line_pos = text.find("Long night").unwrap();
        let sits_pos = text.find("sits down.").unwrap();
        assert!(line_pos > sits_pos);
    }

    #[test]
    fn monolithic_no_expansion_when_off() {
        let text = render_monolithic(&fixture(), false).unwrap();
        assert!(!text.contains("(gray coat, tired eyes)"));
    }

    #[test]
    fn every_mention_is_strictly_longer() {
        let first = render_monolithic(&fixture(), true).unwrap();
        let every = render_monolithic_with(&fixture(), MentionStyle::EveryMention).unwrap();
        assert!(every.chars().count() > first.chars().count());
    }

    #[test]
    fn rendering_is_deterministic() {
        let s = fixture();
        assert_eq!(
            render_monolithic(&s, true).unwrap(),
            render_monolithic(&s, true).unwrap()
        );
        assert_eq!(
            shot_prompts_to_json(&render_shot_prompts(&s).unwrap()),
            shot_prompts_to_json(&render_shot_prompts(&s).unwrap())
        );
    }

    #[test]
    fn prompts_are_self_contained() {
        let prompts = render_shot_prompts(&fixture()).unwrap();
        assert_eq!(prompts.len(), 2);
        // the detective appears in both shots: the expansion recurs per prompt
        assert!(prompts[0].prompt_text.contains("(gray coat, tired eyes)"));
        assert!(prompts[1].prompt_text.contains("(gray coat, tired eyes)"));
        assert!(prompts[0].prompt_text.contains("Camera: slow push-in, medium."));
        assert!(prompts[0].warnings.is_empty());
    }

    #[test]
    fn spanning_event_appears_in_both_prompts() {
        let mut s = fixture();
        // retime EVENT_2 to span both shots and list it on both
        let (meta, global, refs, mut shots, mut events) = s.into_parts();
        events[1].time_range = TimeRange::new(3.0, 6.0);
        shots[0].active_events = vec![EventId::new(1), EventId::new(2)];
        s = Script::build(meta, global, refs, shots, events).unwrap();
        let prompts = render_shot_prompts(&s).unwrap();
        assert!(prompts[0].prompt_text.contains("Here you go."));
        assert!(prompts[1].prompt_text.contains("Here you go."));
    }

    #[test]
    fn prompt_without_entities_or_events() {
        let s = Script::build(
            MediaMeta::new(5.0),
            GlobalContext::new("A field."),
            vec![],
            vec![Shot {
                id: ShotId::new(1),
                time_range: TimeRange::new(0.0, 5.0),
                visual_description: "Wind moves the grass. [t=1.0]".to_string(),
                camera: Camera::movement("locked off"),
                references_in_shot: vec![],
                active_events: vec![],
            }],
            vec![],
        )
        .unwrap();
        let prompts = render_shot_prompts(&s).unwrap();
        assert_eq!(
            prompts[0].prompt_text,
            "Wind moves the grass. Camera: locked off."
        );
    }

    #[test]
    fn validation_errors_block_rendering() {
        let (meta, global, refs, mut shots, events) = fixture().into_parts();
        shots[0].references_in_shot = vec![EntityId::new(EntityCategory::Person, 9)];
        let s = Script::build(meta, global, refs, shots, events).unwrap();
        assert!(matches!(
            render_monolithic(&s, true),
            Err(RenderError::ValidationErrorsPresent { .. })
        ));
    }

    #[test]
    fn locality_contrast_reports_probes() {
        let stats = locality_contrast(&fixture()).unwrap();
        assert_eq!(stats.probes.len(), 2);
        assert!(stats.script_paths > 20);
        assert!(stats.monolithic_chars_every_mention > stats.monolithic_chars);
        for p in &stats.probes {
            assert_eq!(p.changed_paths, 1);
            assert!(p.footprint_ratio > 0.0);
        }
    }

    #[test]
    fn changed_window_basics() {
        assert_eq!(changed_window("abcdef", "abXdef"), 1);
        assert_eq!(changed_window("abcdef", "abcdef"), 0);
        assert_eq!(changed_window("abc", "abcde"), 2);
        assert_eq!(changed_window("aXXa", "aYa"), 2);
    }
}
