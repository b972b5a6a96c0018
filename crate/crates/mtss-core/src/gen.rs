//! Seeded random script generation, for fixture corpora, property tests,
//! and benchmarks.
//!
//! [`clean_script`] produces scripts that lint clean (no findings at all):
//! shots tile the duration, every entity is referenced, every overlapping
//! event is listed, speakers are visible in the shots their dialogue
//! overlaps, and sfx carry source bindings. [`valid_script`] only promises
//! structural validity and freely produces dangling links, gaps, and
//! overlaps for exercising the lint engine and the timeline oracle.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::schema::{
    quantize_time, AppearanceAnchor, AudioEvent, Camera, EntityCategory, EntityId, EventId,
    EventType, GlobalContext, MediaMeta, ReferenceEntity, Script, Shot, ShotId, TimeRange,
};
use crate::timeline::{boundaries_or_empty, infer_active_events};

/// Deterministic generator for a seed.
pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub max_entities: usize,
    pub max_shots: usize,
    pub max_events: usize,
    /// Chance that a shot description carries inline timestamp markers.
    pub marker_chance: f64,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            max_entities: 4,
            max_shots: 6,
            max_events: 6,
            marker_chance: 0.5,
        }
    }
}

impl GenParams {
    /// Streams capped for exhaustive-assignment comparisons.
    pub fn small() -> GenParams {
        GenParams {
            max_entities: 4,
            max_shots: 5,
            max_events: 5,
            marker_chance: 0.3,
        }
    }

    /// Streams up to the timeline-oracle scale.
    pub fn large() -> GenParams {
        GenParams {
            max_entities: 10,
            max_shots: 50,
            max_events: 50,
            marker_chance: 0.3,
        }
    }
}

const ADJECTIVES: [&str; 10] = [
    "quiet", "dim", "bright", "narrow", "dusty", "crowded", "empty", "wet", "cold", "warm",
];
const NOUNS: [&str; 12] = [
    "door", "window", "table", "street", "lamp", "river", "coat", "folder", "camera", "garden",
    "stairwell", "counter",
];
const VERBS: [&str; 10] = [
    "opens", "closes", "watches", "crosses", "lifts", "examines", "follows", "studies", "passes",
    "adjusts",
];
const MOVEMENTS: [&str; 5] = ["static", "slow pan left", "handheld", "dolly in", "crane up"];
const PERSPECTIVES: [&str; 4] = ["eye level", "over-the-shoulder", "low angle", "high angle"];
const SCALES: [&str; 4] = ["wide", "medium", "close-up", "extreme close-up"];
const LINES: [&str; 8] = [
    "We should go.",
    "Did you hear that?",
    "It was here yesterday.",
    "Hold on a moment.",
    "This changes everything.",
    "I told you already.",
    "Look over there.",
    "Not tonight.",
];

fn pick<'a, R: Rng>(rng: &mut R, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn phrase<R: Rng>(rng: &mut R, words: usize) -> String {
    let mut parts = Vec::with_capacity(words);
    for i in 0..words {
        parts.push(match i % 3 {
            0 => pick(rng, &ADJECTIVES),
            1 => pick(rng, &NOUNS),
            _ => pick(rng, &VERBS),
        });
    }
    parts.join(" ")
}

fn sentence<R: Rng>(rng: &mut R) -> String {
    format!(
        "The {} {} {} the {}.",
        pick(rng, &ADJECTIVES),
        pick(rng, &NOUNS),
        pick(rng, &VERBS),
        pick(rng, &NOUNS)
    )
}

fn camera<R: Rng>(rng: &mut R) -> Camera {
    Camera {
        movement: Some(pick(rng, &MOVEMENTS).to_string()),
        perspective: rng
            .gen_bool(0.6)
            .then(|| pick(rng, &PERSPECTIVES).to_string()),
        scale: rng.gen_bool(0.6).then(|| pick(rng, &SCALES).to_string()),
    }
}

fn entity<R: Rng>(rng: &mut R, category: EntityCategory, number: u32) -> ReferenceEntity {
    let anchor = AppearanceAnchor {
        detail_description: phrase(rng, 4),
        clothing: (category == EntityCategory::Person && rng.gen_bool(0.5))
            .then(|| format!("{} {}", pick(rng, &ADJECTIVES), pick(rng, &NOUNS))),
        accessories: (category == EntityCategory::Person && rng.gen_bool(0.3))
            .then(|| pick(rng, &NOUNS).to_string()),
        hairstyle: (category == EntityCategory::Person && rng.gen_bool(0.3))
            .then(|| format!("{} hair", pick(rng, &ADJECTIVES))),
    };
    ReferenceEntity {
        id: EntityId::new(category, number),
        semantic_description: format!("a {} {}", pick(rng, &ADJECTIVES), pick(rng, &NOUNS)),
        timestamp: 0.0,
        appearance_anchor: anchor,
    }
}

fn entities<R: Rng>(rng: &mut R, count: usize) -> Vec<ReferenceEntity> {
    let mut counters = [0u32; 4];
    (0..count)
        .map(|_| {
            // bias toward persons so dialogue has speakers
            let category = match rng.gen_range(0..10) {
                0..=4 => EntityCategory::Person,
                5..=6 => EntityCategory::Object,
                7..=8 => EntityCategory::Animal,
                _ => EntityCategory::Scene,
            };
            let slot = EntityCategory::ALL
                .iter()
                .position(|c| *c == category)
                .expect("category in table");
            counters[slot] += 1;
            entity(rng, category, counters[slot])
        })
        .collect()
}

/// Shot lengths tiling [0, duration) with millisecond-snapped cuts.
fn tiled_ranges<R: Rng>(rng: &mut R, count: usize) -> Vec<TimeRange> {
    let mut cursor = 0.0f64;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let len = quantize_time(rng.gen_range(1.2..5.0));
        let next = quantize_time(cursor + len);
        out.push(TimeRange::new(cursor, next));
        cursor = next;
    }
    out
}

/// A lint-clean script: no errors, no warnings.
pub fn clean_script<R: Rng>(rng: &mut R, params: &GenParams) -> Script {
    let shot_count = rng.gen_range(1..=params.max_shots.max(1));
    let entity_count = rng.gen_range(0..=params.max_entities);
    let event_count = rng.gen_range(0..=params.max_events);

    let refs = entities(rng, entity_count);
    let ranges = tiled_ranges(rng, shot_count);
    let duration = ranges.last().map(|r| r.end).unwrap_or(10.0);

    let mut shots: Vec<Shot> = ranges
        .iter()
        .enumerate()
        .map(|(i, range)| {
            let mut description = sentence(rng);
            if rng.gen_bool(params.marker_chance) && range.length() > 0.4 {
                let t = quantize_time(rng.gen_range(range.start + 0.1..range.end - 0.1));
                description = format!("{description} [t={t}] {}", sentence(rng));
            }
            Shot {
                id: ShotId::new(i as u32 + 1),
                time_range: *range,
                visual_description: description,
                camera: camera(rng),
                references_in_shot: Vec::new(),
                active_events: Vec::new(),
            }
        })
        .collect();

    // home shot per entity keeps every entity referenced
    for r in &refs {
        let idx = rng.gen_range(0..shots.len());
        let list = &mut shots[idx].references_in_shot;
        if !list.contains(&r.id) {
            list.push(r.id);
        }
    }

    let speakers: Vec<EntityId> = refs
        .iter()
        .filter(|r| r.category() == EntityCategory::Person)
        .map(|r| r.id)
        .collect();
    let sources: Vec<EntityId> = refs.iter().map(|r| r.id).collect();

    let mut events = Vec::new();
    for n in 0..event_count {
        let shot_idx = rng.gen_range(0..shots.len());
        let host = shots[shot_idx].time_range;
        if host.length() < 0.3 {
            continue;
        }
        let start = quantize_time(rng.gen_range(host.start..host.end - 0.2));
        let end = quantize_time(rng.gen_range(start + 0.1..host.end.min(start + 3.0)));
        if end <= start {
            continue;
        }
        let range = TimeRange::new(start, end);
        let kind = match rng.gen_range(0..6) {
            0 | 1 | 2 if !speakers.is_empty() => EventType::Dialogue,
            3 | 4 if !sources.is_empty() => EventType::Sfx,
            _ => EventType::Music,
        };
        let (speaker, line, description) = match kind {
            EventType::Dialogue => {
                let speaker = speakers[rng.gen_range(0..speakers.len())];
                // speaker must be visible wherever the dialogue plays
                let list = &mut shots[shot_idx].references_in_shot;
                if !list.contains(&speaker) {
                    list.push(speaker);
                }
                (
                    Some(speaker),
                    Some(pick(rng, &LINES).to_string()),
                    phrase(rng, 2),
                )
            }
            EventType::Sfx => {
                let source = sources[rng.gen_range(0..sources.len())];
                let list = &mut shots[shot_idx].references_in_shot;
                if !list.contains(&source) {
                    list.push(source);
                }
                (Some(source), None, format!("{} sound", pick(rng, &NOUNS)))
            }
            EventType::Music => (None, None, format!("{} theme", pick(rng, &ADJECTIVES))),
        };
        events.push(AudioEvent {
            id: EventId::new(n as u32 + 1),
            event_type: kind,
            time_range: range,
            speaker,
            line,
            description,
        });
    }

    let mut refs = refs;
    for r in &mut refs {
        r.timestamp = quantize_time(rng.gen_range(0.0..duration));
    }

    let script = Script::build(
        MediaMeta::with_fps(duration, 25.0),
        GlobalContext {
            scene_description: sentence(rng),
            global_style: phrase(rng, 3),
            global_audio: format!("ambient {}", pick(rng, &NOUNS)),
        },
        refs,
        shots,
        events,
    )
    .expect("generated parts are structurally valid");

    // write the inferred concurrency links back
    let inferred = infer_active_events(&script);
    let (meta, global, refs, mut shots, events) = script.into_parts();
    for s in &mut shots {
        s.active_events = inferred.get(&s.id).cloned().unwrap_or_default();
    }
    Script::build(meta, global, refs, shots, events).expect("relink keeps structure")
}

/// A structurally valid script with unconstrained relational links:
/// shots may overlap or leave gaps, link lists may dangle, sfx may be
/// unbound. Times stay inside [0, duration].
pub fn valid_script<R: Rng>(rng: &mut R, params: &GenParams) -> Script {
    let duration = quantize_time(rng.gen_range(20.0..120.0));
    let shot_count = rng.gen_range(0..=params.max_shots);
    let event_count = rng.gen_range(0..=params.max_events);
    let entity_count = rng.gen_range(0..=params.max_entities);

    let refs = entities(rng, entity_count);
    let random_range = |rng: &mut R| {
        let start = quantize_time(rng.gen_range(0.0..duration - 0.5));
        let end = quantize_time(rng.gen_range(start + 0.05..(start + 15.0).min(duration)));
        TimeRange::new(start, end.max(quantize_time(start + 0.05)))
    };

    let shots: Vec<Shot> = (0..shot_count)
        .map(|i| {
            let range = random_range(rng);
            let mut description = sentence(rng);
            if rng.gen_bool(params.marker_chance) {
                let t = quantize_time(rng.gen_range(0.0..duration));
                description = format!("{description} [t={t}] {}", sentence(rng));
            }
            Shot {
                id: ShotId::new(i as u32 + 1),
                time_range: range,
                visual_description: description,
                camera: camera(rng),
                references_in_shot: refs
                    .iter()
                    .filter(|_| rng.gen_bool(0.3))
                    .map(|r| r.id)
                    .collect(),
                active_events: (0..event_count)
                    .filter(|_| rng.gen_bool(0.2))
                    .map(|n| EventId::new(n as u32 + 1))
                    .collect(),
            }
        })
        .collect();

    let events: Vec<AudioEvent> = (0..event_count)
        .map(|n| {
            let range = random_range(rng);
            let kind = match rng.gen_range(0..3) {
                0 if !refs.is_empty() => EventType::Dialogue,
                1 => EventType::Sfx,
                _ => EventType::Music,
            };
            let speaker = match kind {
                EventType::Dialogue => Some(refs[rng.gen_range(0..refs.len())].id),
                EventType::Sfx if !refs.is_empty() && rng.gen_bool(0.5) => {
                    Some(refs[rng.gen_range(0..refs.len())].id)
                }
                _ => None,
            };
            AudioEvent {
                id: EventId::new(n as u32 + 1),
                event_type: kind,
                time_range: range,
                speaker,
                line: (kind == EventType::Dialogue).then(|| pick(rng, &LINES).to_string()),
                description: phrase(rng, 3),
            }
        })
        .collect();

    let mut refs = refs;
    for r in &mut refs {
        r.timestamp = quantize_time(rng.gen_range(0.0..duration));
    }

    Script::build(
        MediaMeta {
            duration,
            fps: rng.gen_bool(0.7).then_some(25.0),
        },
        GlobalContext {
            scene_description: sentence(rng),
            global_style: if rng.gen_bool(0.5) {
                phrase(rng, 3)
            } else {
                String::new()
            },
            global_audio: String::new(),
        },
        refs,
        shots,
        events,
    )
    .expect("generated parts are structurally valid")
}

/// Derive a plausible candidate from a gold script: boundaries jittered,
/// some elements dropped, descriptions lightly reworded. Shares the gold
/// duration and frame rate.
pub fn jittered_candidate<R: Rng>(rng: &mut R, gold: &Script) -> Script {
    let duration = gold.meta().duration;
    let mut cuts: Vec<f64> = Vec::new();
    for t in boundaries_or_empty(gold) {
        if rng.gen_bool(0.85) {
            cuts.push(quantize_time(
                (t + rng.gen_range(-0.4..0.4)).clamp(0.2, (duration - 0.2).max(0.2)),
            ));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 0.15);

    let mut shots = Vec::new();
    if !gold.shots().is_empty() {
        let mut start = 0.0f64;
        let mut idx = 1u32;
        for cut in cuts.iter().chain(std::iter::once(&duration)) {
            if *cut <= start + 0.05 {
                continue;
            }
            shots.push(Shot {
                id: ShotId::new(idx),
                time_range: TimeRange::new(start, *cut),
                visual_description: sentence(rng),
                camera: camera(rng),
                references_in_shot: Vec::new(),
                active_events: Vec::new(),
            });
            start = *cut;
            idx += 1;
        }
    }

    let mut references: Vec<ReferenceEntity> = Vec::new();
    for r in gold.references() {
        if !rng.gen_bool(0.85) {
            continue;
        }
        let mut c = r.clone();
        if rng.gen_bool(0.5) {
            c.semantic_description =
                format!("{} {}", c.semantic_description, pick(rng, &ADJECTIVES));
        }
        references.push(c);
    }

    let mut events: Vec<AudioEvent> = Vec::new();
    for e in gold.events() {
        if !rng.gen_bool(0.85) {
            continue;
        }
        let start = quantize_time(
            (e.time_range.start + rng.gen_range(-0.3..0.3)).clamp(0.0, duration - 0.1),
        );
        let end = quantize_time(
            (e.time_range.end + rng.gen_range(-0.3..0.3)).clamp(start + 0.05, duration),
        );
        events.push(AudioEvent {
            time_range: TimeRange::new(start, end.max(quantize_time(start + 0.05))),
            ..e.clone()
        });
    }

    let script = Script::build(
        MediaMeta {
            duration,
            fps: gold.meta().fps,
        },
        gold.global().clone(),
        references,
        shots,
        events,
    )
    .expect("jittered parts are structurally valid");

    let inferred = infer_active_events(&script);
    let (meta, global, refs, mut shots, events) = script.into_parts();
    for s in &mut shots {
        s.active_events = inferred.get(&s.id).cloned().unwrap_or_default();
    }
    Script::build(meta, global, refs, shots, events).expect("relink keeps structure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validator::validate;

    #[test]
    fn clean_scripts_lint_clean() {
        let mut rng = seeded_rng(11);
        for _ in 0..50 {
            let s = clean_script(&mut rng, &GenParams::default());
            let diags = validate(&s);
            assert!(
                diags.is_empty(),
                "generated script should be clean, got {:?}",
                diags.items()
            );
        }
    }

    #[test]
    fn valid_scripts_build() {
        let mut rng = seeded_rng(12);
        for _ in 0..50 {
            let s = valid_script(&mut rng, &GenParams::large());
            assert!(s.meta().duration > 0.0);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = clean_script(&mut seeded_rng(99), &GenParams::default());
        let b = clean_script(&mut seeded_rng(99), &GenParams::default());
        assert_eq!(a, b);
    }

    #[test]
    fn jittered_candidate_shares_meta() {
        let mut rng = seeded_rng(13);
        let gold = clean_script(&mut rng, &GenParams::small());
        let cand = jittered_candidate(&mut rng, &gold);
        assert_eq!(cand.meta().duration, gold.meta().duration);
        assert_eq!(cand.meta().fps, gold.meta().fps);
    }
}
