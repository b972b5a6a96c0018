//! Shared helpers for the integration and acceptance suites: fixture
//! loading and the single-violation mutation generators used to probe
//! lint soundness.

use std::path::{Path, PathBuf};

use mtss_core::schema::{
    AppearanceAnchor, AudioEvent, EntityCategory, EntityId, EventId, EventType, ReferenceEntity,
    Script, TimeRange,
};
use mtss_core::timeline::overlap;
use mtss_core::validator::RuleCode;
use mtss_core::TIME_EPSILON;

pub fn fixture_dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(sub)
}

/// Sorted fixture paths under `fixtures/<sub>/`.
pub fn fixture_paths(sub: &str) -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir(sub))
        .expect("fixture directory exists")
        .map(|e| e.expect("readable entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
}

pub fn load_script(path: &Path) -> Script {
    let bytes = std::fs::read(path).expect("fixture readable");
    match mtss_core::parser::parse_document(&bytes) {
        Ok(s) => s,
        Err(diags) => panic!(
            "fixture {} failed to parse: {}",
            path.display(),
            diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        ),
    }
}

pub fn clean_fixture_scripts() -> Vec<(PathBuf, Script)> {
    fixture_paths("clean")
        .into_iter()
        .map(|p| {
            let s = load_script(&p);
            (p, s)
        })
        .collect()
}

/// Inject exactly one violation of `rule` into a clean script, when the
/// script offers a site for it. Incidental secondary findings are kept to
/// a minimum but soundness only requires the injected code to surface.
pub fn inject_violation(rule: RuleCode, script: &Script) -> Option<Script> {
    let (meta, global, mut references, mut shots, mut events) = script.clone().into_parts();
    let rebuild = |meta, global, references, shots, events| {
        Some(
            Script::build(meta, global, references, shots, events)
                .expect("mutation keeps structural validity"),
        )
    };
    match rule {
        RuleCode::E001 => {
            let shot = shots.first_mut()?;
            shot.references_in_shot
                .push(EntityId::new(EntityCategory::Person, 99));
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E002 => {
            let ev = events.iter_mut().find(|e| e.speaker.is_some())?;
            ev.speaker = Some(EntityId::new(EntityCategory::Person, 99));
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E003 => {
            let shot = shots.first_mut()?;
            shot.active_events.push(EventId::new(99));
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E004 => {
            if shots.len() < 2 {
                return None;
            }
            shots.swap(0, 1);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E005 => {
            let shot = shots.first_mut()?;
            let t = shot.time_range.end + 5.0;
            shot.visual_description = format!("{} [t={t}]", shot.visual_description);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E006 => {
            // a listed event with zero overlap: find a disjoint pair
            let (shot_idx, event_id) = shots.iter().enumerate().find_map(|(i, s)| {
                events
                    .iter()
                    .find(|e| {
                        overlap(s.time_range, e.time_range).length <= TIME_EPSILON
                            && !s.active_events.contains(&e.id)
                    })
                    .map(|e| (i, e.id))
            })?;
            shots[shot_idx].active_events.push(event_id);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E007 => {
            if meta.duration <= 0.0 {
                return None;
            }
            let shot = shots.last_mut()?;
            shot.time_range = TimeRange::new(shot.time_range.start, meta.duration + 2.0);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::E008 => {
            // structural rules need the unchecked constructor
            if let Some(ev) = events
                .iter_mut()
                .find(|e| e.event_type == EventType::Dialogue)
            {
                ev.line = None;
            } else if let Some(ev) = events
                .iter_mut()
                .find(|e| e.event_type == EventType::Music)
            {
                ev.speaker = Some(
                    references
                        .first()
                        .map(|r| r.id)
                        .unwrap_or_else(|| EntityId::new(EntityCategory::Person, 99)),
                );
            } else if let Some(ev) = events.iter_mut().find(|e| e.event_type == EventType::Sfx) {
                ev.line = Some("impossible".to_string());
            } else {
                return None;
            }
            Some(Script::from_parts_unchecked(
                meta, global, references, shots, events,
            ))
        }
        RuleCode::W101 => {
            let next = references
                .iter()
                .filter(|r| r.category() == EntityCategory::Person)
                .map(|r| r.id.number())
                .max()
                .unwrap_or(0)
                + 1;
            references.push(ReferenceEntity {
                id: EntityId::new(EntityCategory::Person, next),
                semantic_description: "an extra nobody points at".to_string(),
                timestamp: 0.0,
                appearance_anchor: AppearanceAnchor::new("deliberately unreferenced"),
            });
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::W102 => {
            let shot = shots.iter_mut().find(|s| !s.active_events.is_empty())?;
            shot.active_events.remove(0);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::W103 => {
            let (speaker, range) = events
                .iter()
                .find(|e| e.event_type == EventType::Dialogue && e.speaker.is_some())
                .map(|e| (e.speaker.unwrap(), e.time_range))?;
            let shot = shots.iter_mut().find(|s| {
                overlap(s.time_range, range).length > TIME_EPSILON
                    && s.references_in_shot.contains(&speaker)
            })?;
            shot.references_in_shot.retain(|id| *id != speaker);
            rebuild(meta, global, references, shots, events)
        }
        RuleCode::W104 => {
            // shrink the earlier of a touching pair, avoiding collateral
            // marker or active-event violations
            let mut order: Vec<usize> = (0..shots.len()).collect();
            order.sort_by(|&a, &b| {
                shots[a]
                    .time_range
                    .start
                    .total_cmp(&shots[b].time_range.start)
                    .then(shots[a].id.cmp(&shots[b].id))
            });
            for w in order.windows(2) {
                let (ai, bi) = (w[0], w[1]);
                if (shots[bi].time_range.start - shots[ai].time_range.end).abs() > TIME_EPSILON {
                    continue;
                }
                for delta in [0.5, 0.3, 0.1] {
                    let a = &shots[ai];
                    let new_end = a.time_range.end - delta;
                    if new_end <= a.time_range.start {
                        continue;
                    }
                    let new_range = TimeRange::new(a.time_range.start, new_end);
                    let markers_ok = mtss_core::parser::extract_inline_timestamps(
                        &a.visual_description,
                    )
                    .map(|(markers, _)| {
                        markers
                            .iter()
                            .all(|m| m.time <= new_range.end + TIME_EPSILON)
                    })
                    .unwrap_or(false);
                    let actives_ok = a.active_events.iter().all(|id| {
                        events
                            .iter()
                            .find(|e| e.id == *id)
                            .is_some_and(|e| overlap(new_range, e.time_range).length > TIME_EPSILON)
                    });
                    let overlaps_ok = events.iter().all(|e| {
                        let before = overlap(a.time_range, e.time_range).length > TIME_EPSILON;
                        let after = overlap(new_range, e.time_range).length > TIME_EPSILON;
                        before == after || a.active_events.contains(&e.id)
                    });
                    if markers_ok && actives_ok && overlaps_ok {
                        shots[ai].time_range = new_range;
                        return rebuild(meta, global, references, shots, events);
                    }
                }
            }
            None
        }
        RuleCode::W105 => {
            let host = shots.iter().find(|s| s.time_range.length() > 0.4)?;
            let mid = (host.time_range.start + host.time_range.end) / 2.0;
            let range = TimeRange::new(mid - 0.1, mid + 0.1);
            let id = EventId::new(events.iter().map(|e| e.id.number()).max().unwrap_or(0) + 1);
            let host_id = host.id;
            events.push(AudioEvent {
                id,
                event_type: EventType::Sfx,
                time_range: range,
                speaker: None,
                line: None,
                description: "an unattributed thud".to_string(),
            });
            for s in &mut shots {
                if overlap(s.time_range, range).length > TIME_EPSILON || s.id == host_id {
                    if !s.active_events.contains(&id) {
                        s.active_events.push(id);
                    }
                }
            }
            rebuild(meta, global, references, shots, events)
        }
    }
}
