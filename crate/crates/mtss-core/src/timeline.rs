//! Interval index over shots and events: stabbing and overlap queries,
//! overlap/IoU computation, active-event inference, and shot boundaries.
//!
//! The index is a start-sorted array with subtree end-max augmentation
//! (an implicit balanced interval tree), answering stabbing and overlap
//! queries in O(log n + k). It is rebuilt from a script, never mutated.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::schema::{EventId, Script, ShotId, TimeRange, TIME_EPSILON};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimelineError {
    #[error("the shot stream is empty")]
    EmptyShotStream,
}

/// Overlap measurements between two ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    /// Intersection length in seconds (0 when disjoint).
    pub length: f64,
    /// Intersection over union, in [0, 1]; 1 exactly iff the ranges are equal.
    pub iou: f64,
}

/// Intersection length and IoU of two half-open ranges.
pub fn overlap(a: TimeRange, b: TimeRange) -> Overlap {
    let inter = (a.end.min(b.end) - a.start.max(b.start)).max(0.0);
    if inter <= 0.0 {
        return Overlap {
            length: 0.0,
            iou: 0.0,
        };
    }
    let union = a.length() + b.length() - inter;
    let iou = if union > 0.0 { inter / union } else { 1.0 };
    Overlap {
        length: inter,
        iou: iou.clamp(0.0, 1.0),
    }
}

/// True when two ranges overlap by more than the shared tolerance, i.e.
/// touching ranges never overlap and a boundary-touching event is not
/// "active".
pub fn overlaps(a: TimeRange, b: TimeRange) -> bool {
    overlap(a, b).length > TIME_EPSILON
}

/// Start-sorted interval array with subtree end-max augmentation.
struct IntervalSet<K: Copy> {
    // sorted by (start, key)
    entries: Vec<(TimeRange, K)>,
    // max end over the implicit subtree rooted at each index
    subtree_max_end: Vec<f64>,
}

impl<K: Copy + Ord> IntervalSet<K> {
    fn build(mut entries: Vec<(TimeRange, K)>) -> IntervalSet<K> {
        entries.sort_by(|a, b| a.0.start.total_cmp(&b.0.start).then(a.1.cmp(&b.1)));
        let mut set = IntervalSet {
            subtree_max_end: vec![f64::NEG_INFINITY; entries.len()],
            entries,
        };
        if !set.entries.is_empty() {
            set.fill_max(0, set.entries.len());
        }
        set
    }

    /// Compute subtree max-ends for the implicit tree over [lo, hi).
    fn fill_max(&mut self, lo: usize, hi: usize) -> f64 {
        if lo >= hi {
            return f64::NEG_INFINITY;
        }
        let mid = lo + (hi - lo) / 2;
        let left = self.fill_max(lo, mid);
        let right = self.fill_max(mid + 1, hi);
        let own = self.entries[mid].0.end;
        let max = own.max(left).max(right);
        self.subtree_max_end[mid] = max;
        max
    }

    /// Keys of intervals containing `t` (half-open containment).
    fn stab(&self, t: f64) -> Vec<K> {
        let mut out = Vec::new();
        self.stab_rec(0, self.entries.len(), t, &mut out);
        out.sort();
        out
    }

    fn stab_rec(&self, lo: usize, hi: usize, t: f64, out: &mut Vec<K>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        if self.subtree_max_end[mid] <= t {
            return; // nothing in this subtree ends after t
        }
        self.stab_rec(lo, mid, t, out);
        let (range, key) = self.entries[mid];
        if range.contains(t) {
            out.push(key);
        }
        // right subtree starts at or after entries[mid].0.start
        if range.start <= t {
            self.stab_rec(mid + 1, hi, t, out);
        }
    }

    /// Keys of intervals overlapping `r` by more than the tolerance.
    fn overlapping(&self, r: TimeRange) -> Vec<K> {
        let mut out = Vec::new();
        self.overlap_rec(0, self.entries.len(), r, &mut out);
        out.sort();
        out
    }

    fn overlap_rec(&self, lo: usize, hi: usize, r: TimeRange, out: &mut Vec<K>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        // overlap length > eps requires end > r.start + eps somewhere in here
        if self.subtree_max_end[mid] <= r.start + TIME_EPSILON {
            return;
        }
        self.overlap_rec(lo, mid, r, out);
        let (range, key) = self.entries[mid];
        if overlaps(range, r) {
            out.push(key);
        }
        // right subtree starts >= range.start; it can only overlap if that
        // start leaves more than eps before r.end
        if range.start < r.end - TIME_EPSILON {
            self.overlap_rec(mid + 1, hi, r, out);
        }
    }
}

/// Immutable interval index over one script's shots and events.
pub struct TimelineIndex {
    shots: IntervalSet<ShotId>,
    events: IntervalSet<EventId>,
    shot_ranges: Vec<(ShotId, TimeRange)>,
    event_ranges: Vec<(EventId, TimeRange)>,
}

/// Build the index for a script. Queries answer identically to brute-force
/// scans over the script's streams.
pub fn build_index(script: &Script) -> TimelineIndex {
    TimelineIndex::build(script)
}

impl TimelineIndex {
    pub fn build(script: &Script) -> TimelineIndex {
        TimelineIndex {
            shots: IntervalSet::build(
                script.shots().iter().map(|s| (s.time_range, s.id)).collect(),
            ),
            events: IntervalSet::build(
                script.events().iter().map(|e| (e.time_range, e.id)).collect(),
            ),
            shot_ranges: script.shots().iter().map(|s| (s.id, s.time_range)).collect(),
            event_ranges: script.events().iter().map(|e| (e.id, e.time_range)).collect(),
        }
    }

    /// Shots whose range contains `t`, sorted by id.
    pub fn shots_at(&self, t: f64) -> Vec<ShotId> {
        self.shots.stab(t)
    }

    /// Events whose range contains `t`, sorted by id.
    pub fn events_active_at(&self, t: f64) -> Vec<EventId> {
        self.events.stab(t)
    }

    /// Shots overlapping `range` by more than the tolerance, sorted by id.
    pub fn shots_overlapping(&self, range: TimeRange) -> Vec<ShotId> {
        self.shots.overlapping(range)
    }

    /// Events overlapping `range` by more than the tolerance, sorted by id.
    pub fn events_overlapping(&self, range: TimeRange) -> Vec<EventId> {
        self.events.overlapping(range)
    }

    fn event_range(&self, id: EventId) -> Option<TimeRange> {
        self.event_ranges
            .iter()
            .find(|(e, _)| *e == id)
            .map(|(_, r)| *r)
    }
}

/// For each shot, the events overlapping it by more than the tolerance,
/// ordered by event start then id. A pure function of the time data: any
/// stored `active_events` lists are ignored.
pub fn infer_active_events(script: &Script) -> BTreeMap<ShotId, Vec<EventId>> {
    let index = TimelineIndex::build(script);
    let mut out = BTreeMap::new();
    for (shot_id, range) in &index.shot_ranges {
        let mut ids = index.events_overlapping(*range);
        ids.sort_by(|a, b| {
            let ra = index.event_range(*a).expect("indexed event");
            let rb = index.event_range(*b).expect("indexed event");
            ra.start.total_cmp(&rb.start).then(a.cmp(b))
        });
        out.insert(*shot_id, ids);
    }
    out
}

/// Sorted, deduplicated shot start/end times interior to (0, duration).
/// The outer endpoints are excluded, so a single shot spanning the whole
/// duration has no boundaries. With an unknown duration (0), the largest
/// shot end stands in for the video end.
pub fn boundaries(script: &Script) -> Result<Vec<f64>, TimelineError> {
    if script.shots().is_empty() {
        return Err(TimelineError::EmptyShotStream);
    }
    Ok(boundaries_or_empty(script))
}

/// As [`boundaries`], but an empty shot stream yields an empty list.
pub fn boundaries_or_empty(script: &Script) -> Vec<f64> {
    if script.shots().is_empty() {
        return Vec::new();
    }
    let upper = if script.meta().duration > 0.0 {
        script.meta().duration
    } else {
        script
            .shots()
            .iter()
            .map(|s| s.time_range.end)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut cuts: Vec<f64> = script
        .shots()
        .iter()
        .flat_map(|s| [s.time_range.start, s.time_range.end])
        .filter(|&t| t > 0.0 && t < upper)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{
        AudioEvent, Camera, EventType, GlobalContext, MediaMeta, Script, Shot,
    };

    fn shot(n: u32, start: f64, end: f64) -> Shot {
        Shot {
            id: ShotId::new(n),
            time_range: TimeRange::new(start, end),
            visual_description: "x".to_string(),
            camera: Camera::movement("static"),
            references_in_shot: vec![],
            active_events: vec![],
        }
    }

    fn music(n: u32, start: f64, end: f64) -> AudioEvent {
        AudioEvent {
            id: EventId::new(n),
            event_type: EventType::Music,
            time_range: TimeRange::new(start, end),
            speaker: None,
            line: None,
            description: "m".to_string(),
        }
    }

    fn script(duration: f64, shots: Vec<Shot>, events: Vec<AudioEvent>) -> Script {
        Script::build(
            MediaMeta::new(duration),
            GlobalContext::new("A room."),
            vec![],
            shots,
            events,
        )
        .unwrap()
    }

    #[test]
    fn overlap_formula() {
        let o = overlap(TimeRange::new(0.0, 4.0), TimeRange::new(2.0, 6.0));
        assert_eq!(o.length, 2.0);
        assert!((o.iou - 2.0 / 6.0).abs() < 1e-12);

        let touching = overlap(TimeRange::new(0.0, 1.0), TimeRange::new(1.0, 2.0));
        assert_eq!(touching.length, 0.0);
        assert_eq!(touching.iou, 0.0);

        let same = overlap(TimeRange::new(0.0, 5.0), TimeRange::new(0.0, 5.0));
        assert_eq!(same.length, 5.0);
        assert_eq!(same.iou, 1.0);
    }

    #[test]
    fn empty_script_answers_empty() {
        let s = script(10.0, vec![], vec![]);
        let idx = build_index(&s);
        assert!(idx.shots_at(5.0).is_empty());
        assert!(idx.events_active_at(5.0).is_empty());
        assert!(idx.events_overlapping(TimeRange::new(0.0, 10.0)).is_empty());
    }

    #[test]
    fn stabbing_containment() {
        let s = script(10.0, vec![shot(1, 0.0, 10.0)], vec![music(1, 2.0, 3.0)]);
        let idx = build_index(&s);
        assert_eq!(idx.events_active_at(2.5), vec![EventId::new(1)]);
        assert!(idx.events_active_at(3.0).is_empty()); // half-open end
        assert_eq!(idx.shots_at(0.0), vec![ShotId::new(1)]);
    }

    #[test]
    fn infer_examples() {
        let s = script(
            10.0,
            vec![shot(1, 0.0, 4.0)],
            vec![music(1, 1.0, 2.0), music(2, 5.0, 6.0)],
        );
        let map = infer_active_events(&s);
        assert_eq!(map[&ShotId::new(1)], vec![EventId::new(1)]);

        let spanning = script(
            10.0,
            vec![shot(1, 0.0, 4.0), shot(2, 4.0, 9.0)],
            vec![music(1, 3.0, 7.0)],
        );
        let map = infer_active_events(&spanning);
        assert_eq!(map[&ShotId::new(1)], vec![EventId::new(1)]);
        assert_eq!(map[&ShotId::new(2)], vec![EventId::new(1)]);

        let no_events = script(10.0, vec![shot(1, 0.0, 4.0)], vec![]);
        assert_eq!(infer_active_events(&no_events)[&ShotId::new(1)], vec![]);
    }

    #[test]
    fn boundary_examples() {
        let two = script(8.0, vec![shot(1, 0.0, 5.0), shot(2, 5.0, 8.0)], vec![]);
        assert_eq!(boundaries(&two).unwrap(), vec![5.0]);

        let one = script(8.0, vec![shot(1, 0.0, 8.0)], vec![]);
        assert_eq!(boundaries(&one).unwrap(), Vec::<f64>::new());

        let three = script(
            8.0,
            vec![shot(1, 0.0, 3.0), shot(2, 3.0, 6.0), shot(3, 6.0, 8.0)],
            vec![],
        );
        assert_eq!(boundaries(&three).unwrap(), vec![3.0, 6.0]);

        let empty = script(8.0, vec![], vec![]);
        assert_eq!(boundaries(&empty), Err(TimelineError::EmptyShotStream));
    }

    #[test]
    fn index_matches_brute_force_on_randomish_layout() {
        // deterministic pseudo-random layout without pulling in an RNG here
        let mut shots = Vec::new();
        let mut events = Vec::new();
        let mut x = 7u64;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 33) % 1000) as f64 / 100.0
        };
        for n in 1..=40u32 {
            let a = next();
            let b = a + 0.05 + next();
            shots.push(shot(n, a, b));
            let c = next();
            let d = c + 0.05 + next();
            events.push(music(n, c, d));
        }
        let s = Script::build(
            MediaMeta::new(0.0),
            GlobalContext::new("A room."),
            vec![],
            shots,
            events,
        )
        .unwrap();
        let idx = build_index(&s);
        for i in 0..100 {
            let t = i as f64 * 0.21;
            let brute: Vec<EventId> = {
                let mut v: Vec<EventId> = s
                    .events()
                    .iter()
                    .filter(|e| e.time_range.contains(t))
                    .map(|e| e.id)
                    .collect();
                v.sort();
                v
            };
            assert_eq!(idx.events_active_at(t), brute, "stab at {t}");
            let r = TimeRange::new(t, t + 1.7);
            let brute_overlap: Vec<ShotId> = {
                let mut v: Vec<ShotId> = s
                    .shots()
                    .iter()
                    .filter(|sh| overlaps(sh.time_range, r))
                    .map(|sh| sh.id)
                    .collect();
                v.sort();
                v
            };
            assert_eq!(idx.shots_overlapping(r), brute_overlap, "overlap at {t}");
        }
    }
}
