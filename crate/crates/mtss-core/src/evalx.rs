//! Script-vs-script evaluation: shot boundary deviation, stream-wise
//! one-to-one matching with F1 scores, and aggregate reports.
//!
//! Matching conventions: shots and events match by maximal total temporal
//! IoU (events additionally require equal type); entities match within a
//! category by token-level F1 over semantic descriptions. Pairs scoring at
//! or below the threshold are excluded. Assignments are exhaustive on
//! small streams and solved with a Hungarian solver above that, both
//! yielding the one-to-one optimum.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::parser::emit::JsonWriter;
use crate::schema::{Script, TIME_EPSILON};
use crate::timeline::{boundaries_or_empty, overlap};

mod assignment;

pub use assignment::solve_min_cost;

/// Exhaustive-search cutoff for stream matching.
const EXHAUSTIVE_MATCH_LIMIT: usize = 6;
/// Exhaustive-search cutoff for boundary assignment.
const EXHAUSTIVE_BOUNDARY_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("scripts have different durations ({gold} vs {candidate})")]
    DurationMismatch { gold: f64, candidate: f64 },
    #[error("scripts have different frame rates ({gold} vs {candidate})")]
    FpsMismatch { gold: f64, candidate: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("unknown stream kind `{0}`; expected shots, events, or entities")]
pub struct UnknownKind(pub String);

/// Which stream to match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    Shots,
    Events,
    Entities,
}

impl FromStr for StreamKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shots" => Ok(StreamKind::Shots),
            "events" => Ok(StreamKind::Events),
            "entities" => Ok(StreamKind::Entities),
            other => Err(UnknownKind(other.to_string())),
        }
    }
}

/// One matched pair with its similarity score.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub gold: String,
    pub candidate: String,
    pub score: f64,
}

/// A one-to-one matching: every element appears exactly once across the
/// pairs and the unmatched lists.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    pub pairs: Vec<MatchPair>,
    pub unmatched_gold: Vec<String>,
    pub unmatched_candidate: Vec<String>,
}

impl Matching {
    pub fn total_score(&self) -> f64 {
        self.pairs.iter().map(|p| p.score).sum()
    }
}

/// Evaluation knobs. The defaults pin the toolkit's conventions: a 1 s
/// penalty per unmatched boundary and 0.1 score-exclusion thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub unmatched_penalty: f64,
    pub iou_threshold: f64,
    pub token_f1_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> EvalConfig {
        EvalConfig {
            unmatched_penalty: 1.0,
            iou_threshold: 0.1,
            token_f1_threshold: 0.1,
        }
    }
}

/// Precision/recall/F1 of one stream's matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamScore {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub matched: usize,
    pub gold_total: usize,
    pub candidate_total: usize,
}

impl StreamScore {
    fn from_matching(m: &Matching) -> StreamScore {
        let matched = m.pairs.len();
        let gold_total = matched + m.unmatched_gold.len();
        let candidate_total = matched + m.unmatched_candidate.len();
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        let f1 = if gold_total + candidate_total == 0 {
            1.0
        } else {
            2.0 * matched as f64 / (gold_total + candidate_total) as f64
        };
        StreamScore {
            f1,
            precision: ratio(matched, candidate_total),
            recall: ratio(matched, gold_total),
            matched,
            gold_total,
            candidate_total,
        }
    }
}

/// The aggregate evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub boundary_deviation_seconds: f64,
    pub boundary_deviation_frames: u64,
    pub shots: StreamScore,
    pub entities: StreamScore,
    pub events: StreamScore,
    pub shot_matching: Matching,
    pub entity_matching: Matching,
    pub event_matching: Matching,
}

impl EvalReport {
    /// Serialize to the canonical document dialect.
    pub fn to_json(&self) -> String {
        let mut w = JsonWriter::new();
        w.open_object();
        w.key("boundary_deviation_seconds");
        w.number(self.boundary_deviation_seconds);
        w.key("boundary_deviation_frames");
        w.integer(self.boundary_deviation_frames);
        for (name, score, matching) in [
            ("shots", &self.shots, &self.shot_matching),
            ("entities", &self.entities, &self.entity_matching),
            ("events", &self.events, &self.event_matching),
        ] {
            w.key(name);
            w.open_object();
            w.key("f1");
            w.number(score.f1);
            w.key("precision");
            w.number(score.precision);
            w.key("recall");
            w.number(score.recall);
            w.key("matched");
            w.integer(score.matched as u64);
            w.key("gold_total");
            w.integer(score.gold_total as u64);
            w.key("candidate_total");
            w.integer(score.candidate_total as u64);
            w.key("pairs");
            w.open_array();
            for p in &matching.pairs {
                w.open_object();
                w.key("gold");
                w.string(&p.gold);
                w.key("candidate");
                w.string(&p.candidate);
                w.key("score");
                w.number(p.score);
                w.close_object();
            }
            w.close_array();
            w.key("unmatched_gold");
            w.inline_strings(matching.unmatched_gold.iter().cloned());
            w.key("unmatched_candidate");
            w.inline_strings(matching.unmatched_candidate.iter().cloned());
            w.close_object();
        }
        w.close_object();
        w.finish()
    }

    /// Fixed-order `key<TAB>value` lines.
    pub fn machine_lines(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('\t');
            out.push_str(&v);
            out.push('\n');
        };
        push(
            "boundary_deviation_seconds",
            format!("{:.3}", self.boundary_deviation_seconds),
        );
        push(
            "boundary_deviation_frames",
            self.boundary_deviation_frames.to_string(),
        );
        for (name, score) in [
            ("shot", &self.shots),
            ("entity", &self.entities),
            ("event", &self.events),
        ] {
            push(&format!("{name}_f1"), format!("{:.3}", score.f1));
            push(&format!("{name}_precision"), format!("{:.3}", score.precision));
            push(&format!("{name}_recall"), format!("{:.3}", score.recall));
        }
        out
    }
}

impl fmt::Display for EvalReport {
    /// Fixed-order human-readable table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<28}{:.3}",
            "boundary_deviation_seconds", self.boundary_deviation_seconds
        )?;
        writeln!(
            f,
            "{:<28}{}",
            "boundary_deviation_frames", self.boundary_deviation_frames
        )?;
        for (name, score) in [
            ("shot", &self.shots),
            ("entity", &self.entities),
            ("event", &self.events),
        ] {
            writeln!(f, "{:<28}{:.3}", format!("{name}_f1"), score.f1)?;
            writeln!(f, "{:<28}{:.3}", format!("{name}_precision"), score.precision)?;
            writeln!(f, "{:<28}{:.3}", format!("{name}_recall"), score.recall)?;
            writeln!(
                f,
                "{:<28}{} of {} gold, {} of {} candidate",
                format!("{name}_matched"),
                score.matched,
                score.gold_total,
                score.matched,
                score.candidate_total
            )?;
        }
        Ok(())
    }
}

/// Mean absolute deviation between matched shot boundaries, plus a fixed
/// penalty per unmatched boundary on either side. Returns seconds and
/// frames (at the shared fps, rounded half-up).
pub fn boundary_deviation(
    gold: &Script,
    candidate: &Script,
    unmatched_penalty: f64,
) -> Result<(f64, u64), EvalError> {
    check_compatible(gold, candidate)?;
    let fps = gold.meta().fps_or_default();
    let g = boundaries_or_empty(gold);
    let c = boundaries_or_empty(candidate);
    let seconds = boundary_deviation_seconds(&g, &c, unmatched_penalty);
    Ok((seconds, frames(seconds, fps)))
}

/// Deviation on raw boundary lists (both sorted ascending).
pub fn boundary_deviation_seconds(gold: &[f64], candidate: &[f64], unmatched_penalty: f64) -> f64 {
    let pairs = gold.len().min(candidate.len());
    let unmatched = gold.len().max(candidate.len()) - pairs;
    if pairs == 0 {
        return unmatched_penalty * unmatched as f64;
    }
    let total = if gold.len().max(candidate.len()) <= EXHAUSTIVE_BOUNDARY_LIMIT {
        exhaustive_boundary_cost(gold, candidate)
    } else {
        hungarian_boundary_cost(gold, candidate)
    };
    total / pairs as f64 + unmatched_penalty * unmatched as f64
}

/// Frames at the given rate, rounded half-up.
pub fn frames(seconds: f64, fps: f64) -> u64 {
    (seconds * fps).round() as u64
}

fn check_compatible(gold: &Script, candidate: &Script) -> Result<(), EvalError> {
    let (dg, dc) = (gold.meta().duration, candidate.meta().duration);
    if (dg - dc).abs() > TIME_EPSILON {
        return Err(EvalError::DurationMismatch {
            gold: dg,
            candidate: dc,
        });
    }
    let (fg, fc) = (gold.meta().fps_or_default(), candidate.meta().fps_or_default());
    if (fg - fc).abs() > TIME_EPSILON {
        return Err(EvalError::FpsMismatch { gold: fg, candidate: fc });
    }
    Ok(())
}

/// Minimum total |Δt| over all min(n,m)-cardinality one-to-one pairings,
/// by brute-force enumeration.
fn exhaustive_boundary_cost(gold: &[f64], candidate: &[f64]) -> f64 {
    // recurse over the smaller side to bound the branching
    let (small, large) = if gold.len() <= candidate.len() {
        (gold, candidate)
    } else {
        (candidate, gold)
    };
    fn rec(small: &[f64], large: &[f64], i: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if acc >= *best {
            return;
        }
        if i == small.len() {
            *best = acc;
            return;
        }
        for j in 0..large.len() {
            if !used[j] {
                used[j] = true;
                rec(small, large, i + 1, used, acc + (small[i] - large[j]).abs(), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; large.len()];
    rec(small, large, 0, &mut used, 0.0, &mut best);
    best
}

fn hungarian_boundary_cost(gold: &[f64], candidate: &[f64]) -> f64 {
    let n = gold.len().max(candidate.len());
    // pad the square matrix with zero-cost dummies for the excess side
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (gold.get(i), candidate.get(j)) {
                    (Some(g), Some(c)) => (g - c).abs(),
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let assignment = solve_min_cost(&cost);
    assignment
        .iter()
        .enumerate()
        .filter_map(|(i, &j)| match (gold.get(i), candidate.get(j)) {
            (Some(g), Some(c)) => Some((g - c).abs()),
            _ => None,
        })
        .sum()
}

/// Match one stream between two scripts: a one-to-one assignment
/// maximizing total similarity, excluding pairs at or below the threshold.
pub fn match_stream(
    gold: &Script,
    candidate: &Script,
    kind: StreamKind,
    config: &EvalConfig,
) -> Matching {
    let (gold_ids, cand_ids, scores, threshold) = score_matrix(gold, candidate, kind, config);
    assign(gold_ids, cand_ids, &scores, threshold)
}

/// Similarity matrix plus the applicable exclusion threshold.
fn score_matrix(
    gold: &Script,
    candidate: &Script,
    kind: StreamKind,
    config: &EvalConfig,
) -> (Vec<String>, Vec<String>, Vec<Vec<f64>>, f64) {
    match kind {
        StreamKind::Shots => {
            let g: Vec<_> = gold.shots().iter().collect();
            let c: Vec<_> = candidate.shots().iter().collect();
            let scores = g
                .iter()
                .map(|gs| {
                    c.iter()
                        .map(|cs| overlap(gs.time_range, cs.time_range).iou)
                        .collect()
                })
                .collect();
            (
                g.iter().map(|s| s.id.to_string()).collect(),
                c.iter().map(|s| s.id.to_string()).collect(),
                scores,
                config.iou_threshold,
            )
        }
        StreamKind::Events => {
            let g: Vec<_> = gold.events().iter().collect();
            let c: Vec<_> = candidate.events().iter().collect();
            let scores = g
                .iter()
                .map(|ge| {
                    c.iter()
                        .map(|ce| {
                            if ge.event_type == ce.event_type {
                                overlap(ge.time_range, ce.time_range).iou
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            (
                g.iter().map(|e| e.id.to_string()).collect(),
                c.iter().map(|e| e.id.to_string()).collect(),
                scores,
                config.iou_threshold,
            )
        }
        StreamKind::Entities => {
            let g: Vec<_> = gold.references().iter().collect();
            let c: Vec<_> = candidate.references().iter().collect();
            let scores = g
                .iter()
                .map(|ge| {
                    c.iter()
                        .map(|ce| {
                            if ge.category() == ce.category() {
                                token_f1(&ge.semantic_description, &ce.semantic_description)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            (
                g.iter().map(|e| e.id.to_string()).collect(),
                c.iter().map(|e| e.id.to_string()).collect(),
                scores,
                config.token_f1_threshold,
            )
        }
    }
}

/// Token-level F1 between two texts: case-folded, punctuation-stripped,
/// whitespace-tokenized, multiset overlap.
pub fn token_f1(a: &str, b: &str) -> f64 {
    let ta = tokenize(a);
    let tb = tokenize(b);
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    if ta.is_empty() || tb.is_empty() {
        return 0.0;
    }
    let mut counts = std::collections::HashMap::new();
    for t in &ta {
        *counts.entry(t.as_str()).or_insert(0i64) += 1;
    }
    let mut common = 0usize;
    for t in &tb {
        let entry = counts.entry(t.as_str()).or_insert(0);
        if *entry > 0 {
            common += 1;
            *entry -= 1;
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / tb.len() as f64;
    let recall = common as f64 / ta.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

fn tokenize(s: &str) -> Vec<String> {
    s.to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// One-to-one assignment maximizing total score over pairs strictly above
/// the threshold: exhaustive on small inputs, Hungarian otherwise. Ties
/// resolve toward lower gold indices (ids are listed in suffix order).
fn assign(
    gold_ids: Vec<String>,
    cand_ids: Vec<String>,
    scores: &[Vec<f64>],
    threshold: f64,
) -> Matching {
    let n = gold_ids.len();
    let m = cand_ids.len();
    let allowed = |i: usize, j: usize| scores[i][j] > threshold;

    let chosen: Vec<Option<usize>> = if n.max(m) <= EXHAUSTIVE_MATCH_LIMIT {
        exhaustive_assign(n, m, scores, threshold)
    } else {
        let size = n.max(m);
        let max_w = scores
            .iter()
            .flatten()
            .fold(0.0f64, |acc, w| acc.max(*w));
        let cost: Vec<Vec<f64>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        if i < n && j < m && allowed(i, j) {
                            max_w - scores[i][j]
                        } else {
                            max_w
                        }
                    })
                    .collect()
            })
            .collect();
        let perm = solve_min_cost(&cost);
        (0..n)
            .map(|i| {
                let j = perm[i];
                if j < m && allowed(i, j) {
                    Some(j)
                } else {
                    None
                }
            })
            .collect()
    };

    let mut pairs = Vec::new();
    let mut used_c = vec![false; m];
    for (i, choice) in chosen.iter().enumerate() {
        if let Some(j) = choice {
            pairs.push(MatchPair {
                gold: gold_ids[i].clone(),
                candidate: cand_ids[*j].clone(),
                score: scores[i][*j],
            });
            used_c[*j] = true;
        }
    }
    let unmatched_gold = gold_ids
        .iter()
        .enumerate()
        .filter(|(i, _)| chosen[*i].is_none())
        .map(|(_, id)| id.clone())
        .collect();
    let unmatched_candidate = cand_ids
        .iter()
        .enumerate()
        .filter(|(j, _)| !used_c[*j])
        .map(|(_, id)| id.clone())
        .collect();
    Matching {
        pairs,
        unmatched_gold,
        unmatched_candidate,
    }
}

/// Depth-first enumeration of all partial assignments; keeps the first
/// strictly-best total, so ties prefer matching earlier gold elements to
/// earlier candidates.
fn exhaustive_assign(
    n: usize,
    m: usize,
    scores: &[Vec<f64>],
    threshold: f64,
) -> Vec<Option<usize>> {
    fn rec(
        i: usize,
        n: usize,
        m: usize,
        scores: &[Vec<f64>],
        threshold: f64,
        used: &mut Vec<bool>,
        current: &mut Vec<Option<usize>>,
        acc: f64,
        best: &mut f64,
        best_assign: &mut Vec<Option<usize>>,
    ) {
        if i == n {
            if acc > *best + 1e-12 {
                *best = acc;
                *best_assign = current.clone();
            }
            return;
        }
        for j in 0..m {
            if !used[j] && scores[i][j] > threshold {
                used[j] = true;
                current.push(Some(j));
                rec(
                    i + 1,
                    n,
                    m,
                    scores,
                    threshold,
                    used,
                    current,
                    acc + scores[i][j],
                    best,
                    best_assign,
                );
                current.pop();
                used[j] = false;
            }
        }
        current.push(None);
        rec(
            i + 1, n, m, scores, threshold, used, current, acc, best, best_assign,
        );
        current.pop();
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_assign = vec![None; n];
    let mut used = vec![false; m];
    let mut current = Vec::with_capacity(n);
    rec(
        0,
        n,
        m,
        scores,
        threshold,
        &mut used,
        &mut current,
        0.0,
        &mut best,
        &mut best_assign,
    );
    best_assign
}

/// Evaluate a candidate script against a gold script.
pub fn evaluate(
    gold: &Script,
    candidate: &Script,
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    check_compatible(gold, candidate)?;
    let gold = gold.canonicalize();
    let candidate = candidate.canonicalize();
    let (seconds, frames) = boundary_deviation(&gold, &candidate, config.unmatched_penalty)?;
    let shot_matching = match_stream(&gold, &candidate, StreamKind::Shots, config);
    let entity_matching = match_stream(&gold, &candidate, StreamKind::Entities, config);
    let event_matching = match_stream(&gold, &candidate, StreamKind::Events, config);
    Ok(EvalReport {
        boundary_deviation_seconds: seconds,
        boundary_deviation_frames: frames,
        shots: StreamScore::from_matching(&shot_matching),
        entities: StreamScore::from_matching(&entity_matching),
        events: StreamScore::from_matching(&event_matching),
        shot_matching,
        entity_matching,
        event_matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{
        AudioEvent, Camera, EventId, EventType, GlobalContext, MediaMeta, Shot, ShotId, TimeRange,
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

    fn script_with_shots(duration: f64, shots: Vec<Shot>) -> Script {
        Script::build(
            MediaMeta::new(duration),
            GlobalContext::new("A room."),
            vec![],
            shots,
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn identical_scripts_deviate_zero() {
        let s = script_with_shots(8.0, vec![shot(1, 0.0, 5.0), shot(2, 5.0, 8.0)]);
        let (secs, frames) = boundary_deviation(&s, &s, 1.0).unwrap();
        assert_eq!(secs, 0.0);
        assert_eq!(frames, 0);
    }

    #[test]
    fn worked_example_half_second_thirteen_frames() {
        // hand oracle: pairs (2.0, 2.5) and (5.0, 4.5), mean(0.5, 0.5) = 0.5 s;
        // 0.5 * 25 = 12.5, rounded half-up = 13 frames
        let gold = script_with_shots(
            10.0,
            vec![shot(1, 0.0, 2.0), shot(2, 2.0, 5.0), shot(3, 5.0, 10.0)],
        );
        let cand = script_with_shots(
            10.0,
            vec![shot(1, 0.0, 2.5), shot(2, 2.5, 4.5), shot(3, 4.5, 10.0)],
        );
        let (secs, frames) = boundary_deviation(&gold, &cand, 1.0).unwrap();
        assert!((secs - 0.5).abs() < 1e-12);
        assert_eq!(frames, 13);
    }

    #[test]
    fn unmatched_boundary_costs_the_penalty() {
        let gold = script_with_shots(10.0, vec![shot(1, 0.0, 2.0), shot(2, 2.0, 10.0)]);
        let cand = script_with_shots(10.0, vec![shot(1, 0.0, 10.0)]);
        let (secs, _) = boundary_deviation(&gold, &cand, 1.0).unwrap();
        assert_eq!(secs, 1.0);
    }

    #[test]
    fn duration_mismatch_is_an_error() {
        let a = script_with_shots(10.0, vec![shot(1, 0.0, 10.0)]);
        let b = script_with_shots(9.0, vec![shot(1, 0.0, 9.0)]);
        assert!(matches!(
            boundary_deviation(&a, &b, 1.0),
            Err(EvalError::DurationMismatch { .. })
        ));
    }

    #[test]
    fn shot_matching_worked_example() {
        // hand oracle: [0,5) vs [0,4): inter 4, union 5, iou 0.8;
        // [5,10) vs [4,10): inter 5, union 6, iou 5/6
        let gold = script_with_shots(10.0, vec![shot(1, 0.0, 5.0), shot(2, 5.0, 10.0)]);
        let cand = script_with_shots(10.0, vec![shot(1, 0.0, 4.0), shot(2, 4.0, 10.0)]);
        let m = match_stream(&gold, &cand, StreamKind::Shots, &EvalConfig::default());
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(m.pairs[0].gold, "SHOT_1");
        assert_eq!(m.pairs[0].candidate, "SHOT_1");
        assert!((m.pairs[0].score - 0.8).abs() < 1e-12);
        assert_eq!(m.pairs[1].gold, "SHOT_2");
        assert!((m.pairs[1].score - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn event_type_mismatch_stays_unmatched() {
        let make = |etype: EventType| {
            let ev = AudioEvent {
                id: EventId::new(1),
                event_type: etype,
                time_range: TimeRange::new(1.0, 3.0),
                speaker: None,
                line: None,
                description: "d".to_string(),
            };
            Script::build(
                MediaMeta::new(10.0),
                GlobalContext::new("A room."),
                vec![],
                vec![],
                vec![ev],
            )
            .unwrap()
        };
        let m = match_stream(
            &make(EventType::Sfx),
            &make(EventType::Music),
            StreamKind::Events,
            &EvalConfig::default(),
        );
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_gold, vec!["EVENT_1"]);
        assert_eq!(m.unmatched_candidate, vec!["EVENT_1"]);
    }

    #[test]
    fn identical_scripts_evaluate_perfect() {
        let s = script_with_shots(8.0, vec![shot(1, 0.0, 5.0), shot(2, 5.0, 8.0)]);
        let report = evaluate(&s, &s, &EvalConfig::default()).unwrap();
        assert_eq!(report.boundary_deviation_seconds, 0.0);
        assert_eq!(report.shots.f1, 1.0);
        assert_eq!(report.entities.f1, 1.0);
        assert_eq!(report.events.f1, 1.0);
    }

    #[test]
    fn missing_event_scores_two_thirds() {
        let ev = |n: u32, a: f64, b: f64| AudioEvent {
            id: EventId::new(n),
            event_type: EventType::Music,
            time_range: TimeRange::new(a, b),
            speaker: None,
            line: None,
            description: "m".to_string(),
        };
        let gold = Script::build(
            MediaMeta::new(10.0),
            GlobalContext::new("A room."),
            vec![],
            vec![],
            vec![ev(1, 0.0, 2.0), ev(2, 4.0, 6.0)],
        )
        .unwrap();
        let cand = Script::build(
            MediaMeta::new(10.0),
            GlobalContext::new("A room."),
            vec![],
            vec![],
            vec![ev(1, 0.0, 2.0)],
        )
        .unwrap();
        let report = evaluate(&gold, &cand, &EvalConfig::default()).unwrap();
        assert!((report.events.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn token_f1_basics() {
        assert_eq!(token_f1("a tall man", "a tall man"), 1.0);
        assert_eq!(token_f1("a tall man", "red balloon"), 0.0);
        assert_eq!(token_f1("A TALL man!", "a tall, man"), 1.0);
        let half = token_f1("a b", "a c");
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_serialization_is_deterministic() {
        let s = script_with_shots(8.0, vec![shot(1, 0.0, 5.0), shot(2, 5.0, 8.0)]);
        let r1 = evaluate(&s, &s, &EvalConfig::default()).unwrap();
        let r2 = evaluate(&s, &s, &EvalConfig::default()).unwrap();
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(r1.to_json().contains("\"boundary_deviation_frames\": 0"));
    }
}
