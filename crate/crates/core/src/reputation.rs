//! Reputation scores built from post-settlement feedback.
//!
//! A successful trade moves the ratee's score toward the received feedback
//! by a tuning weight `alpha = (FC + TV) * CA`, where
//!
//! * `FC` discounts feedback from low-reputation or habitually negative
//!   raters,
//! * `TV` weighs the trade by its value relative to the largest seen,
//! * `CA` decays feedback exchanged in bursts between the same pair.
//!
//! The blended score is then aged by `exp(-failed / total)`. A violated
//! agreement instead multiplies the score by `2 - 2^(failed / total)`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ActorId;

#[derive(Debug, Error)]
pub enum ReputationError {
    #[error("feedback must lie strictly inside (0, 1), got {0}")]
    FeedbackOutOfRange(f64),
    #[error("transaction value must be positive and finite, got {0}")]
    InvalidValue(f64),
    #[error("unknown actor {0}")]
    UnknownActor(ActorId),
    #[error("record for {record} does not match event actor {expected}")]
    ActorMismatch { record: ActorId, expected: ActorId },
    #[error("an actor cannot rate itself ({0})")]
    SelfRating(ActorId),
    #[error("pair count must be at least 1")]
    ZeroPairCount,
    #[error("reputation log line {line}: {source}")]
    Decode {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which tallies feed the second factor of feedback credibility.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackDirection {
    /// Positive/negative feedback the rater has handed out.
    #[default]
    GivenByRater,
    /// Positive/negative feedback the ratee has received.
    ReceivedByRatee,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReputationConfig {
    pub initial_score: f64,
    /// Exponent `a` of the collusion factor.
    pub collusion_exponent: u32,
    /// Events closer than this to the ratee's last request extend a burst.
    pub burst_window_secs: i64,
    pub feedback_direction: FeedbackDirection,
}

impl Default for ReputationConfig {
    fn default() -> Self {
        Self {
            initial_score: 0.5,
            collusion_exponent: 2,
            burst_window_secs: 3600,
            feedback_direction: FeedbackDirection::GivenByRater,
        }
    }
}

/// Feedback at or above this counts as positive in the tallies.
pub const POSITIVE_FEEDBACK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationRecord {
    pub actor: ActorId,
    pub score: f64,
    pub feedback_pos_given: u64,
    pub feedback_neg_given: u64,
    pub feedback_pos_received: u64,
    pub feedback_neg_received: u64,
    pub contracts_failed: u64,
    pub contracts_total: u64,
    /// Largest transaction value seen, `v_m`.
    pub max_transaction_value: f64,
    pub last_request_time: Option<i64>,
    /// Transactions with each counterparty inside the current burst.
    pub pair_burst_counts: BTreeMap<ActorId, u64>,
    pub collusion_exponent: u32,
}

impl ReputationRecord {
    pub fn new(actor: ActorId, config: &ReputationConfig) -> Self {
        Self {
            actor,
            score: config.initial_score,
            feedback_pos_given: 0,
            feedback_neg_given: 0,
            feedback_pos_received: 0,
            feedback_neg_received: 0,
            contracts_failed: 0,
            contracts_total: 0,
            max_transaction_value: 0.0,
            last_request_time: None,
            pair_burst_counts: BTreeMap::new(),
            collusion_exponent: config.collusion_exponent,
        }
    }

    fn note_given(&mut self, feedback: f64) {
        if feedback >= POSITIVE_FEEDBACK {
            self.feedback_pos_given += 1;
        } else {
            self.feedback_neg_given += 1;
        }
    }

    fn note_received(&mut self, feedback: f64) {
        if feedback >= POSITIVE_FEEDBACK {
            self.feedback_pos_received += 1;
        } else {
            self.feedback_neg_received += 1;
        }
    }
}

/// Post-settlement rating message. `feedback_j` is what `actor_j` receives
/// from `actor_i`, and vice versa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingEvent {
    pub actor_i: ActorId,
    pub actor_j: ActorId,
    pub t_value: f64,
    pub feedback_i: f64,
    pub feedback_j: f64,
    pub event_time: i64,
}

impl RatingEvent {
    /// The same trade seen from the other side.
    pub fn reversed(&self) -> Self {
        Self {
            actor_i: self.actor_j.clone(),
            actor_j: self.actor_i.clone(),
            t_value: self.t_value,
            feedback_i: self.feedback_j,
            feedback_j: self.feedback_i,
            event_time: self.event_time,
        }
    }

    pub fn validate(&self) -> Result<(), ReputationError> {
        for f in [self.feedback_i, self.feedback_j] {
            if !(f > 0.0 && f < 1.0) {
                return Err(ReputationError::FeedbackOutOfRange(f));
            }
        }
        if !(self.t_value.is_finite() && self.t_value > 0.0) {
            return Err(ReputationError::InvalidValue(self.t_value));
        }
        if self.actor_i == self.actor_j {
            return Err(ReputationError::SelfRating(self.actor_i.clone()));
        }
        Ok(())
    }
}

/// `R_i / (R_i + R_j) * F+ / (F- + F+)`, zero when either denominator is.
pub fn credibility(rater_score: f64, ratee_score: f64, positive: u64, negative: u64) -> f64 {
    let scores = rater_score + ratee_score;
    let tallies = positive + negative;
    if scores <= 0.0 || tallies == 0 {
        return 0.0;
    }
    (rater_score / scores) * (positive as f64 / tallies as f64)
}

/// Feedback credibility of `rater` toward `ratee` from the rater's
/// given-feedback tallies.
pub fn feedback_credibility(rater: &ReputationRecord, ratee: &ReputationRecord) -> f64 {
    credibility(
        rater.score,
        ratee.score,
        rater.feedback_pos_given,
        rater.feedback_neg_given,
    )
}

/// `TV = t_value / v_m`; callers update `v_m` first so the result is ≤ 1.
pub fn transaction_weight(t_value: f64, v_m: f64) -> f64 {
    if v_m <= 0.0 {
        return 0.0;
    }
    t_value / v_m
}

/// `CA = (1 / pair_count)^a`.
pub fn collusion_factor(pair_count: u64, a: u32) -> Result<f64, ReputationError> {
    if pair_count == 0 {
        return Err(ReputationError::ZeroPairCount);
    }
    Ok((1.0 / pair_count as f64).powi(a as i32))
}

/// `exp(-failed / total)`, 1 with no contract history.
pub fn aging_factor(failed: u64, total: u64) -> f64 {
    if total == 0 {
        1.0
    } else {
        (-(failed as f64) / total as f64).exp()
    }
}

/// `VF = 2 - 2^(failed / total)`, 1 with no contract history.
pub fn violation_factor(failed: u64, total: u64) -> f64 {
    if total == 0 {
        1.0
    } else {
        2.0 - 2f64.powf(failed as f64 / total as f64)
    }
}

/// Intermediate terms of one rating update, kept for audit and tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingTerms {
    pub fc: f64,
    pub tv: f64,
    pub ca: f64,
    /// `(FC + TV) * CA` clamped to `[0, 1]`.
    pub alpha: f64,
    pub pair_count: u64,
}

/// Applies a successful-trade rating to `ratee` (`actor_j`) given by `rater`
/// (`actor_i`), returning the updated ratee and the terms used.
///
/// The rater's tallies are taken to already include the feedback being
/// given, matching the update-before-use rule for `v_m`.
pub fn apply_rating(
    ratee: &ReputationRecord,
    rater: &ReputationRecord,
    event: &RatingEvent,
    config: &ReputationConfig,
) -> Result<(ReputationRecord, RatingTerms), ReputationError> {
    event.validate()?;
    if ratee.actor != event.actor_j {
        return Err(ReputationError::ActorMismatch {
            record: ratee.actor.clone(),
            expected: event.actor_j.clone(),
        });
    }
    if rater.actor != event.actor_i {
        return Err(ReputationError::ActorMismatch {
            record: rater.actor.clone(),
            expected: event.actor_i.clone(),
        });
    }
    let feedback = event.feedback_j;
    let mut next = ratee.clone();

    next.max_transaction_value = next.max_transaction_value.max(event.t_value);

    let in_burst = next
        .last_request_time
        .is_some_and(|t| (event.event_time - t).abs() <= config.burst_window_secs);
    if !in_burst {
        next.pair_burst_counts.clear();
    }
    let pair_count = {
        let c = next.pair_burst_counts.entry(rater.actor.clone()).or_insert(0);
        *c += 1;
        *c
    };
    next.last_request_time = Some(event.event_time);
    next.contracts_total += 1;
    next.note_received(feedback);

    let fc = match config.feedback_direction {
        FeedbackDirection::GivenByRater => {
            let mut r = rater.clone();
            r.note_given(feedback);
            feedback_credibility(&r, ratee)
        }
        FeedbackDirection::ReceivedByRatee => credibility(
            rater.score,
            ratee.score,
            next.feedback_pos_received,
            next.feedback_neg_received,
        ),
    };
    let tv = transaction_weight(event.t_value, next.max_transaction_value);
    let ca = collusion_factor(pair_count, config.collusion_exponent)?;
    let alpha = ((fc + tv) * ca).clamp(0.0, 1.0);

    let blended = (1.0 - alpha) * ratee.score + alpha * feedback;
    next.score = (blended * aging_factor(next.contracts_failed, next.contracts_total)).clamp(0.0, 1.0);
    next.collusion_exponent = config.collusion_exponent;

    Ok((
        next,
        RatingTerms {
            fc,
            tv,
            ca,
            alpha,
            pair_count,
        },
    ))
}

/// Records a violated agreement: both contract counters move first, then the
/// score is multiplied by the violation factor.
pub fn apply_violation(ratee: &ReputationRecord) -> ReputationRecord {
    let mut next = ratee.clone();
    next.contracts_failed += 1;
    next.contracts_total += 1;
    let vf = violation_factor(next.contracts_failed, next.contracts_total);
    next.score = (ratee.score * vf).clamp(0.0, 1.0);
    next
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReputationEvent {
    Register {
        actor: ActorId,
        /// Starting score when it differs from the configured default.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        score: Option<f64>,
    },
    Rating(RatingEvent),
    Violation { actor: ActorId, time: i64 },
}

/// Score movement caused by one rating event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingOutcome {
    pub delta_i: f64,
    pub delta_j: f64,
    pub terms_i: RatingTerms,
    pub terms_j: RatingTerms,
}

/// Per-actor records plus the append-only event log they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReputationStore {
    pub config: ReputationConfig,
    records: BTreeMap<ActorId, ReputationRecord>,
    #[serde(skip)]
    log: Vec<ReputationEvent>,
}

impl Default for ReputationStore {
    fn default() -> Self {
        Self::new(ReputationConfig::default())
    }
}

impl ReputationStore {
    pub fn new(config: ReputationConfig) -> Self {
        Self {
            config,
            records: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn get(&self, actor: &ActorId) -> Option<&ReputationRecord> {
        self.records.get(actor)
    }

    pub fn score(&self, actor: &ActorId) -> Option<f64> {
        self.records.get(actor).map(|r| r.score)
    }

    pub fn records(&self) -> impl Iterator<Item = &ReputationRecord> {
        self.records.values()
    }

    pub fn log(&self) -> &[ReputationEvent] {
        &self.log
    }

    pub fn contains(&self, actor: &ActorId) -> bool {
        self.records.contains_key(actor)
    }

    /// Adds an actor with the neutral starting score. No-op if present.
    pub fn register(&mut self, actor: &ActorId) {
        self.register_with_score(actor, None);
    }

    /// Like [`register`](Self::register) with an explicit starting score,
    /// clamped to `[0, 1]`.
    pub fn register_with_score(&mut self, actor: &ActorId, score: Option<f64>) {
        if !self.records.contains_key(actor) {
            let mut rec = ReputationRecord::new(actor.clone(), &self.config);
            let score = score.filter(|s| s.is_finite()).map(|s| s.clamp(0.0, 1.0));
            if let Some(s) = score {
                rec.score = s;
            }
            self.records.insert(actor.clone(), rec);
            self.log.push(ReputationEvent::Register {
                actor: actor.clone(),
                score,
            });
        }
    }

    /// Applies both directions of a rating event against the pre-event
    /// records, then credits each side with the feedback it gave.
    pub fn apply_rating(&mut self, event: &RatingEvent) -> Result<RatingOutcome, ReputationError> {
        event.validate()?;
        let pre_i = self
            .records
            .get(&event.actor_i)
            .ok_or_else(|| ReputationError::UnknownActor(event.actor_i.clone()))?
            .clone();
        let pre_j = self
            .records
            .get(&event.actor_j)
            .ok_or_else(|| ReputationError::UnknownActor(event.actor_j.clone()))?
            .clone();
        let (mut next_j, terms_j) = apply_rating(&pre_j, &pre_i, event, &self.config)?;
        let (mut next_i, terms_i) = apply_rating(&pre_i, &pre_j, &event.reversed(), &self.config)?;
        next_i.note_given(event.feedback_j);
        next_j.note_given(event.feedback_i);
        let outcome = RatingOutcome {
            delta_i: next_i.score - pre_i.score,
            delta_j: next_j.score - pre_j.score,
            terms_i,
            terms_j,
        };
        self.records.insert(event.actor_i.clone(), next_i);
        self.records.insert(event.actor_j.clone(), next_j);
        self.log.push(ReputationEvent::Rating(event.clone()));
        Ok(outcome)
    }

    pub fn apply_violation(&mut self, actor: &ActorId, time: i64) -> Result<&ReputationRecord, ReputationError> {
        let rec = self
            .records
            .get_mut(actor)
            .ok_or_else(|| ReputationError::UnknownActor(actor.clone()))?;
        *rec = apply_violation(rec);
        self.log.push(ReputationEvent::Violation {
            actor: actor.clone(),
            time,
        });
        Ok(rec)
    }

    pub fn apply_event(&mut self, event: &ReputationEvent) -> Result<(), ReputationError> {
        match event {
            ReputationEvent::Register { actor, score } => self.register_with_score(actor, *score),
            ReputationEvent::Rating(e) => {
                self.apply_rating(e)?;
            }
            ReputationEvent::Violation { actor, time } => {
                self.apply_violation(actor, *time)?;
            }
        }
        Ok(())
    }

    /// Rebuilds a store by replaying an event log from scratch.
    pub fn replay<'a>(
        config: ReputationConfig,
        events: impl IntoIterator<Item = &'a ReputationEvent>,
    ) -> Result<Self, ReputationError> {
        let mut store = Self::new(config);
        for e in events {
            store.apply_event(e)?;
        }
        Ok(store)
    }

    pub fn write_log<W: Write>(&self, mut w: W) -> Result<(), ReputationError> {
        for e in &self.log {
            serde_json::to_writer(&mut w, e).map_err(std::io::Error::other)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_log<R: BufRead>(r: R) -> Result<Vec<ReputationEvent>, ReputationError> {
        let mut out = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(
                serde_json::from_str(&line).map_err(|e| ReputationError::Decode {
                    line: n + 1,
                    source: e,
                })?,
            );
        }
        Ok(out)
    }
}
