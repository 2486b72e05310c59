//! Continuous-authentication sessions.
//!
//! A session asserts one UAV class at enrolment. Every tick the latest RF
//! evidence is re-classified and checked against that class. A match at or
//! above the confidence threshold passes; anything else is a failure that
//! flags the session, and `revoke_after` consecutive failures revoke it.
//! Revocation is terminal: recovery means opening a new session.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{Prediction, Predictor};
use crate::rf_ingest::ClassLabel;

pub const DEFAULT_INTERVAL_SECONDS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trust {
    Granted,
    Flagged,
    Revoked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Flag,
    Revoke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Match,
    LowConfidence,
    ClassMismatch,
    NoDroneDetected,
    /// No evidence arrived for the tick.
    StreamGap,
}

/// What a single failed check does before escalation is considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureAction {
    Flag,
    Revoke,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthPolicy {
    pub confidence_threshold: f64,
    pub interval_seconds: f64,
    /// Consecutive non-pass outcomes that escalate to revocation.
    pub revoke_after: u32,
    pub on_low_confidence: FailureAction,
    pub on_class_mismatch: FailureAction,
    pub on_no_drone: FailureAction,
    pub on_stream_gap: FailureAction,
}

impl Default for AuthPolicy {
    fn default() -> Self {
        Self {
            confidence_threshold: 0.8,
            interval_seconds: DEFAULT_INTERVAL_SECONDS,
            revoke_after: 2,
            on_low_confidence: FailureAction::Flag,
            on_class_mismatch: FailureAction::Flag,
            on_no_drone: FailureAction::Flag,
            on_stream_gap: FailureAction::Flag,
        }
    }
}

impl AuthPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.confidence_threshold > 0.0 && self.confidence_threshold < 1.0) {
            return Err(Error::config("confidence_threshold", "must be in (0, 1)"));
        }
        if !(self.interval_seconds > 0.0 && self.interval_seconds.is_finite()) {
            return Err(Error::config("interval_seconds", "must be positive"));
        }
        if self.revoke_after == 0 {
            return Err(Error::config("revoke_after", "must be at least 1"));
        }
        Ok(())
    }

    fn action(&self, reason: Reason) -> FailureAction {
        match reason {
            Reason::Match => FailureAction::Flag,
            Reason::LowConfidence => self.on_low_confidence,
            Reason::ClassMismatch => self.on_class_mismatch,
            Reason::NoDroneDetected => self.on_no_drone,
            Reason::StreamGap => self.on_stream_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub enrolled_class: ClassLabel,
    pub trust: Trust,
    /// Seconds on the session clock.
    pub last_verified_at: f64,
    pub interval_seconds: f64,
    pub confidence_threshold: f64,
    pub consecutive_failures: u32,
}

impl SessionState {
    /// Opens a granted session after initial authentication at `started_at`.
    pub fn open(session_id: impl Into<String>, enrolled_class: ClassLabel, policy: &AuthPolicy, started_at: f64) -> Result<Self> {
        policy.validate()?;
        Ok(Self {
            session_id: session_id.into(),
            enrolled_class,
            trust: Trust::Granted,
            last_verified_at: started_at,
            interval_seconds: policy.interval_seconds,
            confidence_threshold: policy.confidence_threshold,
            consecutive_failures: 0,
        })
    }

    pub fn is_revoked(&self) -> bool {
        self.trust == Trust::Revoked
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthDecision {
    pub prediction: Option<Prediction>,
    pub outcome: Outcome,
    pub reason: Reason,
}

fn classify_reason(state: &SessionState, prediction: Option<&Prediction>) -> Reason {
    match prediction {
        None => Reason::StreamGap,
        Some(p) if p.predicted == state.enrolled_class.code() => {
            if p.confidence >= state.confidence_threshold {
                Reason::Match
            } else {
                Reason::LowConfidence
            }
        }
        Some(p) if p.predicted == ClassLabel::NoDrone.code() => Reason::NoDroneDetected,
        Some(_) => Reason::ClassMismatch,
    }
}

/// Applies the policy table to one verification result.
pub fn apply_policy(
    state: &SessionState,
    prediction: Option<Prediction>,
    policy: &AuthPolicy,
    at: f64,
) -> Result<(SessionState, AuthDecision)> {
    if state.is_revoked() {
        return Err(Error::TerminalSession(state.session_id.clone()));
    }
    if at < state.last_verified_at {
        return Err(Error::ClockRegression {
            now: at,
            last: state.last_verified_at,
        });
    }
    let reason = classify_reason(state, prediction.as_ref());
    let mut next = state.clone();
    next.last_verified_at = at;
    let outcome = if reason == Reason::Match {
        next.consecutive_failures = 0;
        next.trust = Trust::Granted;
        Outcome::Pass
    } else {
        next.consecutive_failures += 1;
        if policy.action(reason) == FailureAction::Revoke || next.consecutive_failures >= policy.revoke_after {
            next.trust = Trust::Revoked;
            Outcome::Revoke
        } else {
            next.trust = Trust::Flagged;
            Outcome::Flag
        }
    };
    Ok((
        next,
        AuthDecision {
            prediction,
            outcome,
            reason,
        },
    ))
}

/// Classifies `evidence` and applies the policy.
pub fn authenticate_step<P: Predictor + ?Sized>(
    state: &SessionState,
    evidence: &[f64],
    model: &P,
    policy: &AuthPolicy,
    at: f64,
) -> Result<(SessionState, AuthDecision)> {
    if state.is_revoked() {
        return Err(Error::TerminalSession(state.session_id.clone()));
    }
    let prediction = model.predict_one(evidence)?;
    apply_policy(state, Some(prediction), policy, at)
}

/// One tick's worth of evidence.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Features(Vec<f64>),
    Gap,
}

/// Source of verification instants, in seconds.
pub trait TickSource {
    fn next_tick(&mut self) -> f64;
}

/// Deterministic clock advancing a fixed interval per tick.
#[derive(Debug, Clone)]
pub struct SimulatedClock {
    next: f64,
    interval: f64,
}

impl SimulatedClock {
    pub fn new(first_tick: f64, interval: f64) -> Self {
        Self {
            next: first_tick,
            interval,
        }
    }
}

impl TickSource for SimulatedClock {
    fn next_tick(&mut self) -> f64 {
        let t = self.next;
        self.next += self.interval;
        t
    }
}

/// Real-time clock that sleeps until each interval boundary.
#[derive(Debug)]
pub struct WallClock {
    start: Instant,
    interval: Duration,
    ticks: u32,
}

impl WallClock {
    pub fn new(interval: Duration) -> Self {
        Self {
            start: Instant::now(),
            interval,
            ticks: 0,
        }
    }
}

impl TickSource for WallClock {
    fn next_tick(&mut self) -> f64 {
        self.ticks += 1;
        let due = self.start + self.interval * self.ticks;
        let now = Instant::now();
        if due > now {
            std::thread::sleep(due - now);
        }
        (Instant::now() - self.start).as_secs_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub tick: u64,
    pub at: f64,
    pub session_id: String,
    pub trust: Trust,
    #[serde(flatten)]
    pub decision: AuthDecision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub entries: Vec<LogEntry>,
    pub final_state: SessionState,
}

/// Drives a session over an evidence stream, one decision per tick, until
/// the stream ends or the session is revoked.
pub fn run_session<P, I, C>(
    state: SessionState,
    stream: I,
    model: &P,
    policy: &AuthPolicy,
    clock: &mut C,
) -> Result<SessionLog>
where
    P: Predictor + ?Sized,
    I: IntoIterator<Item = Evidence>,
    C: TickSource + ?Sized,
{
    policy.validate()?;
    if state.is_revoked() {
        return Err(Error::TerminalSession(state.session_id.clone()));
    }
    let mut state = state;
    let mut entries = Vec::new();
    for (tick, evidence) in stream.into_iter().enumerate() {
        let at = clock.next_tick();
        let (next, decision) = match evidence {
            Evidence::Features(x) => authenticate_step(&state, &x, model, policy, at)?,
            Evidence::Gap => apply_policy(&state, None, policy, at)?,
        };
        state = next;
        entries.push(LogEntry {
            tick: tick as u64,
            at,
            session_id: state.session_id.clone(),
            trust: state.trust,
            decision,
        });
        if state.is_revoked() {
            break;
        }
    }
    Ok(SessionLog {
        entries,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(class: ClassLabel, confidence: f64) -> Prediction {
        let rest = (1.0 - confidence) / 3.0;
        let mut p = vec![rest; 4];
        p[class.code()] = confidence;
        Prediction::from_probabilities(p)
    }

    fn bebop_session() -> (SessionState, AuthPolicy) {
        let policy = AuthPolicy::default();
        (SessionState::open("s1", ClassLabel::Bebop, &policy, 0.0).unwrap(), policy)
    }

    #[test]
    fn confident_match_passes() {
        let (s, p) = bebop_session();
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.99)), &p, 10.0).unwrap();
        assert_eq!((d.outcome, d.reason, s.trust), (Outcome::Pass, Reason::Match, Trust::Granted));
    }

    #[test]
    fn two_mismatches_revoke() {
        let (s, p) = bebop_session();
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::AR, 0.95)), &p, 10.0).unwrap();
        assert_eq!((d.outcome, d.reason, s.trust), (Outcome::Flag, Reason::ClassMismatch, Trust::Flagged));
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::AR, 0.95)), &p, 20.0).unwrap();
        assert_eq!((d.outcome, s.trust), (Outcome::Revoke, Trust::Revoked));
        assert!(matches!(
            apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.99)), &p, 30.0),
            Err(Error::TerminalSession(_))
        ));
    }

    #[test]
    fn low_confidence_flags() {
        let (s, p) = bebop_session();
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.5)), &p, 10.0).unwrap();
        assert_eq!((d.outcome, d.reason, s.trust), (Outcome::Flag, Reason::LowConfidence, Trust::Flagged));
    }

    #[test]
    fn pass_clears_failure_streak() {
        let (s, p) = bebop_session();
        let (s, _) = apply_policy(&s, Some(pred(ClassLabel::NoDrone, 0.9)), &p, 10.0).unwrap();
        assert_eq!(s.consecutive_failures, 1);
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.9)), &p, 20.0).unwrap();
        assert_eq!((d.outcome, s.consecutive_failures, s.trust), (Outcome::Pass, 0, Trust::Granted));
    }

    #[test]
    fn no_drone_reason_and_configurable_action() {
        let (s, mut p) = bebop_session();
        p.on_no_drone = FailureAction::Revoke;
        let (s, d) = apply_policy(&s, Some(pred(ClassLabel::NoDrone, 0.9)), &p, 10.0).unwrap();
        assert_eq!((d.reason, d.outcome, s.trust), (Reason::NoDroneDetected, Outcome::Revoke, Trust::Revoked));
    }

    #[test]
    fn gap_is_a_flag() {
        let (s, p) = bebop_session();
        let (s, d) = apply_policy(&s, None, &p, 10.0).unwrap();
        assert_eq!((d.reason, d.outcome, s.trust), (Reason::StreamGap, Outcome::Flag, Trust::Flagged));
    }

    #[test]
    fn clock_cannot_go_backwards() {
        let (s, p) = bebop_session();
        let (s, _) = apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.9)), &p, 10.0).unwrap();
        assert!(matches!(
            apply_policy(&s, Some(pred(ClassLabel::Bebop, 0.9)), &p, 5.0),
            Err(Error::ClockRegression { .. })
        ));
    }

    #[test]
    fn policy_validation() {
        let bad = AuthPolicy {
            confidence_threshold: 1.5,
            ..AuthPolicy::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config { field: "confidence_threshold", .. })));
    }

    #[test]
    fn simulated_clock_steps() {
        let mut c = SimulatedClock::new(10.0, 10.0);
        assert_eq!([c.next_tick(), c.next_tick(), c.next_tick()], [10.0, 20.0, 30.0]);
    }
}
