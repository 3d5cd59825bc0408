//! Realized jump schedules: time-ordered compound-Poisson event lists over a
//! finite horizon.

use crate::error::CoreError;
use crate::grid::GridFunction;

/// Half-open band `(lo, hi]` of jump norms; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Band {
        assert!(lo >= 0.0 && hi >= lo, "band ({lo}, {hi}] is malformed");
        Band { lo, hi }
    }

    pub fn above(lo: f64) -> Band {
        Band::new(lo, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x <= self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo >= self.hi
    }
}

/// One jump: its arrival time, the state-space jump vector, and its H-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub vector: GridFunction,
    pub norm: f64,
}

/// Time-ordered list of the jumps with norm inside one band over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSchedule {
    pub events: Vec<JumpEvent>,
    pub horizon: f64,
    pub band: Band,
}

impl JumpSchedule {
    pub fn empty(horizon: f64, band: Band) -> JumpSchedule {
        JumpSchedule {
            events: Vec::new(),
            horizon,
            band,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// First event time with norm exceeding `threshold`.
    pub fn first_time_exceeding(&self, threshold: f64) -> Option<f64> {
        self.events
            .iter()
            .find(|e| e.norm > threshold)
            .map(|e| e.time)
    }

    /// Inter-arrival gaps (first gap measured from time zero).
    pub fn inter_arrivals(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.events
            .iter()
            .map(|e| {
                let gap = e.time - prev;
                prev = e.time;
                gap
            })
            .collect()
    }

    /// Merge two schedules over the same horizon in time order; the merged
    /// band is the convex hull of the two input bands.
    pub fn merge(mut self, mut other: JumpSchedule) -> JumpSchedule {
        assert_eq!(self.horizon, other.horizon, "horizon mismatch");
        let band = Band::new(self.band.lo.min(other.band.lo), self.band.hi.max(other.band.hi));
        let mut events = Vec::with_capacity(self.len() + other.len());
        let mut a = self.events.drain(..).peekable();
        let mut b = other.events.drain(..).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x.time <= y.time {
                        events.push(a.next().unwrap());
                    } else {
                        events.push(b.next().unwrap());
                    }
                }
                (Some(_), None) => events.push(a.next().unwrap()),
                (None, Some(_)) => events.push(b.next().unwrap()),
                (None, None) => break,
            }
        }
        JumpSchedule {
            events,
            horizon: self.horizon,
            band,
        }
    }

    /// Check the structural invariants: strictly increasing times inside the
    /// horizon and norms inside the band.
    pub fn validate(&self) -> Result<(), CoreError> {
        let mut prev = 0.0;
        for e in &self.events {
            if e.time <= prev || e.time > self.horizon {
                return Err(CoreError::invalid(format!(
                    "event time {} breaks the strictly increasing order on (0, {}]",
                    e.time, self.horizon
                )));
            }
            if !self.band.contains(e.norm) {
                return Err(CoreError::invalid(format!(
                    "jump norm {} escapes the band ({}, {}]",
                    e.norm, self.band.lo, self.band.hi
                )));
            }
            prev = e.time;
        }
        Ok(())
    }
}
