//! Online tracking of last-exit functionals along a piecewise-linear path.
//!
//! Both the event-driven compound Poisson paths and the Euler substeps of
//! the diffusion families reduce to a sequence of linear segments plus
//! instantaneous downward jumps. Crossing times and per-segment occupation
//! splits are computed in closed form, so the bounded-variation families
//! are simulated exactly.

use super::PathFunctionals;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ExitTracker {
    t: f64,
    x: f64,
    occ_neg: f64,
    occ_pos: f64,
    last_up: f64,
    occ_neg_at_last_up: f64,
    x_at_last_up: f64,
    last_down: f64,
    occ_pos_at_last_down: f64,
    x_at_last_down: f64,
    crept_at_last_down: bool,
}

impl ExitTracker {
    pub fn new(x0: f64) -> Self {
        ExitTracker {
            t: 0.0,
            x: x0,
            occ_neg: 0.0,
            occ_pos: 0.0,
            last_up: 0.0,
            occ_neg_at_last_up: 0.0,
            // sup ∅ = 0 convention: the position "at" a zero last-exit
            // time is the start position.
            x_at_last_up: x0,
            last_down: 0.0,
            occ_pos_at_last_down: 0.0,
            x_at_last_down: x0,
            crept_at_last_down: false,
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn position(&self) -> f64 {
        self.x
    }

    /// Advance along a linear segment of duration `dt` ending at `x_end`,
    /// recording any zero crossing and the occupation split.
    pub fn advance_linear(&mut self, dt: f64, x_end: f64) {
        debug_assert!(dt >= 0.0);
        let x0 = self.x;
        let t1 = self.t + dt;
        if x0 < 0.0 {
            if x_end > 0.0 {
                // Continuous up-crossing: the path leaves the negative
                // half-line at height exactly 0.
                let tc = self.t + dt * (x0 / (x0 - x_end));
                self.occ_neg += tc - self.t;
                self.occ_pos += t1 - tc;
                self.last_up = tc;
                self.occ_neg_at_last_up = self.occ_neg;
                self.x_at_last_up = 0.0;
            } else {
                self.occ_neg += dt;
            }
        } else if x0 > 0.0 {
            if x_end < 0.0 {
                // Continuous down-crossing: a creeping exit from the
                // positive half-line.
                let tc = self.t + dt * (x0 / (x0 - x_end));
                self.occ_pos += tc - self.t;
                self.occ_neg += t1 - tc;
                self.last_down = tc;
                self.occ_pos_at_last_down = self.occ_pos;
                self.x_at_last_down = 0.0;
                self.crept_at_last_down = true;
            } else {
                self.occ_pos += dt;
            }
        } else {
            // Started exactly at 0: the open segment lies on one side.
            if x_end > 0.0 {
                self.occ_pos += dt;
            } else if x_end < 0.0 {
                self.occ_neg += dt;
            }
        }
        self.t = t1;
        self.x = x_end;
    }

    /// Apply an instantaneous downward jump to `x_new` at the current time.
    pub fn apply_jump(&mut self, x_new: f64) {
        debug_assert!(x_new <= self.x);
        if self.x > 0.0 && x_new < 0.0 {
            self.last_down = self.t;
            self.occ_pos_at_last_down = self.occ_pos;
            self.x_at_last_down = x_new;
            self.crept_at_last_down = false;
        }
        self.x = x_new;
    }

    /// Close the path at the current time and read off the functionals.
    ///
    /// Since upward motion is continuous, the path sits strictly below 0
    /// at the endpoint if and only if the last exit from the negative
    /// half-line is the endpoint itself, and symmetrically for the
    /// positive side.
    pub fn finish(self) -> PathFunctionals {
        let horizon = self.t;
        let plus_is_horizon = self.x < 0.0;
        let minus_is_horizon = self.x > 0.0;
        PathFunctionals {
            horizon,
            t_plus: if plus_is_horizon { horizon } else { self.last_up },
            x_at_t_plus: if plus_is_horizon {
                self.x
            } else {
                self.x_at_last_up
            },
            occ_neg_before_t_plus: if plus_is_horizon {
                self.occ_neg
            } else {
                self.occ_neg_at_last_up
            },
            event_plus_is_horizon: plus_is_horizon,
            t_minus: if minus_is_horizon {
                horizon
            } else {
                self.last_down
            },
            x_at_t_minus: if minus_is_horizon {
                self.x
            } else {
                self.x_at_last_down
            },
            occ_pos_before_t_minus: if minus_is_horizon {
                self.occ_pos
            } else {
                self.occ_pos_at_last_down
            },
            event_minus_is_horizon: minus_is_horizon,
            crept_at_t_minus: !minus_is_horizon && self.last_down > 0.0 && self.crept_at_last_down,
            occ_neg_total: self.occ_neg,
            occ_pos_total: self.occ_pos,
        }
    }
}
