//! Worst-case-regret regulation of a monopolist.
//!
//! The regulator picks a revenue rule `rho(q, p)`; nature picks an inverse demand
//! `V` and a cost `C`; the firm best-responds. This crate computes the regret-optimal
//! rule in closed form, re-derives its constants numerically, simulates the firm
//! under arbitrary rules, and certifies worst-case regret bounds with the extremal
//! markets that drive the lower-bound argument.
//!
//! Modules:
//! - [`market`]: piecewise demand/cost functions, total value, social optimum.
//! - [`policy`]: revenue rules and their derived maxima.
//! - [`firm`]: the firm's best responses and the welfare accounting.
//! - [`analysis`]: closed-form constants, numerical maximin, inequality checks.
//! - [`adversary`]: extremal scenario families and regret certification.
//! - [`scenario`]: the text format for markets, policies and witnesses.

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod firm;
pub mod market;
pub mod numeric;
pub mod policy;
pub mod random;
pub mod report;
pub mod scenario;
pub mod suites;

pub use analysis::{constants, AlphaConstants};
pub use error::{Error, Result};
pub use firm::{best_responses, outcome, FirmSolver, Outcome, TieBreak};
pub use market::{Market, PiecewiseFn, Role, Segment, SegmentKind};
pub use policy::{optimal_policy, Policy, Revenue, TablePolicy};
