//! Finite coarse spaces, their Vietoris–Rips and Čech filtrations, and
//! certificates of essential connectivity along entourage schedules.

pub mod bits;
pub mod certify;
pub mod coarse;
pub mod complexes;
pub mod homology;
pub mod spaces;
pub mod subdivision;
