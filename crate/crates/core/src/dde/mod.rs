//! Long-horizon integration of the delayed system, the Lyapunov monitor and
//! empirical rate fits.
//!
//! Integration runs in `x` coordinates; `z` quantities are derived afterwards.

mod fit;
mod history;
mod monitor;
mod sim;
mod trajectory;

pub use fit::{fit_rate, RateFit, FIT_FLOOR, MIN_FIT_NODES};
pub use history::HistorySpec;
pub use monitor::{lyapunov_monitor, pointwise_margins, BurnIn, MonitorReport};
pub use sim::{simulate, SimConfig};
pub use trajectory::{SimStats, Trajectory};
