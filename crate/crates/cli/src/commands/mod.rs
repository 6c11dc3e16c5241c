mod convert;
mod eval;
mod lift;
mod selftest;

pub use convert::cmd_convert_omni3d;
pub use eval::{cmd_eval, eval_config};
pub use lift::{cmd_lift, Detection2D, DetectionsFile, LiftSummary};
pub use selftest::{cmd_selftest, SelftestSummary, SuiteResult};
