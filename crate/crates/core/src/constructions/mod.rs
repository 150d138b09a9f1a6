//! Structured game families with exact expected-payoff kernels.

mod descriptor;
mod majority;
mod observer;
mod regular;
mod xor;

pub use descriptor::{BuiltGame, GameSpec};
pub use majority::{action_sign, MajorityMpGame};
pub use observer::{ObserverGame, ObserverSubgame, Side};
pub use regular::{balance_ratio, random_regular_matrix, REGULAR_RETRY_LIMIT};
pub use xor::{ViolationSearch, XorCertificate, XorIrGame, MAX_KAPPA};
