//! Observables, pre- and post-selected ensembles, weak values and weak operators.

mod ensemble;
mod observable;
mod weak;

pub use ensemble::PpsEnsemble;
pub use observable::Observable;
pub use weak::{adjoint_weak_operator, weak_operator, weak_value, WeakOperator, WeakValue};
