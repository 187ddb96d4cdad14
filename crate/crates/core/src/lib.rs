//! Monitors for finite-state safety properties observed through lossy event
//! streams.
//!
//! A property is a minimal DFA with a trap error state. A [`LossModel`]
//! describes, for every symbol of the lossy stream, which segments of the
//! original stream it may stand for. [`synthesis::synthesize_optimal`] builds
//! an alternate monitor over the lossy alphabet whose states are labelled by
//! sets of property states. The monitor only reports a violation when every
//! original execution consistent with the lossy stream violates the property,
//! and among all monitors with that guarantee it reports the most violations.
//!
//! ```
//! use lossmon_core::{bundled, lossmodel::LossModel, runtime::{Monitor, Verdict}, synthesis};
//!
//! let property = bundled::safeiter();
//! let model = LossModel::dropped_count(property.alphabet(), 2).unwrap();
//! let monitor = synthesis::synthesize_optimal(&property, &model).unwrap();
//! let outcome = Monitor::from_alternate(&monitor)
//!     .run_tokens(["2", "n", "u", "n", "2", "n"])
//!     .unwrap();
//! assert_eq!(outcome.verdict, Verdict::False);
//! ```

pub mod automata;
pub mod bundled;
pub mod dot;
mod error;
pub mod experiment;
pub mod injector;
pub mod lossmodel;
pub mod oracle;
pub mod runtime;
pub mod specio;
pub mod synthesis;

pub use automata::{
    Alphabet, Dfa, LabeledDfa, MergeClasses, Nfa, StateId, SubsetLabel, SymbolId, TransitionSystem,
};
pub use error::{Error, Result};
pub use lossmodel::{InverseSpec, LossModel};
pub use runtime::{Monitor, MonitorSession, Verdict};
pub use synthesis::{AlternateMonitor, MonitorMode};
