//! Cut-shortcut pointer analysis over a mini object-oriented IR.
//!
//! The crate is organised around a small pipeline:
//!
//! * [`ir`] — parse, print and query IR programs,
//! * [`solver`] — a context-insensitive inclusion solver over an explicit
//!   pointer flow graph, parameterised by an [`solver::EdgePolicy`],
//! * [`cutshortcut`] — the cut/shortcut edge policy (field-store,
//!   field-load, container and local-flow patterns),
//! * [`ctxsens`] — conventional k-CFA / k-object-sensitive baselines,
//! * [`interp`] — a bounded-exhaustive concrete interpreter used as a
//!   soundness oracle,
//! * [`clients`] — precision metrics computed from analysis results,
//! * [`stress`] — a deterministic corpus/stress program generator.

pub mod clients;
pub mod ctxsens;
pub mod cutshortcut;
pub mod interp;
pub mod ir;
pub mod solver;
pub mod stress;

pub use clients::{compare_metrics, compute_metrics, Comparison, Metrics};
pub use ctxsens::{solve_context_sensitive, CtxFlavor};
pub use cutshortcut::{ContainerModel, CutShortcutPolicy, Pattern, PatternSet};
pub use interp::{check_recall, explore, Budget, DynamicFacts};
pub use ir::{parse_program, ClassId, FieldId, MethodId, Program, SiteId, VarId};
pub use solver::{solve, AnalysisResult, EmptyPolicy, Pointer};
