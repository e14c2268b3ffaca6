//! Experiment driver: vector families, error estimation, cost audits,
//! parameter tables and CSV comparisons.

pub mod audit;
pub mod config;
pub mod experiment;
pub mod families;
pub mod tables;

pub use audit::{cost_audit, AuditConfig, AuditReport, AuditTarget};
pub use config::{load_config, parse_config};
pub use experiment::{estimate_error, ErrorEstimate, ExperimentConfig, Method, MethodKind, PreparedMethod};
pub use families::{gen_vector, VectorFamily};
pub use tables::{
    compare_csv, compare_methods, param_table, param_table_csv, CompareConfig, CompareRow, ParamRow,
    ParamTargets, CSV_HEADER,
};
