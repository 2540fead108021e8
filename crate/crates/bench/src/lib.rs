//! Benchmark helpers: parsed stress programs at a few scales.

use csc_core::{parse_program, Program};

/// Generate and parse a stress program with `n` containers (and the mixer
/// family once `n >= 2`).
pub fn stress_program(n: u32) -> Program {
    let spec = csc_core::stress::StressSpec {
        seed: 7,
        n_containers: n,
        n_field_wrappers: n / 4,
        n_local_flows: n / 4,
        depth: 3,
    };
    parse_program(&csc_core::stress::generate(&spec)).expect("generated program parses")
}

/// The bundled container model, parsed.
pub fn std_model() -> csc_core::ContainerModel {
    csc_core::ContainerModel::parse(csc_core::stress::CONTAINER_MODEL).expect("model parses")
}
