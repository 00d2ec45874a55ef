// Shared support for the integration suites. Each test target uses a
// subset, so unused-item lints are off.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;
