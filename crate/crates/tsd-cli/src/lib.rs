//! Library backing the `tsd` binary: command definitions, dispatch, the
//! verification suite, and report emission.

pub mod checks;
pub mod cli;
pub mod output;
