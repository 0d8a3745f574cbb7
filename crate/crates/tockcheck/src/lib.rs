//! Text front-end for `tockcheck-core`: the `.twmodel` and `.twassert`
//! languages, result reports and the pipeline behind the command line tool.

pub mod diag;
pub mod lexer;
pub mod parse;
pub mod print;
pub mod report;
pub mod run;
