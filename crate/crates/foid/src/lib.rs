//! First-order logic with inductive definitions: syntax, a proof kernel for
//! the sequent calculus, and finite-domain well-founded and stable semantics.

pub mod cli;
pub mod corpus;
pub mod kernel;
pub mod parser;
pub mod semantics;
pub mod stable;
pub mod syntax;
pub mod validator;
pub mod wf;
