// Each chapter of the guide is attached to an empty module so `cargo test
// --doc` compiles and runs its code blocks. The chapter files are the single
// source; nothing is duplicated here.

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/bath.md")]
pub mod bath_chapter {}

#[doc = include_str!("../../../book/src/filters.md")]
pub mod filters {}

#[doc = include_str!("../../../book/src/entanglement.md")]
pub mod entanglement_chapter {}

#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
