// SPDX-License-Identifier: Apache-2.0

//! Test support for `bd-cutoff`: reference computations that share no code
//! with the library, random chain generators, and the catalogue of worked
//! examples with independently computed expected values.

pub mod chains;
pub mod derived;
pub mod oracles;
