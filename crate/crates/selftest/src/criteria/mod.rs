//! The twelve acceptance criteria.

use std::sync::Arc;

use crate::Criterion;

mod analysis;
mod determinism;
mod periods;
mod structure;
mod vc;

macro_rules! criterion {
    ($ty:ident, $id:expr, $name:expr, $secs:expr, $title:expr, $run:path) => {
        pub struct $ty;

        impl vcgrp_core::registry::Named for $ty {
            fn name(&self) -> &'static str {
                $name
            }
        }

        impl $crate::Criterion for $ty {
            fn id(&self) -> u32 {
                $id
            }

            fn title(&self) -> &'static str {
                $title
            }

            fn limit(&self) -> std::time::Duration {
                std::time::Duration::from_secs($secs)
            }

            fn run(&self, ctx: &$crate::Context) -> vcgrp_core::Result<$crate::Outcome> {
                $run(ctx)
            }
        }
    };
}
pub(crate) use criterion;

pub use analysis::{BohrStructure, FourierIdentities};
pub use determinism::Determinism;
pub use periods::{BootstrapValidity, SamplerSoundness};
pub use structure::{Bogolyubov, Modelling, Regularity, Stability};
pub use vc::{Invariance, VcCosets, VcProgressions};

pub fn all() -> Vec<Arc<dyn Criterion>> {
    vec![
        Arc::new(VcCosets),
        Arc::new(VcProgressions),
        Arc::new(Invariance),
        Arc::new(SamplerSoundness),
        Arc::new(BootstrapValidity),
        Arc::new(FourierIdentities),
        Arc::new(BohrStructure),
        Arc::new(Regularity),
        Arc::new(Bogolyubov),
        Arc::new(Modelling),
        Arc::new(Stability),
        Arc::new(Determinism),
    ]
}
