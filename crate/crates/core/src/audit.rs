//! Process-wide counters for the runtime checks performed by the solvers.
//!
//! Every check either passes (counted here) or aborts the computation with
//! [`crate::Error::Invariant`]; failures are counted too, so harnesses can
//! report how many checks ran.

use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Lmp,
    PrunedStructure,
    Bracket,
    ExtremePoint,
    Rounding,
    Combination,
    Translation,
    SwapBound,
    IntersectionBound,
    OutlierBounds,
    SupplierRadius,
}

const ALL: [Check; 11] = [
    Check::Lmp,
    Check::PrunedStructure,
    Check::Bracket,
    Check::ExtremePoint,
    Check::Rounding,
    Check::Combination,
    Check::Translation,
    Check::SwapBound,
    Check::IntersectionBound,
    Check::OutlierBounds,
    Check::SupplierRadius,
];

static PASSED: [AtomicU64; 11] = [const { AtomicU64::new(0) }; 11];
static FAILED: [AtomicU64; 11] = [const { AtomicU64::new(0) }; 11];

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Lmp => "lmp",
            Check::PrunedStructure => "pruned-structure",
            Check::Bracket => "bracket",
            Check::ExtremePoint => "extreme-point",
            Check::Rounding => "rounding",
            Check::Combination => "combination",
            Check::Translation => "translation",
            Check::SwapBound => "swap-bound",
            Check::IntersectionBound => "intersection-bound",
            Check::OutlierBounds => "outlier-bounds",
            Check::SupplierRadius => "supplier-radius",
        }
    }
}

/// Records the outcome of `check` and turns a failure into an error.
pub fn record(check: Check, ok: bool, detail: impl FnOnce() -> String) -> crate::Result<()> {
    let idx = check as usize;
    if ok {
        PASSED[idx].fetch_add(1, Ordering::Relaxed);
        Ok(())
    } else {
        FAILED[idx].fetch_add(1, Ordering::Relaxed);
        Err(crate::Error::invariant(check.name(), detail()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Snapshot {
    pub passed: Vec<(Check, u64)>,
    pub failed: Vec<(Check, u64)>,
}

impl Snapshot {
    pub fn passed(&self, check: Check) -> u64 {
        self.passed.iter().find(|(c, _)| *c == check).map_or(0, |x| x.1)
    }

    pub fn failed(&self, check: Check) -> u64 {
        self.failed.iter().find(|(c, _)| *c == check).map_or(0, |x| x.1)
    }
}

pub fn snapshot() -> Snapshot {
    Snapshot {
        passed: ALL.iter().map(|&c| (c, PASSED[c as usize].load(Ordering::Relaxed))).collect(),
        failed: ALL.iter().map(|&c| (c, FAILED[c as usize].load(Ordering::Relaxed))).collect(),
    }
}
