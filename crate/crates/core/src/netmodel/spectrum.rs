use std::ops::Range;

use crate::error::{Error, Result};

use super::LinkId;

pub const SLOT_WIDTH_GHZ: f64 = 12.5;
pub const C_BAND_GHZ: f64 = 4800.0;
pub const SLOT_COUNT: usize = 384;

/// What holds a slot: a standalone lightpath or a reserved MWS block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotOwner {
    Lightpath(usize),
    Block(usize),
}

/// Per-link slot occupancy. Both directions of a link share one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    slots: usize,
    links: Vec<Vec<Option<SlotOwner>>>,
}

impl SpectrumGrid {
    /// A C-band grid (384 × 12.5 GHz) for `link_count` links.
    pub fn new(link_count: usize) -> Self {
        Self::with_slots(link_count, SLOT_COUNT)
    }

    pub fn with_slots(link_count: usize, slots: usize) -> Self {
        SpectrumGrid {
            slots,
            links: vec![vec![None; slots]; link_count],
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slots
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn owner(&self, link: LinkId, slot: usize) -> Option<SlotOwner> {
        self.links[link][slot]
    }

    pub fn is_free(&self, link: LinkId, slot: usize) -> bool {
        self.links[link][slot].is_none()
    }

    pub fn is_range_free(&self, links: &[LinkId], range: Range<usize>) -> bool {
        range.end <= self.slots
            && links
                .iter()
                .all(|&l| self.links[l][range.clone()].iter().all(Option::is_none))
    }

    /// Marks `range` on every link of `links` as held by `owner`. Fails
    /// without modifying the grid if any slot is taken.
    pub fn allocate(
        &mut self,
        links: &[LinkId],
        range: Range<usize>,
        owner: SlotOwner,
    ) -> Result<()> {
        if range.is_empty() || !self.is_range_free(links, range.clone()) {
            return Err(Error::Domain(format!(
                "slots {range:?} unavailable for {owner:?}"
            )));
        }
        for &l in links {
            for s in &mut self.links[l][range.clone()] {
                *s = Some(owner);
            }
        }
        Ok(())
    }

    pub fn release(&mut self, links: &[LinkId], range: Range<usize>) {
        for &l in links {
            for s in &mut self.links[l][range.clone()] {
                *s = None;
            }
        }
    }

    pub fn occupied_slots(&self, link: LinkId) -> usize {
        self.links[link].iter().filter(|s| s.is_some()).count()
    }

    /// Fraction of all link-slots in use, in [0, 1].
    pub fn occupancy(&self) -> f64 {
        let total = self.slots * self.links.len();
        if total == 0 {
            return 0.0;
        }
        let used: usize = (0..self.links.len()).map(|l| self.occupied_slots(l)).sum();
        used as f64 / total as f64
    }
}
