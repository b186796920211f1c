use crate::netmodel::{LinkId, SpectrumGrid};

/// Lowest start slot such that `width` contiguous slots are free on every
/// link in `links`; `None` when the request is blocked.
pub fn first_fit(grid: &SpectrumGrid, links: &[LinkId], width: usize) -> Option<usize> {
    assert!(width >= 1, "first-fit width must be at least one slot");
    let slots = grid.slot_count();
    let mut run = 0usize;
    for s in 0..slots {
        if links.iter().all(|&l| grid.is_free(l, s)) {
            run += 1;
            if run == width {
                return Some(s + 1 - width);
            }
        } else {
            run = 0;
        }
    }
    None
}
